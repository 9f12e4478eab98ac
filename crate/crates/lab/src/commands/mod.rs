use std::path::PathBuf;

use steklov_core::steklov::SteklovSystem;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::LabResult;
use crate::output::Artifacts;

mod oracle;
mod scan;
mod spectrum;
mod split;
mod variation;

pub use oracle::{cmd_oracle, OracleDomain, OracleRow};
pub use scan::{cmd_scan, cmd_wucp, AggregateRow, TrialRecord, WucpRecord};
pub use spectrum::{cmd_spectrum, ConvergenceRow};
pub use split::{cmd_split, SplitRow};
pub use variation::{cmd_variation_check, default_fd_directions};

/// A validated configuration plus the run environment.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: ExperimentConfig,
    /// directory relative mesh paths are resolved against
    pub base_dir: PathBuf,
    /// worker threads for trial batches (0 = all cores)
    pub threads: usize,
}

impl Context {
    pub fn new(config: ExperimentConfig) -> Self {
        Context { config, base_dir: PathBuf::from("."), threads: 0 }
    }

    pub(crate) fn system(&self) -> LabResult<SteklovSystem> {
        let mesh = self.config.mesh(&self.base_dir)?;
        Ok(SteklovSystem::new(mesh, self.config.metric.clone(), self.config.assembly)?)
    }
}

/// Runs the experiment named in the configuration. Nothing is written here.
pub fn run(ctx: &Context) -> LabResult<Artifacts> {
    log::info!("running {:?}", ctx.config.experiment);
    match ctx.config.experiment {
        ExperimentKind::Spectrum => cmd_spectrum(ctx),
        ExperimentKind::VariationCheck => cmd_variation_check(ctx),
        ExperimentKind::Split => cmd_split(ctx),
        ExperimentKind::Scan => cmd_scan(ctx),
        ExperimentKind::Wucp => cmd_wucp(ctx),
    }
}
