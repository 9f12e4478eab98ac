use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use steklov_lab::commands::{cmd_oracle, OracleDomain};
use steklov_lab::{run, Artifacts, Context, ExperimentConfig, ExperimentKind, LabError, LabResult, EXIT_OK, EXIT_TOLERANCE};

#[derive(Parser, Debug)]
#[command(name = "steklov", version, about = "Steklov spectra, metric variations and genericity experiments")]
struct Cli {
    /// TOML experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (overrides `output.dir`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// base seed (overrides `perturbation.seed`)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads, 0 = all cores
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// repeat for more log output
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// eigenvalues, convergence and oracle comparison
    Spectrum,
    /// derivative of the DtN map against its checks
    VariationCheck,
    /// first-order splitting of a multiple eigenvalue
    Split,
    /// simplicity, nodal and Morse scans over random metrics
    Scan,
    /// vanishing-arc check on boundary traces
    Wucp,
    /// run whatever `experiment` the config names
    Run,
    /// closed-form spectrum of a disk or annulus
    Oracle {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// inner radius; selects the annulus
        #[arg(long)]
        inner: Option<f64>,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn load_config(cli: &Cli, kind: Option<ExperimentKind>) -> LabResult<(ExperimentConfig, PathBuf)> {
    let (mut config, base_dir) = match &cli.config {
        Some(path) => {
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (ExperimentConfig::load(path)?, base)
        }
        None => {
            let kind = kind.ok_or_else(|| LabError::Config("`run` needs --config".into()))?;
            (ExperimentConfig::disk(kind, 0.1), PathBuf::from("."))
        }
    };
    if let Some(kind) = kind {
        config.experiment = kind;
    }
    if let Some(seed) = cli.seed {
        config.perturbation.seed = seed;
    }
    config.validate()?;
    Ok((config, base_dir))
}

fn execute(cli: &Cli) -> LabResult<(Artifacts, PathBuf)> {
    let kind = match &cli.command {
        Command::Oracle { radius, inner, count } => {
            let domain = match inner {
                Some(inner) => OracleDomain::Annulus { inner: *inner, outer: *radius },
                None => OracleDomain::Disk { radius: *radius },
            };
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            return Ok((cmd_oracle(domain, *count)?, out));
        }
        Command::Spectrum => Some(ExperimentKind::Spectrum),
        Command::VariationCheck => Some(ExperimentKind::VariationCheck),
        Command::Split => Some(ExperimentKind::Split),
        Command::Scan => Some(ExperimentKind::Scan),
        Command::Wucp => Some(ExperimentKind::Wucp),
        Command::Run => None,
    };
    let (config, base_dir) = load_config(cli, kind)?;
    // --out only redirects the files; the recorded config stays as loaded
    let dir = cli.out.clone().unwrap_or_else(|| config.output.dir.clone());
    let ctx = Context { config, base_dir, threads: cli.threads };
    Ok((run(&ctx)?, dir))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = execute(&cli).and_then(|(artifacts, dir)| {
        artifacts.write_to(&dir)?;
        Ok((artifacts, dir))
    });
    match result {
        Ok((artifacts, dir)) => {
            // a closed pipe (`| head`) is not an error of the run
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", artifacts.summary);
            let _ = writeln!(stdout, "wrote {} files to {}", artifacts.files.len(), dir.display());
            for v in &artifacts.violations {
                eprintln!("violation: {v}");
            }
            ExitCode::from(if artifacts.passed() { EXIT_OK } else { EXIT_TOLERANCE })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
