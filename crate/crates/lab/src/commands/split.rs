use serde::Serialize;
use steklov_core::genericity::{splitting_experiment, SplitOptions, SplitReport};
use steklov_core::geometry::{PerturbationDirection, ScalarField};
use steklov_core::steklov::steklov_eigs_with;

use super::Context;
use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::output::Artifacts;
use crate::svg::{Mark, Plot, Series};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitRow {
    pub t: f64,
    pub branch: usize,
    pub measured: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// Closed-form slopes on the disk of radius `R` for `σ = Re (x+iy)²`
/// (boundary values `R² cos 2θ`): only the `k = 1` pair splits, `∓λR²/4`.
#[derive(Debug, Serialize)]
struct SplitOracle {
    slopes: Vec<f64>,
    gap_rate: f64,
    /// `|gap/t − rate| / rate` at the smallest step
    deviation: f64,
}

#[derive(Serialize)]
struct SplitOutput<'a> {
    config: &'a ExperimentConfig,
    report: &'a SplitReport,
    oracle: Option<SplitOracle>,
    violations: &'a [String],
}

fn default_direction() -> PerturbationDirection {
    PerturbationDirection::conformal(ScalarField::harmonic_cos(2))
}

pub fn cmd_split(ctx: &Context) -> LabResult<Artifacts> {
    let cfg = &ctx.config;
    let tol = &cfg.tolerances;
    let sys = ctx.system()?;
    let spec = steklov_eigs_with(&sys.dtn, cfg.eigen_count, tol.gap_tol)?;
    let cluster = match cfg.perturbation.cluster {
        Some(i) => spec
            .cluster_of(i)
            .ok_or_else(|| LabError::Config(format!("perturbation.cluster = {i} but only {} eigenvalues computed", spec.len())))?,
        None => spec
            .nonzero_clusters()
            .find(|c| c.len() > 1 && c.end < spec.len())
            .cloned()
            .ok_or_else(|| LabError::Config("no multiple eigenvalue among the computed ones; set perturbation.cluster".into()))?,
    };
    let h = cfg.perturbation.direction.clone().unwrap_or_else(default_direction);
    let steps = cfg.perturbation.steps.clone().unwrap_or_else(|| vec![1e-2, 5e-3, 2.5e-3]);
    let report = splitting_experiment(&sys, &spec, cluster.clone(), &h, &steps, SplitOptions { gap_tol: tol.gap_tol })?;

    let mut out = Artifacts::default();
    for (i, o) in report.residual_order.iter().enumerate() {
        if let Some(o) = o.filter(|o| (o - 2.0).abs() > tol.order_band) {
            out.violation(format!("branch {i}: residual order {o:.3}"));
        }
    }
    if !report.skipped.is_empty() {
        out.violation(format!("steps skipped (metric not definite): {:?}", report.skipped));
    }
    let oracle = match cfg.euclidean_disk() {
        Some(r) if h == default_direction() && cluster.len() == 2 && (report.base_eigenvalue * r - 1.0).abs() < 0.05 => {
            let lam = 1.0 / r;
            let rate = lam * r * r / 2.0;
            let deviation = report.gap_rates().last().map_or(f64::INFINITY, |&(_, g)| (g - rate).abs() / rate);
            if deviation > tol.split_rate {
                out.violation(format!("gap/t deviates from {rate} by {deviation:.3e} (> {:e})", tol.split_rate));
            }
            Some(SplitOracle { slopes: vec![-rate / 2.0, rate / 2.0], gap_rate: rate, deviation })
        }
        _ => None,
    };

    let mut rows = Vec::new();
    for s in &report.steps {
        for (branch, (&m, &r)) in s.branches.iter().zip(&s.residuals).enumerate() {
            let predicted = report.base_eigenvalue + s.t * report.slopes[branch];
            rows.push(SplitRow { t: s.t, branch, measured: m, predicted, residual: r });
        }
    }
    out.csv("split.csv", &rows)?;
    if cfg.output.svg {
        let mut plot = Plot::new("Cluster branches", "t", "eigenvalue");
        let tmax = report.steps.iter().map(|s| s.t).fold(0.0, f64::max);
        for (i, slope) in report.slopes.iter().enumerate() {
            let mut pts = vec![(0.0, report.base_eigenvalue)];
            pts.extend(report.steps.iter().rev().map(|s| (s.t, s.branches[i])));
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            plot = plot.with(Series::new(format!("branch {i}"), pts, Mark::Circle));
            plot = plot.with(Series::new(
                format!("slope {slope:.4}"),
                vec![(0.0, report.base_eigenvalue), (tmax, report.base_eigenvalue + tmax * slope)],
                Mark::Dashed,
            ));
        }
        out.add("branches.svg", plot.render().into_bytes());
    }
    out.summary = format!(
        "cluster {:?} at λ = {:.6}: slopes {:?}, gap/t {:?}",
        report.cluster,
        report.base_eigenvalue,
        report.slopes,
        report.gap_rates().iter().map(|g| g.1).collect::<Vec<_>>()
    );
    let violations = out.violations.clone();
    out.json("split.json", &SplitOutput { config: cfg, report: &report, oracle, violations: &violations })?;
    Ok(out)
}
