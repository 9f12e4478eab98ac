use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::geometry::PerturbationDirection;
use crate::linalg::symmetric_eigen_sorted;
use crate::steklov::{steklov_eigs_with, SteklovSpectrum, SteklovSystem};
use crate::variation::{check_step, pencil_derivative_apply, MetricDerivative};
use crate::{Error, Result};

/// `P_ij = f_iᵀ (DS − λ DM_b) f_j` over the cluster basis, symmetrized.
/// `λ` is the cluster mean.
pub fn splitting_matrix(
    sys: &SteklovSystem,
    spectrum: &SteklovSpectrum,
    cluster: Range<usize>,
    h: &PerturbationDirection,
) -> Result<DMatrix<f64>> {
    if cluster.is_empty() || cluster.end > spectrum.len() {
        return Err(Error::InvalidInput(format!("cluster {cluster:?} outside {} computed pairs", spectrum.len())));
    }
    let d = MetricDerivative::new(sys, h)?;
    Ok(splitting_matrix_with(sys, spectrum, cluster, &d))
}

fn cluster_mean(spectrum: &SteklovSpectrum, cluster: &Range<usize>) -> f64 {
    spectrum.eigenvalues[cluster.clone()].iter().sum::<f64>() / cluster.len() as f64
}

fn splitting_matrix_with(
    sys: &SteklovSystem,
    spectrum: &SteklovSpectrum,
    cluster: Range<usize>,
    d: &MetricDerivative,
) -> DMatrix<f64> {
    let lambda = cluster_mean(spectrum, &cluster);
    let m = cluster.len();
    let basis: Vec<Vec<f64>> = cluster.clone().map(|k| spectrum.vector(k)).collect();
    let images: Vec<Vec<f64>> = basis.iter().map(|f| pencil_derivative_apply(sys, d, lambda, f)).collect();
    let p = DMatrix::from_fn(m, m, |i, j| crate::linalg::dot(&basis[i], &images[j]));
    (&p + p.transpose()) * 0.5
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitOptions {
    pub gap_tol: f64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { gap_tol: crate::steklov::DEFAULT_GAP_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitStep {
    pub t: f64,
    /// measured `λ_i(t)`, ascending
    pub branches: Vec<f64>,
    /// `|λ_i(t) − (λ + t·slope_i)|`
    pub residuals: Vec<f64>,
    /// `max_i (λ_{i+1}(t) − λ_i(t))`
    pub gap: f64,
    pub split: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitReport {
    pub cluster: Range<usize>,
    pub base_eigenvalue: f64,
    pub direction: PerturbationDirection,
    /// eigenvalues of the splitting matrix, ascending
    pub slopes: Vec<f64>,
    pub steps: Vec<SplitStep>,
    /// steps where `g ± t·h` lost definiteness
    pub skipped: Vec<f64>,
    /// base cluster width plus eigensolver residual, in eigenvalue units
    pub noise: f64,
    /// split threshold `max(5·gap_tol·λ, 10·noise)`
    pub split_threshold: f64,
    /// least-squares slope of `log r_i` against `log t`, per branch, over
    /// steps with residual above `10·noise`
    pub residual_order: Vec<Option<f64>>,
    /// every retained step splits the cluster
    pub split: bool,
}

impl SplitReport {
    /// `gap(t)/t` for each retained step.
    pub fn gap_rates(&self) -> Vec<(f64, f64)> {
        self.steps.iter().map(|s| (s.t, s.gap / s.t)).collect()
    }
}

fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(t, r)| (libm::log(t), libm::log(r))).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx > 0.0 { Some(sxy / sxx) } else { None }
}

/// Re-solves the pencil on `g + t·h` for each step and compares the cluster
/// branches with first-order predictions (matched by ordering).
pub fn splitting_experiment(
    sys: &SteklovSystem,
    spectrum: &SteklovSpectrum,
    cluster: Range<usize>,
    h: &PerturbationDirection,
    steps: &[f64],
    opts: SplitOptions,
) -> Result<SplitReport> {
    let p = splitting_matrix(sys, spectrum, cluster.clone(), h)?;
    let slopes = symmetric_eigen_sorted(&p)?.0;
    let lambda = cluster_mean(spectrum, &cluster);
    let values = &spectrum.eigenvalues[cluster.clone()];
    let width = values[values.len() - 1] - values[0];
    let resid = cluster.clone().map(|k| spectrum.residuals[k]).fold(0.0, f64::max);
    let noise = width + resid * sys.dtn.schur_norm();
    let split_threshold = (5.0 * opts.gap_tol * lambda).max(10.0 * noise);

    let mut out = Vec::with_capacity(steps.len());
    let mut skipped = Vec::new();
    for &t in steps {
        if let Err(Error::StepTooLarge { .. }) = check_step(&sys.mesh, &sys.metric, h, t) {
            skipped.push(t);
            continue;
        }
        let moved = SteklovSystem::new(sys.mesh.clone(), sys.metric.shifted(h, t), sys.options)?;
        let spec_t = steklov_eigs_with(&moved.dtn, cluster.end, opts.gap_tol)?;
        let branches: Vec<f64> = spec_t.eigenvalues[cluster.clone()].to_vec();
        let residuals = branches.iter().zip(&slopes).map(|(b, s)| (b - (lambda + t * s)).abs()).collect();
        let gap = branches.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        out.push(SplitStep { t, branches, residuals, gap, split: gap > split_threshold });
    }
    let floor = 10.0 * noise;
    let residual_order = (0..cluster.len())
        .map(|i| {
            let pts: Vec<(f64, f64)> =
                out.iter().filter(|s| s.residuals[i] > floor).map(|s| (s.t, s.residuals[i])).collect();
            log_log_slope(&pts)
        })
        .collect();
    let split = !out.is_empty() && out.iter().all(|s| s.split);
    Ok(SplitReport {
        cluster,
        base_eigenvalue: lambda,
        direction: h.clone(),
        slopes,
        steps: out,
        skipped,
        noise,
        split_threshold,
        residual_order,
        split,
    })
}
