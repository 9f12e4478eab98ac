//! Central-difference oracle over fully re-assembled operators.

use alloc::vec::Vec;

use serde::Serialize;

use super::discrete::dtn_variation;
use crate::assembly::AssemblyOptions;
use crate::geometry::{validate_spd, Mesh, MetricField, PerturbationDirection};
use crate::steklov::SteklovSystem;
use crate::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Smallest metric eigenvalue of `g ± t·h` over the mesh sample points.
fn shifted_min_eigenvalue(mesh: &Mesh, metric: &MetricField, h: &PerturbationDirection, t: f64) -> f64 {
    let plus = validate_spd(&metric.shifted(h, t), mesh).min_eigenvalue;
    let minus = validate_spd(&metric.shifted(h, -t), mesh).min_eigenvalue;
    plus.min(minus)
}

/// Errors with `StepTooLarge` when `g ± t·h` is not SPD on the mesh.
pub fn check_step(mesh: &Mesh, metric: &MetricField, h: &PerturbationDirection, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("finite-difference step must be positive, got {t}")));
    }
    let min = shifted_min_eigenvalue(mesh, metric, h, t);
    if !(min > 0.0) {
        return Err(Error::StepTooLarge { t, min_eigenvalue: min });
    }
    Ok(())
}

/// Halves `t0` until `g ± t·h` keeps at least half of the smallest eigenvalue
/// of `g` (at most 40 halvings).
pub fn adaptive_step(mesh: &Mesh, metric: &MetricField, h: &PerturbationDirection, t0: f64) -> Result<f64> {
    let base = validate_spd(metric, mesh).min_eigenvalue;
    let mut t = t0;
    for _ in 0..40 {
        let m = shifted_min_eigenvalue(mesh, metric, h, t);
        if m >= 0.5 * base {
            return Ok(t);
        }
        t *= 0.5;
    }
    Err(Error::StepTooLarge { t, min_eigenvalue: shifted_min_eigenvalue(mesh, metric, h, t) })
}

/// `[Λ(g+th)f − Λ(g−th)f] / 2t`.
pub fn finite_difference_dtn(
    mesh: &Mesh,
    metric: &MetricField,
    h: &PerturbationDirection,
    f: &[f64],
    t: f64,
    options: AssemblyOptions,
) -> Result<Vec<f64>> {
    check_step(mesh, metric, h, t)?;
    let plus = SteklovSystem::apply_dtn_sparse(mesh, &metric.shifted(h, t), options, f)?;
    let minus = SteklovSystem::apply_dtn_sparse(mesh, &metric.shifted(h, -t), options, f)?;
    Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * t)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdRow {
    pub t: f64,
    /// `‖FD(t) − dΛf‖_M / ‖dΛf‖_M` (absolute when `dΛf = 0`)
    pub mismatch: f64,
    /// mismatch(previous t) / mismatch(t)
    pub ratio: Option<f64>,
    /// `log₂` of the ratio normalized by the step ratio
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdStudy {
    pub rows: Vec<FdRow>,
    /// mismatch of `(4·FD(t/2) − FD(t))/3` built from the last two steps
    pub richardson_mismatch: Option<f64>,
    pub reference_norm: f64,
}

/// Mismatch of central differences against `dtn_variation` over a step list.
pub fn fd_convergence(sys: &SteklovSystem, h: &PerturbationDirection, f: &[f64], steps: &[f64]) -> Result<FdStudy> {
    let exact = dtn_variation(sys, h, f)?.dlf;
    let m = &sys.dtn.mass;
    let reference_norm = m.norm(&exact);
    let denom = if reference_norm > 0.0 { reference_norm } else { 1.0 };
    let mut rows: Vec<FdRow> = Vec::with_capacity(steps.len());
    let mut fds: Vec<Vec<f64>> = Vec::with_capacity(steps.len());
    for &t in steps {
        let fd = finite_difference_dtn(&sys.mesh, &sys.metric, h, f, t, sys.options)?;
        let diff: Vec<f64> = fd.iter().zip(&exact).map(|(a, b)| a - b).collect();
        let mismatch = m.norm(&diff) / denom;
        let (ratio, order) = match rows.last() {
            Some(prev) if mismatch > 0.0 => {
                let r = prev.mismatch / mismatch;
                (Some(r), Some(libm::log(r) / libm::log(prev.t / t)))
            }
            _ => (None, None),
        };
        rows.push(FdRow { t, mismatch, ratio, order });
        fds.push(fd);
    }
    let richardson_mismatch = if fds.len() >= 2 {
        let (a, b) = (&fds[fds.len() - 2], &fds[fds.len() - 1]);
        let q = steps[steps.len() - 2] / steps[steps.len() - 1];
        let w = q * q;
        let diff: Vec<f64> =
            a.iter().zip(b).zip(&exact).map(|((x, y), e)| (w * y - x) / (w - 1.0) - e).collect();
        Some(m.norm(&diff) / denom)
    } else {
        None
    };
    Ok(FdStudy { rows, richardson_mismatch, reference_norm })
}
