use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use steklov_core::geometry::{sample_random_conformal, PerturbationDirection, ScalarField, TensorField, TrigTerm, Wave};
use steklov_core::steklov::{steklov_eigs_with, SteklovSpectrum, SteklovSystem};
use steklov_core::variation::{density_identity_residual, dtn_variation_with, fd_convergence, FdStudy, MetricDerivative};

use super::Context;
use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::output::Artifacts;

/// Five fixed non-conformal directions.
pub fn default_fd_directions() -> Vec<PerturbationDirection> {
    let z = ScalarField::zero;
    let p = ScalarField::polynomial;
    vec![
        PerturbationDirection::general(TensorField::diagonal(p(&[(1.0, 1, 0)]), p(&[(-1.0, 1, 0)]))),
        PerturbationDirection::general(TensorField { xx: z(), xy: ScalarField::linear(0.2, 0.5, 0.5), yy: z() }),
        PerturbationDirection::general(TensorField::diagonal(p(&[(0.5, 0, 0), (1.0, 0, 2)]), z())),
        PerturbationDirection::general(TensorField { xx: p(&[(1.0, 1, 1)]), xy: p(&[(0.3, 2, 0)]), yy: p(&[(-0.4, 0, 1)]) }),
        PerturbationDirection::general(TensorField::diagonal(
            z(),
            ScalarField::Trig { amplitude: 0.5, terms: vec![TrigTerm { coefficient: 1.0, x: Wave::Cos(1), y: Wave::Cos(1) }] },
        )),
    ]
}

fn sigma_of(seed: u64, modes: u32, amplitude: f64) -> ScalarField {
    sample_random_conformal(seed, modes, amplitude).sigma().expect("conformal sampler").clone()
}

#[derive(Debug, Serialize)]
struct ConformalRecord {
    seed: u64,
    /// `max |DK_ij|`
    max_dk: f64,
    /// `‖dΛf + σλf/2‖_M / (λ‖f‖_M)` per nonzero eigenpair
    relative: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct FdRecord {
    direction: PerturbationDirection,
    study: FdStudy,
}

#[derive(Debug, Serialize)]
struct DensityRecord {
    pair: usize,
    index: usize,
    lambda: f64,
    lhs: f64,
    rhs: f64,
    residual: f64,
    scale: f64,
}

#[derive(Serialize)]
struct VariationReport<'a> {
    config: &'a ExperimentConfig,
    conformal: Vec<ConformalRecord>,
    fd: Vec<FdRecord>,
    density: Vec<DensityRecord>,
    max_conformal: f64,
    max_dk: f64,
    max_density_ratio: f64,
    violations: &'a [String],
}

fn conformal_checks(ctx: &Context, sys: &SteklovSystem, spec: &SteklovSpectrum) -> LabResult<Vec<ConformalRecord>> {
    let p = &ctx.config.perturbation;
    let verts = sys.mesh.vertices();
    let bverts = sys.mesh.boundary_vertices();
    let z = spec.zero_modes().end;
    let mut out = Vec::new();
    for i in 0..ctx.config.variation.conformal_samples as u64 {
        let seed = p.seed.wrapping_add(i);
        let sigma = sigma_of(seed, p.modes, p.amplitude);
        let d = MetricDerivative::new(sys, &PerturbationDirection::conformal(sigma.clone()))?;
        let max_dk = d.dk.matrix.max_abs();
        let mut relative = Vec::new();
        for n in z..spec.len() {
            let f = spec.vector(n);
            let lam = spec.eigenvalues[n];
            let r = dtn_variation_with(sys, &d, &f);
            let diff: Vec<f64> =
                bverts.iter().enumerate().map(|(k, &b)| r.dlf[k] + 0.5 * sigma.value(verts[b]) * lam * f[k]).collect();
            relative.push(spec.mass.norm(&diff) / (lam * spec.mass.norm(&f)));
        }
        out.push(ConformalRecord { seed, max_dk, relative });
    }
    Ok(out)
}

fn density_checks(ctx: &Context, sys: &SteklovSystem, spec: &SteklovSpectrum) -> LabResult<Vec<DensityRecord>> {
    let p = &ctx.config.perturbation;
    let v = &ctx.config.variation;
    let z = spec.zero_modes().end;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut out = Vec::new();
    for pair in 0..v.density_pairs {
        // σ seeds continue after the closed-form check's
        let sigma = sigma_of(p.seed.wrapping_add((v.conformal_samples + pair) as u64), p.modes, p.amplitude);
        let psi: Vec<f64> = (0..spec.dimension).map(|_| rng.random_range(-1.0..=1.0)).collect();
        for index in z..(z + v.density_modes).min(spec.len()) {
            let lambda = spec.eigenvalues[index];
            let d = density_identity_residual(sys, lambda, &spec.vector(index), &psi, &sigma)?;
            out.push(DensityRecord { pair, index, lambda, lhs: d.lhs, rhs: d.rhs, residual: d.residual, scale: d.scale });
        }
    }
    Ok(out)
}

/// Generic boundary data `Σ ψ_n / n` over the first nonzero eigenpairs.
fn probe(spec: &SteklovSpectrum) -> Vec<f64> {
    let z = spec.zero_modes().end;
    let mut f = vec![0.0; spec.dimension];
    for (k, n) in (z..spec.len().min(z + 5)).enumerate() {
        for (a, b) in f.iter_mut().zip(spec.eigenvectors.column(n).iter()) {
            *a += b / (k + 1) as f64;
        }
    }
    f
}

pub fn cmd_variation_check(ctx: &Context) -> LabResult<Artifacts> {
    let cfg = &ctx.config;
    let tol = &cfg.tolerances;
    let sys = ctx.system()?;
    let spec = steklov_eigs_with(&sys.dtn, cfg.eigen_count, tol.gap_tol)?;

    let conformal = conformal_checks(ctx, &sys, &spec)?;
    let f = probe(&spec);
    let steps = cfg.perturbation.steps.clone().unwrap_or_else(|| vec![1e-3, 5e-4, 2.5e-4]);
    let directions = cfg.perturbation.directions.clone().unwrap_or_else(default_fd_directions);
    let mut fd = Vec::new();
    for h in directions {
        let study = fd_convergence(&sys, &h, &f, &steps)?;
        fd.push(FdRecord { direction: h, study });
    }
    let density = density_checks(ctx, &sys, &spec)?;

    let mut out = Artifacts::default();
    let max_dk = conformal.iter().map(|c| c.max_dk).fold(0.0, f64::max);
    let max_conformal = conformal.iter().flat_map(|c| c.relative.iter().copied()).fold(0.0, f64::max);
    if max_dk > tol.conformal_dk {
        out.violation(format!("conformal DK entry {max_dk:e} > {:e}", tol.conformal_dk));
    }
    if max_conformal > tol.conformal {
        out.violation(format!("conformal closed form off by {max_conformal:e} > {:e}", tol.conformal));
    }
    for (i, r) in fd.iter().enumerate() {
        let rows = &r.study.rows;
        if r.study.reference_norm == 0.0 && rows.iter().all(|row| row.mismatch == 0.0) {
            continue;
        }
        for row in rows {
            if let Some(o) = row.order.filter(|o| (o - 2.0).abs() > tol.order_band) {
                out.violation(format!("direction {i}: FD order {o:.3} at t = {:e}", row.t));
            }
        }
        let last = rows.last().map_or(0.0, |row| row.mismatch);
        if last > tol.fd_mismatch {
            out.violation(format!("direction {i}: FD mismatch {last:e} > {:e}", tol.fd_mismatch));
        }
    }
    let max_density_ratio = density.iter().map(|d| if d.scale > 0.0 { d.residual / d.scale } else { d.residual }).fold(0.0, f64::max);
    if max_density_ratio > tol.density {
        out.violation(format!("integral identity residual ratio {max_density_ratio:e} > {:e}", tol.density));
    }
    out.summary = format!(
        "conformal {max_conformal:.2e}, DK {max_dk:.1e}, FD mismatch {:.2e}, identity {max_density_ratio:.2e}",
        fd.iter().filter_map(|r| r.study.rows.last()).map(|r| r.mismatch).fold(0.0, f64::max)
    );
    let violations = out.violations.clone();
    out.json(
        "variation.json",
        &VariationReport { config: cfg, conformal, fd, density, max_conformal, max_dk, max_density_ratio, violations: &violations },
    )?;
    Ok(out)
}
