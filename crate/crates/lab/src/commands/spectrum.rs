use serde::Serialize;
use steklov_core::oracle::{annulus_spectrum, disk_spectrum};
use steklov_core::steklov::{steklov_eigs_with, SteklovSpectrum, SteklovSystem};

use super::Context;
use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::output::Artifacts;
use crate::svg::{Mark, Plot, Series};

#[derive(Debug, Serialize)]
struct LevelRecord {
    level: u32,
    h_max: f64,
    vertices: usize,
    boundary_dofs: usize,
    eigenvalues: Vec<f64>,
    clusters: Vec<[usize; 2]>,
    max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: u32,
    pub h_max: f64,
    pub index: usize,
    pub eigenvalue: f64,
    pub oracle: Option<f64>,
    pub rel_error: Option<f64>,
    /// `log(e_prev/e) / log(h_prev/h)`
    pub order: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    config: &'a ExperimentConfig,
    levels: Vec<LevelRecord>,
    oracle: Option<Vec<f64>>,
    /// `max |ΨᵀM_bΨ − I|` at the finest level
    orthonormality: f64,
    /// `max |1ᵀM_bψ| / √|∂M|` over nonzero eigenpairs at the finest level
    mean_zero: f64,
    violations: &'a [String],
}

fn oracle_values(cfg: &ExperimentConfig) -> LabResult<Option<Vec<f64>>> {
    if let Some(r) = cfg.euclidean_disk() {
        return Ok(Some(disk_spectrum(r, cfg.eigen_count)?));
    }
    if let Some((a, b)) = cfg.euclidean_annulus() {
        return Ok(Some(annulus_spectrum(a, b, cfg.eigen_count)?));
    }
    Ok(None)
}

fn checks(spec: &SteklovSpectrum) -> (f64, f64) {
    let n = spec.len();
    let mut ortho: f64 = 0.0;
    let mut mean: f64 = 0.0;
    let ones = vec![1.0; spec.dimension];
    let m_ones = spec.mass.mul_vec(&ones);
    let perimeter = spec.mass.total().sqrt();
    let z = spec.zero_modes().end;
    for i in 0..n {
        let vi = spec.vector(i);
        let mvi = spec.mass.mul_vec(&vi);
        for j in 0..n {
            let vj = spec.eigenvectors.column(j);
            let g: f64 = mvi.iter().zip(vj.iter()).map(|(a, b)| a * b).sum();
            ortho = ortho.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
        if i >= z {
            let m: f64 = vi.iter().zip(&m_ones).map(|(a, b)| a * b).sum();
            mean = mean.max(m.abs() / perimeter);
        }
    }
    (ortho, mean)
}

pub fn cmd_spectrum(ctx: &Context) -> LabResult<Artifacts> {
    let cfg = &ctx.config;
    let meshes = cfg.mesh_levels(&ctx.base_dir)?;
    let oracle = oracle_values(cfg)?;
    let mut levels = Vec::new();
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut last = None;
    for (level, mesh) in meshes.into_iter().enumerate() {
        let (h, nv) = (mesh.h_max(), mesh.num_vertices());
        let sys = SteklovSystem::new(mesh, cfg.metric.clone(), cfg.assembly)?;
        let spec = steklov_eigs_with(&sys.dtn, cfg.eigen_count, cfg.tolerances.gap_tol)?;
        log::info!("level {level}: h = {h:.4}, {} boundary dofs", spec.dimension);
        for (index, &value) in spec.eigenvalues.iter().enumerate() {
            let o = oracle.as_ref().map(|o| o[index]);
            let rel_error = o.filter(|&o| o > 0.0).map(|o| (value - o).abs() / o);
            let order = match (rel_error, rows.iter().rev().find(|r| r.index == index && r.level + 1 == level as u32)) {
                (Some(e), Some(prev)) => prev.rel_error.filter(|&p| p > 0.0 && e > 0.0).map(|p| (p / e).ln() / (prev.h_max / h).ln()),
                _ => None,
            };
            rows.push(ConvergenceRow { level: level as u32, h_max: h, index, eigenvalue: value, oracle: o, rel_error, order });
        }
        levels.push(LevelRecord {
            level: level as u32,
            h_max: h,
            vertices: nv,
            boundary_dofs: spec.dimension,
            eigenvalues: spec.eigenvalues.clone(),
            clusters: spec.clusters.iter().map(|c| [c.start, c.end]).collect(),
            max_residual: spec.max_residual(),
        });
        last = Some(spec);
    }
    let spec = last.expect("at least one level");
    let (orthonormality, mean_zero) = checks(&spec);

    let mut out = Artifacts::default();
    let tol = &cfg.tolerances;
    if orthonormality > tol.orthonormality {
        out.violation(format!("eigenvectors not M_b-orthonormal: {orthonormality:e}"));
    }
    if mean_zero > tol.orthonormality {
        out.violation(format!("nonzero-eigenvalue eigenvectors not mean-zero: {mean_zero:e}"));
    }
    if let Some(t) = tol.oracle {
        let finest = levels.len() as u32 - 1;
        for r in rows.iter().filter(|r| r.level == finest) {
            if let Some(e) = r.rel_error.filter(|&e| e > t) {
                out.violation(format!("eigenvalue {} off the closed form by {e:.3e} (> {t:e})", r.index));
            }
        }
    }
    let finest = levels.last().expect("at least one level");
    out.summary = format!(
        "{} eigenvalues on {} boundary dofs, max residual {:.2e}",
        finest.eigenvalues.len(),
        finest.boundary_dofs,
        finest.max_residual
    );
    if cfg.output.svg {
        let mut plot = Plot::new("Steklov eigenvalues", "index", "eigenvalue").with(Series::new(
            "computed",
            spec.eigenvalues.iter().enumerate().map(|(i, &l)| (i as f64, l)).collect(),
            Mark::Circle,
        ));
        if let Some(o) = &oracle {
            plot = plot.with(Series::new("closed form", o.iter().enumerate().map(|(i, &l)| (i as f64, l)).collect(), Mark::Square));
        }
        out.add("ladder.svg", plot.render().into_bytes());
    }
    out.csv("convergence.csv", &rows)?;
    let violations = out.violations.clone();
    out.json("spectrum.json", &SpectrumReport { config: cfg, levels, oracle, orthonormality, mean_zero, violations: &violations })?;
    Ok(out)
}
