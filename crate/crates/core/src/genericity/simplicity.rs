use alloc::vec::Vec;

use serde::Serialize;

use crate::assembly::AssemblyOptions;
use crate::geometry::{sample_random_conformal, ConformalSampler, Mesh, MetricField, ScalarField};
use crate::steklov::{extract_trace, steklov_eigs_with, BoundaryTrace, SteklovSpectrum, SteklovSystem};
use crate::Result;

use super::scan::sup_normalized;

/// `e^{σ} · base` — conformal, hence SPD for every `σ`.
pub fn perturbed_metric(base: &MetricField, sigma: &ScalarField) -> MetricField {
    base.clone().conformal_to(sigma.clone().scaled(0.5))
}

/// One perturbed metric with its spectrum.
#[derive(Clone, Debug)]
pub struct Trial {
    pub seed: u64,
    pub sigma: ScalarField,
    pub system: SteklovSystem,
    pub spectrum: SteklovSpectrum,
}

impl Trial {
    pub fn record(&self, m: usize) -> SimplicityRecord {
        simplicity_record(self.seed, &self.spectrum, m)
    }

    /// Sup-normalized traces of the first `m` non-constant eigenfunctions,
    /// every boundary loop.
    pub fn traces(&self, m: usize) -> Result<Vec<BoundaryTrace>> {
        let z = self.spectrum.zero_modes().end;
        let mut out = Vec::new();
        for n in z..(z + m).min(self.spectrum.len()) {
            for t in extract_trace(&self.spectrum, n, &self.system.mesh, &self.system.metric)? {
                out.push(sup_normalized(&t));
            }
        }
        Ok(out)
    }
}

/// Builds the metric `e^{σ}·base` for the seeded sampler and solves enough of
/// its spectrum to judge the first `m` nonzero eigenvalues.
pub fn sample_trial(
    mesh: &Mesh,
    base: &MetricField,
    sampler: ConformalSampler,
    seed: u64,
    m: usize,
    gap_tol: f64,
    options: AssemblyOptions,
) -> Result<Trial> {
    let sigma = match sample_random_conformal(seed, sampler.modes, sampler.amplitude) {
        crate::geometry::PerturbationDirection::Conformal { sigma } => sigma,
        crate::geometry::PerturbationDirection::General { .. } => unreachable!("sampler is conformal"),
    };
    trial_for(mesh, base, sigma, seed, m, gap_tol, options)
}

pub(crate) fn trial_for(
    mesh: &Mesh,
    base: &MetricField,
    sigma: ScalarField,
    seed: u64,
    m: usize,
    gap_tol: f64,
    options: AssemblyOptions,
) -> Result<Trial> {
    let system = SteklovSystem::new(mesh.clone(), perturbed_metric(base, &sigma), options)?;
    let count = (mesh.boundary_loops().len() + m + 1).min(system.dtn.num_boundary());
    let spectrum = steklov_eigs_with(&system.dtn, count, gap_tol)?;
    Ok(Trial { seed, sigma, system, spectrum })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplicityRecord {
    pub seed: u64,
    pub zero_modes: usize,
    /// first `m` nonzero eigenvalues (fewer if the pencil is smaller)
    pub eigenvalues: Vec<f64>,
    /// size of the cluster of each of those eigenvalues
    pub cluster_sizes: Vec<usize>,
    /// `min (λ_{i+1} − λ_i) / max(1, λ_i)` over consecutive nonzero
    /// eigenvalues up to and including the one after the `m`-th
    pub min_gap: f64,
    pub all_simple: bool,
}

/// Multiplicity structure of the first `m` nonzero eigenvalues.
pub fn simplicity_record(seed: u64, spectrum: &SteklovSpectrum, m: usize) -> SimplicityRecord {
    let z = spectrum.zero_modes().end;
    let end = (z + m).min(spectrum.len());
    let eigenvalues = spectrum.eigenvalues[z..end].to_vec();
    let cluster_sizes: Vec<usize> =
        (z..end).map(|n| spectrum.cluster_of(n).map_or(1, |c| c.len())).collect();
    let upto = (end + 1).min(spectrum.len());
    let min_gap = spectrum.eigenvalues[z..upto]
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(1.0))
        .fold(f64::INFINITY, f64::min);
    let all_simple = cluster_sizes.iter().all(|&c| c == 1);
    SimplicityRecord { seed, zero_modes: z, eigenvalues, cluster_sizes, min_gap, all_simple }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplicityStats {
    pub trials: usize,
    pub fully_simple: usize,
    pub fraction: f64,
    pub failing_seeds: Vec<u64>,
    pub min_gap: f64,
    pub records: Vec<SimplicityRecord>,
}

impl SimplicityStats {
    /// Summary of records, kept in the given order.
    pub fn from_records(records: Vec<SimplicityRecord>) -> Self {
        let trials = records.len();
        let failing_seeds: Vec<u64> = records.iter().filter(|r| !r.all_simple).map(|r| r.seed).collect();
        let fully_simple = trials - failing_seeds.len();
        let fraction = if trials == 0 { 0.0 } else { fully_simple as f64 / trials as f64 };
        let min_gap = records.iter().map(|r| r.min_gap).fold(f64::INFINITY, f64::min);
        SimplicityStats { trials, fully_simple, fraction, failing_seeds, min_gap, records }
    }
}

/// Sequential scan over seeds `base_seed, base_seed + 1, …`.
#[allow(clippy::too_many_arguments)]
pub fn simplicity_scan(
    mesh: &Mesh,
    base: &MetricField,
    sampler: ConformalSampler,
    base_seed: u64,
    trials: usize,
    m: usize,
    gap_tol: f64,
    options: AssemblyOptions,
) -> Result<SimplicityStats> {
    let mut records = Vec::with_capacity(trials);
    for i in 0..trials as u64 {
        let seed = base_seed.wrapping_add(i);
        records.push(sample_trial(mesh, base, sampler, seed, m, gap_tol, options)?.record(m));
    }
    Ok(SimplicityStats::from_records(records))
}
