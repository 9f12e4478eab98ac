use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::DtnOperator;
use crate::assembly::BoundaryMassMatrix;
use crate::linalg::{pencil_residual, symmetric_definite_eigen};
use crate::{Error, Result};

/// Relative eigenvalue gap below which two eigenvalues count as one cluster.
pub const DEFAULT_GAP_TOL: f64 = 1e-6;

const ROTATION_TOL: f64 = 1e-10;

/// Leading eigenpairs of `(S, M_b)`.
#[derive(Clone, Debug)]
pub struct SteklovSpectrum {
    pub eigenvalues: Vec<f64>,
    /// `M_b`-orthonormal columns, boundary-DOF numbering
    pub eigenvectors: DMatrix<f64>,
    /// maximal runs of numerically equal eigenvalues (within the returned count)
    pub clusters: Vec<Range<usize>>,
    pub gap_tol: f64,
    /// `‖Sψ − λM_bψ‖ / (‖S‖_F ‖ψ‖)` per pair
    pub residuals: Vec<f64>,
    pub mass: BoundaryMassMatrix,
    /// size of the full pencil
    pub dimension: usize,
}

impl SteklovSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.dimension
    }

    pub fn vector(&self, n: usize) -> Vec<f64> {
        self.eigenvectors.column(n).iter().copied().collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Cluster containing eigenvalue index `n`.
    pub fn cluster_of(&self, n: usize) -> Option<Range<usize>> {
        self.clusters.iter().find(|c| c.contains(&n)).cloned()
    }

    /// Indices of (numerically) zero eigenvalues: `λ_n ≤ 1e−9 · max λ`.
    pub fn zero_modes(&self) -> Range<usize> {
        let top = self.eigenvalues.iter().copied().fold(0.0, f64::max);
        let end = self.eigenvalues.iter().take_while(|&&l| l <= 1e-9 * top).count();
        0..end
    }

    /// Clusters of nonzero eigenvalues, in order.
    pub fn nonzero_clusters(&self) -> impl Iterator<Item = &Range<usize>> {
        let z = self.zero_modes().end;
        self.clusters.iter().filter(move |c| c.start >= z)
    }
}

/// Groups sorted eigenvalues into maximal runs with
/// `λ_{i+1} − λ_i ≤ gap_tol · max(1, λ_i)`.
pub fn cluster_multiplicities(eigenvalues: &[f64], gap_tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] > gap_tol * eigenvalues[i - 1].abs().max(1.0) {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Fixes the basis of a cluster: the first vector maximizes the value at the
/// lowest boundary DOF with non-vanishing cluster content, the next ones do
/// the same on the orthogonal complement at subsequent DOFs. Signs come out
/// positive at the selecting DOF. M_b-orthonormality is preserved because the
/// rotation is orthogonal.
fn canonical_rotation(block: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = block.shape();
    let scale = (0..n).map(|r| block.row(r).norm()).fold(0.0, f64::max);
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(m);
    for r in 0..n {
        if q.len() == m {
            break;
        }
        let mut v = block.row(r).transpose();
        for _ in 0..2 {
            for b in &q {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 * scale {
            q.push(v / norm);
        }
    }
    // numerically impossible for a full-rank block, but keep the basis complete
    for e in 0..m {
        if q.len() == m {
            break;
        }
        let mut v = DVector::from_fn(m, |i, _| if i == e { 1.0 } else { 0.0 });
        for b in &q {
            let c = b.dot(&v);
            v -= b * c;
        }
        if v.norm() > 0.5 {
            let norm = v.norm();
            q.push(v / norm);
        }
    }
    block * DMatrix::from_columns(&q)
}

/// Solves the full pencil, clusters, rotates clusters canonically and keeps
/// the first `count` pairs.
pub fn steklov_eigs(dtn: &DtnOperator, count: usize) -> Result<SteklovSpectrum> {
    steklov_eigs_with(dtn, count, DEFAULT_GAP_TOL)
}

pub fn steklov_eigs_with(dtn: &DtnOperator, count: usize, gap_tol: f64) -> Result<SteklovSpectrum> {
    let nb = dtn.num_boundary();
    if count == 0 || count > nb {
        return Err(Error::InvalidInput(format!("requested {count} eigenpairs of a pencil of size {nb}")));
    }
    let mass = dtn.mass.to_dense();
    let eig = symmetric_definite_eigen(&dtn.schur, &mass)?;
    let all = cluster_multiplicities(&eig.values, gap_tol);
    let mut vectors = eig.vectors;
    // Rotate only inside numerically exact degeneracies; mixing merely close
    // eigenvalues would spoil the pencil residual. Singletons get a sign fix.
    for c in &cluster_multiplicities(&eig.values, ROTATION_TOL) {
        let block = vectors.columns(c.start, c.len()).into_owned();
        let rotated = canonical_rotation(&block);
        vectors.columns_mut(c.start, c.len()).copy_from(&rotated);
    }
    let values: Vec<f64> = eig.values[..count].to_vec();
    let vectors = vectors.columns(0, count).into_owned();

    let residuals: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(k, &l)| pencil_residual(&dtn.schur, &mass, l, &vectors.column(k).into_owned()))
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if !(worst <= 1e-6) {
        return Err(Error::Eigensolver(format!("pencil residual {worst:e} after eigensolve (n = {nb})")));
    }
    let clusters = all
        .into_iter()
        .filter(|c| c.start < count)
        .map(|c| c.start..c.end.min(count))
        .collect();
    Ok(SteklovSpectrum {
        eigenvalues: values,
        eigenvectors: vectors,
        clusters,
        gap_tol,
        residuals,
        mass: dtn.mass.clone(),
        dimension: nb,
    })
}

/// `R_λ w = Σ (ψ_nᵀ M_b w)/(λ_n − λ) ψ_n` over computed nonzero eigenpairs
/// outside the cluster of `λ`.
pub fn resolvent_apply(spectrum: &SteklovSpectrum, lambda: f64, w: &[f64]) -> Result<Vec<f64>> {
    let n = spectrum.eigenvectors.nrows();
    if w.len() != n {
        return Err(Error::InvalidInput(format!("boundary function of length {} for {n} DOFs", w.len())));
    }
    let mw = DVector::from_vec(spectrum.mass.mul_vec(w));
    let w_norm = libm::sqrt(crate::linalg::dot(w, mw.as_slice()).max(0.0));
    let zero = spectrum.zero_modes();
    let tol = spectrum.gap_tol * lambda.abs().max(1.0);
    let in_cluster = |l: f64| (l - lambda).abs() <= tol;
    let mut out = DVector::zeros(n);
    for (k, &l) in spectrum.eigenvalues.iter().enumerate() {
        let coef = spectrum.eigenvectors.column(k).dot(&mw);
        if zero.contains(&k) || in_cluster(l) {
            if coef.abs() > 1e-8 * w_norm.max(f64::MIN_POSITIVE) {
                let what = if zero.contains(&k) { "constants" } else { "the λ-eigenspace" };
                return Err(Error::Precondition(format!(
                    "w has component {coef:e} along eigenvector {k} ({what}); ‖w‖_M = {w_norm:e}"
                )));
            }
            continue;
        }
        out += spectrum.eigenvectors.column(k) * (coef / (l - lambda));
    }
    Ok(out.iter().copied().collect())
}
