use alloc::vec::Vec;

use super::{DofPartition, StiffnessMatrix};
use crate::linalg::{norm2, CsrMatrix, EnvelopeCholesky};
use crate::Result;

/// Nodal field over all vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct InteriorField {
    pub values: Vec<f64>,
    /// whether `values` solves the discrete Dirichlet problem
    pub harmonic: bool,
    /// `‖K_ii u_i + K_ib u_b‖ / max(‖K_ib u_b‖, ‖K_ii u_i‖)` when harmonic
    pub residual: f64,
}

/// Block view of a stiffness matrix with a factorized interior block.
///
/// The factorization is computed once and reused for every right-hand side
/// (harmonic extensions, Schur complement columns, variation solves).
#[derive(Clone, Debug)]
pub struct DirichletSolver {
    pub partition: DofPartition,
    pub k_ii: CsrMatrix,
    pub k_ib: CsrMatrix,
    pub k_bi: CsrMatrix,
    pub k_bb: CsrMatrix,
    factor: EnvelopeCholesky,
}

impl DirichletSolver {
    pub fn new(k: &StiffnessMatrix) -> Result<Self> {
        let p = &k.partition;
        let k_ii = k.matrix.submatrix(&p.interior, &p.interior);
        let factor = EnvelopeCholesky::factor(&k_ii)?;
        Ok(DirichletSolver {
            k_ib: k.matrix.submatrix(&p.interior, &p.boundary),
            k_bi: k.matrix.submatrix(&p.boundary, &p.interior),
            k_bb: k.matrix.submatrix(&p.boundary, &p.boundary),
            k_ii,
            partition: p.clone(),
            factor,
        })
    }

    pub fn num_interior(&self) -> usize {
        self.partition.interior.len()
    }

    pub fn num_boundary(&self) -> usize {
        self.partition.boundary.len()
    }

    /// Solves `K_ii x = rhs`.
    pub fn solve_interior(&self, rhs: &[f64]) -> Vec<f64> {
        self.factor.solve(rhs)
    }

    /// Interior values of the discrete harmonic extension of `f`.
    pub fn extend_interior(&self, f: &[f64]) -> Vec<f64> {
        let mut rhs = self.k_ib.mul_vec(f);
        for r in &mut rhs {
            *r = -*r;
        }
        self.factor.solve_in_place(&mut rhs);
        rhs
    }

    /// Discrete harmonic extension: `K_ii u_i = −K_ib f`, `u_b = f`.
    pub fn harmonic_extension(&self, f: &[f64]) -> InteriorField {
        let ui = self.extend_interior(f);
        let load = self.k_ib.mul_vec(f);
        let mut r = self.k_ii.mul_vec(&ui);
        for (ri, li) in r.iter_mut().zip(&load) {
            *ri += li;
        }
        let scale = norm2(&load).max(norm2(&self.k_ii.mul_vec(&ui))).max(f64::MIN_POSITIVE);
        InteriorField { values: self.partition.assemble_full(&ui, f), harmonic: true, residual: norm2(&r) / scale }
    }
}

/// One-off harmonic extension; factorizes `K_ii` internally.
pub fn harmonic_extension(k: &StiffnessMatrix, f: &[f64]) -> Result<InteriorField> {
    Ok(DirichletSolver::new(k)?.harmonic_extension(f))
}
