use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::geometry::{check_spd, EdgeRule, Mesh, MetricField, PerturbationDirection, ScalarField};
use crate::linalg::CsrMatrix;
use crate::quadrature::gauss3;
use crate::{Error, Result};

/// Boundary mass discretization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassKind {
    /// Diagonal mass from the trapezoid rule at edge end points. Multiplying
    /// the weight by a nodal field multiplies the matrix by that field.
    #[default]
    Lumped,
    /// Full 1D P1 mass with three-point Gauss quadrature per edge.
    Consistent,
}

impl MassKind {
    pub fn edge_rule(self) -> EdgeRule {
        match self {
            MassKind::Lumped => EdgeRule::Nodal,
            MassKind::Consistent => EdgeRule::Gauss3,
        }
    }
}

/// Symmetric boundary matrix in boundary-DOF numbering.
#[derive(Clone, Debug)]
pub struct BoundaryMassMatrix {
    pub matrix: CsrMatrix,
    pub kind: MassKind,
    pub weighted: bool,
}

impl BoundaryMassMatrix {
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }

    /// `xᵀ M y`
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matrix.bilinear(x, y)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        libm::sqrt(self.inner(x, x).max(0.0))
    }

    pub fn total(&self) -> f64 {
        self.matrix.values().iter().sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let ones = alloc::vec![1.0; self.matrix.ncols()];
        self.matrix.mul_vec(&ones)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.matrix.to_dense()
    }
}

/// Pointwise integrand along an edge, given the point and the unit tangent.
fn assemble_edges<F>(mesh: &Mesh, kind: MassKind, weighted: bool, mut integrand: F) -> Result<BoundaryMassMatrix>
where
    F: FnMut([f64; 2], [f64; 2]) -> Result<f64>,
{
    let verts = mesh.vertices();
    let bverts = mesh.boundary_vertices();
    let n = bverts.len();
    let mut triplets = Vec::new();
    for (a, b) in mesh.boundary_edges() {
        let (pa, pb) = (verts[bverts[a]], verts[bverts[b]]);
        let d = [pb[0] - pa[0], pb[1] - pa[1]];
        let len = libm::hypot(d[0], d[1]);
        let tau = [d[0] / len, d[1] / len];
        match kind {
            MassKind::Lumped => {
                triplets.push((a, a, 0.5 * len * integrand(pa, tau)?));
                triplets.push((b, b, 0.5 * len * integrand(pb, tau)?));
            }
            MassKind::Consistent => {
                let mut e = [[0.0; 2]; 2];
                for (t, w) in gauss3() {
                    let f = w * len * integrand([pa[0] + t * d[0], pa[1] + t * d[1]], tau)?;
                    let phi = [1.0 - t, t];
                    for i in 0..2 {
                        for j in 0..2 {
                            e[i][j] += f * phi[i] * phi[j];
                        }
                    }
                }
                let dofs = [a, b];
                for i in 0..2 {
                    for j in 0..2 {
                        triplets.push((dofs[i], dofs[j], e[i][j]));
                    }
                }
            }
        }
    }
    Ok(BoundaryMassMatrix { matrix: CsrMatrix::from_triplets(n, n, triplets), kind, weighted })
}

/// `∫_{∂M} w φ_a φ_b dA`.
pub fn assemble_boundary_mass(
    mesh: &Mesh,
    metric: &MetricField,
    weight: Option<&ScalarField>,
    kind: MassKind,
) -> Result<BoundaryMassMatrix> {
    assemble_edges(mesh, kind, weight.is_some(), |p, tau| {
        let g = metric.eval(p);
        check_spd(g, p)?;
        let w = weight.map_or(1.0, |f| f.value(p));
        Ok(w * libm::sqrt(g.form(tau, tau)))
    })
}

/// `DM_b`: the area element varies as `d/dt √g_t(τ,τ) = ½ h(τ,τ) / √g(τ,τ)`.
/// For `h = σ g` this is `½ σ √g(τ,τ)`, so `DM_b = ½ M_b^σ` exactly.
pub fn assemble_boundary_mass_derivative(
    mesh: &Mesh,
    metric: &MetricField,
    direction: &PerturbationDirection,
    kind: MassKind,
) -> Result<BoundaryMassMatrix> {
    assemble_edges(mesh, kind, false, |p, tau| {
        let g = metric.eval(p);
        check_spd(g, p)?;
        let sqrt_gtt = libm::sqrt(g.form(tau, tau));
        Ok(match direction {
            PerturbationDirection::Conformal { sigma } => 0.5 * sigma.value(p) * sqrt_gtt,
            PerturbationDirection::General { tensor } => 0.5 * tensor.eval(p).form(tau, tau) / sqrt_gtt,
        })
    })
}

/// Applies `M_b⁻¹`.
#[derive(Clone, Debug)]
pub enum MassSolver {
    Diagonal(Vec<f64>),
    Dense(Cholesky<f64, Dyn>),
}

impl MassSolver {
    pub fn new(mass: &BoundaryMassMatrix) -> Result<Self> {
        if mass.matrix.is_diagonal() {
            let d = mass.matrix.diagonal();
            if let Some(i) = d.iter().position(|v| !(*v > 0.0)) {
                return Err(Error::Factorization { index: i, pivot: d[i] });
            }
            Ok(MassSolver::Diagonal(d))
        } else {
            Cholesky::new(mass.to_dense())
                .map(MassSolver::Dense)
                .ok_or(Error::Factorization { index: 0, pivot: f64::NAN })
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        match self {
            MassSolver::Diagonal(d) => rhs.iter().zip(d).map(|(r, m)| r / m).collect(),
            MassSolver::Dense(c) => c.solve(&DVector::from_column_slice(rhs)).iter().copied().collect(),
        }
    }
}
