use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{check_spd, Mesh, MetricField, PerturbationDirection, ScalarField};
use crate::linalg::CsrMatrix;
use crate::quadrature::TriangleRule;
use crate::tensor::Sym2;
use crate::Result;

/// Split of vertex DOFs into boundary (loop-concatenated order) and interior
/// (ascending vertex index).
#[derive(Clone, Debug, PartialEq)]
pub struct DofPartition {
    pub boundary: Vec<usize>,
    pub interior: Vec<usize>,
}

impl DofPartition {
    pub fn of(mesh: &Mesh) -> Self {
        DofPartition { boundary: mesh.boundary_vertices(), interior: mesh.interior_vertices() }
    }

    pub fn num_dofs(&self) -> usize {
        self.boundary.len() + self.interior.len()
    }

    /// Scatters interior and boundary values into a full vertex vector.
    pub fn assemble_full(&self, interior: &[f64], boundary: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.num_dofs()];
        for (k, &v) in self.interior.iter().enumerate() {
            u[v] = interior[k];
        }
        for (k, &v) in self.boundary.iter().enumerate() {
            u[v] = boundary[k];
        }
        u
    }

    pub fn restrict_interior(&self, u: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&v| u[v]).collect()
    }

    pub fn restrict_boundary(&self, u: &[f64]) -> Vec<f64> {
        self.boundary.iter().map(|&v| u[v]).collect()
    }
}

/// Sparse symmetric matrix over all vertex DOFs (stiffness or its metric
/// derivative).
#[derive(Clone, Debug)]
pub struct StiffnessMatrix {
    pub matrix: CsrMatrix,
    pub partition: DofPartition,
    pub quad_order: u32,
}

/// Gradients of the barycentric coordinates of a triangle, and its area.
fn p1_gradients(tri: [[f64; 2]; 3]) -> ([[f64; 2]; 3], f64) {
    let [p0, p1, p2] = tri;
    let two_a = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
    let g = [
        [(p1[1] - p2[1]) / two_a, (p2[0] - p1[0]) / two_a],
        [(p2[1] - p0[1]) / two_a, (p0[0] - p2[0]) / two_a],
        [(p0[1] - p1[1]) / two_a, (p1[0] - p0[0]) / two_a],
    ];
    (g, 0.5 * two_a)
}

/// Assembles `∫ ∇φ_aᵀ C(x) ∇φ_b dx` for a pointwise symmetric coefficient.
fn assemble_with<F>(mesh: &Mesh, quad_order: u32, mut coefficient: F) -> Result<StiffnessMatrix>
where
    F: FnMut([f64; 2]) -> Result<Sym2>,
{
    let rule = TriangleRule::of_order(quad_order)?;
    let n = mesh.num_vertices();
    let mut triplets = Vec::with_capacity(9 * mesh.triangles().len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let coords = mesh.triangle_coords(t);
        let (grads, area) = p1_gradients(coords);
        let mut c = Sym2::ZERO;
        for (p, w) in rule.map(coords) {
            c = c + coefficient(p)?.scale(w);
        }
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((tri[a], tri[b], area * c.form(grads[a], grads[b])));
            }
        }
    }
    Ok(StiffnessMatrix {
        matrix: CsrMatrix::from_triplets(n, n, triplets),
        partition: DofPartition::of(mesh),
        quad_order,
    })
}

/// `√|g| g⁻¹` at a point, rejecting non-SPD metric values.
fn laplace_coefficient(metric: &MetricField, p: [f64; 2]) -> Result<(Sym2, Sym2, f64)> {
    let g = metric.eval(p);
    check_spd(g, p)?;
    let gi = g.inverse();
    let sqrt_det = libm::sqrt(g.det());
    Ok((g, gi, sqrt_det))
}

/// Stiffness matrix of the Laplace–Beltrami operator.
pub fn assemble_stiffness(mesh: &Mesh, metric: &MetricField, quad_order: u32) -> Result<StiffnessMatrix> {
    assemble_weighted_stiffness(mesh, metric, None, quad_order)
}

/// `∫ w √|g| g^{ij} ∂_iφ_a ∂_jφ_b dx`; with `w ≡ 1` this is the stiffness.
pub fn assemble_weighted_stiffness(
    mesh: &Mesh,
    metric: &MetricField,
    weight: Option<&ScalarField>,
    quad_order: u32,
) -> Result<StiffnessMatrix> {
    assemble_with(mesh, quad_order, |p| {
        let (_, gi, sqrt_det) = laplace_coefficient(metric, p)?;
        let w = weight.map_or(1.0, |f| f.value(p));
        Ok(gi.scale(w * sqrt_det))
    })
}

/// Directional derivative `DK` of the stiffness in the metric direction `h`:
/// the coefficient is `d/dt [√|g_t| g_t⁻¹] = √|g| (½ tr_g h · g⁻¹ − g⁻¹ h g⁻¹)`.
pub fn assemble_stiffness_derivative(
    mesh: &Mesh,
    metric: &MetricField,
    direction: &PerturbationDirection,
    quad_order: u32,
) -> Result<StiffnessMatrix> {
    assemble_with(mesh, quad_order, |p| {
        let (g, gi, sqrt_det) = laplace_coefficient(metric, p)?;
        let (trace, inv_var) = direction.metric_contractions(g, gi, p);
        Ok((gi.scale(0.5 * trace) - inv_var).scale(sqrt_det))
    })
}
