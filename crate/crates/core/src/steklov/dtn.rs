use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::assembly::{
    assemble_boundary_mass, assemble_stiffness, AssemblyOptions, BoundaryMassMatrix, DirichletSolver, MassSolver,
    StiffnessMatrix,
};
use crate::geometry::{Mesh, MetricField};
use crate::Result;

/// Dense Schur complement with the boundary mass and the interior solver it
/// was built from.
#[derive(Clone, Debug)]
pub struct DtnOperator {
    /// `S`, symmetrized
    pub schur: DMatrix<f64>,
    pub mass: BoundaryMassMatrix,
    pub solver: DirichletSolver,
    mass_solver: MassSolver,
}

/// Forms `S` column by column from `#boundary` solves against the `K_ii`
/// factorization.
pub fn dtn_schur(k: &StiffnessMatrix, mass: BoundaryMassMatrix) -> Result<DtnOperator> {
    let solver = DirichletSolver::new(k)?;
    let nb = solver.num_boundary();
    let ni = solver.num_interior();
    let mut s = solver.k_bb.to_dense();
    let mut rhs = vec![0.0; ni];
    for j in 0..nb {
        // column j of K_ib is row j of K_bi
        rhs.iter_mut().for_each(|r| *r = 0.0);
        for (c, v) in solver.k_bi.row(j) {
            rhs[c] = v;
        }
        let x = solver.solve_interior(&rhs);
        let col = solver.k_bi.mul_vec(&x);
        for (i, c) in col.iter().enumerate() {
            s[(i, j)] -= c;
        }
    }
    let schur = (&s + s.transpose()) * 0.5;
    let mass_solver = MassSolver::new(&mass)?;
    Ok(DtnOperator { schur, mass, solver, mass_solver })
}

impl DtnOperator {
    pub fn num_boundary(&self) -> usize {
        self.schur.nrows()
    }

    /// `S f`
    pub fn apply_schur(&self, f: &[f64]) -> Vec<f64> {
        (&self.schur * nalgebra::DVector::from_column_slice(f)).iter().copied().collect()
    }

    /// `Λf = M_b⁻¹ S f`
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.mass_solver.solve(&self.apply_schur(f))
    }

    pub fn solve_mass(&self, rhs: &[f64]) -> Vec<f64> {
        self.mass_solver.solve(rhs)
    }

    /// Weak flux `K_bb f + K_bi u_i` computed from the sparse blocks and a fresh
    /// harmonic extension (no dense `S`).
    pub fn flux(&self, f: &[f64]) -> Vec<f64> {
        sparse_flux(&self.solver, f)
    }

    /// Frobenius norm of `S`.
    pub fn schur_norm(&self) -> f64 {
        self.schur.norm()
    }
}

pub(crate) fn sparse_flux(solver: &DirichletSolver, f: &[f64]) -> Vec<f64> {
    let ui = solver.extend_interior(f);
    let mut r = solver.k_bb.mul_vec(f);
    let t = solver.k_bi.mul_vec(&ui);
    for (a, b) in r.iter_mut().zip(&t) {
        *a += b;
    }
    r
}

/// A mesh with a metric and the operators assembled on it.
#[derive(Clone, Debug)]
pub struct SteklovSystem {
    pub mesh: Mesh,
    pub metric: MetricField,
    pub options: AssemblyOptions,
    pub stiffness: StiffnessMatrix,
    pub dtn: DtnOperator,
}

impl SteklovSystem {
    pub fn new(mesh: Mesh, metric: MetricField, options: AssemblyOptions) -> Result<Self> {
        let stiffness = assemble_stiffness(&mesh, &metric, options.quad_order)?;
        let mass = assemble_boundary_mass(&mesh, &metric, None, options.mass_kind)?;
        let dtn = dtn_schur(&stiffness, mass)?;
        Ok(SteklovSystem { mesh, metric, options, stiffness, dtn })
    }

    /// `Λf` on `(mesh, metric)` without forming `S`; used by finite-difference
    /// oracles that re-assemble at perturbed metrics.
    pub fn apply_dtn_sparse(mesh: &Mesh, metric: &MetricField, options: AssemblyOptions, f: &[f64]) -> Result<Vec<f64>> {
        let k = assemble_stiffness(mesh, metric, options.quad_order)?;
        let mass = assemble_boundary_mass(mesh, metric, None, options.mass_kind)?;
        let solver = DirichletSolver::new(&k)?;
        Ok(MassSolver::new(&mass)?.solve(&sparse_flux(&solver, f)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::MassKind;
    use crate::geometry::generate_disk_mesh;
    use crate::linalg::{max_abs, norm2};

    #[test]
    fn constants_have_zero_flux_and_s_is_symmetric() {
        let sys = SteklovSystem::new(generate_disk_mesh(1.0, 0.1).unwrap(), MetricField::Euclidean, Default::default())
            .unwrap();
        let ones = vec![1.0; sys.dtn.num_boundary()];
        assert!(max_abs(&sys.dtn.apply_schur(&ones)) < 1e-10 * sys.dtn.schur_norm());
        let f: Vec<f64> = (0..ones.len()).map(|i| libm::sin(1.3 * i as f64)).collect();
        let g: Vec<f64> = (0..ones.len()).map(|i| libm::cos(0.7 * i as f64 + 0.2)).collect();
        let a = crate::linalg::dot(&g, &sys.dtn.apply_schur(&f));
        let b = crate::linalg::dot(&f, &sys.dtn.apply_schur(&g));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        // dense and sparse flux agree
        let d = crate::linalg::sub(&sys.dtn.apply_schur(&f), &sys.dtn.flux(&f));
        assert!(norm2(&d) < 1e-11 * norm2(&sys.dtn.flux(&f)));
    }

    #[test]
    fn cos_theta_is_an_approximate_eigenfunction() {
        for kind in [MassKind::Lumped, MassKind::Consistent] {
            let mesh = generate_disk_mesh(1.0, 0.05).unwrap();
            let opts = AssemblyOptions { mass_kind: kind, ..Default::default() };
            let sys = SteklovSystem::new(mesh, MetricField::Euclidean, opts).unwrap();
            let f: Vec<f64> = sys.mesh.boundary_vertices().iter().map(|&v| sys.mesh.vertices()[v][0]).collect();
            let lf = sys.dtn.apply(&f);
            let err = sys.dtn.mass.norm(&crate::linalg::sub(&lf, &f)) / sys.dtn.mass.norm(&f);
            assert!(err < 5e-3, "{kind:?}: {err}");
        }
    }
}
