use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::assembly::{
    assemble_boundary_mass, assemble_boundary_mass_derivative, assemble_stiffness_derivative,
    assemble_weighted_stiffness, BoundaryMassMatrix, InteriorField, StiffnessMatrix,
};
use crate::geometry::{PerturbationDirection, ScalarField};
use crate::linalg::{dot, norm2, CsrMatrix};
use crate::steklov::SteklovSystem;
use crate::{Error, Result};

/// `DK` and `DM_b` for one direction, with `DK` split into DOF blocks.
#[derive(Clone, Debug)]
pub struct MetricDerivative {
    pub direction: PerturbationDirection,
    pub dk: StiffnessMatrix,
    pub dm: BoundaryMassMatrix,
    dk_ii: CsrMatrix,
    dk_ib: CsrMatrix,
    dk_bi: CsrMatrix,
    dk_bb: CsrMatrix,
}

impl MetricDerivative {
    pub fn new(sys: &SteklovSystem, direction: &PerturbationDirection) -> Result<Self> {
        let dk = assemble_stiffness_derivative(&sys.mesh, &sys.metric, direction, sys.options.quad_order)?;
        let dm = assemble_boundary_mass_derivative(&sys.mesh, &sys.metric, direction, sys.options.mass_kind)?;
        let p = &dk.partition;
        Ok(MetricDerivative {
            dk_ii: dk.matrix.submatrix(&p.interior, &p.interior),
            dk_ib: dk.matrix.submatrix(&p.interior, &p.boundary),
            dk_bi: dk.matrix.submatrix(&p.boundary, &p.interior),
            dk_bb: dk.matrix.submatrix(&p.boundary, &p.boundary),
            direction: direction.clone(),
            dk,
            dm,
        })
    }
}

/// The three contributions to `dΛf`, each already multiplied by `M_b⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationTerms {
    /// `M_b⁻¹ K_bi v_i` — flux of the interior variation
    pub interior: Vec<f64>,
    /// `M_b⁻¹ (DK_bb f + DK_bi u_i)` — stiffness variation at the boundary
    pub stiffness: Vec<f64>,
    /// `−M_b⁻¹ DM_b Λf` — boundary measure variation
    pub measure: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct VariationResult {
    pub v: InteriorField,
    /// `(D_gΛ)(h) f` at boundary DOFs
    pub dlf: Vec<f64>,
    pub direction: PerturbationDirection,
    pub decomposition: VariationTerms,
    /// `Λf`
    pub lf: Vec<f64>,
    /// `DS f = DK_bb f + DK_bi u_i + K_bi v_i`
    pub ds_f: Vec<f64>,
}

struct Interior {
    u_i: Vec<f64>,
    v: InteriorField,
}

fn interior_variation(sys: &SteklovSystem, d: &MetricDerivative, f: &[f64]) -> Interior {
    let solver = &sys.dtn.solver;
    let u_i = solver.extend_interior(f);
    let mut r = d.dk_ii.mul_vec(&u_i);
    let t = d.dk_ib.mul_vec(f);
    r.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
    let mut v_i = solver.solve_interior(&r);
    v_i.iter_mut().for_each(|x| *x = -*x);
    let mut res = solver.k_ii.mul_vec(&v_i);
    res.iter_mut().zip(&r).for_each(|(a, b)| *a += b);
    let scale = norm2(&r);
    let residual = if scale > 0.0 { norm2(&res) / scale } else { norm2(&res) };
    let nb = solver.num_boundary();
    let values = solver.partition.assemble_full(&v_i, &vec![0.0; nb]);
    Interior { u_i, v: InteriorField { values, harmonic: false, residual } }
}

/// `v = D_g u` for the harmonic extension `u` of `f`: `K_ii v_i = −(DK u)_i`,
/// `v_b = 0`.
pub fn variation_of_harmonic_extension(sys: &SteklovSystem, d: &MetricDerivative, f: &[f64]) -> InteriorField {
    interior_variation(sys, d, f).v
}

/// `(D_gΛ)(h) f` with its decomposition.
pub fn dtn_variation(sys: &SteklovSystem, h: &PerturbationDirection, f: &[f64]) -> Result<VariationResult> {
    Ok(dtn_variation_with(sys, &MetricDerivative::new(sys, h)?, f))
}

pub fn dtn_variation_with(sys: &SteklovSystem, d: &MetricDerivative, f: &[f64]) -> VariationResult {
    let Interior { u_i, v } = interior_variation(sys, d, f);
    let solver = &sys.dtn.solver;
    let v_i = solver.partition.restrict_interior(&v.values);

    let mut stiff = d.dk_bb.mul_vec(f);
    let t = d.dk_bi.mul_vec(&u_i);
    stiff.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
    let inter = solver.k_bi.mul_vec(&v_i);
    let lf = sys.dtn.apply(f);
    let mut meas = d.dm.mul_vec(&lf);
    meas.iter_mut().for_each(|x| *x = -*x);

    let ds_f: Vec<f64> = stiff.iter().zip(&inter).map(|(a, b)| a + b).collect();
    let decomposition = VariationTerms {
        interior: sys.dtn.solve_mass(&inter),
        stiffness: sys.dtn.solve_mass(&stiff),
        measure: sys.dtn.solve_mass(&meas),
    };
    let dlf = (0..f.len())
        .map(|k| decomposition.interior[k] + decomposition.stiffness[k] + decomposition.measure[k])
        .collect();
    VariationResult { v, dlf, direction: d.direction.clone(), decomposition, lf, ds_f }
}

/// `(DS − λ DM_b) f`, the pencil derivative applied to `f`.
pub fn pencil_derivative_apply(sys: &SteklovSystem, d: &MetricDerivative, lambda: f64, f: &[f64]) -> Vec<f64> {
    let r = dtn_variation_with(sys, d, f);
    let dm_f = d.dm.mul_vec(f);
    r.ds_f.iter().zip(&dm_f).map(|(a, b)| a - lambda * b).collect()
}

/// Both sides of `∫ψ (D_gΛ)(σg)f dA = −λ(n−1)/2 ∫σψf dA − (1 − n/2)∫σ⟨∇ũ,∇u⟩ dV`
/// at `n = 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityIdentity {
    pub dimension: u32,
    pub lhs: f64,
    /// `−λ(n−1)/2 ψᵀ M_b^σ f`
    pub boundary_term: f64,
    /// `∫σ⟨∇ũ,∇u⟩ dV` (enters with coefficient `−(1 − n/2)`)
    pub volume_integral: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `λ ‖ψ‖_M ‖f‖_M sup|σ|` over boundary nodes
    pub scale: f64,
}

pub fn density_identity_residual(
    sys: &SteklovSystem,
    lambda: f64,
    f: &[f64],
    psi: &[f64],
    sigma: &ScalarField,
) -> Result<DensityIdentity> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!("density identity needs λ > 0, got {lambda:e}")));
    }
    let n = 2.0;
    let dir = PerturbationDirection::conformal(sigma.clone());
    let r = dtn_variation(sys, &dir, f)?;
    let lhs = dot(psi, &sys.dtn.mass.mul_vec(&r.dlf));

    let m_sigma = assemble_boundary_mass(&sys.mesh, &sys.metric, Some(sigma), sys.options.mass_kind)?;
    let boundary_term = -lambda * (n - 1.0) / 2.0 * m_sigma.inner(psi, f);
    let k_sigma = assemble_weighted_stiffness(&sys.mesh, &sys.metric, Some(sigma), sys.options.quad_order)?;
    let u = sys.dtn.solver.harmonic_extension(f).values;
    let u_tilde = sys.dtn.solver.harmonic_extension(psi).values;
    let volume_integral = k_sigma.matrix.bilinear(&u_tilde, &u);
    let rhs = boundary_term - (1.0 - n / 2.0) * volume_integral;

    let verts = sys.mesh.vertices();
    let sup_sigma = sys.mesh.boundary_vertices().iter().map(|&v| sigma.value(verts[v]).abs()).fold(0.0, f64::max);
    let scale = lambda * sys.dtn.mass.norm(psi) * sys.dtn.mass.norm(f) * sup_sigma;
    Ok(DensityIdentity { dimension: 2, lhs, boundary_term, volume_integral, rhs, residual: (lhs - rhs).abs(), scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_disk_mesh, MetricField, TensorField};
    use crate::linalg::max_abs;

    fn system() -> SteklovSystem {
        SteklovSystem::new(generate_disk_mesh(1.0, 0.15).unwrap(), MetricField::Euclidean, Default::default()).unwrap()
    }

    #[test]
    fn zero_direction_gives_zero() {
        let sys = system();
        let f: Vec<f64> = (0..sys.dtn.num_boundary()).map(|i| libm::cos(0.3 * i as f64)).collect();
        let r = dtn_variation(&sys, &PerturbationDirection::zero(), &f).unwrap();
        assert_eq!(max_abs(&r.dlf), 0.0);
        assert_eq!(max_abs(&r.v.values), 0.0);
    }

    #[test]
    fn sum_of_terms_is_exact_and_boundary_of_v_vanishes() {
        let sys = system();
        let h = PerturbationDirection::general(TensorField::diagonal(ScalarField::linear(0.0, 1.0, 0.0), ScalarField::zero()));
        let f: Vec<f64> = (0..sys.dtn.num_boundary()).map(|i| libm::sin(0.5 * i as f64)).collect();
        let r = dtn_variation(&sys, &h, &f).unwrap();
        for k in 0..f.len() {
            let d = &r.decomposition;
            assert_eq!(r.dlf[k], d.interior[k] + d.stiffness[k] + d.measure[k]);
        }
        for &b in &sys.mesh.boundary_vertices() {
            assert_eq!(r.v.values[b], 0.0);
        }
        assert!(r.v.residual < 1e-10);
    }

    #[test]
    fn linear_in_direction_and_data() {
        let sys = system();
        let h1 = PerturbationDirection::general(TensorField::diagonal(ScalarField::linear(0.2, 1.0, 0.0), ScalarField::zero()));
        let h2 = PerturbationDirection::general(TensorField {
            xx: ScalarField::zero(),
            xy: ScalarField::linear(0.0, 0.3, 0.4),
            yy: ScalarField::linear(0.1, 0.0, -0.5),
        });
        let nb = sys.dtn.num_boundary();
        let f: Vec<f64> = (0..nb).map(|i| libm::sin(0.5 * i as f64)).collect();
        let g: Vec<f64> = (0..nb).map(|i| libm::cos(0.2 * i as f64)).collect();
        let a = dtn_variation(&sys, &h1, &f).unwrap().dlf;
        let b = dtn_variation(&sys, &h2, &f).unwrap().dlf;
        let ab = dtn_variation(&sys, &h1.plus(&h2).unwrap(), &f).unwrap().dlf;
        let scale = max_abs(&ab);
        for k in 0..nb {
            assert!((ab[k] - a[k] - b[k]).abs() <= 1e-12 * scale);
        }
        let fg: Vec<f64> = f.iter().zip(&g).map(|(x, y)| 2.0 * x - y).collect();
        let c = dtn_variation(&sys, &h1, &g).unwrap().dlf;
        let lin = dtn_variation(&sys, &h1, &fg).unwrap().dlf;
        for k in 0..nb {
            assert!((lin[k] - 2.0 * a[k] + c[k]).abs() <= 1e-12 * max_abs(&lin).max(1.0));
        }
    }
}
