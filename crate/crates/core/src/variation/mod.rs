//! First-order metric variations of harmonic extensions and of the DtN map.
//!
//! The production path differentiates the discrete problem: with `DK`, `DM_b`
//! the exact directional derivatives of the assembled forms,
//!
//! ```text
//! K_ii v_i = −(DK_ii u_i + DK_ib f),   v_b = 0
//! M_b·dΛf  = [DK_bb f + DK_bi u_i + K_bi v_i] − DM_b Λf
//! ```
//!
//! which is the derivative of `g ↦ M_b(g)⁻¹ S(g) f`. The coordinate formula for
//! `D_g(Δ)u` is kept separately for analytic fields in any dimension.

mod continuum;
mod discrete;
mod fd;

pub use continuum::{
    dg_laplacian, dg_laplacian_conformal, evaluate_dg_laplacian, evaluate_dg_laplacian_conformal, laplace_beltrami,
    metric_jet, ScalarJet, TensorJet,
};
pub use discrete::{
    density_identity_residual, dtn_variation, dtn_variation_with, pencil_derivative_apply,
    variation_of_harmonic_extension, DensityIdentity, MetricDerivative, VariationResult, VariationTerms,
};
pub use fd::{
    adaptive_step, check_step, fd_convergence, finite_difference_dtn, FdRow, FdStudy, DEFAULT_FD_STEP,
};
