//! P1 finite-element forms on metric-equipped meshes.
//!
//! The stiffness form is `∫ √|g| g^{ij} ∂_iφ_a ∂_jφ_b dx` and the boundary
//! mass is `∫_{∂M} w φ_a φ_b dA` with `dA = √g(τ,τ) ds`. Both have companion
//! assemblers for their exact directional derivative in the metric; these are
//! built from the same quadrature as the forms themselves, so they coincide
//! with the derivative of the discrete problem.

mod dirichlet;
mod mass;
mod stiffness;

pub use dirichlet::{harmonic_extension, DirichletSolver, InteriorField};
pub use mass::{
    assemble_boundary_mass, assemble_boundary_mass_derivative, BoundaryMassMatrix, MassKind, MassSolver,
};
pub use stiffness::{
    assemble_stiffness, assemble_stiffness_derivative, assemble_weighted_stiffness, DofPartition, StiffnessMatrix,
};

use serde::{Deserialize, Serialize};

use crate::quadrature::DEFAULT_ORDER;

/// Discretization choices shared by every assembled object of one problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblyOptions {
    #[serde(default = "default_quad_order")]
    pub quad_order: u32,
    #[serde(default)]
    pub mass_kind: MassKind,
}

fn default_quad_order() -> u32 {
    DEFAULT_ORDER
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions { quad_order: DEFAULT_ORDER, mass_kind: MassKind::default() }
    }
}
