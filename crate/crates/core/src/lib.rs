//! Discrete Dirichlet-to-Neumann (Steklov) operators on metric-equipped planar
//! meshes, their first-order variations with respect to the metric, and
//! seeded experiments probing simplicity of eigenvalues and the regularity of
//! boundary eigenfunction traces.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line driver live in the `steklov-lab` companion crate.
//!
//! Layout:
//!
//! - [`geometry`]: meshes of disks and annuli, refinement, closed-form metric
//!   tensor fields and perturbation directions, seeded conformal sampling.
//! - [`assembly`]: P1 stiffness and boundary mass forms, their exact
//!   directional derivatives in the metric, and the Dirichlet solve.
//! - [`steklov`]: Schur-complement DtN matrix, the symmetric-definite pencil
//!   solve, multiplicity clusters, the resolvent and boundary traces.
//! - [`variation`]: the variation of the harmonic extension and of the DtN
//!   map, the continuum coordinate formula, finite-difference oracles and the
//!   boundary/volume integral identity for conformal directions.
//! - [`genericity`]: splitting of multiple eigenvalues, simplicity statistics,
//!   zero/critical-point scans and the vanishing-arc check.
//! - [`oracle`]: closed-form Steklov spectra of the disk and the annulus.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod assembly;
pub mod error;
pub mod genericity;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod steklov;
pub mod tensor;
pub mod variation;

pub use error::{Error, Result};
