//! Discrete Dirichlet-to-Neumann operator and the Steklov pencil.
//!
//! Eliminating interior unknowns from the stiffness matrix gives the Schur
//! complement `S = K_bb − K_bi K_ii⁻¹ K_ib`; `S f` is the weak normal flux of the
//! harmonic extension of `f`, so `Λ ≈ M_b⁻¹ S` and Steklov pairs solve
//! `S ψ = λ M_b ψ`.

mod dtn;
mod spectrum;
mod trace;

pub use dtn::{dtn_schur, DtnOperator, SteklovSystem};
pub use spectrum::{cluster_multiplicities, resolvent_apply, steklov_eigs, steklov_eigs_with, SteklovSpectrum, DEFAULT_GAP_TOL};
pub use trace::{extract_trace, extract_trace_with, periodic_derivatives, BoundaryTrace, DiffScheme};
