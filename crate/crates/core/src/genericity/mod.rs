//! Desk-scale experiments on generic behaviour of Steklov spectra.
//!
//! - [`splitting_matrix`] / [`splitting_experiment`]: first-order splitting of
//!   a multiple eigenvalue under a metric direction, checked against re-solves.
//! - [`sample_trial`] / [`simplicity_scan`]: seeded conformal perturbations
//!   `e^{σ}g` and the multiplicity structure of their first eigenvalues.
//! - [`nodal_regularity_scan`], [`morse_scan`], [`wucp_check`]: zeros, critical
//!   points and vanishing arcs of boundary traces.
//!
//! Frequencies reported here are statistics over a parametric family; they say
//! nothing about residual sets of metrics.

mod fixtures;
mod scan;
mod simplicity;
mod split;

pub use fixtures::{synthetic_cubic_flat, synthetic_tangent_zero, synthetic_zero, uniform_trace};
pub use scan::{
    morse_scan, nodal_regularity_scan, sup_normalized, wucp_check, CriticalPoint, ScanKind, ScanReport,
    ScanTolerances, TraceScan, VanishingArc, WucpReport, ZeroPoint,
};
pub use simplicity::{
    perturbed_metric, sample_trial, simplicity_record, simplicity_scan, SimplicityRecord, SimplicityStats, Trial,
};
pub use split::{splitting_experiment, splitting_matrix, SplitOptions, SplitReport, SplitStep};
