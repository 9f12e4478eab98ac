//! Meshes, metric tensor fields and metric perturbation directions.

mod arclength;
mod field;
mod generate;
mod mesh;
mod metric;
mod perturbation;
mod refine;

pub use arclength::{
    boundary_arclength, edge_length, metric_sample_points, validate_spd, EdgeRule, LoopArclength, SpdReport,
};
pub(crate) use arclength::check_spd;
pub use field::{Monomial, ScalarField, TensorField, TrigTerm, Wave};
pub use generate::{
    generate_annulus_mesh, generate_annulus_mesh_with, generate_disk_mesh, generate_disk_mesh_with, MeshOptions,
    SECTORS,
};
pub use mesh::{DomainShape, Mesh};
pub use metric::MetricField;
pub use perturbation::{
    conformal_basis, inverse_variation, sample_random_conformal, ConformalSampler, PerturbationDirection,
};
pub use refine::refine;
