use alloc::string::String;

/// Errors raised by mesh construction, assembly and the spectral solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mesh topology: {0}")]
    Topology(String),

    #[error("mesh would need about {estimated} vertices, budget is {budget}")]
    Capacity { estimated: usize, budget: usize },

    #[error("metric is not positive definite at ({x}, {y}): smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64, x: f64, y: f64 },

    #[error("perturbed metric g ± t·h loses definiteness at t = {t:e} (smallest eigenvalue {min_eigenvalue:e})")]
    StepTooLarge { t: f64, min_eigenvalue: f64 },

    #[error("cholesky factorization failed at pivot {index}: {pivot:e}")]
    Factorization { index: usize, pivot: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root search for mode {mode} found {found} of {expected} roots in [{lo}, {hi}]")]
    RootSearch {
        mode: u32,
        found: usize,
        expected: usize,
        lo: f64,
        hi: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
