//! Linear-algebra plumbing: sparse storage, the envelope Cholesky used for
//! interior Dirichlet solves, and the dense symmetric-definite pencil solver.

mod cholesky;
mod pencil;
mod sparse;

pub use cholesky::{reverse_cuthill_mckee, EnvelopeCholesky};
pub(crate) use pencil::pencil_residual;
pub use pencil::{symmetric_definite_eigen, symmetric_eigen_sorted, PencilEigen};
pub use sparse::CsrMatrix;

use alloc::vec::Vec;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|v| libm::fabs(*v)).fold(0.0, libm::fmax)
}
