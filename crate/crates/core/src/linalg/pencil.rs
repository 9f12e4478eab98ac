use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

/// Eigenpairs of `A x = λ B x`, eigenvalues ascending, eigenvectors
/// `B`-orthonormal in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct PencilEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

const MAX_SWEEPS: usize = 10_000;

/// Eigen-decomposition of a symmetric matrix with ascending eigenvalues.
pub fn symmetric_eigen_sorted(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::Eigensolver(format!(
            "symmetric QR did not converge in {MAX_SWEEPS} iterations (n = {n}, max |a_ij| = {:e})",
            a.amax()
        ))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Solves the symmetric-definite pencil `(a, b)` by Cholesky reduction
/// `C = L⁻¹ A L⁻ᵀ`.
pub fn symmetric_definite_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<PencilEigen> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "pencil shapes {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let chol = Cholesky::new(b.clone())
        .ok_or_else(|| Error::Eigensolver("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let reduced = reduce(&l, a)?;
    let (values, q) = symmetric_eigen_sorted(&reduced)?;
    let lt = l.transpose();
    let vectors = lt
        .solve_upper_triangular(&q)
        .ok_or_else(|| Error::Eigensolver("singular Cholesky factor in back-transform".into()))?;
    Ok(PencilEigen { values, vectors })
}

fn reduce(l: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let singular = || Error::Eigensolver("singular Cholesky factor in reduction".into());
    // Y = L⁻¹ A, C = L⁻¹ Yᵀ  (A symmetric)
    let y = l.solve_lower_triangular(a).ok_or_else(singular)?;
    l.solve_lower_triangular(&y.transpose()).ok_or_else(singular)
}

/// `‖A x − λ B x‖ / (‖A‖_F ‖x‖)`.
pub(crate) fn pencil_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, lambda: f64, x: &DVector<f64>) -> f64 {
    let r = a * x - (b * x) * lambda;
    r.norm() / (a.norm() * x.norm()).max(f64::MIN_POSITIVE)
}
