//! Coordinate formulas for `Δ_g` and its metric derivative on analytic fields.
//!
//! With `H = Dg⁻¹ = −g⁻¹ h g⁻¹`,
//!
//! ```text
//! Δ_g u     = g^{ij}u_{ij} + ∂_i(g^{ij})u_j + ½ tr(g⁻¹∂_i g) g^{ij}u_j
//! D_g(Δ)u   = H^{ij}u_{ij} + ∂_i(H^{ij})u_j + ½ tr(H ∂_i g + g⁻¹∂_i h) g^{ij}u_j
//!           + ½ tr(g⁻¹∂_i g) H^{ij}u_j
//! ```
//!
//! and for `h = σg`: `D_g(Δ)u = −(σΔ_g u + (1 − n/2)⟨∇σ, ∇u⟩_g)`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::geometry::{MetricField, PerturbationDirection};
use crate::tensor::Sym2;

/// Value, gradient and Hessian of a scalar function at a point in `ℝⁿ`.
#[derive(Clone, Debug)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl ScalarJet {
    pub fn new(value: f64, grad: &[f64], hess: &[&[f64]]) -> Self {
        let n = grad.len();
        ScalarJet {
            value,
            grad: DVector::from_column_slice(grad),
            hess: DMatrix::from_fn(n, n, |i, j| hess[i][j]),
        }
    }

    /// Jet with zero Hessian (for fields only needed to first order).
    pub fn first_order(value: f64, grad: &[f64]) -> Self {
        let n = grad.len();
        ScalarJet { value, grad: DVector::from_column_slice(grad), hess: DMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }
}

/// Symmetric matrix field and its partial derivatives `∂_k` at a point.
#[derive(Clone, Debug)]
pub struct TensorJet {
    pub value: DMatrix<f64>,
    pub d: Vec<DMatrix<f64>>,
}

impl TensorJet {
    pub fn constant(value: DMatrix<f64>) -> Self {
        let n = value.nrows();
        TensorJet { d: (0..n).map(|_| DMatrix::zeros(n, n)).collect(), value }
    }

    pub fn euclidean(n: usize) -> Self {
        Self::constant(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.value.nrows()
    }

    /// `self + t·other`
    pub fn shifted(&self, other: &TensorJet, t: f64) -> Self {
        TensorJet {
            value: &self.value + &other.value * t,
            d: self.d.iter().zip(&other.d).map(|(a, b)| a + b * t).collect(),
        }
    }

    /// `σ·self` with the product rule.
    pub fn conformal(&self, sigma: &ScalarJet) -> Self {
        TensorJet {
            value: &self.value * sigma.value,
            d: (0..self.dim()).map(|k| &self.d[k] * sigma.value + &self.value * sigma.grad[k]).collect(),
        }
    }
}

fn sym2_matrix(s: Sym2) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[s.xx, s.xy, s.xy, s.yy])
}

/// 2D jet of a metric descriptor.
pub fn metric_jet(metric: &MetricField, p: [f64; 2]) -> TensorJet {
    let (g, dg) = metric.eval_with_derivatives(p);
    TensorJet { value: sym2_matrix(g), d: dg.iter().map(|s| sym2_matrix(*s)).collect() }
}

fn direction_jet(metric: &MetricField, h: &PerturbationDirection, p: [f64; 2]) -> TensorJet {
    let (g, dg) = metric.eval_with_derivatives(p);
    let (hv, dh) = h.materialize_with_derivatives(g, dg, p);
    TensorJet { value: sym2_matrix(hv), d: dh.iter().map(|s| sym2_matrix(*s)).collect() }
}

fn inverse(g: &DMatrix<f64>) -> DMatrix<f64> {
    g.clone().try_inverse().expect("metric must be invertible")
}

/// `∂_i(g^{ij}) u_j`, summed over `i` and `j`, for a matrix `A(x)` with jets.
fn divergence_term(d_inv: &[DMatrix<f64>], grad: &DVector<f64>) -> f64 {
    let n = grad.len();
    (0..n).map(|j| (0..n).map(|i| d_inv[i][(i, j)]).sum::<f64>() * grad[j]).sum()
}

/// `Δ_g u` by the coordinate formula.
pub fn laplace_beltrami(g: &TensorJet, u: &ScalarJet) -> f64 {
    let gi = inverse(&g.value);
    let n = g.dim();
    let d_gi: Vec<DMatrix<f64>> = (0..n).map(|k| -(&gi * &g.d[k] * &gi)).collect();
    let gi_grad = &gi * &u.grad;
    let second = gi.component_mul(&u.hess).sum();
    let log_det: f64 = (0..n).map(|i| 0.5 * (&gi * &g.d[i]).trace() * gi_grad[i]).sum();
    second + divergence_term(&d_gi, &u.grad) + log_det
}

/// `D_g(Δ)u` in direction `h` by the coordinate expansion.
pub fn dg_laplacian(g: &TensorJet, h: &TensorJet, u: &ScalarJet) -> f64 {
    let n = g.dim();
    let gi = inverse(&g.value);
    let big_h = -(&gi * &h.value * &gi);
    // ∂_k H = g⁻¹∂_k g g⁻¹ h g⁻¹ − g⁻¹ ∂_k h g⁻¹ + g⁻¹ h g⁻¹ ∂_k g g⁻¹
    let d_h: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            let a = &gi * &g.d[k] * &gi * &h.value * &gi;
            let b = &gi * &h.d[k] * &gi;
            let c = &gi * &h.value * &gi * &g.d[k] * &gi;
            a - b + c
        })
        .collect();
    let gi_grad = &gi * &u.grad;
    let h_grad = &big_h * &u.grad;
    let t1 = big_h.component_mul(&u.hess).sum();
    let t2 = divergence_term(&d_h, &u.grad);
    let t3: f64 = (0..n).map(|i| 0.5 * (&big_h * &g.d[i] + &gi * &h.d[i]).trace() * gi_grad[i]).sum();
    let t4: f64 = (0..n).map(|i| 0.5 * (&gi * &g.d[i]).trace() * h_grad[i]).sum();
    t1 + t2 + t3 + t4
}

/// `−(σΔ_g u + (1 − n/2)⟨∇σ, ∇u⟩_g)`.
pub fn dg_laplacian_conformal(g: &TensorJet, sigma: &ScalarJet, u: &ScalarJet) -> f64 {
    let n = g.dim() as f64;
    let gi = inverse(&g.value);
    let inner = sigma.grad.dot(&(&gi * &u.grad));
    -(sigma.value * laplace_beltrami(g, u) + (1.0 - n / 2.0) * inner)
}

/// 2D adapter: `D_g(Δ)u` at `p` for a metric descriptor and direction.
pub fn evaluate_dg_laplacian(metric: &MetricField, h: &PerturbationDirection, u: &ScalarJet, p: [f64; 2]) -> f64 {
    dg_laplacian(&metric_jet(metric, p), &direction_jet(metric, h, p), u)
}

/// 2D adapter of the conformal simplification; `h` must be conformal.
pub fn evaluate_dg_laplacian_conformal(
    metric: &MetricField,
    h: &PerturbationDirection,
    u: &ScalarJet,
    p: [f64; 2],
) -> Option<f64> {
    let sigma = h.sigma()?;
    let (s, ds) = sigma.value_and_gradient(p);
    Some(dg_laplacian_conformal(&metric_jet(metric, p), &ScalarJet::first_order(s, &ds), u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ScalarField, TensorField};

    fn saddle(p: [f64; 2]) -> ScalarJet {
        // x² − y²
        ScalarJet::new(p[0] * p[0] - p[1] * p[1], &[2.0 * p[0], -2.0 * p[1]], &[&[2.0, 0.0], &[0.0, -2.0]])
    }

    #[test]
    fn conformal_harmonic_2d_vanishes() {
        let metric = MetricField::Euclidean;
        let h = PerturbationDirection::conformal(ScalarField::linear(0.3, 1.0, -2.0));
        for p in [[0.1, 0.2], [-0.5, 0.3]] {
            let general = evaluate_dg_laplacian(&metric, &h, &saddle(p), p);
            let closed = evaluate_dg_laplacian_conformal(&metric, &h, &saddle(p), p).unwrap();
            assert!(general.abs() < 1e-14 && closed.abs() < 1e-14);
        }
    }

    #[test]
    fn conformal_harmonic_3d_is_half_gradient_product() {
        // u = x² + y² − 2z² − 3xz (harmonic), σ = 1 + 0.5x − y + 2z
        let p = [0.3, -0.2, 0.7];
        let u = ScalarJet::new(
            p[0] * p[0] + p[1] * p[1] - 2.0 * p[2] * p[2] - 3.0 * p[0] * p[2],
            &[2.0 * p[0] - 3.0 * p[2], 2.0 * p[1], -4.0 * p[2] - 3.0 * p[0]],
            &[&[2.0, 0.0, -3.0], &[0.0, 2.0, 0.0], &[-3.0, 0.0, -4.0]],
        );
        let sigma = ScalarJet::first_order(1.0 + 0.5 * p[0] - p[1] + 2.0 * p[2], &[0.5, -1.0, 2.0]);
        let g = TensorJet::euclidean(3);
        let expected = 0.5 * sigma.grad.dot(&u.grad);
        let closed = dg_laplacian_conformal(&g, &sigma, &u);
        let general = dg_laplacian(&g, &g.conformal(&sigma), &u);
        assert!((closed - expected).abs() < 1e-13);
        assert!((general - expected).abs() < 1e-13);
    }

    #[test]
    fn conformal_formula_agrees_with_general_on_curved_metric() {
        let metric = MetricField::conformal(ScalarField::linear(0.1, 0.4, -0.3));
        let h = PerturbationDirection::conformal(ScalarField::polynomial(&[(0.5, 0, 0), (1.0, 2, 0), (-0.7, 1, 1)]));
        let p = [0.25, -0.4];
        // non-harmonic u = x³ + xy
        let u = ScalarJet::new(
            p[0] * p[0] * p[0] + p[0] * p[1],
            &[3.0 * p[0] * p[0] + p[1], p[0]],
            &[&[6.0 * p[0], 1.0], &[1.0, 0.0]],
        );
        let a = evaluate_dg_laplacian(&metric, &h, &u, p);
        let b = evaluate_dg_laplacian_conformal(&metric, &h, &u, p).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn general_direction_matches_metric_difference() {
        let h = TensorField {
            xx: ScalarField::linear(0.0, 1.0, 0.0),
            xy: ScalarField::polynomial(&[(0.3, 1, 1)]),
            yy: ScalarField::linear(0.2, 0.0, -0.5),
        };
        let dir = PerturbationDirection::general(h);
        for metric in [MetricField::Euclidean, MetricField::conformal(ScalarField::linear(0.0, 0.3, 0.2))] {
            let p = [0.3, 0.45];
            let u = saddle(p);
            let g = metric_jet(&metric, p);
            let hj = direction_jet(&metric, &dir, p);
            let t = 1e-5;
            let fd = (laplace_beltrami(&g.shifted(&hj, t), &u) - laplace_beltrami(&g.shifted(&hj, -t), &u)) / (2.0 * t);
            let exact = evaluate_dg_laplacian(&metric, &dir, &u, p);
            assert!((fd - exact).abs() < 1e-8, "{fd} vs {exact}");
        }
    }
}
