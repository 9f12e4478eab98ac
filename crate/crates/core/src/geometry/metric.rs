use alloc::boxed::Box;

use serde::{Deserialize, Serialize};

use super::{PerturbationDirection, ScalarField, TensorField};
use crate::tensor::Sym2;

/// Riemannian metric on the closed domain, given by a closed-form descriptor
/// so that exact spatial derivatives are available.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricField {
    Euclidean,
    /// `factor · base`
    Scaled { factor: f64, base: Box<MetricField> },
    /// `e^{2φ} · base`
    Conformal { log_factor: ScalarField, base: Box<MetricField> },
    /// Arbitrary symmetric tensor given component-wise.
    Tensor { components: TensorField },
    /// `base + t · h`, with `h` materialized against `base`.
    Shifted { base: Box<MetricField>, direction: PerturbationDirection, t: f64 },
}

impl MetricField {
    pub fn scaled(factor: f64) -> Self {
        MetricField::Scaled { factor, base: Box::new(MetricField::Euclidean) }
    }

    /// `e^{2φ}` times the Euclidean metric.
    pub fn conformal(log_factor: ScalarField) -> Self {
        MetricField::Conformal { log_factor, base: Box::new(MetricField::Euclidean) }
    }

    pub fn conformal_to(self, log_factor: ScalarField) -> Self {
        MetricField::Conformal { log_factor, base: Box::new(self) }
    }

    pub fn shifted(&self, direction: &PerturbationDirection, t: f64) -> Self {
        MetricField::Shifted { base: Box::new(self.clone()), direction: direction.clone(), t }
    }

    pub fn eval(&self, p: [f64; 2]) -> Sym2 {
        match self {
            MetricField::Euclidean => Sym2::IDENTITY,
            MetricField::Scaled { factor, base } => base.eval(p).scale(*factor),
            MetricField::Conformal { log_factor, base } => base.eval(p).scale(libm::exp(2.0 * log_factor.value(p))),
            MetricField::Tensor { components } => components.eval(p),
            MetricField::Shifted { base, direction, t } => {
                let g = base.eval(p);
                g + direction.materialize_with(g, p).scale(*t)
            }
        }
    }

    /// `g(p)` and `[∂_x g, ∂_y g]`.
    pub fn eval_with_derivatives(&self, p: [f64; 2]) -> (Sym2, [Sym2; 2]) {
        match self {
            MetricField::Euclidean => (Sym2::IDENTITY, [Sym2::ZERO, Sym2::ZERO]),
            MetricField::Scaled { factor, base } => {
                let (g, dg) = base.eval_with_derivatives(p);
                (g.scale(*factor), [dg[0].scale(*factor), dg[1].scale(*factor)])
            }
            MetricField::Conformal { log_factor, base } => {
                let (g, dg) = base.eval_with_derivatives(p);
                let (phi, dphi) = log_factor.value_and_gradient(p);
                let e = libm::exp(2.0 * phi);
                let d = |k: usize| (dg[k] + g.scale(2.0 * dphi[k])).scale(e);
                (g.scale(e), [d(0), d(1)])
            }
            MetricField::Tensor { components } => components.eval_with_derivatives(p),
            MetricField::Shifted { base, direction, t } => {
                let (g, dg) = base.eval_with_derivatives(p);
                let (h, dh) = direction.materialize_with_derivatives(g, dg, p);
                (g + h.scale(*t), [dg[0] + dh[0].scale(*t), dg[1] + dh[1].scale(*t)])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TensorField;

    fn fd_check(m: &MetricField, p: [f64; 2]) -> f64 {
        let (_, dg) = m.eval_with_derivatives(p);
        let d = 1e-5;
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            let mut pp = p;
            let mut pm = p;
            pp[k] += d;
            pm[k] -= d;
            let fd = (m.eval(pp) - m.eval(pm)).scale(0.5 / d);
            worst = worst.max((fd - dg[k]).max_abs());
        }
        worst
    }

    #[test]
    fn derivatives_agree_with_central_differences() {
        let tensor = MetricField::Tensor {
            components: TensorField {
                xx: ScalarField::polynomial(&[(2.0, 0, 0), (0.3, 2, 0)]),
                xy: ScalarField::polynomial(&[(0.2, 1, 1)]),
                yy: ScalarField::linear(1.5, 0.0, 0.4),
            },
        };
        let metrics = [
            MetricField::conformal(ScalarField::linear(0.0, 0.3, -0.1)),
            tensor.clone().conformal_to(ScalarField::harmonic_cos(2).scaled(0.2)),
            tensor.shifted(&PerturbationDirection::conformal(ScalarField::linear(0.1, 0.5, 0.0)), 0.3),
            MetricField::Euclidean.shifted(
                &PerturbationDirection::general(TensorField::diagonal(
                    ScalarField::linear(0.0, 1.0, 0.0),
                    ScalarField::linear(0.0, -1.0, 0.0),
                )),
                0.2,
            ),
        ];
        for m in &metrics {
            for p in [[0.1, 0.2], [-0.5, 0.4], [0.7, -0.6]] {
                // central differences are O(d²) ≈ 1e-10 here
                assert!(fd_check(m, p) < 1e-8);
            }
        }
    }
}
