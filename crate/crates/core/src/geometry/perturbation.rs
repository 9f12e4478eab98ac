use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MetricField, ScalarField, TensorField, TrigTerm, Wave};
use crate::tensor::Sym2;

/// A metric variation `h = Dg`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationDirection {
    /// Arbitrary symmetric tensor field `h_ij`.
    General { tensor: TensorField },
    /// `h = σ g`, resolved against whatever metric it is paired with.
    Conformal { sigma: ScalarField },
}

impl PerturbationDirection {
    pub fn general(tensor: TensorField) -> Self {
        PerturbationDirection::General { tensor }
    }

    pub fn conformal(sigma: ScalarField) -> Self {
        PerturbationDirection::Conformal { sigma }
    }

    pub fn zero() -> Self {
        PerturbationDirection::General { tensor: TensorField::zero() }
    }

    pub fn is_conformal(&self) -> bool {
        matches!(self, PerturbationDirection::Conformal { .. })
    }

    pub fn sigma(&self) -> Option<&ScalarField> {
        match self {
            PerturbationDirection::Conformal { sigma } => Some(sigma),
            PerturbationDirection::General { .. } => None,
        }
    }

    /// `c · h`
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            PerturbationDirection::General { tensor } => PerturbationDirection::General { tensor: tensor.scaled(c) },
            PerturbationDirection::Conformal { sigma } => {
                PerturbationDirection::Conformal { sigma: sigma.clone().scaled(c) }
            }
        }
    }

    /// `h₁ + h₂` for directions of the same kind.
    pub fn plus(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (PerturbationDirection::General { tensor: a }, PerturbationDirection::General { tensor: b }) => {
                Some(PerturbationDirection::General { tensor: a.plus(b) })
            }
            (PerturbationDirection::Conformal { sigma: a }, PerturbationDirection::Conformal { sigma: b }) => {
                Some(PerturbationDirection::Conformal {
                    sigma: ScalarField::Sum { fields: alloc::vec![a.clone(), b.clone()] },
                })
            }
            _ => None,
        }
    }

    /// `h(p)` given the metric value `g(p)`.
    pub fn materialize_with(&self, g: Sym2, p: [f64; 2]) -> Sym2 {
        match self {
            PerturbationDirection::General { tensor } => tensor.eval(p),
            PerturbationDirection::Conformal { sigma } => g.scale(sigma.value(p)),
        }
    }

    pub fn materialize(&self, metric: &MetricField, p: [f64; 2]) -> Sym2 {
        self.materialize_with(metric.eval(p), p)
    }

    /// `h(p)` and `∂_k h(p)` given `g` and `∂_k g` at `p`.
    pub fn materialize_with_derivatives(&self, g: Sym2, dg: [Sym2; 2], p: [f64; 2]) -> (Sym2, [Sym2; 2]) {
        match self {
            PerturbationDirection::General { tensor } => tensor.eval_with_derivatives(p),
            PerturbationDirection::Conformal { sigma } => {
                let (s, ds) = sigma.value_and_gradient(p);
                let d = |k: usize| g.scale(ds[k]) + dg[k].scale(s);
                (g.scale(s), [d(0), d(1)])
            }
        }
    }

    /// The pair `(tr_g h, g⁻¹ h g⁻¹)` at a point. For conformal directions
    /// these are evaluated in the reduced form `(2σ, σ g⁻¹)`, which is the
    /// same algebra without the round-off of forming `g⁻¹ (σ g) g⁻¹`.
    pub fn metric_contractions(&self, g: Sym2, g_inv: Sym2, p: [f64; 2]) -> (f64, Sym2) {
        match self {
            PerturbationDirection::General { tensor } => {
                let h = tensor.eval(p);
                (g_inv.trace_product(&h), g_inv.sandwich(&h))
            }
            PerturbationDirection::Conformal { sigma } => {
                let _ = g;
                let s = sigma.value(p);
                (2.0 * s, g_inv.scale(s))
            }
        }
    }
}

/// Components `h^{ij}` of the variation of the inverse metric,
/// `D(g⁻¹) = −g⁻¹ h g⁻¹`.
pub fn inverse_variation(g: Sym2, h: Sym2) -> Sym2 {
    -g.inverse().sandwich(&h)
}

/// Parameters of the seeded conformal sampler.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalSampler {
    pub modes: u32,
    pub amplitude: f64,
}

/// The separable trigonometric basis `trig_p(πx)·trig_q(πy)` with
/// `p + q ≤ modes`, in a fixed enumeration order.
pub fn conformal_basis(modes: u32) -> Vec<(Wave, Wave)> {
    let waves = |k: u32| -> Vec<Wave> {
        if k == 0 {
            alloc::vec![Wave::One]
        } else {
            alloc::vec![Wave::Cos(k), Wave::Sin(k)]
        }
    };
    let mut basis = Vec::new();
    for total in 0..=modes {
        for p in 0..=total {
            let q = total - p;
            for wx in waves(p) {
                for wy in waves(q) {
                    basis.push((wx, wy));
                }
            }
        }
    }
    basis
}

/// Draws `σ = amplitude · Σ c_α T_α` with `c_α` i.i.d. uniform on `[−1, 1]`
/// from a ChaCha8 stream seeded by `seed`. The same arguments reproduce the
/// same coefficients bit for bit on every platform.
pub fn sample_random_conformal(seed: u64, modes: u32, amplitude: f64) -> PerturbationDirection {
    debug_assert!(modes >= 1 && amplitude > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = conformal_basis(modes)
        .into_iter()
        .map(|(x, y)| TrigTerm { coefficient: rng.random_range(-1.0..=1.0), x, y })
        .collect();
    PerturbationDirection::Conformal { sigma: ScalarField::Trig { amplitude, terms } }
}
