//! Closed-form scalar and symmetric-tensor fields on the plane with exact
//! gradients.

use alloc::boxed::Box;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::tensor::Sym2;

/// One factor of a separable trigonometric product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wave {
    One,
    /// `cos(k·π·t)`
    Cos(u32),
    /// `sin(k·π·t)`
    Sin(u32),
}

impl Wave {
    /// Value and derivative at `t`.
    pub fn eval(self, t: f64) -> (f64, f64) {
        match self {
            Wave::One => (1.0, 0.0),
            Wave::Cos(k) => {
                let w = k as f64 * core::f64::consts::PI;
                (libm::cos(w * t), -w * libm::sin(w * t))
            }
            Wave::Sin(k) => {
                let w = k as f64 * core::f64::consts::PI;
                (libm::sin(w * t), w * libm::cos(w * t))
            }
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Wave::One => 0,
            Wave::Cos(k) | Wave::Sin(k) => k,
        }
    }
}

/// `coefficient · x_wave(x) · y_wave(y)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub coefficient: f64,
    pub x: Wave,
    pub y: Wave,
}

/// `coefficient · x^px · y^py`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coefficient: f64,
    pub px: u32,
    pub py: u32,
}

impl Monomial {
    pub const fn new(coefficient: f64, px: u32, py: u32) -> Self {
        Monomial { coefficient, px, py }
    }
}

/// Smooth scalar field σ(x, y) given in closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarField {
    Constant { value: f64 },
    Polynomial { terms: Vec<Monomial> },
    /// `amplitude · Σ terms`
    Trig { amplitude: f64, terms: Vec<TrigTerm> },
    Sum { fields: Vec<ScalarField> },
    Product { factors: Vec<ScalarField> },
    Exp { exponent: Box<ScalarField> },
    Scaled { factor: f64, field: Box<ScalarField> },
}

fn powi(x: f64, n: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r *= x;
    }
    r
}

impl ScalarField {
    pub const fn constant(value: f64) -> Self {
        ScalarField::Constant { value }
    }

    pub fn zero() -> Self {
        ScalarField::Constant { value: 0.0 }
    }

    /// `a + bx·x + by·y`
    pub fn linear(a: f64, bx: f64, by: f64) -> Self {
        ScalarField::Polynomial {
            terms: alloc::vec![Monomial::new(a, 0, 0), Monomial::new(bx, 1, 0), Monomial::new(by, 0, 1)],
        }
    }

    pub fn polynomial(terms: &[(f64, u32, u32)]) -> Self {
        ScalarField::Polynomial {
            terms: terms.iter().map(|&(c, px, py)| Monomial::new(c, px, py)).collect(),
        }
    }

    /// `Re (x + iy)^k`, which restricts to `r^k cos kθ` — the harmonic
    /// extension of `cos kθ` from the unit circle.
    pub fn harmonic_cos(k: u32) -> Self {
        // Re (x+iy)^k = Σ_j C(k, 2j) (-1)^j x^{k-2j} y^{2j}
        let mut terms = Vec::new();
        let mut binom = 1.0f64;
        for m in 0..=k {
            if m % 2 == 0 {
                let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
                terms.push(Monomial::new(sign * binom, k - m, m));
            }
            binom = binom * (k - m) as f64 / (m + 1) as f64;
        }
        ScalarField::Polynomial { terms }
    }

    pub fn scaled(self, factor: f64) -> Self {
        ScalarField::Scaled { factor, field: Box::new(self) }
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        self.value_and_gradient(p).0
    }

    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        self.value_and_gradient(p).1
    }

    pub fn value_and_gradient(&self, p: [f64; 2]) -> (f64, [f64; 2]) {
        let [x, y] = p;
        match self {
            ScalarField::Constant { value } => (*value, [0.0, 0.0]),
            ScalarField::Polynomial { terms } => {
                let mut v = 0.0;
                let mut g = [0.0, 0.0];
                for t in terms {
                    let xp = powi(x, t.px);
                    let yp = powi(y, t.py);
                    v += t.coefficient * xp * yp;
                    if t.px > 0 {
                        g[0] += t.coefficient * t.px as f64 * powi(x, t.px - 1) * yp;
                    }
                    if t.py > 0 {
                        g[1] += t.coefficient * t.py as f64 * xp * powi(y, t.py - 1);
                    }
                }
                (v, g)
            }
            ScalarField::Trig { amplitude, terms } => {
                let mut v = 0.0;
                let mut g = [0.0, 0.0];
                for t in terms {
                    let (fx, dfx) = t.x.eval(x);
                    let (fy, dfy) = t.y.eval(y);
                    v += t.coefficient * fx * fy;
                    g[0] += t.coefficient * dfx * fy;
                    g[1] += t.coefficient * fx * dfy;
                }
                (amplitude * v, [amplitude * g[0], amplitude * g[1]])
            }
            ScalarField::Sum { fields } => fields.iter().fold((0.0, [0.0, 0.0]), |(v, g), f| {
                let (fv, fg) = f.value_and_gradient(p);
                (v + fv, [g[0] + fg[0], g[1] + fg[1]])
            }),
            ScalarField::Product { factors } => factors.iter().fold((1.0, [0.0, 0.0]), |(v, g), f| {
                let (fv, fg) = f.value_and_gradient(p);
                (v * fv, [g[0] * fv + v * fg[0], g[1] * fv + v * fg[1]])
            }),
            ScalarField::Exp { exponent } => {
                let (e, eg) = exponent.value_and_gradient(p);
                let v = libm::exp(e);
                (v, [v * eg[0], v * eg[1]])
            }
            ScalarField::Scaled { factor, field } => {
                let (v, g) = field.value_and_gradient(p);
                (factor * v, [factor * g[0], factor * g[1]])
            }
        }
    }

    /// `Σ |c_α|` times the amplitude for trigonometric fields: a global bound
    /// on `|σ|` since every basis term is bounded by one.
    pub fn trig_bound(&self) -> Option<f64> {
        match self {
            ScalarField::Trig { amplitude, terms } => {
                Some(libm::fabs(*amplitude) * terms.iter().map(|t| libm::fabs(t.coefficient)).sum::<f64>())
            }
            _ => None,
        }
    }
}

/// Symmetric tensor field with closed-form components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorField {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yy: ScalarField,
}

impl TensorField {
    pub fn zero() -> Self {
        TensorField { xx: ScalarField::zero(), xy: ScalarField::zero(), yy: ScalarField::zero() }
    }

    pub fn diagonal(xx: ScalarField, yy: ScalarField) -> Self {
        TensorField { xx, xy: ScalarField::zero(), yy }
    }

    pub fn eval(&self, p: [f64; 2]) -> Sym2 {
        Sym2::new(self.xx.value(p), self.xy.value(p), self.yy.value(p))
    }

    /// Value and `[∂_x, ∂_y]` of the tensor.
    pub fn eval_with_derivatives(&self, p: [f64; 2]) -> (Sym2, [Sym2; 2]) {
        let (a, ga) = self.xx.value_and_gradient(p);
        let (b, gb) = self.xy.value_and_gradient(p);
        let (c, gc) = self.yy.value_and_gradient(p);
        (
            Sym2::new(a, b, c),
            [Sym2::new(ga[0], gb[0], gc[0]), Sym2::new(ga[1], gb[1], gc[1])],
        )
    }

    /// Component-wise sum.
    pub fn plus(&self, other: &TensorField) -> TensorField {
        let sum = |a: &ScalarField, b: &ScalarField| ScalarField::Sum { fields: alloc::vec![a.clone(), b.clone()] };
        TensorField { xx: sum(&self.xx, &other.xx), xy: sum(&self.xy, &other.xy), yy: sum(&self.yy, &other.yy) }
    }

    pub fn scaled(&self, c: f64) -> TensorField {
        TensorField {
            xx: self.xx.clone().scaled(c),
            xy: self.xy.clone().scaled(c),
            yy: self.yy.clone().scaled(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_gradient(f: &ScalarField, p: [f64; 2]) -> [f64; 2] {
        let d = 1e-6;
        [
            (f.value([p[0] + d, p[1]]) - f.value([p[0] - d, p[1]])) / (2.0 * d),
            (f.value([p[0], p[1] + d]) - f.value([p[0], p[1] - d])) / (2.0 * d),
        ]
    }

    #[test]
    fn gradients_match_central_differences() {
        let fields = [
            ScalarField::polynomial(&[(1.0, 0, 0), (0.3, 2, 1), (-0.2, 0, 3)]),
            ScalarField::Trig {
                amplitude: 0.4,
                terms: alloc::vec![
                    TrigTerm { coefficient: 0.7, x: Wave::Cos(2), y: Wave::Sin(1) },
                    TrigTerm { coefficient: -0.1, x: Wave::One, y: Wave::Cos(3) },
                ],
            },
            ScalarField::Exp { exponent: Box::new(ScalarField::linear(0.1, 0.3, -0.2)) },
            ScalarField::Product {
                factors: alloc::vec![ScalarField::linear(1.0, 1.0, 0.0), ScalarField::harmonic_cos(3)],
            },
        ];
        for f in &fields {
            for p in [[0.3, -0.2], [-0.7, 0.1], [0.05, 0.9]] {
                let g = f.gradient(p);
                let fd = fd_gradient(f, p);
                assert!((g[0] - fd[0]).abs() < 1e-8 && (g[1] - fd[1]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn harmonic_cos_on_unit_circle() {
        for k in 0..6 {
            let f = ScalarField::harmonic_cos(k);
            for i in 0..7 {
                let t = 0.37 * i as f64;
                let v = f.value([libm::cos(t), libm::sin(t)]);
                assert!((v - libm::cos(k as f64 * t)).abs() < 1e-13);
            }
        }
    }
}
