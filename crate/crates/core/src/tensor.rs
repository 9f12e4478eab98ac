//! Symmetric 2×2 tensors and the handful of operations the assembly needs.

use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 { xx: 0.0, xy: 0.0, yy: 0.0 };
    pub const IDENTITY: Sym2 = Sym2 { xx: 1.0, xy: 0.0, yy: 1.0 };

    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Sym2 { xx: a, xy: 0.0, yy: b }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Inverse via the adjugate. The caller guarantees `det != 0`.
    pub fn inverse(&self) -> Sym2 {
        let d = self.det();
        Sym2::new(self.yy / d, -self.xy / d, self.xx / d)
    }

    /// `g(a, b) = aᵀ G b`.
    pub fn form(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        a[0] * (self.xx * b[0] + self.xy * b[1]) + a[1] * (self.xy * b[0] + self.yy * b[1])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
    }

    /// `A·B·A` for symmetric `A` (self) and `B`; the result is symmetric.
    pub fn sandwich(&self, b: &Sym2) -> Sym2 {
        let a = self;
        // A·B
        let m00 = a.xx * b.xx + a.xy * b.xy;
        let m01 = a.xx * b.xy + a.xy * b.yy;
        let m10 = a.xy * b.xx + a.yy * b.xy;
        let m11 = a.xy * b.xy + a.yy * b.yy;
        Sym2::new(
            m00 * a.xx + m01 * a.xy,
            m00 * a.xy + m01 * a.yy,
            m10 * a.xy + m11 * a.yy,
        )
    }

    /// `tr(A·B)` for symmetric arguments.
    pub fn trace_product(&self, b: &Sym2) -> f64 {
        self.xx * b.xx + 2.0 * self.xy * b.xy + self.yy * b.yy
    }

    /// Smallest eigenvalue (closed form, stable for nearly isotropic tensors).
    pub fn min_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        mean - libm::hypot(half_diff, self.xy)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        mean + libm::hypot(half_diff, self.xy)
    }

    pub fn scale(&self, c: f64) -> Sym2 {
        Sym2::new(c * self.xx, c * self.xy, c * self.yy)
    }

    pub fn max_abs(&self) -> f64 {
        libm::fmax(libm::fabs(self.xx), libm::fmax(libm::fabs(self.xy), libm::fabs(self.yy)))
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx - o.xx, self.xy - o.xy, self.yy - o.yy)
    }
}

impl Neg for Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        Sym2::new(-self.xx, -self.xy, -self.yy)
    }
}

impl Mul<Sym2> for f64 {
    type Output = Sym2;
    fn mul(self, s: Sym2) -> Sym2 {
        s.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_sandwich() {
        let g = Sym2::new(2.0, 0.5, 1.5);
        let gi = g.inverse();
        // g⁻¹ g g⁻¹ = g⁻¹
        let s = gi.sandwich(&g);
        assert!((s - gi).max_abs() < 1e-15);
        assert!((g.trace_product(&gi) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let g = Sym2::diag(1.0, -1.0);
        assert_eq!(g.min_eigenvalue(), -1.0);
        assert_eq!(g.max_eigenvalue(), 1.0);
    }
}
