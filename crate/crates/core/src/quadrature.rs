//! Triangle and edge quadrature rules in barycentric / unit-interval form.

use crate::{Error, Result};

/// Barycentric points `(l1, l2, l3)` with weights summing to 1.
#[derive(Clone, Copy, Debug)]
pub struct TriangleRule {
    pub points: &'static [([f64; 3], f64)],
    pub order: u32,
}

const CENTROID: [([f64; 3], f64); 1] = [([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1.0)];

const THREE_POINT: [([f64; 3], f64); 3] = [
    ([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], 1.0 / 3.0),
    ([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0], 1.0 / 3.0),
];

// Dunavant, degree 4
const A4: f64 = 0.445_948_490_915_965;
const WA4: f64 = 0.223_381_589_678_011;
const B4: f64 = 0.091_576_213_509_771;
const WB4: f64 = 0.109_951_743_655_322;
const SIX_POINT: [([f64; 3], f64); 6] = [
    ([1.0 - 2.0 * A4, A4, A4], WA4),
    ([A4, 1.0 - 2.0 * A4, A4], WA4),
    ([A4, A4, 1.0 - 2.0 * A4], WA4),
    ([1.0 - 2.0 * B4, B4, B4], WB4),
    ([B4, 1.0 - 2.0 * B4, B4], WB4),
    ([B4, B4, 1.0 - 2.0 * B4], WB4),
];

/// Default polynomial exactness of the stiffness quadrature.
pub const DEFAULT_ORDER: u32 = 2;

impl TriangleRule {
    /// Rule exact for polynomials of degree `order` (1, 2, 3 or 4; 3 maps to
    /// the degree-4 rule).
    pub fn of_order(order: u32) -> Result<TriangleRule> {
        match order {
            1 => Ok(TriangleRule { points: &CENTROID, order: 1 }),
            2 => Ok(TriangleRule { points: &THREE_POINT, order: 2 }),
            3 | 4 => Ok(TriangleRule { points: &SIX_POINT, order: 4 }),
            _ => Err(Error::InvalidInput(alloc::format!("unsupported quadrature order {order} (1..=4)"))),
        }
    }

    pub fn map(&self, tri: [[f64; 2]; 3]) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().map(move |(l, w)| {
            let x = l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0];
            let y = l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1];
            ([x, y], *w)
        })
    }
}

/// Gauss–Legendre nodes and weights on the unit interval (3 points).
pub fn gauss3() -> [(f64, f64); 3] {
    let d = 0.5 * libm::sqrt(0.6);
    [(0.5 - d, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + d, 5.0 / 18.0)]
}
