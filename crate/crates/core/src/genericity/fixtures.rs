//! Synthetic traces with known degeneracies, on uniform nodes of a loop of
//! length `2π` (differentiated spectrally).

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::steklov::{BoundaryTrace, DiffScheme};

/// `f(s)` sampled at `n` uniform nodes of `[0, 2π)`.
pub fn uniform_trace(index: usize, n: usize, f: impl Fn(f64) -> f64) -> BoundaryTrace {
    let s: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let values = s.iter().map(|&x| f(x)).collect();
    BoundaryTrace::from_values(index, 0, s, 2.0 * PI, values, DiffScheme::Fourier)
}

/// `sin²(s − 0.3)`: touches zero with `f' = 0` at `s = 0.3` and `0.3 + π`.
pub fn synthetic_tangent_zero(n: usize) -> BoundaryTrace {
    uniform_trace(usize::MAX, n, |s| {
        let v = libm::sin(s - 0.3);
        v * v
    })
}

/// `sin³(s − s0)`: `f' = f'' = 0` at `s0` and `s0 + π`.
pub fn synthetic_cubic_flat(n: usize, s0: f64) -> BoundaryTrace {
    uniform_trace(usize::MAX, n, |s| {
        let v = libm::sin(s - s0);
        v * v * v
    })
}

/// Identically zero.
pub fn synthetic_zero(n: usize) -> BoundaryTrace {
    uniform_trace(usize::MAX, n, |_| 0.0)
}
