//! Closed-form Steklov spectra of the Euclidean disk and annulus.
//!
//! Separation of variables: on the disk of radius `R`, `Λ e^{ikθ} = |k|/R e^{ikθ}`.
//! On the annulus `ρR ≤ r ≤ R` each angular mode `k ≥ 1` carries the radial
//! solutions `r^k, r^{-k}`; the Steklov condition on both circles gives a 2×2
//! system whose determinant is a quadratic in `λ`. Mode 0 uses `1, ln r`.

use alloc::vec::Vec;

use serde::Serialize;

use crate::{Error, Result};

/// One oracle eigenvalue with its angular mode and multiplicity (1 for `k = 0`, else 2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleEigenvalue {
    pub value: f64,
    pub mode: u32,
    pub multiplicity: u32,
}

/// Sorts distinct entries and repeats each by its multiplicity, keeping the
/// first `count`.
pub fn expand_table(mut entries: Vec<OracleEigenvalue>, count: usize) -> Vec<OracleEigenvalue> {
    entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.mode.cmp(&b.mode)));
    entries
        .iter()
        .flat_map(|e| core::iter::repeat_n(*e, e.multiplicity as usize))
        .take(count)
        .collect()
}

fn expand(entries: Vec<OracleEigenvalue>, count: usize) -> Vec<f64> {
    expand_table(entries, count).iter().map(|e| e.value).collect()
}

/// Disk table with modes: `count` rows.
pub fn disk_table(radius: f64, count: usize) -> Result<Vec<OracleEigenvalue>> {
    Ok(expand_table(disk_modes(radius, count as u32 / 2 + 1)?, count))
}

/// Annulus table with modes: `count` rows.
pub fn annulus_table(r_inner: f64, r_outer: f64, count: usize) -> Result<Vec<OracleEigenvalue>> {
    Ok(expand_table(annulus_modes(r_inner, r_outer, count as u32 + 1)?, count))
}

/// Distinct disk eigenvalues for modes `0..=max_mode`.
pub fn disk_modes(radius: f64, max_mode: u32) -> Result<Vec<OracleEigenvalue>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("disk radius must be positive, got {radius}")));
    }
    Ok((0..=max_mode)
        .map(|k| OracleEigenvalue { value: k as f64 / radius, mode: k, multiplicity: if k == 0 { 1 } else { 2 } })
        .collect())
}

/// First `count` disk eigenvalues with multiplicity: `0, 1/R, 1/R, 2/R, …`.
pub fn disk_spectrum(radius: f64, count: usize) -> Result<Vec<f64>> {
    Ok(expand(disk_modes(radius, count as u32 / 2 + 1)?, count))
}

/// Determinant of the unit-outer-radius matching system for mode `k`.
pub fn annulus_determinant(rho: f64, k: u32, lambda: f64) -> f64 {
    if k == 0 {
        // u = a + b ln r:  b = λa  and  −b/ρ = λ(a + b ln ρ)
        return lambda * (1.0 + 1.0 / rho + lambda * libm::log(rho));
    }
    let kf = k as f64;
    let rk = libm::pow(rho, kf);
    let a11 = kf - lambda;
    let a12 = -kf - lambda;
    let a21 = -kf * rk / rho - lambda * rk;
    let a22 = kf / (rk * rho) - lambda / rk;
    a11 * a22 - a12 * a21
}

/// Bracketed bisection for all roots of `f` on `(lo, hi]`, sampled on `n` cells.
fn bracket_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / n as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = lo + step * i as f64;
        let fb = f(b);
        if fa == 0.0 && i > 1 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            for _ in 0..200 {
                let m = 0.5 * (x0 + x1);
                if m <= x0 || m >= x1 {
                    break;
                }
                let fm = f(m);
                if fm == 0.0 {
                    x0 = m;
                    x1 = m;
                    break;
                }
                if f0 * fm < 0.0 {
                    x1 = m;
                } else {
                    x0 = m;
                    f0 = fm;
                }
            }
            roots.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Nonzero roots of mode `k` on the annulus `ρ ≤ r ≤ 1`.
pub fn annulus_mode_roots(rho: f64, k: u32) -> Result<Vec<f64>> {
    // both roots are positive, so each lies below their sum −c1/c2
    let hi = if k == 0 {
        4.0 * (1.0 + 1.0 / rho) / (-libm::log(rho))
    } else {
        let (c2, c1, _) = annulus_quadratic(rho, k);
        1.5 * (-c1 / c2).abs() + 1.0
    };
    let lo = if k == 0 { 1e-9 * hi } else { 0.0 };
    let expected = if k == 0 { 1 } else { 2 };
    let cells = 4000 + 400 * k as usize;
    let roots = bracket_roots(|l| annulus_determinant(rho, k, l), lo, hi, cells);
    if roots.len() != expected {
        return Err(Error::RootSearch { mode: k, found: roots.len(), expected, lo, hi });
    }
    Ok(roots)
}

/// Quadratic coefficients `(c2, c1, c0)` of the mode-`k` determinant (`k ≥ 1`).
pub fn annulus_quadratic(rho: f64, k: u32) -> (f64, f64, f64) {
    let d0 = annulus_determinant(rho, k, 0.0);
    let dp = annulus_determinant(rho, k, 1.0);
    let dm = annulus_determinant(rho, k, -1.0);
    (0.5 * (dp + dm) - d0, 0.5 * (dp - dm), d0)
}

/// Distinct annulus eigenvalues for modes `0..=max_mode`.
pub fn annulus_modes(r_inner: f64, r_outer: f64, max_mode: u32) -> Result<Vec<OracleEigenvalue>> {
    if !(r_inner > 0.0 && r_inner < r_outer) {
        return Err(Error::InvalidInput(alloc::format!(
            "annulus needs 0 < r_inner < r_outer (got {r_inner}, {r_outer})"
        )));
    }
    let rho = r_inner / r_outer;
    let mut out = alloc::vec![OracleEigenvalue { value: 0.0, mode: 0, multiplicity: 1 }];
    for k in 0..=max_mode {
        for root in annulus_mode_roots(rho, k)? {
            out.push(OracleEigenvalue {
                value: root / r_outer,
                mode: k,
                multiplicity: if k == 0 { 1 } else { 2 },
            });
        }
    }
    Ok(out)
}

/// First `count` annulus eigenvalues with multiplicity.
pub fn annulus_spectrum(r_inner: f64, r_outer: f64, count: usize) -> Result<Vec<f64>> {
    // the lower root of mode k sits near k / r_outer, so count + 1 modes cover count values
    Ok(expand(annulus_modes(r_inner, r_outer, count as u32 + 1)?, count))
}
