use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SteklovSpectrum;
use crate::geometry::{boundary_arclength, Mesh, MetricField};
use crate::Result;

/// Differentiation of periodic nodal data along a boundary loop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffScheme {
    /// Fourier when the loop nodes are uniform in arclength, else finite differences.
    #[default]
    Auto,
    /// Five-point periodic stencils on the actual arclength positions
    /// (fourth order for `f'` on uniform spacing).
    FiniteDifference,
    /// Exact differentiation of the trigonometric interpolant (uniform nodes).
    Fourier,
}

/// Eigenfunction restricted to one boundary loop, parametrized by `g`-arclength.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryTrace {
    /// eigenpair index in the spectrum (or a caller label for synthetic traces)
    pub index: usize,
    pub loop_id: usize,
    pub length: f64,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub scheme: DiffScheme,
}

impl BoundaryTrace {
    /// Builds a trace from nodal values, differentiating with `scheme`.
    pub fn from_values(index: usize, loop_id: usize, s: Vec<f64>, length: f64, values: Vec<f64>, scheme: DiffScheme) -> Self {
        let (d1, d2, used) = periodic_derivatives(&s, length, &values, scheme);
        BoundaryTrace { index, loop_id, length, s, values, d1, d2, scheme: used }
    }

    pub fn sup_norm(&self) -> f64 {
        crate::linalg::max_abs(&self.values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let m = |v: &Vec<f64>| v.iter().map(|x| c * x).collect();
        BoundaryTrace { values: m(&self.values), d1: m(&self.d1), d2: m(&self.d2), ..self.clone() }
    }

    /// Trapezoid approximation of `∮ f' ds`.
    pub fn derivative_integral(&self) -> f64 {
        let n = self.s.len();
        (0..n)
            .map(|j| {
                let next = if j + 1 == n { self.s[0] + self.length } else { self.s[j + 1] };
                0.5 * (next - self.s[j]) * (self.d1[j] + self.d1[(j + 1) % n])
            })
            .sum()
    }
}

/// Fornberg finite-difference weights for derivatives `0..=2` at `x0`.
fn fornberg(x0: f64, x: &[f64]) -> [Vec<f64>; 3] {
    let n = x.len();
    let mut c = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    for i in 1..n {
        let mn = i.min(2);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn is_uniform(s: &[f64], length: f64) -> bool {
    let n = s.len();
    let h = length / n as f64;
    (0..n).all(|j| {
        let next = if j + 1 == n { s[0] + length } else { s[j + 1] };
        ((next - s[j]) - h).abs() <= 1e-9 * h
    })
}

fn finite_difference(s: &[f64], length: f64, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = s.len();
    let half = 2.min((n - 1) / 2) as isize;
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    let mut xs = Vec::new();
    let mut idx = Vec::new();
    for j in 0..n {
        xs.clear();
        idx.clear();
        for o in -half..=half {
            let k = j as isize + o;
            let wrap = k.div_euclid(n as isize);
            let kk = k.rem_euclid(n as isize) as usize;
            xs.push(s[kk] + wrap as f64 * length);
            idx.push(kk);
        }
        let w = fornberg(s[j], &xs);
        d1[j] = idx.iter().zip(&w[1]).map(|(&k, c)| c * f[k]).sum();
        d2[j] = idx.iter().zip(&w[2]).map(|(&k, c)| c * f[k]).sum();
    }
    (d1, d2)
}

fn fourier(length: f64, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let cos_t: Vec<f64> = (0..n).map(|j| libm::cos(2.0 * PI * j as f64 / n as f64)).collect();
    let sin_t: Vec<f64> = (0..n).map(|j| libm::sin(2.0 * PI * j as f64 / n as f64)).collect();
    let omega = 2.0 * PI / length;
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    // the basis is phased at the loop's first node
    for k in 1..=n / 2 {
        let (mut a, mut b) = (0.0, 0.0);
        for (j, v) in f.iter().enumerate() {
            let t = (j * k) % n;
            a += v * cos_t[t];
            b += v * sin_t[t];
        }
        let nyquist = 2 * k == n;
        let norm = if nyquist { 1.0 } else { 2.0 } / n as f64;
        a *= norm;
        b *= norm;
        let w = omega * k as f64;
        for j in 0..n {
            let t = (j * k) % n;
            let (c, s) = (cos_t[t], sin_t[t]);
            if !nyquist {
                d1[j] += w * (b * c - a * s);
            }
            d2[j] -= w * w * (a * c + b * s);
        }
    }
    (d1, d2)
}

/// First and second arclength derivatives of periodic nodal data; returns the
/// scheme actually used.
pub fn periodic_derivatives(s: &[f64], length: f64, f: &[f64], scheme: DiffScheme) -> (Vec<f64>, Vec<f64>, DiffScheme) {
    let use_fourier = match scheme {
        DiffScheme::Fourier => true,
        DiffScheme::FiniteDifference => false,
        DiffScheme::Auto => is_uniform(s, length),
    };
    if use_fourier {
        let (a, b) = fourier(length, f);
        (a, b, DiffScheme::Fourier)
    } else {
        let (a, b) = finite_difference(s, length, f);
        (a, b, DiffScheme::FiniteDifference)
    }
}

/// Traces of eigenvector `index` on every boundary loop.
pub fn extract_trace(spectrum: &SteklovSpectrum, index: usize, mesh: &Mesh, metric: &MetricField) -> Result<Vec<BoundaryTrace>> {
    extract_trace_with(spectrum, index, mesh, metric, DiffScheme::Auto)
}

pub fn extract_trace_with(
    spectrum: &SteklovSpectrum,
    index: usize,
    mesh: &Mesh,
    metric: &MetricField,
    scheme: DiffScheme,
) -> Result<Vec<BoundaryTrace>> {
    if index >= spectrum.len() {
        return Err(crate::Error::InvalidInput(alloc::format!(
            "eigenvector {index} requested, {} computed",
            spectrum.len()
        )));
    }
    let arcs = boundary_arclength(mesh, metric, spectrum.mass.kind.edge_rule())?;
    let psi = spectrum.eigenvectors.column(index);
    let mut out = Vec::with_capacity(arcs.len());
    for (arc, range) in arcs.into_iter().zip(mesh.loop_ranges()) {
        let values: Vec<f64> = range.map(|d| psi[d]).collect();
        out.push(BoundaryTrace::from_values(index, arc.loop_id, arc.s, arc.total, values, scheme));
    }
    Ok(out)
}
