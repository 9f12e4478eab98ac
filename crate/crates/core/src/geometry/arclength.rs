use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{MetricField, Mesh};
use crate::quadrature::{gauss3, TriangleRule, DEFAULT_ORDER};
use crate::tensor::Sym2;
use crate::{Error, Result};

/// Quadrature used along boundary edges, shared by arclength and the
/// boundary mass so that their totals agree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRule {
    /// Trapezoid rule at the edge end points.
    #[default]
    Nodal,
    /// Three-point Gauss–Legendre.
    Gauss3,
}

/// Cumulative g-arclength along one boundary loop.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopArclength {
    pub loop_id: usize,
    /// `s[j]` at the j-th loop vertex, `s[0] = 0`
    pub s: Vec<f64>,
    /// length of the edge from vertex j to j+1 (cyclic)
    pub edge_lengths: Vec<f64>,
    pub total: f64,
}

fn sqrt_g_tau(metric: &MetricField, p: [f64; 2], tau: [f64; 2]) -> Result<f64> {
    let g = metric.eval(p);
    check_spd(g, p)?;
    Ok(libm::sqrt(g.form(tau, tau)))
}

pub(crate) fn check_spd(g: Sym2, p: [f64; 2]) -> Result<()> {
    let m = g.min_eigenvalue();
    if !(m > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: m, x: p[0], y: p[1] });
    }
    Ok(())
}

/// g-length of the straight edge `a → b` under `rule`.
pub fn edge_length(metric: &MetricField, a: [f64; 2], b: [f64; 2], rule: EdgeRule) -> Result<f64> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = libm::hypot(d[0], d[1]);
    let tau = [d[0] / len, d[1] / len];
    match rule {
        EdgeRule::Nodal => Ok(0.5 * len * (sqrt_g_tau(metric, a, tau)? + sqrt_g_tau(metric, b, tau)?)),
        EdgeRule::Gauss3 => {
            let mut s = 0.0;
            for (t, w) in gauss3() {
                s += w * sqrt_g_tau(metric, [a[0] + t * d[0], a[1] + t * d[1]], tau)?;
            }
            Ok(len * s)
        }
    }
}

/// Arclength coordinates on every boundary loop.
pub fn boundary_arclength(mesh: &Mesh, metric: &MetricField, rule: EdgeRule) -> Result<Vec<LoopArclength>> {
    let verts = mesh.vertices();
    mesh.boundary_loops()
        .iter()
        .enumerate()
        .map(|(loop_id, lp)| {
            let n = lp.len();
            let mut s = Vec::with_capacity(n);
            let mut edge_lengths = Vec::with_capacity(n);
            let mut acc = 0.0;
            for i in 0..n {
                s.push(acc);
                let l = edge_length(metric, verts[lp[i]], verts[lp[(i + 1) % n]], rule)?;
                edge_lengths.push(l);
                acc += l;
            }
            Ok(LoopArclength { loop_id, s, edge_lengths, total: acc })
        })
        .collect()
}

/// Outcome of checking a metric for positive definiteness on a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpdReport {
    pub min_eigenvalue: f64,
    pub location: [f64; 2],
    pub ok: bool,
}

/// Points at which assembly may evaluate the metric: triangle quadrature
/// points of the default and highest orders, all vertices, and boundary
/// Gauss points.
pub fn metric_sample_points(mesh: &Mesh) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = mesh.vertices().to_vec();
    for order in [1, DEFAULT_ORDER, 4] {
        let rule = TriangleRule::of_order(order).expect("supported order");
        for t in 0..mesh.triangles().len() {
            pts.extend(rule.map(mesh.triangle_coords(t)).map(|(p, _)| p));
        }
    }
    let verts = mesh.vertices();
    for lp in mesh.boundary_loops() {
        let n = lp.len();
        for i in 0..n {
            let (a, b) = (verts[lp[i]], verts[lp[(i + 1) % n]]);
            for (t, _) in gauss3() {
                pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
    }
    pts
}

/// Smallest eigenvalue of `g` over [`metric_sample_points`].
pub fn validate_spd(metric: &MetricField, mesh: &Mesh) -> SpdReport {
    let mut report = SpdReport { min_eigenvalue: f64::INFINITY, location: [0.0, 0.0], ok: true };
    for p in metric_sample_points(mesh) {
        let m = metric.eval(p).min_eigenvalue();
        if m < report.min_eigenvalue || m.is_nan() {
            report.min_eigenvalue = m;
            report.location = p;
        }
    }
    report.ok = report.min_eigenvalue > 0.0;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_annulus_mesh, generate_disk_mesh, refine, ScalarField, TensorField};
    use core::f64::consts::PI;

    #[test]
    fn disk_perimeter_converges_quadratically() {
        let mut m = generate_disk_mesh(1.0, 0.2).unwrap();
        let mut errs = Vec::new();
        for _ in 0..3 {
            let l = boundary_arclength(&m, &MetricField::Euclidean, EdgeRule::Nodal).unwrap();
            errs.push((l[0].total - 2.0 * PI).abs());
            m = refine(&m).unwrap();
        }
        for w in errs.windows(2) {
            let rate = libm::log2(w[0] / w[1]);
            assert!((rate - 2.0).abs() < 0.1, "rate {rate}");
        }
    }

    #[test]
    fn scaled_metric_doubles_lengths_exactly() {
        let m = generate_disk_mesh(1.0, 0.1).unwrap();
        for rule in [EdgeRule::Nodal, EdgeRule::Gauss3] {
            let e = boundary_arclength(&m, &MetricField::Euclidean, rule).unwrap();
            let f = boundary_arclength(&m, &MetricField::scaled(4.0), rule).unwrap();
            for (a, b) in e[0].edge_lengths.iter().zip(&f[0].edge_lengths) {
                assert_eq!(2.0 * a, *b);
            }
            assert!((f[0].total - 4.0 * PI).abs() < 0.02);
        }
    }

    #[test]
    fn annulus_loop_lengths() {
        let m = generate_annulus_mesh(0.5, 1.0, 0.05).unwrap();
        let l = boundary_arclength(&m, &MetricField::Euclidean, EdgeRule::Nodal).unwrap();
        assert!((l[0].total - 2.0 * PI).abs() < 1e-2);
        assert!((l[1].total - PI).abs() < 1e-2);
    }

    #[test]
    fn spd_reports() {
        let m = generate_disk_mesh(1.0, 0.2).unwrap();
        let r = validate_spd(&MetricField::Euclidean, &m);
        assert_eq!(r.min_eigenvalue, 1.0);
        assert!(r.ok);

        let conf = MetricField::conformal(ScalarField::linear(0.0, 0.3, 0.0));
        let r = validate_spd(&conf, &m);
        let x_min = metric_sample_points(&m).iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        assert!((r.min_eigenvalue - libm::exp(0.6 * x_min)).abs() < 1e-14);

        let bad = MetricField::Tensor {
            components: TensorField::diagonal(ScalarField::constant(1.0), ScalarField::constant(-1.0)),
        };
        let r = validate_spd(&bad, &m);
        assert!(!r.ok);
        assert!(matches!(
            boundary_arclength(&m, &bad, EdgeRule::Nodal),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
