use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::steklov::BoundaryTrace;

/// Tolerances of the zero/critical-point scans, applied to sup-normalized
/// traces differentiated in `g`-arclength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanTolerances {
    /// `|f|` below which a critical point counts as a (tangential) zero
    pub zero_tol: f64,
    /// `|f'|` below which a zero is degenerate
    pub deriv_tol: f64,
    /// `|f''|` below which a critical point is degenerate
    pub second_deriv_tol: f64,
}

impl Default for ScanTolerances {
    fn default() -> Self {
        ScanTolerances { zero_tol: 1e-6, deriv_tol: 1e-3, second_deriv_tol: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Zeros,
    CriticalPoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroPoint {
    pub s: f64,
    /// `|f|` of the interpolant there
    pub value: f64,
    /// `|f'|`
    pub slope: f64,
    /// no sign change: found as a critical point with `|f| ≤ zero_tol`
    pub tangential: bool,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub s: f64,
    /// `|f'|`
    pub slope: f64,
    /// `|f''|`
    pub curvature: f64,
    /// no sign change of `f'`: found as an inflection with `|f'| ≤ deriv_tol`
    pub flat: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceScan {
    pub index: usize,
    pub loop_id: usize,
    pub zeros: Vec<ZeroPoint>,
    pub critical_points: Vec<CriticalPoint>,
    /// smallest `|f'|` at a zero
    pub min_slope: Option<f64>,
    /// smallest `|f''|` at a critical point
    pub min_curvature: Option<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    pub tolerances: ScanTolerances,
    pub traces: Vec<TraceScan>,
    pub flags: usize,
    /// smallest ratio of the scanned derivative to its tolerance
    pub margin: Option<f64>,
}

/// `f / sup|f|`; traces that vanish identically are returned unchanged.
pub fn sup_normalized(trace: &BoundaryTrace) -> BoundaryTrace {
    let sup = trace.sup_norm();
    if sup > 0.0 { trace.scaled(1.0 / sup) } else { trace.clone() }
}

/// Cubic Hermite data on one interval of a periodic loop.
struct Cell {
    s0: f64,
    len: f64,
}

fn cell(trace: &BoundaryTrace, j: usize) -> (Cell, usize) {
    let n = trace.s.len();
    let k = (j + 1) % n;
    let s1 = if k == 0 { trace.s[0] + trace.length } else { trace.s[k] };
    (Cell { s0: trace.s[j], len: s1 - trace.s[j] }, k)
}

/// Hermite interpolant of `(y0, m0)`, `(y1, m1)` and its derivative at `τ ∈ [0, 1]`.
fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, len: f64, tau: f64) -> (f64, f64) {
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + tau;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * len * m0 + h01 * y1 + h11 * len * m1;
    let d = ((6.0 * t2 - 6.0 * tau) * y0 + (3.0 * t2 - 4.0 * tau + 1.0) * len * m0 + (-6.0 * t2 + 6.0 * tau) * y1
        + (3.0 * t2 - 2.0 * tau) * len * m1)
        / len;
    (value, d)
}

/// Root of `g` on `[0, 1]` given `g(0)·g(1) ≤ 0`.
fn bisect(g: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    let glo = g(lo);
    if glo == 0.0 {
        return 0.0;
    }
    if g(hi) == 0.0 {
        return 1.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn wrap(s: f64, length: f64) -> f64 {
    if s >= length { s - length } else { s }
}

fn too_close(existing: &[f64], s: f64, dist: f64, length: f64) -> bool {
    existing.iter().any(|&e| {
        let d = (e - s).abs();
        d.min(length - d) < dist
    })
}

fn scan_zeros(trace: &BoundaryTrace, tol: &ScanTolerances) -> Vec<ZeroPoint> {
    let n = trace.s.len();
    let (f, d1, d2) = (&trace.values, &trace.d1, &trace.d2);
    let mut out: Vec<ZeroPoint> = Vec::new();
    for j in 0..n {
        let (c, k) = cell(trace, j);
        if !(f[j] == 0.0 || f[j] * f[k] < 0.0) {
            continue;
        }
        let tau = bisect(|t| hermite(f[j], f[k], d1[j], d1[k], c.len, t).0);
        let value = hermite(f[j], f[k], d1[j], d1[k], c.len, tau).0.abs();
        let slope = hermite(d1[j], d1[k], d2[j], d2[k], c.len, tau).0.abs();
        let s = wrap(c.s0 + tau * c.len, trace.length);
        out.push(ZeroPoint { s, value, slope, tangential: false, degenerate: slope < tol.deriv_tol });
    }
    // touching zeros: critical points where the interpolant nearly vanishes
    let mut extra = Vec::new();
    for j in 0..n {
        let (c, k) = cell(trace, j);
        if !(d1[j] == 0.0 || d1[j] * d1[k] < 0.0) {
            continue;
        }
        let tau = bisect(|t| hermite(d1[j], d1[k], d2[j], d2[k], c.len, t).0);
        let value = hermite(f[j], f[k], d1[j], d1[k], c.len, tau).0.abs();
        if value > tol.zero_tol {
            continue;
        }
        let s = wrap(c.s0 + tau * c.len, trace.length);
        let known: Vec<f64> = out.iter().map(|z| z.s).collect();
        if too_close(&known, s, c.len, trace.length) {
            continue;
        }
        let slope = hermite(d1[j], d1[k], d2[j], d2[k], c.len, tau).0.abs();
        extra.push(ZeroPoint { s, value, slope, tangential: true, degenerate: slope < tol.deriv_tol });
    }
    out.extend(extra);
    out.sort_by(|a, b| a.s.total_cmp(&b.s));
    out
}

fn scan_critical(trace: &BoundaryTrace, tol: &ScanTolerances) -> Vec<CriticalPoint> {
    let n = trace.s.len();
    let (d1, d2) = (&trace.d1, &trace.d2);
    let mut out: Vec<CriticalPoint> = Vec::new();
    for j in 0..n {
        let (c, k) = cell(trace, j);
        if !(d1[j] == 0.0 || d1[j] * d1[k] < 0.0) {
            continue;
        }
        let tau = bisect(|t| hermite(d1[j], d1[k], d2[j], d2[k], c.len, t).0);
        let slope = hermite(d1[j], d1[k], d2[j], d2[k], c.len, tau).0.abs();
        let curvature = ((1.0 - tau) * d2[j] + tau * d2[k]).abs();
        let s = wrap(c.s0 + tau * c.len, trace.length);
        out.push(CriticalPoint { s, slope, curvature, flat: false, degenerate: curvature < tol.second_deriv_tol });
    }
    // flat points: inflections where f' nearly vanishes without changing sign
    let mut extra = Vec::new();
    for j in 0..n {
        let (c, k) = cell(trace, j);
        if !(d2[j] == 0.0 || d2[j] * d2[k] < 0.0) {
            continue;
        }
        let tau = if d2[j] == d2[k] { 0.0 } else { d2[j] / (d2[j] - d2[k]) };
        let slope = hermite(d1[j], d1[k], d2[j], d2[k], c.len, tau).0.abs();
        if slope > tol.deriv_tol {
            continue;
        }
        let s = wrap(c.s0 + tau * c.len, trace.length);
        let known: Vec<f64> = out.iter().map(|p| p.s).collect();
        if too_close(&known, s, c.len, trace.length) {
            continue;
        }
        extra.push(CriticalPoint { s, slope, curvature: 0.0, flat: true, degenerate: true });
    }
    out.extend(extra);
    out.sort_by(|a, b| a.s.total_cmp(&b.s));
    out
}

fn min_of(xs: impl Iterator<Item = f64>) -> Option<f64> {
    xs.fold(None, |m, x| Some(m.map_or(x, |m: f64| m.min(x))))
}

fn report(kind: ScanKind, tolerances: ScanTolerances, traces: Vec<TraceScan>) -> ScanReport {
    let flags = traces.iter().filter(|t| t.flagged).count();
    let margin = match kind {
        ScanKind::Zeros => min_of(traces.iter().filter_map(|t| t.min_slope)).map(|m| m / tolerances.deriv_tol),
        ScanKind::CriticalPoints => {
            min_of(traces.iter().filter_map(|t| t.min_curvature)).map(|m| m / tolerances.second_deriv_tol)
        }
    };
    ScanReport { kind, tolerances, traces, flags, margin }
}

/// Zeros of each trace located on its Hermite interpolant, with `|f'|` there.
/// A zero is degenerate when `|f'| < deriv_tol`.
pub fn nodal_regularity_scan(traces: &[BoundaryTrace], zero_tol: f64, deriv_tol: f64) -> ScanReport {
    let tol = ScanTolerances { zero_tol, deriv_tol, ..Default::default() };
    let scans = traces
        .iter()
        .map(|t| {
            let zeros = scan_zeros(t, &tol);
            let min_slope = min_of(zeros.iter().map(|z| z.slope));
            let flagged = zeros.iter().any(|z| z.degenerate);
            TraceScan { index: t.index, loop_id: t.loop_id, zeros, critical_points: Vec::new(), min_slope, min_curvature: None, flagged }
        })
        .collect();
    report(ScanKind::Zeros, tol, scans)
}

/// Critical points of each trace with `|f''|` there; degenerate when
/// `|f''| < second_deriv_tol`.
pub fn morse_scan(traces: &[BoundaryTrace], deriv_tol: f64, second_deriv_tol: f64) -> ScanReport {
    let tol = ScanTolerances { deriv_tol, second_deriv_tol, ..Default::default() };
    let scans = traces
        .iter()
        .map(|t| {
            let critical_points = scan_critical(t, &tol);
            let min_curvature = min_of(critical_points.iter().map(|c| c.curvature));
            let flagged = critical_points.iter().any(|c| c.degenerate);
            TraceScan { index: t.index, loop_id: t.loop_id, zeros: Vec::new(), critical_points, min_slope: None, min_curvature, flagged }
        })
        .collect();
    report(ScanKind::CriticalPoints, tol, scans)
}

/// Maximal run of nodes with `|f| < vanish_tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VanishingArc {
    pub start: f64,
    pub end: f64,
    pub length: f64,
    pub whole_loop: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WucpReport {
    pub index: usize,
    pub loop_id: usize,
    pub arc_fraction: f64,
    pub vanish_tol: f64,
    /// longest vanishing arc as a fraction of the loop length
    pub longest_fraction: f64,
    /// arcs longer than `arc_fraction · length`
    pub arcs: Vec<VanishingArc>,
    pub flagged: bool,
}

/// Arcs of `g`-length above `arc_fraction · length` on which `|f| < vanish_tol`
/// at every node.
pub fn wucp_check(trace: &BoundaryTrace, arc_fraction: f64, vanish_tol: f64) -> WucpReport {
    let n = trace.s.len();
    let small: Vec<bool> = trace.values.iter().map(|v| v.abs() < vanish_tol).collect();
    let mut runs = Vec::new();
    if small.iter().all(|&b| b) {
        runs.push(VanishingArc { start: 0.0, end: trace.length, length: trace.length, whole_loop: true });
    } else if let Some(first) = small.iter().position(|&b| !b) {
        let mut j = 0;
        while j < n {
            let idx = (first + j) % n;
            if !small[idx] {
                j += 1;
                continue;
            }
            let a = idx;
            let mut b = idx;
            while j + 1 < n && small[(first + j + 1) % n] {
                j += 1;
                b = (first + j) % n;
            }
            let mut length = trace.s[b] - trace.s[a];
            if length < 0.0 {
                length += trace.length;
            }
            runs.push(VanishingArc { start: trace.s[a], end: trace.s[b], length, whole_loop: false });
            j += 1;
        }
    }
    let longest = runs.iter().map(|r| r.length).fold(0.0, f64::max);
    let arcs: Vec<VanishingArc> = runs.into_iter().filter(|r| r.length > arc_fraction * trace.length).collect();
    WucpReport {
        index: trace.index,
        loop_id: trace.loop_id,
        arc_fraction,
        vanish_tol,
        longest_fraction: longest / trace.length,
        flagged: !arcs.is_empty(),
        arcs,
    }
}
