use serde::Serialize;
use steklov_core::genericity::{
    morse_scan, nodal_regularity_scan, sample_trial, synthetic_cubic_flat, synthetic_tangent_zero, synthetic_zero,
    wucp_check, ScanReport, SimplicityRecord, SimplicityStats, Trial, WucpReport,
};
use steklov_core::geometry::ConformalSampler;
use steklov_core::steklov::BoundaryTrace;

use super::Context;
use crate::config::{ExperimentConfig, SyntheticTrace, Tolerances};
use crate::error::LabResult;
use crate::output::Artifacts;
use crate::pool::ordered_map;
use crate::svg::{Mark, Plot, Series};

/// One perturbed-metric trial (one JSONL line).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub sampler: ConformalSampler,
    pub simplicity: SimplicityRecord,
    pub zeros: ScanReport,
    pub critical: ScanReport,
    pub wucp: Vec<WucpReport>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WucpRecord {
    pub seed: u64,
    pub sampler: ConformalSampler,
    pub vanish_tol: f64,
    pub arc_fraction: f64,
    pub reports: Vec<WucpReport>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub trial: u64,
    pub eigen_index: usize,
    pub eigenvalue: f64,
    pub cluster_size: usize,
    /// relative distance to the nearest other eigenvalue
    pub min_gap: f64,
    pub min_slope_at_zeros: Option<f64>,
    pub min_curvature_at_critical: Option<f64>,
    pub flags: String,
}

fn seeds(ctx: &Context) -> Vec<u64> {
    let p = &ctx.config.perturbation;
    (0..p.trials as u64).map(|i| p.seed.wrapping_add(i)).collect()
}

fn trial(ctx: &Context, mesh: &steklov_core::geometry::Mesh, seed: u64) -> LabResult<Trial> {
    let cfg = &ctx.config;
    let p = &cfg.perturbation;
    log::debug!("trial seed {seed}");
    Ok(sample_trial(mesh, &cfg.metric, p.sampler(), seed, p.eigenfunctions, cfg.tolerances.gap_tol, cfg.assembly)?)
}

fn wucp_all(traces: &[BoundaryTrace], tol: &Tolerances) -> Vec<WucpReport> {
    traces.iter().map(|t| wucp_check(t, tol.arc_fraction, tol.vanish_tol)).collect()
}

fn aggregate(t: &Trial, rec: &TrialRecord) -> Vec<AggregateRow> {
    let ev = &t.spectrum.eigenvalues;
    let z = rec.simplicity.zero_modes;
    (0..rec.simplicity.eigenvalues.len())
        .map(|k| {
            let n = z + k;
            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
            let below = if n > 0 { rel(ev[n], ev[n - 1]) } else { f64::INFINITY };
            let above = if n + 1 < ev.len() { rel(ev[n], ev[n + 1]) } else { f64::INFINITY };
            let zs = rec.zeros.traces.iter().filter(|s| s.index == n);
            let cs = rec.critical.traces.iter().filter(|s| s.index == n);
            let min_slope = zs.clone().filter_map(|s| s.min_slope).reduce(f64::min);
            let min_curv = cs.clone().filter_map(|s| s.min_curvature).reduce(f64::min);
            let mut flags = Vec::new();
            if rec.simplicity.cluster_sizes[k] > 1 {
                flags.push("multiple");
            }
            if zs.clone().any(|s| s.flagged) {
                flags.push("zero");
            }
            if cs.clone().any(|s| s.flagged) {
                flags.push("critical");
            }
            if rec.wucp.iter().any(|w| w.index == n && w.flagged) {
                flags.push("vanishing_arc");
            }
            AggregateRow {
                trial: rec.seed,
                eigen_index: n,
                eigenvalue: ev[n],
                cluster_size: rec.simplicity.cluster_sizes[k],
                min_gap: below.min(above),
                min_slope_at_zeros: min_slope,
                min_curvature_at_critical: min_curv,
                flags: flags.join("|"),
            }
        })
        .collect()
}

fn synthetic_trace(kind: SyntheticTrace) -> BoundaryTrace {
    match kind {
        SyntheticTrace::TangentZero => synthetic_tangent_zero(256),
        SyntheticTrace::CubicFlat => synthetic_cubic_flat(256, 0.7),
        SyntheticTrace::Zero => synthetic_zero(256),
    }
}

#[derive(Serialize)]
struct SyntheticReport<'a> {
    config: &'a ExperimentConfig,
    fixture: SyntheticTrace,
    zeros: ScanReport,
    critical: ScanReport,
    wucp: WucpReport,
    /// the scan that should fire on this fixture did
    detected: bool,
}

fn run_synthetic(ctx: &Context, kind: SyntheticTrace, name: &str) -> LabResult<Artifacts> {
    let tol = &ctx.config.tolerances;
    let t = synthetic_trace(kind);
    let zeros = nodal_regularity_scan(std::slice::from_ref(&t), tol.zero_tol, tol.deriv_tol);
    let critical = morse_scan(std::slice::from_ref(&t), tol.deriv_tol, tol.second_deriv_tol);
    let wucp = wucp_check(&t, tol.arc_fraction, tol.vanish_tol);
    let detected = match kind {
        SyntheticTrace::TangentZero => zeros.flags > 0,
        SyntheticTrace::CubicFlat => critical.flags > 0,
        SyntheticTrace::Zero => wucp.flagged,
    };
    let mut out = Artifacts::default();
    if !detected {
        out.violation(format!("degenerate fixture {kind:?} was not flagged"));
    }
    out.summary = format!("fixture {kind:?}: {}", if detected { "flagged" } else { "NOT flagged" });
    if ctx.config.output.svg {
        out.add("trace.svg", trace_plot(&t, &zeros, &critical).into_bytes());
    }
    out.json(name, &SyntheticReport { config: &ctx.config, fixture: kind, zeros, critical, wucp, detected })?;
    Ok(out)
}

fn trace_plot(t: &BoundaryTrace, zeros: &ScanReport, critical: &ScanReport) -> String {
    let mut curve: Vec<(f64, f64)> = t.s.iter().copied().zip(t.values.iter().copied()).collect();
    curve.push((t.length, t.values[0]));
    let z: Vec<(f64, f64)> = zeros.traces.iter().flat_map(|s| s.zeros.iter().map(|p| (p.s, 0.0))).collect();
    let c: Vec<(f64, f64)> = critical
        .traces
        .iter()
        .flat_map(|s| s.critical_points.iter())
        .map(|p| {
            // nearest nodal value marks the height
            let j = t.s.iter().enumerate().min_by(|a, b| (a.1 - p.s).abs().total_cmp(&(b.1 - p.s).abs())).map_or(0, |x| x.0);
            (p.s, t.values[j])
        })
        .collect();
    Plot::new(&format!("Boundary trace {} (loop {})", t.index, t.loop_id), "arclength s", "f / sup|f|")
        .with(Series::new("trace", curve, Mark::Line))
        .with(Series::new("zeros", z, Mark::Circle))
        .with(Series::new("critical points", c, Mark::Square))
        .render()
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    config: &'a ExperimentConfig,
    trials: usize,
    fully_simple: usize,
    fraction_simple: f64,
    failing_seeds: Vec<u64>,
    min_gap: f64,
    zero_flags: usize,
    critical_flags: usize,
    vanishing_arc_flags: usize,
    /// smallest `min |f'| / deriv_tol` over all zeros of all trials
    zero_margin: Option<f64>,
    /// smallest `min |f''| / second_deriv_tol` over all critical points
    critical_margin: Option<f64>,
    longest_vanishing_fraction: f64,
    violations: &'a [String],
}

pub fn cmd_scan(ctx: &Context) -> LabResult<Artifacts> {
    if let Some(kind) = ctx.config.perturbation.synthetic {
        return run_synthetic(ctx, kind, "scan.json");
    }
    let cfg = &ctx.config;
    let tol = cfg.tolerances;
    let mesh = cfg.mesh(&ctx.base_dir)?;
    let m = cfg.perturbation.eigenfunctions;
    let sampler = cfg.perturbation.sampler();
    let results = ordered_map(ctx.threads, &seeds(ctx), |&seed| {
        let t = trial(ctx, &mesh, seed)?;
        let traces = t.traces(m)?;
        let zeros = nodal_regularity_scan(&traces, tol.zero_tol, tol.deriv_tol);
        let critical = morse_scan(&traces, tol.deriv_tol, tol.second_deriv_tol);
        let wucp = wucp_all(&traces, &tol);
        let simplicity = t.record(m);
        let flagged = !simplicity.all_simple || zeros.flags > 0 || critical.flags > 0 || wucp.iter().any(|w| w.flagged);
        let rec = TrialRecord { seed, sampler, simplicity, zeros, critical, wucp, flagged };
        let rows = aggregate(&t, &rec);
        let svg = (seed == cfg.perturbation.seed && cfg.output.svg)
            .then(|| trace_plot(&traces[0], &scan_of(&rec.zeros, 0), &scan_of(&rec.critical, 0)));
        Ok((rec, rows, svg))
    })?;

    let mut out = Artifacts::default();
    let mut records = Vec::with_capacity(results.len());
    let mut rows = Vec::new();
    for (rec, r, svg) in results {
        if let Some(svg) = svg {
            out.add("trace.svg", svg.into_bytes());
        }
        rows.extend(r);
        records.push(rec);
    }
    let stats = SimplicityStats::from_records(records.iter().map(|r| r.simplicity.clone()).collect());
    let zero_flags = records.iter().map(|r| r.zeros.flags).sum();
    let critical_flags = records.iter().map(|r| r.critical.flags).sum();
    let vanishing_arc_flags = records.iter().flat_map(|r| &r.wucp).filter(|w| w.flagged).count();
    for r in records.iter().filter(|r| r.flagged) {
        out.violation(format!(
            "seed {}: cluster sizes {:?}, min gap {:.3e}, zero flags {}, critical flags {}, vanishing arcs {}",
            r.seed,
            r.simplicity.cluster_sizes,
            r.simplicity.min_gap,
            r.zeros.flags,
            r.critical.flags,
            r.wucp.iter().filter(|w| w.flagged).count()
        ));
    }
    let summary = ScanSummary {
        config: cfg,
        trials: stats.trials,
        fully_simple: stats.fully_simple,
        fraction_simple: stats.fraction,
        failing_seeds: stats.failing_seeds.clone(),
        min_gap: stats.min_gap,
        zero_flags,
        critical_flags,
        vanishing_arc_flags,
        zero_margin: records.iter().filter_map(|r| r.zeros.margin).reduce(f64::min),
        critical_margin: records.iter().filter_map(|r| r.critical.margin).reduce(f64::min),
        longest_vanishing_fraction: records.iter().flat_map(|r| &r.wucp).map(|w| w.longest_fraction).fold(0.0, f64::max),
        violations: &[],
    };
    out.summary = format!(
        "{}/{} trials fully simple, flags: zero {}, critical {}, vanishing arc {}",
        stats.fully_simple, stats.trials, zero_flags, critical_flags, vanishing_arc_flags
    );
    out.jsonl("trials.jsonl", &records)?;
    out.csv("aggregate.csv", &rows)?;
    let violations = out.violations.clone();
    out.json("summary.json", &ScanSummary { violations: &violations, ..summary })?;
    Ok(out)
}

fn scan_of(r: &ScanReport, i: usize) -> ScanReport {
    ScanReport { traces: r.traces.get(i).cloned().into_iter().collect(), ..r.clone() }
}

#[derive(Serialize)]
struct WucpSummary<'a> {
    config: &'a ExperimentConfig,
    trials: usize,
    flagged_traces: usize,
    longest_vanishing_fraction: f64,
    violations: &'a [String],
}

pub fn cmd_wucp(ctx: &Context) -> LabResult<Artifacts> {
    if let Some(kind) = ctx.config.perturbation.synthetic {
        return run_synthetic(ctx, kind, "wucp.json");
    }
    let cfg = &ctx.config;
    let tol = cfg.tolerances;
    let mesh = cfg.mesh(&ctx.base_dir)?;
    let m = cfg.perturbation.eigenfunctions;
    let sampler = cfg.perturbation.sampler();
    let records = ordered_map(ctx.threads, &seeds(ctx), |&seed| {
        let t = trial(ctx, &mesh, seed)?;
        let reports = wucp_all(&t.traces(m)?, &tol);
        let flagged = reports.iter().any(|w| w.flagged);
        Ok(WucpRecord { seed, sampler, vanish_tol: tol.vanish_tol, arc_fraction: tol.arc_fraction, reports, flagged })
    })?;
    let mut out = Artifacts::default();
    let flagged_traces = records.iter().flat_map(|r| &r.reports).filter(|w| w.flagged).count();
    for r in records.iter().filter(|r| r.flagged) {
        for w in r.reports.iter().filter(|w| w.flagged) {
            out.violation(format!("seed {}: eigenfunction {} vanishes on {:?}", r.seed, w.index, w.arcs));
        }
    }
    let longest = records.iter().flat_map(|r| &r.reports).map(|w| w.longest_fraction).fold(0.0, f64::max);
    out.summary = format!("{} trials, {flagged_traces} traces with vanishing arcs, longest {:.3e} of a loop", records.len(), longest);
    out.jsonl("wucp.jsonl", &records)?;
    let violations = out.violations.clone();
    out.json(
        "summary.json",
        &WucpSummary { config: cfg, trials: records.len(), flagged_traces, longest_vanishing_fraction: longest, violations: &violations },
    )?;
    Ok(out)
}
