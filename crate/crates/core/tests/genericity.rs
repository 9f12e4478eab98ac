use steklov_core::genericity::{
    morse_scan, nodal_regularity_scan, sample_trial, simplicity_record, simplicity_scan, splitting_experiment,
    splitting_matrix, sup_normalized, synthetic_cubic_flat, synthetic_tangent_zero, synthetic_zero, wucp_check,
    ScanTolerances, SplitOptions,
};
use steklov_core::geometry::{generate_disk_mesh, ConformalSampler, MetricField, PerturbationDirection, ScalarField};
use steklov_core::steklov::{extract_trace, steklov_eigs, SteklovSystem};

fn disk(h: f64) -> SteklovSystem {
    SteklovSystem::new(generate_disk_mesh(1.0, h).unwrap(), MetricField::Euclidean, Default::default()).unwrap()
}

// r² cos 2θ: equals cos 2θ on the unit circle
fn cos2() -> PerturbationDirection {
    PerturbationDirection::conformal(ScalarField::harmonic_cos(2))
}

#[test]
fn disk_pair_splits_at_half_rate() {
    let sys = disk(0.05);
    let spec = steklov_eigs(&sys.dtn, 6).unwrap();
    let c = spec.cluster_of(1).unwrap();
    assert_eq!(c, 1..3);
    let p = splitting_matrix(&sys, &spec, c.clone(), &cos2()).unwrap();
    // canonical basis is cos θ, sin θ
    assert!((p[(0, 0)] + 0.25).abs() < 5e-3 && (p[(1, 1)] - 0.25).abs() < 5e-3, "{p}");
    assert!(p[(0, 1)].abs() < 1e-10);
    let r = splitting_experiment(&sys, &spec, c, &cos2(), &[1e-2, 5e-3, 2.5e-3], SplitOptions::default()).unwrap();
    let (_, rate) = *r.gap_rates().last().unwrap();
    assert!((rate - 0.5).abs() <= 0.01, "{:?}", r.gap_rates());
    for o in &r.residual_order {
        assert!((o.unwrap() - 2.0).abs() <= 0.2, "{:?}", r.residual_order);
    }
    assert!(r.split && r.skipped.is_empty());
}

#[test]
fn rigid_and_zero_directions_do_not_split() {
    let sys = disk(0.1);
    let spec = steklov_eigs(&sys.dtn, 6).unwrap();
    let c = spec.cluster_of(3).unwrap();
    let lam = r_mean(&spec.eigenvalues[c.clone()]);
    let one = PerturbationDirection::conformal(ScalarField::constant(1.0));
    let r = splitting_experiment(&sys, &spec, c.clone(), &one, &[1e-2, 5e-3], SplitOptions::default()).unwrap();
    assert!(!r.split);
    for s in &r.slopes {
        assert!((s + lam / 2.0).abs() < 1e-10 * lam);
    }
    for step in &r.steps {
        for b in &step.branches {
            assert!((b - lam / (1.0 + step.t).sqrt()).abs() < 1e-10 * lam);
        }
    }
    for o in &r.residual_order {
        assert!((o.unwrap() - 2.0).abs() < 0.05);
    }
    let z = splitting_experiment(&sys, &spec, c, &PerturbationDirection::zero(), &[1e-2], SplitOptions::default()).unwrap();
    assert!(z.slopes.iter().all(|&s| s == 0.0));
    assert!(z.steps[0].residuals.iter().all(|&r| r <= 1e-12 * lam));
    assert!(z.residual_order.iter().all(Option::is_none));
    assert!(!z.split);
}

fn r_mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[test]
fn splitting_slopes_are_basis_invariant_and_linear() {
    let sys = disk(0.1);
    let mut spec = steklov_eigs(&sys.dtn, 8).unwrap();
    let c = spec.cluster_of(1).unwrap();
    let h = PerturbationDirection::conformal(ScalarField::polynomial(&[(0.1, 0, 0), (0.3, 2, 0), (-0.2, 1, 1), (0.5, 2, 1)]));
    let eig = |m: nalgebra::DMatrix<f64>| {
        let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let e = eig(splitting_matrix(&sys, &spec, c.clone(), &h).unwrap());
    assert!(e[1] - e[0] > 1e-3, "{e:?}");
    let e3 = eig(splitting_matrix(&sys, &spec, c.clone(), &h.scaled(3.0)).unwrap());
    for (a, b) in e.iter().zip(&e3) {
        assert!((3.0 * a - b).abs() < 1e-12 * b.abs().max(1.0));
    }
    // re-rotate the cluster basis
    let (ca, sa) = (0.4f64.cos(), 0.4f64.sin());
    let q = nalgebra::DMatrix::from_row_slice(2, 2, &[ca, -sa, sa, ca]);
    let block = spec.eigenvectors.columns(c.start, 2).into_owned() * q;
    spec.eigenvectors.columns_mut(c.start, 2).copy_from(&block);
    let p = splitting_matrix(&sys, &spec, c.clone(), &h).unwrap();
    assert!(p[(0, 1)].abs() > 1e-3);
    for (a, b) in e.iter().zip(&eig(p)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn unperturbed_disk_has_five_double_clusters() {
    let sys = disk(0.1);
    let spec = steklov_eigs(&sys.dtn, 12).unwrap();
    let rec = simplicity_record(0, &spec, 10);
    assert_eq!(rec.zero_modes, 1);
    assert_eq!(rec.cluster_sizes, [2; 10]);
    assert!(!rec.all_simple);
}

#[test]
fn constant_sigma_keeps_multiplicities() {
    let mesh = generate_disk_mesh(1.0, 0.1).unwrap();
    let sys = SteklovSystem::new(
        mesh.clone(),
        steklov_core::genericity::perturbed_metric(&MetricField::Euclidean, &ScalarField::constant(0.1)),
        Default::default(),
    )
    .unwrap();
    let rec = simplicity_record(0, &steklov_eigs(&sys.dtn, 12).unwrap(), 10);
    assert_eq!(rec.cluster_sizes, [2; 10]);
}

#[test]
fn seeded_trials_split_everything_and_are_reproducible() {
    let mesh = generate_disk_mesh(1.0, 0.1).unwrap();
    let sampler = ConformalSampler { modes: 3, amplitude: 0.1 };
    let stats = simplicity_scan(&mesh, &MetricField::Euclidean, sampler, 7, 5, 10, 1e-6, Default::default()).unwrap();
    assert_eq!(stats.fraction, 1.0, "{:?}", stats.failing_seeds);
    let again = simplicity_scan(&mesh, &MetricField::Euclidean, sampler, 7, 5, 10, 1e-6, Default::default()).unwrap();
    assert_eq!(stats, again);

    let trial = sample_trial(&mesh, &MetricField::Euclidean, sampler, 7, 10, 1e-6, Default::default()).unwrap();
    assert_eq!(trial.record(10), stats.records[0]);
    let traces = trial.traces(10).unwrap();
    assert_eq!(traces.len(), 10);
    let tol = ScanTolerances::default();
    assert_eq!(nodal_regularity_scan(&traces, tol.zero_tol, tol.deriv_tol).flags, 0);
    assert_eq!(morse_scan(&traces, tol.deriv_tol, tol.second_deriv_tol).flags, 0);
    assert!(traces.iter().all(|t| !wucp_check(t, 0.05, 1e-8).flagged));
}

#[test]
fn disk_traces_pass_scans_with_margin() {
    let sys = disk(0.05);
    let spec = steklov_eigs(&sys.dtn, 11).unwrap();
    let traces: Vec<_> = (1..11)
        .map(|n| sup_normalized(&extract_trace(&spec, n, &sys.mesh, &sys.metric).unwrap()[0]))
        .collect();
    let tol = ScanTolerances::default();
    let z = nodal_regularity_scan(&traces, tol.zero_tol, tol.deriv_tol);
    let c = morse_scan(&traces, tol.deriv_tol, tol.second_deriv_tol);
    assert_eq!((z.flags, c.flags), (0, 0));
    assert!(z.margin.unwrap() >= 100.0 && c.margin.unwrap() >= 100.0, "{:?} {:?}", z.margin, c.margin);
    // mode k has 2k zeros and 2k critical points
    for (i, t) in z.traces.iter().enumerate() {
        assert_eq!(t.zeros.len(), 2 * (i / 2 + 1));
        assert_eq!(c.traces[i].critical_points.len(), 2 * (i / 2 + 1));
    }
    let tol = ScanTolerances::default();
    assert_eq!(nodal_regularity_scan(&[synthetic_tangent_zero(200)], tol.zero_tol, tol.deriv_tol).flags, 1);
    assert_eq!(morse_scan(&[synthetic_cubic_flat(200, 0.7)], tol.deriv_tol, tol.second_deriv_tol).flags, 1);
    assert!(wucp_check(&synthetic_zero(200), 0.05, 1e-8).flagged);
}
