use proptest::prelude::*;
use steklov_core::geometry::{generate_disk_mesh, refine, MetricField, ScalarField};
use steklov_core::linalg::{dot, CsrMatrix};
use steklov_core::steklov::{cluster_multiplicities, SteklovSystem};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triplets_sum_duplicates(entries in prop::collection::vec((0usize..6, 0usize..5, -10.0f64..10.0), 0..40)) {
        let m = CsrMatrix::from_triplets(6, 5, entries.clone());
        let mut dense = [[0.0f64; 5]; 6];
        for &(i, j, v) in &entries {
            dense[i][j] += v;
        }
        for (i, row) in dense.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                prop_assert!((m.get(i, j) - v).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn clusters_partition_sorted_values(mut v in prop::collection::vec(0.0f64..5.0, 0..30), tol in 1e-8f64..1e-2) {
        v.sort_by(f64::total_cmp);
        let c = cluster_multiplicities(&v, tol);
        let mut next = 0;
        for r in &c {
            prop_assert_eq!(r.start, next);
            prop_assert!(r.end > r.start);
            for i in r.start + 1..r.end {
                prop_assert!(v[i] - v[i - 1] <= tol * v[i - 1].abs().max(1.0));
            }
            next = r.end;
        }
        prop_assert_eq!(next, v.len());
        for w in c.windows(2) {
            let (a, b) = (w[0].end - 1, w[1].start);
            prop_assert!(v[b] - v[a] > tol * v[a].abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // Λ is symmetric in the M_b inner product, positive semidefinite and kills constants,
    // whatever the conformal factor.
    #[test]
    fn dtn_is_symmetric_nonnegative_with_constant_kernel(
        c in prop::collection::vec(-0.4f64..0.4, 3),
        f in prop::collection::vec(-1.0f64..1.0, 24),
        g in prop::collection::vec(-1.0f64..1.0, 24),
    ) {
        let metric = MetricField::conformal(ScalarField::linear(c[0], c[1], c[2]));
        let sys = SteklovSystem::new(generate_disk_mesh(1.0, 0.3).unwrap(), metric, Default::default()).unwrap();
        let nb = sys.dtn.num_boundary();
        let extend = |x: &[f64]| (0..nb).map(|i| x[i % x.len()] * (1.0 + i as f64 / nb as f64)).collect::<Vec<_>>();
        let (f, g) = (extend(&f), extend(&g));
        let (sf, sg) = (sys.dtn.apply_schur(&f), sys.dtn.apply_schur(&g));
        let scale = sys.dtn.schur_norm() * (dot(&f, &f) * dot(&g, &g)).sqrt();
        prop_assert!((dot(&sf, &g) - dot(&f, &sg)).abs() <= 1e-11 * scale);
        prop_assert!(dot(&sf, &f) >= -1e-12 * scale);
        let ones = vec![1.0; nb];
        let s1 = sys.dtn.apply_schur(&ones);
        prop_assert!(s1.iter().all(|x| x.abs() <= 1e-10 * sys.dtn.schur_norm()));
    }
}

#[test]
fn refinement_keeps_area_and_halves_h() {
    let m = generate_disk_mesh(1.0, 0.25).unwrap();
    let r = refine(&m).unwrap();
    assert!(r.check_invariants().is_ok());
    assert_eq!(r.num_boundary(), 2 * m.num_boundary());
    assert!((r.h_max() / m.h_max() - 0.5).abs() < 0.05);
    // boundary nodes are projected to the circle, so the area grows towards π
    assert!(r.total_area() > m.total_area() && r.total_area() < std::f64::consts::PI);
}
