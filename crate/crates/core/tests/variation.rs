use steklov_core::assembly::{assemble_stiffness_derivative, harmonic_extension, assemble_stiffness};
use steklov_core::geometry::{
    generate_disk_mesh, refine, sample_random_conformal, MetricField, PerturbationDirection, ScalarField, TensorField,
};
use steklov_core::linalg::{dot, max_abs};
use steklov_core::quadrature::TriangleRule;
use steklov_core::steklov::{steklov_eigs, SteklovSystem};
use steklov_core::variation::{
    density_identity_residual, evaluate_dg_laplacian, fd_convergence, finite_difference_dtn,
    laplace_beltrami, metric_jet, variation_of_harmonic_extension, MetricDerivative, ScalarJet,
};

fn disk(h: f64) -> SteklovSystem {
    SteklovSystem::new(generate_disk_mesh(1.0, h).unwrap(), MetricField::Euclidean, Default::default()).unwrap()
}

fn cos_theta(sys: &SteklovSystem) -> Vec<f64> {
    sys.mesh.boundary_vertices().iter().map(|&v| sys.mesh.vertices()[v][0]).collect()
}

#[test]
fn conformal_closed_form_holds_nodewise() {
    let sys = SteklovSystem::new(
        generate_disk_mesh(1.0, 0.1).unwrap(),
        MetricField::conformal(ScalarField::linear(0.0, 0.2, -0.1)),
        Default::default(),
    )
    .unwrap();
    let spec = steklov_eigs(&sys.dtn, 12).unwrap();
    let verts = sys.mesh.vertices();
    let bverts = sys.mesh.boundary_vertices();
    for seed in 0..3 {
        let dir = sample_random_conformal(seed, 3, 0.1);
        let d = MetricDerivative::new(&sys, &dir).unwrap();
        assert!(d.dk.matrix.max_abs() <= 1e-14);
        let sigma = dir.sigma().unwrap();
        for n in 1..12 {
            let f = spec.vector(n);
            let lam = spec.eigenvalues[n];
            let r = steklov_core::variation::dtn_variation_with(&sys, &d, &f);
            assert!(max_abs(&r.v.values) == 0.0);
            for (k, &b) in bverts.iter().enumerate() {
                let expect = -0.5 * sigma.value(verts[b]) * lam * f[k];
                assert!((r.dlf[k] - expect).abs() <= 1e-10 * lam * max_abs(&f));
            }
        }
    }
}

#[test]
fn harmonic_extension_variation_matches_central_difference() {
    let sys = disk(0.1);
    let h = PerturbationDirection::general(TensorField::diagonal(ScalarField::linear(0.0, 1.0, 0.0), ScalarField::zero()));
    let f = cos_theta(&sys);
    let d = MetricDerivative::new(&sys, &h).unwrap();
    let v = variation_of_harmonic_extension(&sys, &d, &f);
    let t = 1e-5;
    let up = |s: f64| {
        let k = assemble_stiffness(&sys.mesh, &sys.metric.shifted(&h, s), 2).unwrap();
        harmonic_extension(&k, &f).unwrap().values
    };
    let (a, b) = (up(t), up(-t));
    let fd: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * t)).collect();
    let err: Vec<f64> = fd.iter().zip(&v.values).map(|(x, y)| x - y).collect();
    // mass-weighted norm through the stiffness-free vertex lumping of areas
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    assert!(norm(&err) <= 1e-7 * norm(&v.values), "{:e}", norm(&err) / norm(&v.values));
}

#[test]
fn general_direction_fd_is_second_order() {
    let sys = disk(0.1);
    let f = cos_theta(&sys);
    let dirs = [
        TensorField::diagonal(ScalarField::linear(0.0, 1.0, 0.0), ScalarField::linear(0.0, -1.0, 0.0)),
        TensorField { xx: ScalarField::zero(), xy: ScalarField::linear(0.2, 0.5, 0.5), yy: ScalarField::zero() },
    ];
    for t in dirs {
        let study = fd_convergence(&sys, &PerturbationDirection::general(t), &f, &[1e-3, 5e-4, 2.5e-4]).unwrap();
        for row in &study.rows[1..] {
            let order = row.order.unwrap();
            assert!((order - 2.0).abs() <= 0.2, "{study:?}");
        }
        assert!(study.rows[2].mismatch < 1e-6, "{study:?}");
        assert!(study.richardson_mismatch.unwrap() < study.rows[2].mismatch);
    }
}

#[test]
fn constant_conformal_fd_is_rigid_scaling() {
    let sys = disk(0.15);
    let spec = steklov_eigs(&sys.dtn, 4).unwrap();
    let f = spec.vector(1);
    let fd = finite_difference_dtn(
        &sys.mesh,
        &sys.metric,
        &PerturbationDirection::conformal(ScalarField::constant(1.0)),
        &f,
        1e-4,
        sys.options,
    )
    .unwrap();
    let l = spec.eigenvalues[1];
    for (a, b) in fd.iter().zip(&f) {
        assert!((a + 0.5 * l * b).abs() < 1e-7);
    }
}

#[test]
fn density_identity_in_two_dimensions() {
    let sys = disk(0.1);
    let spec = steklov_eigs(&sys.dtn, 8).unwrap();
    for seed in 0..4u64 {
        let sigma = sample_random_conformal(seed, 2, 0.3).sigma().unwrap().clone();
        let psi: Vec<f64> = (0..spec.dimension).map(|i| ((i as u64 * 31 + seed * 17) % 13) as f64 - 6.0).collect();
        for n in 1..6 {
            let d = density_identity_residual(&sys, spec.eigenvalues[n], &spec.vector(n), &psi, &sigma).unwrap();
            assert!(d.residual <= 1e-10 * d.scale, "{d:?}");
        }
    }
    // σ = x, ψ = f = cos θ/√π: both sides vanish
    let f = spec.vector(1);
    let d = density_identity_residual(&sys, spec.eigenvalues[1], &f, &f, &ScalarField::linear(0.0, 1.0, 0.0)).unwrap();
    assert!(d.lhs.abs() < 1e-10 && d.rhs.abs() < 1e-10, "{d:?}");
    let zero = density_identity_residual(&sys, spec.eigenvalues[1], &f, &f, &ScalarField::zero()).unwrap();
    assert_eq!(zero.residual, 0.0);
    assert!(density_identity_residual(&sys, 0.0, &f, &f, &ScalarField::zero()).is_err());
}

/// The weak derivative `w_Iᵀ DK u_I` against the coordinate formula:
/// `DK[u, w] = −∫ [D_g(Δ)u + ½ tr_g(h) Δ_g u] w dV_g` for `w = 0` on the boundary.
#[test]
fn weak_derivative_agrees_with_coordinate_formula() {
    let metric = MetricField::conformal(ScalarField::linear(0.0, 0.2, 0.1));
    let h = PerturbationDirection::general(TensorField {
        xx: ScalarField::linear(0.5, 1.0, 0.0),
        xy: ScalarField::linear(0.0, 0.3, -0.2),
        yy: ScalarField::polynomial(&[(0.2, 0, 0), (1.0, 0, 2)]),
    });
    // u = x³ − xy² + y, w = 1 − x² − y²
    let u = |p: [f64; 2]| {
        let (x, y) = (p[0], p[1]);
        ScalarJet::new(x * x * x - x * y * y + y, &[3.0 * x * x - y * y, -2.0 * x * y + 1.0], &[&[6.0 * x, -2.0 * y], &[-2.0 * y, -2.0 * x]])
    };
    let w = |p: [f64; 2]| 1.0 - p[0] * p[0] - p[1] * p[1];
    let rule = TriangleRule::of_order(4).unwrap();
    let mut mesh = generate_disk_mesh(1.0, 0.2).unwrap();
    let mut errs = Vec::new();
    for _ in 0..3 {
        let dk = assemble_stiffness_derivative(&mesh, &metric, &h, 4).unwrap();
        let ui: Vec<f64> = mesh.vertices().iter().map(|&p| u(p).value).collect();
        let wi: Vec<f64> = mesh.vertices().iter().map(|&p| w(p)).collect();
        let weak = dot(&wi, &dk.matrix.mul_vec(&ui));
        let mut strong = 0.0;
        for t in 0..mesh.triangles().len() {
            let area = mesh.triangle_area(t);
            for (p, wt) in rule.map(mesh.triangle_coords(t)) {
                let g = metric.eval(p);
                let hv = h.materialize(&metric, p);
                let tr = g.inverse().trace_product(&hv);
                let jet = u(p);
                let lap = laplace_beltrami(&metric_jet(&metric, p), &jet);
                let dlap = evaluate_dg_laplacian(&metric, &h, &jet, p);
                strong -= wt * area * (dlap + 0.5 * tr * lap) * w(p) * g.det().sqrt();
            }
        }
        errs.push((weak - strong).abs() / strong.abs());
        mesh = refine(&mesh).unwrap();
    }
    assert!(errs[2] < 5e-3, "{errs:?}");
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.8, "{errs:?}");
    }
}
