use hypercurv_core::fields::{FieldRegistry, Polynomial};
use hypercurv_core::graphgeo::{curvature_at, mean_curvature, principal_curvatures, shape_operator};
use hypercurv_core::levelset::{
    hhr_check, level_mean_curvature, sample_level_points, trace_level, LevelPoint, Orientation,
    ProjectionOptions, Region, SamplePlan, DEFAULT_GRAD_FLOOR,
};
use hypercurv_core::{jet_at, Jet2, JetScheme, ScalarField};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A field with no analytic handles, so jets come from finite differences.
struct Ripple;

impl ScalarField for Ripple {
    fn name(&self) -> String {
        "ripple".into()
    }
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, x: &[f64]) -> f64 {
        x[0].sin() * x[1].cos() + x[0] * x[2] * x[2] - 0.3 * x[1] * x[2]
    }
}

fn jets(max_n: usize, grad: f64) -> impl Strategy<Value = Jet2> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(-grad..grad, n),
            prop::collection::vec(-3.0f64..3.0, n * n),
        )
            .prop_map(move |(df, h)| {
                Jet2::new(DVector::zeros(n), 0.0, DVector::from_vec(df), DMatrix::from_row_slice(n, n, &h)).unwrap()
            })
    })
}

fn orthogonal(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_row_slice(n, n, entries) + DMatrix::identity(n, n) * 0.1;
    m.qr().q()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gauss_equation_holds(jet in jets(6, 3.0)) {
        let c = curvature_at(&jet).unwrap();
        let a = shape_operator(&jet);
        let via_trace = c.h * c.h - (&a * &a).trace();
        prop_assert!((c.r - via_trace).abs() <= 1e-9 * c.scale().max(1.0));
        prop_assert!((c.h - mean_curvature(&jet)).abs() <= 1e-12 * c.scale().sqrt().max(1.0));
    }

    #[test]
    fn negating_the_graph_flips_odd_sigmas(jet in jets(6, 3.0)) {
        let up = curvature_at(&jet).unwrap();
        let down = curvature_at(&jet.negated()).unwrap();
        for (k, (a, b)) in up.sigmas.iter().zip(&down.sigmas).enumerate() {
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            prop_assert!((a - sign * b).abs() <= 1e-10 * (1.0 + a.abs()), "σ_{}: {} vs {}", k, a, b);
        }
    }

    #[test]
    fn rotating_the_hyperplane_keeps_principal_curvatures(
        (jet, q) in jets(5, 3.0).prop_flat_map(|j| {
            let n = j.dim();
            (Just(j), prop::collection::vec(-1.0f64..1.0, n * n))
        })
    ) {
        let n = jet.dim();
        let q = orthogonal(n, &q);
        let before = principal_curvatures(&jet).unwrap();
        let after = principal_curvatures(&jet.rotated(&q)).unwrap();
        let size = before.iter().fold(1.0f64, |m, k| m.max(k.abs()));
        for (a, b) in sorted(before).iter().zip(sorted(after)) {
            prop_assert!((a - b).abs() <= 1e-10 * size);
        }
    }

    #[test]
    fn inequality_is_pointwise_and_orientation_free(jet in jets(6, 4.0)) {
        prop_assume!(jet.grad_norm() > 1e-3);
        let along = hhr_check(&jet, Orientation::AlongGradient, DEFAULT_GRAD_FLOOR).unwrap();
        let against = hhr_check(&jet, Orientation::AgainstGradient, DEFAULT_GRAD_FLOOR).unwrap();
        prop_assert!(along.gap >= -1e-9 * along.scale().max(1.0), "gap {}", along.gap);
        prop_assert_eq!(along.h_sigma, -against.h_sigma);
        prop_assert_eq!(along.cos_angle, -against.cos_angle);
        prop_assert_eq!((along.lhs, along.rhs, along.gap), (against.lhs, against.rhs, against.gap));
    }

    #[test]
    fn sharpened_inequality_when_scalar_curvature_is_nonnegative(jet in jets(5, 4.0)) {
        prop_assume!(jet.grad_norm() > 1e-3);
        let c = hhr_check(&jet, Orientation::AlongGradient, DEFAULT_GRAD_FLOOR).unwrap();
        prop_assume!(c.r >= 0.0);
        let n = jet.dim() as f64;
        let coupled = c.cos_angle * c.h_sigma;
        prop_assert!(c.lhs >= n / (2.0 * (n - 1.0)) * coupled * coupled - 1e-9 * c.scale().max(1.0));
    }
}

#[test]
fn analytic_and_finite_difference_jets_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        let p = Polynomial::random(&mut rng, n, 3, 0.3);
        for i in 0..10 {
            let x: Vec<f64> = (0..n).map(|j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.5).collect();
            let a = jet_at(&p, &x, JetScheme::Analytic).unwrap();
            let fd = jet_at(&p, &x, JetScheme::CentralFd { h: 1e-4 }).unwrap();
            assert!(a.df.amax() <= 10.0 && a.d2f.amax() <= 10.0);
            assert!((&a.df - &fd.df).amax() < 1e-6);
            assert!((&a.d2f - &fd.d2f).amax() < 1e-6);
        }
    }
}

#[test]
fn finite_difference_hessian_is_symmetric() {
    let jet = jet_at(&Ripple, &[0.3, -0.7, 1.1], JetScheme::default_fd(&[0.3, -0.7, 1.1])).unwrap();
    assert_eq!(jet.d2f, jet.d2f.transpose());
    assert!(jet_at(&Ripple, &[0.0; 3], JetScheme::Analytic).is_err());
}

#[test]
fn round_sphere_level_has_inward_curvature() {
    for n in 2..=5 {
        let expr = (1..=n).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join("+");
        let f = Polynomial::parse(&expr, Some(n)).unwrap();
        let mut x = vec![0.0; n];
        x[n - 1] = 0.7;
        let jet = jet_at(&f, &x, JetScheme::Analytic).unwrap();
        let h = level_mean_curvature(&jet, Orientation::AgainstGradient, DEFAULT_GRAD_FLOOR).unwrap();
        assert!((h - (n as f64 - 1.0) / 0.7).abs() < 1e-12);
    }
}

fn equality_corpus() -> Vec<LevelPoint> {
    let registry = FieldRegistry::with_builtins();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut points = Vec::new();
    for n in 2..=4 {
        let specs = [
            "hemisphere(1)".to_string(),
            "cylinder(1)".to_string(),
            "plane(0.2,1,0.5)".to_string(),
            "power(1,2)".to_string(),
            format!("poly({})", (1..=n).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join("+")),
        ];
        for spec in &specs {
            let spec = if spec.starts_with("plane") && n != 2 { "plane".to_string() } else { spec.clone() };
            let field = registry.build(&spec, Some(n)).unwrap();
            points.extend(sample_level_points(field.as_ref(), &SamplePlan::new(Region::cube(n, 0.6), 30), &mut rng));
        }
        for _ in 0..4 {
            let poly = Polynomial::random(&mut rng, n, 4, 1.0);
            points.extend(sample_level_points(&poly, &SamplePlan::new(Region::cube(n, 1.0), 30), &mut rng));
        }
    }
    points
}

#[test]
fn near_equality_forces_the_umbilic_pattern() {
    let corpus = equality_corpus();
    let equal: Vec<_> = corpus.iter().filter(|p| p.gap < 1e-9).collect();
    assert!(equal.len() > 100, "only {} equality points", equal.len());
    for p in &equal {
        assert!(p.diagnostics.umbilicity_defect < 1e-6, "{:?}", p.x);
        assert!(p.diagnostics.principal_cluster_defect < 1e-6, "{:?}", p.x);
    }
    assert!(corpus.iter().all(|p| p.gap >= -1e-9));
}

#[test]
fn flat_minimal_point_is_geodesic_for_both_surfaces() {
    for n in 2..=3 {
        let f = Polynomial::parse("x1 + x2^3", Some(n)).unwrap();
        let mut x = vec![0.0; n];
        x[0] = 0.4;
        if n == 3 {
            x[2] = -0.3;
        }
        let jet = jet_at(&f, &x, JetScheme::Analytic).unwrap();
        let check = hhr_check(&jet, Orientation::AlongGradient, DEFAULT_GRAD_FLOOR).unwrap();
        assert!(check.r >= 0.0 && check.h.abs() < 1e-15);
        assert!(check.h_sigma.abs() < 1e-6);
        assert!(principal_curvatures(&jet).unwrap().iter().all(|k| k.abs() < 1e-6));
    }
}

#[test]
fn traced_levels() {
    let registry = FieldRegistry::with_builtins();
    let opts = ProjectionOptions::default();
    let hemi = registry.build("hemisphere(1)", Some(2)).unwrap();
    let traced = trace_level(hemi.as_ref(), -0.8, &Region::cube(2, 1.0), 40, Orientation::AlongGradient, &opts).unwrap();
    assert!(traced.points.len() > 10);
    for p in &traced.points {
        assert!((DVector::from_column_slice(&p.x).norm() - 0.6).abs() < 1e-8);
        assert!((p.eta.norm() - 1.0).abs() < 1e-14);
    }
    let plane = registry.build("plane", Some(2)).unwrap();
    let empty = trace_level(plane.as_ref(), 1.0, &Region::cube(2, 1.0), 20, Orientation::AlongGradient, &opts).unwrap();
    assert!(empty.points.is_empty());
    let cubic = registry.build("cubic_sheet", Some(2)).unwrap();
    let near = trace_level(cubic.as_ref(), 1e-3, &Region::cube(2, 1.0), 20, Orientation::AlongGradient, &opts).unwrap();
    assert!(!near.points.is_empty());
    assert!(near.points.iter().all(|p| (p.x[1] - 0.1).abs() < 1e-8));
}
