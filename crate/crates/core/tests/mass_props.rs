use hypercurv_core::fields::FieldRegistry;
use hypercurv_core::mass::{boundary_mass_integral, mass_limit, pmt_decomposition, InnerBoundary, PmtOptions};
use hypercurv_core::numeric::pairwise_sum;
use hypercurv_core::quadrature::{sphere_area, sphere_rule, QuadratureSpec};
use hypercurv_core::rotex::schwarzschild_field;
use hypercurv_core::ScalarField;

fn build(spec: &str, n: usize) -> std::sync::Arc<dyn ScalarField> {
    FieldRegistry::with_builtins().build(spec, Some(n)).unwrap()
}

#[test]
fn sphere_rules_integrate_constants_and_quadratics() {
    for n in 2..=6 {
        let rule = sphere_rule(n, QuadratureSpec::default()).unwrap();
        let nodes = rule.nodes();
        let total = pairwise_sum(&nodes.iter().map(|p| p.weight).collect::<Vec<_>>());
        assert!((total - sphere_area(n)).abs() < 1e-12 * sphere_area(n), "{}", rule.label());
        // ∫ ω₁² dω = |S^{n-1}| / n
        let second = pairwise_sum(&nodes.iter().map(|p| p.weight * p.direction[0].powi(2)).collect::<Vec<_>>());
        assert!((second - sphere_area(n) / n as f64).abs() < 1e-12);
    }
}

#[test]
fn refining_quadrature_leaves_the_flux_unchanged() {
    let cases = [
        ("power(1.5,0.5)", 2, 3.0),
        ("power(0.7,1.5)", 3, 2.0),
        ("poly(0.3*x1^2*x2 + 0.1*x3^3 - 0.2*x1*x2*x3 + x1)", 3, 1.5),
        ("schwarzschild(3,1)", 3, 10.0),
        ("schwarzschild(4,1)", 4, 5.0),
        ("bump(1,3,0.5)", 4, 2.2),
    ];
    for (spec, n, r) in cases {
        let field = build(spec, n);
        let coarse = boundary_mass_integral(field.as_ref(), r, QuadratureSpec::default()).unwrap();
        let fine = boundary_mass_integral(field.as_ref(), r, QuadratureSpec::default().refined()).unwrap();
        assert!((coarse - fine).abs() <= 1e-6 * fine.abs().max(1e-12), "{spec}: {coarse} vs {fine}");
    }
}

#[test]
fn schwarzschild_mass_is_positive_and_increasing_in_m() {
    for n in [3, 4, 5] {
        let mut last = 0.0;
        for m in [0.5, 1.0, 2.0] {
            let f = schwarzschild_field(n, m).unwrap();
            let radii = [10.0, 20.0, 40.0, 80.0];
            let rep = mass_limit(f.as_ref(), &radii, QuadratureSpec::default()).unwrap();
            assert!(rep.mass_estimate > last, "n={n} m={m}: {}", rep.mass_estimate);
            assert!((rep.mass_estimate - m).abs() < 1e-2 * m, "n={n} m={m}: {}", rep.mass_estimate);
            last = rep.mass_estimate;
        }
    }
}

#[test]
fn flat_and_compactly_supported_fields_have_zero_mass() {
    for n in 2..=4 {
        let radii = [5.0, 10.0, 20.0];
        for spec in ["plane", "bump(1,3,0.5)"] {
            let rep = mass_limit(build(spec, n).as_ref(), &radii, QuadratureSpec::default()).unwrap();
            assert_eq!(rep.mass_estimate, 0.0, "{spec} n={n}");
        }
    }
}

#[test]
fn growing_profiles_are_flagged() {
    let field = build("power(1,3)", 3);
    let rep = mass_limit(field.as_ref(), &[10.0, 20.0, 40.0, 80.0], QuadratureSpec::default()).unwrap();
    assert!(!rep.converged);
    assert!(rep.note.unwrap().contains("no convergent limit"));
}

#[test]
fn decomposition_holds_on_catalog_cases() {
    let opts = PmtOptions::default();
    let cases: Vec<(&str, usize, f64, InnerBoundary)> = vec![
        ("bump(1,3,0.5)", 2, 2.5, InnerBoundary::Ball(1.5)),
        ("bump(1,3,0.5)", 3, 4.0, InnerBoundary::Ball(0.5)),
        ("power(1.5,0.5)", 2, 6.0, InnerBoundary::Ball(1.0)),
        ("power(0.5,1.5)", 3, 4.0, InnerBoundary::Ball(0.5)),
        ("schwarzschild(3,1)", 3, 50.0, InnerBoundary::Level(8f64.sqrt())),
        ("schwarzschild(3,2)", 3, 30.0, InnerBoundary::Ball(6.0)),
    ];
    for (spec, n, r, inner) in cases {
        let field = build(spec, n);
        let rep = pmt_decomposition(field.as_ref(), r, inner, &opts).unwrap();
        let tol = (1e-3 * rep.boundary_value().abs()).max(1e-6);
        assert!(
            rep.decomposition_residual.abs() <= tol,
            "{spec} n={n}: residual {} (boundary {})",
            rep.decomposition_residual,
            rep.boundary_value()
        );
    }
}

#[test]
fn level_inside_ball_needs_a_crossing() {
    let field = schwarzschild_field(3, 1.0).unwrap();
    let err = pmt_decomposition(field.as_ref(), 50.0, InnerBoundary::Level(1e3), &PmtOptions::default());
    assert!(err.is_err());
    let err = pmt_decomposition(field.as_ref(), 50.0, InnerBoundary::Ball(60.0), &PmtOptions::default());
    assert!(err.is_err());
}
