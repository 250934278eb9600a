//! Acceptance criteria 1-10. Each test writes one status line to stderr
//! (bypassing the harness capture) with its tolerance and runtime budget.

use std::io::Write;
use std::time::{Duration, Instant};

use hypercurv_core::fields::{FieldRegistry, Polynomial};
use hypercurv_core::graphgeo::{curvature_at, scalar_curvature_divergence};
use hypercurv_core::levelset::{sample_level_points, Orientation, Region, SamplePlan};
use hypercurv_core::mass::{
    adm_mass_chart, boundary_mass_integral, mass_limit, pmt_decomposition, InnerBoundary, PmtOptions,
};
use hypercurv_core::mcf::{run, FlowParams, ProfileCurve, ProfileRegistry};
use hypercurv_core::quadrature::QuadratureSpec;
use hypercurv_core::rotex::{
    b_nk, family_field, margin_factored, schwarzschild_field, sign_change_radius, sigma_profile, sweep,
    RotationalFamily, Variant,
};
use hypercurv_core::symfun::{identity_breakdown, SquareMatrix};
use hypercurv_core::{jet_at, JetScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, pass: bool, detail: &str, elapsed: Duration, budget: f64) -> bool {
    let secs = elapsed.as_secs_f64();
    let ok = pass && secs < budget;
    let line = format!(
        "criterion {id:>2} {} {detail}; runtime {secs:.3}s (budget {budget}s)\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    ok
}

#[test]
fn criterion_01_trace_minor_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 2..=8 {
        for _ in 0..1000 {
            let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
            let entries: Vec<f64> = (0..n * n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect();
            let a = SquareMatrix::from_row_slice(n, &entries).unwrap();
            let b = identity_breakdown(&a).unwrap();
            worst = worst.max(b.residual.abs() / a.max_abs().powi(2));
            count += 1;
        }
    }
    let ok = report(
        1,
        worst < 1e-12,
        &format!("{count} matrices, max |residual|/scale^2 = {worst:.3e} (tol 1e-12)"),
        start.elapsed(),
        1.0,
    );
    assert!(ok);
}

#[test]
fn criterion_02_level_set_inequality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let (mut graphs, mut points, mut min_gap) = (0, 0, f64::INFINITY);
    for n in 2..=4 {
        for g in 0..8 {
            let poly = Polynomial::random(&mut rng, n, 4, 1.0);
            let mut plan = SamplePlan::new(Region::cube(n, 1.0), 25);
            if g % 2 == 1 {
                plan.orientation = Orientation::AgainstGradient;
            }
            let pts = sample_level_points(&poly, &plan, &mut rng);
            graphs += 1;
            points += pts.len();
            min_gap = pts.iter().map(|p| p.gap).fold(min_gap, f64::min);
        }
    }
    let registry = FieldRegistry::with_builtins();
    let (mut eq_gap, mut eq_umb, mut eq_points) = (0.0f64, 0.0f64, 0);
    for n in 2..=4 {
        let hemi = registry.build("hemisphere(1)", Some(n)).unwrap();
        let pts = sample_level_points(hemi.as_ref(), &SamplePlan::new(Region::cube(n, 0.55), 40), &mut rng);
        eq_points += pts.len();
        for p in &pts {
            eq_gap = eq_gap.max(p.gap.abs());
            eq_umb = eq_umb.max(p.diagnostics.umbilicity_defect);
        }
    }
    let pass = graphs >= 20 && points >= 500 && min_gap >= -1e-9 && eq_points > 0 && eq_gap < 1e-9 && eq_umb < 1e-6;
    let ok = report(
        2,
        pass,
        &format!(
            "{points} points on {graphs} quartics, min gap = {min_gap:.3e} (tol -1e-9); \
             hemisphere {eq_points} points, max |gap| = {eq_gap:.3e} (tol 1e-9), \
             max umbilicity = {eq_umb:.3e} (tol 1e-6)"
        ),
        start.elapsed(),
        10.0,
    );
    assert!(ok);
}

/// Catalog entries with a sampling box and an extra acceptance predicate on
/// the sampled point.
type Predicate = fn(&[f64]) -> bool;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn criterion_03_divergence_form_scalar_curvature() {
    let start = Instant::now();
    let registry = FieldRegistry::with_builtins();
    let cases: Vec<(&str, usize, f64, Predicate)> = vec![
        ("plane(0.3,0.2,-0.1)", 2, 2.0, |_| true),
        ("hemisphere(1)", 3, 0.9, |x| norm(x) < 0.9),
        ("cubic_sheet", 3, 1.0, |_| true),
        ("cylinder(1)", 3, 0.9, |_| true),
        ("poly(x1^2*x2 + 0.3*x2^3*x3 - x1*x3^2 + x1^4)", 3, 1.0, |_| true),
        ("power(1.5,0.5)", 3, 3.0, |x| norm(x) > 0.5),
        ("bump(1,3,0.5)", 3, 3.0, |x| (norm(x) - 2.0).abs() < 0.95),
        ("rot_odd(5,3,2.5)", 5, 3.5, |_| true),
        ("rot_even(6,4,2.5)", 6, 3.5, |_| true),
        ("schwarzschild(3,1)", 3, 20.0, |x| norm(x) > 2.2),
        ("schwarzschild(4,1)", 4, 20.0, |x| norm(x) > 1.2),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut worst = (0.0f64, "");
    let mut total = 0;
    for (spec, n, half, pred) in &cases {
        let field = registry.build(spec, Some(*n)).unwrap();
        let mut done = 0;
        let mut attempts = 0;
        while done < 100 {
            attempts += 1;
            assert!(attempts < 2_000_000, "{spec}: could not sample admissible points");
            let x: Vec<f64> = (0..*n).map(|_| rng.gen_range(-*half..*half)).collect();
            if !pred(&x) || !field.admissible(&x) {
                continue;
            }
            let h = 1e-4 * norm(&x).max(1.0);
            let Ok(div) = scalar_curvature_divergence(field.as_ref(), &x, h) else { continue };
            let jet = jet_at(field.as_ref(), &x, JetScheme::preferred(field.as_ref(), &x)).unwrap();
            let curv = curvature_at(&jet).unwrap();
            let rel = (div - curv.r).abs() / curv.scale().max(1e-12);
            if rel > worst.0 {
                worst = (rel, spec);
            }
            done += 1;
        }
        total += done;
    }
    let ok = report(
        3,
        worst.0 < 1e-5,
        &format!(
            "{} fields, {total} points, max relative error = {:.3e} at {} (tol 1e-5)",
            cases.len(),
            worst.0,
            worst.1
        ),
        start.elapsed(),
        5.0,
    );
    assert!(ok);
}

fn window_sweep(variant: Variant, n: usize, k: usize, a: f64) -> (f64, f64, f64, f64) {
    let family = RotationalFamily::new(variant, n, k, a).unwrap();
    let s = sweep(&family, 10_000).unwrap();
    let expected = sign_change_radius(variant, n, a).unwrap();
    let offset = match s.sigma1_crossings.as_slice() {
        [r] => (r - expected).abs(),
        _ => f64::INFINITY,
    };
    (s.min_sigma_k, expected, offset, s.cell)
}

#[test]
fn criterion_04_odd_family() {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, k, a) in [(5, 3, 2.5), (3, 3, 2.0), (7, 5, 2.0)] {
        let (min_k, expected, offset, cell) = window_sweep(Variant::Odd, n, k, a);
        pass &= min_k >= -1e-9 && offset <= cell;
        parts.push(format!("({n},{k},{a}): min σ_k = {min_k:.3e}, crossing {expected} ± {offset:.1e}"));
    }
    let ok = report(
        4,
        pass,
        &format!("{} (tol σ_k >= -1e-9, one grid cell)", parts.join("; ")),
        start.elapsed(),
        2.0,
    );
    assert!(ok);
}

#[test]
fn criterion_05_even_family() {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut worst_pipeline = 0.0f64;
    for (n, k, a) in [(4, 4, 1.5), (6, 4, 2.5), (8, 6, 2.2)] {
        let family = RotationalFamily::new(Variant::Even, n, k, a).unwrap();
        pass &= a > 1.0 + b_nk(n, k) && a < n as f64 / 2.0;
        let (min_k, expected, offset, cell) = window_sweep(Variant::Even, n, k, a);
        pass &= min_k >= -1e-9 && offset <= cell;
        parts.push(format!("({n},{k},{a}): min σ_k = {min_k:.3e}, crossing {expected} ± {offset:.1e}"));

        let field = family_field(&family);
        for i in 1..=50 {
            let r = a - 0.95 + 1.9 * i as f64 / 51.0;
            let mut x = vec![0.0; n];
            x[0] = r * 0.6;
            x[1] = r * 0.8;
            let jet = jet_at(field.as_ref(), &x, JetScheme::Analytic).unwrap();
            let curv = curvature_at(&jet).unwrap();
            for j in [1, k] {
                let closed = sigma_profile(&family, j, r).unwrap();
                worst_pipeline = worst_pipeline.max((curv.sigmas[j] - closed).abs() / closed.abs().max(1.0));
            }
        }
    }
    pass &= worst_pipeline < 1e-8;
    let ok = report(
        5,
        pass,
        &format!(
            "{}; closed form vs graph pipeline max rel = {worst_pipeline:.3e} (tol 1e-8)",
            parts.join("; ")
        ),
        start.elapsed(),
        5.0,
    );
    assert!(ok);
}

#[test]
fn criterion_06_window_margin() {
    let start = Instant::now();
    let (mut min_margin, mut arg, mut pairs, mut worst_factored) = (f64::INFINITY, (0, 0), 0, 0.0f64);
    for n in 4..=50usize {
        for k in 4..=n {
            let margin = n as f64 / 2.0 - 1.0 - b_nk(n, k);
            worst_factored = worst_factored.max((margin - margin_factored(n, k)).abs());
            if margin < min_margin {
                min_margin = margin;
                arg = (n, k);
            }
            pairs += 1;
        }
    }
    let ok = report(
        6,
        min_margin > 0.0 && worst_factored < 1e-10,
        &format!(
            "{pairs} pairs, min margin = {min_margin:.6} at (n,k) = {arg:?} (tol > 0), \
             factored form max diff = {worst_factored:.2e}"
        ),
        start.elapsed(),
        0.1,
    );
    assert!(ok);
}

#[test]
fn criterion_07_schwarzschild_mass() {
    let start = Instant::now();
    let quad = QuadratureSpec::default();
    let radii = [25.0, 50.0, 100.0, 200.0];
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [0.5, 1.0, 2.0] {
        let field = schwarzschild_field(3, m).unwrap();
        let rep = mass_limit(field.as_ref(), &radii, quad).unwrap();
        let rel = (rep.mass_estimate - m).abs() / m;
        pass &= rel < 0.01;
        parts.push(format!("m = {m}: estimate {:.12} (rel {rel:.1e})", rep.mass_estimate));
    }
    let registry = FieldRegistry::with_builtins();
    let mut plane_max = 0.0f64;
    for spec in ["plane", "plane(0.3,0.2,-0.1,0.4)"] {
        let plane = registry.build(spec, Some(3)).unwrap();
        let rep = mass_limit(plane.as_ref(), &radii, quad).unwrap();
        plane_max = plane_max.max(rep.mass_estimate.abs());
    }
    pass &= plane_max < 1e-10;
    let ok = report(
        7,
        pass,
        &format!("{} (tol 1%); plane |mass| = {plane_max:.1e} (tol 1e-10)", parts.join(", ")),
        start.elapsed(),
        30.0,
    );
    assert!(ok);
}

#[test]
fn criterion_08_decomposition() {
    let start = Instant::now();
    let opts = PmtOptions::default();
    let field = schwarzschild_field(3, 1.0).unwrap();
    let level = field.eval(&[3.0, 0.0, 0.0]);
    let rep = pmt_decomposition(field.as_ref(), 50.0, InnerBoundary::Level(level), &opts).unwrap();
    let rel = rep.relative_residual();

    let registry = FieldRegistry::with_builtins();
    let mut bump_worst = 0.0f64;
    for (n, inner, outer) in [(2, 0.5, 4.0), (2, 1.5, 2.5), (3, 1.5, 2.5), (3, 0.5, 4.0)] {
        let bump = registry.build("bump(1,3,0.5)", Some(n)).unwrap();
        let rep = pmt_decomposition(bump.as_ref(), outer, InnerBoundary::Ball(inner), &opts).unwrap();
        bump_worst = bump_worst.max(rep.decomposition_residual.abs());
    }
    let ok = report(
        8,
        rel < 1e-3 && bump_worst < 1e-6,
        &format!(
            "schwarzschild level r=3, outer 50: boundary {:.12}, interior {:.3e}, level {:.12}, \
             rel residual {rel:.3e} (tol 1e-3); bump max |residual| = {bump_worst:.3e} (tol 1e-6)",
            rep.boundary_value(),
            rep.interior_r_integral,
            rep.level_term
        ),
        start.elapsed(),
        30.0,
    );
    assert!(ok);
}

#[test]
fn criterion_09_chart_form_mass() {
    let start = Instant::now();
    let quad = QuadratureSpec::default();
    let (m, r) = (1.0, 100.0);
    let field = schwarzschild_field(3, m).unwrap();
    let graphical = boundary_mass_integral(field.as_ref(), r, quad).unwrap();
    let chart = adm_mass_chart(field.as_ref(), r, quad).unwrap();
    let rel = (chart - graphical).abs() / graphical.abs();
    // Radial reduction: chart / graphical = (1 + φ'²)^{3/2}, φ'² = 2m/(r-2m).
    let predicted = (1.0 + 2.0 * m / (r - 2.0 * m)).powf(1.5);
    let ok = report(
        9,
        rel < 0.01,
        &format!(
            "r = {r}: graphical {graphical:.12}, chart {chart:.12}, rel diff {rel:.4e} (tol 1e-2); \
             radial prediction ratio {predicted:.12}, measured {:.12}",
            chart / graphical
        ),
        start.elapsed(),
        10.0,
    );
    assert!(ok, "chart and graphical mass differ by {:.3}% at r = {r}", 100.0 * rel);
}

#[test]
fn criterion_10_mean_curvature_flow() {
    let start = Instant::now();
    let params = FlowParams { dt: 1e-5, target_nodes: 400, ..FlowParams::default() };
    let sphere = ProfileCurve::sphere(2, 1.0, 400).unwrap();
    let flow = run(&sphere, &params, 0.2, 100).unwrap();
    let reached = flow.monitors.last().map_or(0.0, |m| m.t);
    let radius_err = flow
        .monitors
        .iter()
        .map(|m| (m.mean_radius - (1.0 - 4.0 * m.t).sqrt()).abs())
        .fold(0.0, f64::max);
    let mut pass = radius_err < 1e-3 && (reached - 0.2).abs() < 1e-9;

    let profiles = ProfileRegistry::with_builtins();
    let mut parts = Vec::new();
    for spec in ["ellipsoid(1,2)", "ellipsoid(2,1)"] {
        let initial = profiles.build(spec, 2, 400).unwrap();
        let flow = run(&initial, &params, 2.0, 1000).unwrap();
        let initial_min_r = flow.monitors[0].min_r;
        let later_min_r = flow.monitors.iter().skip(1).map(|m| m.min_r).fold(f64::INFINITY, f64::min);
        pass &= initial_min_r >= 0.0 && later_min_r > 1e-9 && flow.monitors.len() > 1 && !flow.stop.is_breakdown();
        parts.push(format!(
            "{spec}: initial min R {initial_min_r:.3e}, min R(t>0) {later_min_r:.3e} over {} samples, stop {}",
            flow.monitors.len() - 1,
            flow.stop.label()
        ));
    }
    let ok = report(
        10,
        pass,
        &format!(
            "sphere n=2 to t={reached}: max radius error {radius_err:.3e} (tol 1e-3); {} (tol min R > 1e-9)",
            parts.join("; ")
        ),
        start.elapsed(),
        60.0,
    );
    assert!(ok);
}
