use hypercurv_core::fields::{RadialField, RadialProfile};
use hypercurv_core::graphgeo::curvature_at;
use hypercurv_core::mcf::{
    curvatures_of_revolution, parse_profile, run, FlowParams, ProfileCurve, ProfileRegistry, StopReason,
};
use hypercurv_core::{jet_at, JetScheme};

/// Lower half of the ellipsoid `r²/a_r² + z²/a_z² = 1` as a radial graph.
struct EllipsoidCap {
    a_r: f64,
    a_z: f64,
}

impl EllipsoidCap {
    fn s(&self, rho: f64) -> f64 {
        1.0 - (rho / self.a_r).powi(2)
    }
}

impl RadialProfile for EllipsoidCap {
    fn label(&self) -> String {
        format!("cap({},{})", self.a_r, self.a_z)
    }
    fn value(&self, rho: f64) -> f64 {
        -self.a_z * self.s(rho).sqrt()
    }
    fn d1(&self, rho: f64) -> f64 {
        self.a_z * rho / (self.a_r * self.a_r * self.s(rho).sqrt())
    }
    fn d2(&self, rho: f64) -> f64 {
        self.a_z / (self.a_r * self.a_r * self.s(rho).powf(1.5))
    }
    fn admissible(&self, rho: f64) -> bool {
        rho < self.a_r
    }
    fn regular_at_origin(&self) -> bool {
        true
    }
}

/// Largest H/R discrepancy against the graph patch over the lower cap.
fn patch_discrepancy(n: usize, a_r: f64, a_z: f64, count: usize) -> f64 {
    let profile = ProfileCurve::ellipsoid(n, a_r, a_z, count).unwrap();
    let curv = curvatures_of_revolution(&profile).unwrap();
    let field = RadialField::new(EllipsoidCap { a_r, a_z }, n);
    let mut worst = 0.0f64;
    for (node, c) in profile.nodes.iter().zip(&curv) {
        if node[1] >= -0.5 * a_z || node[0] <= 0.0 {
            continue;
        }
        let mut x = vec![0.0; n];
        x[0] = node[0];
        let g = curvature_at(&jet_at(&field, &x, JetScheme::Analytic).unwrap()).unwrap();
        worst = worst.max((g.h - c.h).abs()).max((g.r - c.r).abs());
    }
    worst
}

#[test]
fn profile_curvatures_match_the_graph_patch() {
    for n in [2, 3] {
        let coarse = patch_discrepancy(n, 1.0, 2.0, 6000);
        let fine = patch_discrepancy(n, 1.0, 2.0, 60_000);
        assert!(fine < 1e-6, "n={n}: {fine}");
        // converges as the spacing shrinks
        assert!(coarse / fine > 10.0, "n={n}: {coarse} -> {fine}");
    }
}

#[test]
fn shrinking_spheres_follow_the_exact_solution() {
    for (n, r0) in [(2usize, 1.0), (3, 1.0), (4, 1.5)] {
        let t_ext = r0 * r0 / (2.0 * n as f64);
        let sphere = ProfileCurve::sphere(n, r0, 400).unwrap();
        let flow = run(&sphere, &FlowParams::default(), 0.8 * t_ext, 200).unwrap();
        assert_eq!(flow.stop, StopReason::ReachedTime);
        for m in &flow.monitors {
            let exact = (r0 * r0 - 2.0 * n as f64 * m.t).sqrt();
            assert!((m.mean_radius - exact).abs() < 1e-3 * r0, "n={n} t={}", m.t);
        }
        // q₂ = (n-1)/(2ρ) grows as the sphere shrinks.
        let q2: Vec<f64> = flow.monitors.iter().map(|m| m.min_q2.unwrap()).collect();
        assert!(q2.windows(2).all(|w| w[1] > w[0]));
        let first = &flow.monitors[0];
        assert!((first.min_q2.unwrap() - (n as f64 - 1.0) / (2.0 * r0)).abs() < 1e-9);
    }
}

#[test]
fn enclosed_area_decreases_every_step() {
    let profiles = ProfileRegistry::with_builtins();
    for spec in ["ellipsoid(1,2)", "torus(3,1)", "superellipse(4)"] {
        let initial = profiles.build(spec, 2, 300).unwrap();
        let flow = run(&initial, &FlowParams::default(), 0.03, 1).unwrap();
        assert!(flow.monitors.len() > 100);
        for w in flow.monitors.windows(2) {
            assert!(
                w[1].enclosed_profile_area < w[0].enclosed_profile_area + 1e-9,
                "{spec} at t = {}",
                w[1].t
            );
        }
    }
}

#[test]
fn nonnegative_scalar_curvature_becomes_positive() {
    let profiles = ProfileRegistry::with_builtins();
    let mut tested = 0;
    for spec in ["sphere", "ellipsoid(1,2)", "ellipsoid(2,1)", "superellipse(4)", "superellipse(6,0.8)", "torus(3,1)"] {
        for n in [2, 3] {
            let initial = profiles.build(spec, n, 300).unwrap();
            let start = curvatures_of_revolution(&initial).unwrap();
            let min_r = start.iter().map(|c| c.r).fold(f64::INFINITY, f64::min);
            if min_r < -1e-9 {
                continue;
            }
            tested += 1;
            let flow = run(&initial, &FlowParams::default(), 0.1, 500).unwrap();
            assert!(!flow.stop.is_breakdown(), "{spec} n={n}: {:?}", flow.stop);
            assert!(flow.monitors.len() > 1);
            for m in flow.monitors.iter().skip(1) {
                assert!(m.min_r > 1e-9, "{spec} n={n} t={}: {}", m.t, m.min_r);
                assert!(m.min_h > 0.0);
            }
        }
    }
    assert!(tested >= 8);
}

#[test]
fn borderline_superellipse_starts_flat() {
    let p = ProfileRegistry::with_builtins().build("superellipse(4)", 2, 400).unwrap();
    let curv = curvatures_of_revolution(&p).unwrap();
    let min_r = curv.iter().map(|c| c.r).fold(f64::INFINITY, f64::min);
    let min_h = curv.iter().map(|c| c.h).fold(f64::INFINITY, f64::min);
    assert!((-1e-9..1e-6).contains(&min_r), "{min_r}");
    assert!((0.0..1e-2).contains(&min_h), "{min_h}");
}

#[test]
fn node_list_round_trip() {
    let sphere = ProfileCurve::sphere(2, 1.0, 64).unwrap();
    let text: String = sphere.nodes.iter().map(|[r, z]| format!("{r:.17e} {z:.17e}\n")).collect();
    let parsed = parse_profile(&text, 2).unwrap();
    assert_eq!(parsed.kind, sphere.kind);
    assert_eq!(parsed.len(), sphere.len());
    let a = curvatures_of_revolution(&parsed).unwrap();
    assert!(a.iter().all(|c| (c.h - 2.0).abs() < 1e-9));
}
