//! Explicit Euler stepping with periodic arclength redistribution.

use super::{curvatures_of_revolution, dist, tangent, NodeCurvature, ProfileCurve, ProfileKind};
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub dt: f64,
    pub cfl: f64,
    pub redistribute_every: usize,
    /// Node count restored at each redistribution, when the step size
    /// allows it.
    pub target_nodes: usize,
    /// Fewer nodes than this counts as extinction.
    pub min_nodes: usize,
    pub q2_floor: f64,
    /// Extinction once the enclosed area falls below this fraction of the
    /// initial area.
    pub area_fraction: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            dt: 1e-5,
            cfl: 0.4,
            redistribute_every: 20,
            target_nodes: 400,
            min_nodes: 24,
            q2_floor: 1e-8,
            area_fraction: 1e-3,
        }
    }
}

/// Sampled flow diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMonitor {
    pub t: f64,
    pub min_h: f64,
    pub min_r: f64,
    /// Minimum of `R/(2H)` over nodes with `H > q2_floor`; `None` if there
    /// are none.
    pub min_q2: Option<f64>,
    pub max_speed: f64,
    pub enclosed_profile_area: f64,
    /// Mean node distance from the axis point at the area centroid's height.
    pub mean_radius: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    ReachedTime,
    Extinction,
    SelfIntersection { t: f64 },
    Cfl { t: f64, dt: f64, bound: f64 },
    Degenerate { t: f64, reason: String },
}

impl StopReason {
    pub fn label(&self) -> &'static str {
        match self {
            StopReason::ReachedTime => "reached_time",
            StopReason::Extinction => "extinction",
            StopReason::SelfIntersection { .. } => "self_intersection",
            StopReason::Cfl { .. } => "cfl",
            StopReason::Degenerate { .. } => "degenerate",
        }
    }

    /// Whether the run ended in a numerical breakdown.
    pub fn is_breakdown(&self) -> bool {
        !matches!(self, StopReason::ReachedTime | StopReason::Extinction)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub monitors: Vec<FlowMonitor>,
    pub profile: ProfileCurve,
    pub steps: usize,
    pub stop: StopReason,
}

/// The effective stability constant: `cfl`, reduced by `2/n` in higher
/// dimensions where the axis nodes see the full `n`-fold curvature.
fn effective_cfl(n: usize, cfl: f64) -> f64 {
    cfl * (2.0 / n as f64).min(1.0)
}

fn max_abs_curvature(curv: &[NodeCurvature]) -> f64 {
    curv.iter().fold(0.0, |m, c| m.max(c.kappa.abs()).max(c.kappa_rot.abs()))
}

/// Largest stable step `c·Δs²/(1 + max|A|·Δs)`.
pub fn stability_bound(profile: &ProfileCurve, cfl: f64) -> Result<f64> {
    let curv = curvatures_of_revolution(profile)?;
    Ok(bound_from(profile, &curv, cfl))
}

fn bound_from(profile: &ProfileCurve, curv: &[NodeCurvature], cfl: f64) -> f64 {
    let h = profile.min_spacing();
    effective_cfl(profile.n, cfl) * h * h / (1.0 + max_abs_curvature(curv) * h)
}

/// One explicit step `X ← X + dt·H·N`; axis nodes stay on the axis.
pub fn step(profile: &ProfileCurve, dt: f64, cfl: f64) -> Result<ProfileCurve> {
    let curv = curvatures_of_revolution(profile)?;
    let bound = bound_from(profile, &curv, cfl);
    if !(dt > 0.0) || dt > bound {
        return Err(GeomError::Cfl { dt, bound });
    }
    Ok(advance(profile, &curv, dt))
}

fn advance(profile: &ProfileCurve, curv: &[NodeCurvature], dt: f64) -> ProfileCurve {
    let k = profile.nodes.len();
    let nodes = profile
        .nodes
        .iter()
        .zip(curv)
        .enumerate()
        .map(|(i, (x, c))| {
            let speed = dt * c.h;
            if profile.is_axis_node(i) || (profile.kind == ProfileKind::SphereType && (i == 0 || i == k - 1)) {
                [0.0, x[1] + speed * c.normal[1]]
            } else {
                [x[0] + speed * c.normal[0], x[1] + speed * c.normal[1]]
            }
        })
        .collect();
    ProfileCurve { n: profile.n, kind: profile.kind, nodes }
}

fn quick_check(profile: &ProfileCurve) -> std::result::Result<(), String> {
    let k = profile.nodes.len();
    let interior = match profile.kind {
        ProfileKind::SphereType => &profile.nodes[1..k - 1],
        ProfileKind::TorusType => &profile.nodes[..],
    };
    if interior.iter().flatten().any(|v| !v.is_finite()) {
        return Err("non-finite node".into());
    }
    if interior.iter().any(|p| !(p[0] > 0.0)) {
        return Err("profile crossed the axis".into());
    }
    Ok(())
}

/// Resample to `count` nodes equally spaced in arclength using cubic
/// Hermite interpolation with three-point tangents.
pub fn redistribute(profile: &ProfileCurve, count: usize) -> Result<ProfileCurve> {
    let k = profile.nodes.len();
    let closed = profile.kind == ProfileKind::TorusType;
    let min_count = if closed { 4 } else { 3 };
    if count < min_count {
        return Err(GeomError::domain(format!("cannot resample to {count} nodes")));
    }
    let tangents: Vec<[f64; 2]> = (0..k)
        .map(|i| {
            let (prev, next) = profile.neighbours(i);
            tangent(prev, profile.nodes[i], next)
        })
        .collect();
    let lengths = profile.spacings();
    let total: f64 = lengths.iter().sum();
    let slots = if closed { count } else { count - 1 };
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for j in 0..count {
        let s = total * j as f64 / slots as f64;
        while seg + 1 < lengths.len() && s > seg_start + lengths[seg] {
            seg_start += lengths[seg];
            seg += 1;
        }
        let h = lengths[seg];
        let u = ((s - seg_start) / h).clamp(0.0, 1.0);
        let (a, b) = (profile.nodes[seg], profile.nodes[(seg + 1) % k]);
        let (ta, tb) = (tangents[seg], tangents[(seg + 1) % k]);
        let (u2, u3) = (u * u, u * u * u);
        let (h00, h10, h01, h11) = (2.0 * u3 - 3.0 * u2 + 1.0, u3 - 2.0 * u2 + u, -2.0 * u3 + 3.0 * u2, u3 - u2);
        let mut p = [0.0; 2];
        for c in 0..2 {
            p[c] = h00 * a[c] + h10 * h * ta[c] + h01 * b[c] + h11 * h * tb[c];
        }
        out.push(p);
    }
    if !closed {
        out[0] = [0.0, profile.nodes[0][1]];
        out[count - 1] = [0.0, profile.nodes[k - 1][1]];
    }
    ProfileCurve::new(profile.n, profile.kind, out)
}

/// Smallest spacing for which `dt` is stable with a safety margin.
fn spacing_for(n: usize, dt: f64, cfl: f64, max_curvature: f64) -> f64 {
    const MARGIN: f64 = 1.25;
    let c = effective_cfl(n, cfl);
    let b = MARGIN * dt * max_curvature;
    (b + (b * b + 4.0 * c * MARGIN * dt).sqrt()) / (2.0 * c)
}

fn monitor(profile: &ProfileCurve, curv: &[NodeCurvature], t: f64, q2_floor: f64) -> FlowMonitor {
    let min_h = curv.iter().map(|c| c.h).fold(f64::INFINITY, f64::min);
    let min_r = curv.iter().map(|c| c.r).fold(f64::INFINITY, f64::min);
    let min_q2 = curv
        .iter()
        .filter(|c| c.h > q2_floor)
        .map(|c| c.r / (2.0 * c.h))
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    let max_speed = curv.iter().map(|c| c.h.abs()).fold(0.0, f64::max);
    let centre = area_centroid_height(profile);
    let mean_radius =
        profile.nodes.iter().map(|p| dist(*p, [0.0, centre])).sum::<f64>() / profile.nodes.len() as f64;
    FlowMonitor {
        t,
        min_h,
        min_r,
        min_q2,
        max_speed,
        enclosed_profile_area: profile.enclosed_area(),
        mean_radius,
        nodes: profile.nodes.len(),
    }
}

fn area_centroid_height(profile: &ProfileCurve) -> f64 {
    let k = profile.nodes.len();
    let (mut a, mut cz) = (0.0, 0.0);
    for i in 0..k {
        let [r0, z0] = profile.nodes[i];
        let [r1, z1] = profile.nodes[(i + 1) % k];
        let c = r0 * z1 - r1 * z0;
        a += c;
        cz += (z0 + z1) * c;
    }
    if a == 0.0 {
        0.0
    } else {
        cz / (3.0 * a)
    }
}

/// Flow until `t_end`, extinction, or breakdown, sampling every
/// `sample_every` steps (and at the start and end).
pub fn run(profile: &ProfileCurve, params: &FlowParams, t_end: f64, sample_every: usize) -> Result<FlowRun> {
    if !(params.dt > 0.0 && params.dt.is_finite()) || !(t_end >= 0.0) {
        return Err(GeomError::domain("dt must be positive and t_end nonnegative"));
    }
    if params.redistribute_every == 0 || sample_every == 0 {
        return Err(GeomError::domain("redistribution and sampling intervals must be positive"));
    }
    let initial_area = profile.enclosed_area();
    let mut p = profile.clone();
    let mut t = 0.0;
    let mut steps = 0;
    let mut curv = curvatures_of_revolution(&p)?;
    let mut monitors = vec![monitor(&p, &curv, t, params.q2_floor)];
    let finish = |p: ProfileCurve, monitors: Vec<FlowMonitor>, steps: usize, stop: StopReason| FlowRun {
        monitors,
        profile: p,
        steps,
        stop,
    };

    loop {
        if t >= t_end * (1.0 - 1e-12) {
            return Ok(finish(p, monitors, steps, StopReason::ReachedTime));
        }
        let dt = params.dt.min(t_end - t);
        let mut bound = bound_from(&p, &curv, params.cfl);
        if (steps > 0 && steps % params.redistribute_every == 0) || bound < dt {
            let spacing = spacing_for(p.n, params.dt, params.cfl, max_abs_curvature(&curv));
            let count = params.target_nodes.min((p.length() / spacing) as usize + 1);
            if count < params.min_nodes {
                let stop = if steps == 0 {
                    StopReason::Cfl { t, dt, bound }
                } else {
                    StopReason::Extinction
                };
                return Ok(finish(p, monitors, steps, stop));
            }
            p = match redistribute(&p, count) {
                Ok(q) => q,
                Err(_) => return Ok(finish(p, monitors, steps, StopReason::SelfIntersection { t })),
            };
            curv = match curvatures_of_revolution(&p) {
                Ok(c) => c,
                Err(e) => return Ok(finish(p, monitors, steps, StopReason::Degenerate { t, reason: e.to_string() })),
            };
            bound = bound_from(&p, &curv, params.cfl);
            if bound < dt {
                return Ok(finish(p, monitors, steps, StopReason::Cfl { t, dt, bound }));
            }
        }
        let next = advance(&p, &curv, dt);
        t += dt;
        steps += 1;
        if let Err(reason) = quick_check(&next) {
            let stop = if reason.contains("axis") {
                StopReason::SelfIntersection { t }
            } else {
                StopReason::Degenerate { t, reason }
            };
            return Ok(finish(p, monitors, steps, stop));
        }
        p = next;
        curv = match curvatures_of_revolution(&p) {
            Ok(c) => c,
            Err(e) => return Ok(finish(p, monitors, steps, StopReason::Degenerate { t, reason: e.to_string() })),
        };
        let done = t >= t_end * (1.0 - 1e-12);
        if steps % sample_every == 0 || done {
            monitors.push(monitor(&p, &curv, t, params.q2_floor));
        }
        if p.enclosed_area() < params.area_fraction * initial_area {
            if !done && steps % sample_every != 0 {
                monitors.push(monitor(&p, &curv, t, params.q2_floor));
            }
            return Ok(finish(p, monitors, steps, StopReason::Extinction));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_small_step_on_the_unit_circle() {
        let p = ProfileCurve::sphere(2, 1.0, 201).unwrap();
        let dt = 1e-6;
        let q = step(&p, dt, 0.4).unwrap();
        for x in &q.nodes {
            let r = x[0].hypot(x[1]);
            assert!((r - (1.0 - 2.0 * dt)).abs() < 1e-12);
        }
        assert!(matches!(step(&p, 1.0, 0.4), Err(GeomError::Cfl { .. })));
    }

    #[test]
    fn oversized_step_is_a_cfl_stop() {
        let p = ProfileCurve::sphere(2, 1.0, 200).unwrap();
        let params = FlowParams { dt: 0.1, ..FlowParams::default() };
        let run = run(&p, &params, 1.0, 1).unwrap();
        assert_eq!(run.steps, 0);
        assert!(matches!(run.stop, StopReason::Cfl { .. }), "{:?}", run.stop);
    }

    #[test]
    fn redistribution_preserves_a_circle() {
        let p = ProfileCurve::ellipsoid(2, 1.0, 1.0, 57).unwrap();
        let q = redistribute(&p, 80).unwrap();
        assert_eq!(q.len(), 80);
        for x in &q.nodes {
            assert!((x[0].hypot(x[1]) - 1.0).abs() < 1e-7);
        }
        let s = q.spacings();
        let (lo, hi) = s.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(hi - lo < 1e-3 * hi);
    }
}
