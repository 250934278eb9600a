//! Mean curvature flow of rotationally symmetric hypersurfaces, represented
//! by their profile curves in the `(r, z)` half-plane.
//!
//! Profiles run clockwise, so the inward normal is `N = (T_z, -T_r)` for the
//! unit tangent `T`. A node's principal curvatures are the profile
//! curvature `κ` and the rotational curvature `-N_r/r` with multiplicity
//! `n-1`.

mod flow;
mod profiles;

pub use flow::{
    redistribute, run, stability_bound, step, FlowMonitor, FlowParams, FlowRun, StopReason,
};
pub use profiles::{parse_profile, read_profile_file, ProfileRegistry};

use crate::error::{GeomError, Result};
use crate::numeric::binomial;

pub const MIN_SPACING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// Open arc from the axis back to the axis; the endpoints have `r = 0`.
    SphereType,
    /// Closed loop with `r > 0` throughout.
    TorusType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub n: usize,
    pub kind: ProfileKind,
    pub nodes: Vec<[f64; 2]>,
}

/// Curvatures at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeCurvature {
    pub kappa: f64,
    pub kappa_rot: f64,
    pub h: f64,
    pub r: f64,
    /// Inward unit normal.
    pub normal: [f64; 2],
}

impl ProfileCurve {
    /// Validate and orient clockwise.
    pub fn new(n: usize, kind: ProfileKind, mut nodes: Vec<[f64; 2]>) -> Result<Self> {
        if n < 2 {
            return Err(GeomError::domain(format!("hypersurface dimension {n} below 2")));
        }
        if kind == ProfileKind::TorusType && nodes.len() > 1 && nodes.first() == nodes.last() {
            nodes.pop();
        }
        let min_nodes = if kind == ProfileKind::SphereType { 3 } else { 4 };
        if nodes.len() < min_nodes {
            return Err(GeomError::domain(format!("profile needs at least {min_nodes} nodes")));
        }
        if nodes.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite("profile node".into()));
        }
        let mut curve = ProfileCurve { n, kind, nodes };
        if curve.signed_area() > 0.0 {
            curve.nodes.reverse();
        }
        curve.validate()?;
        Ok(curve)
    }

    /// Round sphere of radius `rho` centred on the axis at `z = 0`.
    pub fn sphere(n: usize, rho: f64, count: usize) -> Result<Self> {
        Self::ellipsoid(n, rho, rho, count)
    }

    /// Ellipsoid of revolution with semi-axes `a_r` (radial) and `a_z`.
    pub fn ellipsoid(n: usize, a_r: f64, a_z: f64, count: usize) -> Result<Self> {
        if !(a_r > 0.0 && a_z > 0.0) {
            return Err(GeomError::domain("semi-axes must be positive"));
        }
        Self::new(n, ProfileKind::SphereType, equal_arc_nodes(count, |th| [a_r * th.cos(), a_z * th.sin()]))
    }

    /// `|r/s|^p + |z/s|^p = 1`; flat to order `p-1` at the poles and the
    /// equator.
    pub fn superellipse(n: usize, p: f64, scale: f64, count: usize) -> Result<Self> {
        if !(p >= 2.0) || !(scale > 0.0) {
            return Err(GeomError::domain("superellipse needs p >= 2 and positive scale"));
        }
        let nodes = equal_arc_nodes(count, |phi| {
            let (c, s) = (phi.cos(), phi.sin());
            let rho = scale * (c.abs().powf(p) + s.abs().powf(p)).powf(-1.0 / p);
            [rho * c, rho * s]
        });
        Self::new(n, ProfileKind::SphereType, nodes)
    }

    /// Circle of radius `minor` centred at `(a, 0)`.
    pub fn torus(n: usize, a: f64, minor: f64, count: usize) -> Result<Self> {
        if !(minor > 0.0 && a > minor) {
            return Err(GeomError::domain("torus needs a > minor radius > 0"));
        }
        let nodes = (0..count)
            .map(|j| {
                let th = std::f64::consts::FRAC_PI_2 - 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                [a + minor * th.cos(), minor * th.sin()]
            })
            .collect();
        Self::new(n, ProfileKind::TorusType, nodes)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Shoelace area of the closed polygon (the axis closes sphere-type
    /// arcs); negative for clockwise profiles.
    pub fn signed_area(&self) -> f64 {
        let k = self.nodes.len();
        0.5 * (0..k)
            .map(|i| {
                let [r0, z0] = self.nodes[i];
                let [r1, z1] = self.nodes[(i + 1) % k];
                r0 * z1 - r1 * z0
            })
            .sum::<f64>()
    }

    /// Polygon area plus the circular caps `κ c³/12` between each chord and
    /// the curve, so the value barely depends on the node count.
    pub fn enclosed_area(&self) -> f64 {
        let k = self.nodes.len();
        let kappa: Vec<f64> = (0..k)
            .map(|i| {
                let (prev, next) = self.neighbours(i);
                menger(prev, self.nodes[i], next)
            })
            .collect();
        let caps: f64 = self
            .spacings()
            .iter()
            .enumerate()
            .map(|(i, c)| 0.5 * (kappa[i] + kappa[(i + 1) % k]) * c.powi(3) / 12.0)
            .sum();
        self.signed_area().abs() + caps
    }

    pub fn spacings(&self) -> Vec<f64> {
        let k = self.nodes.len();
        let segments = match self.kind {
            ProfileKind::SphereType => k - 1,
            ProfileKind::TorusType => k,
        };
        (0..segments).map(|i| dist(self.nodes[i], self.nodes[(i + 1) % k])).collect()
    }

    pub fn length(&self) -> f64 {
        self.spacings().iter().sum()
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacings().into_iter().fold(f64::INFINITY, f64::min)
    }

    fn validate(&self) -> Result<()> {
        let k = self.nodes.len();
        match self.kind {
            ProfileKind::SphereType => {
                if self.nodes[0][0] != 0.0 || self.nodes[k - 1][0] != 0.0 {
                    return Err(GeomError::domain("sphere-type profile must start and end on the axis"));
                }
                if self.nodes[1..k - 1].iter().any(|p| !(p[0] > 0.0)) {
                    return Err(GeomError::domain("interior profile nodes must have r > 0"));
                }
            }
            ProfileKind::TorusType => {
                if self.nodes.iter().any(|p| !(p[0] > 0.0)) {
                    return Err(GeomError::domain("torus-type profile must stay off the axis"));
                }
            }
        }
        if self.min_spacing() <= MIN_SPACING {
            return Err(GeomError::Degenerate(format!("node spacing below {MIN_SPACING}")));
        }
        if let Some((i, j)) = self.first_crossing() {
            return Err(GeomError::domain(format!("profile segments {i} and {j} intersect")));
        }
        Ok(())
    }

    /// Indices of the first pair of non-adjacent intersecting segments.
    pub fn first_crossing(&self) -> Option<(usize, usize)> {
        let k = self.nodes.len();
        let closed = self.kind == ProfileKind::TorusType;
        let segments = if closed { k } else { k - 1 };
        let seg = |i: usize| (self.nodes[i], self.nodes[(i + 1) % k]);
        for i in 0..segments {
            let (a0, a1) = seg(i);
            for j in (i + 2)..segments {
                if closed && i == 0 && j == segments - 1 {
                    continue;
                }
                let (b0, b1) = seg(j);
                if segments_intersect(a0, a1, b0, b1) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Neighbours of node `i` (with mirror ghosts at the axis).
    fn neighbours(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        let k = self.nodes.len();
        match self.kind {
            ProfileKind::TorusType => (self.nodes[(i + k - 1) % k], self.nodes[(i + 1) % k]),
            ProfileKind::SphereType => {
                let prev = if i == 0 { mirror(self.nodes[1]) } else { self.nodes[i - 1] };
                let next = if i == k - 1 { mirror(self.nodes[k - 2]) } else { self.nodes[i + 1] };
                (prev, next)
            }
        }
    }

    fn is_axis_node(&self, i: usize) -> bool {
        self.kind == ProfileKind::SphereType && (i == 0 || i == self.nodes.len() - 1)
    }
}

/// Nodes on the curve `θ ↦ point(θ)`, `θ` from `π/2` down to `-π/2`,
/// equally spaced in arclength; the endpoints are snapped to the axis.
fn equal_arc_nodes(count: usize, point: impl Fn(f64) -> [f64; 2]) -> Vec<[f64; 2]> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let count = count.max(3);
    let dense = 64 * count;
    let theta = |j: usize| FRAC_PI_2 - PI * j as f64 / dense as f64;
    let mut cumulative = vec![0.0; dense + 1];
    let mut prev = point(theta(0));
    for j in 1..=dense {
        let q = point(theta(j));
        cumulative[j] = cumulative[j - 1] + dist(prev, q);
        prev = q;
    }
    let total = cumulative[dense];
    let mut seg = 0;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let s = total * i as f64 / (count - 1) as f64;
        while seg + 1 < dense && cumulative[seg + 1] < s {
            seg += 1;
        }
        let frac = ((s - cumulative[seg]) / (cumulative[seg + 1] - cumulative[seg])).clamp(0.0, 1.0);
        let th = theta(seg) - frac * PI / dense as f64;
        let mut p = point(th);
        if i == 0 || i == count - 1 {
            p[0] = 0.0;
        }
        out.push(p);
    }
    out
}

fn mirror(p: [f64; 2]) -> [f64; 2] {
    [-p[0], p[1]]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> bool {
    if a0[0].max(a1[0]) < b0[0].min(b1[0])
        || b0[0].max(b1[0]) < a0[0].min(a1[0])
        || a0[1].max(a1[1]) < b0[1].min(b1[1])
        || b0[1].max(b1[1]) < a0[1].min(a1[1])
    {
        return false;
    }
    let d1 = cross(b0, b1, a0);
    let d2 = cross(b0, b1, a1);
    let d3 = cross(a0, a1, b0);
    let d4 = cross(a0, a1, b1);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

/// Unit tangent from the non-uniform three-point derivative.
fn tangent(prev: [f64; 2], x: [f64; 2], next: [f64; 2]) -> [f64; 2] {
    let hm = dist(prev, x);
    let hp = dist(x, next);
    let mut t = [0.0; 2];
    for c in 0..2 {
        t[c] = (hm * hm * (next[c] - x[c]) + hp * hp * (x[c] - prev[c])) / (hm * hp * (hm + hp));
    }
    let norm = t[0].hypot(t[1]);
    [t[0] / norm, t[1] / norm]
}

/// Signed Menger curvature of the circle through three points; positive
/// when turning clockwise.
fn menger(prev: [f64; 2], x: [f64; 2], next: [f64; 2]) -> f64 {
    let twice_area = cross(prev, x, next);
    -2.0 * twice_area / (dist(prev, x) * dist(x, next) * dist(prev, next))
}

/// `(n-1)κκ_rot + C(n-1,2)κ_rot²`, doubled.
pub fn scalar_curvature(n: usize, kappa: f64, kappa_rot: f64) -> f64 {
    let m = (n - 1) as f64;
    2.0 * (m * kappa * kappa_rot + binomial(n as i64 - 1, 2) * kappa_rot * kappa_rot)
}

pub fn curvatures_of_revolution(profile: &ProfileCurve) -> Result<Vec<NodeCurvature>> {
    let k = profile.nodes.len();
    let n = profile.n;
    if profile.min_spacing() <= MIN_SPACING {
        return Err(GeomError::Degenerate(format!("node spacing below {MIN_SPACING}")));
    }
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let x = profile.nodes[i];
        let (prev, next) = profile.neighbours(i);
        let t = tangent(prev, x, next);
        let normal = [t[1], -t[0]];
        let kappa = menger(prev, x, next);
        let kappa_rot = if profile.is_axis_node(i) {
            kappa
        } else if x[0] > 0.0 {
            -normal[0] / x[0]
        } else {
            return Err(GeomError::Degenerate(format!("node {i} lies on the axis")));
        };
        out.push(NodeCurvature {
            kappa,
            kappa_rot,
            h: kappa + (n - 1) as f64 * kappa_rot,
            r: scalar_curvature(n, kappa, kappa_rot),
            normal,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sphere_curvatures_are_exact() {
        for (n, rho) in [(2usize, 1.0), (3, 2.0), (5, 0.7)] {
            let p = ProfileCurve::sphere(n, rho, 101).unwrap();
            for c in curvatures_of_revolution(&p).unwrap() {
                assert!((c.h - n as f64 / rho).abs() < 1e-11, "{}", c.h);
                assert!((c.r - (n * (n - 1)) as f64 / (rho * rho)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn orientation_is_normalized() {
        let mut nodes = ProfileCurve::sphere(2, 1.0, 21).unwrap().nodes;
        nodes.reverse();
        let p = ProfileCurve::new(2, ProfileKind::SphereType, nodes).unwrap();
        assert!(p.signed_area() < 0.0);
        assert!(curvatures_of_revolution(&p).unwrap().iter().all(|c| c.h > 0.0));
    }

    #[test]
    fn torus_extreme_points_match_closed_form() {
        let (n, a) = (4usize, 2.5);
        let p = ProfileCurve::torus(n, a, 1.0, 400).unwrap();
        let curv = curvatures_of_revolution(&p).unwrap();
        let outer = p.nodes.iter().enumerate().max_by(|x, y| x.1[0].total_cmp(&y.1[0])).unwrap().0;
        let inner = p.nodes.iter().enumerate().min_by(|x, y| x.1[0].total_cmp(&y.1[0])).unwrap().0;
        for (i, r) in [(outer, a + 1.0), (inner, a - 1.0)] {
            let t = 1.0 - a / r;
            assert!((curv[i].h - ((n - 1) as f64 * t + 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(ProfileCurve::new(2, ProfileKind::SphereType, vec![[0.1, 1.0], [1.0, 0.0], [0.0, -1.0]]).is_err());
        assert!(ProfileCurve::new(
            2,
            ProfileKind::TorusType,
            vec![[1.0, 0.0], [2.0, 1.0], [2.0, 0.0], [1.0, 1.0]]
        )
        .is_err());
        assert!(ProfileCurve::new(1, ProfileKind::SphereType, vec![[0.0, 1.0], [1.0, 0.0], [0.0, -1.0]]).is_err());
    }

    #[test]
    fn superellipse_is_flat_at_the_poles() {
        let p = ProfileCurve::superellipse(2, 4.0, 1.0, 200).unwrap();
        let curv = curvatures_of_revolution(&p).unwrap();
        assert!(curv[0].kappa.abs() < 0.05 && curv.iter().all(|c| c.r > -1e-9));
    }
}
