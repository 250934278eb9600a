//! Level sets `Σ_c = {f = c}` of a graph's height function, their mean
//! curvature inside ℝⁿ, and the pointwise inequality
//! `⟨ν,η⟩ H H_Σ ≥ R/2 + n/(2(n-1)) ⟨ν,η⟩² H_Σ²` with equality diagnostics.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GeomError, Result};
use crate::graphgeo::{curvature_at, principal_curvatures};
use crate::jets::{jet_at, Jet2, JetScheme, ScalarField};
use crate::numeric::{adapted_frame, inf_norm};

pub const DEFAULT_GRAD_FLOOR: f64 = 1e-8;
pub const DEFAULT_LEVEL_TOL: f64 = 1e-10;

/// Choice of unit normal `η = s·Df/|Df|` of a level set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    AlongGradient,
    AgainstGradient,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::AlongGradient => 1.0,
            Orientation::AgainstGradient => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::AlongGradient => Orientation::AgainstGradient,
            Orientation::AgainstGradient => Orientation::AlongGradient,
        }
    }

    pub fn both() -> [Orientation; 2] {
        [Orientation::AlongGradient, Orientation::AgainstGradient]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    pub level_tol: f64,
    pub grad_floor: f64,
    pub max_iter: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            level_tol: DEFAULT_LEVEL_TOL,
            grad_floor: DEFAULT_GRAD_FLOOR,
            max_iter: 200,
        }
    }
}

fn gradient_checked(field: &dyn ScalarField, x: &[f64], floor: f64) -> Result<Jet2> {
    let jet = jet_at(field, x, JetScheme::preferred(field, x))?;
    let norm = jet.grad_norm();
    if !(norm >= floor) {
        return Err(GeomError::GradientBelowFloor { norm, floor });
    }
    Ok(jet)
}

/// Newton iteration along the gradient towards `f = c`.
pub fn project_to_level(
    field: &dyn ScalarField,
    seed: &[f64],
    c: f64,
    opts: &ProjectionOptions,
) -> Result<Vec<f64>> {
    let mut x = seed.to_vec();
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let jet = gradient_checked(field, &x, opts.grad_floor)?;
        residual = jet.f - c;
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let step = jet.df.clone() * (residual / jet.df.norm_squared());
        if residual.abs() <= opts.level_tol && step.norm() <= 1e-12 * scale {
            return Ok(x);
        }
        let mut factor = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi - factor * si).collect();
            if field.admissible(&trial) {
                x = trial;
                break;
            }
            factor *= 0.5;
            if factor < 1e-6 {
                return Err(GeomError::NotAdmissible { field: field.name(), point: trial });
            }
        }
    }
    Err(GeomError::NoConvergence { iterations: opts.max_iter, residual })
}

fn check_floor(jet: &Jet2, floor: f64) -> Result<f64> {
    let norm = jet.grad_norm();
    if !(norm >= floor) {
        return Err(GeomError::GradientBelowFloor { norm, floor });
    }
    Ok(norm)
}

/// `Δf - Dfᵀ D²f Df / |Df|²`, the trace of `D²f` over the level's tangent
/// space.
fn tangential_laplacian(jet: &Jet2) -> f64 {
    let q = (jet.df.transpose() * &jet.d2f * &jet.df)[(0, 0)] / jet.df.norm_squared();
    jet.d2f.trace() - q
}

/// Mean curvature of `Σ ⊂ ℝⁿ` with respect to `η`.
pub fn level_mean_curvature(jet: &Jet2, orientation: Orientation, grad_floor: f64) -> Result<f64> {
    let g = check_floor(jet, grad_floor)?;
    Ok(-orientation.sign() * tangential_laplacian(jet) / g)
}

pub fn level_normal(jet: &Jet2, orientation: Orientation) -> DVector<f64> {
    &jet.df * (orientation.sign() / jet.grad_norm())
}

/// Umbilicity of `Σ` and the two-curvature pattern of the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualityDiagnostics {
    pub umbilicity_defect: f64,
    pub principal_cluster_defect: f64,
}

/// Both sides of the inequality at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct HhrCheck {
    pub cos_angle: f64,
    pub h: f64,
    pub r: f64,
    pub h_sigma: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub diagnostics: EqualityDiagnostics,
}

impl HhrCheck {
    /// Size of the terms, for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.lhs.abs().max(self.rhs.abs()).max(self.r.abs())
    }
}

pub fn hhr_check(jet: &Jet2, orientation: Orientation, grad_floor: f64) -> Result<HhrCheck> {
    let n = jet.dim();
    if n < 2 {
        return Err(GeomError::domain("the level-set inequality needs n >= 2"));
    }
    let g = check_floor(jet, grad_floor)?;
    let s = orientation.sign();
    let w = (1.0 + g * g).sqrt();
    let curv = curvature_at(jet)?;
    let tangential = tangential_laplacian(jet);
    let h_sigma = -s * tangential / g;
    let cos_angle = -s * g / w;
    // ⟨ν,η⟩·H_Σ is orientation-free; computing it directly avoids the
    // 1/|Df| · |Df| round trip.
    let coupled = tangential / w;
    let nf = n as f64;
    let lhs = curv.h * coupled;
    let rhs = 0.5 * curv.r + nf / (2.0 * (nf - 1.0)) * coupled * coupled;

    let frame = adapted_frame(&(&jet.df / g));
    let rotated = frame.transpose() * &jet.d2f * &frame;
    let kappa_bar = h_sigma / (nf - 1.0);
    let a_sigma: DMatrix<f64> = rotated.view((1, 1), (n - 1, n - 1)) * (-s / g);
    let umbilicity_defect = inf_norm(&(a_sigma - DMatrix::identity(n - 1, n - 1) * kappa_bar));
    let lambda = cos_angle * kappa_bar;
    let principal = principal_curvatures(jet)?;
    let principal_cluster_defect = (0..n)
        .map(|skip| {
            principal
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, k)| (k - lambda).abs())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);

    Ok(HhrCheck {
        cos_angle,
        h: curv.h,
        r: curv.r,
        h_sigma,
        lhs,
        rhs,
        gap: lhs - rhs,
        diagnostics: EqualityDiagnostics { umbilicity_defect, principal_cluster_defect },
    })
}

/// A checked point on a level set.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPoint {
    pub x: Vec<f64>,
    pub c: f64,
    pub jet: Jet2,
    pub eta: DVector<f64>,
    pub cos_angle: f64,
    pub h_sigma: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub diagnostics: EqualityDiagnostics,
}

impl LevelPoint {
    pub fn evaluate(
        field: &dyn ScalarField,
        x: Vec<f64>,
        c: f64,
        orientation: Orientation,
        grad_floor: f64,
    ) -> Result<Self> {
        let jet = jet_at(field, &x, JetScheme::preferred(field, &x))?;
        let check = hhr_check(&jet, orientation, grad_floor)?;
        Ok(LevelPoint {
            x,
            c,
            eta: level_normal(&jet, orientation),
            jet,
            cos_angle: check.cos_angle,
            h_sigma: check.h_sigma,
            lhs: check.lhs,
            rhs: check.rhs,
            gap: check.gap,
            diagnostics: check.diagnostics,
        })
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn cube(n: usize, half_width: f64) -> Self {
        Region { lo: vec![-half_width; n], hi: vec![half_width; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub points: Vec<LevelPoint>,
    /// Bracketing cells whose projection failed (critical or outside the
    /// admissible region).
    pub rejected: usize,
}

/// Scan grid edges for sign changes of `f - c`, project each bracket onto
/// the level, and drop points within one grid spacing of an earlier one.
pub fn trace_level(
    field: &dyn ScalarField,
    c: f64,
    region: &Region,
    resolution: usize,
    orientation: Orientation,
    opts: &ProjectionOptions,
) -> Result<TraceResult> {
    let n = field.dim();
    if region.dim() != n || region.lo.iter().zip(&region.hi).any(|(a, b)| !(a < b)) {
        return Err(GeomError::domain("region must be a nondegenerate box of the field's dimension"));
    }
    if resolution < 1 {
        return Err(GeomError::domain("grid resolution must be positive"));
    }
    let per_axis = resolution + 1;
    let spacing: Vec<f64> = (0..n).map(|i| (region.hi[i] - region.lo[i]) / resolution as f64).collect();
    let min_spacing = spacing.iter().copied().fold(f64::INFINITY, f64::min);
    let total = per_axis.pow(n as u32);
    let node = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[i] = region.lo[i] + spacing[i] * (idx % per_axis) as f64;
            idx /= per_axis;
        }
        x
    };
    let values: Vec<Option<f64>> = (0..total)
        .map(|idx| {
            let x = node(idx);
            field.admissible(&x).then(|| field.eval(&x) - c).filter(|v| v.is_finite())
        })
        .collect();

    let mut points: Vec<LevelPoint> = Vec::new();
    let mut rejected = 0;
    for idx in 0..total {
        let Some(v0) = values[idx] else { continue };
        let mut stride = 1;
        for axis in 0..n {
            let coord = (idx / stride) % per_axis;
            if coord + 1 < per_axis {
                if let Some(v1) = values[idx + stride] {
                    if (v0 <= 0.0) != (v1 <= 0.0) {
                        let mut seed = node(idx);
                        seed[axis] += spacing[axis] * v0 / (v0 - v1);
                        match project_to_level(field, &seed, c, opts)
                            .and_then(|x| LevelPoint::evaluate(field, x, c, orientation, opts.grad_floor))
                        {
                            Ok(p) => {
                                let duplicate = points.iter().any(|q| {
                                    q.x.iter().zip(&p.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                                        < min_spacing
                                });
                                if !duplicate {
                                    points.push(p);
                                }
                            }
                            Err(_) => rejected += 1,
                        }
                    }
                }
            }
            stride *= per_axis;
        }
    }
    Ok(TraceResult { points, rejected })
}

/// Random points on random levels: draw `x` in `region`, take `c = f(x)`,
/// perturb `x` by up to `jitter` per coordinate, and project back.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub region: Region,
    pub count: usize,
    pub jitter: f64,
    pub orientation: Orientation,
    pub projection: ProjectionOptions,
    pub max_attempts: usize,
}

impl SamplePlan {
    pub fn new(region: Region, count: usize) -> Self {
        SamplePlan {
            region,
            count,
            jitter: 0.05,
            orientation: Orientation::AlongGradient,
            projection: ProjectionOptions::default(),
            max_attempts: 20 * count.max(1),
        }
    }
}

pub fn sample_level_points<R: Rng>(field: &dyn ScalarField, plan: &SamplePlan, rng: &mut R) -> Vec<LevelPoint> {
    let n = field.dim();
    let (region, opts) = (&plan.region, &plan.projection);
    let mut out = Vec::with_capacity(plan.count);
    let mut attempts = 0;
    while out.len() < plan.count && attempts < plan.max_attempts {
        attempts += 1;
        let x: Vec<f64> = (0..n).map(|i| rng.gen_range(region.lo[i]..region.hi[i])).collect();
        if !field.admissible(&x) {
            continue;
        }
        let c = field.eval(&x);
        let seed: Vec<f64> = x.iter().map(|v| v + rng.gen_range(-plan.jitter..=plan.jitter)).collect();
        if !field.admissible(&seed) {
            continue;
        }
        if let Ok(p) = project_to_level(field, &seed, c, opts)
            .and_then(|y| LevelPoint::evaluate(field, y, c, plan.orientation, opts.grad_floor))
        {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Affine, CubicSheet, Hemisphere, Polynomial, RadialField};

    #[test]
    fn projection_onto_linear_and_spherical_levels() {
        let opts = ProjectionOptions::default();
        let x = project_to_level(&Affine::coordinate(3, 2), &[0.4, -1.0, 5.0], 0.3, &opts).unwrap();
        assert!((x[2] - 0.3).abs() < 1e-15 && x[0] == 0.4);
        let hemi = RadialField::new(Hemisphere { radius: 1.0 }, 2);
        let x = project_to_level(&hemi, &[0.3, 0.4], -0.8, &opts).unwrap();
        assert!(((x[0] * x[0] + x[1] * x[1]).sqrt() - 0.6).abs() < 1e-10);
    }

    #[test]
    fn critical_level_is_refused() {
        let err = project_to_level(&CubicSheet { n: 2 }, &[0.0, 0.7], 0.0, &ProjectionOptions::default());
        assert!(matches!(err, Err(GeomError::GradientBelowFloor { .. })), "{err:?}");
    }

    #[test]
    fn round_sphere_level_curvature() {
        for n in 2..=4 {
            let f = Polynomial::parse(
                &(1..=n).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join("+"),
                Some(n),
            )
            .unwrap();
            let mut x = vec![0.0; n];
            x[0] = 0.6;
            x[1] = -0.8;
            let jet = jet_at(&f, &x, JetScheme::Analytic).unwrap();
            let inward = level_mean_curvature(&jet, Orientation::AgainstGradient, 1e-8).unwrap();
            assert!((inward - (n - 1) as f64).abs() < 1e-13);
            let outward = level_mean_curvature(&jet, Orientation::AlongGradient, 1e-8).unwrap();
            assert_eq!(outward, -inward);
        }
    }

    #[test]
    fn hemisphere_equality() {
        for n in 2..=5 {
            let hemi = RadialField::new(Hemisphere { radius: 1.0 }, n);
            let mut x = vec![0.0; n];
            x[0] = 0.35;
            x[n - 1] = 0.5;
            let jet = jet_at(&hemi, &x, JetScheme::Analytic).unwrap();
            for o in Orientation::both() {
                let chk = hhr_check(&jet, o, 1e-8).unwrap();
                let nn = (n * (n - 1)) as f64;
                assert!((chk.lhs - nn).abs() < 1e-11 && (chk.rhs - nn).abs() < 1e-11);
                assert!(chk.gap.abs() < 1e-9);
                assert!(chk.diagnostics.umbilicity_defect < 1e-9);
                assert!(chk.diagnostics.principal_cluster_defect < 1e-9);
            }
        }
    }

    #[test]
    fn flat_levels() {
        let jet = jet_at(&Affine::coordinate(3, 0), &[0.1, 0.2, 0.3], JetScheme::Analytic).unwrap();
        let chk = hhr_check(&jet, Orientation::AlongGradient, 1e-8).unwrap();
        assert_eq!((chk.lhs, chk.rhs, chk.gap, chk.h_sigma), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn trace_hemisphere_level() {
        let hemi = RadialField::new(Hemisphere { radius: 1.0 }, 2);
        let out = trace_level(
            &hemi,
            -0.8,
            &Region::cube(2, 0.999),
            40,
            Orientation::AgainstGradient,
            &ProjectionOptions::default(),
        )
        .unwrap();
        assert!(out.points.len() > 20);
        for p in &out.points {
            let rho = (p.x[0] * p.x[0] + p.x[1] * p.x[1]).sqrt();
            assert!((rho - 0.6).abs() < 1e-8);
            assert!(p.gap.abs() < 1e-9);
        }
        let empty = trace_level(
            &Affine::zero(2),
            1.0,
            &Region::cube(2, 1.0),
            10,
            Orientation::AlongGradient,
            &ProjectionOptions::default(),
        )
        .unwrap();
        assert!(empty.points.is_empty());
    }

    #[test]
    fn trace_cube_root_level() {
        let f = Polynomial::parse("x2^3 - 0.001", Some(2)).unwrap();
        let out = trace_level(
            &f,
            0.0,
            &Region::cube(2, 1.0),
            8,
            Orientation::AlongGradient,
            &ProjectionOptions::default(),
        )
        .unwrap();
        assert!(!out.points.is_empty());
        assert!(out.points.iter().all(|p| (p.x[1] - 0.1).abs() < 1e-9));
    }
}
