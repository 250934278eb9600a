//! Graphical mass: the boundary flux integral over large spheres, its
//! extrapolated limit, the interior/inner-boundary decomposition, and the
//! chart-form comparison integral.

use nalgebra::DVector;

use crate::error::{GeomError, Result};
use crate::graphgeo::{curvature_at, flux_vector};
use crate::jets::{jet_at, Jet2, JetScheme, ScalarField};
use crate::levelset::{level_mean_curvature, Orientation, DEFAULT_GRAD_FLOOR};
use crate::numeric::{bracketed_root, composite_gauss_legendre, pairwise_sum};
use crate::quadrature::{sphere_area, sphere_rule, QuadratureSpec, SphereNode};

/// `1/(2(n-1)ω_{n-1})`.
pub fn mass_prefactor(n: usize) -> f64 {
    1.0 / (2.0 * (n as f64 - 1.0) * sphere_area(n))
}

fn jet_on_ray(field: &dyn ScalarField, rho: f64, dir: &[f64]) -> Result<Jet2> {
    let x: Vec<f64> = dir.iter().map(|d| rho * d).collect();
    jet_at(field, &x, JetScheme::preferred(field, &x))
}

fn nodes_for(field: &dyn ScalarField, quad: QuadratureSpec) -> Result<Vec<SphereNode>> {
    let n = field.dim();
    if n < 2 {
        return Err(GeomError::domain("mass integrals need n >= 2"));
    }
    Ok(sphere_rule(n, quad)?.nodes())
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(GeomError::domain(format!("radius {r} must be positive")))
    }
}

/// Outward flux `∫_{S_r} ⟨F, x/|x|⟩ dσ` without the prefactor.
fn sphere_flux(field: &dyn ScalarField, r: f64, nodes: &[SphereNode]) -> Result<f64> {
    let area = r.powi(field.dim() as i32 - 1);
    let terms = nodes
        .iter()
        .map(|node| {
            let jet = jet_on_ray(field, r, &node.direction)?;
            let xi = DVector::from_column_slice(&node.direction);
            Ok(node.weight * area * flux_vector(&jet).dot(&xi))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

/// The mass flux integral over `S_r`, prefactor included.
pub fn boundary_mass_integral(field: &dyn ScalarField, r: f64, quad: QuadratureSpec) -> Result<f64> {
    check_radius(r)?;
    let nodes = nodes_for(field, quad)?;
    Ok(mass_prefactor(field.dim()) * sphere_flux(field, r, &nodes)?)
}

/// Limit estimate from the model `m + C r^{-p}` through the last three
/// samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub estimate: f64,
    /// Fitted `p`; `NaN` when the samples are already flat.
    pub order: f64,
    pub converged: bool,
    pub note: Option<String>,
}

/// Samples whose successive differences fall below this (relative to the
/// last value) are treated as converged.
pub const FLAT_TOLERANCE: f64 = 1e-10;

pub fn extrapolate(radii: &[f64], values: &[f64]) -> Result<Extrapolation> {
    if radii.len() != values.len() || radii.len() < 3 {
        return Err(GeomError::domain("extrapolation needs at least three samples"));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) || radii[0] <= 0.0 {
        return Err(GeomError::domain("radii must be positive and strictly increasing"));
    }
    let k = radii.len();
    let (r1, r2, r3) = (radii[k - 3], radii[k - 2], radii[k - 1]);
    let (v1, v2, v3) = (values[k - 3], values[k - 2], values[k - 1]);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::NonFinite("mass samples".into()));
    }
    let (d1, d2) = (v2 - v1, v3 - v2);
    let flat = FLAT_TOLERANCE * v3.abs().max(f64::MIN_POSITIVE);
    if d1.abs() <= flat && d2.abs() <= flat {
        return Ok(Extrapolation { estimate: v3, order: f64::NAN, converged: true, note: None });
    }
    let not_convergent = |why: &str| Extrapolation {
        estimate: v3,
        order: f64::NAN,
        converged: false,
        note: Some(format!("no convergent limit detected: {why}")),
    };
    if d1 == 0.0 || d1.signum() != d2.signum() {
        return Ok(not_convergent("differences oscillate"));
    }
    let ratio = d2 / d1;
    let (s2, s3) = (r2 / r1, r3 / r1);
    let model = |p: f64| (s2.powf(-p) - s3.powf(-p)) / (1.0 - s2.powf(-p));
    let (p_lo, p_hi) = (1e-6, 60.0);
    let g = |p: f64| model(p) - ratio;
    if !(g(p_lo) > 0.0 && g(p_hi) < 0.0) {
        return Ok(not_convergent("differences do not decay"));
    }
    let p = bracketed_root(g, p_lo, p_hi, 1e-14)?;
    let c = d1 / (r2.powf(-p) - r1.powf(-p));
    Ok(Extrapolation { estimate: v3 - c * r3.powf(-p), order: p, converged: true, note: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassReport {
    pub n: usize,
    pub radii: Vec<f64>,
    /// Prefactor included.
    pub boundary_values: Vec<f64>,
    /// `∫_{Ω_r} R dx`, prefactor included; `NaN` when not computed.
    pub interior_r_integral: f64,
    /// Inner-boundary term, prefactor included; `NaN` when not computed.
    pub level_term: f64,
    pub decomposition_residual: f64,
    pub mass_estimate: f64,
    pub extrapolation_order: f64,
    pub converged: bool,
    pub note: Option<String>,
}

impl MassReport {
    pub fn boundary_value(&self) -> f64 {
        *self.boundary_values.last().unwrap_or(&f64::NAN)
    }

    /// Residual relative to the boundary value.
    pub fn relative_residual(&self) -> f64 {
        self.decomposition_residual.abs() / self.boundary_value().abs()
    }
}

pub fn mass_limit(field: &dyn ScalarField, radii: &[f64], quad: QuadratureSpec) -> Result<MassReport> {
    if radii.len() < 3 {
        return Err(GeomError::domain("the radius schedule needs at least three radii"));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(GeomError::domain("radii must be strictly increasing"));
    }
    let nodes = nodes_for(field, quad)?;
    let pre = mass_prefactor(field.dim());
    let values = radii
        .iter()
        .map(|&r| {
            check_radius(r)?;
            Ok(pre * sphere_flux(field, r, &nodes)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let ex = extrapolate(radii, &values)?;
    Ok(MassReport {
        n: field.dim(),
        radii: radii.to_vec(),
        boundary_values: values,
        interior_r_integral: f64::NAN,
        level_term: f64::NAN,
        decomposition_residual: f64::NAN,
        mass_estimate: ex.estimate,
        extrapolation_order: ex.order,
        converged: ex.converged,
        note: ex.note,
    })
}

/// Inner boundary of the region `Ω_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerBoundary {
    /// The sphere `|x| = radius`.
    Ball(f64),
    /// The outermost part of the level `{f = c}` inside `S_r`; `Ω_r` must be
    /// star-shaped about the origin.
    Level(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmtOptions {
    pub quad: QuadratureSpec,
    pub radial_panels: usize,
    pub radial_order: usize,
    pub grad_floor: f64,
    /// Samples per ray when scanning inward for the level.
    pub scan_steps: usize,
}

impl Default for PmtOptions {
    fn default() -> Self {
        PmtOptions {
            quad: QuadratureSpec::default(),
            radial_panels: 64,
            radial_order: 8,
            grad_floor: DEFAULT_GRAD_FLOOR,
            scan_steps: 400,
        }
    }
}

/// Outermost radius in `(0, r)` along `dir` where `f = c`.
fn level_radius(field: &dyn ScalarField, r: f64, dir: &[f64], c: f64, steps: usize) -> Result<f64> {
    let value = |rho: f64| -> Option<f64> {
        let x: Vec<f64> = dir.iter().map(|d| rho * d).collect();
        field.admissible(&x).then(|| field.eval(&x) - c)
    };
    let dr = r / steps as f64;
    let mut outer = r;
    let mut g_outer = value(r).ok_or_else(|| GeomError::NotAdmissible {
        field: field.name(),
        point: dir.iter().map(|d| r * d).collect(),
    })?;
    for k in 1..steps {
        let inner = r - dr * k as f64;
        let Some(g_inner) = value(inner) else { break };
        if (g_inner <= 0.0) != (g_outer <= 0.0) {
            let root = bracketed_root(
                |rho| value(rho).unwrap_or(f64::NAN),
                inner,
                outer,
                1e-15 * r,
            )?;
            return Ok(root);
        }
        outer = inner;
        g_outer = g_inner;
    }
    Err(GeomError::domain(format!("level {c} not found along the ray {dir:?} inside r = {r}")))
}

/// Terms of `boundary = ∫_{Ω_r} R dx + inner term`, each with the mass
/// prefactor. For a level inner boundary the inner term is
/// `∫_Σ |Df|²/(1+|Df|²) H_Σ dσ` with `η` pointing away from `Ω_r`; for a
/// ball it is the outward flux through the inner sphere.
pub fn pmt_decomposition(
    field: &dyn ScalarField,
    r: f64,
    inner: InnerBoundary,
    opts: &PmtOptions,
) -> Result<MassReport> {
    check_radius(r)?;
    let n = field.dim();
    let nodes = nodes_for(field, opts.quad)?;
    let pre = mass_prefactor(n);
    let boundary = pre * sphere_flux(field, r, &nodes)?;

    let mut interior_terms = Vec::with_capacity(nodes.len());
    let mut inner_terms = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let dir = &node.direction;
        let rho_in = match inner {
            InnerBoundary::Ball(r0) => {
                if !(r0 > 0.0 && r0 < r) {
                    return Err(GeomError::domain(format!("inner radius {r0} must lie in (0, {r})")));
                }
                r0
            }
            InnerBoundary::Level(c) => level_radius(field, r, dir, c, opts.scan_steps)?,
        };
        let (rho, w) = composite_gauss_legendre(rho_in, r, opts.radial_panels, opts.radial_order);
        let radial = rho
            .iter()
            .zip(&w)
            .map(|(&p, &wt)| Ok(wt * p.powi(n as i32 - 1) * curvature_at(&jet_on_ray(field, p, dir)?)?.r))
            .collect::<Result<Vec<f64>>>()?;
        interior_terms.push(node.weight * pairwise_sum(&radial));

        let jet = jet_on_ray(field, rho_in, dir)?;
        let xi = DVector::from_column_slice(dir);
        let inner_term = match inner {
            InnerBoundary::Ball(_) => rho_in.powi(n as i32 - 1) * flux_vector(&jet).dot(&xi),
            InnerBoundary::Level(_) => {
                let radial_slope = jet.df.dot(&xi);
                let orientation = if radial_slope > 0.0 {
                    Orientation::AgainstGradient
                } else {
                    Orientation::AlongGradient
                };
                let h_sigma = level_mean_curvature(&jet, orientation, opts.grad_floor)?;
                let g2 = jet.df.norm_squared();
                let surface = rho_in.powi(n as i32 - 1) * g2.sqrt() / radial_slope.abs();
                g2 / (1.0 + g2) * h_sigma * surface
            }
        };
        inner_terms.push(node.weight * inner_term);
    }
    let interior = pre * pairwise_sum(&interior_terms);
    let level_term = pre * pairwise_sum(&inner_terms);
    Ok(MassReport {
        n,
        radii: vec![r],
        boundary_values: vec![boundary],
        interior_r_integral: interior,
        level_term,
        decomposition_residual: boundary - interior - level_term,
        mass_estimate: boundary,
        extrapolation_order: f64::NAN,
        converged: true,
        note: None,
    })
}

/// Chart-form flux over `S_r`:
/// `∫ Σ (f_ii f_j - f_ij f_i)(μ^j + μ(f) f_j) √(1+|Dᵀf|²)/√(1+μ(f)²) dσ`
/// with `μ = x/|x|` and `Dᵀf` the gradient tangent to `S_r`, prefactor
/// included.
pub fn adm_mass_chart(field: &dyn ScalarField, r: f64, quad: QuadratureSpec) -> Result<f64> {
    let n = field.dim();
    if n < 3 {
        return Err(GeomError::domain("the chart-form mass is defined for n >= 3"));
    }
    check_radius(r)?;
    let nodes = nodes_for(field, quad)?;
    let area = r.powi(n as i32 - 1);
    let terms = nodes
        .iter()
        .map(|node| {
            let jet = jet_on_ray(field, r, &node.direction)?;
            let mu = DVector::from_column_slice(&node.direction);
            let radial = jet.df.dot(&mu);
            let tangential = &jet.df - &mu * radial;
            let weighted_flux = &jet.df * jet.d2f.trace() - &jet.d2f * &jet.df;
            let direction = &mu + &jet.df * radial;
            let value = weighted_flux.dot(&direction) * (1.0 + tangential.norm_squared()).sqrt()
                / (1.0 + radial * radial).sqrt();
            Ok(node.weight * area * value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mass_prefactor(n) * pairwise_sum(&terms))
}
