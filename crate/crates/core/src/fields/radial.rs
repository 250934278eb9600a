//! Rotationally symmetric fields `f(x) = φ(|x|)`.

use nalgebra::{DMatrix, DVector};

use crate::jets::ScalarField;

/// A radial profile `ρ ↦ φ(ρ)` with its first two derivatives.
pub trait RadialProfile: Send + Sync {
    fn label(&self) -> String;
    fn value(&self, rho: f64) -> f64;
    fn d1(&self, rho: f64) -> f64;
    fn d2(&self, rho: f64) -> f64;
    fn admissible(&self, rho: f64) -> bool;
    /// Whether φ'(0) = 0 so the field is smooth through the origin.
    fn regular_at_origin(&self) -> bool {
        false
    }
}

/// `f(x) = φ(|x|)` on ℝⁿ.
pub struct RadialField<P> {
    pub profile: P,
    pub n: usize,
}

impl<P: RadialProfile> RadialField<P> {
    pub fn new(profile: P, n: usize) -> Self {
        RadialField { profile, n }
    }
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl<P: RadialProfile> ScalarField for RadialField<P> {
    fn name(&self) -> String {
        self.profile.label()
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.profile.value(radius(x))
    }

    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        let rho = radius(x);
        if rho == 0.0 {
            return self.profile.regular_at_origin().then(|| DVector::zeros(self.n));
        }
        let d1 = self.profile.d1(rho);
        Some(DVector::from_iterator(self.n, x.iter().map(|v| d1 * v / rho)))
    }

    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let rho = radius(x);
        if rho == 0.0 {
            return self
                .profile
                .regular_at_origin()
                .then(|| DMatrix::identity(self.n, self.n) * self.profile.d2(0.0));
        }
        let d1 = self.profile.d1(rho);
        let d2 = self.profile.d2(rho);
        let unit = DVector::from_iterator(self.n, x.iter().map(|v| v / rho));
        let radial = &unit * unit.transpose();
        let tangential = DMatrix::identity(self.n, self.n) - &radial;
        Some(radial * d2 + tangential * (d1 / rho))
    }

    fn admissible(&self, x: &[f64]) -> bool {
        let rho = radius(x);
        (rho > 0.0 || self.profile.regular_at_origin()) && self.profile.admissible(rho)
    }

    fn has_analytic_derivatives(&self) -> bool {
        true
    }
}

/// Lower hemisphere `φ(ρ) = -√(R² - ρ²)`.
#[derive(Debug, Clone, Copy)]
pub struct Hemisphere {
    pub radius: f64,
}

impl RadialProfile for Hemisphere {
    fn label(&self) -> String {
        format!("hemisphere({})", self.radius)
    }
    fn value(&self, rho: f64) -> f64 {
        -(self.radius * self.radius - rho * rho).sqrt()
    }
    fn d1(&self, rho: f64) -> f64 {
        rho / (self.radius * self.radius - rho * rho).sqrt()
    }
    fn d2(&self, rho: f64) -> f64 {
        let s2 = self.radius * self.radius - rho * rho;
        self.radius * self.radius / (s2 * s2.sqrt())
    }
    fn admissible(&self, rho: f64) -> bool {
        rho < self.radius * (1.0 - 1e-9)
    }
    fn regular_at_origin(&self) -> bool {
        true
    }
}

/// `φ(ρ) = c ρ^p` away from the origin.
#[derive(Debug, Clone, Copy)]
pub struct PowerLaw {
    pub coefficient: f64,
    pub exponent: f64,
}

impl RadialProfile for PowerLaw {
    fn label(&self) -> String {
        format!("power({},{})", self.coefficient, self.exponent)
    }
    fn value(&self, rho: f64) -> f64 {
        self.coefficient * rho.powf(self.exponent)
    }
    fn d1(&self, rho: f64) -> f64 {
        self.coefficient * self.exponent * rho.powf(self.exponent - 1.0)
    }
    fn d2(&self, rho: f64) -> f64 {
        self.coefficient * self.exponent * (self.exponent - 1.0) * rho.powf(self.exponent - 2.0)
    }
    fn admissible(&self, rho: f64) -> bool {
        rho > 0.0
    }
}

/// Compactly supported `C³` bump `A ((ρ-r₁)(r₂-ρ)/h²)⁴` on `[r₁, r₂]`,
/// `h = (r₂-r₁)/2`, zero elsewhere.
#[derive(Debug, Clone, Copy)]
pub struct AnnularBump {
    pub inner: f64,
    pub outer: f64,
    pub amplitude: f64,
}

impl AnnularBump {
    fn parts(&self, rho: f64) -> Option<(f64, f64, f64)> {
        if rho <= self.inner || rho >= self.outer {
            return None;
        }
        let h2 = (0.5 * (self.outer - self.inner)).powi(2);
        let q = (rho - self.inner) * (self.outer - rho) / h2;
        let dq = (self.inner + self.outer - 2.0 * rho) / h2;
        let d2q = -2.0 / h2;
        Some((q, dq, d2q))
    }
}

impl RadialProfile for AnnularBump {
    fn label(&self) -> String {
        format!("bump({},{},{})", self.inner, self.outer, self.amplitude)
    }
    fn value(&self, rho: f64) -> f64 {
        self.parts(rho).map_or(0.0, |(q, _, _)| self.amplitude * q.powi(4))
    }
    fn d1(&self, rho: f64) -> f64 {
        self.parts(rho)
            .map_or(0.0, |(q, dq, _)| 4.0 * self.amplitude * q.powi(3) * dq)
    }
    fn d2(&self, rho: f64) -> f64 {
        self.parts(rho).map_or(0.0, |(q, dq, d2q)| {
            self.amplitude * (12.0 * q * q * dq * dq + 4.0 * q.powi(3) * d2q)
        })
    }
    fn admissible(&self, _rho: f64) -> bool {
        true
    }
    fn regular_at_origin(&self) -> bool {
        self.inner > 0.0
    }
}

/// Lower arc of the unit circle centred at `ρ = a`:
/// `φ(ρ) = -√(1 - (ρ-a)²)`, kept a band away from `ρ = a ± 1`.
#[derive(Debug, Clone, Copy)]
pub struct TorusArc {
    pub n: usize,
    pub center: f64,
    pub band: f64,
}

impl RadialProfile for TorusArc {
    fn label(&self) -> String {
        format!("rot_odd({},{})", self.n, self.center)
    }
    fn value(&self, rho: f64) -> f64 {
        -(1.0 - (rho - self.center).powi(2)).sqrt()
    }
    fn d1(&self, rho: f64) -> f64 {
        let u = rho - self.center;
        u / (1.0 - u * u).sqrt()
    }
    fn d2(&self, rho: f64) -> f64 {
        let s2 = 1.0 - (rho - self.center).powi(2);
        1.0 / (s2 * s2.sqrt())
    }
    fn admissible(&self, rho: f64) -> bool {
        (rho - self.center).abs() < 1.0 - self.band
    }
}
