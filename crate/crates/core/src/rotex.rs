//! Rotational example families with closed-form σ_k profiles, and the
//! Schwarzschild graph.
//!
//! Both families are lower graph patches of tori obtained by rotating a unit
//! sphere centred at distance `a` from an axis:
//!
//! * `Odd`: the circle `(r-a)² + (x^{n+1})² = 1`, `r = |x|`, principal
//!   curvatures `t` (×(n-1)) and `1`;
//! * `Even`: the 2-sphere `(r-a)² + (xⁿ)² + (x^{n+1})² = 1`,
//!   `r = |(x¹,…,x^{n-1})|`, principal curvatures `t` (×(n-2)) and `1, 1`,
//!
//! where `t = 1 - a/r`.

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::fields::{RadialField, SchwarzschildProfile, SharedField, SphereBundleArc, TorusArc};
use crate::numeric::binomial;

/// Width of the band near `r = a ± 1` excluded from the graph patches.
pub const BOUNDARY_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Odd,
    Even,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Odd => "odd",
            Variant::Even => "even",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "odd" => Ok(Variant::Odd),
            "even" => Ok(Variant::Even),
            other => Err(GeomError::parse(other, "variant must be `odd` or `even`")),
        }
    }

    /// Largest `k <= n` of the right parity.
    pub fn default_k(self, n: usize) -> usize {
        match self {
            Variant::Odd => n - (1 - n % 2),
            Variant::Even => n - n % 2,
        }
    }

    fn min_n(self) -> usize {
        match self {
            Variant::Odd => 3,
            Variant::Even => 4,
        }
    }

    /// Number of principal curvatures equal to `t`.
    fn rotational_multiplicity(self, n: usize) -> usize {
        match self {
            Variant::Odd => n - 1,
            Variant::Even => n - 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalFamily {
    pub variant: Variant,
    pub n: usize,
    pub k: usize,
    pub a: f64,
}

impl RotationalFamily {
    pub fn new(variant: Variant, n: usize, k: usize, a: f64) -> Result<Self> {
        check_parity(variant, n, k)?;
        if !(a > 1.0 && a.is_finite()) {
            return Err(GeomError::domain(format!("a must exceed 1, got {a}")));
        }
        Ok(RotationalFamily { variant, n, k, a })
    }

    /// Open interval `(a-1, a+1)` of radii covered by the profile.
    pub fn r_range(&self) -> (f64, f64) {
        (self.a - 1.0, self.a + 1.0)
    }

    pub fn t(&self, r: f64) -> f64 {
        1.0 - self.a / r
    }

    /// Closed-form principal curvatures at radius `r`, ascending.
    pub fn principal_curvatures(&self, r: f64) -> Vec<f64> {
        let t = self.t(r);
        let m = self.variant.rotational_multiplicity(self.n);
        let mut out = vec![t; m];
        out.resize(self.n, 1.0);
        out.sort_by(f64::total_cmp);
        out
    }
}

fn check_parity(variant: Variant, n: usize, k: usize) -> Result<()> {
    if n < variant.min_n() {
        return Err(GeomError::domain(format!(
            "{} variant needs n >= {}, got {n}",
            variant.name(),
            variant.min_n()
        )));
    }
    let ok = match variant {
        Variant::Odd => k % 2 == 1 && (3..=n).contains(&k),
        Variant::Even => k.is_multiple_of(2) && (4..=n).contains(&k),
    };
    if ok {
        Ok(())
    } else {
        Err(GeomError::domain(format!(
            "k = {k} is not valid for the {} variant with n = {n}",
            variant.name()
        )))
    }
}

/// `σ_j` of the family's shape operator at radius `r`.
pub fn sigma_profile(family: &RotationalFamily, j: usize, r: f64) -> Result<f64> {
    let (lo, hi) = family.r_range();
    if !(r > lo && r < hi) {
        return Err(GeomError::domain(format!("r = {r} outside ({lo}, {hi})")));
    }
    if j < 1 || j > family.n {
        return Err(GeomError::domain(format!("j = {j} outside [1, {}]", family.n)));
    }
    let t = family.t(r);
    let m = family.variant.rotational_multiplicity(family.n) as i64;
    let j = j as i64;
    let term = |coef: f64, power: i64| if power < 0 || coef == 0.0 { 0.0 } else { coef * t.powi(power as i32) };
    Ok(match family.variant {
        Variant::Odd => term(binomial(m, j), j) + term(binomial(m, j - 1), j - 1),
        Variant::Even => {
            term(binomial(m, j), j) + term(2.0 * binomial(m, j - 1), j - 1) + term(binomial(m, j - 2), j - 2)
        }
    })
}

/// Admissible `a`-window for a variant together with the even-variant
/// constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowReport {
    pub variant: Variant,
    pub n: usize,
    pub k: usize,
    /// Open interval `(lo, hi)`; `lo >= hi` means empty.
    pub window: (f64, f64),
    /// `b(n,k)`; `NaN` for the odd variant.
    pub b_nk: f64,
    /// `n/2 - 1 - b(n,k)`; `NaN` for the odd variant.
    pub margin: f64,
    /// Margin recomputed from the factored form `c(n,k)·{…}`.
    pub margin_factored: f64,
}

impl WindowReport {
    pub fn is_empty(&self) -> bool {
        !(self.window.0 < self.window.1)
    }

    pub fn contains(&self, a: f64) -> bool {
        a > self.window.0 && a < self.window.1
    }
}

pub fn b_nk(n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    (nf - kf) / (kf - 1.0) + ((nf - 1.0) * (nf - kf) / kf).sqrt() / (kf - 1.0)
}

pub fn c_nk(n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    nf / (kf - 1.0) / ((kf - 3.0) * nf / 2.0 + 1.0 + ((nf - 1.0) * (nf - kf) / kf).sqrt())
}

/// `c(n,k)·{[(k-3)²/4 - 1/k]·n + (k - 2 + 1/k)}`.
pub fn margin_factored(n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    c_nk(n, k) * (((kf - 3.0).powi(2) / 4.0 - 1.0 / kf) * nf + (kf - 2.0 + 1.0 / kf))
}

pub fn admissible_window(variant: Variant, n: usize, k: usize) -> Result<WindowReport> {
    if variant == Variant::Even && k == 2 {
        if n < 2 {
            return Err(GeomError::domain(format!("n = {n} too small")));
        }
        let b = b_nk(n, 2);
        return Ok(WindowReport {
            variant,
            n,
            k,
            window: (f64::NAN, f64::NAN),
            b_nk: b,
            margin: n as f64 / 2.0 - 1.0 - b,
            margin_factored: f64::NAN,
        });
    }
    check_parity(variant, n, k)?;
    let nf = n as f64;
    Ok(match variant {
        Variant::Odd => WindowReport {
            variant,
            n,
            k,
            window: (nf / k as f64, nf),
            b_nk: f64::NAN,
            margin: f64::NAN,
            margin_factored: f64::NAN,
        },
        Variant::Even => {
            let b = b_nk(n, k);
            WindowReport {
                variant,
                n,
                k,
                window: (1.0 + b, nf / 2.0),
                b_nk: b,
                margin: nf / 2.0 - 1.0 - b,
                margin_factored: margin_factored(n, k),
            }
        }
    })
}

/// Radius where `σ₁` changes sign: `(n-1)a/n` (odd) or `(n-2)a/n` (even).
pub fn sign_change_radius(variant: Variant, n: usize, a: f64) -> Result<f64> {
    if n < variant.min_n() {
        return Err(GeomError::domain(format!("n = {n} too small for the {} variant", variant.name())));
    }
    let nf = n as f64;
    let upper = match variant {
        Variant::Odd => nf,
        Variant::Even => nf / 2.0,
    };
    if !(a > 1.0 && a < upper) {
        return Err(GeomError::domain(format!("a = {a} outside (1, {upper})")));
    }
    let m = variant.rotational_multiplicity(n) as f64;
    Ok(m * a / nf)
}

/// Lower graph patch carrying the family's geometry.
pub fn family_field(family: &RotationalFamily) -> SharedField {
    match family.variant {
        Variant::Odd => Arc::new(RadialField::new(
            TorusArc { n: family.n, center: family.a, band: BOUNDARY_BAND },
            family.n,
        )),
        Variant::Even => Arc::new(SphereBundleArc { n: family.n, center: family.a, band: BOUNDARY_BAND }),
    }
}

pub fn schwarzschild_field(n: usize, m: f64) -> Result<SharedField> {
    if n < 3 {
        return Err(GeomError::domain(format!("schwarzschild needs n >= 3, got {n}")));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(GeomError::domain(format!("mass must be positive, got {m}")));
    }
    Ok(Arc::new(RadialField::new(SchwarzschildProfile::new(n, m), n)))
}

/// Result of scanning a profile over a uniform `r`-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSweep {
    pub radii: Vec<f64>,
    pub sigma_k: Vec<f64>,
    pub sigma_1: Vec<f64>,
    pub min_sigma_k: f64,
    /// Midpoints of grid cells where `σ₁` changes sign.
    pub sigma1_crossings: Vec<f64>,
    pub cell: f64,
}

/// Evaluate `σ_k` and `σ₁` on `points` interior nodes of `(a-1, a+1)`.
pub fn sweep(family: &RotationalFamily, points: usize) -> Result<ProfileSweep> {
    if points < 2 {
        return Err(GeomError::domain("sweep needs at least two grid points"));
    }
    let (lo, hi) = family.r_range();
    let cell = (hi - lo) / (points + 1) as f64;
    let radii: Vec<f64> = (1..=points).map(|i| lo + cell * i as f64).collect();
    let mut sigma_k = Vec::with_capacity(points);
    let mut sigma_1 = Vec::with_capacity(points);
    for &r in &radii {
        sigma_k.push(sigma_profile(family, family.k, r)?);
        sigma_1.push(sigma_profile(family, 1, r)?);
    }
    let min_sigma_k = sigma_k.iter().copied().fold(f64::INFINITY, f64::min);
    let sigma1_crossings = sigma_1
        .windows(2)
        .zip(radii.windows(2))
        .filter(|(s, _)| (s[0] < 0.0) != (s[1] < 0.0))
        .map(|(_, r)| 0.5 * (r[0] + r[1]))
        .collect();
    Ok(ProfileSweep { radii, sigma_k, sigma_1, min_sigma_k, sigma1_crossings, cell })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_parity() {
        assert_eq!(Variant::Odd.default_k(5), 5);
        assert_eq!(Variant::Odd.default_k(6), 5);
        assert_eq!(Variant::Even.default_k(7), 6);
        assert!(RotationalFamily::new(Variant::Odd, 5, 2, 2.0).is_err());
        assert!(RotationalFamily::new(Variant::Even, 6, 3, 2.0).is_err());
        assert!(RotationalFamily::new(Variant::Even, 3, 4, 2.0).is_err());
        assert!(RotationalFamily::new(Variant::Odd, 5, 3, 0.9).is_err());
    }

    #[test]
    fn sigma_profile_at_t_zero() {
        let odd = RotationalFamily::new(Variant::Odd, 5, 3, 2.5).unwrap();
        assert_eq!(sigma_profile(&odd, 1, 2.5).unwrap(), 1.0);
        let even = RotationalFamily::new(Variant::Even, 6, 4, 2.5).unwrap();
        assert_eq!(sigma_profile(&even, 1, 2.5).unwrap(), 2.0);
        assert_eq!(sigma_profile(&even, 2, 2.5).unwrap(), 1.0);
        assert_eq!(sigma_profile(&even, 3, 2.5).unwrap(), 0.0);
        assert!(sigma_profile(&odd, 1, 1.5).is_err());
        assert!(sigma_profile(&odd, 6, 2.0).is_err());
    }

    #[test]
    fn even_top_sigmas_follow_the_convention() {
        let f = RotationalFamily::new(Variant::Even, 6, 6, 2.2).unwrap();
        for r in [1.3, 1.9, 2.2, 3.1] {
            let t = f.t(r);
            let top = sigma_profile(&f, 6, r).unwrap();
            let next = sigma_profile(&f, 5, r).unwrap();
            assert!((top - t.powi(4)).abs() < 1e-15);
            assert!((next - (2.0 * t.powi(4) + 4.0 * t.powi(3))).abs() < 1e-14);
            assert!(top >= 0.0);
        }
    }

    #[test]
    fn closed_form_matches_elementary_symmetric_of_spectrum() {
        for (variant, n, k) in [(Variant::Odd, 7, 5), (Variant::Even, 8, 6)] {
            let f = RotationalFamily::new(variant, n, k, 2.2).unwrap();
            for r in [1.5, 2.0, 2.9] {
                let e = crate::numeric::elementary_symmetric(&f.principal_curvatures(r));
                for (j, expected) in e.iter().enumerate().skip(1) {
                    let v = sigma_profile(&f, j, r).unwrap();
                    assert!((v - expected).abs() < 1e-12 * (1.0 + expected.abs()));
                }
            }
        }
    }

    #[test]
    fn windows() {
        let w = admissible_window(Variant::Even, 4, 4).unwrap();
        assert_eq!(w.b_nk, 0.0);
        assert_eq!(w.window, (1.0, 2.0));
        assert!((w.margin - 1.0).abs() < 1e-15);
        let w = admissible_window(Variant::Even, 6, 4).unwrap();
        let b = 2.0 / 3.0 + (2.5f64).sqrt() / 3.0;
        assert!((w.b_nk - b).abs() < 1e-15);
        assert!((w.window.0 - 2.1937).abs() < 1e-4 && w.window.1 == 3.0);
        assert!((w.margin - 0.8063).abs() < 1e-4);
        assert!((w.margin - w.margin_factored).abs() < 1e-12);
        let w = admissible_window(Variant::Odd, 5, 3).unwrap();
        assert_eq!(w.window, (5.0 / 3.0, 5.0));
        assert!(admissible_window(Variant::Even, 6, 2).unwrap().is_empty());
        assert!(admissible_window(Variant::Even, 6, 3).is_err());
    }

    #[test]
    fn sign_change_radii() {
        assert_eq!(sign_change_radius(Variant::Odd, 5, 2.5).unwrap(), 2.0);
        assert_eq!(sign_change_radius(Variant::Even, 4, 1.5).unwrap(), 0.75);
        assert!((sign_change_radius(Variant::Odd, 3, 2.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(sign_change_radius(Variant::Even, 4, 2.5).is_err());
        assert!(sign_change_radius(Variant::Odd, 5, 0.5).is_err());
    }

    #[test]
    fn schwarzschild_validation() {
        assert!(schwarzschild_field(2, 1.0).is_err());
        assert!(schwarzschild_field(3, 0.0).is_err());
        assert_eq!(schwarzschild_field(5, 1.0).unwrap().dim(), 5);
    }
}
