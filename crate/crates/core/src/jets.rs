//! Point-local 2-jets (value, gradient, Hessian) of scalar fields on ℝⁿ.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// A scalar field `f: ℝⁿ ⊃ U → ℝ` whose graph `x^{n+1} = f(x)` is the
/// hypersurface under study.
///
/// Implementations must be re-entrant: evaluation may happen concurrently
/// from several threads.
pub trait ScalarField: Send + Sync {
    /// Catalog-style name including parameters, e.g. `hemisphere(1)`.
    fn name(&self) -> String;

    /// Dimension `n` of the hyperplane the graph lives over.
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    fn gradient(&self, _x: &[f64]) -> Option<DVector<f64>> {
        None
    }

    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Admissible region; defaults to all of ℝⁿ.
    fn admissible(&self, _x: &[f64]) -> bool {
        true
    }

    fn has_analytic_derivatives(&self) -> bool {
        false
    }
}

impl fmt::Debug for dyn ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self.name())
    }
}

/// How a jet was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetScheme {
    Analytic,
    CentralFd { h: f64 },
}

impl JetScheme {
    /// Default finite-difference step `max(1e-4, 1e-4 |x|∞)`.
    pub fn default_fd(x: &[f64]) -> Self {
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        JetScheme::CentralFd {
            h: (1e-4f64).max(1e-4 * scale),
        }
    }

    /// Analytic when the field supports it, otherwise the default FD step.
    pub fn preferred(field: &dyn ScalarField, x: &[f64]) -> Self {
        if field.has_analytic_derivatives() {
            JetScheme::Analytic
        } else {
            Self::default_fd(x)
        }
    }
}

/// Value, gradient and (symmetric) Hessian of a field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub x: DVector<f64>,
    pub f: f64,
    pub df: DVector<f64>,
    pub d2f: DMatrix<f64>,
    pub scheme: JetScheme,
}

impl Jet2 {
    /// Build a jet from raw parts. The Hessian is symmetrized.
    pub fn new(x: DVector<f64>, f: f64, df: DVector<f64>, d2f: DMatrix<f64>) -> Result<Self> {
        let n = x.len();
        if df.len() != n || d2f.nrows() != n || d2f.ncols() != n {
            return Err(GeomError::domain("jet component dimensions disagree"));
        }
        let jet = Jet2 {
            x,
            f,
            df,
            d2f: symmetrize(&d2f),
            scheme: JetScheme::Analytic,
        };
        jet.check_finite()?;
        Ok(jet)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn grad_norm(&self) -> f64 {
        self.df.norm()
    }

    /// Jet of `-f`.
    pub fn negated(&self) -> Jet2 {
        Jet2 {
            x: self.x.clone(),
            f: -self.f,
            df: -&self.df,
            d2f: -&self.d2f,
            scheme: self.scheme,
        }
    }

    /// Jet of `g(y) = f(Qᵀ y)` at `y = Q x` for an orthogonal `Q`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Jet2 {
        Jet2 {
            x: q * &self.x,
            f: self.f,
            df: q * &self.df,
            d2f: q * &self.d2f * q.transpose(),
            scheme: self.scheme,
        }
    }

    fn check_finite(&self) -> Result<()> {
        if !self.f.is_finite()
            || self.df.iter().any(|v| !v.is_finite())
            || self.d2f.iter().any(|v| !v.is_finite())
        {
            return Err(GeomError::NonFinite(format!("jet at {:?}", self.x.as_slice())));
        }
        Ok(())
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn eval_checked(field: &dyn ScalarField, p: &[f64]) -> Result<f64> {
    if !field.admissible(p) {
        return Err(GeomError::NotAdmissible {
            field: field.name(),
            point: p.to_vec(),
        });
    }
    let v = field.eval(p);
    if !v.is_finite() {
        return Err(GeomError::NonFinite(format!("{} at {:?}", field.name(), p)));
    }
    Ok(v)
}

/// Evaluate the 2-jet of `field` at `x`.
pub fn jet_at(field: &dyn ScalarField, x: &[f64], scheme: JetScheme) -> Result<Jet2> {
    let n = field.dim();
    if x.len() != n {
        return Err(GeomError::domain(format!(
            "point has {} coordinates, field `{}` has dimension {n}",
            x.len(),
            field.name()
        )));
    }
    let f0 = eval_checked(field, x)?;
    let jet = match scheme {
        JetScheme::Analytic => {
            let df = field
                .gradient(x)
                .ok_or_else(|| GeomError::MissingDerivative(field.name()))?;
            let d2f = field
                .hessian(x)
                .ok_or_else(|| GeomError::MissingDerivative(field.name()))?;
            Jet2 {
                x: DVector::from_column_slice(x),
                f: f0,
                df,
                d2f: symmetrize(&d2f),
                scheme,
            }
        }
        JetScheme::CentralFd { h } => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(GeomError::domain(format!("finite-difference step {h} must be positive")));
            }
            central_difference_jet(field, x, f0, h)?
        }
    };
    jet.check_finite()?;
    Ok(jet)
}

fn central_difference_jet(field: &dyn ScalarField, x: &[f64], f0: f64, h: f64) -> Result<Jet2> {
    let n = x.len();
    let mut p = x.to_vec();
    let mut shifted = |deltas: &[(usize, f64)]| -> Result<f64> {
        p.copy_from_slice(x);
        for &(i, d) in deltas {
            p[i] += d;
        }
        eval_checked(field, &p)
    };
    let mut df = DVector::zeros(n);
    let mut d2f = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = shifted(&[(i, h)])?;
        let fm = shifted(&[(i, -h)])?;
        df[i] = (fp - fm) / (2.0 * h);
        d2f[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let fpp = shifted(&[(i, h), (j, h)])?;
            let fpm = shifted(&[(i, h), (j, -h)])?;
            let fmp = shifted(&[(i, -h), (j, h)])?;
            let fmm = shifted(&[(i, -h), (j, -h)])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            d2f[(i, j)] = v;
            d2f[(j, i)] = v;
        }
    }
    Ok(Jet2 {
        x: DVector::from_column_slice(x),
        f: f0,
        df,
        d2f,
        scheme: JetScheme::CentralFd { h },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic {
        q: DMatrix<f64>,
    }

    impl ScalarField for Quadratic {
        fn name(&self) -> String {
            "quadratic".into()
        }
        fn dim(&self) -> usize {
            self.q.nrows()
        }
        fn eval(&self, x: &[f64]) -> f64 {
            let v = DVector::from_column_slice(x);
            0.5 * v.dot(&(&self.q * &v))
        }
    }

    struct Constant;

    impl ScalarField for Constant {
        fn name(&self) -> String {
            "constant".into()
        }
        fn dim(&self) -> usize {
            3
        }
        fn eval(&self, _x: &[f64]) -> f64 {
            3.0
        }
        fn gradient(&self, _x: &[f64]) -> Option<DVector<f64>> {
            Some(DVector::zeros(3))
        }
        fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
            Some(DMatrix::zeros(3, 3))
        }
        fn has_analytic_derivatives(&self) -> bool {
            true
        }
    }

    struct CubeOfLast {
        n: usize,
    }

    impl ScalarField for CubeOfLast {
        fn name(&self) -> String {
            "cube".into()
        }
        fn dim(&self) -> usize {
            self.n
        }
        fn eval(&self, x: &[f64]) -> f64 {
            x[self.n - 1].powi(3)
        }
        fn admissible(&self, x: &[f64]) -> bool {
            x[0] < 10.0
        }
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        for scheme in [JetScheme::Analytic, JetScheme::CentralFd { h: 1e-3 }] {
            let j = jet_at(&Constant, &[0.1, -2.0, 5.0], scheme).unwrap();
            assert_eq!(j.f, 3.0);
            assert!(j.df.abs().max() < 1e-12);
            assert!(j.d2f.abs().max() < 1e-12);
        }
    }

    #[test]
    fn fd_hessian_exact_on_quadratics() {
        let q = DMatrix::from_row_slice(3, 3, &[2.0, -0.5, 0.3, -0.5, 1.0, 0.7, 0.3, 0.7, -1.5]);
        let field = Quadratic { q: q.clone() };
        let x = [0.4, -0.2, 0.9];
        let j = jet_at(&field, &x, JetScheme::CentralFd { h: 1e-3 }).unwrap();
        assert!((&j.d2f - &q).abs().max() < 1e-9);
        let expected_grad = &q * DVector::from_column_slice(&x);
        assert!((&j.df - expected_grad).abs().max() < 1e-9);
        assert_eq!(j.d2f, j.d2f.transpose());
    }

    #[test]
    fn cube_of_last_coordinate() {
        let field = CubeOfLast { n: 3 };
        let j = jet_at(&field, &[0.0, 0.0, 0.5], JetScheme::CentralFd { h: 1e-4 }).unwrap();
        assert!(j.df[0].abs() < 1e-12 && j.df[1].abs() < 1e-12);
        assert!((j.df[2] - 0.75).abs() < 1e-7);
        assert!((j.d2f[(2, 2)] - 3.0).abs() < 1e-6);
        let off = j.d2f.iter().enumerate().filter(|(k, _)| *k != 8).map(|(_, v)| v.abs()).fold(0.0, f64::max);
        assert!(off < 1e-6);
    }

    #[test]
    fn missing_analytic_handles_error() {
        let field = CubeOfLast { n: 2 };
        assert!(matches!(
            jet_at(&field, &[0.0, 0.5], JetScheme::Analytic),
            Err(GeomError::MissingDerivative(_))
        ));
    }

    #[test]
    fn inadmissible_stencil_is_rejected() {
        let field = CubeOfLast { n: 2 };
        assert!(matches!(
            jet_at(&field, &[10.5, 0.0], JetScheme::default_fd(&[10.5, 0.0])),
            Err(GeomError::NotAdmissible { .. })
        ));
        assert!(jet_at(&field, &[10.0 - 5e-5, 0.0], JetScheme::CentralFd { h: 1e-4 }).is_err());
    }

    #[test]
    fn wrong_dimension_is_domain_error() {
        assert!(matches!(
            jet_at(&Constant, &[0.0], JetScheme::Analytic),
            Err(GeomError::Domain(_))
        ));
    }

    #[test]
    fn default_step_scales_with_point() {
        assert_eq!(JetScheme::default_fd(&[0.1, 0.2]), JetScheme::CentralFd { h: 1e-4 });
        assert_eq!(JetScheme::default_fd(&[-50.0, 0.2]), JetScheme::CentralFd { h: 5e-3 });
    }
}
