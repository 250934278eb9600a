use nalgebra::{DMatrix, DVector};

use crate::jets::ScalarField;

/// `f(x) = c + a·x`; the zero field when everything vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub offset: f64,
    pub slope: Vec<f64>,
}

impl Affine {
    pub fn zero(n: usize) -> Self {
        Affine { offset: 0.0, slope: vec![0.0; n] }
    }

    /// `f(x) = x^{axis+1}`.
    pub fn coordinate(n: usize, axis: usize) -> Self {
        let mut slope = vec![0.0; n];
        slope[axis] = 1.0;
        Affine { offset: 0.0, slope }
    }
}

impl ScalarField for Affine {
    fn name(&self) -> String {
        if self.offset == 0.0 && self.slope.iter().all(|&a| a == 0.0) {
            return "plane".into();
        }
        let parts: Vec<String> = std::iter::once(self.offset)
            .chain(self.slope.iter().copied())
            .map(|v| v.to_string())
            .collect();
        format!("plane({})", parts.join(","))
    }
    fn dim(&self) -> usize {
        self.slope.len()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.offset + self.slope.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
    }
    fn gradient(&self, _x: &[f64]) -> Option<DVector<f64>> {
        Some(DVector::from_column_slice(&self.slope))
    }
    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::zeros(self.dim(), self.dim()))
    }
    fn has_analytic_derivatives(&self) -> bool {
        true
    }
}

/// `f(x) = (xⁿ)³`: scalar-flat, mean curvature changes sign across `xⁿ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct CubicSheet {
    pub n: usize,
}

impl ScalarField for CubicSheet {
    fn name(&self) -> String {
        "cubic_sheet".into()
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &[f64]) -> f64 {
        x[self.n - 1].powi(3)
    }
    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        let mut g = DVector::zeros(self.n);
        g[self.n - 1] = 3.0 * x[self.n - 1].powi(2);
        Some(g)
    }
    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let mut h = DMatrix::zeros(self.n, self.n);
        h[(self.n - 1, self.n - 1)] = 6.0 * x[self.n - 1];
        Some(h)
    }
    fn has_analytic_derivatives(&self) -> bool {
        true
    }
}

/// Lower half of a round cylinder over the `x¹` direction:
/// `f(x) = -√(R² - (x¹)²)`.
#[derive(Debug, Clone, Copy)]
pub struct Cylinder {
    pub n: usize,
    pub radius: f64,
}

impl ScalarField for Cylinder {
    fn name(&self) -> String {
        format!("cylinder({})", self.radius)
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &[f64]) -> f64 {
        -(self.radius * self.radius - x[0] * x[0]).sqrt()
    }
    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        let mut g = DVector::zeros(self.n);
        g[0] = x[0] / (self.radius * self.radius - x[0] * x[0]).sqrt();
        Some(g)
    }
    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let s2 = self.radius * self.radius - x[0] * x[0];
        let mut h = DMatrix::zeros(self.n, self.n);
        h[(0, 0)] = self.radius * self.radius / (s2 * s2.sqrt());
        Some(h)
    }
    fn admissible(&self, x: &[f64]) -> bool {
        x[0].abs() < self.radius * (1.0 - 1e-9)
    }
    fn has_analytic_derivatives(&self) -> bool {
        true
    }
}
