//! Graph of the lower half of `(r-a)² + (xⁿ)² + (x^{n+1})² = 1` with
//! `r = |(x¹,…,x^{n-1})|`: the `𝕊²×𝕊^{n-2}` example family.

use nalgebra::{DMatrix, DVector};

use crate::jets::ScalarField;

#[derive(Debug, Clone, Copy)]
pub struct SphereBundleArc {
    pub n: usize,
    pub center: f64,
    pub band: f64,
}

impl SphereBundleArc {
    fn split(&self, x: &[f64]) -> (f64, f64) {
        let r = x[..self.n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        (r, x[self.n - 1])
    }

    fn root(&self, r: f64, z: f64) -> f64 {
        (1.0 - (r - self.center).powi(2) - z * z).sqrt()
    }
}

impl ScalarField for SphereBundleArc {
    fn name(&self) -> String {
        format!("rot_even({},{})", self.n, self.center)
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let (r, z) = self.split(x);
        -self.root(r, z)
    }

    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        let (r, z) = self.split(x);
        let s = self.root(r, z);
        let psi_r = (r - self.center) / s;
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n - 1 {
            g[i] = psi_r * x[i] / r;
        }
        g[self.n - 1] = z / s;
        Some(g)
    }

    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let n = self.n;
        let (r, z) = self.split(x);
        let u = r - self.center;
        let s = self.root(r, z);
        let s3 = s * s * s;
        let psi_r = u / s;
        let psi_rr = 1.0 / s + u * u / s3;
        let psi_rz = u * z / s3;
        let psi_zz = 1.0 / s + z * z / s3;
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            let yi = x[i] / r;
            for j in 0..n - 1 {
                let yj = x[j] / r;
                let delta = if i == j { 1.0 } else { 0.0 };
                h[(i, j)] = psi_rr * yi * yj + psi_r / r * (delta - yi * yj);
            }
            h[(i, n - 1)] = psi_rz * yi;
            h[(n - 1, i)] = psi_rz * yi;
        }
        h[(n - 1, n - 1)] = psi_zz;
        Some(h)
    }

    fn admissible(&self, x: &[f64]) -> bool {
        let (r, z) = self.split(x);
        r > 0.0 && ((r - self.center).powi(2) + z * z).sqrt() < 1.0 - self.band
    }

    fn has_analytic_derivatives(&self) -> bool {
        true
    }
}
