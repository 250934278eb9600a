//! Extrinsic curvature of the graph `x^{n+1} = f(x)`.
//!
//! Conventions: `ν = (-Df, 1)/w` with `w = √(1+|Df|²)`, and the shape
//! operator `A = (1/w)(I - Df Dfᵀ/w²) D²f`, so the lower unit hemisphere has
//! `A = I` and a round sphere has `H = n/r` for the inward normal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GeomError, Result};
use crate::jets::{jet_at, Jet2, JetScheme, ScalarField};
use crate::numeric::pairwise_sum;
use crate::symfun::{all_sigmas, SquareMatrix};

pub fn normal_upward(jet: &Jet2) -> DVector<f64> {
    let n = jet.dim();
    let w = (1.0 + jet.df.norm_squared()).sqrt();
    let mut nu = DVector::zeros(n + 1);
    for i in 0..n {
        nu[i] = -jet.df[i] / w;
    }
    nu[n] = 1.0 / w;
    nu
}

pub fn metric(jet: &Jet2) -> DMatrix<f64> {
    let n = jet.dim();
    DMatrix::identity(n, n) + &jet.df * jet.df.transpose()
}

pub fn shape_operator(jet: &Jet2) -> DMatrix<f64> {
    let n = jet.dim();
    let w2 = 1.0 + jet.df.norm_squared();
    let w = w2.sqrt();
    let projector = DMatrix::identity(n, n) - &jet.df * jet.df.transpose() / w2;
    projector * &jet.d2f / w
}

/// `H(f) = Σ (δ_ij - f_i f_j/w²) f_ij / w`.
pub fn mean_curvature(jet: &Jet2) -> f64 {
    let w2 = 1.0 + jet.df.norm_squared();
    let laplacian = jet.d2f.trace();
    let hess_grad = (jet.df.transpose() * &jet.d2f * &jet.df)[(0, 0)];
    (laplacian - hess_grad / w2) / w2.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphCurvature {
    pub w: f64,
    pub nu: DVector<f64>,
    pub metric: DMatrix<f64>,
    pub shape: DMatrix<f64>,
    /// Ascending.
    pub principal: Vec<f64>,
    /// `σ₀..σ_n` of the shape operator.
    pub sigmas: Vec<f64>,
    pub h: f64,
    pub r: f64,
    pub norm_a2: f64,
}

impl GraphCurvature {
    /// Magnitude used to scale tolerances on curvature quantities.
    pub fn scale(&self) -> f64 {
        self.h * self.h + self.norm_a2
    }
}

/// Symmetric matrix `w⁻¹ G^{-1/2} D²f G^{-1/2}`, similar to the shape
/// operator.
pub fn symmetric_shape(jet: &Jet2) -> DMatrix<f64> {
    let n = jet.dim();
    let p2 = jet.df.norm_squared();
    let w = (1.0 + p2).sqrt();
    let mut inv_sqrt = DMatrix::identity(n, n);
    if p2 > 0.0 {
        inv_sqrt += &jet.df * jet.df.transpose() * ((1.0 / w - 1.0) / p2);
    }
    let s = &inv_sqrt * &jet.d2f * &inv_sqrt / w;
    (&s + s.transpose()) * 0.5
}

pub fn principal_curvatures(jet: &Jet2) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(symmetric_shape(jet), f64::EPSILON, 0)
        .ok_or_else(|| GeomError::Degenerate("symmetric eigensolve did not converge".into()))?;
    let mut k: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if k.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::NonFinite("principal curvatures".into()));
    }
    k.sort_by(f64::total_cmp);
    Ok(k)
}

pub fn curvature_at(jet: &Jet2) -> Result<GraphCurvature> {
    let shape = shape_operator(jet);
    let principal = principal_curvatures(jet)?;
    let sigmas = all_sigmas(&SquareMatrix::new(shape.clone())?);
    let h = shape.trace();
    let norm_a2 = (&shape * &shape).trace();
    Ok(GraphCurvature {
        w: (1.0 + jet.df.norm_squared()).sqrt(),
        nu: normal_upward(jet),
        metric: metric(jet),
        r: 2.0 * sigmas[2],
        shape,
        principal,
        sigmas,
        h,
        norm_a2,
    })
}

/// The flux field `F_j = Σ_i (f_ii f_j - f_ij f_i)/(1+|Df|²)` whose
/// divergence is the scalar curvature.
pub fn flux_vector(jet: &Jet2) -> DVector<f64> {
    let w2 = 1.0 + jet.df.norm_squared();
    let laplacian = jet.d2f.trace();
    (&jet.df * laplacian - &jet.d2f * &jet.df) / w2
}

/// `⟨F, ξ⟩`, the integrand of the graphical mass.
pub fn flux_integrand(jet: &Jet2, direction: &DVector<f64>) -> f64 {
    flux_vector(jet).dot(direction)
}

/// Scalar curvature as the central-difference divergence of the flux
/// field, with jets taken from the field's preferred scheme.
pub fn scalar_curvature_divergence(field: &dyn ScalarField, x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeomError::domain(format!("step {h} must be positive")));
    }
    let n = field.dim();
    if x.len() != n {
        return Err(GeomError::domain(format!("point has {} coordinates, expected {n}", x.len())));
    }
    let mut p = x.to_vec();
    let mut terms = Vec::with_capacity(n);
    for j in 0..n {
        let mut flux_at = |d: f64| -> Result<f64> {
            p.copy_from_slice(x);
            p[j] += d;
            let jet = jet_at(field, &p, JetScheme::preferred(field, &p))?;
            Ok(flux_vector(&jet)[j])
        };
        let plus = flux_at(h)?;
        let minus = flux_at(-h)?;
        terms.push((plus - minus) / (2.0 * h));
    }
    Ok(pairwise_sum(&terms))
}
