//! Elementary symmetric functions of square matrices and the trace/minor
//! identity relating `σ₁(A)σ₁(A|1)` to `σ₂(A)`.
//!
//! `σ_k(A)` is the sum of all principal `k×k` minors, i.e. (up to sign) the
//! coefficient of `λ^{n-k}` in `det(λI - A)`. It is defined for any real
//! matrix, symmetric or not.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};

/// Above this size `σ_k` switches from minor enumeration to the
/// Newton/Faddeev–LeVerrier trace recurrence.
pub const MINOR_ENUMERATION_LIMIT: usize = 12;

/// A finite real square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<f64>);

impl SquareMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GeomError::domain(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(GeomError::domain("matrix dimension must be positive"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite("matrix entry".into()));
        }
        Ok(SquareMatrix(m))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(GeomError::domain(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        SquareMatrix(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// `σ_k(A)`: sum of the principal `k×k` minors. `σ₀ = 1`, `σ₁ = tr A`.
pub fn sigma_k(a: &SquareMatrix, k: usize) -> Result<f64> {
    let n = a.n();
    if k > n {
        return Err(GeomError::domain(format!("k = {k} exceeds n = {n}")));
    }
    Ok(match k {
        0 => 1.0,
        1 => a.0.trace(),
        _ if n <= MINOR_ENUMERATION_LIMIT => principal_minor_sum(&a.0, k),
        _ => sigmas_by_trace_recurrence(&a.0)[k],
    })
}

/// All of `σ₀..σₙ` at once.
pub fn all_sigmas(a: &SquareMatrix) -> Vec<f64> {
    let n = a.n();
    if n <= MINOR_ENUMERATION_LIMIT {
        (0..=n)
            .map(|k| sigma_k(a, k).expect("k within range"))
            .collect()
    } else {
        sigmas_by_trace_recurrence(&a.0)
    }
}

fn principal_minor_sum(m: &DMatrix<f64>, k: usize) -> f64 {
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut terms = Vec::new();
    loop {
        let sub = DMatrix::from_fn(k, k, |r, c| m[(idx[r], idx[c])]);
        terms.push(sub.determinant());
        // next k-combination in lexicographic order
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    crate::numeric::pairwise_sum(&terms)
}

/// Newton's identities on power sums `p_j = tr(A^j)`:
/// `k σ_k = Σ_{i=1..k} (-1)^{i-1} σ_{k-i} p_i`.
fn sigmas_by_trace_recurrence(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut power = m.clone();
    let mut p = vec![0.0; n + 1];
    for (j, slot) in p.iter_mut().enumerate().skip(1) {
        if j > 1 {
            power = &power * m;
        }
        *slot = power.trace();
    }
    let mut sigma = vec![0.0; n + 1];
    sigma[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * sigma[k - i] * p[i];
        }
        sigma[k] = acc / k as f64;
    }
    sigma
}

/// `σ₁(A|1)`: the trace with the (1,1) entry removed.
pub fn sigma1_minor(a: &SquareMatrix) -> Result<f64> {
    if a.n() < 2 {
        return Err(GeomError::domain("σ₁(A|1) needs n >= 2"));
    }
    Ok((1..a.n()).map(|i| a.get(i, i)).sum())
}

/// The five pieces of the trace/minor identity and its residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityBreakdown {
    /// `σ₁(A)·σ₁(A|1)`
    pub lhs: f64,
    pub term_sigma2: f64,
    /// `n/(2(n-1)) · σ₁(A|1)²`
    pub term_square: f64,
    /// `Σ_{i<j} a_ij a_ji`
    pub term_offdiag: f64,
    /// `1/(2(n-1)) · Σ_{2<=i<j} (a_ii - a_jj)²`
    pub term_spread: f64,
    pub residual: f64,
}

impl IdentityBreakdown {
    /// `lhs - σ₂ - n/(2(n-1))σ₁(A|1)²`, nonnegative whenever every
    /// `a_ij a_ji >= 0`.
    pub fn inequality_gap(&self) -> f64 {
        self.lhs - self.term_sigma2 - self.term_square
    }
}

/// Roundoff bound on the identity residual: `64 n² ε max|a|²`.
pub fn residual_bound(a: &SquareMatrix) -> f64 {
    let n = a.n() as f64;
    64.0 * n * n * f64::EPSILON * a.max_abs().powi(2)
}

pub fn identity_breakdown(a: &SquareMatrix) -> Result<IdentityBreakdown> {
    let n = a.n();
    if n < 2 {
        return Err(GeomError::domain("identity needs n >= 2"));
    }
    let nf = n as f64;
    let s1 = a.0.trace();
    let s1_minor = sigma1_minor(a)?;

    // σ₂ from its explicit pairwise form so the check does not route
    // through determinants.
    let mut sigma2_terms = Vec::with_capacity(n * (n - 1) / 2);
    let mut offdiag_terms = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            sigma2_terms.push(a.get(i, i) * a.get(j, j) - a.get(i, j) * a.get(j, i));
            offdiag_terms.push(a.get(i, j) * a.get(j, i));
        }
    }
    let mut spread_terms = Vec::new();
    for i in 1..n {
        for j in (i + 1)..n {
            spread_terms.push((a.get(i, i) - a.get(j, j)).powi(2));
        }
    }
    let sum = crate::numeric::pairwise_sum;
    let lhs = s1 * s1_minor;
    let term_sigma2 = sum(&sigma2_terms);
    let term_square = nf / (2.0 * (nf - 1.0)) * s1_minor * s1_minor;
    let term_offdiag = sum(&offdiag_terms);
    let term_spread = sum(&spread_terms) / (2.0 * (nf - 1.0));
    let residual = lhs - (term_sigma2 + term_square + term_offdiag + term_spread);
    Ok(IdentityBreakdown {
        lhs,
        term_sigma2,
        term_square,
        term_offdiag,
        term_spread,
        residual,
    })
}
