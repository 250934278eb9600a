//! Multivariate polynomial fields.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GeomError, Result};
use crate::jets::ScalarField;

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    fn eval_with(&self, x: &[f64], shift: &[(usize, u32)]) -> f64 {
        // value of ∂^shift of the monomial at x
        let mut coef = self.coefficient;
        let mut exps = self.exponents.clone();
        for &(i, order) in shift {
            for _ in 0..order {
                if exps[i] == 0 {
                    return 0.0;
                }
                coef *= exps[i] as f64;
                exps[i] -= 1;
            }
        }
        exps.iter()
            .zip(x)
            .fold(coef, |acc, (&e, &v)| acc * v.powi(e as i32))
    }
}

/// `f(x) = Σ c_α x^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub n: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(n: usize, terms: Vec<Monomial>) -> Result<Self> {
        if n == 0 {
            return Err(GeomError::domain("polynomial dimension must be positive"));
        }
        if terms.iter().any(|t| t.exponents.len() != n || !t.coefficient.is_finite()) {
            return Err(GeomError::domain("monomial does not match the polynomial dimension"));
        }
        Ok(Polynomial { n, terms })
    }

    /// All monomials of total degree `<= degree`, coefficients uniform in
    /// `[-scale, scale]`.
    pub fn random<R: Rng>(rng: &mut R, n: usize, degree: u32, scale: f64) -> Self {
        let mut terms = Vec::new();
        for exps in exponent_vectors(n, degree) {
            terms.push(Monomial {
                coefficient: rng.gen_range(-scale..scale),
                exponents: exps,
            });
        }
        Polynomial { n, terms }
    }

    /// Parse `0.5*x1^2*x2 - 1.2*x3 + 4`; variables are `x1..xn`.
    pub fn parse(expr: &str, n: Option<usize>) -> Result<Self> {
        let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(GeomError::parse(expr, "empty polynomial"));
        }
        let mut raw_terms: Vec<(f64, Vec<(usize, u32)>)> = Vec::new();
        for (sign, body) in split_terms(&compact) {
            if body.is_empty() {
                return Err(GeomError::parse(expr, "dangling sign"));
            }
            let mut coef = sign;
            let mut vars = Vec::new();
            for factor in body.split('*') {
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, pow) = match rest.split_once('^') {
                        Some((i, p)) => (i, p),
                        None => (rest, "1"),
                    };
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| GeomError::parse(expr, format!("bad variable `{factor}`")))?;
                    let pow: u32 = pow
                        .parse()
                        .map_err(|_| GeomError::parse(expr, format!("bad exponent in `{factor}`")))?;
                    if idx == 0 {
                        return Err(GeomError::parse(expr, "variables are numbered from x1"));
                    }
                    vars.push((idx - 1, pow));
                } else {
                    let v: f64 = factor
                        .parse()
                        .map_err(|_| GeomError::parse(expr, format!("bad factor `{factor}`")))?;
                    coef *= v;
                }
            }
            raw_terms.push((coef, vars));
        }
        let used = raw_terms
            .iter()
            .flat_map(|(_, v)| v.iter().map(|(i, _)| i + 1))
            .max()
            .unwrap_or(1);
        let n = n.unwrap_or(used);
        if used > n {
            return Err(GeomError::parse(expr, format!("uses x{used} but dimension is {n}")));
        }
        let terms = raw_terms
            .into_iter()
            .map(|(c, vars)| {
                let mut exponents = vec![0; n];
                for (i, p) in vars {
                    exponents[i] += p;
                }
                Monomial { coefficient: c, exponents }
            })
            .collect();
        Polynomial::new(n, terms)
    }

    pub fn to_expression(&self) -> String {
        let mut out = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            let c = t.coefficient;
            if k > 0 {
                out.push_str(if c < 0.0 { " - " } else { " + " });
            } else if c < 0.0 {
                out.push('-');
            }
            out.push_str(&format!("{}", c.abs()));
            for (i, &e) in t.exponents.iter().enumerate() {
                match e {
                    0 => {}
                    1 => out.push_str(&format!("*x{}", i + 1)),
                    _ => out.push_str(&format!("*x{}^{}", i + 1, e)),
                }
            }
        }
        out
    }
}

fn split_terms(s: &str) -> Vec<(f64, &str)> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut sign = 1.0;
    let mut i = 0;
    if !bytes.is_empty() && (bytes[0] == b'+' || bytes[0] == b'-') {
        sign = if bytes[0] == b'-' { -1.0 } else { 1.0 };
        start = 1;
        i = 1;
    }
    while i < bytes.len() {
        let c = bytes[i];
        let is_exponent_sign = i >= 2
            && matches!(bytes[i - 1], b'e' | b'E')
            && (bytes[i - 2].is_ascii_digit() || bytes[i - 2] == b'.');
        if (c == b'+' || c == b'-') && !is_exponent_sign {
            out.push((sign, &s[start..i]));
            sign = if c == b'-' { -1.0 } else { 1.0 };
            start = i + 1;
        }
        i += 1;
    }
    out.push((sign, &s[start..]));
    out
}

fn exponent_vectors(n: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, degree, &mut Vec::new(), &mut out);
    out
}

impl ScalarField for Polynomial {
    fn name(&self) -> String {
        format!("poly({})", self.to_expression())
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval_with(x, &[])).sum()
    }

    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        Some(DVector::from_fn(self.n, |i, _| {
            self.terms.iter().map(|t| t.eval_with(x, &[(i, 1)])).sum()
        }))
    }

    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_fn(self.n, self.n, |i, j| {
            let shift: Vec<(usize, u32)> = if i == j { vec![(i, 2)] } else { vec![(i, 1), (j, 1)] };
            self.terms.iter().map(|t| t.eval_with(x, &shift)).sum()
        }))
    }

    fn has_analytic_derivatives(&self) -> bool {
        true
    }
}
