//! Product quadrature rules on the unit sphere `𝕊^{n-1} ⊂ ℝⁿ`, chosen by
//! dimension.

use std::f64::consts::PI;

use crate::error::{GeomError, Result};
use crate::numeric::gauss_legendre;

/// Surface area of the unit sphere `𝕊^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n - 2) as f64 * sphere_area(n - 2),
    }
}

/// Resolution of a sphere rule: `polar` Gauss nodes per polar angle and
/// `2·polar` equispaced azimuthal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub polar: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { polar: 16 }
    }
}

impl QuadratureSpec {
    pub fn new(polar: usize) -> Result<Self> {
        if polar < 2 {
            return Err(GeomError::domain(format!("quadrature resolution {polar} below 2")));
        }
        Ok(QuadratureSpec { polar })
    }

    pub fn refined(self) -> Self {
        QuadratureSpec { polar: 2 * self.polar }
    }

    pub fn azimuthal(self) -> usize {
        2 * self.polar
    }
}

/// A unit direction and its weight; weights sum to the sphere's area.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereNode {
    pub direction: Vec<f64>,
    pub weight: f64,
}

pub trait SphereRule: Send + Sync {
    fn label(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn nodes(&self) -> Vec<SphereNode>;
}

/// Composite trapezoid on the circle.
pub struct CircleTrapezoid {
    pub points: usize,
}

impl SphereRule for CircleTrapezoid {
    fn label(&self) -> &'static str {
        "trapezoid"
    }
    fn dim(&self) -> usize {
        2
    }
    fn nodes(&self) -> Vec<SphereNode> {
        let w = 2.0 * PI / self.points as f64;
        (0..self.points)
            .map(|j| {
                let t = w * j as f64;
                SphereNode { direction: vec![t.cos(), t.sin()], weight: w }
            })
            .collect()
    }
}

/// Gauss–Legendre in `cos θ` times trapezoid in the azimuth.
pub struct GaussTrapezoid2 {
    pub polar: usize,
    pub azimuthal: usize,
}

impl SphereRule for GaussTrapezoid2 {
    fn label(&self) -> &'static str {
        "gauss-legendre x trapezoid"
    }
    fn dim(&self) -> usize {
        3
    }
    fn nodes(&self) -> Vec<SphereNode> {
        let (u, wu) = gauss_legendre(self.polar);
        let dphi = 2.0 * PI / self.azimuthal as f64;
        let mut out = Vec::with_capacity(self.polar * self.azimuthal);
        for (z, wz) in u.iter().zip(&wu) {
            let s = (1.0 - z * z).sqrt();
            for j in 0..self.azimuthal {
                let phi = dphi * j as f64;
                out.push(SphereNode { direction: vec![s * phi.cos(), s * phi.sin(), *z], weight: wz * dphi });
            }
        }
        out
    }
}

/// Iterated spherical angles `θ₁…θ_{n-2} ∈ [0,π]` with Gauss–Legendre
/// nodes and `sin^{n-2-i} θ_i` weights, plus a trapezoid azimuth.
pub struct HypersphericalProduct {
    pub n: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl SphereRule for HypersphericalProduct {
    fn label(&self) -> &'static str {
        "hyperspherical gauss-legendre product"
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn nodes(&self) -> Vec<SphereNode> {
        let n = self.n;
        let (u, wu) = gauss_legendre(self.polar);
        let theta: Vec<f64> = u.iter().map(|x| 0.5 * PI * (x + 1.0)).collect();
        let dphi = 2.0 * PI / self.azimuthal as f64;
        let angles = n - 2;
        let mut out = Vec::with_capacity(self.polar.pow(angles as u32) * self.azimuthal);
        let mut idx = vec![0usize; angles];
        loop {
            let mut dir = vec![0.0; n];
            let mut sin_prod = 1.0;
            let mut weight = dphi;
            for (i, &k) in idx.iter().enumerate() {
                let t = theta[k];
                dir[i] = sin_prod * t.cos();
                weight *= 0.5 * PI * wu[k] * t.sin().powi((n - 2 - i) as i32);
                sin_prod *= t.sin();
            }
            for j in 0..self.azimuthal {
                let phi = dphi * j as f64;
                let mut d = dir.clone();
                d[n - 2] = sin_prod * phi.cos();
                d[n - 1] = sin_prod * phi.sin();
                out.push(SphereNode { direction: d, weight });
            }
            let mut pos = 0;
            loop {
                if pos == angles {
                    return out;
                }
                idx[pos] += 1;
                if idx[pos] < self.polar {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Rule for `𝕊^{n-1}`: trapezoid for `n = 2`, Gauss × trapezoid for
/// `n = 3`, hyperspherical product beyond.
pub fn sphere_rule(n: usize, spec: QuadratureSpec) -> Result<Box<dyn SphereRule>> {
    Ok(match n {
        0 | 1 => return Err(GeomError::domain(format!("no sphere rule for n = {n}"))),
        2 => Box::new(CircleTrapezoid { points: 2 * spec.azimuthal() }),
        3 => Box::new(GaussTrapezoid2 { polar: spec.polar, azimuthal: spec.azimuthal() }),
        _ => Box::new(HypersphericalProduct { n, polar: spec.polar, azimuthal: spec.azimuthal() }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn weights_sum_to_area_and_nodes_are_unit() {
        for n in 2..=6 {
            let rule = sphere_rule(n, QuadratureSpec::new(16).unwrap()).unwrap();
            assert_eq!(rule.dim(), n);
            let nodes = rule.nodes();
            let total: f64 = nodes.iter().map(|p| p.weight).sum();
            assert!((total - sphere_area(n)).abs() < 1e-10 * sphere_area(n), "n={n}: {total}");
            for p in &nodes {
                let norm: f64 = p.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn second_moments() {
        // ∫ x_i² dσ = area / n on 𝕊^{n-1}
        for n in 2..=5 {
            let nodes = sphere_rule(n, QuadratureSpec::new(16).unwrap()).unwrap().nodes();
            for i in 0..n {
                let m: f64 = nodes.iter().map(|p| p.weight * p.direction[i].powi(2)).sum();
                assert!((m - sphere_area(n) / n as f64).abs() < 1e-10, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn rejects_tiny_resolution() {
        assert!(QuadratureSpec::new(1).is_err());
        assert!(sphere_rule(1, QuadratureSpec::default()).is_err());
    }
}
