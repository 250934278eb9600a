//! Radial graph profile whose induced metric is the spatial Schwarzschild
//! metric of mass `m` in dimension `n`.
//!
//! In areal radius `s` the slice is `ds²/(1 - 2m/s^{n-2}) + s² dΩ²`, so the
//! graph height satisfies `h'(s)² = 2m/(s^{n-2} - 2m)` outside the throat
//! `s₀ = (2m)^{1/(n-2)}`. For `n = 3` this integrates to `√(8m(s-2m))`;
//! other dimensions are tabulated.

use crate::fields::radial::RadialProfile;
use crate::numeric::gauss_legendre;

const CELLS: usize = 4096;
const RANGE_FACTOR: f64 = 4096.0;

#[derive(Debug, Clone)]
pub struct SchwarzschildProfile {
    n: usize,
    m: f64,
    throat: f64,
    table: Option<HeightTable>,
}

/// Heights on a uniform grid in `u = √(s - s₀)`, where `h(u)` is smooth
/// through the throat, interpolated by cubic Hermite with ODE slopes.
#[derive(Debug, Clone)]
struct HeightTable {
    du: f64,
    heights: Vec<f64>,
    slopes: Vec<f64>,
}

impl SchwarzschildProfile {
    /// Closed form for `n = 3`, tabulated otherwise.
    pub fn new(n: usize, m: f64) -> Self {
        if n == 3 {
            Self::closed_form(m)
        } else {
            Self::tabulated(n, m)
        }
    }

    pub fn closed_form(m: f64) -> Self {
        SchwarzschildProfile { n: 3, m, throat: 2.0 * m, table: None }
    }

    /// Tabulated profile for any `n >= 3`.
    pub fn tabulated(n: usize, m: f64) -> Self {
        let k = (n - 2) as f64;
        let throat = (2.0 * m).powf(1.0 / k);
        let mut profile = SchwarzschildProfile { n, m, throat, table: None };
        let u_max = (RANGE_FACTOR * throat).sqrt();
        let du = u_max / CELLS as f64;
        let (gx, gw) = gauss_legendre(8);
        let mut heights = Vec::with_capacity(CELLS + 1);
        let mut slopes = Vec::with_capacity(CELLS + 1);
        let mut h = 0.0;
        for cell in 0..=CELLS {
            let u = cell as f64 * du;
            heights.push(h);
            slopes.push(profile.height_slope_in_u(u));
            let mid = u + 0.5 * du;
            h += gx
                .iter()
                .zip(&gw)
                .map(|(x, w)| 0.5 * du * w * profile.height_slope_in_u(mid + 0.5 * du * x))
                .sum::<f64>();
        }
        profile.table = Some(HeightTable { du, heights, slopes });
        profile
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    /// Areal radius of the horizon, where the graph turns vertical.
    pub fn throat(&self) -> f64 {
        self.throat
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    /// `(s^{k} - s₀^{k}) / (s - s₀)` with `k = n-2`, free of cancellation.
    fn difference_quotient(&self, s: f64) -> f64 {
        let k = self.n - 2;
        (0..k)
            .map(|j| s.powi((k - 1 - j) as i32) * self.throat.powi(j as i32))
            .sum()
    }

    /// `dh/du = 2u h'(s₀+u²)`, finite at `u = 0`.
    fn height_slope_in_u(&self, u: f64) -> f64 {
        let s = self.throat + u * u;
        2.0 * (2.0 * self.m).sqrt() / self.difference_quotient(s).sqrt()
    }

    fn tail_height(&self, from: f64, to: f64) -> f64 {
        let (gx, gw) = gauss_legendre(32);
        let (a, b) = (from.ln(), to.ln());
        gx.iter()
            .zip(&gw)
            .map(|(x, w)| {
                let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let s = t.exp();
                0.5 * (b - a) * w * self.d1(s) * s
            })
            .sum()
    }
}

impl RadialProfile for SchwarzschildProfile {
    fn label(&self) -> String {
        format!("schwarzschild({},{})", self.n, self.m)
    }

    fn value(&self, s: f64) -> f64 {
        let Some(table) = &self.table else {
            return (8.0 * self.m * (s - 2.0 * self.m)).sqrt();
        };
        let u = (s - self.throat).max(0.0).sqrt();
        let last = table.heights.len() - 1;
        let pos = u / table.du;
        if pos >= last as f64 {
            let s_end = self.throat + (last as f64 * table.du).powi(2);
            return table.heights[last] + self.tail_height(s_end, s);
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        let (h0, h1) = (table.heights[i], table.heights[i + 1]);
        let (m0, m1) = (table.slopes[i] * table.du, table.slopes[i + 1] * table.du);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * h0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * h1
            + (t3 - t2) * m1
    }

    fn d1(&self, s: f64) -> f64 {
        let d = (s - self.throat) * self.difference_quotient(s);
        (2.0 * self.m / d).sqrt()
    }

    fn d2(&self, s: f64) -> f64 {
        let k = (self.n - 2) as f64;
        let d = (s - self.throat) * self.difference_quotient(s);
        -0.5 * (2.0 * self.m).sqrt() * d.powf(-1.5) * k * s.powf(k - 1.0)
    }

    fn admissible(&self, s: f64) -> bool {
        s > self.throat * (1.0 + 1e-9)
    }
}
