//! Composite Gauss-Legendre on `[0, 1]` with panel doubling.
//!
//! Radial integrals are taken in `s = sqrt(r)`, which turns the `r log r`
//! and `r^(1/2)`-type behaviour at the chart centre into something smooth.

use alloc::vec::Vec;

use super::{logsumexp, BergmanError};

const GL_POINTS: usize = 16;
const START_PANELS: usize = 4;

/// Convergence target and node budget for a single one-dimensional integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    /// Relative agreement required between two successive panel doublings.
    pub tolerance: f64,
    /// Maximum number of nodes for one integral.
    pub budget: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { tolerance: 1e-13, budget: 1 << 16 }
    }
}

/// Nodes and weights on `[0, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(t) and its derivative
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x.push(0.5 * (1.0 - t));
        w.push(1.0 / ((1.0 - t * t) * dp * dp));
    }
    (x, w)
}

impl Quadrature {
    pub fn new(tolerance: f64, budget: usize) -> Result<Self, BergmanError> {
        if !(tolerance > 0.0) || budget < GL_POINTS * START_PANELS * 2 {
            return Err(BergmanError::InvalidParameter);
        }
        Ok(Quadrature { tolerance, budget })
    }

    /// `log int_0^1 exp(f(r)) dr`, with the relative error estimate and the
    /// node count used.
    pub(crate) fn ln_radial(&self, f: impl Fn(f64) -> f64) -> Result<(f64, f64, usize), BergmanError> {
        let (x, w) = gauss_legendre(GL_POINTS);
        let pass = |panels: usize| {
            let h = 1.0 / panels as f64;
            logsumexp((0..panels).flat_map(|p| {
                let (x, w, f) = (&x, &w, &f);
                (0..GL_POINTS).map(move |i| {
                    let s = (p as f64 + x[i]) * h;
                    libm::log(w[i] * h * 2.0 * s) + f(s * s)
                })
            }))
        };
        let mut panels = START_PANELS;
        let mut prev = pass(panels);
        loop {
            panels *= 2;
            let nodes = panels * GL_POINTS;
            let cur = pass(panels);
            let err = if cur == prev { 0.0 } else { (cur - prev).abs() };
            if err <= self.tolerance || (cur == f64::NEG_INFINITY && prev == f64::NEG_INFINITY) {
                return Ok((cur, err, nodes));
            }
            if nodes * 2 > self.budget {
                return Err(BergmanError::QuadratureBudgetExceeded { nodes, error: err });
            }
            prev = cur;
        }
    }

    /// `int_0^1 f(r) dr` for a signed integrand, with `f` smooth between the
    /// given breakpoints in `(0, 1)`. The error is absolute.
    pub(crate) fn radial(&self, f: impl Fn(f64) -> f64, breaks: &[f64]) -> Result<(f64, f64, usize), BergmanError> {
        let (x, w) = gauss_legendre(GL_POINTS);
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b > 0.0 && b < 1.0).map(libm::sqrt).collect();
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let pass = |panels: usize| {
            let mut total = 0.0;
            for seg in cuts.windows(2) {
                let h = (seg[1] - seg[0]) / panels as f64;
                for p in 0..panels {
                    for i in 0..GL_POINTS {
                        let s = seg[0] + (p as f64 + x[i]) * h;
                        total += w[i] * h * 2.0 * s * f(s * s);
                    }
                }
            }
            total
        };
        let segments = cuts.len() - 1;
        let mut panels = START_PANELS;
        let mut prev = pass(panels);
        loop {
            panels *= 2;
            let nodes = panels * GL_POINTS * segments;
            let cur = pass(panels);
            let err = (cur - prev).abs();
            if err <= self.tolerance * cur.abs().max(1.0) {
                return Ok((cur, err, nodes));
            }
            if nodes * 2 > self.budget.max(segments * GL_POINTS * START_PANELS * 4) {
                return Err(BergmanError::QuadratureBudgetExceeded { nodes, error: err });
            }
            prev = cur;
        }
    }
}
