//! L^2 Gram matrices of the monomial basis.
//!
//! Entries can span hundreds of orders of magnitude, so a Gram matrix is
//! stored as `G = D^(1/2) H D^(1/2)` with `D = diag(G)` kept as logarithms
//! and `H` the unit-diagonal correlation matrix. Determinants and
//! factorizations work on `H`.

use alloc::vec;
use alloc::vec::Vec;

use super::{logsumexp, BergmanError, Chart, CurvatureMeasure, MetricFamily, Quadrature, Section, SectionSpace};

/// Condition number of the scaled Gram beyond which results are refused.
const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct GramData {
    ln_diag: Vec<f64>,
    scaled: Vec<Vec<f64>>,
    /// Largest node count used by one radial integral.
    nodes: usize,
    /// Estimated relative error per entry.
    error: f64,
}

impl GramData {
    fn diagonal(ln_diag: Vec<f64>, nodes: usize, error: f64) -> Self {
        let n = ln_diag.len();
        let scaled = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        GramData { ln_diag, scaled, nodes, error }
    }

    pub fn dim(&self) -> usize {
        self.ln_diag.len()
    }

    pub fn entry(&self, k: usize, l: usize) -> f64 {
        libm::exp(0.5 * (self.ln_diag[k] + self.ln_diag[l])) * self.scaled[k][l]
    }

    /// `log G_kk`.
    pub fn ln_diag(&self) -> &[f64] {
        &self.ln_diag
    }

    /// Unit-diagonal correlation matrix.
    pub fn scaled(&self) -> &[Vec<f64>] {
        &self.scaled
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn error_estimate(&self) -> f64 {
        self.error
    }

    /// Lower Cholesky factor of the scaled matrix.
    pub fn cholesky(&self) -> Result<Vec<Vec<f64>>, BergmanError> {
        let n = self.dim();
        let mut l = vec![vec![0.0; n]; n];
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = self.scaled[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                if i == j {
                    if !(s > 0.0) {
                        return Err(BergmanError::IllConditioned { condition: f64::INFINITY });
                    }
                    lo = lo.min(s);
                    hi = hi.max(s);
                    l[i][i] = libm::sqrt(s);
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        if hi / lo > CONDITION_LIMIT {
            return Err(BergmanError::IllConditioned { condition: hi / lo });
        }
        Ok(l)
    }

    pub fn ln_det(&self) -> Result<f64, BergmanError> {
        let l = self.cholesky()?;
        let ln_scaled: f64 = l.iter().enumerate().map(|(i, row)| 2.0 * libm::log(row[i])).sum();
        Ok(self.ln_diag.iter().sum::<f64>() + ln_scaled)
    }

    /// `c^T G c`.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        let y: Vec<f64> = c.iter().zip(&self.ln_diag).map(|(a, d)| a * libm::exp(0.5 * d)).collect();
        let mut s = 0.0;
        for i in 0..y.len() {
            for j in 0..y.len() {
                s += y[i] * self.scaled[i][j] * y[j];
            }
        }
        s
    }

    pub fn is_diagonal(&self) -> bool {
        self.scaled.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &v)| i == j || v == 0.0))
    }
}

/// `log int r^p ||.||^2 dmu` for `p = 0..=2D`, summed over both charts.
///
/// In the chart at infinity the monomial of `z`-degree `k` has `w`-degree
/// `D - k`, hence the exponent `2D - p` there.
fn ln_moments(
    weight: &MetricFamily,
    mu: &CurvatureMeasure,
    quad: &Quadrature,
) -> Result<(Vec<f64>, usize, f64), BergmanError> {
    let big_d = weight.degree();
    if big_d < 0 {
        return Err(BergmanError::NegativeDegree);
    }
    let big_d = big_d as usize;
    let mut out = Vec::with_capacity(2 * big_d + 1);
    let (mut nodes, mut err) = (0usize, 0.0f64);
    for p in 0..=2 * big_d {
        let mut parts = [0.0; 2];
        for (slot, (chart, e)) in parts.iter_mut().zip([(Chart::Zero, p), (Chart::Infinity, 2 * big_d - p)]) {
            let f = |r: f64| {
                let lead = if e == 0 { 0.0 } else { e as f64 * libm::log(r) };
                lead - 2.0 * weight.log_phi(chart, r) + mu.ln_mass_density(chart, r)
            };
            let (v, dv, n) = quad.ln_radial(f)?;
            *slot = v;
            nodes = nodes.max(n);
            err = err.max(dv);
        }
        out.push(logsumexp(parts.into_iter()));
    }
    Ok((out, nodes, err))
}

/// Gram of the monomial basis of `space` for the metric `metric` and the
/// probability measure `mu`.
pub fn l2_gram(
    space: SectionSpace,
    metric: &MetricFamily,
    mu: &CurvatureMeasure,
    quad: &Quadrature,
) -> Result<GramData, BergmanError> {
    if metric.degree() != space.degree as i64 {
        return Err(BergmanError::DegreeMismatch);
    }
    let (m, nodes, err) = ln_moments(metric, mu, quad)?;
    Ok(GramData::diagonal((0..space.dim()).map(|k| m[2 * k]).collect(), nodes, err))
}

/// Gram of `||t||_s = (int |s|^2 |t|^2 dmu)^(1/2)` on `space`, where `s` is a
/// section of the line bundle carrying `s_metric`.
pub fn twisted_gram(
    s: &Section,
    s_metric: &MetricFamily,
    space: SectionSpace,
    metric: &MetricFamily,
    mu: &CurvatureMeasure,
    quad: &Quadrature,
) -> Result<GramData, BergmanError> {
    if metric.degree() != space.degree as i64 || s_metric.degree() != s.degree() as i64 {
        return Err(BergmanError::DegreeMismatch);
    }
    let (m, nodes, err) = ln_moments(&metric.plus(s_metric), mu, quad)?;
    let d = space.degree;
    let a = s.coeffs();
    let e = s.degree();
    // G_kl = sum over a - b = l - k of s_a s_b I(k + l + a + b)
    let entry = |k: usize, l: usize, scale: f64| -> f64 {
        let mut acc = 0.0;
        for (i, &si) in a.iter().enumerate() {
            let j = i as i64 - (l as i64 - k as i64);
            if j < 0 || j as usize > e || si == 0.0 || a[j as usize] == 0.0 {
                continue;
            }
            acc += si * a[j as usize] * libm::exp(m[k + l + i + j as usize] - scale);
        }
        acc
    };
    let ln_diag: Vec<f64> = (0..=d)
        .map(|k| {
            // all diagonal terms are positive, so sum them in the log domain
            logsumexp(
                a.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, &x)| 2.0 * libm::log(x.abs()) + m[2 * k + 2 * i]),
            )
        })
        .collect();
    let mut scaled = vec![vec![0.0; d + 1]; d + 1];
    for k in 0..=d {
        scaled[k][k] = 1.0;
        for l in k + 1..=d {
            let v = entry(k, l, 0.5 * (ln_diag[k] + ln_diag[l]));
            scaled[k][l] = v;
            scaled[l][k] = v;
        }
    }
    Ok(GramData { ln_diag, scaled, nodes, error: err * (e + 1) as f64 })
}

/// `log k!` for `k = 0..=n` by summation.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += libm::log(k as f64);
        out.push(acc);
    }
    out
}

/// `G_kk = c^(-k) k! (d-k)! / (d+1)!` for the metric `d [c]` against its own
/// curvature measure (a Beta integral after `u = c |z|^2`).
pub fn closed_form_c_gram(d: usize, c: f64) -> Result<GramData, BergmanError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(BergmanError::InvalidParameter);
    }
    let lf = ln_factorials(d + 1);
    let lc = libm::log(c);
    Ok(GramData::diagonal((0..=d).map(|k| -(k as f64) * lc + lf[k] + lf[d - k] - lf[d + 1]).collect(), 0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_one() {
        let q = Quadrature::default();
        for m in [MetricFamily::fs(), MetricFamily::c(0.3).unwrap(), MetricFamily::t(3).unwrap()] {
            let mu = CurvatureMeasure::induced_by(&m).unwrap();
            let g = l2_gram(SectionSpace { degree: 0 }, &MetricFamily::trivial(), &mu, &q).unwrap();
            assert!((g.entry(0, 0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_matches_beta_integrals() {
        let q = Quadrature::default();
        for &c in &[1.0, 0.5, 0.3, 2.0] {
            let base = MetricFamily::c(c).unwrap();
            let mu = CurvatureMeasure::induced_by(&base).unwrap();
            for d in [1usize, 5, 20, 60] {
                let g = l2_gram(SectionSpace { degree: d }, &base.scale(d as i64), &mu, &q).unwrap();
                let exact = closed_form_c_gram(d, c).unwrap();
                for k in 0..=d {
                    let rel = (g.ln_diag()[k] - exact.ln_diag()[k]).abs();
                    assert!(rel < 1e-11, "c={c} d={d} k={k}: {rel}");
                }
                assert!(g.error_estimate() <= 1e-10);
            }
        }
    }

    #[test]
    fn twisting_by_a_unit_section_changes_nothing() {
        // x0 with the t = 1 metric has norm 1 / (1 + |z|) on chart 0; instead
        // use the trivial bundle, whose constant section 1 has norm 1.
        let q = Quadrature::default();
        let m = MetricFamily::c(0.4).unwrap().scale(3);
        let mu = CurvatureMeasure::induced_by(&MetricFamily::c(0.7).unwrap()).unwrap();
        let one = Section::new(alloc::vec![1.0]).unwrap();
        let a = l2_gram(SectionSpace { degree: 3 }, &m, &mu, &q).unwrap();
        let b = twisted_gram(&one, &MetricFamily::trivial(), SectionSpace { degree: 3 }, &m, &mu, &q).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                assert!((a.entry(k, l) - b.entry(k, l)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn twisted_gram_stays_definite_with_a_zero() {
        let q = Quadrature::default();
        let l = MetricFamily::fs();
        let mu = CurvatureMeasure::fs();
        // s = x0 - x1 vanishes at z = 1
        let s = Section::new(alloc::vec![1.0, -1.0]).unwrap();
        let g = twisted_gram(&s, &l, SectionSpace { degree: 4 }, &l.scale(4), &mu, &q).unwrap();
        assert!(!g.is_diagonal());
        assert!(g.ln_det().unwrap().is_finite());
    }
}
