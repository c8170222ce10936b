//! Least-squares fits used to read growth rates and constants off tables.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares `y = slope x + intercept`. Needs two distinct `x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Line {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Line { slope, intercept: my - slope * mx }
}

/// Smallest `K >= 0` with `y_i <= K x_i` for all `i`, where every `x_i > 0`.
pub fn fit_bound_constant(xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter().zip(ys).map(|(x, y)| y / x).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let l = fit_line(&xs, &ys);
        assert!((l.slope - 2.5).abs() < 1e-12 && (l.intercept + 1.0).abs() < 1e-12);
        assert_eq!(fit_bound_constant(&[1.0, 2.0], &[3.0, -1.0]), 3.0);
    }
}
