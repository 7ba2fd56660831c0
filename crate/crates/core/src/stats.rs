//! Small statistical helpers shared by tests and the experiment harness.

/// One-sample Kolmogorov-Smirnov statistic against the uniform law on [0,1].
pub fn ks_statistic_unit_uniform(sample: &[f64]) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let hi = (i + 1) as f64 / n - x;
            let lo = x - i as f64 / n;
            hi.max(lo)
        })
        .fold(0.0, f64::max)
}

/// Critical KS distance at level `alpha` (Stephens' finite-sample form of
/// the asymptotic `sqrt(ln(2/alpha)/2)` coefficient).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    let c = (2.0 / alpha).ln() / 2.0;
    let n = n as f64;
    c.sqrt() / (n.sqrt() + 0.12 + 0.11 / n.sqrt())
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean and its standard error (ddof = 1).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, (var / xs.len() as f64).sqrt())
}

/// Median of a sample (average of the middle two for even lengths).
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}
