//! Small statistics used to compare simulation output with the analysis.

use crate::special::kolmogorov_sf;

/// 95% normal-approximation half-width of a binomial proportion.
pub fn binomial_ci_halfwidth(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF, with the
/// asymptotic p-value including the Stephens small-sample correction.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let sn = nf.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
        n,
    }
}

/// `max_j |a(j) − b(j)|` over the union of supports of two PMFs given as
/// slices indexed by value.
pub fn cdf_sup_distance(a: &[f64], b: &[f64]) -> f64 {
    let (mut ca, mut cb, mut d) = (0.0, 0.0, 0.0f64);
    for j in 0..a.len().max(b.len()) {
        ca += a.get(j).copied().unwrap_or(0.0);
        cb += b.get(j).copied().unwrap_or(0.0);
        d = d.max((ca - cb).abs());
    }
    d
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    crate::geometry::mean_and_se(xs)
}
