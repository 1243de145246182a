//! Small statistical helpers shared by tests and experiments.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Estimated proportion with its normal-approximation 95% half-width.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub half_width: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        let estimate = if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 };
        Proportion { successes, trials, estimate, half_width: 1.96 * binomial_se(estimate, trials) }
    }

    pub fn std_error(&self) -> f64 {
        binomial_se(self.estimate, self.trials)
    }
}

pub fn binomial_se(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample KS statistic `d` for sample sizes
/// `na`, `nb` (Kolmogorov distribution with Stephens' small-sample
/// correction).
pub fn ks_p_value(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sq = ne.sqrt();
    kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS statistic of integer draws against a discrete CDF.
pub fn ks_discrete(samples: &[u64], cdf: impl Fn(u64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        // Below x the empirical CDF equals i/n; the model CDF just below x is cdf(x-1).
        let below = if x == 0 { 0.0 } else { cdf(x - 1) };
        d = d.max((i as f64 / n - below).abs());
        while i < sorted.len() && sorted[i] == x {
            i += 1;
        }
        d = d.max((i as f64 / n - cdf(x)).abs());
    }
    d
}

/// Result of a chi-square test of homogeneity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Chi-square homogeneity test of two count histograms. Categories whose
/// pooled expected count is below `min_expected` are merged into their
/// neighbour in key order.
pub fn chi_square_homogeneity(a: &BTreeMap<i64, u64>, b: &BTreeMap<i64, u64>, min_expected: f64) -> ChiSquare {
    let keys: Vec<i64> = a.keys().chain(b.keys()).copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    let total = na + nb;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for k in keys {
        cur.0 += *a.get(&k).unwrap_or(&0) as f64;
        cur.1 += *b.get(&k).unwrap_or(&0) as f64;
        let pooled = cur.0 + cur.1;
        if pooled * na.min(nb) / total >= min_expected {
            bins.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.0 + cur.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => bins.push(cur),
        }
    }
    if bins.len() < 2 || na == 0.0 || nb == 0.0 {
        return ChiSquare { statistic: 0.0, dof: 0, p_value: 1.0 };
    }
    let mut stat = 0.0;
    for &(x, y) in &bins {
        let pooled = x + y;
        let ea = pooled * na / total;
        let eb = pooled * nb / total;
        stat += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    let dof = bins.len() - 1;
    let p_value = ChiSquared::new(dof as f64).map(|c| c.sf(stat)).unwrap_or(f64::NAN);
    ChiSquare { statistic: stat, dof, p_value }
}

/// Normalise a count histogram.
pub fn normalise(counts: &BTreeMap<i64, u64>) -> BTreeMap<i64, f64> {
    let n = counts.values().sum::<u64>() as f64;
    counts.iter().map(|(&k, &c)| (k, if n > 0.0 { c as f64 / n } else { 0.0 })).collect()
}

/// Total-variation distance between two pmfs on the integers.
pub fn tv_distance(p: &BTreeMap<i64, f64>, q: &BTreeMap<i64, f64>) -> f64 {
    let keys: std::collections::BTreeSet<i64> = p.keys().chain(q.keys()).copied().collect();
    0.5 * keys.iter().map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs()).sum::<f64>()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
