//! Closed forms for the generating-function family
//!
//! ```text
//! f(s) = (tau-1)/(tau-2) * s - (1 - (1-s)^(tau-1)) / (tau-2)
//! g(s) = f'(s) / f'(1) = 1 - (1-s)^(tau-2)
//! ```
//!
//! With `alpha = tau - 2`, the offspring law `g` has tail
//! `P(X > n) = prod_{k=1..n} (1 - alpha/k) = Gamma(n+1-alpha) / (Gamma(1-alpha) Gamma(n+1))`
//! and the degree law has tail `P(D > n) = P(X > n-1) / n` for `n >= 1`.
//! Everything below the table horizon is produced by multiplicative
//! recurrences; past the horizon the gamma ratio is continued with a
//! Stirling difference series anchored at the last tabulated value.

/// Which member of the pair a kernel table describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum KernelKind {
    Degree,
    Offspring,
}

/// `ln Gamma(n+1-alpha) - ln Gamma(n+1)` for large `n`, via the difference of
/// two Stirling series. Accurate to far below f64 resolution for `n >= 64`.
pub(crate) fn ln_gamma_shift(alpha: f64, n: f64) -> f64 {
    let x2 = n + 1.0;
    let x1 = x2 - alpha;
    let series = |x: f64| {
        let r = 1.0 / x;
        let r2 = r * r;
        r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
    };
    (x1 - 0.5) * (-alpha / x2).ln_1p() - alpha * x2.ln() + alpha + series(x1) - series(x2)
}

/// Offspring tail `P(X > n)` for `n > anchor`, continued from the tabulated
/// value `tail_at_anchor = P(X > anchor)`.
pub(crate) fn offspring_tail_beyond(alpha: f64, anchor: u64, tail_at_anchor: f64, n: u64) -> f64 {
    if n <= anchor {
        return tail_at_anchor;
    }
    let shift = ln_gamma_shift(alpha, n as f64) - ln_gamma_shift(alpha, anchor as f64);
    tail_at_anchor * shift.exp()
}

/// Tabulated pmf and tail (`tail[j] = P(X > j)`) for `j in 0..=horizon`.
pub(crate) fn tables(alpha: f64, kind: KernelKind, horizon: usize) -> (Vec<f64>, Vec<f64>) {
    // Offspring tail first: every other quantity is derived from it.
    let mut g_tail = Vec::with_capacity(horizon + 1);
    g_tail.push(1.0);
    for j in 1..=horizon {
        let prev = g_tail[j - 1];
        g_tail.push(prev * ((j as f64 - alpha) / j as f64));
    }
    match kind {
        KernelKind::Offspring => {
            let mut pmf = vec![0.0; horizon + 1];
            if horizon >= 1 {
                pmf[1] = alpha;
            }
            for j in 1..horizon {
                pmf[j + 1] = pmf[j] * ((j as f64 - alpha) / (j + 1) as f64);
            }
            (pmf, g_tail)
        }
        KernelKind::Degree => {
            let mut pmf = vec![0.0; horizon + 1];
            if horizon >= 2 {
                pmf[2] = (alpha + 1.0) / 2.0;
            }
            for j in 2..horizon {
                pmf[j + 1] = pmf[j] * ((j as f64 - 1.0 - alpha) / (j + 1) as f64);
            }
            let mut tail = Vec::with_capacity(horizon + 1);
            tail.push(1.0);
            for j in 1..=horizon {
                tail.push(g_tail[j - 1] / j as f64);
            }
            (pmf, tail)
        }
    }
}

/// Probability generating function of the kernel law.
pub(crate) fn pgf(alpha: f64, kind: KernelKind, s: f64) -> f64 {
    let tau = alpha + 2.0;
    match kind {
        KernelKind::Offspring => 1.0 - (1.0 - s).powf(alpha),
        KernelKind::Degree => (tau - 1.0) / alpha * s - (1.0 - (1.0 - s).powf(tau - 1.0)) / alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_shift_matches_direct_product() {
        let alpha = 0.8;
        let mut tail = 1.0f64;
        let mut at_100 = 0.0;
        for k in 1..=5000u64 {
            tail *= 1.0 - alpha / k as f64;
            if k == 100 {
                at_100 = tail;
            }
        }
        let continued = offspring_tail_beyond(alpha, 100, at_100, 5000);
        assert!((continued / tail - 1.0).abs() < 1e-12, "{continued} vs {tail}");
    }

    #[test]
    fn pgf_derivative_relation() {
        // g(s) = f'(s) / f'(1), checked by central differences.
        let alpha = 0.8;
        let mu = (alpha + 1.0) / alpha;
        for &s in &[0.1, 0.4, 0.7] {
            let h = 1e-6;
            let df = (pgf(alpha, KernelKind::Degree, s + h) - pgf(alpha, KernelKind::Degree, s - h)) / (2.0 * h);
            assert!((df / mu - pgf(alpha, KernelKind::Offspring, s)).abs() < 1e-8);
        }
    }
}
