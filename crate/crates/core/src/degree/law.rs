use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::kernel::{self, KernelKind};

/// Default table horizon for kernel laws.
pub const DEFAULT_TABLE_HORIZON: usize = 1 << 16;

/// Values up to at least this bound are counted with sequential binomials when a large
/// batch of draws only needs its multiset (sums, degree groups).
const SPLIT_HORIZON: usize = 256;

/// Batches smaller than this are drawn one by one.
const SPLIT_MIN_BATCH: u64 = 64;

#[derive(Clone, Debug)]
enum Beyond {
    /// Finite support: no mass past the table.
    Zero,
    Kernel { alpha: f64, kind: KernelKind },
}

/// A law on the nonnegative integers: a pmf/tail table up to a horizon and,
/// for the kernel family, a closed-form tail past it.
///
/// Sampling is inverse-CDF on the tail (`X = min { j : P(X > j) < V }` with
/// `V` uniform on (0, 1]), so values past the table stay reachable.
#[derive(Clone, Debug)]
pub struct DiscreteLaw {
    pmf: Vec<f64>,
    tail: Vec<f64>,
    beyond: Beyond,
}

impl DiscreteLaw {
    pub(crate) fn kernel(alpha: f64, kind: KernelKind, horizon: usize) -> Self {
        let (pmf, tail) = kernel::tables(alpha, kind, horizon.max(2));
        DiscreteLaw { pmf, tail, beyond: Beyond::Kernel { alpha, kind } }
    }

    /// Finite table; `pmf` must already be validated and normalised.
    pub(crate) fn finite(mut pmf: Vec<f64>) -> Self {
        while pmf.len() > 1 && pmf.last() == Some(&0.0) {
            pmf.pop();
        }
        let mut tail = vec![0.0; pmf.len()];
        // Suffix sums with Neumaier compensation.
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for j in (1..pmf.len()).rev() {
            let x = pmf[j];
            let t = sum + x;
            comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
            sum = t;
            tail[j - 1] = sum + comp;
        }
        DiscreteLaw { pmf, tail, beyond: Beyond::Zero }
    }

    pub fn horizon(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.beyond, Beyond::Zero)
    }

    /// Largest value with positive mass, if the support is finite.
    pub fn max_value(&self) -> Option<u64> {
        if self.is_finite() {
            self.pmf.iter().rposition(|&p| p > 0.0).map(|j| j as u64)
        } else {
            None
        }
    }

    pub fn pmf(&self, j: u64) -> f64 {
        if let Some(&p) = self.pmf.get(j as usize) {
            return p;
        }
        match self.beyond {
            Beyond::Zero => 0.0,
            Beyond::Kernel { alpha, kind } => match kind {
                // g_j = P(X > j-1) * alpha / j
                KernelKind::Offspring => self.offspring_tail(alpha, j - 1) * alpha / j as f64,
                // f_j = (alpha+1) P(X > j-2) / ((j-1) j)
                KernelKind::Degree => {
                    (alpha + 1.0) * self.offspring_tail(alpha, j - 2) / ((j - 1) as f64 * j as f64)
                }
            },
        }
    }

    /// `P(X > x)`.
    pub fn tail(&self, x: u64) -> f64 {
        if let Some(&t) = self.tail.get(x as usize) {
            return t;
        }
        match self.beyond {
            Beyond::Zero => 0.0,
            Beyond::Kernel { alpha, kind } => match kind {
                KernelKind::Offspring => self.offspring_tail(alpha, x),
                KernelKind::Degree => self.offspring_tail(alpha, x - 1) / x as f64,
            },
        }
    }

    pub fn cdf(&self, x: u64) -> f64 {
        1.0 - self.tail(x)
    }

    /// Offspring-law tail for the kernel family, continued past the table.
    fn offspring_tail(&self, alpha: f64, n: u64) -> f64 {
        let h = self.horizon() as u64;
        let anchor_tail = match self.beyond {
            Beyond::Kernel { kind: KernelKind::Offspring, .. } => self.tail[h as usize],
            // P_G(X > h-1) = h * P_F(D > h)
            _ => self.tail[h as usize] * h as f64,
        };
        let anchor = match self.beyond {
            Beyond::Kernel { kind: KernelKind::Offspring, .. } => h,
            _ => h - 1,
        };
        kernel::offspring_tail_beyond(alpha, anchor, anchor_tail, n)
    }

    pub fn pgf(&self, s: f64) -> f64 {
        match self.beyond {
            Beyond::Kernel { alpha, kind } => kernel::pgf(alpha, kind, s),
            Beyond::Zero => self.pmf.iter().rev().fold(0.0, |acc, &p| acc * s + p),
        }
    }

    /// Mean, when finite. Kernel offspring laws have infinite mean.
    pub fn mean(&self) -> f64 {
        match self.beyond {
            Beyond::Kernel { alpha, kind: KernelKind::Degree } => (alpha + 1.0) / alpha,
            Beyond::Kernel { kind: KernelKind::Offspring, .. } => f64::INFINITY,
            Beyond::Zero => self.pmf.iter().enumerate().map(|(j, p)| j as f64 * p).sum(),
        }
    }

    /// Smallest `j` with `P(X > j) < v`, for `v` in (0, 1].
    pub fn quantile_from_tail(&self, v: f64) -> u64 {
        let idx = self.tail.partition_point(|&t| t >= v);
        if idx < self.tail.len() {
            return idx as u64;
        }
        // All tabulated tails are >= v: search the closed-form continuation.
        let mut lo = self.horizon() as u64; // tail(lo) >= v
        let mut hi = lo.saturating_mul(2).max(lo + 1);
        while self.tail(hi) >= v {
            lo = hi;
            if hi >= u64::MAX / 2 {
                return u64::MAX;
            }
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail(mid) >= v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let v = 1.0 - rng.random::<f64>();
        self.quantile_from_tail(v)
    }

    /// Draw conditioned on `X > floor`.
    pub fn sample_above<R: Rng + ?Sized>(&self, floor: u64, rng: &mut R) -> u64 {
        let v = (1.0 - rng.random::<f64>()) * self.tail(floor);
        self.quantile_from_tail(v).max(floor + 1)
    }

    /// Multiset of `n` i.i.d. draws as `(value, count)` pairs with positive
    /// counts, in increasing order of value.
    ///
    /// Small values are counted with sequential conditional binomials
    /// (`#{X = j}` given `#{X >= j}`), the remainder is drawn individually
    /// from the conditional tail; the result has exactly the multinomial law
    /// of `n` independent draws.
    pub fn sample_counts<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        if n < SPLIT_MIN_BATCH {
            let mut draws: Vec<u64> = (0..n).map(|_| self.sample(rng)).collect();
            draws.sort_unstable();
            for d in draws {
                match out.last_mut() {
                    Some((v, c)) if *v == d => *c += 1,
                    _ => out.push((d, 1)),
                }
            }
            return out;
        }
        // Grow the binomial range until the expected number of individual
        // draws past it is no larger than the range itself.
        let mut split = SPLIT_HORIZON.min(self.horizon());
        while split < self.horizon() && n as f64 * self.tail(split as u64) > split as f64 {
            split = (2 * split).min(self.horizon());
        }
        let mut remaining = n;
        for j in 0..=split {
            if remaining == 0 {
                break;
            }
            let at_least = if j == 0 { 1.0 } else { self.tail[j - 1] };
            if at_least <= 0.0 {
                remaining = 0;
                break;
            }
            let p = (self.pmf[j] / at_least).clamp(0.0, 1.0);
            let k = if p >= 1.0 {
                remaining
            } else if p <= 0.0 {
                0
            } else {
                Binomial::new(remaining, p).expect("valid binomial").sample(rng)
            };
            if k > 0 {
                out.push((j as u64, k));
                remaining -= k;
            }
        }
        if remaining > 0 && self.tail(split as u64) > 0.0 {
            let mut big: Vec<u64> = (0..remaining).map(|_| self.sample_above(split as u64, rng)).collect();
            big.sort_unstable();
            for d in big {
                match out.last_mut() {
                    Some((v, c)) if *v == d => *c += 1,
                    _ => out.push((d, 1)),
                }
            }
        }
        out
    }

    /// Sum of `n` i.i.d. draws, saturating at `u64::MAX`.
    pub fn sample_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> u64 {
        if n < SPLIT_MIN_BATCH {
            return (0..n).fold(0u64, |acc, _| acc.saturating_add(self.sample(rng)));
        }
        self.sample_counts(n, rng)
            .into_iter()
            .fold(0u64, |acc, (v, c)| acc.saturating_add(v.saturating_mul(c)))
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn finite_table_tail() {
        let law = DiscreteLaw::finite(vec![0.0, 0.25, 0.0, 0.75]);
        assert_eq!(law.tail(0), 1.0);
        assert_eq!(law.tail(1), 0.75);
        assert_eq!(law.tail(3), 0.0);
        assert_eq!(law.tail(100), 0.0);
        assert_eq!(law.max_value(), Some(3));
    }

    #[test]
    fn quantile_continues_past_table() {
        let law = DiscreteLaw::kernel(0.8, KernelKind::Offspring, 1000);
        let v = law.tail(50_000) * 0.999_999;
        let j = law.quantile_from_tail(v);
        assert!(law.tail(j) < v && law.tail(j - 1) >= v);
        assert!(j >= 50_000);
    }

    #[test]
    fn counts_preserve_batch_size() {
        let law = DiscreteLaw::kernel(0.8, KernelKind::Degree, 4096);
        let mut r = rng::stream(3, 0);
        let counts = law.sample_counts(100_000, &mut r);
        assert_eq!(counts.iter().map(|c| c.1).sum::<u64>(), 100_000);
        assert!(counts.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn split_sum_matches_direct_sum_in_mean_of_logs() {
        // Compare batch sums drawn by splitting with sums of individual draws.
        let law = DiscreteLaw::kernel(0.8, KernelKind::Offspring, 4096);
        let mut r = rng::stream(11, 0);
        let reps = 2000;
        let direct: f64 = (0..reps)
            .map(|_| ((0..200).map(|_| law.sample(&mut r)).sum::<u64>() as f64).ln())
            .sum::<f64>()
            / reps as f64;
        let split: f64 = (0..reps).map(|_| (law.sample_sum(200, &mut r) as f64).ln()).sum::<f64>() / reps as f64;
        assert!((direct - split).abs() < 0.1, "{direct} vs {split}");
    }
}
