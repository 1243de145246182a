//! The limiting law of the recentred hopcount: the integer minimiser of
//! `t -> kappa^t y1 + kappa^(c-t) y2`, the centering constants `a_N` and
//! `k_N`, and the Monte Carlo table of `P(R_a > l)` built from `Y` samples.

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::branching::YSampleSet;
use crate::error::{Error, Result};
use crate::stats::Proportion;

/// Distance to an integer below which `log log N / |log(tau - 2)|` is
/// treated as that integer.
const INTEGRAL_SNAP: f64 = 1e-12;

/// `kappa^t y1 + kappa^(c - t) y2`.
pub fn psi(t: i64, y1: f64, y2: f64, c: i64, kappa: f64) -> f64 {
    kappa.powf(t as f64) * y1 + kappa.powf((c - t) as f64) * y2
}

/// Minimise `psi` over the integers. The real minimiser is
/// `c/2 + log(y2/y1) / (2 log kappa)`; by strict convexity the integer
/// minimiser is its floor or its ceiling, ties going to the lower one.
pub fn integer_min_form(y1: f64, y2: f64, c: i64, kappa: f64) -> Result<(i64, f64)> {
    if !(y1 > 0.0 && y2 > 0.0) || !y1.is_finite() || !y2.is_finite() {
        return Err(Error::domain(format!("y1 and y2 must be positive, got {y1} and {y2}")));
    }
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(Error::domain(format!("kappa must exceed 1, got {kappa}")));
    }
    Ok(min_form_unchecked(y1, y2, c, kappa))
}

fn min_form_unchecked(y1: f64, y2: f64, c: i64, kappa: f64) -> (i64, f64) {
    let t_hat = c as f64 / 2.0 + (y2 / y1).ln() / (2.0 * kappa.ln());
    let lo = t_hat.floor() as i64;
    let hi = lo + 1;
    let (vlo, vhi) = (psi(lo, y1, y2, c, kappa), psi(hi, y1, y2, c, kappa));
    let best = if vlo <= vhi { (lo, vlo) } else { (hi, vhi) };
    debug_assert!(
        (best.0 - 4..=best.0 + 4).all(|t| psi(t, y1, y2, c, kappa) >= best.1),
        "closed-form minimiser disagrees with a local scan"
    );
    best
}

/// `max(a, b) / min(a, b)` for the two terms of `psi` at `t`.
pub fn term_ratio(t: i64, y1: f64, y2: f64, c: i64, kappa: f64) -> f64 {
    let a = kappa.powf(t as f64) * y1;
    let b = kappa.powf((c - t) as f64) * y2;
    a.max(b) / a.min(b)
}

/// `c_l`: 1 for even `l`, 0 for odd `l`.
pub fn c_l(l: i64) -> i64 {
    if l.rem_euclid(2) == 0 {
        1
    } else {
        0
    }
}

/// `ceil(l / 2)` for any integer `l`.
pub fn half_ceil(l: i64) -> i64 {
    (l + 1).div_euclid(2)
}

/// `(tau - 2)^(ceil(l/2) + a)`.
pub fn threshold(l: i64, a: f64, tau: f64) -> f64 {
    (tau - 2.0).powf(half_ceil(l) as f64 + a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawConstants {
    pub tau: f64,
    pub kappa: f64,
    pub n: u64,
    /// `log log N / |log(tau - 2)|`.
    pub ratio: f64,
    /// `floor(ratio) - ratio`, in (-1, 0].
    pub a_n: f64,
    /// `2 floor(ratio)`.
    pub k_tau_n: i64,
}

impl LawConstants {
    pub fn new(n: u64, tau: f64) -> Result<Self> {
        if n < 16 {
            return Err(Error::domain(format!("N must be at least 16, got {n}")));
        }
        let mut c = Self::from_ln_n((n as f64).ln(), tau)?;
        c.n = n;
        Ok(c)
    }

    /// Constants for a real `log N > 1`; `n` is set to `round(N)` where
    /// representable.
    pub fn from_ln_n(ln_n: f64, tau: f64) -> Result<Self> {
        if !(tau > 2.0 && tau < 3.0) {
            return Err(Error::domain(format!("tau must lie in (2, 3), got {tau}")));
        }
        if !(ln_n > 1.0) {
            return Err(Error::domain("log log N must be positive"));
        }
        let ratio = ln_n.ln() / (tau - 2.0).ln().abs();
        let nearest = ratio.round();
        let snapped = (ratio - nearest).abs() < INTEGRAL_SNAP;
        let fl = if snapped { nearest } else { ratio.floor() };
        let a_n = if snapped { 0.0 } else { fl - ratio };
        Ok(LawConstants {
            tau,
            kappa: 1.0 / (tau - 2.0),
            n: ln_n.exp().round().min(u64::MAX as f64) as u64,
            ratio,
            a_n,
            k_tau_n: 2 * fl as i64,
        })
    }

    /// `k_N = 2 floor(ratio) + l`.
    pub fn k_n(&self, l: i64) -> i64 {
        self.k_tau_n + l
    }
}

/// Consecutive samples `(Y[2i], Y[2i+1])` as independent pairs.
pub fn pair_samples(ys: &YSampleSet) -> Vec<(f64, f64)> {
    ys.samples.chunks_exact(2).map(|p| (p[0], p[1])).collect()
}

/// Fraction of surviving pairs with `min_s psi(s) <= thr` for the given `c`.
pub fn survival_at_threshold(pairs: &[(f64, f64)], c: i64, thr: f64, kappa: f64) -> Result<Proportion> {
    let mut hits = 0;
    let mut used = 0;
    for &(y1, y2) in pairs {
        if y1 > 0.0 && y2 > 0.0 {
            used += 1;
            if min_form_unchecked(y1, y2, c, kappa).1 <= thr {
                hits += 1;
            }
        }
    }
    if used == 0 {
        return Err(Error::domain("no pair with both samples positive"));
    }
    Ok(Proportion::new(hits, used))
}

/// Monte Carlo `P(R_a > l)` conditioned on both samples surviving.
pub fn r_a_survival(a: f64, l: i64, pairs: &[(f64, f64)], tau: f64) -> Result<Proportion> {
    survival_at_threshold(pairs, c_l(l), threshold(l, a, tau), 1.0 / (tau - 2.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub l: i64,
    pub c_l: i64,
    pub threshold: f64,
    pub survival: f64,
    pub survival_ci: f64,
    pub pmf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub tau: f64,
    pub a: f64,
    pub n: Option<u64>,
    pub pairs_total: usize,
    pub pairs_used: u64,
    pub max_ci: f64,
    /// `P(R_a > l_min - 1)`; the table's pmf sums to this minus the last
    /// survival value.
    pub survival_below: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitLawTable {
    pub meta: TableMeta,
    pub rows: Vec<LawRow>,
}

impl LimitLawTable {
    pub fn pmf(&self, l: i64) -> f64 {
        self.rows.iter().find(|r| r.l == l).map_or(0.0, |r| r.pmf)
    }

    /// Pmf as a map, with the mass outside the table dropped.
    pub fn pmf_map(&self) -> std::collections::BTreeMap<i64, f64> {
        self.rows.iter().map(|r| (r.l, r.pmf)).collect()
    }

    /// Smallest `l` of maximal pmf.
    pub fn mode(&self) -> Option<i64> {
        self.rows
            .iter()
            .fold(None::<&LawRow>, |best, r| match best {
                Some(b) if b.pmf >= r.pmf => Some(b),
                _ => Some(r),
            })
            .map(|r| r.l)
    }

    /// Columns `l,c_l,threshold,survival,survival_ci,pmf`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "l,c_l,threshold,survival,survival_ci,pmf")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{},{},{}", r.l, r.c_l, r.threshold, r.survival, r.survival_ci, r.pmf)?;
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.csv")))?))?;
        serde_json::to_writer_pretty(std::fs::File::create(dir.join(format!("{stem}.json")))?, &self.meta)?;
        Ok(())
    }
}

/// `P(R_a = l) = P(R_a > l - 1) - P(R_a > l)` over `l_range`, with
/// `a = a_N`.
pub fn predicted_pmf(constants: &LawConstants, ys: &YSampleSet, l_range: RangeInclusive<i64>) -> Result<LimitLawTable> {
    predicted_pmf_for_a(constants.a_n, constants.tau, Some(constants.n), ys, l_range)
}

pub fn predicted_pmf_for_a(a: f64, tau: f64, n: Option<u64>, ys: &YSampleSet, l_range: RangeInclusive<i64>) -> Result<LimitLawTable> {
    if l_range.is_empty() {
        return Err(Error::domain("empty l range"));
    }
    let pairs = pair_samples(ys);
    let kappa = 1.0 / (tau - 2.0);
    // M_l depends on l only through c_l.
    let mut m: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for &(y1, y2) in &pairs {
        if y1 > 0.0 && y2 > 0.0 {
            for (c, v) in m.iter_mut().enumerate() {
                v.push(min_form_unchecked(y1, y2, c as i64, kappa).1);
            }
        }
    }
    let used = m[0].len() as u64;
    if used == 0 {
        return Err(Error::domain("no pair with both samples positive"));
    }
    for v in m.iter_mut() {
        v.sort_unstable_by(f64::total_cmp);
    }
    let survival = |l: i64| -> Proportion {
        let thr = threshold(l, a, tau);
        let v = &m[c_l(l) as usize];
        Proportion::new(v.partition_point(|&x| x <= thr) as u64, used)
    };
    let below = survival(*l_range.start() - 1);
    let mut prev = below.estimate;
    let mut rows = Vec::new();
    let mut max_ci = 0.0f64;
    for l in l_range {
        let s = survival(l);
        max_ci = max_ci.max(s.half_width);
        rows.push(LawRow {
            l,
            c_l: c_l(l),
            threshold: threshold(l, a, tau),
            survival: s.estimate,
            survival_ci: s.half_width,
            pmf: prev - s.estimate,
        });
        prev = s.estimate;
    }
    Ok(LimitLawTable {
        meta: TableMeta { tau, a, n, pairs_total: pairs.len(), pairs_used: used, max_ci, survival_below: below.estimate },
        rows,
    })
}
