use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{survival_for_n, ExperimentConfig, SurvivalCurve};
use crate::branching::{sample_y, YSampleSet};
use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::limit_law::{predicted_pmf, LawConstants};
use crate::stats::Proportion;

/// Sizes below this are flagged as pre-asymptotic in limit comparisons.
pub const PRE_ASYMPTOTIC_N: u64 = 10_000;

/// Half-width of the predicted table around zero; widened to cover every
/// observed value.
const L_HALF_WIDTH: i64 = 12;

/// Sup-distance between one curve and the next one shifted left by 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftStat {
    pub n_lower: u64,
    pub n_upper: u64,
    pub a_lower: f64,
    pub a_upper: f64,
    /// `sup_d |S_upper(d + 2) - S_lower(d)|`.
    pub statistic: f64,
    /// Two-sample KS critical value at level 0.05 for the connected counts.
    pub tolerance: f64,
    /// Whether the two sizes share the centring defect up to 0.05, so that a
    /// shift of exactly 2 is the expected relation.
    pub same_class: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelismReport {
    pub tau: f64,
    pub stats: Vec<ShiftStat>,
}

impl ParallelismReport {
    pub fn max_statistic(&self) -> f64 {
        self.stats.iter().map(|s| s.statistic).fold(0.0, f64::max)
    }
}

/// `sup_d |S_b(d + shift) - S_a(d)|` over every `d` where either curve moves.
pub fn shifted_sup_distance(a: &SurvivalCurve, b: &SurvivalCurve, shift: i64) -> f64 {
    let hi = a.max_distance().unwrap_or(0).max(b.max_distance().unwrap_or(0)) as i64;
    (-shift.abs() - 1..=hi + 1).map(|d| (b.survival(d + shift) - a.survival(d)).abs()).fold(0.0, f64::max)
}

/// Compare consecutive curves, which should come from consecutive `N_k`.
pub fn parallelism_check(curves: &[SurvivalCurve], tau: f64) -> Result<ParallelismReport> {
    if curves.len() < 2 {
        return Err(Error::domain("need at least two curves"));
    }
    let stats = curves
        .windows(2)
        .map(|w| {
            let (lo, hi) = (&w[0], &w[1]);
            let a_lower = LawConstants::new(lo.n, tau)?.a_n;
            let a_upper = LawConstants::new(hi.n, tau)?.a_n;
            let (na, nb) = (lo.n_connected as f64, hi.n_connected as f64);
            Ok(ShiftStat {
                n_lower: lo.n,
                n_upper: hi.n,
                a_lower,
                a_upper,
                statistic: shifted_sup_distance(lo, hi, 2),
                tolerance: 1.358 * ((na + nb) / (na * nb)).sqrt(),
                same_class: (a_lower - a_upper).abs() <= 0.05,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParallelismReport { tau, stats })
}

/// One value `l` of the recentred hopcount `H_N - k_tau_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub l: i64,
    pub empirical: f64,
    pub empirical_ci: f64,
    pub predicted: f64,
    pub predicted_ci: f64,
    pub diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitComparison {
    pub n: u64,
    pub tau: f64,
    pub k_tau_n: i64,
    pub a_n: f64,
    pub n_connected: u64,
    pub y_pairs_used: u64,
    /// Total variation, counting predicted mass outside the table.
    pub tv: f64,
    /// Predicted mass outside the tabulated range of `l`.
    pub predicted_outside: f64,
    pub pre_asymptotic: bool,
    pub rows: Vec<LimitRow>,
}

impl LimitComparison {
    /// Columns `l,empirical,empirical_ci,predicted,predicted_ci,diff`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "l,empirical,empirical_ci,predicted,predicted_ci,diff")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{},{},{}", r.l, r.empirical, r.empirical_ci, r.predicted, r.predicted_ci, r.diff)?;
        }
        Ok(())
    }

    pub fn empirical_mode(&self) -> Option<i64> {
        mode(self.rows.iter().map(|r| (r.l, r.empirical)))
    }

    pub fn predicted_mode(&self) -> Option<i64> {
        mode(self.rows.iter().map(|r| (r.l, r.predicted)))
    }
}

fn mode(it: impl Iterator<Item = (i64, f64)>) -> Option<i64> {
    it.fold(None::<(i64, f64)>, |best, (l, p)| match best {
        Some((_, bp)) if bp >= p => best,
        _ => Some((l, p)),
    })
    .map(|(l, _)| l)
}

/// Empirical pmf of `H_N - k_tau_N` given connection against the predicted
/// `P(R_{a_N} = l)` from `ys`.
pub fn compare_with_limit(curve: &SurvivalCurve, ys: &YSampleSet, tau: f64) -> Result<LimitComparison> {
    if curve.n_connected == 0 {
        return Err(Error::domain(format!("no connected pairs at N = {}", curve.n)));
    }
    let constants = LawConstants::new(curve.n, tau)?;
    let emp = curve.centred_pmf(constants.k_tau_n);
    let lo = emp.keys().next().copied().unwrap_or(0).min(-L_HALF_WIDTH);
    let hi = emp.keys().next_back().copied().unwrap_or(0).max(L_HALF_WIDTH);
    let table = predicted_pmf(&constants, ys, lo..=hi)?;
    let outside = (1.0 - table.meta.survival_below).max(0.0) + table.rows.last().map_or(0.0, |r| r.survival);
    let nc = curve.n_connected;
    let rows: Vec<LimitRow> = table
        .rows
        .iter()
        .map(|r| {
            let e = emp.get(&r.l).copied().unwrap_or(0.0);
            let count = curve.histogram.get(&((r.l + constants.k_tau_n) as u32)).copied().unwrap_or(0);
            LimitRow {
                l: r.l,
                empirical: e,
                empirical_ci: Proportion::new(count, nc).half_width,
                predicted: r.pmf,
                // A difference of two survival estimates; the CI of each bounds it.
                predicted_ci: 2.0 * r.survival_ci,
                diff: e - r.pmf,
            }
        })
        .collect();
    let tv = 0.5 * (rows.iter().map(|r| r.diff.abs()).sum::<f64>() + outside);
    Ok(LimitComparison {
        n: curve.n,
        tau,
        k_tau_n: constants.k_tau_n,
        a_n: constants.a_n,
        n_connected: nc,
        y_pairs_used: table.meta.pairs_used,
        tv,
        predicted_outside: outside,
        pre_asymptotic: curve.n < PRE_ASYMPTOTIC_N,
        rows,
    })
}

/// Run hopcounts for every size of `cfg`, draw `y_samples` values of `Y`
/// from seed `master_seed + 1`, and compare at each size.
pub fn limit_comparison(cfg: &ExperimentConfig) -> Result<Vec<LimitComparison>> {
    cfg.validate()?;
    if cfg.y_samples < 2 {
        return Err(Error::domain("need at least two Y samples"));
    }
    let f = DegreeDistribution::build_family(cfg.tau)?;
    let g = f.size_bias();
    let ys = sample_y(&f, &g, cfg.tau, cfg.y_samples, cfg.cap, cfg.max_gen, cfg.master_seed.wrapping_add(1))?;
    cfg.n_list()?
        .into_iter()
        .map(|n| {
            let (curve, _) = survival_for_n(cfg, &f, n)?;
            compare_with_limit(&curve, &ys, cfg.tau)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: u64,
    /// `2 log log N / |log(tau - 2)|`.
    pub centre: f64,
    /// `P(|H_N - centre| <= K)` over all sampled pairs, with disconnected and
    /// undetermined pairs counted as outside.
    pub within: BTreeMap<u32, Proportion>,
}

pub const CONCENTRATION_WIDTHS: [u32; 3] = [5, 10, 20];

pub fn concentration_check(curve: &SurvivalCurve, tau: f64) -> Result<ConcentrationReport> {
    if curve.pairs == 0 {
        return Err(Error::domain("curve has no pairs"));
    }
    let centre = 2.0 * LawConstants::new(curve.n, tau)?.ratio;
    let within = CONCENTRATION_WIDTHS
        .iter()
        .map(|&k| {
            let hits = curve
                .histogram
                .iter()
                .filter(|(&d, _)| (d as f64 - centre).abs() <= k as f64)
                .map(|(_, &c)| c)
                .sum();
            (k, Proportion::new(hits, curve.pairs))
        })
        .collect();
    Ok(ConcentrationReport { n: curve.n, centre, within })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spg::{HopcountRecord, HopcountStatus};

    fn curve(n: u64, distances: &[u32]) -> SurvivalCurve {
        let recs: Vec<HopcountRecord> = distances
            .iter()
            .map(|&d| HopcountRecord { seed: 0, u: 0, v: 1, distance: Some(d), status: HopcountStatus::Connected })
            .collect();
        SurvivalCurve::from_records(n, &recs)
    }

    #[test]
    fn exact_shift_gives_zero() {
        let a = curve(1000, &[3, 4, 4, 5, 6, 6, 7]);
        let b = curve(5623, &[5, 6, 6, 7, 8, 8, 9]);
        assert_eq!(shifted_sup_distance(&a, &b, 2), 0.0);
        let r = parallelism_check(&[a.clone(), b], 2.8).unwrap();
        assert_eq!(r.stats[0].statistic, 0.0);
        assert!(r.stats[0].same_class);
        assert!(shifted_sup_distance(&a, &a, 2) > 0.0);
    }

    #[test]
    fn different_classes_are_reported() {
        let r = parallelism_check(&[curve(1000, &[4, 5]), curve(3000, &[5, 6])], 2.8).unwrap();
        assert!(!r.stats[0].same_class);
        assert!(parallelism_check(&[curve(1000, &[4])], 2.8).is_err());
    }

    #[test]
    fn wide_k_covers_everything() {
        let c = curve(723_394, &[18, 20, 22, 23, 25, 30]);
        let r = concentration_check(&c, 2.8).unwrap();
        assert_eq!(r.within[&20].estimate, 1.0);
        assert!((r.centre - 2.0 * 11.660_992_916_262_028).abs() < 1e-9);
        // |H - 23.32| <= 5 keeps 20, 22, 23, 25.
        assert_eq!(r.within[&5].successes, 4);
    }

    #[test]
    fn small_n_comparison_is_flagged() {
        let cfg = ExperimentConfig {
            sizes: super::super::Sizes::List(vec![100]),
            pairs_per_n: 200,
            y_samples: 2000,
            ..Default::default()
        };
        let cmp = limit_comparison(&cfg).unwrap();
        assert!(cmp[0].pre_asymptotic);
        assert!(cmp[0].tv >= 0.0 && cmp[0].tv <= 1.0);
        let emp: f64 = cmp[0].rows.iter().map(|r| r.empirical).sum();
        assert!((emp - 1.0).abs() < 1e-12);
    }
}
