//! Frequency diagnostics for the coupling between an SPG and a branching
//! process.

use rand::Rng;
use serde::Serialize;

use super::{SpgExplorer, SpgTrace};
use crate::branching::BpRun;
use crate::graph::{Side, StubLayout, StubPool};

/// Generations `k > m` with `kappa^k Y_m <= (1 - eps^2) / (tau - 1) log N`.
/// The set is always an interval `(m, k_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TmSet {
    pub m: u32,
    pub epsilon: f64,
    /// `None` when the set is empty.
    pub k_max: Option<u32>,
}

impl TmSet {
    /// `None` when `y_m = 0`, in which case every `k > m` qualifies.
    pub fn new(y_m: f64, m: u32, epsilon: f64, n: usize, tau: f64) -> Option<TmSet> {
        if y_m <= 0.0 {
            return None;
        }
        let kappa = 1.0 / (tau - 2.0);
        let bound = (1.0 - epsilon * epsilon) / (tau - 1.0) * (n as f64).ln();
        let member = |k: u32| kappa.powi(k as i32) * y_m <= bound;
        let mut k = ((bound / y_m).ln() / kappa.ln()).floor().max(m as f64) as u32;
        // Settle the floating-point boundary by the defining inequality.
        while k > m && !member(k) {
            k -= 1;
        }
        while member(k + 1) {
            k += 1;
        }
        Some(TmSet { m, epsilon, k_max: (k > m).then_some(k) })
    }

    pub fn contains(&self, k: u32) -> bool {
        k > self.m && self.k_max.is_some_and(|km| k <= km)
    }

    pub fn members(&self) -> std::ops::RangeInclusive<u32> {
        match self.k_max {
            Some(km) => self.m + 1..=km,
            #[allow(clippy::reversed_empty_ranges)]
            None => 1..=0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingReport {
    pub m: u32,
    pub epsilon: f64,
    pub y_m: f64,
    /// `eps <= Y_m <= 1/eps`; the other fields are `None` otherwise.
    pub applicable: bool,
    pub tm: Option<TmSet>,
    pub max_deviation: Option<f64>,
    /// `max |Y_k - Y_m| <= eps^3` on the set.
    pub a: Option<bool>,
    /// `Z_{k-1} <= Z_k` on the set.
    pub b: Option<bool>,
    /// `Z_k <= N^((1 - eps^4) / (tau - 1))` on the set.
    pub c: Option<bool>,
    /// `Z_{k+1} > N^((1 - eps) / (tau - 1))` for the last `k` of the set;
    /// `None` when the set is empty.
    pub d: Option<bool>,
    /// `Y_m` of the accompanying branching process, if one was supplied.
    pub bp_y_m: Option<f64>,
}

fn level_or_zero(trace: &SpgTrace, k: u32) -> u64 {
    let k = k as usize;
    match trace.z().get(k) {
        Some(&z) => z,
        None => {
            assert!(!trace.alive(), "trace stops before level {k}");
            0
        }
    }
}

/// Evaluate the coupling properties on `trace`, which must reach one level
/// past the set (or be dead).
pub fn coupling_report(trace: &SpgTrace, bp: Option<&BpRun>, m: u32, epsilon: f64, n: usize, tau: f64) -> CouplingReport {
    let alpha = tau - 2.0;
    let y_m = alpha.powi(m as i32) * (level_or_zero(trace, m).max(1) as f64).ln();
    let bp_y_m = bp.map(|b| b.y_at(m, alpha));
    let applicable = y_m >= epsilon && y_m <= 1.0 / epsilon;
    let mut report = CouplingReport {
        m,
        epsilon,
        y_m,
        applicable,
        tm: None,
        max_deviation: None,
        a: None,
        b: None,
        c: None,
        d: None,
        bp_y_m,
    };
    if !applicable {
        return report;
    }
    let tm = TmSet::new(y_m, m, epsilon, n, tau).expect("y_m > 0 when applicable");
    let ln_n = (n as f64).ln();
    let z_cap = ((1.0 - epsilon.powi(4)) / (tau - 1.0) * ln_n).exp();
    let z_floor = ((1.0 - epsilon) / (tau - 1.0) * ln_n).exp();
    let y_k = |k: u32| alpha.powi(k as i32) * (level_or_zero(trace, k).max(1) as f64).ln();
    let mut dev = 0.0f64;
    let (mut mono, mut capped) = (true, true);
    for k in tm.members() {
        dev = dev.max((y_k(k) - y_m).abs());
        mono &= level_or_zero(trace, k - 1) <= level_or_zero(trace, k);
        capped &= (level_or_zero(trace, k) as f64) <= z_cap;
    }
    report.tm = Some(tm);
    report.max_deviation = Some(dev);
    report.a = Some(dev <= epsilon.powi(3));
    report.b = Some(mono);
    report.c = Some(capped);
    report.d = tm.k_max.map(|km| level_or_zero(trace, km + 1) as f64 > z_floor);
    report
}

/// Grow one SPG from `root` far enough to evaluate [`coupling_report`]:
/// through level `m`, then through one level past the set when applicable.
pub fn explore_for_coupling<L: StubLayout + ?Sized, R: Rng + ?Sized>(
    pool: &mut StubPool<'_, L>,
    root: usize,
    m: u32,
    epsilon: f64,
    n: usize,
    tau: f64,
    rng: &mut R,
) -> SpgTrace {
    let alpha = tau - 2.0;
    let mut ex = SpgExplorer::start(pool, root, Side::First, alpha);
    let mut pairs = 0;
    while ex.alive() && ex.level() < m {
        ex.grow_level(pool, rng, &mut pairs);
    }
    if !ex.alive() {
        return ex.into_trace();
    }
    let y_m = ex.trace().y()[m as usize];
    let target = match TmSet::new(y_m, m, epsilon, n, tau) {
        Some(tm) if y_m >= epsilon && y_m <= 1.0 / epsilon => tm.k_max.unwrap_or(m) + 1,
        _ => m,
    };
    while ex.alive() && ex.level() < target {
        ex.grow_level(pool, rng, &mut pairs);
    }
    ex.into_trace()
}
