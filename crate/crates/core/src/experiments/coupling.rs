use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::branching::simulate_delayed_bp;
use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::graph::{pair_all, DegreeSequence, GroupedDegrees, StubPool, UnionFind};
use crate::rng;
use crate::spg::{coupling_report, explore_for_coupling, CouplingReport};
use crate::stats::{ks_statistic, Proportion};

const COUPLING_TAG: u64 = 0xC0;
const BP_TAG: u64 = 0xB0;
const CONNECTIVITY_TAG: u64 = 0xCC;

/// Frequencies of the coupling properties over replicas. Properties (a) to
/// (c) are counted over applicable replicas and (d) over applicable replicas
/// with a nonempty set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingSummary {
    pub n: u64,
    pub tau: f64,
    pub m: u32,
    pub epsilon: f64,
    pub replicas: u64,
    pub applicable: Proportion,
    pub a: Proportion,
    pub b: Proportion,
    pub c: Proportion,
    pub d: Proportion,
    /// KS distance between the exploration's `Y_m` and an independent
    /// branching process's `Y_m`.
    pub y_m_ks: f64,
    pub reports: Vec<CouplingReport>,
}

fn count(reports: &[&CouplingReport], pick: impl Fn(&CouplingReport) -> Option<bool>) -> Proportion {
    let vals: Vec<bool> = reports.iter().filter_map(|r| pick(r)).collect();
    Proportion::new(vals.iter().filter(|&&v| v).count() as u64, vals.len() as u64)
}

/// `cfg.replicas` explorations from node 0 of fresh graphs of size `n`, each
/// with an independent branching process of the same laws.
pub fn coupling_experiment(cfg: &ExperimentConfig, n: u64) -> Result<CouplingSummary> {
    cfg.validate()?;
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {}", cfg.epsilon)));
    }
    if cfg.m < 1 {
        return Err(Error::domain("m must be at least 1"));
    }
    let f = DegreeDistribution::build_family(cfg.tau)?;
    let g = f.size_bias();
    let reports = rng::with_pool(|| {
        (0..cfg.replicas)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::keyed(cfg.master_seed, &[COUPLING_TAG, n, i]);
                let layout = GroupedDegrees::sample_rooted(n as usize, &f, &mut r)?;
                let mut pool = StubPool::new(&layout);
                let trace = explore_for_coupling(&mut pool, 0, cfg.m, cfg.epsilon, n as usize, cfg.tau, &mut r);
                let mut rb = rng::keyed(cfg.master_seed, &[BP_TAG, n, i]);
                let bp = simulate_delayed_bp(&f, &g, cfg.tau, cfg.cap, cfg.m, &mut rb)?;
                Ok(coupling_report(&trace, Some(&bp), cfg.m, cfg.epsilon, n as usize, cfg.tau))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let ok: Vec<&CouplingReport> = reports.iter().filter(|r| r.applicable).collect();
    let spg_y: Vec<f64> = reports.iter().map(|r| r.y_m).collect();
    let bp_y: Vec<f64> = reports.iter().filter_map(|r| r.bp_y_m).collect();
    Ok(CouplingSummary {
        n,
        tau: cfg.tau,
        m: cfg.m,
        epsilon: cfg.epsilon,
        replicas: cfg.replicas,
        applicable: Proportion::new(ok.len() as u64, cfg.replicas),
        a: count(&ok, |r| r.a),
        b: count(&ok, |r| r.b),
        c: count(&ok, |r| r.c),
        d: count(&ok, |r| r.d),
        y_m_ks: if spg_y.is_empty() { 0.0 } else { ks_statistic(&spg_y, &bp_y) },
        reports,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub n: u64,
    /// Sampled distinct pairs lying in one component.
    pub connected: Proportion,
    pub largest_component: u64,
    pub largest_fraction: f64,
}

/// One fully paired graph of size `n`; `pairs` uniform distinct pairs are
/// checked for connection.
pub fn connectivity_check(tau: f64, n: u64, pairs: u64, seed: u64) -> Result<ConnectivityReport> {
    if n < 2 {
        return Err(Error::domain("N must be at least 2"));
    }
    let f = DegreeDistribution::build_family(tau)?;
    let mut r = rng::keyed(seed, &[CONNECTIVITY_TAG, n]);
    let seq = DegreeSequence::draw(n as usize, &f, &mut r)?;
    let g = pair_all(&seq, &mut r)?;
    let mut uf = UnionFind::new(n as usize);
    for &(a, b) in g.edges() {
        uf.union(a, b);
    }
    let largest = g.components().first().copied().unwrap_or(0) as u64;
    let mut hits = 0;
    for _ in 0..pairs {
        let u = r.random_range(0..n as usize);
        let mut v = r.random_range(0..n as usize - 1);
        if v >= u {
            v += 1;
        }
        hits += uf.same(u, v) as u64;
    }
    Ok(ConnectivityReport {
        n,
        connected: Proportion::new(hits, pairs),
        largest_component: largest,
        largest_fraction: largest as f64 / n as f64,
    })
}
