//! Reproducible end-to-end experiments. Every random quantity is drawn from a
//! stream keyed by the master seed and the work item's indices, and results
//! are merged in index order, so outputs do not depend on thread count.

mod analysis;
mod coupling;
mod external;
mod survival;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::branching::{DEFAULT_CAP, DEFAULT_MAX_GEN};
use crate::error::{Error, Result};

pub use analysis::{
    compare_with_limit, concentration_check, limit_comparison, parallelism_check, shifted_sup_distance,
    ConcentrationReport, LimitComparison, LimitRow, ParallelismReport, ShiftStat, CONCENTRATION_WIDTHS,
    PRE_ASYMPTOTIC_N,
};
pub use coupling::{connectivity_check, coupling_experiment, ConnectivityReport, CouplingSummary};
pub use external::{compare_external, ingest_histogram, simulate_histogram, write_histogram, ExternalComparison};
pub use survival::{pair_hopcount, run_survival_experiment, survival_for_n, SurvivalCurve, SurvivalRun};

/// Graph sizes: an explicit list or the subsequence `N_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sizes {
    List(Vec<u64>),
    Subsequence { n1: u64, k_max: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub tau: f64,
    pub sizes: Sizes,
    pub pairs_per_n: u64,
    /// 1 draws a fresh graph per pair. Larger values reuse each fully paired
    /// instance for that many pairs; pairs on one instance are weakly
    /// dependent.
    pub pairs_per_instance: u64,
    pub replicas: u64,
    pub master_seed: u64,
    pub epsilon: f64,
    pub m: u32,
    pub output_dir: Option<PathBuf>,
    pub y_samples: u64,
    pub cap: u64,
    pub max_gen: u32,
    /// Defaults to `2 ceil(log log N / |log(tau - 2)|) + 40` per size.
    pub max_level: Option<u32>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            tau: 2.8,
            sizes: Sizes::Subsequence { n1: 1000, k_max: 4 },
            pairs_per_n: 10_000,
            pairs_per_instance: 1,
            replicas: 1000,
            master_seed: 1,
            epsilon: 0.3,
            m: 4,
            output_dir: None,
            y_samples: 100_000,
            cap: DEFAULT_CAP,
            max_gen: DEFAULT_MAX_GEN,
            max_level: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 2.0 && self.tau < 3.0) {
            return Err(Error::domain(format!("tau must lie in (2, 3), got {}", self.tau)));
        }
        if self.pairs_per_instance == 0 {
            return Err(Error::domain("pairs_per_instance must be at least 1"));
        }
        if self.n_list()?.iter().any(|&n| n < 2) {
            return Err(Error::domain("every N must be at least 2"));
        }
        Ok(())
    }

    pub fn n_list(&self) -> Result<Vec<u64>> {
        match &self.sizes {
            Sizes::List(v) => Ok(v.clone()),
            Sizes::Subsequence { n1, k_max } => subsequence(*n1, self.tau, *k_max),
        }
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(std::fs::File::open(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `N_k = floor(exp((tau - 2)^-(k-1) ln N_1))` for `k = 1..=k_max`.
pub fn subsequence(n1: u64, tau: f64, k_max: u32) -> Result<Vec<u64>> {
    if n1 < 2 {
        return Err(Error::domain("N_1 must be at least 2"));
    }
    let kappa = 1.0 / (tau - 2.0);
    let ln1 = (n1 as f64).ln();
    (1..=k_max)
        .map(|k| {
            let x = (kappa.powi(k as i32 - 1) * ln1).exp();
            if x >= u64::MAX as f64 {
                Err(Error::Overflow(format!("N_{k} does not fit in 64 bits")))
            } else {
                // Float exp loses the last digit when the exact value is an
                // integer, as at k = 1.
                let r = x.round();
                Ok(if (x - r).abs() <= 1e-12 * x { r } else { x.floor() } as u64)
            }
        })
        .collect()
}
