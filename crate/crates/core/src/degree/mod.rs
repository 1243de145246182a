//! Node-degree law `F`, its size-biased forward-degree law `G`, and the
//! closed generating-function family used throughout the experiments.

mod davies;
mod kernel;
mod law;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use davies::{check_davies_conditions, log_grid, tail_exponent_fit, DaviesReport};
pub use kernel::KernelKind;
pub use law::{compensated_sum, DiscreteLaw, DEFAULT_TABLE_HORIZON};

/// Default absolute tolerance on `|sum pmf - 1|` for user tables.
pub const TABLE_NORMALIZATION_TOL: f64 = 1e-9;

/// Shared read access to the underlying law.
pub trait Law {
    fn law(&self) -> &DiscreteLaw;

    fn pmf(&self, j: u64) -> f64 {
        self.law().pmf(j)
    }

    /// `1 - F(x)`.
    fn tail(&self, x: u64) -> f64 {
        self.law().tail(x)
    }

    fn cdf(&self, x: u64) -> f64 {
        self.law().cdf(x)
    }

    fn pgf(&self, s: f64) -> f64 {
        self.law().pgf(s)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.law().sample(rng)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 2.0 && tau < 3.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tau must lie in (2, 3), got {tau}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Family {
    Kernel { tau: f64 },
    Table,
}

/// Law of a node degree, supported on `{1, 2, ...}`.
#[derive(Clone, Debug)]
pub struct DegreeDistribution {
    law: DiscreteLaw,
    family: Family,
    mean: f64,
}

impl DegreeDistribution {
    /// The member of the closed family with exponent `tau`, tabulated to
    /// [`DEFAULT_TABLE_HORIZON`].
    pub fn build_family(tau: f64) -> Result<Self> {
        Self::build_family_with_horizon(tau, DEFAULT_TABLE_HORIZON)
    }

    pub fn build_family_with_horizon(tau: f64, horizon: usize) -> Result<Self> {
        check_tau(tau)?;
        let law = DiscreteLaw::kernel(tau - 2.0, KernelKind::Degree, horizon);
        Ok(DegreeDistribution { mean: law.mean(), law, family: Family::Kernel { tau } })
    }

    /// A user-supplied pmf, `pmf[j] = P(D = j)`. Must put no mass on 0 and sum
    /// to one within [`TABLE_NORMALIZATION_TOL`]; it is renormalised exactly.
    pub fn from_table(pmf: Vec<f64>) -> Result<Self> {
        Self::from_table_with_tolerance(pmf, TABLE_NORMALIZATION_TOL)
    }

    pub fn from_table_with_tolerance(pmf: Vec<f64>, tol: f64) -> Result<Self> {
        let pmf = validate_table(pmf, tol)?;
        if pmf[0] != 0.0 {
            return Err(Error::domain("degree pmf must put no mass on 0"));
        }
        let law = DiscreteLaw::finite(pmf);
        Ok(DegreeDistribution { mean: law.mean(), law, family: Family::Table })
    }

    /// User table with a power-law sanity check: the log-log slope of the
    /// tail over `grid` must be within `slope_tol` of `-(tau - 1)`.
    pub fn from_table_checked(pmf: Vec<f64>, tau: f64, grid: &[u64], slope_tol: f64) -> Result<Self> {
        check_tau(tau)?;
        let dist = Self::from_table(pmf)?;
        let slope = tail_exponent_fit(&dist, grid)
            .ok_or_else(|| Error::domain("tail vanishes on the check grid"))?;
        if (slope + (tau - 1.0)).abs() > slope_tol {
            return Err(Error::domain(format!(
                "tail slope {slope:.3} is not within {slope_tol} of {:.3}",
                -(tau - 1.0)
            )));
        }
        Ok(dist)
    }

    pub fn point_mass(j: u64) -> Result<Self> {
        let mut pmf = vec![0.0; j as usize + 1];
        pmf[j as usize] = 1.0;
        Self::from_table(pmf)
    }

    pub fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        match spec {
            DistributionSpec::KernelTau { tau } => Self::build_family(*tau),
            DistributionSpec::Table { pmf } => Self::from_table(pmf.clone()),
        }
    }

    /// Exponent of the built-in family; `None` for tables.
    pub fn tau(&self) -> Option<f64> {
        match self.family {
            Family::Kernel { tau } => Some(tau),
            Family::Table => None,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_kernel(&self) -> bool {
        matches!(self.family, Family::Kernel { .. })
    }

    /// Size-biased forward-degree law `g_j = (j+1) f_{j+1} / mu`.
    pub fn size_bias(&self) -> OffspringDistribution {
        match self.family {
            Family::Kernel { tau } => OffspringDistribution {
                law: DiscreteLaw::kernel(tau - 2.0, KernelKind::Offspring, self.law.horizon()),
                tau: Some(tau),
                source: OffspringSource::Exact,
            },
            Family::Table => {
                let h = self.law.horizon();
                let g: Vec<f64> = (0..h).map(|j| (j + 1) as f64 * self.law.pmf(j as u64 + 1) / self.mean).collect();
                OffspringDistribution {
                    law: DiscreteLaw::finite(normalise(g)),
                    tau: None,
                    source: OffspringSource::Exact,
                }
            }
        }
    }
}

impl Law for DegreeDistribution {
    fn law(&self) -> &DiscreteLaw {
        &self.law
    }
}

/// Origin of an offspring law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OffspringSource {
    /// Size-biased from a degree law.
    Exact,
    /// Stub-weighted frequencies of a realised degree sequence.
    Empirical,
}

/// Law of the number of children in the (delayed) branching process.
#[derive(Clone, Debug)]
pub struct OffspringDistribution {
    law: DiscreteLaw,
    tau: Option<f64>,
    source: OffspringSource,
}

impl OffspringDistribution {
    pub fn from_table(pmf: Vec<f64>) -> Result<Self> {
        let pmf = validate_table(pmf, TABLE_NORMALIZATION_TOL)?;
        Ok(OffspringDistribution { law: DiscreteLaw::finite(pmf), tau: None, source: OffspringSource::Exact })
    }

    pub fn point_mass(j: u64) -> Result<Self> {
        let mut pmf = vec![0.0; j as usize + 1];
        pmf[j as usize] = 1.0;
        Self::from_table(pmf)
    }

    /// `g_j^(N) = (j+1)/L_N * #{i : D_i = j+1}` with `L_N = sum D_i`.
    pub fn empirical(degrees: &[u64]) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::domain("empirical offspring law needs at least one degree"));
        }
        if degrees.contains(&0) {
            return Err(Error::domain("degrees must be at least 1"));
        }
        let total: u128 = degrees.iter().map(|&d| d as u128).sum();
        let max = *degrees.iter().max().expect("nonempty") as usize;
        let mut counts = vec![0u64; max + 1];
        for &d in degrees {
            counts[d as usize] += 1;
        }
        let g: Vec<f64> = (0..max).map(|j| (j + 1) as f64 * counts[j + 1] as f64 / total as f64).collect();
        Ok(OffspringDistribution { law: DiscreteLaw::finite(g), tau: None, source: OffspringSource::Empirical })
    }

    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn source(&self) -> OffspringSource {
        self.source
    }

    /// Sum of `n` i.i.d. draws (saturating).
    pub fn sample_sum<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> u64 {
        self.law.sample_sum(n, rng)
    }
}

impl Law for OffspringDistribution {
    fn law(&self) -> &DiscreteLaw {
        &self.law
    }
}

fn validate_table(pmf: Vec<f64>, tol: f64) -> Result<Vec<f64>> {
    if pmf.is_empty() {
        return Err(Error::domain("empty pmf table"));
    }
    if let Some(j) = pmf.iter().position(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::domain(format!("pmf entry {j} is negative or not finite")));
    }
    let sum = compensated_sum(pmf.iter().copied());
    if (sum - 1.0).abs() > tol {
        return Err(Error::domain(format!("pmf sums to {sum}, not 1 within {tol}")));
    }
    Ok(normalise(pmf))
}

fn normalise(mut pmf: Vec<f64>) -> Vec<f64> {
    let sum = compensated_sum(pmf.iter().copied());
    if sum > 0.0 && sum != 1.0 {
        pmf.iter_mut().for_each(|p| *p /= sum);
    }
    pmf
}

/// Serialisable description of a degree law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum DistributionSpec {
    #[serde(rename = "kernel-tau")]
    KernelTau { tau: f64 },
    #[serde(rename = "table")]
    Table { pmf: Vec<f64> },
}
