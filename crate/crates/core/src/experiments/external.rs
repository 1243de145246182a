use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{survival_for_n, ExperimentConfig, Sizes};
use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::stats::{normalise, tv_distance};

/// Read a `distance,count` histogram. A first line starting with a letter is
/// taken as a header; blank lines are skipped; repeated distances add up.
pub fn ingest_histogram(path: &Path) -> Result<BTreeMap<u64, u64>> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut hist = BTreeMap::new();
    let mut first = true;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let header = first && line.starts_with(|c: char| c.is_ascii_alphabetic());
        first = false;
        if header {
            continue;
        }
        let err = |message: String| Error::Parse { path: path.to_path_buf(), line: lineno, message };
        let mut fields = line.split(',').map(str::trim);
        let (Some(d), Some(c), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err(format!("expected two columns, got {line:?}")));
        };
        let d: u64 = d.parse().map_err(|_| err(format!("distance is not a nonnegative integer: {d:?}")))?;
        let c: u64 = c.parse().map_err(|_| err(format!("count is not a nonnegative integer: {c:?}")))?;
        *hist.entry(d).or_insert(0) += c;
    }
    if hist.is_empty() {
        return Err(Error::domain(format!("{}: no histogram rows", path.display())));
    }
    Ok(hist)
}

pub fn write_histogram(hist: &BTreeMap<u64, u64>, mut w: impl Write) -> Result<()> {
    writeln!(w, "distance,count")?;
    for (d, c) in hist {
        writeln!(w, "{d},{c}")?;
    }
    Ok(())
}

/// Hopcount histogram of `pairs` connected-or-not pairs at size `n`; only
/// connected pairs are counted.
pub fn simulate_histogram(tau: f64, n: u64, pairs: u64, seed: u64) -> Result<BTreeMap<u64, u64>> {
    let cfg = ExperimentConfig { tau, sizes: Sizes::List(vec![n]), pairs_per_n: pairs, master_seed: seed, ..Default::default() };
    cfg.validate()?;
    let f = DegreeDistribution::build_family(tau)?;
    let (curve, _) = survival_for_n(&cfg, &f, n)?;
    Ok(curve.histogram.iter().map(|(&d, &c)| (d as u64, c)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalComparison {
    /// `(distance, simulated pmf, external pmf)`.
    pub rows: Vec<(u64, f64, f64)>,
    pub tv: f64,
}

impl ExternalComparison {
    /// Columns `distance,simulated,external`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "distance,simulated,external")?;
        for (d, s, e) in &self.rows {
            writeln!(w, "{d},{s},{e}")?;
        }
        Ok(())
    }
}

pub fn compare_external(simulated: &BTreeMap<u64, u64>, external: &BTreeMap<u64, u64>) -> Result<ExternalComparison> {
    let to_i = |h: &BTreeMap<u64, u64>| h.iter().map(|(&d, &c)| (d as i64, c)).collect::<BTreeMap<i64, u64>>();
    let (s, e) = (to_i(simulated), to_i(external));
    if s.values().sum::<u64>() == 0 || e.values().sum::<u64>() == 0 {
        return Err(Error::domain("histogram with zero total count"));
    }
    let (ps, pe) = (normalise(&s), normalise(&e));
    let keys: std::collections::BTreeSet<i64> = ps.keys().chain(pe.keys()).copied().collect();
    let rows = keys
        .iter()
        .map(|k| (*k as u64, ps.get(k).copied().unwrap_or(0.0), pe.get(k).copied().unwrap_or(0.0)))
        .collect();
    Ok(ExternalComparison { rows, tv: tv_distance(&ps, &pe) })
}
