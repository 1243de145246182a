use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::degree::DegreeDistribution;
use crate::error::Result;
use crate::graph::{pair_all, DegreeSequence, GroupedDegrees, StubPool};
use crate::rng;
use crate::spg::{default_max_level, hopcount, write_batch_csv, HopcountRecord, HopcountResult, HopcountStatus};

/// Marks instance streams so they never coincide with per-pair streams.
const INSTANCE_TAG: u64 = 1 << 63;

/// Empirical distribution of the hopcount at one graph size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub n: u64,
    pub pairs: u64,
    pub n_connected: u64,
    pub n_disconnected: u64,
    pub n_undetermined: u64,
    /// Connected pairs by distance.
    pub histogram: BTreeMap<u32, u64>,
    /// `P(H_N > d | connected)` for `d = 0..=max distance`.
    pub points: BTreeMap<u32, f64>,
}

impl SurvivalCurve {
    pub fn from_records(n: u64, records: &[HopcountRecord]) -> Self {
        let mut histogram = BTreeMap::new();
        let (mut c, mut d, mut u) = (0, 0, 0);
        for r in records {
            match r.status {
                HopcountStatus::Connected => {
                    c += 1;
                    *histogram.entry(r.distance.expect("connected pairs have a distance")).or_insert(0) += 1;
                }
                HopcountStatus::Disconnected => d += 1,
                HopcountStatus::Undetermined => u += 1,
            }
        }
        let mut points = BTreeMap::new();
        if c > 0 {
            let max = *histogram.keys().next_back().expect("nonempty");
            let mut above = c;
            for dist in 0..=max {
                above -= histogram.get(&dist).copied().unwrap_or(0);
                points.insert(dist, above as f64 / c as f64);
            }
        }
        SurvivalCurve {
            n,
            pairs: records.len() as u64,
            n_connected: c,
            n_disconnected: d,
            n_undetermined: u,
            histogram,
            points,
        }
    }

    /// `P(H_N > d | connected)` for any integer `d`.
    pub fn survival(&self, d: i64) -> f64 {
        if d < 0 {
            return 1.0;
        }
        self.points.get(&(d as u32)).copied().unwrap_or(0.0)
    }

    pub fn max_distance(&self) -> Option<u32> {
        self.histogram.keys().next_back().copied()
    }

    pub fn mean_distance(&self) -> f64 {
        let s: f64 = self.histogram.iter().map(|(&d, &c)| d as f64 * c as f64).sum();
        s / self.n_connected as f64
    }

    pub fn connected_fraction(&self) -> f64 {
        self.n_connected as f64 / self.pairs as f64
    }

    /// Conditional pmf of `H_N - shift`.
    pub fn centred_pmf(&self, shift: i64) -> BTreeMap<i64, f64> {
        self.histogram
            .iter()
            .map(|(&d, &c)| (d as i64 - shift, c as f64 / self.n_connected as f64))
            .collect()
    }

    /// Columns `d,count,survival`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "d,count,survival")?;
        for (&d, &s) in &self.points {
            writeln!(w, "{},{},{}", d, self.histogram.get(&d).copied().unwrap_or(0), s)?;
        }
        Ok(())
    }
}

/// Curves and raw records for every size of a configuration.
#[derive(Clone, Debug)]
pub struct SurvivalRun {
    pub curves: Vec<SurvivalCurve>,
    pub records: Vec<Vec<HopcountRecord>>,
}

#[derive(Serialize)]
struct RunMeta {
    /// The configuration without `output_dir`, so that runs into different
    /// directories produce identical metadata.
    config: ExperimentConfig,
    n_list: Vec<u64>,
    summary: Vec<Summary>,
}

#[derive(Serialize)]
struct Summary {
    n: u64,
    pairs: u64,
    n_connected: u64,
    n_disconnected: u64,
    n_undetermined: u64,
    mean_distance: Option<f64>,
}

/// Hopcounts of `pairs_per_n` pairs at every size of `cfg`, written to
/// `output_dir` when set.
pub fn run_survival_experiment(cfg: &ExperimentConfig) -> Result<SurvivalRun> {
    cfg.validate()?;
    let dist = DegreeDistribution::build_family(cfg.tau)?;
    let mut curves = Vec::new();
    let mut records = Vec::new();
    for n in cfg.n_list()? {
        let (curve, recs) = survival_for_n(cfg, &dist, n)?;
        curves.push(curve);
        records.push(recs);
    }
    if let Some(dir) = &cfg.output_dir {
        write_outputs(cfg, dir, &curves, &records)?;
    }
    Ok(SurvivalRun { curves, records })
}

fn write_outputs(cfg: &ExperimentConfig, dir: &Path, curves: &[SurvivalCurve], records: &[Vec<HopcountRecord>]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (curve, recs) in curves.iter().zip(records) {
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("survival_N{}.csv", curve.n)))?);
        curve.write_csv(&mut w)?;
        w.flush()?;
        let mut w = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("hopcounts_N{}.csv", curve.n)))?);
        write_batch_csv(recs, &mut w)?;
        w.flush()?;
    }
    let meta = RunMeta {
        config: ExperimentConfig { output_dir: None, ..cfg.clone() },
        n_list: curves.iter().map(|c| c.n).collect(),
        summary: curves
            .iter()
            .map(|c| Summary {
                n: c.n,
                pairs: c.pairs,
                n_connected: c.n_connected,
                n_disconnected: c.n_disconnected,
                n_undetermined: c.n_undetermined,
                mean_distance: (c.n_connected > 0).then(|| c.mean_distance()),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(std::fs::File::create(dir.join("run.json"))?, &meta)?;
    Ok(())
}

/// Pair `p` at size `n`: a fresh graph from the stream keyed by `(n, p)`,
/// explored from nodes 0 and 1. Returns the stream key and the result.
pub fn pair_hopcount(
    cfg: &ExperimentConfig,
    dist: &DegreeDistribution,
    n: u64,
    p: u64,
    max_level: u32,
) -> Result<(u64, HopcountResult)> {
    let key = rng::derive_key(&[n, p]);
    let mut r = rng::stream(cfg.master_seed, key);
    // Nodes 0 and 1 of an i.i.d. sequence stand for a uniform pair of
    // distinct nodes.
    let g = GroupedDegrees::sample_rooted(n as usize, dist, &mut r)?;
    let mut pool = StubPool::new(&g);
    Ok((key, hopcount(&mut pool, 0, 1, max_level, cfg.tau - 2.0, &mut r)))
}

/// One size. Pair `p` at size `n` always uses the stream keyed by `(n, p)`,
/// so the same size gives the same pairs in any configuration with the same
/// master seed.
pub fn survival_for_n(cfg: &ExperimentConfig, dist: &DegreeDistribution, n: u64) -> Result<(SurvivalCurve, Vec<HopcountRecord>)> {
    let max_level = cfg.max_level.unwrap_or_else(|| default_max_level(n as usize, cfg.tau));
    let records: Vec<HopcountRecord> = if cfg.pairs_per_instance <= 1 {
        rng::with_pool(|| {
            (0..cfg.pairs_per_n)
                .into_par_iter()
                .map(|p| {
                    let (key, res) = pair_hopcount(cfg, dist, n, p, max_level)?;
                    Ok(HopcountRecord { seed: key, u: 0, v: 1, distance: res.distance, status: res.status })
                })
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        let per = cfg.pairs_per_instance;
        let instances = cfg.pairs_per_n.div_ceil(per);
        let nested = rng::with_pool(|| {
            (0..instances)
                .into_par_iter()
                .map(|i| {
                    let key = rng::derive_key(&[n, i, INSTANCE_TAG]);
                    let mut r = rng::stream(cfg.master_seed, key);
                    let seq = DegreeSequence::draw(n as usize, dist, &mut r)?;
                    let g = pair_all(&seq, &mut r)?;
                    let count = per.min(cfg.pairs_per_n - i * per);
                    let mut out = Vec::with_capacity(count as usize);
                    for _ in 0..count {
                        let u = r.random_range(0..n as usize);
                        let mut v = r.random_range(0..n as usize - 1);
                        if v >= u {
                            v += 1;
                        }
                        let distance = g.bfs_hopcount(u, v);
                        let status = if distance.is_some() { HopcountStatus::Connected } else { HopcountStatus::Disconnected };
                        out.push(HopcountRecord { seed: key, u, v, distance, status });
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()
        })?;
        nested.into_iter().flatten().collect()
    };
    Ok((SurvivalCurve::from_records(n, &records), records))
}
