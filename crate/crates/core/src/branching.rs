//! The delayed branching process: the root has offspring law `f`, every
//! later individual has offspring law `g`.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::{DegreeDistribution, Law, OffspringDistribution};
use crate::error::{Error, Result};
use crate::rng;
use crate::stats::Proportion;

pub const DEFAULT_CAP: u64 = 10_000_000;
pub const DEFAULT_MAX_GEN: u32 = 60;
const MIN_CAP: u64 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Extinction,
    Cap,
    MaxGen,
}

/// One realisation, `z[0] = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpRun {
    pub z: Vec<u64>,
    pub stopped_by: StopReason,
    /// `alpha^n log(z[n] v 1)` at the last generation `n`.
    pub y_n: f64,
}

impl BpRun {
    /// Last simulated generation.
    pub fn generations(&self) -> u32 {
        (self.z.len() - 1) as u32
    }

    /// `alpha^k log(z[k] v 1)`; generations past extinction count as 0.
    ///
    /// # Panics
    /// If `k` lies past the last generation of a surviving run.
    pub fn y_at(&self, k: u32, alpha: f64) -> f64 {
        let z = match self.z.get(k as usize) {
            Some(&z) => z,
            None => {
                assert_eq!(self.stopped_by, StopReason::Extinction, "generation {k} was not simulated");
                0
            }
        };
        alpha.powi(k as i32) * (z.max(1) as f64).ln()
    }
}

fn check_cap(cap: u64, max_gen: u32) -> Result<()> {
    if cap < MIN_CAP {
        return Err(Error::domain(format!("cap must be at least {MIN_CAP}, got {cap}")));
    }
    if max_gen < 1 {
        return Err(Error::domain("max_gen must be at least 1"));
    }
    Ok(())
}

/// Simulate until extinction, until a generation exceeds `cap`, or until
/// generation `max_gen`. Generation sizes up to `cap` are summed exactly.
pub fn simulate_delayed_bp<R: Rng + ?Sized>(
    f: &DegreeDistribution,
    g: &OffspringDistribution,
    tau: f64,
    cap: u64,
    max_gen: u32,
    rng: &mut R,
) -> Result<BpRun> {
    check_cap(cap, max_gen)?;
    Ok(run(f, g, tau - 2.0, cap, max_gen, rng))
}

fn run<R: Rng + ?Sized>(f: &DegreeDistribution, g: &OffspringDistribution, alpha: f64, cap: u64, max_gen: u32, rng: &mut R) -> BpRun {
    let mut z = vec![1, f.sample(rng)];
    let stopped_by = loop {
        let n = z.len() - 1;
        let last = z[n];
        if last == 0 {
            break StopReason::Extinction;
        }
        if last > cap {
            break StopReason::Cap;
        }
        if n as u32 >= max_gen {
            break StopReason::MaxGen;
        }
        z.push(g.sample_sum(last, rng));
    };
    let n = z.len() - 1;
    let y_n = match stopped_by {
        StopReason::Extinction => 0.0,
        _ => alpha.powi(n as i32) * (z[n].max(1) as f64).ln(),
    };
    BpRun { z, stopped_by, y_n }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YMeta {
    pub tau: f64,
    pub cap: u64,
    pub max_gen: u32,
    pub replicas: u64,
    pub master_seed: u64,
}

/// Monte Carlo draws of the limit `Y`; extinct runs contribute 0.
#[derive(Clone, Debug, PartialEq)]
pub struct YSampleSet {
    pub meta: YMeta,
    pub samples: Vec<f64>,
}

impl YSampleSet {
    pub fn tau(&self) -> f64 {
        self.meta.tau
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn survival_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return f64::NAN;
        }
        self.samples.iter().filter(|&&y| y > 0.0).count() as f64 / self.samples.len() as f64
    }

    /// One value per line.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        for y in &self.samples {
            writeln!(w, "{y}")?;
        }
        Ok(())
    }

    pub fn write_meta(&self, w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.meta)?;
        Ok(())
    }

    /// Write `<stem>.csv` and `<stem>.json` in `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.csv")))?))?;
        self.write_meta(std::fs::File::create(dir.join(format!("{stem}.json")))?)
    }

    pub fn load(csv: &Path, meta: &Path) -> Result<Self> {
        let meta: YMeta = serde_json::from_reader(std::fs::File::open(meta)?)?;
        let mut samples = Vec::new();
        for (i, line) in std::io::BufReader::new(std::fs::File::open(csv)?).lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let y: f64 = t.parse().map_err(|e| Error::Parse {
                path: csv.to_path_buf(),
                line: i + 1,
                message: format!("bad sample {t:?}: {e}"),
            })?;
            if !(y >= 0.0) {
                return Err(Error::Parse { path: csv.to_path_buf(), line: i + 1, message: format!("negative sample {y}") });
            }
            samples.push(y);
        }
        Ok(YSampleSet { meta, samples })
    }
}

/// `replicas` independent runs; replica `i` uses stream `i` of `master_seed`
/// and results are ordered by replica index.
pub fn sample_y(
    f: &DegreeDistribution,
    g: &OffspringDistribution,
    tau: f64,
    replicas: u64,
    cap: u64,
    max_gen: u32,
    master_seed: u64,
) -> Result<YSampleSet> {
    sample_y_range(f, g, tau, 0..replicas, cap, max_gen, master_seed)
}

/// As [`sample_y`] but over the replica indices in `range`.
pub fn sample_y_range(
    f: &DegreeDistribution,
    g: &OffspringDistribution,
    tau: f64,
    range: std::ops::Range<u64>,
    cap: u64,
    max_gen: u32,
    master_seed: u64,
) -> Result<YSampleSet> {
    check_cap(cap, max_gen)?;
    if range.is_empty() {
        return Err(Error::domain("need at least one replica"));
    }
    let alpha = tau - 2.0;
    let replicas = range.end - range.start;
    let samples = rng::with_pool(|| {
        range
            .into_par_iter()
            .map(|i| run(f, g, alpha, cap, max_gen, &mut rng::stream(master_seed, i)).y_n)
            .collect()
    });
    Ok(YSampleSet { meta: YMeta { tau, cap, max_gen, replicas, master_seed }, samples })
}

/// Fraction of replicas with `Z_m > 0`. Runs whose generation size exceeds
/// `10^6` before generation `m` are counted as surviving; with extinction
/// probability `pi < 1` per line the error is at most `pi^(10^6)`.
pub fn estimate_q_m(f: &DegreeDistribution, g: &OffspringDistribution, m: u32, replicas: u64, seed: u64) -> Result<Proportion> {
    if m < 1 {
        return Err(Error::domain("m must be at least 1"));
    }
    const SURE: u64 = 1_000_000;
    let alive: u64 = rng::with_pool(|| {
        (0..replicas)
            .into_par_iter()
            .map(|i| {
                let r = run(f, g, 0.0, SURE, m, &mut rng::stream(seed, i));
                (r.stopped_by != StopReason::Extinction) as u64
            })
            .sum()
    });
    Ok(Proportion::new(alive, replicas))
}

/// Extinction probability `pi` of one `g`-line (smallest root of
/// `pi = g(pi)`) and survival probability `q = 1 - f(pi)` of the delayed
/// process.
pub fn extinction_fixed_point(f: &DegreeDistribution, g: &OffspringDistribution) -> (f64, f64) {
    let mut pi = 0.0f64;
    for _ in 0..1_000_000 {
        let next = g.pgf(pi);
        if (next - pi).abs() < 1e-15 {
            pi = next;
            break;
        }
        pi = next;
    }
    (pi, 1.0 - f.pgf(pi))
}
