use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use hoplab::branching::{sample_y, YSampleSet};
use hoplab::degree::Law;
use hoplab::experiments::{
    compare_external, concentration_check, coupling_experiment, ingest_histogram, limit_comparison, pair_hopcount,
    parallelism_check, run_survival_experiment, simulate_histogram, survival_for_n, ExperimentConfig, Sizes,
};
use hoplab::graph::pair_all;
use hoplab::limit_law::predicted_pmf_for_a;
use hoplab::spg::{default_max_level, write_batch_csv};
use hoplab::{rng, DegreeDistribution, DegreeSequence, Error, LawConstants, Result};
use serde_json::{json, Value};

use crate::{Command, SizeArgs};

/// File at `out`, or stdout.
fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

/// Summaries go to stderr when the data itself is on stdout.
fn summary(v: &Value, data_on_stdout: bool) -> Result<()> {
    if data_on_stdout {
        eprintln!("{}", serde_json::to_string_pretty(v)?);
        Ok(())
    } else {
        print_json(v)
    }
}

fn family(tau: f64) -> Result<DegreeDistribution> {
    DegreeDistribution::build_family(tau)
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Degrees { common, n, jmax } => {
            let f = family(common.tau)?;
            let mut w = sink(common.out.as_deref())?;
            match n {
                Some(n) => {
                    let seq = DegreeSequence::draw(n, &f, &mut rng::stream(common.seed, 0))?;
                    seq.write_to(&mut w)?;
                    w.flush()?;
                    summary(
                        &json!({"n": n, "total_stubs": seq.total_stubs(), "parity_fixed": seq.parity_fixed()}),
                        common.out.is_none(),
                    )
                }
                None => {
                    let g = f.size_bias();
                    writeln!(w, "j,f_j,g_j,tail_f,tail_g")?;
                    for j in 0..=jmax {
                        writeln!(w, "{},{},{},{},{}", j, f.pmf(j), g.pmf(j), f.tail(j), g.tail(j))?;
                    }
                    w.flush()?;
                    Ok(())
                }
            }
        }
        Command::Graph { common, n } => {
            let f = family(common.tau)?;
            let mut r = rng::stream(common.seed, 0);
            let seq = DegreeSequence::draw(n, &f, &mut r)?;
            let g = pair_all(&seq, &mut r)?;
            let mut w = sink(common.out.as_deref())?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
            let comps = g.components();
            summary(
                &json!({
                    "nodes": n,
                    "edges": g.edges().len(),
                    "parity_fixed": seq.parity_fixed(),
                    "components": comps.len(),
                    "largest_component": comps.first().copied().unwrap_or(0),
                }),
                common.out.is_none(),
            )
        }
        Command::Hopcount { common, n, pairs, traces } => {
            let cfg = ExperimentConfig {
                tau: common.tau,
                sizes: Sizes::List(vec![n]),
                pairs_per_n: pairs,
                master_seed: common.seed,
                ..Default::default()
            };
            cfg.validate()?;
            let f = family(common.tau)?;
            let (curve, records) = survival_for_n(&cfg, &f, n)?;
            let mut w = sink(common.out.as_deref())?;
            write_batch_csv(&records, &mut w)?;
            w.flush()?;
            if let Some(dir) = traces {
                if pairs == 0 {
                    return Err(domain("--traces needs at least one pair"));
                }
                let (_, res) = pair_hopcount(&cfg, &f, n, 0, default_max_level(n as usize, common.tau))?;
                std::fs::create_dir_all(&dir)?;
                res.trace1.write_csv(BufWriter::new(File::create(dir.join("trace_u.csv"))?))?;
                res.trace2.write_csv(BufWriter::new(File::create(dir.join("trace_v.csv"))?))?;
            }
            summary(
                &json!({
                    "n": n,
                    "pairs": curve.pairs,
                    "connected": curve.n_connected,
                    "disconnected": curve.n_disconnected,
                    "undetermined": curve.n_undetermined,
                }),
                common.out.is_none(),
            )
        }
        Command::Bp { common, replicas, cap, max_gen } => {
            let f = family(common.tau)?;
            let ys = sample_y(&f, &f.size_bias(), common.tau, replicas, cap, max_gen, common.seed)?;
            if let Some(dir) = &common.out {
                ys.save(dir, "y")?;
            }
            let mut sorted = ys.samples.clone();
            sorted.sort_by(f64::total_cmp);
            let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
            print_json(&json!({
                "replicas": replicas,
                "survival_fraction": ys.survival_fraction(),
                "mean": hoplab::stats::mean(&ys.samples),
                "quantiles": {"0.05": q(0.05), "0.5": q(0.5), "0.95": q(0.95)},
            }))
        }
        Command::Limitlaw { common, n, a, ysamples, ys, lmin, lmax, cap } => {
            let a = match (n, a) {
                (Some(n), _) => LawConstants::new(n, common.tau)?.a_n,
                (None, Some(a)) if a > -1.0 && a <= 0.0 => a,
                (None, Some(a)) => return Err(domain(format!("a must lie in (-1, 0], got {a}"))),
                (None, None) => return Err(domain("give --n or --a")),
            };
            let samples = load_or_sample(common.tau, ys.as_deref(), ysamples, cap, common.seed)?;
            let table = predicted_pmf_for_a(a, common.tau, n, &samples, lmin..=lmax)?;
            match &common.out {
                Some(dir) => table.save(dir, "limit_law")?,
                None => {
                    let mut w = sink(None)?;
                    table.write_csv(&mut w)?;
                    w.flush()?;
                }
            }
            summary(&serde_json::to_value(&table.meta)?, common.out.is_none())
        }
        Command::Survival { common, sizes, pairs, pairs_per_instance, config } => {
            let cfg = match config {
                Some(path) => {
                    let mut cfg = ExperimentConfig::from_json_file(&path)?;
                    if common.out.is_some() {
                        cfg.output_dir = common.out.clone();
                    }
                    cfg
                }
                None => ExperimentConfig {
                    tau: common.tau,
                    sizes: sizes_from(&sizes),
                    pairs_per_n: pairs,
                    pairs_per_instance,
                    master_seed: common.seed,
                    output_dir: common.out.clone(),
                    ..Default::default()
                },
            };
            let run = run_survival_experiment(&cfg)?;
            let curves: Vec<Value> = run
                .curves
                .iter()
                .map(|c| {
                    let conc = if c.pairs > 0 { Some(concentration_check(c, cfg.tau)?) } else { None };
                    Ok(json!({
                        "n": c.n,
                        "pairs": c.pairs,
                        "connected": c.n_connected,
                        "disconnected": c.n_disconnected,
                        "undetermined": c.n_undetermined,
                        "mean_distance": (c.n_connected > 0).then(|| c.mean_distance()),
                        "concentration": conc,
                    }))
                })
                .collect::<Result<_>>()?;
            let parallel = if run.curves.len() >= 2 && run.curves.iter().all(|c| c.n_connected > 0) {
                Some(parallelism_check(&run.curves, cfg.tau)?)
            } else {
                None
            };
            print_json(&json!({"curves": curves, "parallelism": parallel}))
        }
        Command::Compare { common, n, pairs, ysamples, external, cap } => match external {
            Some(path) => {
                let ext = ingest_histogram(&path)?;
                let sim = simulate_histogram(common.tau, n, pairs, common.seed)?;
                let cmp = compare_external(&sim, &ext)?;
                let mut w = sink(common.out.as_deref())?;
                cmp.write_csv(&mut w)?;
                w.flush()?;
                summary(&json!({"n": n, "tau": common.tau, "tv": cmp.tv}), common.out.is_none())
            }
            None => {
                let cfg = ExperimentConfig {
                    tau: common.tau,
                    sizes: Sizes::List(vec![n]),
                    pairs_per_n: pairs,
                    master_seed: common.seed,
                    y_samples: ysamples,
                    cap,
                    ..Default::default()
                };
                let cmp = limit_comparison(&cfg)?.remove(0);
                let mut w = sink(common.out.as_deref())?;
                cmp.write_csv(&mut w)?;
                w.flush()?;
                summary(
                    &json!({
                        "n": cmp.n,
                        "tau": cmp.tau,
                        "k_tau_n": cmp.k_tau_n,
                        "a_n": cmp.a_n,
                        "tv": cmp.tv,
                        "pre_asymptotic": cmp.pre_asymptotic,
                        "empirical_mode": cmp.empirical_mode(),
                        "predicted_mode": cmp.predicted_mode(),
                    }),
                    common.out.is_none(),
                )
            }
        },
        Command::Couple { common, n, m, eps, replicas, cap } => {
            let cfg = ExperimentConfig { tau: common.tau, m, epsilon: eps, replicas, cap, master_seed: common.seed, ..Default::default() };
            let s = coupling_experiment(&cfg, n)?;
            if let Some(path) = &common.out {
                let w = sink(Some(path))?;
                serde_json::to_writer_pretty(w, &s.reports)?;
            }
            let mut v = serde_json::to_value(&s)?;
            if let Value::Object(map) = &mut v {
                map.remove("reports");
            }
            print_json(&v)
        }
    }
}

fn sizes_from(args: &SizeArgs) -> Sizes {
    match (args.n1, args.kmax) {
        (Some(n1), Some(k_max)) => Sizes::Subsequence { n1, k_max },
        _ if !args.n.is_empty() => Sizes::List(args.n.clone()),
        _ => ExperimentConfig::default().sizes,
    }
}

fn load_or_sample(tau: f64, csv: Option<&Path>, count: u64, cap: u64, seed: u64) -> Result<YSampleSet> {
    match csv {
        Some(csv) => {
            let meta: PathBuf = csv.with_extension("json");
            let ys = YSampleSet::load(csv, &meta)?;
            if (ys.tau() - tau).abs() > 1e-12 {
                return Err(domain(format!("Y samples were drawn at tau = {}, not {tau}", ys.tau())));
            }
            Ok(ys)
        }
        None => {
            let f = family(tau)?;
            sample_y(&f, &f.size_bias(), tau, count, cap, hoplab::branching::DEFAULT_MAX_GEN, seed)
        }
    }
}
