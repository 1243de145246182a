mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "hoplab", version, about = "Hopcount experiments on configuration-model graphs with power-law degrees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Power-law exponent in (2, 3).
    #[arg(long, default_value_t = 2.8)]
    pub tau: f64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file or directory, depending on the subcommand.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the degree laws or sample a degree sequence.
    Degrees {
        #[command(flatten)]
        common: Common,
        /// Sample a sequence of this many degrees instead of tabulating.
        #[arg(long)]
        n: Option<usize>,
        /// Largest degree in the table.
        #[arg(long, default_value_t = 20)]
        jmax: u64,
    },
    /// Generate a fully paired graph and write its edge list.
    Graph {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
    },
    /// Hopcounts of uniformly chosen pairs, one fresh graph per pair.
    Hopcount {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        pairs: u64,
        /// Directory for the two exploration traces of the first pair.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Sample the branching-process limit Y.
    Bp {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        replicas: u64,
        #[arg(long, default_value_t = hoplab::branching::DEFAULT_CAP)]
        cap: u64,
        #[arg(long, default_value_t = hoplab::branching::DEFAULT_MAX_GEN)]
        max_gen: u32,
    },
    /// Tabulate the predicted law of the recentred hopcount.
    Limitlaw {
        #[command(flatten)]
        common: Common,
        /// Graph size giving the centring defect; exclusive with --a.
        #[arg(long, conflicts_with = "a")]
        n: Option<u64>,
        /// Centring defect in (-1, 0].
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Number of Y samples to draw when --ys is absent.
        #[arg(long, default_value_t = 100_000)]
        ysamples: u64,
        /// Stored Y samples: CSV path; the JSON sidecar must sit next to it.
        #[arg(long)]
        ys: Option<PathBuf>,
        #[arg(long, default_value_t = -15, allow_hyphen_values = true)]
        lmin: i64,
        #[arg(long, default_value_t = 15, allow_hyphen_values = true)]
        lmax: i64,
        #[arg(long, default_value_t = hoplab::branching::DEFAULT_CAP)]
        cap: u64,
    },
    /// Survival functions of the hopcount over a list of sizes.
    Survival {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
        /// Pairs per fully paired instance; 1 draws a fresh graph per pair.
        #[arg(long, default_value_t = 1)]
        pairs_per_instance: u64,
        /// JSON experiment configuration; other flags are ignored.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare hopcounts with the limit law or with an external histogram.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        pairs: u64,
        #[arg(long, default_value_t = 100_000)]
        ysamples: u64,
        /// `distance,count` CSV to compare against instead of the limit law.
        #[arg(long)]
        external: Option<PathBuf>,
        #[arg(long, default_value_t = hoplab::branching::DEFAULT_CAP)]
        cap: u64,
    },
    /// Frequencies of the exploration/branching coupling properties.
    Couple {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 4)]
        m: u32,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        replicas: u64,
        #[arg(long, default_value_t = hoplab::branching::DEFAULT_CAP)]
        cap: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SizeArgs {
    /// Explicit sizes, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["n1", "kmax"])]
    pub n: Vec<u64>,
    /// First size of the subsequence N_k.
    #[arg(long, requires = "kmax")]
    pub n1: Option<u64>,
    /// Number of subsequence terms.
    #[arg(long, requires = "n1")]
    pub kmax: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hoplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
