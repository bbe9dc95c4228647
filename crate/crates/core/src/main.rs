use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use knapmatch::error::{Error, Result};
use knapmatch::harness::verify::{Scale, Suite};
use knapmatch::harness::{
    d2d_defaults, gen_instance, knapsack_defaults, run_experiment, run_seeded, write_csv,
    Algo, Baseline, ExperimentConfig, Kind,
};
use knapmatch::io::{read_instance, read_json, write_instance, write_json};
use knapmatch::model::ArrivalOrder;
use knapmatch::rng::RngStream;

#[derive(Parser)]
#[command(name = "knapmatch", version, about = "Online knapsack and truthful budgeted matching")]
struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Knapsack,
    D2d,
    Matching,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Knapsack => Kind::Knapsack,
            KindArg::D2d => Kind::D2d,
            KindArg::Matching => Kind::Matching,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    On,
    Virtual,
    OnTruth,
    Threshold,
    Greedy,
    Exact,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::On => Algo::On,
            AlgoArg::Virtual => Algo::Virtual,
            AlgoArg::OnTruth => Algo::OnTruth,
            AlgoArg::Threshold => Algo::Threshold,
            AlgoArg::Greedy => Algo::Greedy,
            AlgoArg::Exact => Algo::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Exact,
    #[value(alias = "threshold-offline")]
    Threshold,
}

impl From<BaselineArg> for Baseline {
    fn from(b: BaselineArg) -> Self {
        match b {
            BaselineArg::Exact => Baseline::Exact,
            BaselineArg::Threshold => Baseline::Threshold,
        }
    }
}

/// Settings shared by `gen` and `experiment`; each overrides the config file.
#[derive(clap::Args)]
struct ConfigArgs {
    /// JSON file mirroring the experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_left: Option<usize>,
    #[arg(long)]
    n_right: Option<usize>,
    #[arg(long)]
    budget: Option<f64>,
    /// One value, or a comma-separated sweep.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, self.kind) {
            (Some(path), _) => read_json(path)?,
            (None, Some(KindArg::Knapsack)) => knapsack_defaults(),
            (None, _) => d2d_defaults(),
        };
        if let Some(k) = self.kind {
            cfg.kind = k.into();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.n_left {
            cfg.n_left = n;
        }
        if let Some(n) = self.n_right {
            cfg.n_right = n;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        match self.delta.as_slice() {
            [] => {}
            [d] => {
                cfg.delta = *d;
                cfg.deltas.clear();
            }
            ds => cfg.deltas = ds.to_vec(),
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit one generated instance as JSON.
    Gen {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm on one instance and print the outcome as JSON.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "on-truth")]
        algo: AlgoArg,
        /// JSON array of left ids; drawn from the seed when absent.
        #[arg(long)]
        order: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = std::f64::consts::E.recip())]
        t_fraction: f64,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        enforce_cost: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configured experiment and write the CSV.
    Experiment {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum)]
        algo: Option<AlgoArg>,
        #[arg(long, value_enum)]
        baseline: Option<BaselineArg>,
        #[arg(long)]
        t_fraction: Option<f64>,
        #[arg(long, action = clap::ArgAction::Set)]
        enforce_cost: Option<bool>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property suites and print one PASS/FAIL line each.
    Verify {
        /// Suite names; all when absent.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// A tenth of the full trial counts.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        list: bool,
    },
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let text = serde_json::to_string_pretty(value)?;
            writeln!(io::stdout(), "{text}").map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { cfg, out } => {
            let cfg = cfg.resolve()?;
            cfg.validate()?;
            let inst = gen_instance(&cfg, &RngStream::new(cfg.seed, "gen"))?;
            match out {
                Some(path) => write_instance(&path, &inst)?,
                None => emit_json(&inst, None)?,
            }
        }
        Command::Run {
            instance,
            algo,
            order,
            seed,
            t_fraction,
            enforce_cost,
            out,
        } => {
            let inst = read_instance(&instance)?.to_bipartite();
            let order: Option<ArrivalOrder> = order.map(|path| read_json(&path)).transpose()?;
            let outcome = run_seeded(algo.into(), &inst, order, seed, t_fraction, enforce_cost)?;
            emit_json(&outcome, out.as_deref())?;
        }
        Command::Experiment {
            cfg,
            trials,
            algo,
            baseline,
            t_fraction,
            enforce_cost,
            out,
        } => {
            let mut cfg = cfg.resolve()?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(a) = algo {
                cfg.algo = a.into();
            }
            if let Some(b) = baseline {
                cfg.baseline = b.into();
            }
            if let Some(t) = t_fraction {
                cfg.t_fraction = t;
            }
            if let Some(e) = enforce_cost {
                cfg.enforce_cost = e;
            }
            if out.is_some() {
                cfg.output = out;
            }
            let results = run_experiment(&cfg)?;
            match &cfg.output {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
                    write_csv(&results, io::BufWriter::new(file))?;
                }
                None => write_csv(&results, io::stdout().lock())?,
            }
            for s in &results.summaries {
                eprintln!(
                    "delta {}: mean ratio {:.4} (stderr {:.4}) over {} trials",
                    s.delta, s.ratio.mean, s.ratio.stderr, s.trials
                );
            }
        }
        Command::Verify {
            suites,
            seed,
            quick,
            list,
        } => {
            if list {
                for s in Suite::ALL {
                    println!("{}", s.name());
                }
                return Ok(true);
            }
            let selected: Vec<Suite> = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites
                    .iter()
                    .map(|n| {
                        Suite::from_name(n)
                            .ok_or_else(|| Error::Domain(format!("unknown suite {n:?}; try --list")))
                    })
                    .collect::<Result<_>>()?
            };
            let scale = if quick { Scale::Quick } else { Scale::Full };
            let mut all = true;
            for s in selected {
                let report = s.run(seed, scale)?;
                all &= report.passed;
                println!("{report}");
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
