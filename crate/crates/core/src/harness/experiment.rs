use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::gen::gen_instance;
use super::{Algo, Baseline, ExperimentConfig};
use crate::analysis::mean_and_stderr;
use crate::error::{Error, Result};
use crate::model::{within_budget, ArrivalOrder, BipartiteInstance, EdgeSet, Matching};
use crate::offline::{brute_force_opt, greedy_matching, threshold, Gamma};
use crate::online::{run_on, run_virtual, t_from_fraction, RunOutcome};
use crate::rng::RngStream;
use crate::truthful::run_on_truth;

pub const CSV_HEADER: [&str; 17] = [
    "kind",
    "delta",
    "trial",
    "seed",
    "algo",
    "baseline",
    "n_left",
    "n_right",
    "budget",
    "online_value",
    "baseline_value",
    "ratio",
    "spend",
    "payments_total",
    "feasible",
    "gamma",
    "t",
];

/// `online_value / baseline_value`.
pub fn competitive_ratio(online_value: f64, baseline_value: f64) -> Result<f64> {
    if baseline_value.is_nan() || baseline_value <= 0.0 {
        return Err(Error::domain(format!(
            "competitive ratio needs a positive baseline, got {baseline_value}"
        )));
    }
    Ok(online_value / baseline_value)
}

/// What any algorithm reports, online or not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoOutcome {
    pub algo: Algo,
    pub selected_lefts: Vec<usize>,
    /// Absent for the Virtual comparator, which assigns no rights.
    pub matching: Option<Matching>,
    pub payments: Vec<f64>,
    pub value: f64,
    pub spend: f64,
    pub payments_total: f64,
    pub feasible: bool,
    pub gamma: Option<Gamma>,
    pub t: Option<usize>,
}

impl AlgoOutcome {
    fn from_matching(algo: Algo, inst: &BipartiteInstance, m: Matching, gamma: Option<Gamma>) -> Self {
        let run = RunOutcome::new(inst, m, vec![0.0; inst.left_count()], Gamma::Unbounded, 0);
        AlgoOutcome {
            gamma,
            t: None,
            ..Self::from_run(algo, run)
        }
    }

    fn from_run(algo: Algo, run: RunOutcome) -> Self {
        AlgoOutcome {
            algo,
            selected_lefts: run.selected.left_ids(),
            payments_total: run.payments_total(),
            value: run.value,
            spend: run.spend,
            feasible: run.feasible,
            gamma: Some(run.gamma_used),
            t: Some(run.t_used),
            payments: run.payments,
            matching: Some(run.selected),
        }
    }
}

/// Run one algorithm on one instance. `order` drives the online algorithms;
/// `coins` decides the observed prefix of the truthful mechanism.
pub fn run_algorithm(
    algo: Algo,
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    coins: &RngStream,
    t_fraction: f64,
    enforce_cost: bool,
) -> Result<AlgoOutcome> {
    let t = t_from_fraction(inst.left_count(), t_fraction);
    Ok(match algo {
        Algo::On => AlgoOutcome::from_run(algo, run_on(inst, order, t, enforce_cost)?),
        Algo::OnTruth => AlgoOutcome::from_run(algo, run_on_truth(inst, order, coins, enforce_cost)?),
        Algo::Virtual => {
            let selected = run_virtual(inst, order, t)?;
            let value = selected
                .iter()
                .map(|&l| inst.left_value(l).expect("knapsack-class lefts have edges"))
                .sum();
            let spend: f64 = selected.iter().map(|&l| inst.bid(l)).sum();
            AlgoOutcome {
                algo,
                selected_lefts: selected,
                matching: None,
                payments: vec![0.0; inst.left_count()],
                value,
                spend,
                payments_total: 0.0,
                feasible: within_budget(spend, inst.budget()),
                gamma: None,
                t: Some(t),
            }
        }
        Algo::Threshold => {
            let th = threshold(inst, inst.budget())?;
            AlgoOutcome::from_matching(algo, inst, th.matching, Some(th.gamma))
        }
        Algo::Greedy => AlgoOutcome::from_matching(algo, inst, greedy_matching(inst), None),
        Algo::Exact => {
            AlgoOutcome::from_matching(algo, inst, brute_force_opt(inst, inst.budget())?, None)
        }
    })
}

/// [`run_algorithm`] with the coins, and the order unless one is given,
/// drawn from `seed`. This is what the `run` subcommand and the C API do.
pub fn run_seeded(
    algo: Algo,
    inst: &BipartiteInstance,
    order: Option<ArrivalOrder>,
    seed: u64,
    t_fraction: f64,
    enforce_cost: bool,
) -> Result<AlgoOutcome> {
    let order = order.unwrap_or_else(|| RngStream::new(seed, "run/order").permutation(inst.left_count()));
    let coins = RngStream::new(seed, "run/coins");
    run_algorithm(algo, inst, &order, &coins, t_fraction, enforce_cost)
}

fn baseline_value(baseline: Baseline, inst: &BipartiteInstance) -> Result<f64> {
    Ok(match baseline {
        Baseline::Exact => brute_force_opt(inst, inst.budget())?.value(),
        Baseline::Threshold => threshold(inst, inst.budget())?.value(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub delta: f64,
    pub trial: usize,
    pub n_right: usize,
    pub online_value: f64,
    pub baseline_value: f64,
    pub ratio: f64,
    pub spend: f64,
    pub payments_total: f64,
    pub feasible: bool,
    pub gamma: Option<Gamma>,
    pub t: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

fn stat(xs: impl Iterator<Item = f64>) -> Stat {
    let xs: Vec<f64> = xs.collect();
    let (mean, stderr) = mean_and_stderr(&xs);
    Stat { mean, stderr }
}

/// Per-delta aggregate over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub delta: f64,
    pub trials: usize,
    pub online_value: Stat,
    pub baseline_value: Stat,
    pub ratio: Stat,
    pub spend: Stat,
    pub payments_total: Stat,
    pub all_feasible: bool,
}

impl Summary {
    fn of(delta: f64, rows: &[TrialRow]) -> Self {
        Summary {
            delta,
            trials: rows.len(),
            online_value: stat(rows.iter().map(|r| r.online_value)),
            baseline_value: stat(rows.iter().map(|r| r.baseline_value)),
            ratio: stat(rows.iter().map(|r| r.ratio)),
            spend: stat(rows.iter().map(|r| r.spend)),
            payments_total: stat(rows.iter().map(|r| r.payments_total)),
            all_feasible: rows.iter().all(|r| r.feasible),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    /// Sorted by (delta position in the sweep, trial).
    pub rows: Vec<TrialRow>,
    /// One per delta, in sweep order.
    pub summaries: Vec<Summary>,
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRow> {
    let stream = RngStream::for_trial(cfg.seed, trial as u64);
    let inst = gen_instance(cfg, &stream.child("instance"))?.to_bipartite();
    let order = stream.child("order").permutation(inst.left_count());
    let out = run_algorithm(
        cfg.algo,
        &inst,
        &order,
        &stream.child("coins"),
        cfg.t_fraction,
        cfg.enforce_cost,
    )?;
    let baseline_value = baseline_value(cfg.baseline, &inst)?;
    Ok(TrialRow {
        delta: cfg.delta,
        trial,
        n_right: inst.right_count(),
        online_value: out.value,
        baseline_value,
        ratio: competitive_ratio(out.value, baseline_value)?,
        spend: out.spend,
        payments_total: out.payments_total,
        feasible: out.feasible,
        gamma: out.gamma,
        t: out.t,
    })
}

/// Generate, run and score `cfg.trials` trials per delta. Trial `k` draws its
/// instance, order and coins from `trial:k`, so every delta sees the same
/// streams and results do not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    cfg.validate()?;
    if !cfg.algo.respects_budget() {
        return Err(Error::domain(format!(
            "{} does not respect the budget and cannot be scored in an experiment",
            cfg.algo.as_str()
        )));
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for delta in cfg.sweep() {
        let at = cfg.at_delta(delta);
        let batch: Vec<TrialRow> = (0..cfg.trials)
            .into_par_iter()
            .map(|k| run_trial(&at, k))
            .collect::<Result<_>>()?;
        summaries.push(Summary::of(delta, &batch));
        rows.extend(batch);
    }
    Ok(ExperimentResults {
        config: cfg.clone(),
        rows,
        summaries,
    })
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

/// One row per trial, then a `mean` and a `stderr` row per delta.
pub fn write_csv<W: Write>(results: &ExperimentResults, out: W) -> Result<()> {
    let cfg = &results.config;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let fixed = |delta: f64, trial: String, n_right: usize| {
        vec![
            cfg.kind.as_str().to_string(),
            delta.to_string(),
            trial,
            cfg.seed.to_string(),
            cfg.algo.as_str().to_string(),
            cfg.baseline.as_str().to_string(),
            cfg.n_left.to_string(),
            n_right.to_string(),
            cfg.budget.to_string(),
        ]
    };
    let mut rows = results.rows.iter().peekable();
    for s in &results.summaries {
        let mut n_right = cfg.n_right;
        while let Some(r) = rows.next_if(|r| r.delta == s.delta) {
            n_right = r.n_right;
            let mut rec = fixed(r.delta, r.trial.to_string(), r.n_right);
            rec.extend([
                r.online_value.to_string(),
                r.baseline_value.to_string(),
                r.ratio.to_string(),
                r.spend.to_string(),
                r.payments_total.to_string(),
                r.feasible.to_string(),
                opt(&r.gamma),
                opt(&r.t),
            ]);
            w.write_record(&rec)?;
        }
        let stats = [
            s.online_value,
            s.baseline_value,
            s.ratio,
            s.spend,
            s.payments_total,
        ];
        let mut mean = fixed(s.delta, "mean".into(), n_right);
        mean.extend(stats.iter().map(|x| x.mean.to_string()));
        mean.extend([s.all_feasible.to_string(), String::new(), String::new()]);
        w.write_record(&mean)?;
        let mut se = fixed(s.delta, "stderr".into(), n_right);
        se.extend(stats.iter().map(|x| x.stderr.to_string()));
        se.extend([String::new(), String::new(), String::new()]);
        w.write_record(&se)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
