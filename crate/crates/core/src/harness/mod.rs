//! Instance generators, experiment orchestration and property suites.

mod experiment;
mod gen;
pub mod verify;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use experiment::{
    competitive_ratio, run_algorithm, run_experiment, run_seeded, write_csv, AlgoOutcome, ExperimentResults,
    Summary, TrialRow, CSV_HEADER,
};
pub use gen::{
    d2d_degree, gen_d2d_instance, gen_instance, gen_knapsack_instance, gen_matching_instance,
    ASSUMPTION_PROXY_LIMIT, GENERATION_RETRIES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Knapsack,
    D2d,
    Matching,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Knapsack => "knapsack",
            Kind::D2d => "d2d",
            Kind::Matching => "matching",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// Exhaustive budgeted optimum; small instances only.
    Exact,
    /// Threshold on the full graph.
    #[serde(alias = "threshold-offline")]
    Threshold,
}

impl Baseline {
    pub fn as_str(self) -> &'static str {
        match self {
            Baseline::Exact => "exact",
            Baseline::Threshold => "threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    On,
    Virtual,
    OnTruth,
    Threshold,
    Greedy,
    Exact,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::On => "on",
            Algo::Virtual => "virtual",
            Algo::OnTruth => "on-truth",
            Algo::Threshold => "threshold",
            Algo::Greedy => "greedy",
            Algo::Exact => "exact",
        }
    }

    /// Algorithms whose output always fits the budget.
    pub fn respects_budget(self) -> bool {
        !matches!(self, Algo::Virtual | Algo::Greedy)
    }
}

/// A closed interval `[lo, hi]`, written as a two-element array. Draws are
/// taken from `(lo, hi]` so that a zero lower end never yields a zero value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo >= 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(Error::domain(format!(
                "{name} must satisfy 0 <= lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Everything an experiment needs; also the JSON config file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub n_left: usize,
    pub n_right: usize,
    pub budget: f64,
    /// Fraction of rights each left can reach (d2d), or the edge
    /// probability (matching).
    pub delta: f64,
    /// When nonempty, the experiment sweeps these instead of `delta`.
    pub deltas: Vec<f64>,
    pub value_range: Interval,
    /// Bids (d2d, matching) or weights (knapsack).
    pub bid_range: Interval,
    /// Knapsack only: draw buck per bang here and set value = weight / bpb,
    /// which keeps weight and buck-per-bang ranks independent.
    pub bpb_range: Option<Interval>,
    pub trials: usize,
    pub seed: u64,
    /// Observation prefix of the online knapsack algorithm as a fraction of n.
    pub t_fraction: f64,
    pub baseline: Baseline,
    pub algo: Algo,
    pub enforce_cost: bool,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        d2d_defaults()
    }
}

/// 50 helpers, 100 seekers, budget 100, utilities on [0, 20], bids on
/// [0, 5], and the eight-point delta sweep.
pub fn d2d_defaults() -> ExperimentConfig {
    ExperimentConfig {
        kind: Kind::D2d,
        n_left: 50,
        n_right: 100,
        budget: 100.0,
        delta: 0.5,
        deltas: vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        value_range: Interval::new(0.0, 20.0),
        bid_range: Interval::new(0.0, 5.0),
        bpb_range: None,
        trials: 200,
        seed: 1,
        t_fraction: std::f64::consts::E.recip(),
        baseline: Baseline::Threshold,
        algo: Algo::OnTruth,
        enforce_cost: true,
        output: None,
    }
}

/// 50 items with weights on [1, 2] and buck per bang on [0.5, 1] against
/// capacity 30: roughly twenty items fit, so no single item carries more
/// than a tenth of the offline value.
pub fn knapsack_defaults() -> ExperimentConfig {
    ExperimentConfig {
        kind: Kind::Knapsack,
        n_left: 50,
        n_right: 50,
        budget: 30.0,
        delta: 1.0,
        deltas: Vec::new(),
        value_range: Interval::new(1.0, 4.0),
        bid_range: Interval::new(1.0, 2.0),
        bpb_range: Some(Interval::new(0.5, 1.0)),
        trials: 2000,
        seed: 1,
        t_fraction: std::f64::consts::E.recip(),
        baseline: Baseline::Threshold,
        algo: Algo::On,
        enforce_cost: true,
        output: None,
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_left == 0 || self.n_right == 0 {
            return Err(Error::domain("n_left and n_right must be at least 1"));
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(Error::domain(format!("budget must be positive, got {}", self.budget)));
        }
        for &d in self.sweep().iter() {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::domain(format!("delta must lie in (0, 1], got {d}")));
            }
        }
        self.value_range.validate("value_range")?;
        self.bid_range.validate("bid_range")?;
        if let Some(b) = &self.bpb_range {
            b.validate("bpb_range")?;
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.t_fraction) {
            return Err(Error::domain(format!(
                "t_fraction must lie in [0, 1), got {}",
                self.t_fraction
            )));
        }
        if self.kind == Kind::Knapsack && self.bid_range.hi > self.budget {
            return Err(Error::domain(format!(
                "knapsack weights up to {} can exceed capacity {}",
                self.bid_range.hi, self.budget
            )));
        }
        Ok(())
    }

    /// The deltas an experiment runs. Knapsack instances ignore delta, so
    /// they run once at `delta` whatever `deltas` holds.
    pub fn sweep(&self) -> Vec<f64> {
        if self.deltas.is_empty() || self.kind == Kind::Knapsack {
            vec![self.delta]
        } else {
            self.deltas.clone()
        }
    }

    /// A copy with a single delta and no sweep.
    pub fn at_delta(&self, delta: f64) -> Self {
        ExperimentConfig {
            delta,
            deltas: Vec::new(),
            ..self.clone()
        }
    }
}
