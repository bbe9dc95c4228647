//! Property and statistical suites. Each returns a [`CheckReport`] with the
//! measured quantities, so the CLI and the acceptance target print the same
//! evidence.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gen::{gen_knapsack_instance, gen_matching_instance};
use super::{d2d_defaults, knapsack_defaults, run_experiment, write_csv, Algo, Baseline};
use super::{ExperimentConfig, Interval, Kind};
use crate::analysis::{
    estimate_expectation_identity, estimate_half_survival, estimate_pseudo_growth,
    mean_and_stderr, sample_and_permute, simulate,
};
use crate::error::{Error, Result};
use crate::model::{
    knapsack_to_bipartite, within_budget, BipartiteInstance, Edge, EdgeSet, Item, KnapsackInstance,
    LeftVertex,
};
use crate::offline::{
    brute_force_opt, decompose_opt, greedy_matching, greedy_matching_within, max_weight_matching,
    restrict, threshold, threshold_with, Gamma, ThresholdSearch,
};
use crate::online::{default_t, run_on, run_on_traced, run_virtual};
use crate::rng::RngStream;
use crate::truthful::{
    check_monotone, critical_payment_check, offline_size, run_on_truth_traced,
};

/// Slack for comparisons between sums of the same edge values computed in
/// different orders.
const SUM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckReport {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

/// Trial counts: `Full` is the acceptance scale, `Quick` a tenth of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    fn count(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => (full / 10).max(100.min(full)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ThresholdBudget,
    TwoItem,
    Decomposition,
    Monotonicity,
    VirtualDominance,
    SelectionFrequency,
    OnlineRatio,
    ExpectationIdentity,
    Coupling,
    HalfSurvival,
    Truthfulness,
    TruthfulRatio,
    DeltaTrend,
    Determinism,
    GreedyHalf,
    PruningSafety,
    PseudoGrowth,
    RankProbability,
    SearchAgreement,
}

impl Suite {
    pub const ALL: [Suite; 19] = [
        Suite::ThresholdBudget,
        Suite::TwoItem,
        Suite::Decomposition,
        Suite::Monotonicity,
        Suite::VirtualDominance,
        Suite::SelectionFrequency,
        Suite::OnlineRatio,
        Suite::ExpectationIdentity,
        Suite::Coupling,
        Suite::HalfSurvival,
        Suite::Truthfulness,
        Suite::TruthfulRatio,
        Suite::DeltaTrend,
        Suite::Determinism,
        Suite::GreedyHalf,
        Suite::PruningSafety,
        Suite::PseudoGrowth,
        Suite::RankProbability,
        Suite::SearchAgreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ThresholdBudget => "threshold-budget",
            Suite::TwoItem => "two-item",
            Suite::Decomposition => "decomposition",
            Suite::Monotonicity => "monotonicity",
            Suite::VirtualDominance => "virtual-dominance",
            Suite::SelectionFrequency => "selection-frequency",
            Suite::OnlineRatio => "online-ratio",
            Suite::ExpectationIdentity => "expectation-identity",
            Suite::Coupling => "coupling",
            Suite::HalfSurvival => "half-survival",
            Suite::Truthfulness => "truthfulness",
            Suite::TruthfulRatio => "truthful-ratio",
            Suite::DeltaTrend => "delta-trend",
            Suite::Determinism => "determinism",
            Suite::GreedyHalf => "greedy-half",
            Suite::PruningSafety => "pruning-safety",
            Suite::PseudoGrowth => "pseudo-growth",
            Suite::RankProbability => "rank-probability",
            Suite::SearchAgreement => "search-agreement",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn run(self, seed: u64, scale: Scale) -> Result<CheckReport> {
        match self {
            Suite::ThresholdBudget => threshold_budget(scale.count(1000), seed),
            Suite::TwoItem => two_item(),
            Suite::Decomposition => decomposition(scale.count(500), seed),
            Suite::Monotonicity => monotonicity(scale.count(1000), seed),
            Suite::VirtualDominance => virtual_dominance(scale.count(1000), seed),
            Suite::SelectionFrequency => selection_frequency(scale.count(2000), seed),
            Suite::OnlineRatio => online_ratio(scale.count(2000), seed),
            Suite::ExpectationIdentity => expectation_identity(scale.count(10_000), seed),
            Suite::Coupling => coupling(scale.count(1000), seed),
            Suite::HalfSurvival => half_survival(scale.count(10_000), seed),
            Suite::Truthfulness => truthfulness(scale.count(1000), seed),
            Suite::TruthfulRatio => truthful_ratio(scale.count(500), seed),
            Suite::DeltaTrend => delta_trend(scale.count(200), seed),
            Suite::Determinism => determinism(seed),
            Suite::GreedyHalf => greedy_half(scale.count(500), seed),
            Suite::PruningSafety => pruning_safety(scale.count(1000), seed),
            Suite::PseudoGrowth => pseudo_growth(scale.count(10_000), seed),
            Suite::RankProbability => rank_probability(scale.count(100_000), seed),
            Suite::SearchAgreement => search_agreement(scale.count(500), seed),
        }
    }
}

/// A random bipartite instance with up to `max_left` x `max_right` vertices,
/// edge density in [0.2, 1], utilities on (0, 20], bids on (0, 5] and a
/// budget on [1, 30).
pub fn random_instance(stream: &RngStream, max_left: usize, max_right: usize) -> BipartiteInstance {
    let mut r = stream.rng();
    let cfg = ExperimentConfig {
        kind: Kind::Matching,
        n_left: r.gen_range(1..=max_left),
        n_right: r.gen_range(1..=max_right),
        budget: r.gen_range(1.0..30.0),
        delta: r.gen_range(0.2..=1.0),
        value_range: Interval::new(0.0, 20.0),
        bid_range: Interval::new(0.0, 5.0),
        ..d2d_defaults()
    };
    gen_matching_instance(&cfg, &stream.child("edges")).expect("valid random config")
}

/// A knapsack-class graph with `n` items, utilities on (0, 20], weights on
/// (0, 5] and capacity `capacity`; no large-market filtering.
pub fn random_knapsack(stream: &RngStream, n: usize, capacity: f64) -> BipartiteInstance {
    let mut r = stream.rng();
    let items = (0..n)
        .map(|id| Item {
            id,
            value: 20.0 * (1.0 - r.gen::<f64>()),
            weight: 5.0 * (1.0 - r.gen::<f64>()),
        })
        .collect();
    knapsack_to_bipartite(&KnapsackInstance::new(items, capacity).expect("weights fit"))
}

fn trial(seed: u64, k: usize) -> RngStream {
    RngStream::for_trial(seed, k as u64)
}

fn count_true(xs: &[bool]) -> usize {
    xs.iter().filter(|&&x| x).count()
}

/// Threshold never overspends: bids of matched lefts, and gamma times the
/// matched value, both stay within the budget.
pub fn threshold_budget(instances: usize, seed: u64) -> Result<CheckReport> {
    let ok: Vec<bool> = (0..instances)
        .into_par_iter()
        .map(|k| {
            let g = random_instance(&trial(seed, k), 50, 50);
            let th = threshold(&g, g.budget())?;
            let spend: f64 = th.matching.edges().iter().map(|e| g.bid(e.left)).sum();
            let charged = match th.gamma {
                Gamma::Finite(x) => x * th.value(),
                Gamma::Unbounded => 0.0,
            };
            Ok(within_budget(spend, g.budget()) && within_budget(charged, g.budget()))
        })
        .collect::<Result<_>>()?;
    let good = count_true(&ok);
    Ok(CheckReport::new(
        Suite::ThresholdBudget.name(),
        good == instances,
        format!("{good}/{instances} instances within budget"),
    ))
}

/// Items (v=1, w=1) and (v=9, w=10) at capacity 10.
pub fn two_item_instance() -> BipartiteInstance {
    let items = vec![
        Item { id: 0, value: 1.0, weight: 1.0 },
        Item { id: 1, value: 9.0, weight: 10.0 },
    ];
    knapsack_to_bipartite(&KnapsackInstance::new(items, 10.0).expect("valid"))
}

pub fn two_item() -> Result<CheckReport> {
    let g = two_item_instance();
    let th = threshold(&g, 10.0)?;
    let opt = brute_force_opt(&g, 10.0)?;
    let th_lefts = th.matching.left_ids();
    let opt_lefts = opt.left_ids();
    let passed = th_lefts == [0] && th.value() == 1.0 && opt_lefts == [1] && opt.value() == 9.0;
    Ok(CheckReport::new(
        Suite::TwoItem.name(),
        passed,
        format!(
            "threshold takes items {th_lefts:?} (value {}), exact takes {opt_lefts:?} (value {}), gamma {}",
            th.value(),
            opt.value(),
            th.gamma
        ),
    ))
}

/// Threshold value against the exact optimum split at the threshold's own
/// cutoff: `v(M) >= v(OPT-)/2` and `v(OPT+) <= C/gamma`.
pub fn decomposition(instances: usize, seed: u64) -> Result<CheckReport> {
    let res: Vec<(bool, bool, f64)> = (0..instances)
        .into_par_iter()
        .map(|k| {
            let g = random_instance(&trial(seed, k), 10, 10);
            let th = threshold(&g, g.budget())?;
            let opt = brute_force_opt(&g, g.budget())?;
            let d = decompose_opt(&g, &opt, th.cutoff());
            let minus_ok = th.value() + SUM_SLACK >= d.opt_minus_value / 2.0;
            let plus_ok = match th.gamma {
                Gamma::Finite(x) => d.opt_plus_value <= g.budget() / x + 1e-9,
                Gamma::Unbounded => d.opt_plus_value == 0.0,
            };
            Ok((minus_ok, plus_ok, th.value() / opt.value().max(f64::MIN_POSITIVE)))
        })
        .collect::<Result<_>>()?;
    let minus = res.iter().filter(|r| r.0).count();
    let plus = res.iter().filter(|r| r.1).count();
    let ratios: Vec<f64> = res.iter().map(|r| r.2).collect();
    let (mean_ratio, _) = mean_and_stderr(&ratios);
    Ok(CheckReport::new(
        Suite::Decomposition.name(),
        minus == instances && plus == instances,
        format!(
            "v(M) >= v(OPT-)/2 on {minus}/{instances}, v(OPT+) <= C/gamma on {plus}/{instances}; mean v(M)/v(OPT) = {mean_ratio:.3}"
        ),
    ))
}

/// Greedy value cannot grow when lefts are removed or the cutoff tightens,
/// and the threshold cannot drop when lefts are removed.
pub fn monotonicity(triples: usize, seed: u64) -> Result<CheckReport> {
    let res: Vec<[bool; 3]> = (0..triples)
        .into_par_iter()
        .map(|k| {
            let s = trial(seed, k);
            let g = random_instance(&s.child("graph"), 20, 20);
            let keep = s.child("subset").fair_coins(g.left_count());
            let f = g.with_lefts(&keep);
            let top = g.edges().iter().map(|e| g.edge_bpb(e)).fold(0.0, f64::max);
            let mut r = s.child("gamma").rng();
            let (a, b) = (r.gen_range(0.0..=top), r.gen_range(0.0..=top));
            let (hi, lo) = (a.max(b), a.min(b));
            let remove = greedy_matching(&g).value() + SUM_SLACK >= greedy_matching(&f).value();
            let tighten =
                greedy_matching_within(&g, hi).value() + SUM_SLACK >= greedy_matching_within(&g, lo).value();
            let gamma = threshold(&f, g.budget())?.gamma >= threshold(&g, g.budget())?.gamma;
            Ok([remove, tighten, gamma])
        })
        .collect::<Result<_>>()?;
    let counts: Vec<usize> = (0..3).map(|i| res.iter().filter(|r| r[i]).count()).collect();
    Ok(CheckReport::new(
        Suite::Monotonicity.name(),
        counts.iter().all(|&c| c == triples),
        format!(
            "left removal {}/{triples}, cutoff tightening {}/{triples}, threshold growth {}/{triples}",
            counts[0], counts[1], counts[2]
        ),
    ))
}

/// Whether every left the Virtual comparator selects is also selected by
/// the online algorithm without the cost check.
pub fn virtual_dominance(replays: usize, seed: u64) -> Result<CheckReport> {
    let res: Vec<Option<String>> = (0..replays)
        .into_par_iter()
        .map(|k| {
            let s = trial(seed, k);
            let n = 4 + k % 17;
            let g = random_knapsack(&s.child("instance"), n, 5.0 + 25.0 * (k % 7) as f64 / 6.0);
            let order = s.child("order").permutation(n);
            let t = default_t(n);
            let virt = run_virtual(&g, &order, t)?;
            let on = run_on(&g, &order, t, false)?;
            let missing: Vec<usize> = virt.iter().copied().filter(|&l| !on.is_selected(l)).collect();
            Ok((!missing.is_empty()).then(|| {
                format!("trial {k}: n={n} order={:?} missing {missing:?}", order.as_slice())
            }))
        })
        .collect::<Result<_>>()?;
    let violations: Vec<&String> = res.iter().flatten().collect();
    let mut detail = format!(
        "subset relation held on {}/{replays} replays",
        replays - violations.len()
    );
    if let Some(first) = violations.first() {
        detail.push_str(&format!("; first violation {first}"));
    }
    Ok(CheckReport::new(
        Suite::VirtualDominance.name(),
        violations.is_empty(),
        detail,
    ))
}

/// Per-vertex frequency with which the Virtual comparator selects members
/// of the full-graph threshold matching, over uniform orders with n = 50
/// and t = 18.
pub fn selection_frequency(orders: usize, seed: u64) -> Result<CheckReport> {
    let k = gen_knapsack_instance(&knapsack_defaults(), &RngStream::new(seed, "selection/instance"))?;
    let g = knapsack_to_bipartite(&k);
    let n = g.left_count();
    let t = default_t(n);
    let star = threshold(&g, g.budget())?.matching.left_ids();
    let picks: Vec<Vec<usize>> = (0..orders)
        .into_par_iter()
        .map(|j| run_virtual(&g, &trial(seed, j).child("order").permutation(n), t))
        .collect::<Result<_>>()?;
    let mut hits = vec![0usize; n];
    for p in &picks {
        for &l in p {
            hits[l] += 1;
        }
    }
    let freqs: Vec<f64> = star.iter().map(|&l| hits[l] as f64 / orders as f64).collect();
    let min = freqs.iter().copied().fold(f64::INFINITY, f64::min);
    let (mean, _) = mean_and_stderr(&freqs);
    let bound = std::f64::consts::E.recip() - 0.05;
    Ok(CheckReport::new(
        Suite::SelectionFrequency.name(),
        !star.is_empty() && min >= bound,
        format!(
            "n={n} t={t} |L*|={} orders={orders}: min frequency {min:.4}, mean {mean:.4}, bound {bound:.4}",
            star.len()
        ),
    ))
}

/// Mean ratio of the online knapsack algorithm (cost check on) to the
/// full-graph threshold over fresh large-market instances, plus a budget and
/// slot audit of every run.
pub fn online_ratio(trials: usize, seed: u64) -> Result<CheckReport> {
    let cfg = knapsack_defaults();
    let res: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let s = trial(seed, k);
            let g = knapsack_to_bipartite(&gen_knapsack_instance(&cfg, &s.child("instance"))?);
            let order = s.child("order").permutation(g.left_count());
            let (out, table) = run_on_traced(&g, &order, default_t(g.left_count()), true)?;
            let slots_ok = out
                .selected
                .edges()
                .iter()
                .all(|e| g.bid(e.left) < table.slots()[e.right].cost)
                && within_budget(table.total_cost(), g.budget());
            let base = threshold(&g, g.budget())?.value();
            Ok((out.value / base, out.feasible && slots_ok))
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = res.iter().map(|r| r.0).collect();
    let audited = res.iter().filter(|r| r.1).count();
    let (mean, se) = mean_and_stderr(&ratios);
    let bound = 1.0 / (2.0 * std::f64::consts::E);
    Ok(CheckReport::new(
        Suite::OnlineRatio.name(),
        mean >= bound - 3.0 * se && audited == trials,
        format!(
            "mean ratio {mean:.4} (stderr {se:.4}) vs 1/(2e) = {bound:.4}; budget and slot audit {audited}/{trials}"
        ),
    ))
}

/// Simulate at p = 1/2 under a coin-independent cutoff splits value evenly
/// between the two outputs in expectation.
pub fn expectation_identity(trials: usize, seed: u64) -> Result<CheckReport> {
    let cfg = ExperimentConfig {
        kind: Kind::Matching,
        n_left: 6,
        n_right: 6,
        budget: 10.0,
        delta: 1.0,
        ..d2d_defaults()
    };
    let g = gen_matching_instance(&cfg, &RngStream::new(seed, "identity/instance"))?;
    let cutoff = threshold(&g, g.budget())?.cutoff();
    let est = estimate_expectation_identity(&g, cutoff, trials, seed)?;
    let gap = (est.mean1 - est.mean2).abs();
    Ok(CheckReport::new(
        Suite::ExpectationIdentity.name(),
        gap <= 3.0 * est.stderr,
        format!(
            "6x6, {trials} trials: E v(M1s) = {:.4}, E v(M2s) = {:.4}, gap {gap:.4} vs 3 stderr = {:.4}",
            est.mean1,
            est.mean2,
            3.0 * est.stderr
        ),
    ))
}

/// SampleAndPermute and Simulate with shared per-left coins produce the
/// same first two edge sets.
pub fn coupling(seeds: usize, seed: u64) -> Result<CheckReport> {
    let ok: Vec<bool> = (0..seeds)
        .into_par_iter()
        .map(|k| {
            let s = trial(seed, k);
            let g = if k % 2 == 0 {
                random_instance(&s.child("instance"), 15, 15)
            } else {
                random_knapsack(&s.child("instance"), 3 + k % 10, 8.0)
            };
            let coins = s.child("coins");
            let order = s.child("order").permutation(g.left_count());
            let sap = sample_and_permute(&g, &coins, &order)?;
            let sim = simulate(&g, sap.cutoff, 0.5, &coins)?;
            let m2 = sap.m2p.keys();
            Ok(sap.m1p.keys() == sim.m1s.keys()
                && m2 == sim.m2s.keys()
                && sap.m3p.keys().iter().all(|e| m2.contains(e)))
        })
        .collect::<Result<_>>()?;
    let good = count_true(&ok);
    Ok(CheckReport::new(
        Suite::Coupling.name(),
        good == seeds,
        format!("edge-for-edge equality on {good}/{seeds} seeds"),
    ))
}

/// All edges on one right vertex: the matching keeps only the first
/// accepted offer.
pub fn single_right_instance(n: usize) -> BipartiteInstance {
    let lefts = (0..n)
        .map(|id| LeftVertex {
            id,
            bid: 1.0 + (id % 3) as f64,
        })
        .collect();
    let edges = (0..n)
        .map(|left| Edge {
            left,
            right: 0,
            value: 1.0 + left as f64,
        })
        .collect();
    BipartiteInstance::new(lefts, 1, edges, 10.0).expect("valid")
}

/// `E v(M3p) >= E v(M2p) / 2` on a knapsack-class 8x8 graph and on a graph
/// whose edges all share one right vertex.
pub fn half_survival(trials: usize, seed: u64) -> Result<CheckReport> {
    let cases = [
        ("knapsack 8x8", random_knapsack(&RngStream::new(seed, "half/instance"), 8, 10.0)),
        ("single right", single_right_instance(8)),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, g) in &cases {
        let est = estimate_half_survival(g, trials, seed)?;
        let ok = est.mean_m3 >= est.mean_m2 / 2.0 - 3.0 * est.stderr;
        passed &= ok;
        parts.push(format!(
            "{name}: E v(M3p) = {:.4}, E v(M2p)/2 = {:.4}, stderr {:.4}",
            est.mean_m3,
            est.mean_m2 / 2.0,
            est.stderr
        ));
    }
    Ok(CheckReport::new(
        Suite::HalfSurvival.name(),
        passed,
        format!("{trials} trials; {}", parts.join("; ")),
    ))
}

#[derive(Default)]
struct TruthTally {
    runs: usize,
    pairs: usize,
    monotone: usize,
    critical: usize,
    acceptances: usize,
    rational: usize,
    bids_ok: usize,
    slots_ok: usize,
    payments_ok: usize,
}

impl TruthTally {
    fn add(&mut self, o: &TruthTally) {
        self.runs += o.runs;
        self.pairs += o.pairs;
        self.monotone += o.monotone;
        self.critical += o.critical;
        self.acceptances += o.acceptances;
        self.rational += o.rational;
        self.bids_ok += o.bids_ok;
        self.slots_ok += o.slots_ok;
        self.payments_ok += o.payments_ok;
    }
}

fn truth_trial(seed: u64, k: usize) -> Result<TruthTally> {
    let s = trial(seed, k);
    let g = random_instance(&s.child("instance"), 16, 12);
    let order = s.child("order").permutation(g.left_count());
    let coins = s.child("coins");
    let offline = offline_size(&coins, g.left_count());
    let (out, trace) = run_on_truth_traced(&g, &order, offline, true)?;
    let mut t = TruthTally {
        runs: 1,
        acceptances: trace.acceptances.len(),
        ..Default::default()
    };
    t.rational = trace
        .acceptances
        .iter()
        .filter(|a| a.payment >= g.bid(a.edge.left))
        .count();
    t.bids_ok = usize::from(within_budget(out.spend, g.budget()));
    let slot_costs: f64 = trace.acceptances.iter().map(|a| a.slot_cost).sum();
    let slots_ok = trace
        .acceptances
        .iter()
        .all(|a| a.edge.value >= a.reward && g.bid(a.edge.left) <= a.slot_cost)
        && within_budget(slot_costs, g.budget());
    t.slots_ok = usize::from(slots_ok);
    t.payments_ok = usize::from(within_budget(out.payments_total(), g.budget()));
    let mut lower = s.child("lower").rng();
    for l in out.selected.left_ids() {
        t.pairs += 1;
        let bid = g.bid(l);
        let mut still = true;
        for frac in [1.0 - 1e-6, lower.gen_range(1e-9..1.0 - 1e-6), 1e-9] {
            still &= check_monotone(&g, &order, &coins, l, bid * frac, true)?;
        }
        t.monotone += usize::from(still);
        t.critical += usize::from(critical_payment_check(&g, &order, &coins, l, true)?);
    }
    Ok(t)
}

/// Monotone selection, critical payments, individual rationality and the
/// bid budget for the truthful mechanism, over at least `min_pairs`
/// (trial, selected vertex) pairs.
pub fn truthfulness(min_pairs: usize, seed: u64) -> Result<CheckReport> {
    let mut total = TruthTally::default();
    let mut next = 0;
    while total.pairs < min_pairs {
        let batch: Vec<TruthTally> = (next..next + 256)
            .into_par_iter()
            .map(|k| truth_trial(seed, k))
            .collect::<Result<_>>()?;
        for t in &batch {
            total.add(t);
        }
        next += 256;
    }
    let t = &total;
    let passed = t.monotone == t.pairs
        && t.critical == t.pairs
        && t.rational == t.acceptances
        && t.bids_ok == t.runs
        && t.slots_ok == t.runs;
    Ok(CheckReport::new(
        Suite::Truthfulness.name(),
        passed,
        format!(
            "{} runs, {} pairs: monotone {}/{}, critical {}/{}, rational {}/{}, bid budget {}/{}, slot audit {}/{}; payments within budget (reported) {}/{}",
            t.runs, t.pairs, t.monotone, t.pairs, t.critical, t.pairs, t.rational, t.acceptances,
            t.bids_ok, t.runs, t.slots_ok, t.runs, t.payments_ok, t.runs
        ),
    ))
}

/// The truthful mechanism against the exact optimum on 12 x 12 instances.
pub fn truthful_ratio(trials: usize, seed: u64) -> Result<CheckReport> {
    let cfg = ExperimentConfig {
        n_left: 12,
        n_right: 12,
        budget: 10.0,
        delta: 0.5,
        deltas: Vec::new(),
        trials,
        seed,
        baseline: Baseline::Exact,
        algo: Algo::OnTruth,
        ..d2d_defaults()
    };
    let res = run_experiment(&cfg)?;
    let s = &res.summaries[0];
    let bound = 1.0 / 24.0;
    Ok(CheckReport::new(
        Suite::TruthfulRatio.name(),
        s.ratio.mean >= bound && s.all_feasible,
        format!(
            "12x12, {trials} trials: mean ratio {:.4} (stderr {:.4}) vs 1/24 = {bound:.4}",
            s.ratio.mean, s.ratio.stderr
        ),
    ))
}

/// Mean ratio of the truthful mechanism against the threshold baseline over
/// the delta sweep at the D2D defaults.
pub fn delta_trend(trials: usize, seed: u64) -> Result<CheckReport> {
    let cfg = ExperimentConfig {
        trials,
        seed,
        ..d2d_defaults()
    };
    let res = run_experiment(&cfg)?;
    let s = &res.summaries;
    let monotone = s.windows(2).all(|w| {
        let slack = (w[0].ratio.stderr.powi(2) + w[1].ratio.stderr.powi(2)).sqrt();
        w[1].ratio.mean >= w[0].ratio.mean - slack
    });
    let first = s.first().expect("nonempty sweep");
    let last = s.last().expect("nonempty sweep");
    let rise = last.ratio.mean - first.ratio.mean;
    let in_range = s.iter().all(|x| (0.05..=0.6).contains(&x.ratio.mean));
    let means: Vec<String> = s
        .iter()
        .map(|x| format!("{}:{:.4}", x.delta, x.ratio.mean))
        .collect();
    Ok(CheckReport::new(
        Suite::DeltaTrend.name(),
        monotone && rise >= 0.05 && s.iter().all(|x| x.all_feasible),
        format!(
            "{trials} trials/point, means [{}]; monotone within 1 stderr: {monotone}; rise {rise:.4}; all in [0.05, 0.6]: {in_range}",
            means.join(" ")
        ),
    ))
}

fn csv_bytes(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
    let res = pool.install(|| run_experiment(cfg))?;
    let mut buf = Vec::new();
    write_csv(&res, &mut buf)?;
    Ok(buf)
}

/// Identical CSV bytes across reruns and worker counts.
pub fn determinism(seed: u64) -> Result<CheckReport> {
    let cfgs = [
        ExperimentConfig {
            n_left: 20,
            n_right: 30,
            budget: 25.0,
            deltas: vec![0.3, 0.6],
            trials: 40,
            seed,
            ..d2d_defaults()
        },
        ExperimentConfig {
            n_left: 30,
            n_right: 30,
            trials: 40,
            seed,
            ..knapsack_defaults()
        },
    ];
    let mut same = true;
    let mut sizes = Vec::new();
    for cfg in &cfgs {
        let a = csv_bytes(cfg, 1)?;
        let b = csv_bytes(cfg, 1)?;
        let c = csv_bytes(cfg, 4)?;
        same &= a == b && a == c;
        sizes.push(a.len().to_string());
    }
    Ok(CheckReport::new(
        Suite::Determinism.name(),
        same,
        format!(
            "d2d and knapsack experiments rerun at 1, 1 and 4 threads: identical bytes {same} (sizes {})",
            sizes.join(", ")
        ),
    ))
}

/// Greedy on the threshold restriction is within half of the maximum
/// matching there.
pub fn greedy_half(instances: usize, seed: u64) -> Result<CheckReport> {
    let ok: Vec<bool> = (0..instances)
        .into_par_iter()
        .map(|k| {
            let g = random_instance(&trial(seed, k), 6, 6);
            let th = threshold(&g, g.budget())?;
            let sub = restrict(&g, th.cutoff());
            Ok(th.value() + SUM_SLACK >= max_weight_matching(&sub).value() / 2.0
                && greedy_matching(&g).value() + SUM_SLACK >= max_weight_matching(&g).value() / 2.0)
        })
        .collect::<Result<_>>()?;
    let good = count_true(&ok);
    Ok(CheckReport::new(
        Suite::GreedyHalf.name(),
        good == instances,
        format!("half-approximation held on {good}/{instances}"),
    ))
}

/// The sample threshold of the online knapsack algorithm is never below
/// the full-graph one, so no member of the full threshold matching is
/// pruned.
pub fn pruning_safety(trials: usize, seed: u64) -> Result<CheckReport> {
    let cfg = knapsack_defaults();
    let ok: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let s = trial(seed, k);
            let g = knapsack_to_bipartite(&gen_knapsack_instance(&cfg, &s.child("instance"))?);
            let order = s.child("order").permutation(g.left_count());
            let full = threshold(&g, g.budget())?;
            let out = run_on(&g, &order, default_t(g.left_count()), true)?;
            let star_kept = full.matching.edges().iter().all(|e| !out.gamma_used.prunes(g.edge_bpb(e)));
            Ok(out.gamma_used >= full.gamma && star_kept)
        })
        .collect::<Result<_>>()?;
    let good = count_true(&ok);
    Ok(CheckReport::new(
        Suite::PruningSafety.name(),
        good == trials,
        format!("sample threshold >= full threshold on {good}/{trials}"),
    ))
}

/// `v(M2s)` under the coin-dependent sample threshold against the
/// full-graph threshold, same coins: compared in expectation, with the
/// pathwise rate reported.
pub fn pseudo_growth(trials: usize, seed: u64) -> Result<CheckReport> {
    let g = random_instance(&RngStream::new(seed, "growth/instance"), 12, 12);
    let est = estimate_pseudo_growth(&g, trials, seed)?;
    Ok(CheckReport::new(
        Suite::PseudoGrowth.name(),
        est.mean_sample >= est.mean_full - 3.0 * est.stderr,
        format!(
            "E v(M2s) sample cutoff {:.4} vs full cutoff {:.4} (stderr {:.4}); pathwise {}/{}",
            est.mean_sample, est.mean_full, est.stderr, est.pathwise_holds, est.trials
        ),
    ))
}

/// `P(w(i) > w(j) | b(i) > b(j))` over item pairs from the knapsack
/// generator.
pub fn rank_probability(pairs: usize, seed: u64) -> Result<CheckReport> {
    let cfg = knapsack_defaults();
    let mut order_agrees = 0usize;
    let mut seen = 0usize;
    let mut k = 0u64;
    while seen < pairs {
        let inst = gen_knapsack_instance(&cfg, &RngStream::for_trial(seed, k).child("instance"))?;
        let items = inst.items();
        for pair in items.chunks_exact(2) {
            let (i, j) = if pair[0].buck_per_bang() > pair[1].buck_per_bang() {
                (pair[0], pair[1])
            } else {
                (pair[1], pair[0])
            };
            seen += 1;
            order_agrees += usize::from(i.weight > j.weight);
        }
        k += 1;
    }
    let p = order_agrees as f64 / seen as f64;
    Ok(CheckReport::new(
        Suite::RankProbability.name(),
        (p - 0.5).abs() <= 0.02,
        format!("P(w_i > w_j | b_i > b_j) = {p:.4} over {seen} pairs"),
    ))
}

/// The breakpoint sweep and numeric bisection find the same threshold.
pub fn search_agreement(instances: usize, seed: u64) -> Result<CheckReport> {
    let ok: Vec<bool> = (0..instances)
        .into_par_iter()
        .map(|k| {
            let g = random_instance(&trial(seed, k), 12, 12);
            let a = threshold_with(&g, g.budget(), ThresholdSearch::Sweep)?;
            let b = threshold_with(&g, g.budget(), ThresholdSearch::Bisection)?;
            let close = match (a.gamma, b.gamma) {
                (Gamma::Finite(x), Gamma::Finite(y)) => (x - y).abs() <= 1e-9 * x.max(1.0),
                (x, y) => x == y,
            };
            Ok(close && a.matching.keys() == b.matching.keys())
        })
        .collect::<Result<_>>()?;
    let good = count_true(&ok);
    Ok(CheckReport::new(
        Suite::SearchAgreement.name(),
        good == instances,
        format!("sweep and bisection agree on {good}/{instances}"),
    ))
}
