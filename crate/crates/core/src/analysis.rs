//! Coin-driven proof constructions (Simulate, SampleAndPermute) and the
//! Monte-Carlo estimators built on them.
//!
//! Coins are addressed by left id: coin `l` of a stream is heads iff
//! `uniforms(n)[l] < p`. Two algorithms fed the same stream therefore see the
//! same coin for the same vertex whatever order they visit vertices in.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ArrivalOrder, BipartiteInstance, EdgeSet, Matching, PseudoMatching};
use crate::offline::{threshold, Cutoff, Gamma, Prepared};
use crate::rng::RngStream;

/// Sample mean and standard error of the mean (n - 1 denominator).
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOutcome {
    pub m1s: Matching,
    pub m2s: PseudoMatching,
    /// Coins actually looked at; one per assigned left.
    pub coins_flipped: usize,
}

/// Scan `G(cutoff)` in greedy order. The first edge of an unassigned left
/// whose right is still free in `m1s` assigns that left and flips its coin:
/// heads puts the edge in `m1s`, tails in `m2s`.
pub fn simulate(
    inst: &BipartiteInstance,
    cutoff: impl Into<Cutoff>,
    p: f64,
    coins: &RngStream,
) -> Result<SimulateOutcome> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("coin bias must lie in [0, 1], got {p}")));
    }
    let cutoff = cutoff.into();
    let prepared = Prepared::new(inst);
    let u = coins.uniforms(inst.left_count());
    let mut assigned = vec![false; inst.left_count()];
    let mut right_in_m1 = vec![false; inst.right_count()];
    let mut out = SimulateOutcome {
        m1s: Matching::empty(),
        m2s: PseudoMatching::empty(),
        coins_flipped: 0,
    };
    for &i in &prepared.scan {
        let e = &inst.edges()[i];
        if assigned[e.left] || right_in_m1[e.right] || !cutoff.admits(prepared.bpb[i]) {
            continue;
        }
        assigned[e.left] = true;
        out.coins_flipped += 1;
        if u[e.left] < p {
            right_in_m1[e.right] = true;
            out.m1s.push_unchecked(*e);
        } else {
            out.m2s.push_unchecked(*e);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SapOutcome {
    pub m1p: Matching,
    pub m2p: PseudoMatching,
    pub m3p: Matching,
    pub gamma_prime: Gamma,
    /// The restriction the threshold matching was computed on; the decision
    /// phase uses the same one.
    pub cutoff: Cutoff,
    /// `offline[l]` iff left `l` landed in the sample.
    pub offline: Vec<bool>,
}

/// SampleAndPermute: fair coins pick the sampled lefts, threshold on them
/// fixes `gamma'` and the rewards, and every other left, in `order`, offers
/// its best edge among those admitted by the threshold's cutoff that beat the
/// reward at their right. Offers form `m2p`; those that keep a matching form
/// `m3p`.
///
/// "Beats the reward" compares positions in the greedy scan order, which is
/// `v(e) >= reward(r)` except that equal values resolve by the scan
/// tie-break. That makes the outcome coincide with [`simulate`] on the same
/// coins.
pub fn sample_and_permute(
    inst: &BipartiteInstance,
    membership_coins: &RngStream,
    order: &ArrivalOrder,
) -> Result<SapOutcome> {
    if order.len() != inst.left_count() {
        return Err(Error::structural(format!(
            "arrival order has {} entries for {} lefts",
            order.len(),
            inst.left_count()
        )));
    }
    let offline = membership_coins.fair_coins(inst.left_count());
    let th = threshold(&inst.with_lefts(&offline), inst.budget())?;
    let cutoff = th.cutoff();
    let prepared = Prepared::new(inst);

    let mut reward_rank = vec![usize::MAX; inst.right_count()];
    for e in th.matching.edges() {
        let idx = inst.edge_index(e.left, e.right).expect("sample edges are instance edges");
        reward_rank[e.right] = prepared.rank[idx];
    }

    let mut m2p = PseudoMatching::empty();
    let mut m3p = Matching::empty();
    let mut right_in_m3 = vec![false; inst.right_count()];
    for &l in order.as_slice() {
        if offline[l] {
            continue;
        }
        let best = inst
            .edge_indices_of(l)
            .iter()
            .copied()
            .filter(|&i| cutoff.admits(prepared.bpb[i]))
            .filter(|&i| prepared.rank[i] < reward_rank[inst.edges()[i].right])
            .min_by_key(|&i| prepared.rank[i]);
        let Some(i) = best else { continue };
        let e = inst.edges()[i];
        m2p.push_unchecked(e);
        if !right_in_m3[e.right] {
            right_in_m3[e.right] = true;
            m3p.push_unchecked(e);
        }
    }
    Ok(SapOutcome {
        m1p: th.matching,
        m2p,
        m3p,
        gamma_prime: th.gamma,
        cutoff,
        offline,
    })
}

const MIN_TRIALS: usize = 100;

fn check_trials(trials: usize) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::domain(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

fn trial_coins(seed: u64, k: usize) -> RngStream {
    RngStream::for_trial(seed, k as u64).child("coins")
}

fn trial_order(seed: u64, k: usize, n: usize) -> ArrivalOrder {
    RngStream::for_trial(seed, k as u64).child("order").permutation(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityEstimate {
    pub mean1: f64,
    pub mean2: f64,
    /// Standard error of the per-trial difference `v(m1s) - v(m2s)`.
    pub stderr: f64,
    pub trials: usize,
}

/// Means of `v(m1s)` and `v(m2s)` for Simulate at `p = 1/2` under a fixed
/// cutoff, with fresh coins per trial.
pub fn estimate_expectation_identity(
    inst: &BipartiteInstance,
    gamma_fixed: impl Into<Cutoff>,
    trials: usize,
    seed: u64,
) -> Result<IdentityEstimate> {
    check_trials(trials)?;
    let cutoff = gamma_fixed.into();
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let s = simulate(inst, cutoff, 0.5, &trial_coins(seed, k))?;
            Ok((s.m1s.value(), s.m2s.value()))
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    Ok(IdentityEstimate {
        mean1: pairs.iter().map(|p| p.0).sum::<f64>() / n,
        mean2: pairs.iter().map(|p| p.1).sum::<f64>() / n,
        stderr: mean_and_stderr(&diffs).1,
        trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfSurvivalEstimate {
    pub mean_m3: f64,
    pub mean_m2: f64,
    /// Standard error of the per-trial `v(m3p) - v(m2p) / 2`.
    pub stderr: f64,
    pub trials: usize,
}

/// Means of `v(m3p)` and `v(m2p)` over fresh coins and uniform orders.
pub fn estimate_half_survival(
    inst: &BipartiteInstance,
    trials: usize,
    seed: u64,
) -> Result<HalfSurvivalEstimate> {
    check_trials(trials)?;
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let order = trial_order(seed, k, inst.left_count());
            let s = sample_and_permute(inst, &trial_coins(seed, k), &order)?;
            Ok((s.m3p.value(), s.m2p.value()))
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let diffs: Vec<f64> = pairs.iter().map(|(m3, m2)| m3 - m2 / 2.0).collect();
    Ok(HalfSurvivalEstimate {
        mean_m3: pairs.iter().map(|p| p.0).sum::<f64>() / n,
        mean_m2: pairs.iter().map(|p| p.1).sum::<f64>() / n,
        stderr: mean_and_stderr(&diffs).1,
        trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthEstimate {
    /// Mean `v(m2s)` under the sample's cutoff.
    pub mean_sample: f64,
    /// Mean `v(m2s)` under the full graph's cutoff, same coins.
    pub mean_full: f64,
    /// Standard error of the per-trial difference.
    pub stderr: f64,
    /// Trials in which the sample-cutoff value was at least the other.
    pub pathwise_holds: usize,
    pub trials: usize,
}

/// Paired replay of Simulate under the sample threshold (which depends on
/// the coins) and under the full-graph threshold, sharing the coins.
pub fn estimate_pseudo_growth(
    inst: &BipartiteInstance,
    trials: usize,
    seed: u64,
) -> Result<GrowthEstimate> {
    check_trials(trials)?;
    let full = threshold(inst, inst.budget())?.cutoff();
    let pairs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let coins = trial_coins(seed, k);
            let offline = coins.fair_coins(inst.left_count());
            let sample = threshold(&inst.with_lefts(&offline), inst.budget())?.cutoff();
            let a = simulate(inst, sample, 0.5, &coins)?.m2s.value();
            let b = simulate(inst, full, 0.5, &coins)?.m2s.value();
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    Ok(GrowthEstimate {
        mean_sample: pairs.iter().map(|p| p.0).sum::<f64>() / n,
        mean_full: pairs.iter().map(|p| p.1).sum::<f64>() / n,
        stderr: mean_and_stderr(&diffs).1,
        pathwise_holds: pairs.iter().filter(|(a, b)| a >= b).count(),
        trials,
    })
}
