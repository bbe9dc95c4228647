//! The truthful budgeted matching mechanism and its replay verifiers.
//!
//! A Binomial(|L|, 1/2) prefix of arrivals is only observed. Threshold on it
//! gives `gamma'` and a reward table; every later arrival takes the most
//! valuable unused rewarded slot it beats and is paid `gamma' * v(e)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ArrivalOrder, BipartiteInstance, Edge, EdgeSet, Matching};
use crate::offline::threshold;
use crate::online::RunOutcome;
use crate::rng::RngStream;

/// Relative bid increase used by [`critical_payment_check`].
pub const CRITICAL_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RewardSlot {
    /// Value of the offline edge matched at this right, 0 if unmatched.
    pub reward: f64,
    /// Bid of that edge's left, 0 if unmatched.
    pub cost: f64,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardTable {
    slots: Vec<RewardSlot>,
}

impl RewardTable {
    fn from_offline(inst: &BipartiteInstance, offline: &Matching) -> Self {
        let mut slots = vec![
            RewardSlot {
                reward: 0.0,
                cost: 0.0,
                used: false,
            };
            inst.right_count()
        ];
        for e in offline.edges() {
            slots[e.right] = RewardSlot {
                reward: e.value,
                cost: inst.bid(e.left),
                used: false,
            };
        }
        RewardTable { slots }
    }

    pub fn slots(&self) -> &[RewardSlot] {
        &self.slots
    }

    pub fn total_cost(&self) -> f64 {
        self.slots.iter().filter(|s| s.reward > 0.0).map(|s| s.cost).sum()
    }
}

/// One decision-phase acceptance and the slot it consumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Acceptance {
    pub edge: Edge,
    pub reward: f64,
    pub slot_cost: f64,
    pub payment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthTrace {
    pub offline_size: usize,
    pub offline: Matching,
    pub table: RewardTable,
    pub acceptances: Vec<Acceptance>,
}

/// Number of heads among one fair coin per left vertex.
pub fn offline_size(coins: &RngStream, n: usize) -> usize {
    coins.fair_coins(n).into_iter().filter(|&c| c).count()
}

pub fn run_on_truth(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    coins: &RngStream,
    enforce_cost: bool,
) -> Result<RunOutcome> {
    let k = offline_size(coins, inst.left_count());
    run_on_truth_with_offline(inst, order, k, enforce_cost)
}

/// [`run_on_truth`] with the observed prefix length given directly.
pub fn run_on_truth_with_offline(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    k: usize,
    enforce_cost: bool,
) -> Result<RunOutcome> {
    run_on_truth_traced(inst, order, k, enforce_cost).map(|(outcome, _)| outcome)
}

pub fn run_on_truth_traced(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    k: usize,
    enforce_cost: bool,
) -> Result<(RunOutcome, TruthTrace)> {
    if order.len() != inst.left_count() {
        return Err(Error::structural(format!(
            "arrival order has {} entries for {} lefts",
            order.len(),
            inst.left_count()
        )));
    }
    if k > inst.left_count() {
        return Err(Error::domain(format!(
            "offline size {k} exceeds {} arrivals",
            inst.left_count()
        )));
    }
    let sample = inst.with_lefts(&order.prefix_mask(k));
    let offline = threshold(&sample, inst.budget())?;
    let gamma = offline.gamma;
    let mut table = RewardTable::from_offline(inst, &offline.matching);

    let mut selected = Matching::empty();
    let mut payments = vec![0.0; inst.left_count()];
    let mut acceptances = Vec::new();
    for &l in &order.as_slice()[k..] {
        let bid = inst.bid(l);
        let best = inst
            .edges_of(l)
            .filter(|e| !gamma.prunes(inst.edge_bpb(e)))
            .filter(|e| {
                let s = &table.slots[e.right];
                s.reward > 0.0 && !s.used && e.value >= s.reward && (!enforce_cost || bid <= s.cost)
            })
            .max_by(|a, b| {
                let (ra, rb) = (table.slots[a.right].reward, table.slots[b.right].reward);
                a.value
                    .total_cmp(&b.value)
                    .then(ra.total_cmp(&rb))
                    .then(b.right.cmp(&a.right))
            })
            .copied();
        let Some(e) = best else { continue };
        // A rewarded slot exists only if the offline matching is nonempty,
        // which needs a finite gamma.
        let payment = gamma.as_f64() * e.value;
        let slot = &mut table.slots[e.right];
        slot.used = true;
        acceptances.push(Acceptance {
            edge: e,
            reward: slot.reward,
            slot_cost: slot.cost,
            payment,
        });
        payments[l] = payment;
        selected.push_unchecked(e);
    }
    let outcome = RunOutcome::new(inst, selected, payments, gamma, k);
    let trace = TruthTrace {
        offline_size: k,
        offline: offline.matching,
        table,
        acceptances,
    };
    Ok((outcome, trace))
}

fn reference_selection(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    coins: &RngStream,
    left: usize,
    enforce_cost: bool,
) -> Result<RunOutcome> {
    if left >= inst.left_count() {
        return Err(Error::domain(format!("no left vertex {left}")));
    }
    let reference = run_on_truth(inst, order, coins, enforce_cost)?;
    if !reference.is_selected(left) {
        return Err(Error::domain(format!(
            "left {left} is not selected in the reference run"
        )));
    }
    Ok(reference)
}

/// Replay with only `left`'s bid lowered to `lower_bid` and report whether
/// it is still selected.
pub fn check_monotone(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    coins: &RngStream,
    left: usize,
    lower_bid: f64,
    enforce_cost: bool,
) -> Result<bool> {
    reference_selection(inst, order, coins, left, enforce_cost)?;
    if !(lower_bid > 0.0 && lower_bid < inst.bid(left)) {
        return Err(Error::domain(format!(
            "lower bid {lower_bid} must lie in (0, {})",
            inst.bid(left)
        )));
    }
    let replay = run_on_truth(&inst.with_bid(left, lower_bid)?, order, coins, enforce_cost)?;
    Ok(replay.is_selected(left))
}

/// Replay with `left` bidding just above its payment and report whether it
/// loses.
pub fn critical_payment_check(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    coins: &RngStream,
    left: usize,
    enforce_cost: bool,
) -> Result<bool> {
    let reference = reference_selection(inst, order, coins, left, enforce_cost)?;
    let raised = reference.payments[left] * (1.0 + CRITICAL_EPSILON);
    let replay = run_on_truth(&inst.with_bid(left, raised)?, order, coins, enforce_cost)?;
    Ok(!replay.is_selected(left))
}
