//! The online knapsack algorithm (sample, price, then match against the
//! sampled slots) and the Virtual comparator used in its analysis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{within_budget, ArrivalOrder, BipartiteInstance, Edge, EdgeSet, Matching};
use crate::offline::{threshold, Gamma};

/// One right vertex's slot, priced by the offline sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slot {
    /// Buck per bang of the sampled left matched here, 0 if unmatched.
    pub price: f64,
    /// Weight of that left, 0 if unmatched.
    pub cost: f64,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceTable {
    slots: Vec<Slot>,
}

impl PriceTable {
    fn from_offline(inst: &BipartiteInstance, offline: &Matching) -> Self {
        let mut slots = vec![
            Slot {
                price: 0.0,
                cost: 0.0,
                used: false,
            };
            inst.right_count()
        ];
        for e in offline.edges() {
            slots[e.right] = Slot {
                price: inst.edge_bpb(e),
                cost: inst.bid(e.left),
                used: false,
            };
        }
        PriceTable { slots }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Total cost of the priced slots; bounded by the budget because the
    /// offline matching is.
    pub fn total_cost(&self) -> f64 {
        self.slots.iter().filter(|s| s.price > 0.0).map(|s| s.cost).sum()
    }

    /// Unused priced slot with the smallest price above `bpb` (and cost above
    /// `weight` when enforced). Equal prices go to the lower right id.
    fn cheapest_admissible(&self, bpb: f64, weight: f64, enforce_cost: bool) -> Option<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                s.price > 0.0 && !s.used && bpb < s.price && (!enforce_cost || weight < s.cost)
            })
            .min_by(|(i, a), (j, b)| a.price.total_cmp(&b.price).then(i.cmp(j)))
            .map(|(r, _)| r)
    }
}

/// Result of one online run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub selected: Matching,
    /// Indexed by left id; 0 for lefts that were not paid.
    pub payments: Vec<f64>,
    pub value: f64,
    pub spend: f64,
    pub feasible: bool,
    pub gamma_used: Gamma,
    /// Size of the observation-only prefix.
    pub t_used: usize,
}

impl RunOutcome {
    pub(crate) fn new(
        inst: &BipartiteInstance,
        selected: Matching,
        payments: Vec<f64>,
        gamma_used: Gamma,
        t_used: usize,
    ) -> Self {
        let value = selected.value();
        let spend: f64 = selected.edges().iter().map(|e| inst.bid(e.left)).sum();
        RunOutcome {
            selected,
            payments,
            value,
            spend,
            feasible: within_budget(spend, inst.budget()),
            gamma_used,
            t_used,
        }
    }

    pub fn payments_total(&self) -> f64 {
        self.payments.iter().sum()
    }

    pub fn is_selected(&self, left: usize) -> bool {
        self.selected.contains_left(left)
    }
}

/// Observation prefix length `round(n / e)`, ties to even.
pub fn default_t(n: usize) -> usize {
    t_from_fraction(n, std::f64::consts::E.recip())
}

pub fn t_from_fraction(n: usize, fraction: f64) -> usize {
    ((n as f64) * fraction).round_ties_even().clamp(0.0, n as f64) as usize
}

fn check_knapsack_run(inst: &BipartiteInstance, order: &ArrivalOrder, t: usize) -> Result<()> {
    if !inst.is_knapsack_class() {
        return Err(Error::domain(
            "the online knapsack algorithm needs a knapsack-class graph (complete, n x n, one value per left)",
        ));
    }
    if order.len() != inst.left_count() {
        return Err(Error::domain(format!(
            "arrival order has {} entries for {} lefts",
            order.len(),
            inst.left_count()
        )));
    }
    if t > inst.left_count() {
        return Err(Error::domain(format!(
            "prefix length {t} exceeds {} arrivals",
            inst.left_count()
        )));
    }
    Ok(())
}

/// Run the online knapsack algorithm on a knapsack-class graph.
///
/// The first `t` arrivals are only observed: the threshold search on them
/// fixes `gamma_t` and one priced slot per sampled match. Each later arrival
/// with buck per bang at most `gamma_t` takes the cheapest unused slot whose
/// price is strictly above its buck per bang and, when `enforce_cost` is
/// set, whose cost is strictly above its weight.
pub fn run_on(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    t: usize,
    enforce_cost: bool,
) -> Result<RunOutcome> {
    run_on_traced(inst, order, t, enforce_cost).map(|(outcome, _)| outcome)
}

/// [`run_on`] plus the final slot table, for auditing slot consumption.
pub fn run_on_traced(
    inst: &BipartiteInstance,
    order: &ArrivalOrder,
    t: usize,
    enforce_cost: bool,
) -> Result<(RunOutcome, PriceTable)> {
    check_knapsack_run(inst, order, t)?;
    let sample = inst.with_lefts(&order.prefix_mask(t));
    let offline = threshold(&sample, inst.budget())?;
    let mut table = PriceTable::from_offline(inst, &offline.matching);

    let mut selected = Matching::empty();
    for &l in &order.as_slice()[t..] {
        let value = inst.left_value(l).expect("knapsack-class lefts have edges");
        let weight = inst.bid(l);
        let bpb = weight / value;
        if offline.gamma.prunes(bpb) {
            continue;
        }
        if let Some(r) = table.cheapest_admissible(bpb, weight, enforce_cost) {
            table.slots[r].used = true;
            selected.push_unchecked(Edge {
                left: l,
                right: r,
                value,
            });
        }
    }
    let payments = vec![0.0; inst.left_count()];
    Ok((
        RunOutcome::new(inst, selected, payments, offline.gamma, t),
        table,
    ))
}

/// The Virtual comparator: a reference set seeded with the sampled prices.
/// An arrival that beats the current worst reference price displaces it, and
/// is selected only if that displaced price came from the sample.
///
/// Returns the selected left ids in arrival order. No budget bookkeeping.
pub fn run_virtual(inst: &BipartiteInstance, order: &ArrivalOrder, t: usize) -> Result<Vec<usize>> {
    check_knapsack_run(inst, order, t)?;
    let sample = inst.with_lefts(&order.prefix_mask(t));
    let offline = threshold(&sample, inst.budget())?;
    // (price, sampled offline?)
    let mut reference: Vec<(f64, bool)> = offline
        .matching
        .edges()
        .iter()
        .map(|e| (inst.edge_bpb(e), true))
        .collect();

    let mut selected = Vec::new();
    for &l in &order.as_slice()[t..] {
        let value = inst.left_value(l).expect("knapsack-class lefts have edges");
        let bpb = inst.bid(l) / value;
        let Some(worst) = reference
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(j.cmp(i)))
            .map(|(i, _)| i)
        else {
            break;
        };
        if bpb < reference[worst].0 {
            if reference[worst].1 {
                selected.push(l);
            }
            reference[worst] = (bpb, false);
        }
    }
    Ok(selected)
}

/// `(t / n) ln(n / t)`: the lower bound on the chance that a fixed member of
/// the offline selection is picked when the first `t` of `n` arrivals are
/// only observed.
pub fn selection_probability_bound(n: usize, t: usize) -> Result<f64> {
    if t < 1 || t >= n {
        return Err(Error::domain(format!("need 1 <= t < n, got t={t}, n={n}")));
    }
    let (n, t) = (n as f64, t as f64);
    Ok((t / n) * (n / t).ln())
}
