//! Offline subroutines: greedy matching, buck-per-bang restriction, the
//! threshold search and the exact (exponential) budgeted oracle.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{within_budget, BipartiteInstance, Edge, EdgeSet, Matching};

/// A buck-per-bang threshold. `Unbounded` is what an edgeless graph yields:
/// every budget is vacuously respected, so no finite supremum exists.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Gamma {
    Finite(f64),
    Unbounded,
}

impl Gamma {
    /// `f64::INFINITY` for `Unbounded`.
    pub fn as_f64(self) -> f64 {
        match self {
            Gamma::Finite(g) => g,
            Gamma::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Gamma::Unbounded)
    }

    /// The online pruning rule: an edge is dropped iff `b(e) > gamma`.
    pub fn prunes(self, bpb: f64) -> bool {
        match self {
            Gamma::Finite(g) => bpb > g,
            Gamma::Unbounded => false,
        }
    }
}

impl std::fmt::Display for Gamma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gamma::Finite(g) => write!(f, "{g}"),
            Gamma::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Gamma {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Gamma::Finite(g) => s.serialize_f64(*g),
            Gamma::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Gamma {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(g) => Ok(Gamma::Finite(g)),
            Repr::Word(w) if w == "unbounded" => Ok(Gamma::Unbounded),
            Repr::Word(w) => Err(serde::de::Error::custom(format!("invalid gamma {w:?}"))),
        }
    }
}

/// Which edges a buck-per-bang restriction keeps.
///
/// A plain real `g` keeps `b(e) <= g`. The threshold search also produces
/// exclusive cutoffs (`b(e) < g`) when the supremum of its feasible set is a
/// breakpoint that is not itself feasible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    bound: Gamma,
    inclusive: bool,
}

impl Cutoff {
    pub fn inclusive(gamma: f64) -> Self {
        Cutoff {
            bound: Gamma::Finite(gamma),
            inclusive: true,
        }
    }

    pub fn exclusive(gamma: f64) -> Self {
        Cutoff {
            bound: Gamma::Finite(gamma),
            inclusive: false,
        }
    }

    pub fn unbounded() -> Self {
        Cutoff {
            bound: Gamma::Unbounded,
            inclusive: true,
        }
    }

    pub fn bound(&self) -> Gamma {
        self.bound
    }

    pub fn is_inclusive(&self) -> bool {
        self.inclusive
    }

    pub fn admits(&self, bpb: f64) -> bool {
        match self.bound {
            Gamma::Unbounded => true,
            Gamma::Finite(g) if self.inclusive => bpb <= g,
            Gamma::Finite(g) => bpb < g,
        }
    }
}

impl From<f64> for Cutoff {
    fn from(g: f64) -> Self {
        if g.is_infinite() && g > 0.0 {
            Cutoff::unbounded()
        } else {
            Cutoff::inclusive(g)
        }
    }
}

impl From<Gamma> for Cutoff {
    fn from(g: Gamma) -> Self {
        match g {
            Gamma::Finite(g) => Cutoff::inclusive(g),
            Gamma::Unbounded => Cutoff::unbounded(),
        }
    }
}

/// Greedy scan order: value descending, then buck per bang ascending, then
/// left id, then right id.
pub(crate) fn scan_cmp(a: &Edge, ab: f64, b: &Edge, bb: f64) -> Ordering {
    b.value
        .total_cmp(&a.value)
        .then(ab.total_cmp(&bb))
        .then(a.left.cmp(&b.left))
        .then(a.right.cmp(&b.right))
}

/// An instance with per-edge buck per bang and the greedy scan order cached,
/// so repeated greedy runs under different cutoffs cost one pass each.
pub(crate) struct Prepared<'a> {
    pub inst: &'a BipartiteInstance,
    pub bpb: Vec<f64>,
    /// Edge indices in scan order.
    pub scan: Vec<usize>,
    /// `rank[edge] = position of edge in scan`.
    pub rank: Vec<usize>,
}

impl<'a> Prepared<'a> {
    pub fn new(inst: &'a BipartiteInstance) -> Self {
        let edges = inst.edges();
        let bpb: Vec<f64> = edges.iter().map(|e| inst.edge_bpb(e)).collect();
        let mut scan: Vec<usize> = (0..edges.len()).collect();
        scan.sort_unstable_by(|&i, &j| scan_cmp(&edges[i], bpb[i], &edges[j], bpb[j]));
        let mut rank = vec![0; edges.len()];
        for (pos, &i) in scan.iter().enumerate() {
            rank[i] = pos;
        }
        Prepared {
            inst,
            bpb,
            scan,
            rank,
        }
    }

    fn run_greedy(&self, cutoff: Cutoff, mut take: impl FnMut(&Edge)) {
        let inst = self.inst;
        let cap = inst.left_count().min(inst.right_count());
        let mut left_used = vec![false; inst.left_count()];
        let mut right_used = vec![false; inst.right_count()];
        let mut taken = 0;
        for &i in &self.scan {
            if taken == cap {
                break;
            }
            if !cutoff.admits(self.bpb[i]) {
                continue;
            }
            let e = &inst.edges()[i];
            if !left_used[e.left] && !right_used[e.right] {
                left_used[e.left] = true;
                right_used[e.right] = true;
                taken += 1;
                take(e);
            }
        }
    }

    pub fn greedy(&self, cutoff: Cutoff) -> Matching {
        let mut m = Matching::empty();
        self.run_greedy(cutoff, |e| m.push_unchecked(*e));
        m
    }

    pub fn greedy_value(&self, cutoff: Cutoff) -> f64 {
        let mut v = 0.0;
        self.run_greedy(cutoff, |e| v += e.value);
        v
    }

    /// Distinct buck-per-bang values in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.bpb.clone();
        b.sort_unstable_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// Greedy matching over all edges: scan by decreasing value and take an edge
/// iff both endpoints are free.
pub fn greedy_matching(inst: &BipartiteInstance) -> Matching {
    Prepared::new(inst).greedy(Cutoff::unbounded())
}

/// Greedy matching on the restriction `G(cutoff)`.
pub fn greedy_matching_within(inst: &BipartiteInstance, cutoff: impl Into<Cutoff>) -> Matching {
    Prepared::new(inst).greedy(cutoff.into())
}

/// Keep exactly the edges the cutoff admits; vertices are retained.
pub fn restrict(inst: &BipartiteInstance, cutoff: impl Into<Cutoff>) -> BipartiteInstance {
    let cutoff = cutoff.into();
    inst.filter_edges(|e| cutoff.admits(inst.edge_bpb(e)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    /// Supremum of the feasible thresholds.
    pub gamma: Gamma,
    /// Greedy matching on the last feasible interval. Always within budget.
    pub matching: Matching,
    /// Whether `gamma` itself is feasible. When it is not, `gamma` is the
    /// next breakpoint and the matching excludes that breakpoint's edges.
    pub attained: bool,
}

impl ThresholdResult {
    /// The restriction whose greedy matching is [`matching`](Self::matching).
    pub fn cutoff(&self) -> Cutoff {
        match self.gamma {
            Gamma::Unbounded => Cutoff::unbounded(),
            Gamma::Finite(g) if self.attained => Cutoff::inclusive(g),
            Gamma::Finite(g) => Cutoff::exclusive(g),
        }
    }

    pub fn value(&self) -> f64 {
        self.matching.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdSearch {
    /// Exact sweep over the sorted distinct buck-per-bang values.
    #[default]
    Sweep,
    /// Numeric bisection on gamma; kept as a cross-check of the sweep.
    Bisection,
}

/// Largest gamma such that the greedy matching on `G(gamma)` costs at most
/// `budget` when every matched edge is charged `gamma * v(e)`.
pub fn threshold(inst: &BipartiteInstance, budget: f64) -> Result<ThresholdResult> {
    threshold_with(inst, budget, ThresholdSearch::Sweep)
}

pub fn threshold_with(
    inst: &BipartiteInstance,
    budget: f64,
    search: ThresholdSearch,
) -> Result<ThresholdResult> {
    if budget.is_nan() || budget <= 0.0 {
        return Err(Error::domain(format!("threshold budget must be positive, got {budget}")));
    }
    if inst.edges().is_empty() {
        return Ok(ThresholdResult {
            gamma: Gamma::Unbounded,
            matching: Matching::empty(),
            attained: true,
        });
    }
    let prepared = Prepared::new(inst);
    Ok(match search {
        ThresholdSearch::Sweep => sweep(&prepared, budget),
        ThresholdSearch::Bisection => bisection(&prepared, budget),
    })
}

fn sweep(p: &Prepared<'_>, budget: f64) -> ThresholdResult {
    let breakpoints = p.breakpoints();
    // Greedy(G(gamma)) is constant on [b_i, b_{i+1}); on that interval gamma
    // is feasible iff gamma * V_i <= budget.
    let mut last_feasible: Option<(usize, f64)> = None;
    let mut saw_infeasible = false;
    for (i, &b) in breakpoints.iter().enumerate() {
        if saw_infeasible && !cfg!(debug_assertions) {
            break;
        }
        let v = p.greedy_value(Cutoff::inclusive(b));
        if within_budget(b * v, budget) {
            debug_assert!(
                !saw_infeasible,
                "breakpoint {b} is feasible after an infeasible one"
            );
            if !saw_infeasible {
                last_feasible = Some((i, v));
            }
        } else {
            saw_infeasible = true;
        }
    }

    match last_feasible {
        // Only [0, b_1) is feasible and G(gamma) is empty there.
        None => ThresholdResult {
            gamma: Gamma::Finite(breakpoints[0]),
            matching: Matching::empty(),
            attained: false,
        },
        Some((i, v)) => {
            let cap = (budget / v).max(breakpoints[i]);
            let (gamma, attained) = match breakpoints.get(i + 1) {
                Some(&next) if cap >= next => (next, false),
                _ => (cap, true),
            };
            ThresholdResult {
                gamma: Gamma::Finite(gamma),
                matching: p.greedy(Cutoff::inclusive(breakpoints[i])),
                attained,
            }
        }
    }
}

fn bisection(p: &Prepared<'_>, budget: f64) -> ThresholdResult {
    let feasible = |g: f64| within_budget(g * p.greedy_value(Cutoff::inclusive(g)), budget);
    let top = p.bpb.iter().copied().fold(0.0, f64::max);
    let full = p.greedy_value(Cutoff::unbounded());
    if within_budget(top * full, budget) {
        return ThresholdResult {
            gamma: Gamma::Finite((budget / full).max(top)),
            matching: p.greedy(Cutoff::unbounded()),
            attained: true,
        };
    }
    let (mut lo, mut hi) = (0.0_f64, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ThresholdResult {
        gamma: Gamma::Finite(lo),
        matching: p.greedy(Cutoff::inclusive(lo)),
        attained: true,
    }
}

/// Largest number of left vertices the exact oracle will enumerate.
pub const EXACT_MAX_LEFTS: usize = 20;

/// Maximum-value matching whose matched bids sum to at most `budget`.
///
/// Enumerates the maximal budget-feasible sets of lefts and solves an
/// assignment problem for each. Ties are broken towards the
/// lexicographically smallest sorted edge list.
pub fn brute_force_opt(inst: &BipartiteInstance, budget: f64) -> Result<Matching> {
    if budget.is_nan() || budget <= 0.0 {
        return Err(Error::domain(format!("budget must be positive, got {budget}")));
    }
    if inst.left_count() > EXACT_MAX_LEFTS {
        return Err(Error::Size(format!(
            "exact oracle supports at most {EXACT_MAX_LEFTS} lefts, got {}",
            inst.left_count()
        )));
    }
    let candidates: Vec<usize> = (0..inst.left_count())
        .filter(|&l| !inst.edge_indices_of(l).is_empty() && within_budget(inst.bid(l), budget))
        .collect();

    let mut best = Matching::empty();
    let mut best_value = 0.0;
    let mut chosen = Vec::with_capacity(candidates.len());
    let mut visit = |subset: &[usize]| {
        let m = max_weight_matching_over(inst, subset);
        let v = m.value();
        let tol = 1e-12 * v.abs().max(1.0);
        if v > best_value + tol || (v >= best_value - tol && m.keys() < best.keys()) {
            best_value = v;
            best = m;
        }
    };
    enumerate_maximal(inst, &candidates, 0, budget, &mut chosen, &mut visit);
    Ok(best)
}

fn enumerate_maximal(
    inst: &BipartiteInstance,
    candidates: &[usize],
    pos: usize,
    remaining: f64,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos == candidates.len() {
        // Only maximal sets matter: adding a left never lowers the optimum.
        let maximal = candidates
            .iter()
            .filter(|l| !chosen.contains(l))
            .all(|&l| !within_budget(inst.bid(l), remaining));
        if maximal {
            visit(chosen);
        }
        return;
    }
    let l = candidates[pos];
    if within_budget(inst.bid(l), remaining) {
        chosen.push(l);
        enumerate_maximal(inst, candidates, pos + 1, remaining - inst.bid(l), chosen, visit);
        chosen.pop();
    }
    enumerate_maximal(inst, candidates, pos + 1, remaining, chosen, visit);
}

/// Maximum-weight matching ignoring the budget.
pub fn max_weight_matching(inst: &BipartiteInstance) -> Matching {
    let lefts: Vec<usize> = (0..inst.left_count()).collect();
    max_weight_matching_over(inst, &lefts)
}

fn max_weight_matching_over(inst: &BipartiteInstance, lefts: &[usize]) -> Matching {
    let mut rights: Vec<usize> = lefts
        .iter()
        .flat_map(|&l| inst.edges_of(l).map(|e| e.right))
        .collect();
    rights.sort_unstable();
    rights.dedup();
    if lefts.is_empty() || rights.is_empty() {
        return Matching::empty();
    }
    let cols = rights.len().max(lefts.len());
    let mut weight = vec![vec![0.0; cols]; lefts.len()];
    for (row, &l) in lefts.iter().enumerate() {
        for e in inst.edges_of(l) {
            let col = rights.binary_search(&e.right).expect("right collected above");
            weight[row][col] = e.value;
        }
    }
    let assignment = hungarian_max(&weight);
    let mut edges: Vec<Edge> = Vec::new();
    for (row, col) in assignment.into_iter().enumerate() {
        if weight[row][col] > 0.0 {
            let e = inst
                .find_edge(lefts[row], rights[col])
                .expect("positive weight means the edge exists");
            edges.push(*e);
        }
    }
    edges.sort_unstable_by_key(Edge::key);
    Matching::new(edges).expect("an assignment is a matching")
}

/// Maximum-weight assignment of every row to a distinct column
/// (`rows <= cols`), via the shortest augmenting path form of the Hungarian
/// method. Returns the column of each row.
fn hungarian_max(weight: &[Vec<f64>]) -> Vec<usize> {
    let n = weight.len();
    let m = weight[0].len();
    debug_assert!(n <= m);
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut min_slack = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < min_slack[j] {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0; n];
    for j in 1..=m {
        if owner[j] != 0 {
            col_of[owner[j] - 1] = j - 1;
        }
    }
    col_of
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    /// Value of the edges the cutoff rejects.
    pub opt_plus_value: f64,
    /// Value of the edges the cutoff admits.
    pub opt_minus_value: f64,
}

/// Split a matching by buck per bang. A real gamma admits `b(e) <= gamma`
/// into the minus part.
pub fn decompose_opt(
    inst: &BipartiteInstance,
    opt: &Matching,
    cutoff: impl Into<Cutoff>,
) -> Decomposition {
    let cutoff = cutoff.into();
    let (mut plus, mut minus) = (0.0, 0.0);
    for e in opt.edges() {
        if cutoff.admits(inst.edge_bpb(e)) {
            minus += e.value;
        } else {
            plus += e.value;
        }
    }
    Decomposition {
        opt_plus_value: plus,
        opt_minus_value: minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{knapsack_to_bipartite, Item, KnapsackInstance, LeftVertex};

    fn two_item() -> BipartiteInstance {
        let items = vec![
            Item { id: 0, value: 1.0, weight: 1.0 },
            Item { id: 1, value: 9.0, weight: 10.0 },
        ];
        knapsack_to_bipartite(&KnapsackInstance::new(items, 10.0).unwrap())
    }

    fn graph(bids: &[f64], rights: usize, edges: &[(usize, usize, f64)], budget: f64) -> BipartiteInstance {
        BipartiteInstance::new(
            bids.iter().enumerate().map(|(id, &bid)| LeftVertex { id, bid }).collect(),
            rights,
            edges.iter().map(|&(left, right, value)| Edge { left, right, value }).collect(),
            budget,
        )
        .unwrap()
    }

    #[test]
    fn greedy_on_empty_graph() {
        assert!(greedy_matching(&graph(&[1.0], 1, &[], 1.0)).is_empty());
    }

    #[test]
    fn greedy_takes_heaviest_edge_first() {
        let g = graph(&[1.0, 1.0], 2, &[(0, 0, 5.0), (0, 1, 4.0), (1, 0, 3.0)], 10.0);
        let m = greedy_matching(&g);
        assert_eq!(m.keys(), vec![(0, 0)]);
        assert_eq!(m.value(), 5.0);
        assert_eq!(max_weight_matching(&g).value(), 7.0);
    }

    #[test]
    fn greedy_breaks_value_ties_by_bpb_then_ids() {
        // Both edges into right 0 are worth 2; left 1 bids less.
        let g = graph(&[2.0, 1.0], 1, &[(0, 0, 2.0), (1, 0, 2.0)], 10.0);
        assert_eq!(greedy_matching(&g).keys(), vec![(1, 0)]);
        let g = graph(&[1.0, 1.0], 2, &[(1, 1, 2.0), (0, 1, 2.0), (0, 0, 2.0)], 10.0);
        assert_eq!(greedy_matching(&g).keys(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn restrict_examples() {
        let g = two_item();
        assert_eq!(restrict(&g, Cutoff::unbounded()).edges(), g.edges());
        let r = restrict(&g, 1.0);
        assert_eq!(r.edges().len(), 2);
        assert!(r.edges().iter().all(|e| e.left == 0));
        assert!(restrict(&g, 0.0).edges().is_empty());
        assert_eq!(r.left_count(), 2);
    }

    #[test]
    fn threshold_picks_cheap_item_on_two_item_instance() {
        let th = threshold(&two_item(), 10.0).unwrap();
        assert_eq!(th.matching.left_ids(), vec![0]);
        assert_eq!(th.value(), 1.0);
        assert_eq!(th.gamma, Gamma::Finite(10.0 / 9.0));
        assert!(!th.attained);
        // The supremum is the next breakpoint, so its edges stay excluded.
        assert!(!th.cutoff().admits(10.0 / 9.0));
    }

    #[test]
    fn threshold_single_item_caps_at_budget_over_value() {
        let items = vec![Item { id: 0, value: 1.0, weight: 1.0 }];
        let g = knapsack_to_bipartite(&KnapsackInstance::new(items, 10.0).unwrap());
        let th = threshold(&g, 10.0).unwrap();
        assert_eq!(th.gamma, Gamma::Finite(10.0));
        assert!(th.attained);
        assert_eq!(th.matching.keys(), vec![(0, 0)]);
    }

    #[test]
    fn threshold_without_edges_is_unbounded() {
        let th = threshold(&graph(&[1.0], 1, &[], 1.0), 1.0).unwrap();
        assert_eq!(th.gamma, Gamma::Unbounded);
        assert!(th.matching.is_empty());
    }

    #[test]
    fn threshold_when_no_edge_fits() {
        let g = graph(&[5.0], 1, &[(0, 0, 1.0)], 1.0);
        let th = threshold(&g, 1.0).unwrap();
        assert!(th.matching.is_empty());
        assert_eq!(th.gamma, Gamma::Finite(5.0));
        assert!(!th.attained);
    }

    #[test]
    fn threshold_rejects_nonpositive_budget() {
        assert!(matches!(threshold(&two_item(), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn bisection_agrees_with_sweep_on_two_item_instance() {
        let g = two_item();
        let s = threshold_with(&g, 10.0, ThresholdSearch::Sweep).unwrap();
        let b = threshold_with(&g, 10.0, ThresholdSearch::Bisection).unwrap();
        assert_eq!(s.matching, b.matching);
        assert!((s.gamma.as_f64() - b.gamma.as_f64()).abs() < 1e-12);
    }

    #[test]
    fn exact_oracle_prefers_big_item() {
        let m = brute_force_opt(&two_item(), 10.0).unwrap();
        assert_eq!(m.left_ids(), vec![1]);
        assert_eq!(m.value(), 9.0);
    }

    #[test]
    fn exact_oracle_on_empty_graph() {
        assert!(brute_force_opt(&graph(&[1.0, 2.0], 2, &[], 3.0), 3.0).unwrap().is_empty());
    }

    #[test]
    fn exact_oracle_size_guard() {
        let bids = vec![1.0; EXACT_MAX_LEFTS + 1];
        assert!(matches!(brute_force_opt(&graph(&bids, 1, &[], 1.0), 1.0), Err(Error::Size(_))));
    }

    #[test]
    fn exact_oracle_uses_assignment_not_greedy() {
        // Greedy would take (0,0)=5 and block the 4+3 assignment.
        let g = graph(&[1.0, 1.0], 2, &[(0, 0, 5.0), (0, 1, 4.0), (1, 0, 3.0)], 10.0);
        assert_eq!(brute_force_opt(&g, 10.0).unwrap().value(), 7.0);
        assert_eq!(brute_force_opt(&g, 1.0).unwrap().value(), 5.0);
    }

    #[test]
    fn decomposition_examples() {
        let g = two_item();
        let empty = decompose_opt(&g, &Matching::empty(), 1.0);
        assert_eq!((empty.opt_plus_value, empty.opt_minus_value), (0.0, 0.0));
        let opt = brute_force_opt(&g, 10.0).unwrap();
        let at_gamma = decompose_opt(&g, &opt, 10.0 / 9.0);
        assert_eq!((at_gamma.opt_plus_value, at_gamma.opt_minus_value), (0.0, 9.0));
        let at_one = decompose_opt(&g, &opt, 1.0);
        assert_eq!((at_one.opt_plus_value, at_one.opt_minus_value), (9.0, 0.0));
        // Under the threshold's own exclusive cutoff the big item is OPT+.
        let th = threshold(&g, 10.0).unwrap();
        let own = decompose_opt(&g, &opt, th.cutoff());
        assert_eq!((own.opt_plus_value, own.opt_minus_value), (9.0, 0.0));
    }

    #[test]
    fn gamma_serializes_sentinel_as_word() {
        assert_eq!(serde_json::to_string(&Gamma::Unbounded).unwrap(), "\"unbounded\"");
        assert_eq!(serde_json::to_string(&Gamma::Finite(0.5)).unwrap(), "0.5");
        let back: Gamma = serde_json::from_str("\"unbounded\"").unwrap();
        assert_eq!(back, Gamma::Unbounded);
        assert!(Gamma::Unbounded > Gamma::Finite(1e300));
    }
}
