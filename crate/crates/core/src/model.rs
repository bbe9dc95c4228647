//! Instance model: knapsack items, budgeted bipartite graphs, arrival orders
//! and (pseudo) matchings.
//!
//! Every type here is immutable once constructed. Constructors validate the
//! invariants, so algorithms can index vertex arrays without re-checking.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack applied when comparing a spend against a budget.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

/// `spend <= budget` up to [`BUDGET_TOLERANCE`].
pub fn within_budget(spend: f64, budget: f64) -> bool {
    spend <= budget + BUDGET_TOLERANCE
}

fn positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: usize,
    pub value: f64,
    pub weight: f64,
}

impl Item {
    /// Weight paid per unit of value.
    pub fn buck_per_bang(&self) -> f64 {
        self.weight / self.value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKnapsack")]
pub struct KnapsackInstance {
    capacity: f64,
    items: Vec<Item>,
}

#[derive(Deserialize)]
struct RawKnapsack {
    capacity: f64,
    items: Vec<Item>,
}

impl TryFrom<RawKnapsack> for KnapsackInstance {
    type Error = Error;

    fn try_from(raw: RawKnapsack) -> Result<Self> {
        KnapsackInstance::new(raw.items, raw.capacity)
    }
}

impl KnapsackInstance {
    /// Items may be given in any order; they are stored sorted by id and the
    /// ids must be exactly `0..n`.
    pub fn new(mut items: Vec<Item>, capacity: f64) -> Result<Self> {
        if !positive_finite(capacity) {
            return Err(Error::domain(format!("capacity must be positive, got {capacity}")));
        }
        if items.is_empty() {
            return Err(Error::structural("knapsack instance has no items"));
        }
        items.sort_by_key(|item| item.id);
        for (pos, item) in items.iter().enumerate() {
            if item.id != pos {
                return Err(Error::structural(format!(
                    "item ids must be dense 0..{}, found id {} at position {pos}",
                    items.len(),
                    item.id
                )));
            }
            if !positive_finite(item.value) || !positive_finite(item.weight) {
                return Err(Error::structural(format!(
                    "item {} needs positive value and weight",
                    item.id
                )));
            }
            if item.weight > capacity {
                return Err(Error::structural(format!(
                    "item {} weighs {} which exceeds capacity {capacity}",
                    item.id, item.weight
                )));
            }
        }
        Ok(KnapsackInstance { capacity, items })
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeftVertex {
    pub id: usize,
    pub bid: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub value: f64,
}

impl Edge {
    pub fn key(&self) -> (usize, usize) {
        (self.left, self.right)
    }
}

/// A budgeted bipartite graph. Left vertex `i` is stored at index `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBipartite")]
pub struct BipartiteInstance {
    budget: f64,
    lefts: Vec<LeftVertex>,
    right_count: usize,
    edges: Vec<Edge>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawBipartite {
    budget: f64,
    lefts: Vec<LeftVertex>,
    right_count: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawBipartite> for BipartiteInstance {
    type Error = Error;

    fn try_from(raw: RawBipartite) -> Result<Self> {
        BipartiteInstance::new(raw.lefts, raw.right_count, raw.edges, raw.budget)
    }
}

impl BipartiteInstance {
    pub fn new(
        mut lefts: Vec<LeftVertex>,
        right_count: usize,
        edges: Vec<Edge>,
        budget: f64,
    ) -> Result<Self> {
        if !positive_finite(budget) {
            return Err(Error::domain(format!("budget must be positive, got {budget}")));
        }
        if right_count == 0 {
            return Err(Error::structural("right_count must be at least 1"));
        }
        lefts.sort_by_key(|l| l.id);
        for (pos, left) in lefts.iter().enumerate() {
            if left.id != pos {
                return Err(Error::structural(format!(
                    "left ids must be dense 0..{}, found id {} at position {pos}",
                    lefts.len(),
                    left.id
                )));
            }
            if !positive_finite(left.bid) {
                return Err(Error::structural(format!(
                    "left {} has non-positive bid {}",
                    left.id, left.bid
                )));
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); lefts.len()];
        for (idx, e) in edges.iter().enumerate() {
            if e.left >= lefts.len() || e.right >= right_count {
                return Err(Error::structural(format!(
                    "edge ({}, {}) references a missing vertex",
                    e.left, e.right
                )));
            }
            if !positive_finite(e.value) {
                return Err(Error::structural(format!(
                    "edge ({}, {}) has non-positive value {}",
                    e.left, e.right, e.value
                )));
            }
            if !seen.insert(e.key()) {
                return Err(Error::structural(format!(
                    "duplicate edge ({}, {})",
                    e.left, e.right
                )));
            }
            adjacency[e.left].push(idx);
        }
        Ok(BipartiteInstance {
            budget,
            lefts,
            right_count,
            edges,
            adjacency,
        })
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn lefts(&self) -> &[LeftVertex] {
        &self.lefts
    }

    pub fn left_count(&self) -> usize {
        self.lefts.len()
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn bid(&self, left: usize) -> f64 {
        self.lefts[left].bid
    }

    /// Buck per bang of an edge: the bid of its left endpoint per unit value.
    pub fn edge_bpb(&self, edge: &Edge) -> f64 {
        self.lefts[edge.left].bid / edge.value
    }

    /// Indices into [`edges`](Self::edges) of the edges incident on `left`.
    pub fn edge_indices_of(&self, left: usize) -> &[usize] {
        &self.adjacency[left]
    }

    pub fn edges_of(&self, left: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.adjacency[left].iter().map(move |&i| &self.edges[i])
    }

    pub fn edge_index(&self, left: usize, right: usize) -> Option<usize> {
        self.adjacency
            .get(left)?
            .iter()
            .copied()
            .find(|&i| self.edges[i].right == right)
    }

    pub fn find_edge(&self, left: usize, right: usize) -> Option<&Edge> {
        self.edge_index(left, right).map(|i| &self.edges[i])
    }

    /// Same vertices, keeping only the edges of lefts with `keep[left]`.
    pub fn with_lefts(&self, keep: &[bool]) -> BipartiteInstance {
        self.filter_edges(|e| keep[e.left])
    }

    pub(crate) fn filter_edges(&self, mut keep: impl FnMut(&Edge) -> bool) -> BipartiteInstance {
        let edges: Vec<Edge> = self.edges.iter().filter(|e| keep(e)).copied().collect();
        let mut adjacency = vec![Vec::new(); self.lefts.len()];
        for (idx, e) in edges.iter().enumerate() {
            adjacency[e.left].push(idx);
        }
        BipartiteInstance {
            budget: self.budget,
            lefts: self.lefts.clone(),
            right_count: self.right_count,
            edges,
            adjacency,
        }
    }

    /// Copy of the instance with one left vertex reporting a different bid.
    pub fn with_bid(&self, left: usize, bid: f64) -> Result<BipartiteInstance> {
        if left >= self.lefts.len() {
            return Err(Error::domain(format!("no left vertex {left}")));
        }
        if !positive_finite(bid) {
            return Err(Error::domain(format!("bid must be positive, got {bid}")));
        }
        let mut out = self.clone();
        out.lefts[left].bid = bid;
        Ok(out)
    }

    pub fn with_budget(&self, budget: f64) -> Result<BipartiteInstance> {
        if !positive_finite(budget) {
            return Err(Error::domain(format!("budget must be positive, got {budget}")));
        }
        let mut out = self.clone();
        out.budget = budget;
        Ok(out)
    }

    /// True for graphs produced by [`knapsack_to_bipartite`]: as many rights
    /// as lefts, complete, and every edge of a left carrying the same value.
    pub fn is_knapsack_class(&self) -> bool {
        let n = self.lefts.len();
        if self.right_count != n {
            return false;
        }
        (0..n).all(|l| {
            let adj = &self.adjacency[l];
            adj.len() == n && {
                let v = self.edges[adj[0]].value;
                adj.iter().all(|&i| self.edges[i].value == v)
            }
        })
    }

    /// For knapsack-class graphs, the common value of a left's edges.
    pub(crate) fn left_value(&self, left: usize) -> Option<f64> {
        self.adjacency[left].first().map(|&i| self.edges[i].value)
    }
}

/// The item-to-vertex mapping: one left per item bidding its weight, one right
/// per item, and a complete edge set where every edge of left `i` is worth
/// `v(i)`.
pub fn knapsack_to_bipartite(k: &KnapsackInstance) -> BipartiteInstance {
    let n = k.len();
    let lefts = k
        .items()
        .iter()
        .map(|item| LeftVertex {
            id: item.id,
            bid: item.weight,
        })
        .collect();
    let edges = k
        .items()
        .iter()
        .flat_map(|item| {
            (0..n).map(move |right| Edge {
                left: item.id,
                right,
                value: item.value,
            })
        })
        .collect();
    BipartiteInstance::new(lefts, n, edges, k.capacity())
        .expect("a valid knapsack instance maps to a valid bipartite instance")
}

/// A permutation of left ids; `as_slice()[k]` is the k-th arrival.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ArrivalOrder {
    permutation: Vec<usize>,
}

impl TryFrom<Vec<usize>> for ArrivalOrder {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        ArrivalOrder::new(v)
    }
}

impl From<ArrivalOrder> for Vec<usize> {
    fn from(o: ArrivalOrder) -> Self {
        o.permutation
    }
}

impl ArrivalOrder {
    pub fn new(permutation: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; permutation.len()];
        for &id in &permutation {
            if id >= permutation.len() || std::mem::replace(&mut seen[id], true) {
                return Err(Error::structural(format!(
                    "arrival order is not a permutation of 0..{}",
                    permutation.len()
                )));
            }
        }
        Ok(ArrivalOrder { permutation })
    }

    pub fn identity(n: usize) -> Self {
        ArrivalOrder {
            permutation: (0..n).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.permutation
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    /// Membership mask of the first `t` arrivals.
    pub fn prefix_mask(&self, t: usize) -> Vec<bool> {
        let mut mask = vec![false; self.permutation.len()];
        for &id in &self.permutation[..t.min(self.permutation.len())] {
            mask[id] = true;
        }
        mask
    }
}

/// Read access shared by [`Matching`] and [`PseudoMatching`].
pub trait EdgeSet {
    fn edges(&self) -> &[Edge];

    fn value(&self) -> f64 {
        self.edges().iter().map(|e| e.value).sum()
    }

    fn len(&self) -> usize {
        self.edges().len()
    }

    fn is_empty(&self) -> bool {
        self.edges().is_empty()
    }

    fn contains_left(&self, left: usize) -> bool {
        self.edges().iter().any(|e| e.left == left)
    }

    /// The `(left, right)` pairs in ascending order.
    fn keys(&self) -> Vec<(usize, usize)> {
        let mut keys: Vec<_> = self.edges().iter().map(Edge::key).collect();
        keys.sort_unstable();
        keys
    }

    fn left_ids(&self) -> Vec<usize> {
        self.edges().iter().map(|e| e.left).collect()
    }
}

/// Edges with every left and every right used at most once. Insertion order
/// is preserved.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Edge>", into = "Vec<Edge>")]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        let mut lefts = HashSet::new();
        let mut rights = HashSet::new();
        for e in &edges {
            if !lefts.insert(e.left) || !rights.insert(e.right) {
                return Err(Error::structural(format!(
                    "edge ({}, {}) shares an endpoint with another matched edge",
                    e.left, e.right
                )));
            }
        }
        Ok(Matching { edges })
    }

    pub fn empty() -> Self {
        Matching::default()
    }

    /// Caller guarantees both endpoints are currently unmatched.
    pub(crate) fn push_unchecked(&mut self, e: Edge) {
        debug_assert!(self.edges.iter().all(|m| m.left != e.left && m.right != e.right));
        self.edges.push(e);
    }
}

impl TryFrom<Vec<Edge>> for Matching {
    type Error = Error;

    fn try_from(v: Vec<Edge>) -> Result<Self> {
        Matching::new(v)
    }
}

impl From<Matching> for Vec<Edge> {
    fn from(m: Matching) -> Self {
        m.edges
    }
}

impl EdgeSet for Matching {
    fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// Each left at most once; rights may repeat.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Edge>", into = "Vec<Edge>")]
pub struct PseudoMatching {
    edges: Vec<Edge>,
}

impl PseudoMatching {
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        let mut lefts = HashSet::new();
        for e in &edges {
            if !lefts.insert(e.left) {
                return Err(Error::structural(format!(
                    "left {} appears twice in a pseudo matching",
                    e.left
                )));
            }
        }
        Ok(PseudoMatching { edges })
    }

    pub fn empty() -> Self {
        PseudoMatching::default()
    }

    pub(crate) fn push_unchecked(&mut self, e: Edge) {
        debug_assert!(self.edges.iter().all(|m| m.left != e.left));
        self.edges.push(e);
    }
}

impl TryFrom<Vec<Edge>> for PseudoMatching {
    type Error = Error;

    fn try_from(v: Vec<Edge>) -> Result<Self> {
        PseudoMatching::new(v)
    }
}

impl From<PseudoMatching> for Vec<Edge> {
    fn from(m: PseudoMatching) -> Self {
        m.edges
    }
}

impl EdgeSet for PseudoMatching {
    fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub spend: f64,
}

/// Total edge value and total bid of the matched lefts. Every edge must exist
/// in `inst` with the same value.
pub fn evaluate(m: &impl EdgeSet, inst: &BipartiteInstance) -> Result<Evaluation> {
    let mut value = 0.0;
    let mut spend = 0.0;
    for e in m.edges() {
        match inst.find_edge(e.left, e.right) {
            Some(found) if found.value == e.value => {
                value += e.value;
                spend += inst.bid(e.left);
            }
            _ => {
                return Err(Error::structural(format!(
                    "edge ({}, {}) with value {} is not in the instance",
                    e.left, e.right, e.value
                )))
            }
        }
    }
    Ok(Evaluation { value, spend })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(pairs: &[(f64, f64)]) -> Vec<Item> {
        pairs.iter()
            .enumerate()
            .map(|(id, &(value, weight))| Item { id, value, weight })
            .collect()
    }

    #[test]
    fn single_item_maps_to_single_edge() {
        let k = KnapsackInstance::new(items(&[(1.0, 1.0)]), 10.0).unwrap();
        let g = knapsack_to_bipartite(&k);
        assert_eq!(g.left_count(), 1);
        assert_eq!(g.right_count(), 1);
        assert_eq!(g.edges(), &[Edge { left: 0, right: 0, value: 1.0 }]);
        assert_eq!(g.bid(0), 1.0);
        assert_eq!(g.budget(), 10.0);
    }

    #[test]
    fn two_item_instance_edges_carry_item_values() {
        let k = KnapsackInstance::new(items(&[(1.0, 1.0), (9.0, 10.0)]), 10.0).unwrap();
        let g = knapsack_to_bipartite(&k);
        assert_eq!(g.edges().len(), 4);
        assert!(g.edges_of(0).all(|e| e.value == 1.0));
        assert!(g.edges_of(1).all(|e| e.value == 9.0));
        assert!(g.is_knapsack_class());
    }

    #[test]
    fn three_items_give_nine_edges() {
        let k = KnapsackInstance::new(items(&[(1.0, 2.0), (3.0, 1.0), (2.0, 2.5)]), 5.0).unwrap();
        let g = knapsack_to_bipartite(&k);
        assert_eq!(g.edges().len(), 9);
        for item in k.items() {
            assert_eq!(g.bid(item.id), item.weight);
        }
    }

    #[test]
    fn evaluate_sums_values_and_bids() {
        let g = BipartiteInstance::new(
            vec![LeftVertex { id: 0, bid: 2.0 }],
            1,
            vec![Edge { left: 0, right: 0, value: 5.0 }],
            10.0,
        )
        .unwrap();
        let empty = evaluate(&Matching::empty(), &g).unwrap();
        assert_eq!((empty.value, empty.spend), (0.0, 0.0));
        let m = Matching::new(vec![Edge { left: 0, right: 0, value: 5.0 }]).unwrap();
        let ev = evaluate(&m, &g).unwrap();
        assert_eq!((ev.value, ev.spend), (5.0, 2.0));
    }

    #[test]
    fn evaluate_both_items_of_two_item_instance() {
        let k = KnapsackInstance::new(items(&[(1.0, 1.0), (9.0, 10.0)]), 10.0).unwrap();
        let g = knapsack_to_bipartite(&k);
        let m = Matching::new(vec![
            Edge { left: 0, right: 1, value: 1.0 },
            Edge { left: 1, right: 0, value: 9.0 },
        ])
        .unwrap();
        let ev = evaluate(&m, &g).unwrap();
        assert_eq!((ev.value, ev.spend), (10.0, 11.0));
    }

    #[test]
    fn evaluate_rejects_foreign_edges() {
        let k = KnapsackInstance::new(items(&[(1.0, 1.0)]), 10.0).unwrap();
        let g = knapsack_to_bipartite(&k);
        let wrong_value = Matching::new(vec![Edge { left: 0, right: 0, value: 2.0 }]).unwrap();
        assert!(matches!(evaluate(&wrong_value, &g), Err(Error::Structural(_))));
        let missing = Matching::new(vec![Edge { left: 0, right: 3, value: 1.0 }]).unwrap();
        assert!(matches!(evaluate(&missing, &g), Err(Error::Structural(_))));
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(KnapsackInstance::new(items(&[(1.0, 11.0)]), 10.0).is_err());
        assert!(KnapsackInstance::new(vec![Item { id: 1, value: 1.0, weight: 1.0 }], 10.0).is_err());
        assert!(KnapsackInstance::new(items(&[(0.0, 1.0)]), 10.0).is_err());
        let lefts = vec![LeftVertex { id: 0, bid: 1.0 }];
        let dangling = vec![Edge { left: 0, right: 2, value: 1.0 }];
        assert!(BipartiteInstance::new(lefts.clone(), 2, dangling, 1.0).is_err());
        let dup = vec![Edge { left: 0, right: 0, value: 1.0 }, Edge { left: 0, right: 0, value: 2.0 }];
        assert!(BipartiteInstance::new(lefts.clone(), 1, dup, 1.0).is_err());
        assert!(BipartiteInstance::new(lefts, 1, vec![], -1.0).is_err());
    }

    #[test]
    fn matchings_enforce_degree_constraints() {
        let a = Edge { left: 0, right: 0, value: 1.0 };
        let b = Edge { left: 1, right: 0, value: 1.0 };
        let c = Edge { left: 0, right: 1, value: 1.0 };
        assert!(Matching::new(vec![a, b]).is_err());
        assert!(Matching::new(vec![a, c]).is_err());
        assert!(PseudoMatching::new(vec![a, b]).is_ok());
        assert!(PseudoMatching::new(vec![a, c]).is_err());
    }

    #[test]
    fn arrival_order_must_be_a_permutation() {
        assert!(ArrivalOrder::new(vec![2, 0, 1]).is_ok());
        assert!(ArrivalOrder::new(vec![0, 0, 1]).is_err());
        assert!(ArrivalOrder::new(vec![0, 3, 1]).is_err());
        let o = ArrivalOrder::new(vec![2, 0, 1]).unwrap();
        assert_eq!(o.prefix_mask(1), vec![false, false, true]);
    }
}
