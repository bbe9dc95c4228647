use proptest::prelude::*;

use knapmatch::model::{
    evaluate, knapsack_to_bipartite, ArrivalOrder, BipartiteInstance, Edge, EdgeSet, Item,
    KnapsackInstance, LeftVertex, Matching, BUDGET_TOLERANCE,
};
use knapmatch::offline::{
    brute_force_opt, greedy_matching, max_weight_matching, threshold, threshold_with, Gamma,
    ThresholdSearch,
};
use knapmatch::online::{default_t, run_on, run_virtual};
use knapmatch::rng::RngStream;
use knapmatch::truthful::run_on_truth;

fn bipartite() -> impl Strategy<Value = BipartiteInstance> {
    (1usize..=7, 1usize..=5, 0.5f64..20.0).prop_flat_map(|(n_left, n_right, budget)| {
        let bids = prop::collection::vec(0.05f64..5.0, n_left);
        let cells = prop::collection::vec(prop::option::weighted(0.6, 0.1f64..20.0), n_left * n_right);
        (bids, cells).prop_map(move |(bids, cells)| {
            let lefts = bids
                .into_iter()
                .enumerate()
                .map(|(id, bid)| LeftVertex { id, bid })
                .collect();
            let edges = cells
                .into_iter()
                .enumerate()
                .filter_map(|(i, v)| {
                    v.map(|value| Edge {
                        left: i / n_right,
                        right: i % n_right,
                        value,
                    })
                })
                .collect();
            BipartiteInstance::new(lefts, n_right, edges, budget).unwrap()
        })
    })
}

fn knapsack() -> impl Strategy<Value = BipartiteInstance> {
    (prop::collection::vec((0.1f64..20.0, 0.1f64..5.0), 1..=9), 5.0f64..25.0).prop_map(
        |(pairs, capacity)| {
            let items = pairs
                .into_iter()
                .enumerate()
                .map(|(id, (value, weight))| Item { id, value, weight })
                .collect();
            knapsack_to_bipartite(&KnapsackInstance::new(items, capacity).unwrap())
        },
    )
}

fn spend(inst: &BipartiteInstance, m: &Matching) -> f64 {
    m.edges().iter().map(|e| inst.bid(e.left)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn evaluate_agrees_with_the_matching(g in bipartite()) {
        let m = greedy_matching(&g);
        let ev = evaluate(&m, &g).unwrap();
        prop_assert!((ev.value - m.value()).abs() < 1e-9);
        prop_assert!((ev.spend - spend(&g, &m)).abs() < 1e-9);
        if let Some(e) = m.edges().first() {
            let forged = Matching::new(vec![Edge { value: e.value + 1.0, ..*e }]).unwrap();
            prop_assert!(evaluate(&forged, &g).is_err());
        }
    }

    #[test]
    fn threshold_stays_within_budget(g in bipartite()) {
        let th = threshold(&g, g.budget()).unwrap();
        prop_assert!(spend(&g, &th.matching) <= g.budget() + BUDGET_TOLERANCE);
        if let Gamma::Finite(x) = th.gamma {
            prop_assert!(x * th.value() <= g.budget() + BUDGET_TOLERANCE);
        }
        for e in th.matching.edges() {
            prop_assert!(th.cutoff().admits(g.edge_bpb(e)));
        }
    }

    #[test]
    fn sweep_and_bisection_agree(g in bipartite()) {
        let a = threshold_with(&g, g.budget(), ThresholdSearch::Sweep).unwrap();
        let b = threshold_with(&g, g.budget(), ThresholdSearch::Bisection).unwrap();
        prop_assert_eq!(a.matching.keys(), b.matching.keys());
    }

    #[test]
    fn greedy_is_half_of_max_weight(g in bipartite()) {
        let greedy = greedy_matching(&g).value();
        let best = max_weight_matching(&g).value();
        prop_assert!(greedy >= best / 2.0 - 1e-9, "greedy {} best {}", greedy, best);
        prop_assert!(greedy <= best + 1e-9);
    }

    #[test]
    fn exact_dominates_threshold(g in bipartite()) {
        let opt = brute_force_opt(&g, g.budget()).unwrap();
        let th = threshold(&g, g.budget()).unwrap();
        prop_assert!(spend(&g, &opt) <= g.budget() + BUDGET_TOLERANCE);
        prop_assert!(opt.value() >= th.value() - 1e-9);
    }

    #[test]
    fn online_knapsack_is_feasible_and_unpaid(g in knapsack(), seed in any::<u64>()) {
        let order = RngStream::new(seed, "order").permutation(g.left_count());
        let t = default_t(g.left_count());
        let out = run_on(&g, &order, t, true).unwrap();
        prop_assert!(out.feasible);
        prop_assert!(out.spend <= g.budget() + BUDGET_TOLERANCE);
        prop_assert!(out.payments.iter().all(|&p| p == 0.0));
        let prefix = &order.as_slice()[..t];
        prop_assert!(out.selected.edges().iter().all(|e| !prefix.contains(&e.left)));
        for left in run_virtual(&g, &order, t).unwrap() {
            prop_assert!(!prefix.contains(&left));
        }
    }

    #[test]
    fn truthful_run_is_rational_and_within_bids(g in bipartite(), seed in any::<u64>()) {
        let order = RngStream::new(seed, "order").permutation(g.left_count());
        let out = run_on_truth(&g, &order, &RngStream::new(seed, "coins"), true).unwrap();
        prop_assert!(out.spend <= g.budget() + BUDGET_TOLERANCE);
        for left in 0..g.left_count() {
            if out.is_selected(left) {
                prop_assert!(out.payments[left] >= g.bid(left) - 1e-12);
            } else {
                prop_assert_eq!(out.payments[left], 0.0);
            }
        }
    }

    #[test]
    fn permutations_are_permutations(n in 0usize..60, seed in any::<u64>()) {
        let order = RngStream::new(seed, "p").permutation(n);
        let mut ids = order.as_slice().to_vec();
        ids.sort_unstable();
        prop_assert_eq!(ids, (0..n).collect::<Vec<_>>());
        prop_assert!(ArrivalOrder::new(order.as_slice().to_vec()).is_ok());
    }

    #[test]
    fn instance_json_round_trips(g in bipartite()) {
        let text = serde_json::to_string(&g).unwrap();
        let back: BipartiteInstance = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, g);
    }
}
