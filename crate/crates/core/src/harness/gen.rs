use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{Baseline, ExperimentConfig, Interval, Kind};
use crate::error::{Error, Result};
use crate::io::Instance;
use crate::model::{knapsack_to_bipartite, BipartiteInstance, Edge, Item, KnapsackInstance, LeftVertex};
use crate::offline::{brute_force_opt, threshold};
use crate::model::EdgeSet;
use crate::rng::RngStream;

/// Largest admissible ratio of the best single item to the offline value.
pub const ASSUMPTION_PROXY_LIMIT: f64 = 0.1;

/// Knapsack draws attempted before giving up on the proxy check.
pub const GENERATION_RETRIES: usize = 100;

/// Slack subtracted before rounding `delta * n_right` up, so that products
/// like `0.3 * 100 = 30.000000000000004` give 30.
const DEGREE_SLACK: f64 = 1e-9;

fn draw(rng: &mut ChaCha20Rng, range: Interval) -> f64 {
    range.lo + (range.hi - range.lo) * (1.0 - rng.gen::<f64>())
}

/// Rights per helper: `ceil(delta * n_right)`.
pub fn d2d_degree(delta: f64, n_right: usize) -> Result<usize> {
    let x = delta * n_right as f64;
    if x < 1.0 - DEGREE_SLACK {
        return Err(Error::domain(format!(
            "delta {delta} gives helpers no seeker among {n_right}"
        )));
    }
    Ok(((x - DEGREE_SLACK).ceil() as usize).min(n_right))
}

/// Dispatch on `cfg.kind`.
pub fn gen_instance(cfg: &ExperimentConfig, rng: &RngStream) -> Result<Instance> {
    Ok(match cfg.kind {
        Kind::Knapsack => Instance::Knapsack(gen_knapsack_instance(cfg, rng)?),
        Kind::D2d => Instance::Bipartite(gen_d2d_instance(cfg, rng)?),
        Kind::Matching => Instance::Bipartite(gen_matching_instance(cfg, rng)?),
    })
}

fn expect_kind(cfg: &ExperimentConfig, kind: Kind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::domain(format!(
            "config kind is {}, expected {}",
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    Ok(())
}

fn lefts_with_bids(rng: &mut ChaCha20Rng, n: usize, bids: Interval) -> Vec<LeftVertex> {
    (0..n)
        .map(|id| LeftVertex {
            id,
            bid: draw(rng, bids),
        })
        .collect()
}

/// Each helper reaches a uniformly random `ceil(delta * n_right)`-subset of
/// seekers; utilities and bids are uniform on their ranges.
pub fn gen_d2d_instance(cfg: &ExperimentConfig, rng: &RngStream) -> Result<BipartiteInstance> {
    expect_kind(cfg, Kind::D2d)?;
    let degree = d2d_degree(cfg.delta, cfg.n_right)?;
    let mut r = rng.rng();
    let lefts = lefts_with_bids(&mut r, cfg.n_left, cfg.bid_range);
    let mut edges = Vec::with_capacity(cfg.n_left * degree);
    for left in 0..cfg.n_left {
        let mut rights = index::sample(&mut r, cfg.n_right, degree).into_vec();
        rights.sort_unstable();
        for right in rights {
            edges.push(Edge {
                left,
                right,
                value: draw(&mut r, cfg.value_range),
            });
        }
    }
    BipartiteInstance::new(lefts, cfg.n_right, edges, cfg.budget)
}

/// Every left-right pair is an edge independently with probability `delta`.
pub fn gen_matching_instance(cfg: &ExperimentConfig, rng: &RngStream) -> Result<BipartiteInstance> {
    expect_kind(cfg, Kind::Matching)?;
    let mut r = rng.rng();
    let lefts = lefts_with_bids(&mut r, cfg.n_left, cfg.bid_range);
    let mut edges = Vec::new();
    for left in 0..cfg.n_left {
        for right in 0..cfg.n_right {
            if r.gen::<f64>() < cfg.delta {
                edges.push(Edge {
                    left,
                    right,
                    value: draw(&mut r, cfg.value_range),
                });
            }
        }
    }
    BipartiteInstance::new(lefts, cfg.n_right, edges, cfg.budget)
}

/// `n_left` items with weights from `bid_range` and values either from
/// `value_range` or, when `bpb_range` is set, weight over an independent
/// buck per bang. Redraws until the most valuable item is at most
/// [`ASSUMPTION_PROXY_LIMIT`] of the baseline value.
pub fn gen_knapsack_instance(cfg: &ExperimentConfig, rng: &RngStream) -> Result<KnapsackInstance> {
    expect_kind(cfg, Kind::Knapsack)?;
    let mut r = rng.rng();
    let mut worst = 0.0_f64;
    for _ in 0..GENERATION_RETRIES {
        let items: Vec<Item> = (0..cfg.n_left)
            .map(|id| {
                let weight = draw(&mut r, cfg.bid_range);
                let value = match cfg.bpb_range {
                    Some(b) => weight / draw(&mut r, b),
                    None => draw(&mut r, cfg.value_range),
                };
                Item { id, value, weight }
            })
            .collect();
        let k = KnapsackInstance::new(items, cfg.budget)?;
        let g = knapsack_to_bipartite(&k);
        let baseline = match cfg.baseline {
            Baseline::Exact => brute_force_opt(&g, cfg.budget)?.value(),
            Baseline::Threshold => threshold(&g, cfg.budget)?.value(),
        };
        let v_max = k.items().iter().map(|i| i.value).fold(0.0, f64::max);
        let ratio = v_max / baseline;
        if ratio <= ASSUMPTION_PROXY_LIMIT {
            return Ok(k);
        }
        worst = worst.max(ratio);
    }
    Err(Error::Generation(format!(
        "no draw in {GENERATION_RETRIES} kept the largest item within {ASSUMPTION_PROXY_LIMIT} of the {} value (last ratios up to {worst:.3})",
        cfg.baseline.as_str()
    )))
}
