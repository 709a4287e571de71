//! Random bases, multi-discounted specs and game graphs for property tests
//! and cross-method checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Edge, GameGraph, Owner};
use crate::payoff::{ContractingBase, MultiDiscountedSpec, PiecewiseLinearMap};
use crate::words::{Alphabet, Letter};

/// A non-decreasing piecewise-linear self-map of `[0, 1]` with at most
/// `max_inner` interior breakpoints and every slope in `[0, max_slope]`.
pub fn random_map<R: Rng + ?Sized>(rng: &mut R, max_inner: usize, max_slope: f64) -> PiecewiseLinearMap {
    let k = rng.gen_range(0..=max_inner);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(0.02..0.98)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    xs.insert(0, 0.0);
    xs.push(1.0);
    let slopes: Vec<f64> = (1..xs.len()).map(|_| rng.gen_range(0.0..=max_slope)).collect();
    let rise: f64 = slopes.iter().zip(xs.windows(2)).map(|(s, w)| s * (w[1] - w[0])).sum();
    let mut y = rng.gen_range(0.0..=(1.0 - rise).max(0.0));
    let mut points = vec![(0.0, y)];
    for (s, w) in slopes.iter().zip(xs.windows(2)) {
        y = (y + s * (w[1] - w[0])).min(1.0);
        points.push((w[1], y));
    }
    PiecewiseLinearMap::new(points).expect("sorted breakpoints with non-negative slopes")
}

/// A base over `alphabet` on `K = [0, 1]` with slopes at most `max_slope`.
pub fn random_base<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, max_inner: usize, max_slope: f64) -> ContractingBase {
    let maps = (0..alphabet.size()).map(|_| random_map(rng, max_inner, max_slope)).collect();
    ContractingBase::new(alphabet.clone(), maps, None).expect("random maps are contracting self-maps")
}

/// Discounts uniform in `[0, max_lambda]`, rewards uniform in `[-1, 1]`.
pub fn random_multi_discounted<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, max_lambda: f64) -> MultiDiscountedSpec {
    let m = alphabet.size();
    let lambda = (0..m).map(|_| rng.gen_range(0.0..=max_lambda)).collect();
    let w = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    MultiDiscountedSpec::new(alphabet.clone(), lambda, w).expect("discounts below one")
}

/// Size limits for [`random_game`].
#[derive(Debug, Clone, Copy)]
pub struct GameShape {
    pub max_nodes: usize,
    pub max_out_degree: usize,
    /// At most this many Max nodes.
    pub max_max_nodes: usize,
}

impl Default for GameShape {
    fn default() -> Self {
        Self { max_nodes: 6, max_out_degree: 3, max_max_nodes: 6 }
    }
}

/// A random arena: between 1 and `max_nodes` nodes, each with 1 to
/// `max_out_degree` random outgoing edges (fewer after deduplication, never
/// zero).
pub fn random_game<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, shape: GameShape) -> GameGraph {
    let n = rng.gen_range(1..=shape.max_nodes);
    let mut owners: Vec<Owner> =
        (0..n).map(|_| if rng.gen_bool(0.5) { Owner::Max } else { Owner::Min }).collect();
    let mut max_nodes: Vec<usize> = (0..n).filter(|&u| owners[u] == Owner::Max).collect();
    max_nodes.shuffle(rng);
    for &u in max_nodes.iter().skip(shape.max_max_nodes) {
        owners[u] = Owner::Min;
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for _ in 0..rng.gen_range(1..=shape.max_out_degree) {
            edges.push(Edge {
                source: u,
                label: Letter(rng.gen_range(0..alphabet.size())),
                target: rng.gen_range(0..n),
            });
        }
    }
    GameGraph::new(alphabet.clone(), owners, edges).expect("every node has an outgoing edge")
}
