//! Shared generators for the integration tests.
#![allow(dead_code)]

use contpay::graph::GameGraph;
use contpay::instances::{random_base, random_game, random_multi_discounted, GameShape};
use contpay::payoff::ContractingBase;
use contpay::words::{Alphabet, FiniteWord, UpWord};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn finite(m: usize, max_len: usize) -> impl Strategy<Value = FiniteWord> {
    prop::collection::vec(0..m, 0..=max_len).prop_map(|ids| FiniteWord::from_ids(&ids))
}

pub fn up(m: usize, max_prefix: usize, max_cycle: usize) -> impl Strategy<Value = UpWord> {
    (prop::collection::vec(0..m, 0..=max_prefix), prop::collection::vec(0..m, 1..=max_cycle))
        .prop_map(|(p, c)| UpWord::from_ids(&p, &c).expect("non-empty cycle"))
}

/// A random game with a base that is multi-discounted for even seeds and a
/// general piecewise-linear base for odd ones.
pub fn instance(seed: u64, shape: GameShape) -> (GameGraph, ContractingBase) {
    let mut r = rng(seed);
    let m = r.gen_range(1..=3);
    let a = Alphabet::numbered(m);
    let base = if seed.is_multiple_of(2) {
        random_multi_discounted(&mut r, &a, 0.9).to_base()
    } else {
        random_base(&mut r, &a, 3, 0.9)
    };
    (random_game(&mut r, &a, shape), base)
}

pub fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
