//! Single-switch local optima of the total value are global: scan every
//! Max strategy of a small random game and compare.

use std::cmp::Ordering;

use contpay::graph::{GameGraph, Owner, PositionalStrategy};
use contpay::instances::{random_multi_discounted, random_game, GameShape};
use contpay::solver::{neighbor_compare, strategy_value, Tolerances};
use contpay::words::Alphabet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn neighbours(g: &GameGraph, s: &PositionalStrategy) -> Vec<PositionalStrategy> {
    g.nodes_of(Owner::Max)
        .flat_map(|u| g.out_edges(u).iter().filter(move |&&e| s.choice(u) != Some(e)).map(move |&e| s.switch(g, e)))
        .collect::<Result<_, _>>()
        .expect("switching an owned edge is valid")
}

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = Alphabet::numbered(2);
    let base = random_multi_discounted(&mut rng, &a, 0.9).to_base();
    let shape = GameShape { max_nodes: 6, max_out_degree: 3, max_max_nodes: 4 };
    // Draw until the hypercube has something to scan.
    let g = loop {
        let g = random_game(&mut rng, &a, shape);
        if g.strategy_count(Owner::Max) >= 12 {
            break g;
        }
    };
    let tol = Tolerances::default();

    let all: Vec<PositionalStrategy> = PositionalStrategy::enumerate(&g, Owner::Max).collect();
    let sums: Vec<f64> = all.iter().map(|s| strategy_value(&g, &base, s, tol.eps).map(|v| v.sum())).collect::<Result<_, _>>()?;
    let best = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("{} Max strategies, best total value {best:.6}", all.len());

    for (s, sum) in all.iter().zip(&sums) {
        let mut local = true;
        for t in neighbours(&g, s) {
            if neighbor_compare(&g, &base, s, &t, tol)? == Ordering::Less {
                local = false;
                break;
            }
        }
        if local {
            println!("local maximum {:?} has total {sum:.6} (gap to best {:.2e})", s.choices(), best - sum);
        }
    }
    Ok(())
}
