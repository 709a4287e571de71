//! Trace strategy improvement on a random game: modified costs, the edges
//! switched, and the strictly increasing total value.

use contpay::graph::{Owner, PositionalStrategy};
use contpay::instances::{random_base, random_game, GameShape};
use contpay::solver::{find_violating, improve, strategy_value, SwitchRule, Tolerances};
use contpay::words::Alphabet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = Alphabet::numbered(3);
    let base = random_base(&mut rng, &a, 2, 0.9);
    let g = random_game(&mut rng, &a, GameShape { max_nodes: 8, ..GameShape::default() });
    let tol = Tolerances::default();
    println!("{} nodes, {} edges, {} Max strategies", g.node_count(), g.edge_count(), g.strategy_count(Owner::Max));

    let start = PositionalStrategy::first_edges(&g, Owner::Max);
    let vals = strategy_value(&g, &base, &start, tol.eps)?;
    for (e, r) in find_violating(&g, &base, &start, &vals, tol.eps_cmp) {
        println!("violating edge {e} ({:?}) with modified cost {r:.6}", g.edge(e));
    }

    for rule in [SwitchRule::Greedy, SwitchRule::Random(1), SwitchRule::AllSingle] {
        let run = improve(&g, &base, start.clone(), rule, tol)?;
        let sums: Vec<String> = run.sums.iter().map(|s| format!("{s:.6}")).collect();
        println!("{rule:?}: switches {:?}, sums {}", run.switches, sums.join(" < "));
    }
    Ok(())
}
