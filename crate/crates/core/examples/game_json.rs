//! Game and payoff JSON: build the bundled fixtures, print them, and check
//! that each one round-trips byte for byte.
//!
//! `cargo run --example game_json -- fixtures` also writes them to a directory.

use std::path::PathBuf;

use contpay::graph::{not_multi_arena, Edge, GameGraph, Owner};
use contpay::io::{base_to_json, game_to_json, multi_discounted_to_json, parse_game, parse_payoff, LoadedPayoff};
use contpay::payoff::{fixtures, MultiDiscountedSpec};
use contpay::words::{Alphabet, Letter};

fn main() -> anyhow::Result<()> {
    let ab = Alphabet::new(["a", "b"])?;
    let discounted = MultiDiscountedSpec::new(ab.clone(), vec![0.5, 0.25], vec![1.0, -1.0])?;
    // Max at 0 and 2, Min at 1 and 3.
    let owners = vec![Owner::Max, Owner::Min, Owner::Max, Owner::Min];
    let e = |source, l, target| Edge { source, label: Letter(l), target };
    let small = GameGraph::new(
        ab,
        owners,
        vec![e(0, 0, 1), e(0, 1, 2), e(1, 0, 0), e(1, 1, 3), e(2, 0, 3), e(2, 1, 2), e(3, 1, 0), e(3, 0, 3)],
    )?;

    let files = [
        ("fig2_game.json", game_to_json(&not_multi_arena().graph, true)),
        ("not_multi_payoff.json", base_to_json(&fixtures::not_multi_base(), true)),
        ("halving_payoff.json", base_to_json(&fixtures::halving_base(), true)),
        ("discounted_payoff.json", multi_discounted_to_json(&discounted, true)),
        ("small_game.json", game_to_json(&small, true)),
    ];

    for (name, json) in &files {
        let again = if name.ends_with("_game.json") {
            game_to_json(&parse_game(json)?, true)
        } else {
            match parse_payoff(json)? {
                LoadedPayoff::Base(b) => base_to_json(&b, true),
                LoadedPayoff::MultiDiscounted(s) => multi_discounted_to_json(&s, true),
            }
        };
        assert_eq!(&again, json, "{name} must round-trip");
        println!("== {name}\n{json}");
    }

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        for (name, json) in &files {
            std::fs::write(dir.join(name), format!("{json}\n"))?;
        }
        println!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(())
}
