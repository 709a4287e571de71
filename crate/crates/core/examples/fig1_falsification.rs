//! A payoff that is not prefix-monotone: find the witness, build the
//! two-entry game from it, and confirm no positional strategy is optimal
//! from both entries.

use contpay::analysis::{check_prefix_monotone, fig1_counterexample, word_pairs};
use contpay::payoff::fixtures;
use contpay::words::{up_words_up_to, words_up_to, Letter};

fn main() -> anyhow::Result<()> {
    // phi = psi, except words starting with label 1 are reflected.
    let broken = fixtures::flip_after(fixtures::halving_base(), Letter(0));
    let a = contpay::payoff::Payoff::alphabet(&broken).clone();
    let w = check_prefix_monotone(&broken, &words_up_to(&a, 2), &word_pairs(&up_words_up_to(&a, 1, 1)), 1e-7)?
        .expect("the reflection breaks prefix-monotonicity");
    let words: Vec<String> = w.words.iter().map(|x| x.format(&a)).collect();
    println!("witness (u, v, beta, gamma) = ({}), margin {:.4}", words.join(", "), w.margin);

    let r = fig1_counterexample(&broken, &w, 1e-7)?;
    println!("game: {} nodes, {} edges", r.game.graph.node_count(), r.game.graph.edge_count());
    println!("toward beta:  value {:.4} from a, {:.4} from b", r.beta_values.0, r.beta_values.1);
    println!("toward gamma: value {:.4} from a, {:.4} from b", r.gamma_values.0, r.gamma_values.1);
    println!("uniformly optimal positional strategy exists: {}", r.uniform_optimum);
    Ok(())
}
