//! A one-player stochastic arena where neither positional choice is optimal
//! for the counterexample payoff.

use contpay::analysis::{find_mdp_violation, mdp_report, word_triples};
use contpay::payoff::fixtures;
use contpay::words::up_words_up_to;

fn main() -> anyhow::Result<()> {
    let base = fixtures::not_multi_base();
    let a = base.alphabet().clone();
    let letter = a.letter("2").expect("label 2");
    let candidates = word_triples(&up_words_up_to(&a, 2, 1));
    let Some(found) = find_mdp_violation(&base, letter, &candidates, 1e-4)? else {
        println!("no violation on the grid");
        return Ok(());
    };
    let m = &found.mdp;
    let r = mdp_report(&base, m)?;
    println!("lassos {}, {}, {}", a.format_up(&m.beta), a.format_up(&m.gamma), a.format_up(&m.delta));
    println!("p = {:?}, q = {:?}", m.p, m.q);
    println!("after letter 2: p {:.6}  q {:.6}", r.u_p, r.u_q);
    println!("directly:       p {:.6}  q {:.6}", r.v_p, r.v_q);
    let (lp, lq) = r.losses();
    println!("p loses {lp:.6} at the first start, q loses {lq:.6} at the second");
    Ok(())
}
