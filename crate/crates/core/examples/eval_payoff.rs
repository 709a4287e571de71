//! Evaluate the piecewise-linear counterexample payoff on lasso words and
//! show the shift equation `phi(a w) = f_a(phi(w))` at work.

use contpay::payoff::{fixtures, Payoff};

fn main() -> anyhow::Result<()> {
    let base = fixtures::not_multi_base();
    let a = base.alphabet().clone();
    println!("{:<10} {:>10} {:>10}", "word", "expected", "computed");
    for (w, expected) in fixtures::NOT_MULTI_VALUES {
        let v = base.eval(&a.parse_up(w)?)?;
        println!("{w:<10} {expected:>10} {v:>10.6}");
    }

    let tail = a.parse_up("2(3)")?;
    let two = a.letter("2").expect("label 2");
    let shifted = base.eval(&tail.prepend(&contpay::words::FiniteWord(vec![two])))?;
    let by_map = base.apply(two, base.eval_raw(&tail)?);
    println!("phi(2 2(3)) = {shifted:.6}, f2(phi(2(3))) = {by_map:.6}");
    Ok(())
}
