//! Multi-discounted payoffs: closed form, affine base, and the prefix-append
//! identity `phi(u a) - phi(u b) = Lambda_u (phi(a) - phi(b))`.

use contpay::payoff::{MultiDiscountedSpec, Payoff};
use contpay::words::Alphabet;

fn main() -> anyhow::Result<()> {
    let a = Alphabet::new(["a", "b"])?;
    let spec = MultiDiscountedSpec::new(a.clone(), vec![0.5, 0.25], vec![1.0, -1.0])?;
    let base = spec.to_base();
    println!("invariant interval [-{w}, {w}]", w = spec.bound());
    for w in ["(a)", "(b)", "ab(a)", "(ab)", "bba(b)"] {
        let word = a.parse_up(w)?;
        println!("{w:<8} closed form {:>10.6}  base {:>10.6}", spec.eval_closed(&word)?, base.eval(&word)?);
    }

    let u = a.parse_finite("aba")?;
    let (x, y) = (a.parse_up("(a)")?, a.parse_up("b(ab)")?);
    let lhs = spec.eval(&x.prepend(&u))? - spec.eval(&y.prepend(&u))?;
    let rhs = spec.discount(&u) * (spec.eval(&x)? - spec.eval(&y)?);
    println!("prefix aba: difference {lhs:.12} vs discounted difference {rhs:.12}");
    Ok(())
}
