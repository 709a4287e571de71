//! The psi-transform averages a payoff over all finite prefixes with
//! geometric weights; it preserves strict orderings beyond twice the tail.

use contpay::analysis::{check_prefix_monotone, check_shift_deterministic, word_pairs, PsiTransform};
use contpay::payoff::{MultiDiscountedSpec, Payoff};
use contpay::words::{up_words_up_to, words_up_to, Alphabet};

fn main() -> anyhow::Result<()> {
    let a = Alphabet::new(["a", "b"])?;
    let spec = MultiDiscountedSpec::new(a.clone(), vec![0.3, 0.6], vec![0.5, -0.2])?;
    let psi = PsiTransform::new(spec.clone(), 8)?;
    let tail = psi.tail_bound();
    println!("depth 8, tail bound {tail:.4}");

    let words = up_words_up_to(&a, 1, 2);
    for w in &words {
        println!("{:<8} phi {:>9.5}  psi {:>9.5}", a.format_up(w), spec.eval(w)?, psi.eval(w)?);
    }
    let tol = 2.0 * tail;
    let pm = check_prefix_monotone(&psi, &words_up_to(&a, 1), &word_pairs(&words), tol)?;
    let letters: Vec<_> = a.letters().collect();
    let sd = check_shift_deterministic(&psi, &words, &letters, tol / 10.0, tol)?;
    println!("prefix-monotone witness: {}, shift-deterministic witness: {}", pm.is_some(), sd.is_some());
    Ok(())
}
