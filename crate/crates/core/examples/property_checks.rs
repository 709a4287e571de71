//! Sampling checkers: a plateau post-map breaks shift-determinism, the
//! sandwich condition holds for induced payoffs, and the affine detector
//! separates multi-discounted payoffs from the counterexample.

use contpay::analysis::{check_fairly_mixing, check_shift_deterministic, detect_multi_discounted, Verdict};
use contpay::payoff::{fixtures, MultiDiscountedSpec, PiecewiseLinearMap};
use contpay::words::{up_words_up_to, Alphabet};

fn main() -> anyhow::Result<()> {
    let base = fixtures::not_multi_base();
    let a = base.alphabet().clone();
    let samples = up_words_up_to(&a, 2, 1);

    let plateau = PiecewiseLinearMap::new(vec![(0.0, 0.0), (0.4, 0.4), (0.6, 0.4), (1.0, 1.0)])?;
    let flat = base.with_post_map(Some(plateau));
    let letters: Vec<_> = a.letters().collect();
    match check_shift_deterministic(&flat, &samples, &letters, 1e-9, 1e-7)? {
        Some(w) => {
            let words: Vec<String> = w.words.iter().map(|x| x.format(&a)).collect();
            println!("plateau merges two values; letter shift separates them: {} {:?}", words.join(" "), w.values);
        }
        None => println!("no shift-determinism witness"),
    }

    let r = check_fairly_mixing(&base, &a.parse_finite("1")?, &a.parse_up("(3)")?, 1e-9)?;
    println!("sandwich 1^w, (3), 1(3): {} <= {} <= {}? {}", r.u_omega, r.u_alpha, r.alpha, r.pass);

    let verdict = detect_multi_discounted(&base, &samples, &samples, 1e-7)?;
    println!("counterexample base: {}", verdict.as_str());
    let ab = Alphabet::new(["a", "b"])?;
    let spec = MultiDiscountedSpec::new(ab.clone(), vec![0.4, 0.7], vec![1.0, -0.5])?;
    let words = up_words_up_to(&ab, 2, 2);
    if let Verdict::MultiDiscounted { lambda, w } = detect_multi_discounted(&spec, &words, &words, 1e-7)? {
        println!("recovered lambda {lambda:?}, w {w:?}");
    }
    Ok(())
}
