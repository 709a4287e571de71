//! Image diameters and the canonical metric of a contracting base.

use contpay::payoff::fixtures;

fn main() -> anyhow::Result<()> {
    let base = fixtures::halving_base();
    let a = base.alphabet().clone();
    for w in ["", "1", "33", "131", "3333"] {
        println!("diam after {w:<5} = {}", base.diam_after(&a.parse_finite(w)?));
    }
    let eps = 1e-9;
    for (x, y) in [(0.0, 1.0), (0.25, 0.5), (0.4, 0.6)] {
        let d = base.canonical_metric(x, y, eps)?;
        println!("d({x}, {y}) = {d:.9}  (|x - y| = {})", (x - y).abs());
    }

    let f2 = fixtures::not_multi_base();
    let two = f2.alphabet().letter("2").expect("label 2");
    let (x, y) = (0.3, 0.9);
    let before = f2.canonical_metric(x, y, eps)?;
    let after = f2.canonical_metric(f2.apply(two, x), f2.apply(two, y), eps)?;
    println!("f2 contracts the metric: d(x, y) = {before:.6}, d(f2 x, f2 y) = {after:.6}");
    Ok(())
}
