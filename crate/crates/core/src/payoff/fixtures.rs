//! The hand-built payoffs used by demos, examples and tests.

use crate::words::{Alphabet, Letter, UpWord};

use super::{ContractingBase, FnPayoff, Payoff, PayoffError, PiecewiseLinearMap};

/// Breakpoints of the middle map of [`not_multi_base`].
pub const NOT_MULTI_F2: [(f64, f64); 4] = [(0.0, 0.0), (0.26, 0.11), (0.49, 0.26), (1.0, 0.49)];

/// The base `{1: x/2, 2: NOT_MULTI_F2, 3: x/2 + 1/2}` on `[0, 1]`: a
/// continuous positionally determined payoff that is not multi-discounted.
pub fn not_multi_base() -> ContractingBase {
    let a = Alphabet::numbered(3);
    let maps = vec![
        PiecewiseLinearMap::new(vec![(0.0, 0.0), (1.0, 0.5)]).unwrap(),
        PiecewiseLinearMap::new(NOT_MULTI_F2.to_vec()).unwrap(),
        PiecewiseLinearMap::new(vec![(0.0, 0.5), (1.0, 1.0)]).unwrap(),
    ];
    ContractingBase::new(a, maps, None).unwrap()
}

/// Words and values of the counterexample table, as `(word, value)`.
pub const NOT_MULTI_VALUES: [(&str, f64); 7] = [
    ("(3)", 1.0),
    ("1(3)", 0.5),
    ("2(3)", 0.49),
    ("11(3)", 0.25),
    ("22(3)", 0.26),
    ("111(3)", 0.125),
    ("222(3)", 0.11),
];

/// `{1: x/2, 3: x/2 + 1/2}` on `[0, 1]`: the induced payoff reads a word as
/// a binary fraction, with `1` as digit 0 and `3` as digit 1.
pub fn halving_base() -> ContractingBase {
    let a = Alphabet::new(["1", "3"]).expect("two labels");
    let maps = vec![
        PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.0).unwrap(),
        PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.5).unwrap(),
    ];
    ContractingBase::new(a, maps, None).unwrap()
}

/// A continuous payoff that is not prefix-monotone: `ψ` of `base`, except
/// that words starting with `flip` score `hi + lo - ψ`. Words are clopen
/// cylinders on the first letter, so continuity survives, but prepending
/// `flip` reverses every comparison.
pub fn flip_after(
    base: ContractingBase,
    flip: Letter,
) -> FnPayoff<impl Fn(&UpWord) -> Result<f64, PayoffError>> {
    let alphabet = base.alphabet().clone();
    let sup = base.lo().abs().max(base.hi().abs());
    FnPayoff::new(alphabet, sup, move |w: &UpWord| {
        let v = base.eval(w)?;
        Ok(if w.at(0) == flip { base.hi() + base.lo() - v } else { v })
    })
}
