mod common;

use common::{finite, rng, up};
use contpay::instances::{random_base, random_map, random_multi_discounted};
use contpay::payoff::{fixtures, ContractingBase, MultiDiscountedSpec, Payoff, PiecewiseLinearMap};
use contpay::words::{Alphabet, FiniteWord, Letter};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn pwl_examples() {
    let f2 = fixtures::not_multi_base().map(Letter(1)).clone();
    assert!((f2.eval(0.26).unwrap() - 0.11).abs() <= 1e-15);
    assert!((f2.eval(0.745).unwrap() - 0.375).abs() <= 1e-12);
    assert_eq!(f2.fixed_point().unwrap(), 0.0);
    let half = PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.0).unwrap();
    let shift = PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.5).unwrap();
    assert!((half.compose(&half).unwrap().eval(1.0).unwrap() - 0.25).abs() <= 1e-15);
    let c = half.compose(&shift).unwrap();
    for x in [0.0, 0.3, 1.0] {
        assert!((c.eval(x).unwrap() - (x / 4.0 + 0.25)).abs() <= 1e-15);
    }
    assert!((shift.fixed_point().unwrap() - 1.0).abs() <= 1e-15);
}

#[test]
fn multi_discounted_examples() {
    let a = Alphabet::new(["a"]).unwrap();
    let s = MultiDiscountedSpec::new(a.clone(), vec![0.5], vec![1.0]).unwrap();
    assert_eq!(s.eval(&a.parse_up("(a)").unwrap()).unwrap(), 2.0);
    let b = s.to_base();
    assert_eq!((b.lo(), b.hi()), (-2.0, 2.0));
    assert!((b.apply(Letter(0), 0.0) - 1.0).abs() <= 1e-15);
}

#[test]
fn diameter_examples() {
    let b = fixtures::halving_base();
    let a = b.alphabet().clone();
    assert_eq!(b.diam_after(&FiniteWord::empty()), 1.0);
    assert_eq!(b.diam_after(&a.parse_finite("1").unwrap()), 0.5);
    assert_eq!(b.diam_after(&a.parse_finite("33").unwrap()), 0.25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_maps_are_monotone_contracting_self_maps(seed: u64, xs in prop::collection::vec(0.0f64..=1.0, 2..8)) {
        let f = random_map(&mut rng(seed), 4, 0.9);
        for &x in &xs {
            let y = f.eval(x).unwrap();
            prop_assert!((0.0..=1.0).contains(&y));
        }
        for w in xs.windows(2) {
            let (x, y) = (w[0].min(w[1]), w[0].max(w[1]));
            let (fx, fy) = (f.eval(x).unwrap(), f.eval(y).unwrap());
            prop_assert!(fx <= fy + 1e-15);
            prop_assert!(fy - fx <= 0.9 * (y - x) + 1e-12);
        }
    }

    #[test]
    fn composition_is_pointwise(seed: u64, x in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let (f, g) = (random_map(&mut r, 4, 0.9), random_map(&mut r, 4, 0.9));
        let fg = f.compose(&g).unwrap();
        prop_assert!((fg.eval(x).unwrap() - f.eval(g.eval(x).unwrap()).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn shift_equation(seed: u64, w in up(3, 3, 3), l in 0usize..3) {
        let mut r = rng(seed);
        let a = Alphabet::numbered(3);
        let post = r.gen_bool(0.5).then(|| random_map(&mut r, 3, 1.0));
        let base = random_base(&mut r, &a, 3, 0.9).with_post_map(post);
        let shifted = w.prepend(&FiniteWord(vec![Letter(l)]));
        let raw = base.eval_raw(&w).unwrap();
        prop_assert!((base.eval_raw(&shifted).unwrap() - base.apply(Letter(l), raw)).abs() <= 1e-12);
        prop_assert!((base.eval(&shifted).unwrap() - base.post(base.apply(Letter(l), raw))).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_matches_affine_base(seed: u64, w in up(3, 4, 4)) {
        let a = Alphabet::numbered(3);
        let spec = random_multi_discounted(&mut rng(seed), &a, 0.95);
        let base = spec.to_base();
        prop_assert!((spec.eval(&w).unwrap() - base.eval(&w).unwrap()).abs() <= 1e-12 * spec.bound().max(1.0));
    }

    #[test]
    fn prefix_append_scales_differences(seed: u64, u in finite(3, 4), x in up(3, 3, 3), y in up(3, 3, 3)) {
        let a = Alphabet::numbered(3);
        let spec = random_multi_discounted(&mut rng(seed), &a, 0.95);
        let lhs = spec.eval(&x.prepend(&u)).unwrap() - spec.eval(&y.prepend(&u)).unwrap();
        let rhs = spec.discount(&u) * (spec.eval(&x).unwrap() - spec.eval(&y).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn diameters_shrink_along_any_sequence(seed: u64, w in up(3, 2, 3)) {
        let a = Alphabet::numbered(3);
        let base = random_base(&mut rng(seed), &a, 3, 0.9);
        let mut last = base.diam_after(&FiniteWord::empty());
        let target: f64 = 1e-6;
        // slope <= 0.9 gives diam <= 0.9^n
        let depth = (target.ln() / 0.9f64.ln()).ceil() as usize;
        for n in 1..=depth {
            let d = base.diam_after(&w.unroll(n));
            prop_assert!(d <= last + 1e-15);
            last = d;
        }
        prop_assert!(last <= target);
    }

    #[test]
    fn metric_axioms(seed: u64, mut pts in prop::array::uniform4(0.0f64..=1.0)) {
        let a = Alphabet::numbered(2);
        let base: ContractingBase = random_base(&mut rng(seed), &a, 2, 0.8);
        let eps = 1e-12;
        let d = |x: f64, y: f64| base.canonical_metric(x, y, eps).unwrap();
        let [x, y, z, _] = pts;
        prop_assert_eq!(d(x, y), d(y, x));
        prop_assert!(d(x, z) <= d(x, y) + d(y, z) + eps);
        prop_assert!(d(x, y) >= (x - y).abs());
        if x != y {
            for l in a.letters() {
                prop_assert!(d(base.apply(l, x), base.apply(l, y)) < d(x, y));
            }
        }
        pts.sort_by(f64::total_cmp);
        prop_assert!(d(pts[1], pts[2]) <= d(pts[0], pts[3]) + eps);
    }
}
