mod common;

use common::{finite, up};
use contpay::words::{Alphabet, FiniteWord, UpWord};
use proptest::prelude::*;

#[test]
fn unroll_and_prepend_examples() {
    let a = Alphabet::numbered(5);
    let w = a.parse_up("13(3)").unwrap();
    assert_eq!(a.format_finite(&w.unroll(4)), "1333");
    assert!(a.parse_up("1(2)").unwrap().unroll(0).is_empty());
    let ab = Alphabet::new(["a", "b"]).unwrap();
    assert_eq!(ab.format_finite(&ab.parse_up("(ab)").unwrap().unroll(5)), "ababa");
    let p = a.parse_up("3(45)").unwrap().prepend(&a.parse_finite("12").unwrap());
    assert_eq!(a.format_up(&p), "123(45)");
    assert_eq!(a.parse_up("(3)").unwrap().prepend(&FiniteWord::empty()), a.parse_up("(3)").unwrap());
}

#[test]
fn semantic_equality_examples() {
    let ab = Alphabet::new(["a", "b"]).unwrap();
    let p = |s| ab.parse_up(s).unwrap();
    assert!(p("a(b)").up_equal(&p("ab(b)")));
    assert!(p("(ab)").up_equal(&p("a(ba)")));
    assert!(!p("(a)").up_equal(&p("(b)")));
}

fn decision_bound(x: &UpWord, y: &UpWord) -> usize {
    x.equality_bound(y)
}

proptest! {
    #[test]
    fn up_equal_is_an_equivalence(x in up(2, 3, 3), y in up(2, 3, 3), z in up(2, 3, 3)) {
        prop_assert!(x.up_equal(&x));
        prop_assert_eq!(x.up_equal(&y), y.up_equal(&x));
        if x.up_equal(&y) && y.up_equal(&z) {
            prop_assert!(x.up_equal(&z));
        }
    }

    #[test]
    fn rotated_and_unrolled_forms_are_equal(w in up(3, 3, 4), k in 0usize..6) {
        let stem = w.prefix().len() + k;
        let cycle = FiniteWord(w.unroll(stem + w.cycle().len()).letters()[stem..].to_vec());
        let stretched = UpWord::new(w.unroll(stem), cycle).unwrap();
        prop_assert!(w.up_equal(&stretched));
    }

    #[test]
    fn prepend_then_unroll(u in finite(3, 4), w in up(3, 3, 3), n in 0usize..10) {
        let lhs = w.prepend(&u).unroll(u.len() + n);
        prop_assert_eq!(lhs, u.concat(&w.unroll(n)));
    }

    #[test]
    fn equal_words_agree_far_past_the_bound(x in up(2, 3, 3), y in up(2, 3, 3)) {
        if x.up_equal(&y) {
            let n = 3 * decision_bound(&x, &y);
            prop_assert_eq!(x.unroll(n), y.unroll(n));
        }
    }
}
