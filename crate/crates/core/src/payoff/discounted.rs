use crate::words::{Alphabet, FiniteWord, UpWord};

use super::pwl::PiecewiseLinearMap;
use super::{ContractingBase, Payoff, PayoffError, DEFAULT_MARGIN};

/// A multi-discounted payoff: `φ(a1 a2 ...) = Σ_n λ(a1)···λ(a_{n-1}) · w(a_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiDiscountedSpec {
    alphabet: Alphabet,
    lambda: Vec<f64>,
    w: Vec<f64>,
    bound: f64,
}

impl MultiDiscountedSpec {
    pub fn new(alphabet: Alphabet, lambda: Vec<f64>, w: Vec<f64>) -> Result<Self, PayoffError> {
        let m = alphabet.size();
        if lambda.len() != m || w.len() != m {
            return Err(PayoffError::Invalid(format!(
                "expected {m} discounts and rewards, got {} and {}",
                lambda.len(),
                w.len()
            )));
        }
        if let Some(l) = lambda.iter().find(|l| !(**l >= 0.0 && **l < 1.0)) {
            return Err(PayoffError::Invalid(format!("discount {l} is not in [0, 1)")));
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(PayoffError::Invalid("rewards must be finite".into()));
        }
        let bound = Self::invariant_bound(&lambda, &w);
        Ok(Self { alphabet, lambda, w, bound })
    }

    /// Smallest `W` (at least 1 when all rewards vanish) with
    /// `λ(a)·W + w(a) <= W` and `-λ(a)·W + w(a) >= -W` for every letter.
    fn invariant_bound(lambda: &[f64], w: &[f64]) -> f64 {
        let mut bound = lambda.iter().zip(w).map(|(l, r)| r.abs() / (1.0 - l)).fold(0.0, f64::max);
        if bound == 0.0 {
            return 1.0;
        }
        while lambda.iter().zip(w).any(|(l, r)| l * bound + r > bound || -l * bound + r < -bound) {
            bound = bound.next_up();
        }
        bound
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn rewards(&self) -> &[f64] {
        &self.w
    }

    /// `W`: the affine maps send `[-W, W]` into itself.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `(Σ_i Λ(u_1..u_{i-1}) w(u_i), Λ(u))` for a finite word `u`.
    fn partial(&self, u: &FiniteWord) -> (f64, f64) {
        u.letters().iter().fold((0.0, 1.0), |(sum, disc), &a| {
            (sum + disc * self.w[a.index()], disc * self.lambda[a.index()])
        })
    }

    /// Product of discounts along `u`.
    pub fn discount(&self, u: &FiniteWord) -> f64 {
        self.partial(u).1
    }

    /// Closed form on a lasso: prefix sum plus `Λ(u) · S(v) / (1 - Λ(v))`.
    pub fn eval_closed(&self, word: &UpWord) -> Result<f64, PayoffError> {
        word.check(&self.alphabet).map_err(PayoffError::Word)?;
        let (su, lu) = self.partial(word.prefix());
        let (sv, lv) = self.partial(word.cycle());
        Ok(su + lu * sv / (1.0 - lv))
    }

    /// The affine contracting base `f_a(x) = λ(a)·x + w(a)` on `[-W, W]`.
    pub fn to_base(&self) -> ContractingBase {
        let (lo, hi) = (-self.bound, self.bound);
        let maps = self
            .lambda
            .iter()
            .zip(&self.w)
            .map(|(&l, &r)| {
                let a = (l * lo + r).clamp(lo, hi);
                let b = (l * hi + r).clamp(a, hi);
                PiecewiseLinearMap::new(vec![(lo, a), (hi, b)]).expect("affine map with slope in [0, 1)")
            })
            .collect();
        let max_lambda = self.lambda.iter().copied().fold(0.0, f64::max);
        let margin = DEFAULT_MARGIN.min((1.0 - max_lambda) * 0.5);
        ContractingBase::with_margin(self.alphabet.clone(), maps, None, margin)
            .expect("affine base of a valid multi-discounted spec")
    }
}

impl Payoff for MultiDiscountedSpec {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn eval(&self, w: &UpWord) -> Result<f64, PayoffError> {
        self.eval_closed(w)
    }

    fn sup_abs(&self) -> f64 {
        self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_discount_is_first_reward() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let s = MultiDiscountedSpec::new(a.clone(), vec![0.0, 0.0], vec![0.3, -0.7]).unwrap();
        assert_eq!(s.eval(&a.parse_up("b(a)").unwrap()).unwrap(), -0.7);
        let base = s.to_base();
        for (i, c) in [0.3, -0.7].into_iter().enumerate() {
            let f = &base.maps()[i];
            assert!(f.points().iter().all(|p| p.1 == c));
        }
    }

    #[test]
    fn geometric_series() {
        let a = Alphabet::new(["a"]).unwrap();
        let s = MultiDiscountedSpec::new(a.clone(), vec![0.5], vec![1.0]).unwrap();
        assert_eq!(s.bound(), 2.0);
        assert_eq!(s.eval(&a.parse_up("(a)").unwrap()).unwrap(), 2.0);
        let base = s.to_base();
        assert_eq!(base.lo(), -2.0);
        assert_eq!(base.maps()[0].points(), &[(-2.0, 0.0), (2.0, 2.0)]);
    }

    #[test]
    fn half_without_reward_is_x_over_two() {
        let a = Alphabet::numbered(1);
        let s = MultiDiscountedSpec::new(a, vec![0.5], vec![0.0]).unwrap();
        let base = s.to_base();
        let f = &base.maps()[0];
        for x in [-1.0, 0.0, 0.4, 1.0] {
            assert!((f.eval(x).unwrap() - x / 2.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        let a = Alphabet::numbered(2);
        assert!(MultiDiscountedSpec::new(a.clone(), vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(MultiDiscountedSpec::new(a.clone(), vec![-0.1, 0.0], vec![0.0, 0.0]).is_err());
        assert!(MultiDiscountedSpec::new(a, vec![0.5], vec![0.0]).is_err());
    }
}
