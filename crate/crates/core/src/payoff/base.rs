use crate::words::{Alphabet, FiniteWord, Letter, UpWord};

use super::pwl::{PiecewiseLinearMap, DOMAIN_TOL};
use super::{Payoff, PayoffError, DEFAULT_EPS, DEFAULT_MARGIN};

/// Composed cycle maps with more breakpoints than this are abandoned in
/// favour of Picard iteration.
pub const PICARD_THRESHOLD: usize = 10_000;

/// Work cap for the canonical metric search (number of visited words).
pub const METRIC_BUDGET: usize = 20_000_000;

/// Knobs for [`ContractingBase::eval_raw_with`].
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub eps: f64,
    pub picard_threshold: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS, picard_threshold: PICARD_THRESHOLD }
    }
}

/// A non-decreasing contracting base: one contracting self-map of a common
/// interval `K` per letter, plus an optional non-decreasing post-map.
///
/// The induced payoff of a word `a1 a2 a3 ...` is the limit of
/// `f[a1] ∘ f[a2] ∘ ... ∘ f[an](x)`, independent of the start `x ∈ K`; the
/// reported payoff additionally applies the post-map.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractingBase {
    alphabet: Alphabet,
    maps: Vec<PiecewiseLinearMap>,
    post_map: Option<PiecewiseLinearMap>,
    required_margin: f64,
}

impl ContractingBase {
    pub fn new(
        alphabet: Alphabet,
        maps: Vec<PiecewiseLinearMap>,
        post_map: Option<PiecewiseLinearMap>,
    ) -> Result<Self, PayoffError> {
        Self::with_margin(alphabet, maps, post_map, DEFAULT_MARGIN)
    }

    /// Like [`new`](Self::new) but every piece slope must be `<= 1 - margin`.
    pub fn with_margin(
        alphabet: Alphabet,
        maps: Vec<PiecewiseLinearMap>,
        post_map: Option<PiecewiseLinearMap>,
        margin: f64,
    ) -> Result<Self, PayoffError> {
        if !(margin > 0.0 && margin < 1.0) {
            return Err(PayoffError::Invalid(format!("contraction margin {margin} must lie in (0, 1)")));
        }
        if maps.len() != alphabet.size() {
            return Err(PayoffError::Invalid(format!(
                "{} maps given for an alphabet of {} letters",
                maps.len(),
                alphabet.size()
            )));
        }
        let (lo, hi) = (maps[0].lo(), maps[0].hi());
        for (i, f) in maps.iter().enumerate() {
            let name = alphabet.name(Letter(i));
            if f.lo() != lo || f.hi() != hi {
                return Err(PayoffError::DomainMismatch(format!(
                    "map `{name}` lives on [{}, {}], expected [{lo}, {hi}]",
                    f.lo(),
                    f.hi()
                )));
            }
            if !f.is_self_map() {
                let (a, b) = f.range();
                return Err(PayoffError::Invalid(format!("map `{name}` has range [{a}, {b}] outside [{lo}, {hi}]")));
            }
            let slope = f.max_slope();
            if slope > 1.0 - margin {
                return Err(PayoffError::Contract { slope, margin });
            }
        }
        Ok(Self { alphabet, maps, post_map, required_margin: margin })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn maps(&self) -> &[PiecewiseLinearMap] {
        &self.maps
    }

    pub fn map(&self, a: Letter) -> &PiecewiseLinearMap {
        &self.maps[a.index()]
    }

    pub fn post_map(&self) -> Option<&PiecewiseLinearMap> {
        self.post_map.as_ref()
    }

    pub fn lo(&self) -> f64 {
        self.maps[0].lo()
    }

    pub fn hi(&self) -> f64 {
        self.maps[0].hi()
    }

    /// The margin the maps were validated against.
    pub fn required_margin(&self) -> f64 {
        self.required_margin
    }

    /// `1 - (largest piece slope)`; at least [`required_margin`](Self::required_margin).
    /// The max-norm contraction factor of the Bellman operator is `1 - margin()`.
    pub fn margin(&self) -> f64 {
        1.0 - self.maps.iter().map(PiecewiseLinearMap::max_slope).fold(0.0, f64::max)
    }

    /// Same maps with a different post-map.
    pub fn with_post_map(&self, post_map: Option<PiecewiseLinearMap>) -> ContractingBase {
        ContractingBase { post_map, ..self.clone() }
    }

    /// Re-orders the letter maps to follow `target`, which must carry the
    /// same label set.
    pub fn reindexed(&self, target: &Alphabet) -> Result<ContractingBase, PayoffError> {
        if target.size() != self.alphabet.size() {
            return Err(PayoffError::Invalid("alphabets differ in size".into()));
        }
        let maps = target
            .names()
            .iter()
            .map(|n| {
                self.alphabet
                    .letter(n)
                    .map(|l| self.maps[l.index()].clone())
                    .ok_or_else(|| PayoffError::Invalid(format!("label `{n}` has no map")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ContractingBase { alphabet: target.clone(), maps, ..self.clone() })
    }

    /// `f_a(x)`, with `x` clamped into `K`.
    #[inline]
    pub fn apply(&self, a: Letter, x: f64) -> f64 {
        self.maps[a.index()].eval_clamped(x)
    }

    /// `f[w](x) = f[w1](f[w2](... f[wn](x)))`.
    pub fn apply_word(&self, w: &FiniteWord, x: f64) -> f64 {
        w.letters().iter().rev().fold(x, |acc, &a| self.apply(a, acc))
    }

    /// The composed map `f[w1] ∘ ... ∘ f[wn]`; identity on `K` for the empty word.
    pub fn word_map(&self, w: &FiniteWord) -> Result<PiecewiseLinearMap, PayoffError> {
        let mut acc = PiecewiseLinearMap::identity(self.lo(), self.hi())?;
        for &a in w.letters() {
            acc = acc.compose(self.map(a))?;
        }
        Ok(acc)
    }

    /// Applies the post-map (identity when absent).
    pub fn post(&self, x: f64) -> f64 {
        match &self.post_map {
            Some(g) => g.eval_clamped(x),
            None => x,
        }
    }

    fn check_word(&self, w: &UpWord) -> Result<(), PayoffError> {
        w.check(&self.alphabet).map_err(PayoffError::Word)
    }

    /// Induced payoff before the post-map.
    pub fn eval_raw(&self, w: &UpWord) -> Result<f64, PayoffError> {
        self.eval_raw_with(w, &EvalOptions::default())
    }

    pub fn eval_raw_with(&self, w: &UpWord, opts: &EvalOptions) -> Result<f64, PayoffError> {
        self.check_word(w)?;
        let x = self.cycle_fixed_point(w.cycle(), opts)?;
        Ok(self.apply_word(w.prefix(), x))
    }

    /// Fixed point of `f[v]`, i.e. the induced payoff of `v^ω`.
    fn cycle_fixed_point(&self, cycle: &FiniteWord, opts: &EvalOptions) -> Result<f64, PayoffError> {
        let mut composed = self.map(cycle.letters()[0]).clone();
        for &a in &cycle.letters()[1..] {
            composed = composed.compose(self.map(a))?;
            if composed.len() > opts.picard_threshold {
                return Ok(self.picard(cycle, opts.eps));
            }
        }
        if composed.len() > opts.picard_threshold {
            return Ok(self.picard(cycle, opts.eps));
        }
        composed.fixed_point()
    }

    fn picard(&self, cycle: &FiniteWord, eps: f64) -> f64 {
        let stop = (eps * self.margin()).max(8.0 * f64::EPSILON * self.lo().abs().max(self.hi().abs()).max(1.0));
        let mut x = self.hi();
        loop {
            let next = self.apply_word(cycle, x);
            if (next - x).abs() <= stop {
                return next;
            }
            x = next;
        }
    }

    /// `diam f[w](K) = f[w](hi) - f[w](lo)`; ignores the post-map.
    pub fn diam_after(&self, w: &FiniteWord) -> f64 {
        self.apply_word(w, self.hi()) - self.apply_word(w, self.lo())
    }

    /// The canonical metric
    /// `d(x, y) = sup_w (2 - 2^-|w|) · |f[w](x) - f[w](y)|`,
    /// within `eps / 3` of the true supremum.
    ///
    /// Words are explored by prepending letters. Every map is non-decreasing
    /// with slope below 1, so no extension of `w` can push the gap
    /// `|f[w](x) - f[w](y)|` up, and every term below a node is at most twice
    /// its gap. A branch is cut once that bound cannot beat the best term by
    /// more than `eps / 3`.
    pub fn canonical_metric(&self, x: f64, y: f64, eps: f64) -> Result<f64, PayoffError> {
        for v in [x, y] {
            if !(v >= self.lo() - DOMAIN_TOL && v <= self.hi() + DOMAIN_TOL) {
                return Err(PayoffError::Domain { x: v, lo: self.lo(), hi: self.hi() });
            }
        }
        if !(eps > 0.0) {
            return Err(PayoffError::Invalid("metric tolerance must be positive".into()));
        }
        let mut best = (x - y).abs();
        let mut stack = vec![(0u32, x, y)];
        let mut visited = 0usize;
        while let Some((depth, fx, fy)) = stack.pop() {
            visited += 1;
            if visited > METRIC_BUDGET {
                return Err(PayoffError::Budget(METRIC_BUDGET));
            }
            let gap = (fx - fy).abs();
            let weight = 2.0 - (-(depth as f64)).exp2();
            best = best.max(weight * gap);
            if 2.0 * gap <= best + eps / 3.0 {
                continue;
            }
            for f in &self.maps {
                stack.push((depth + 1, f.eval_clamped(fx), f.eval_clamped(fy)));
            }
        }
        Ok(best)
    }
}

impl Payoff for ContractingBase {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn eval(&self, w: &UpWord) -> Result<f64, PayoffError> {
        Ok(self.post(self.eval_raw(w)?))
    }

    fn sup_abs(&self) -> f64 {
        match &self.post_map {
            Some(g) => {
                let (a, b) = g.range();
                a.abs().max(b.abs())
            }
            None => self.lo().abs().max(self.hi().abs()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::fixtures;

    #[test]
    fn counterexample_values() {
        let base = fixtures::not_multi_base();
        let a = base.alphabet().clone();
        for (w, v) in [("(3)", 1.0), ("1(3)", 0.5), ("22(3)", 0.26), ("2(3)", 0.49), ("222(3)", 0.11)] {
            let got = base.eval(&a.parse_up(w).unwrap()).unwrap();
            assert!((got - v).abs() <= 1e-12, "{w}: {got} vs {v}");
        }
    }

    #[test]
    fn long_cycles_match_between_exact_and_picard() {
        let base = fixtures::not_multi_base();
        let a = base.alphabet().clone();
        let w = a.parse_up("1(2312231)").unwrap();
        let exact = base.eval_raw(&w).unwrap();
        let picard = base.eval_raw_with(&w, &EvalOptions { eps: 1e-12, picard_threshold: 2 }).unwrap();
        assert!((exact - picard).abs() < 1e-11, "{exact} vs {picard}");
    }

    #[test]
    fn diam_examples() {
        let a = Alphabet::new(["1", "3"]).unwrap();
        let base = ContractingBase::new(
            a.clone(),
            vec![
                PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.0).unwrap(),
                PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.5).unwrap(),
            ],
            None,
        )
        .unwrap();
        assert_eq!(base.diam_after(&FiniteWord::empty()), 1.0);
        assert_eq!(base.diam_after(&a.parse_finite("1").unwrap()), 0.5);
        assert_eq!(base.diam_after(&a.parse_finite("33").unwrap()), 0.25);
    }

    #[test]
    fn metric_examples() {
        let a = Alphabet::new(["1", "3"]).unwrap();
        let base = ContractingBase::new(
            a,
            vec![
                PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.0).unwrap(),
                PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.5).unwrap(),
            ],
            None,
        )
        .unwrap();
        assert_eq!(base.canonical_metric(0.3, 0.3, 1e-9).unwrap(), 0.0);
        // (2 - 2^-n) 2^-n peaks at n = 0
        assert_eq!(base.canonical_metric(0.0, 1.0, 1e-9).unwrap(), 1.0);
        let d = base.canonical_metric(0.2, 0.7, 1e-9).unwrap();
        assert!((d - 0.5).abs() <= 1e-12);
        assert!(base.canonical_metric(2.0, 0.0, 1e-9).is_err());
    }

    #[test]
    fn rejects_bad_bases() {
        let a = Alphabet::numbered(2);
        let f = PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.0).unwrap();
        let steep = PiecewiseLinearMap::identity(0.0, 1.0).unwrap();
        assert!(matches!(
            ContractingBase::new(a.clone(), vec![f.clone(), steep], None),
            Err(PayoffError::Contract { .. })
        ));
        let other = PiecewiseLinearMap::affine(0.0, 2.0, 0.5, 0.0).unwrap();
        assert!(matches!(
            ContractingBase::new(a.clone(), vec![f.clone(), other], None),
            Err(PayoffError::DomainMismatch(_))
        ));
        let escaping = PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.8).unwrap();
        assert!(ContractingBase::new(a.clone(), vec![f.clone(), escaping], None).is_err());
        assert!(ContractingBase::new(a, vec![f], None).is_err());
    }

    #[test]
    fn post_map_applies_after_raw() {
        let base = fixtures::not_multi_base();
        let g = PiecewiseLinearMap::new(vec![(0.0, 0.0), (1.0, 10.0)]).unwrap();
        let lifted = base.with_post_map(Some(g));
        let w = base.alphabet().parse_up("1(3)").unwrap();
        assert!((lifted.eval(&w).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(lifted.eval_raw(&w).unwrap(), 0.5);
        assert_eq!(lifted.sup_abs(), 10.0);
    }

    #[test]
    fn reindex_follows_labels() {
        let base = fixtures::not_multi_base();
        let rev = Alphabet::new(["3", "2", "1"]).unwrap();
        let r = base.reindexed(&rev).unwrap();
        let w = rev.parse_up("1(3)").unwrap();
        assert_eq!(r.eval(&w).unwrap(), 0.5);
    }
}
