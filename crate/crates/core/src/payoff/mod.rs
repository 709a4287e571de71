//! Payoffs induced by non-decreasing contracting bases of piecewise-linear
//! maps, the multi-discounted special case, and the canonical metric.

mod base;
mod discounted;
pub mod fixtures;
mod pwl;

pub use base::{ContractingBase, EvalOptions, METRIC_BUDGET, PICARD_THRESHOLD};
pub use discounted::MultiDiscountedSpec;
pub use pwl::{PiecewiseLinearMap, DOMAIN_TOL, MERGE_TOL};

use thiserror::Error;

use crate::words::{Alphabet, UpWord, WordError};

/// Minimum contraction margin: every piece slope must be `<= 1 - margin`.
pub const DEFAULT_MARGIN: f64 = 1e-6;
/// Default numerical tolerance for iterative procedures.
pub const DEFAULT_EPS: f64 = 1e-9;
/// Default tolerance for comparing two computed reals.
pub const DEFAULT_EPS_CMP: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PayoffError {
    #[error("argument {x} outside domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
    #[error("map is not contracting: slope {slope} exceeds 1 - {margin}")]
    Contract { slope: f64, margin: f64 },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("invalid payoff: {0}")]
    Invalid(String),
    #[error("search budget of {0} words exhausted")]
    Budget(usize),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A payoff evaluated on ultimately periodic words.
pub trait Payoff {
    fn alphabet(&self) -> &Alphabet;

    fn eval(&self, w: &UpWord) -> Result<f64, PayoffError>;

    /// Bound on the absolute error of a single [`eval`](Payoff::eval).
    fn eval_error(&self) -> f64 {
        1e-12
    }

    /// An upper bound on `|φ|` over all words.
    fn sup_abs(&self) -> f64;
}

impl<P: Payoff + ?Sized> Payoff for &P {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }

    fn eval(&self, w: &UpWord) -> Result<f64, PayoffError> {
        (**self).eval(w)
    }

    fn eval_error(&self) -> f64 {
        (**self).eval_error()
    }

    fn sup_abs(&self) -> f64 {
        (**self).sup_abs()
    }
}

/// `φ ≡ c`.
#[derive(Debug, Clone)]
pub struct ConstantPayoff {
    pub alphabet: Alphabet,
    pub value: f64,
}

impl Payoff for ConstantPayoff {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn eval(&self, w: &UpWord) -> Result<f64, PayoffError> {
        w.check(&self.alphabet)?;
        Ok(self.value)
    }

    fn eval_error(&self) -> f64 {
        0.0
    }

    fn sup_abs(&self) -> f64 {
        self.value.abs()
    }
}

/// A payoff given by an arbitrary evaluator closure.
pub struct FnPayoff<F> {
    alphabet: Alphabet,
    sup_abs: f64,
    f: F,
}

impl<F> FnPayoff<F>
where
    F: Fn(&UpWord) -> Result<f64, PayoffError>,
{
    pub fn new(alphabet: Alphabet, sup_abs: f64, f: F) -> Self {
        Self { alphabet, sup_abs, f }
    }
}

impl<F> Payoff for FnPayoff<F>
where
    F: Fn(&UpWord) -> Result<f64, PayoffError>,
{
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn eval(&self, w: &UpWord) -> Result<f64, PayoffError> {
        w.check(&self.alphabet)?;
        (self.f)(w)
    }

    fn sup_abs(&self) -> f64 {
        self.sup_abs
    }
}
