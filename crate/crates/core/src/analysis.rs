//! Sampling-based checkers for prefix-monotonicity, shift-determinism and the
//! fairly mixing conditions, the ψ-transform, the multi-discounted detector,
//! and the three-lasso MDP evaluator.
//!
//! A checker returning `None` found no violation in its sample; it never
//! proves the property.

use thiserror::Error;

use crate::graph::{build_fig1_game, Fig1Game, GraphError, NodeId};
use crate::payoff::{Payoff, PayoffError, DEFAULT_MARGIN};
use crate::solver::{payoff_table, SolverError};
use crate::words::{Alphabet, FiniteWord, Letter, UpWord, WordError};

/// Cap on the number of words summed by [`psi_transform`].
pub const PSI_TERM_CAP: u128 = 10_000_000;
/// Grid resolution of [`find_mdp_violation`].
pub const MDP_GRID_STEPS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("anchor values {0} and {1} are too close to fit an affine shift")]
    DegenerateAnchors(f64, f64),
    #[error("depth {depth} needs {terms} terms, above the cap of {cap}")]
    Budget { depth: usize, terms: u128, cap: u128 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// Words `[u, v, β, γ]`, values `[φ(uβ), φ(uγ), φ(vβ), φ(vγ)]`.
    PrefixMonotone,
    /// Words `[a, β, γ]`, values `[φ(β), φ(γ), φ(aβ), φ(aγ)]`.
    ShiftDeterministic,
    /// Words `[a, γ, δ, β]`, values `[φ(γ), φ(δ), φ(aγ), φ(aδ), φ(β), φ(aβ)]`.
    NotAffine,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::PrefixMonotone => "prefix_monotone",
            WitnessKind::ShiftDeterministic => "shift_deterministic",
            WitnessKind::NotAffine => "not_affine",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessWord {
    Letter(Letter),
    Finite(FiniteWord),
    Up(UpWord),
}

impl WitnessWord {
    pub fn format(&self, alphabet: &Alphabet) -> String {
        match self {
            WitnessWord::Letter(a) => alphabet.name(*a).to_string(),
            WitnessWord::Finite(w) => alphabet.format_finite(w),
            WitnessWord::Up(w) => alphabet.format_up(w),
        }
    }
}

/// A violation found by a checker, stored with the words needed to
/// re-evaluate it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub words: Vec<WitnessWord>,
    pub values: Vec<f64>,
    pub margin: f64,
}

impl Witness {
    fn letter(&self, i: usize) -> Letter {
        match &self.words[i] {
            WitnessWord::Letter(a) => *a,
            other => panic!("witness slot {i} holds {other:?}, expected a letter"),
        }
    }

    fn finite(&self, i: usize) -> &FiniteWord {
        match &self.words[i] {
            WitnessWord::Finite(w) => w,
            other => panic!("witness slot {i} holds {other:?}, expected a finite word"),
        }
    }

    fn up(&self, i: usize) -> &UpWord {
        match &self.words[i] {
            WitnessWord::Up(w) => w,
            other => panic!("witness slot {i} holds {other:?}, expected a lasso"),
        }
    }

    /// Recomputes the stored values and the margin from the stored words.
    pub fn evaluate<P: Payoff + ?Sized>(&self, payoff: &P) -> Result<(Vec<f64>, f64), AnalysisError> {
        Ok(match self.kind {
            WitnessKind::PrefixMonotone => {
                let (u, v, b, c) = (self.finite(0), self.finite(1), self.up(2), self.up(3));
                let vals = vec![
                    payoff.eval(&b.prepend(u))?,
                    payoff.eval(&c.prepend(u))?,
                    payoff.eval(&b.prepend(v))?,
                    payoff.eval(&c.prepend(v))?,
                ];
                let margin = (vals[0] - vals[1]).min(vals[3] - vals[2]);
                (vals, margin)
            }
            WitnessKind::ShiftDeterministic => {
                let a = FiniteWord(vec![self.letter(0)]);
                let (b, c) = (self.up(1), self.up(2));
                let vals =
                    vec![payoff.eval(b)?, payoff.eval(c)?, payoff.eval(&b.prepend(&a))?, payoff.eval(&c.prepend(&a))?];
                let margin = (vals[2] - vals[3]).abs();
                (vals, margin)
            }
            WitnessKind::NotAffine => {
                let a = FiniteWord(vec![self.letter(0)]);
                let (g, d, b) = (self.up(1), self.up(2), self.up(3));
                let vals = vec![
                    payoff.eval(g)?,
                    payoff.eval(d)?,
                    payoff.eval(&g.prepend(&a))?,
                    payoff.eval(&d.prepend(&a))?,
                    payoff.eval(b)?,
                    payoff.eval(&b.prepend(&a))?,
                ];
                let lambda = (vals[2] - vals[3]) / (vals[0] - vals[1]);
                let w = vals[2] - lambda * vals[0];
                let margin = (vals[5] - lambda * vals[4] - w).abs();
                (vals, margin)
            }
        })
    }

    /// True when re-evaluation reproduces every stored value within `tol`
    /// and the violation margin is still positive.
    pub fn revalidate<P: Payoff + ?Sized>(&self, payoff: &P, tol: f64) -> Result<bool, AnalysisError> {
        let (vals, margin) = self.evaluate(payoff)?;
        let same = vals.len() == self.values.len() && vals.iter().zip(&self.values).all(|(a, b)| (a - b).abs() <= tol);
        Ok(same && margin > 0.0 && (margin - self.margin).abs() <= tol.max(1e-9))
    }
}

/// A strict inequality is certified only beyond `max(tol, 10 · eval error)`.
fn strict_tol<P: Payoff + ?Sized>(payoff: &P, tol: f64) -> f64 {
    tol.max(10.0 * payoff.eval_error())
}

/// Searches for `u, v, β, γ` with `φ(uβ) > φ(uγ)` and `φ(vβ) < φ(vγ)`, both
/// gaps exceeding the strictness tolerance. Pairs are scanned in order,
/// then `u`, then `v`; the first witness is returned.
pub fn check_prefix_monotone<P: Payoff + ?Sized>(
    payoff: &P,
    prefixes: &[FiniteWord],
    pairs: &[(UpWord, UpWord)],
    tol: f64,
) -> Result<Option<Witness>, AnalysisError> {
    let tol = strict_tol(payoff, tol);
    for (beta, gamma) in pairs {
        let mut vals = Vec::with_capacity(prefixes.len());
        for u in prefixes {
            vals.push((payoff.eval(&beta.prepend(u))?, payoff.eval(&gamma.prepend(u))?));
        }
        for (i, &(ub, ug)) in vals.iter().enumerate() {
            if ub - ug <= tol {
                continue;
            }
            if let Some(j) = vals.iter().position(|&(vb, vg)| vg - vb > tol) {
                let (vb, vg) = vals[j];
                return Ok(Some(Witness {
                    kind: WitnessKind::PrefixMonotone,
                    words: vec![
                        WitnessWord::Finite(prefixes[i].clone()),
                        WitnessWord::Finite(prefixes[j].clone()),
                        WitnessWord::Up(beta.clone()),
                        WitnessWord::Up(gamma.clone()),
                    ],
                    values: vec![ub, ug, vb, vg],
                    margin: (ub - ug).min(vg - vb),
                }));
            }
        }
    }
    Ok(None)
}

/// Searches for `β, γ` with `|φ(β) - φ(γ)| <= tol_eq` but
/// `|φ(aβ) - φ(aγ)| >= tol_gap` for one of `letters`.
pub fn check_shift_deterministic<P: Payoff + ?Sized>(
    payoff: &P,
    samples: &[UpWord],
    letters: &[Letter],
    tol_eq: f64,
    tol_gap: f64,
) -> Result<Option<Witness>, AnalysisError> {
    if !(tol_gap > tol_eq) {
        return Err(AnalysisError::Invalid(format!("need tol_gap > tol_eq, got {tol_gap} <= {tol_eq}")));
    }
    let tol_gap = strict_tol(payoff, tol_gap);
    let base: Vec<f64> = samples.iter().map(|w| payoff.eval(w)).collect::<Result<_, _>>()?;
    let mut shifted = Vec::with_capacity(letters.len());
    for &a in letters {
        let a = FiniteWord(vec![a]);
        let row: Vec<f64> = samples.iter().map(|w| payoff.eval(&w.prepend(&a))).collect::<Result<_, _>>()?;
        shifted.push(row);
    }
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if (base[i] - base[j]).abs() > tol_eq || samples[i].up_equal(&samples[j]) {
                continue;
            }
            for (k, &a) in letters.iter().enumerate() {
                let gap = (shifted[k][i] - shifted[k][j]).abs();
                if gap >= tol_gap {
                    return Ok(Some(Witness {
                        kind: WitnessKind::ShiftDeterministic,
                        words: vec![
                            WitnessWord::Letter(a),
                            WitnessWord::Up(samples[i].clone()),
                            WitnessWord::Up(samples[j].clone()),
                        ],
                        values: vec![base[i], base[j], shifted[k][i], shifted[k][j]],
                        margin: gap,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// The sandwich `min{φ(u^ω), φ(α)} <= φ(uα) <= max{φ(u^ω), φ(α)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub u_omega: f64,
    pub alpha: f64,
    pub u_alpha: f64,
    pub pass: bool,
}

pub fn check_fairly_mixing<P: Payoff + ?Sized>(
    payoff: &P,
    u: &FiniteWord,
    alpha: &UpWord,
    tol: f64,
) -> Result<SandwichReport, AnalysisError> {
    if u.is_empty() {
        return Err(AnalysisError::Invalid("u must be non-empty".into()));
    }
    let u_omega = payoff.eval(&UpWord::periodic(u.clone())?)?;
    let alpha_v = payoff.eval(alpha)?;
    let u_alpha = payoff.eval(&alpha.prepend(u))?;
    let pass = u_alpha >= u_omega.min(alpha_v) - tol && u_alpha <= u_omega.max(alpha_v) + tol;
    Ok(SandwichReport { u_omega, alpha: alpha_v, u_alpha, pass })
}

/// The block-interleaving condition for the periodic schedule
/// `x_n = blocks[n mod k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    /// `φ(x_0 x_1 x_2 ...)`.
    pub whole: f64,
    /// `φ(x_0 x_2 x_4 ...)`.
    pub even: f64,
    /// `φ(x_1 x_3 x_5 ...)`.
    pub odd: f64,
    /// `min_n φ(x_n^ω)` and `max_n φ(x_n^ω)`.
    pub inf_periodic: f64,
    pub sup_periodic: f64,
    pub pass: bool,
}

/// Checks `min{even, odd, inf φ(x_n^ω)} <= whole <= max{even, odd, sup φ(x_n^ω)}`
/// for a periodic block schedule. Even and odd subsequences of a period-`k`
/// schedule are periodic with `k` blocks each.
pub fn check_fairly_mixing_schedule<P: Payoff + ?Sized>(
    payoff: &P,
    blocks: &[FiniteWord],
    tol: f64,
) -> Result<ScheduleReport, AnalysisError> {
    if blocks.is_empty() || blocks.iter().any(FiniteWord::is_empty) {
        return Err(AnalysisError::Invalid("schedule needs non-empty blocks".into()));
    }
    let k = blocks.len();
    let join = |idx: &mut dyn Iterator<Item = usize>| FiniteWord(idx.flat_map(|i| blocks[i].0.clone()).collect());
    let whole = payoff.eval(&UpWord::periodic(join(&mut (0..k)))?)?;
    let even = payoff.eval(&UpWord::periodic(join(&mut (0..k).map(|i| (2 * i) % k)))?)?;
    let odd = payoff.eval(&UpWord::periodic(join(&mut (0..k).map(|i| (2 * i + 1) % k)))?)?;
    let mut inf_periodic = f64::INFINITY;
    let mut sup_periodic = f64::NEG_INFINITY;
    for b in blocks {
        let v = payoff.eval(&UpWord::periodic(b.clone())?)?;
        inf_periodic = inf_periodic.min(v);
        sup_periodic = sup_periodic.max(v);
    }
    let lo = even.min(odd).min(inf_periodic);
    let hi = even.max(odd).max(sup_periodic);
    let pass = whole >= lo - tol && whole <= hi + tol;
    Ok(ScheduleReport { whole, even, odd, inf_periodic, sup_periodic, pass })
}

/// A truncated ψ-transform value and its tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: u128,
}

fn psi_terms(m: usize, depth: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=depth {
        total = total.saturating_add(level);
        level = level.saturating_mul(m as u128);
    }
    total
}

/// `Σ_{|w| <= D} (1/(m+1))^{|w|} φ(wγ)` with the tail bound
/// `W · Σ_{k > D} (m/(m+1))^k = W · (m+1) · (m/(m+1))^{D+1}`, `W = sup |φ|`.
pub fn psi_transform<P: Payoff + ?Sized>(payoff: &P, gamma: &UpWord, depth: usize) -> Result<PsiValue, AnalysisError> {
    let m = payoff.alphabet().size();
    let terms = psi_terms(m, depth);
    if terms > PSI_TERM_CAP {
        return Err(AnalysisError::Budget { depth, terms, cap: PSI_TERM_CAP });
    }
    let r = 1.0 / (m as f64 + 1.0);
    let mut value = 0.0;
    let mut weight = 1.0;
    for len in 0..=depth {
        let mut digits = vec![0usize; len];
        loop {
            let w = FiniteWord(digits.iter().map(|&d| Letter(d)).collect());
            value += weight * payoff.eval(&gamma.prepend(&w))?;
            // odometer over letters, last position fastest
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < m {
                    break;
                }
                digits[i] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
        weight *= r;
    }
    let q = m as f64 * r;
    let tail_bound = payoff.sup_abs() * (m as f64 + 1.0) * q.powi(depth as i32 + 1);
    Ok(PsiValue { value, tail_bound, terms })
}

/// The depth-`D` ψ-transform as a payoff in its own right.
pub struct PsiTransform<P> {
    inner: P,
    depth: usize,
    tail_bound: f64,
}

impl<P: Payoff> PsiTransform<P> {
    pub fn new(inner: P, depth: usize) -> Result<Self, AnalysisError> {
        let m = inner.alphabet().size();
        let terms = psi_terms(m, depth);
        if terms > PSI_TERM_CAP {
            return Err(AnalysisError::Budget { depth, terms, cap: PSI_TERM_CAP });
        }
        let q = m as f64 / (m as f64 + 1.0);
        let tail_bound = inner.sup_abs() * (m as f64 + 1.0) * q.powi(depth as i32 + 1);
        Ok(Self { inner, depth, tail_bound })
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: Payoff> Payoff for PsiTransform<P> {
    fn alphabet(&self) -> &Alphabet {
        self.inner.alphabet()
    }

    fn eval(&self, w: &UpWord) -> Result<f64, PayoffError> {
        psi_transform(&self.inner, w, self.depth).map(|p| p.value).map_err(|e| match e {
            AnalysisError::Payoff(p) => p,
            other => PayoffError::Invalid(other.to_string()),
        })
    }

    fn eval_error(&self) -> f64 {
        let m = self.alphabet().size() as f64;
        self.inner.eval_error() * (m + 1.0)
    }

    fn sup_abs(&self) -> f64 {
        self.inner.sup_abs() * (self.alphabet().size() as f64 + 1.0)
    }
}

/// `φ(aβ) = λ · φ(β) + w` fitted through two anchors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub lambda: f64,
    pub w: f64,
}

/// Solves `φ(aγ) = λ φ(γ) + w`, `φ(aδ) = λ φ(δ) + w`.
pub fn fit_affine_shift<P: Payoff + ?Sized>(
    payoff: &P,
    a: Letter,
    gamma: &UpWord,
    delta: &UpWord,
    tol: f64,
) -> Result<AffineFit, AnalysisError> {
    let (g, d) = (payoff.eval(gamma)?, payoff.eval(delta)?);
    if (g - d).abs() <= tol {
        return Err(AnalysisError::DegenerateAnchors(g, d));
    }
    let a = FiniteWord(vec![a]);
    let (ag, ad) = (payoff.eval(&gamma.prepend(&a))?, payoff.eval(&delta.prepend(&a))?);
    let lambda = (ag - ad) / (g - d);
    Ok(AffineFit { lambda, w: ag - lambda * g })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    MultiDiscounted { lambda: Vec<f64>, w: Vec<f64> },
    NotMultiDiscounted(Witness),
    Inconclusive { lambda: Vec<f64>, w: Vec<f64>, reason: String },
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::MultiDiscounted { .. } => "multi_discounted",
            Verdict::NotMultiDiscounted(_) => "not_multi_discounted",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Fits an affine shift per letter through the first two anchors with
/// distinct values, then tests `φ(aβ) = λ_a φ(β) + w_a` on `test_words`.
///
/// A residual above `tol` and above ten evaluation errors is a witness.
/// Otherwise the verdict is multi-discounted when every `λ_a` lies in
/// `[0, 1 - DEFAULT_MARGIN]` (with `-1e-9` slack below), inconclusive if not.
/// A payoff constant on the whole sample is multi-discounted with `λ ≡ 0`.
pub fn detect_multi_discounted<P: Payoff + ?Sized>(
    payoff: &P,
    anchors: &[UpWord],
    test_words: &[UpWord],
    tol: f64,
) -> Result<Verdict, AnalysisError> {
    let strict = strict_tol(payoff, tol);
    let vals: Vec<f64> = anchors.iter().map(|w| payoff.eval(w)).collect::<Result<_, _>>()?;
    let pair = (0..vals.len())
        .flat_map(|i| (i + 1..vals.len()).map(move |j| (i, j)))
        .find(|&(i, j)| (vals[i] - vals[j]).abs() > tol);
    let letters: Vec<Letter> = payoff.alphabet().letters().collect();
    let Some((gi, di)) = pair else {
        let c = vals.first().copied().ok_or_else(|| AnalysisError::Invalid("no anchors".into()))?;
        for b in test_words {
            for &a in &letters {
                for v in [payoff.eval(b)?, payoff.eval(&b.prepend(&FiniteWord(vec![a])))?] {
                    if (v - c).abs() > tol {
                        return Err(AnalysisError::DegenerateAnchors(c, c));
                    }
                }
            }
        }
        let m = letters.len();
        return Ok(Verdict::MultiDiscounted { lambda: vec![0.0; m], w: vec![c; m] });
    };
    let (gamma, delta) = (&anchors[gi], &anchors[di]);
    let mut lambda = Vec::with_capacity(letters.len());
    let mut w = Vec::with_capacity(letters.len());
    for &a in &letters {
        let fit = fit_affine_shift(payoff, a, gamma, delta, tol)?;
        let af = FiniteWord(vec![a]);
        for beta in test_words {
            let vb = payoff.eval(beta)?;
            let vab = payoff.eval(&beta.prepend(&af))?;
            let residual = (vab - fit.lambda * vb - fit.w).abs();
            if residual > strict {
                let values = vec![
                    vals[gi],
                    vals[di],
                    payoff.eval(&gamma.prepend(&af))?,
                    payoff.eval(&delta.prepend(&af))?,
                    vb,
                    vab,
                ];
                return Ok(Verdict::NotMultiDiscounted(Witness {
                    kind: WitnessKind::NotAffine,
                    words: vec![
                        WitnessWord::Letter(a),
                        WitnessWord::Up(gamma.clone()),
                        WitnessWord::Up(delta.clone()),
                        WitnessWord::Up(beta.clone()),
                    ],
                    values,
                    margin: residual,
                }));
            }
        }
        lambda.push(fit.lambda);
        w.push(fit.w);
    }
    if lambda.iter().all(|&l| (-1e-9..=1.0 - DEFAULT_MARGIN).contains(&l)) {
        let lambda = lambda.into_iter().map(|l| l.max(0.0)).collect();
        Ok(Verdict::MultiDiscounted { lambda, w })
    } else {
        let reason = "a fitted discount lies outside [0, 1)".to_string();
        Ok(Verdict::Inconclusive { lambda, w, reason })
    }
}

/// The two-lasso arena built from a prefix-monotonicity witness, solved
/// exhaustively.
#[derive(Debug, Clone)]
pub struct Fig1Report {
    pub game: Fig1Game,
    /// `Val` of the strategy taking the `β` lasso at `c`, from `a` and `b`.
    pub beta_values: (f64, f64),
    /// `Val` of the strategy taking the `γ` lasso at `c`, from `a` and `b`.
    pub gamma_values: (f64, f64),
    /// Whether one positional Max strategy is optimal from both `a` and `b`.
    pub uniform_optimum: bool,
}

/// For a witness `φ(uβ) > φ(uγ)`, `φ(vβ) < φ(vγ)`, builds the arena with
/// entries `a --u--> c`, `b --v--> c` and lassos `β`, `γ` at `c`, then
/// enumerates Max's two positional strategies.
pub fn fig1_counterexample<P: Payoff + ?Sized>(payoff: &P, w: &Witness, tol: f64) -> Result<Fig1Report, AnalysisError> {
    if w.kind != WitnessKind::PrefixMonotone {
        return Err(AnalysisError::Invalid(format!("expected a prefix_monotone witness, got {}", w.kind.as_str())));
    }
    let (u, v, beta, gamma) = (w.finite(0), w.finite(1), w.up(2), w.up(3));
    let game = build_fig1_game(
        payoff.alphabet(),
        u,
        v,
        beta.prefix(),
        beta.cycle(),
        gamma.prefix(),
        gamma.cycle(),
    )?;
    let table = payoff_table(&game.graph, &payoff)?;
    let lookup = |edge| -> (f64, f64) {
        let i = table.max.iter().position(|s| s.choice(game.c) == Some(edge)).expect("both lassos enumerated");
        let g = table.max_guarantee(i);
        (g[game.a], g[game.b])
    };
    let beta_values = lookup(game.alpha_edge);
    let gamma_values = lookup(game.beta_edge);
    let nodes: [NodeId; 2] = [game.a, game.b];
    let uniform_optimum = !table.optimal_max_at(&nodes, tol).is_empty();
    Ok(Fig1Report { game, beta_values, gamma_values, uniform_optimum })
}

/// `(λ+μ+λμ)·E1 - (1+λ+μ)·E2 + E3` where `E1..E3` are the left-minus-right
/// sides of the three discounted inequalities
/// `λx+u ? μx+v`, `λ²x+(1+λ)u ? μ²x+(1+μ)v`, `λ³x+(1+λ+λ²)u ? μ³x+(1+μ+μ²)v`.
/// It vanishes identically, so the three strict orderings cannot all hold.
pub fn check_claim_identity(lambda: f64, mu: f64, u: f64, v: f64, x: f64) -> f64 {
    let (l, m) = (lambda, mu);
    let e1 = (l * x + u) - (m * x + v);
    let e2 = (l * l * x + (1.0 + l) * u) - (m * m * x + (1.0 + m) * v);
    let e3 = (l * l * l * x + (1.0 + l + l * l) * u) - (m * m * m * x + (1.0 + m + m * m) * v);
    (l + m + l * m) * e1 - (1.0 + l + m) * e2 + e3
}

/// The one-player stochastic arena with two randomized actions at `v` over
/// three lassos labeled `β, γ, δ`, plus a start node `u` reading `a` first.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLassoMdp {
    pub letter: Letter,
    pub beta: UpWord,
    pub gamma: UpWord,
    pub delta: UpWord,
    pub p: [f64; 3],
    pub q: [f64; 3],
}

impl ThreeLassoMdp {
    pub fn new(
        letter: Letter,
        beta: UpWord,
        gamma: UpWord,
        delta: UpWord,
        p: [f64; 3],
        q: [f64; 3],
    ) -> Result<Self, AnalysisError> {
        for d in [&p, &q] {
            if d.iter().any(|&x| !(x >= 0.0)) || (d.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(AnalysisError::Invalid(format!("{d:?} is not a probability triple")));
            }
        }
        Ok(Self { letter, beta, gamma, delta, p, q })
    }

    fn words(&self) -> [&UpWord; 3] {
        [&self.beta, &self.gamma, &self.delta]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    P,
    Q,
}

/// `p1·φ(xβ) + p2·φ(xγ) + p3·φ(xδ)` with `x = a` from `u` (prefixed) or
/// `x = ε` from `v`.
pub fn three_lasso_expectation<P: Payoff + ?Sized>(
    payoff: &P,
    m: &ThreeLassoMdp,
    prefixed: bool,
    action: Action,
) -> Result<f64, AnalysisError> {
    let dist = match action {
        Action::P => &m.p,
        Action::Q => &m.q,
    };
    let x = if prefixed { FiniteWord(vec![m.letter]) } else { FiniteWord::empty() };
    let mut total = 0.0;
    for (pi, w) in dist.iter().zip(m.words()) {
        total += pi * payoff.eval(&w.prepend(&x))?;
    }
    Ok(total)
}

/// Expectations of both positional strategies from both start nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpReport {
    pub u_p: f64,
    pub u_q: f64,
    pub v_p: f64,
    pub v_q: f64,
}

impl MdpReport {
    /// How much the `p` action loses at `u` and the `q` action loses at `v`.
    /// Both positive means neither positional strategy is optimal.
    pub fn losses(&self) -> (f64, f64) {
        (self.u_q - self.u_p, self.v_p - self.v_q)
    }
}

pub fn mdp_report<P: Payoff + ?Sized>(payoff: &P, m: &ThreeLassoMdp) -> Result<MdpReport, AnalysisError> {
    Ok(MdpReport {
        u_p: three_lasso_expectation(payoff, m, true, Action::P)?,
        u_q: three_lasso_expectation(payoff, m, true, Action::Q)?,
        v_p: three_lasso_expectation(payoff, m, false, Action::P)?,
        v_q: three_lasso_expectation(payoff, m, false, Action::Q)?,
    })
}

/// All probability triples on the simplex grid with step `1/steps`.
pub fn simplex_grid(steps: usize) -> Vec<[f64; 3]> {
    let n = steps as f64;
    let mut out = Vec::new();
    for i in 0..=steps {
        for j in 0..=steps - i {
            let k = steps - i - j;
            out.push([i as f64 / n, j as f64 / n, k as f64 / n]);
        }
    }
    out
}

/// True when some `d = p - q` has `d·y > 0` and `d·z < 0`: the mean-free
/// parts of `y` and `z` are not non-negatively proportional.
fn separable(y: [f64; 3], z: [f64; 3]) -> bool {
    let centre = |v: [f64; 3]| {
        let m = (v[0] + v[1] + v[2]) / 3.0;
        [v[0] - m, v[1] - m, v[2] - m]
    };
    let (y, z) = (centre(y), centre(z));
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let (yy, zz, yz) = (dot(y, y), dot(z, z), dot(y, z));
    if yy <= 1e-24 || zz <= 1e-24 {
        return false;
    }
    // equality in Cauchy-Schwarz with a positive inner product means z = c·y, c > 0
    !(yz > 0.0 && (yz * yz - yy * zz).abs() <= 1e-12 * yy * zz)
}

/// A violating instance and its grid margin `min(p·y - q·y, q·z - p·z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpViolation {
    pub mdp: ThreeLassoMdp,
    pub margin: f64,
}

/// For each candidate `(β, γ, δ)` in order, searches the 0.01 simplex grid
/// for `p, q` with `p·y > q·y` and `p·z < q·z`, where `y = (φβ, φγ, φδ)`
/// and `z` is the same after prefixing `a`. Returns the best grid pair of
/// the first candidate whose margin exceeds the strictness tolerance.
pub fn find_mdp_violation<P: Payoff + ?Sized>(
    payoff: &P,
    a: Letter,
    candidates: &[(UpWord, UpWord, UpWord)],
    tol: f64,
) -> Result<Option<MdpViolation>, AnalysisError> {
    let tol = strict_tol(payoff, tol);
    let grid = simplex_grid(MDP_GRID_STEPS);
    let af = FiniteWord(vec![a]);
    for (b, c, d) in candidates {
        let y = [payoff.eval(b)?, payoff.eval(c)?, payoff.eval(d)?];
        let z = [payoff.eval(&b.prepend(&af))?, payoff.eval(&c.prepend(&af))?, payoff.eval(&d.prepend(&af))?];
        if !separable(y, z) {
            continue;
        }
        let py: Vec<f64> = grid.iter().map(|p| p[0] * y[0] + p[1] * y[1] + p[2] * y[2]).collect();
        let pz: Vec<f64> = grid.iter().map(|p| p[0] * z[0] + p[1] * z[1] + p[2] * z[2]).collect();
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                let margin = (py[i] - py[j]).min(pz[j] - pz[i]);
                if margin > best.0 {
                    best = (margin, i, j);
                }
            }
        }
        if best.0 > tol {
            let mdp = ThreeLassoMdp::new(a, b.clone(), c.clone(), d.clone(), grid[best.1], grid[best.2])?;
            return Ok(Some(MdpViolation { mdp, margin: best.0 }));
        }
    }
    Ok(None)
}

/// Every triple `(w_i, w_j, w_k)`, `i < j < k`, of pairwise distinct words.
pub fn word_triples(words: &[UpWord]) -> Vec<(UpWord, UpWord, UpWord)> {
    let mut out = Vec::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            for k in j + 1..words.len() {
                out.push((words[i].clone(), words[j].clone(), words[k].clone()));
            }
        }
    }
    out
}

/// Every ordered pair `(w_i, w_j)`, `i < j`.
pub fn word_pairs(words: &[UpWord]) -> Vec<(UpWord, UpWord)> {
    let mut out = Vec::new();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            out.push((words[i].clone(), words[j].clone()));
        }
    }
    out
}
