//! Values and positional equilibria: value iteration on Bellman's equations,
//! strategy improvement by single switches, randomized switching confirmed by
//! a two-strategy comparison, exhaustive enumeration, and verification.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{consistent_mask, play, EdgeId, GameGraph, GraphError, NodeId, Owner, PositionalStrategy};
use crate::payoff::{ContractingBase, Payoff, PayoffError, DEFAULT_EPS, DEFAULT_EPS_CMP};
use crate::words::UpWord;

/// Cap on `|Max strategies| · |Min strategies|` for exhaustive enumeration.
pub const BRUTE_FORCE_CAP: u128 = 1_000_000;
/// Cap on the strategy-count bound used for the improvement iteration cap.
pub const STRATEGY_COUNT_CAP: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("game labels {game:?} differ from payoff labels {payoff:?}")]
    AlphabetMismatch { game: Vec<String>, payoff: Vec<String> },
    #[error("value iteration did not converge within {bound} steps (last step {step:e})")]
    NoConvergence { bound: usize, step: f64 },
    #[error("strategy improvement exceeded {cap} switches")]
    IterationCap { cap: usize },
    #[error("{count} strategy pairs exceed the enumeration cap of {cap}")]
    TooLarge { count: u128, cap: u128 },
    #[error("no positional equilibrium among the enumerated strategies (gap {gap:e})")]
    NoEquilibrium { gap: f64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
}

/// Convergence tolerance `eps` and comparison tolerance `eps_cmp` (used for
/// tightness, violation, and strategy-switch acceptance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eps: f64,
    pub eps_cmp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS, eps_cmp: DEFAULT_EPS_CMP }
    }
}

impl Tolerances {
    fn check(&self) -> Result<(), SolverError> {
        if self.eps > 0.0 && self.eps_cmp > 0.0 {
            Ok(())
        } else {
            Err(SolverError::Argument(format!("tolerances must be positive: {self:?}")))
        }
    }
}

/// Node-indexed values on the base scale (before any post-map).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector {
    pub values: Vec<f64>,
    pub eps: f64,
}

impl ValueVector {
    pub fn new(values: Vec<f64>, eps: f64) -> Self {
        Self { values, eps }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Max-norm distance to `other`.
    pub fn max_dist(&self, other: &[f64]) -> f64 {
        max_dist(&self.values, other)
    }

    /// The values pushed through the base's post-map.
    pub fn reported(&self, base: &ContractingBase) -> Vec<f64> {
        self.values.iter().map(|&x| base.post(x)).collect()
    }
}

impl std::ops::Index<NodeId> for ValueVector {
    type Output = f64;

    fn index(&self, u: NodeId) -> &f64 {
        &self.values[u]
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ValueIteration,
    StrategyImprovement,
    RandomSwitch,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ValueIteration => "vi",
            Method::StrategyImprovement => "si",
            Method::RandomSwitch => "rand",
            Method::BruteForce => "brute",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A positional strategy pair with its values. `values` are on the base
/// scale; use [`ValueVector::reported`] for post-mapped numbers.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub sigma: PositionalStrategy,
    pub tau: PositionalStrategy,
    pub values: ValueVector,
    pub method: Method,
    /// Bellman steps, accepted switches, or evaluated strategy pairs.
    pub iterations: usize,
    /// Bellman residual `max_u |T(x)_u - x_u|` of `values` in the full game.
    pub residual: f64,
}

fn check_alphabets(g: &GameGraph, base: &ContractingBase) -> Result<(), SolverError> {
    check_alphabets_of(g, base.alphabet().names())
}

fn check_alphabets_of(g: &GameGraph, names: &[String]) -> Result<(), SolverError> {
    if g.alphabet().names() != names {
        return Err(SolverError::AlphabetMismatch {
            game: g.alphabet().names().to_vec(),
            payoff: names.to_vec(),
        });
    }
    Ok(())
}

fn check_len(g: &GameGraph, x: &[f64]) -> Result<(), SolverError> {
    if x.len() != g.node_count() {
        return Err(SolverError::Argument(format!("{} values for {} nodes", x.len(), g.node_count())));
    }
    Ok(())
}

/// How a node aggregates its outgoing edges.
#[derive(Debug, Clone, Copy)]
enum Agg {
    ByOwner,
    AllMin,
    AllMax,
}

fn is_max(g: &GameGraph, agg: Agg, u: NodeId) -> bool {
    match agg {
        Agg::ByOwner => g.owner(u) == Owner::Max,
        Agg::AllMin => false,
        Agg::AllMax => true,
    }
}

fn step_into(g: &GameGraph, base: &ContractingBase, x: &[f64], mask: Option<&[bool]>, agg: Agg, out: &mut [f64]) {
    for (u, slot) in out.iter_mut().enumerate() {
        let take_max = is_max(g, agg, u);
        let mut acc: Option<f64> = None;
        for &e in g.out_edges(u) {
            if mask.is_some_and(|m| !m[e]) {
                continue;
            }
            let edge = g.edge(e);
            let v = base.apply(edge.label, x[edge.target]);
            acc = Some(match acc {
                None => v,
                Some(a) if take_max => a.max(v),
                Some(a) => a.min(v),
            });
        }
        *slot = acc.expect("every node keeps an outgoing edge");
    }
}

/// One application of the Bellman operator `T`: max over outgoing edges at
/// Max nodes, min at Min nodes, of `f_lab(e)(x_target(e))`.
pub fn bellman_step(g: &GameGraph, base: &ContractingBase, x: &ValueVector) -> Result<ValueVector, SolverError> {
    check_alphabets(g, base)?;
    check_len(g, &x.values)?;
    let mut out = vec![0.0; g.node_count()];
    step_into(g, base, &x.values, None, Agg::ByOwner, &mut out);
    Ok(ValueVector::new(out, x.eps))
}

/// `max_u |T(x)_u - x_u|` in the full game.
pub fn bellman_residual(g: &GameGraph, base: &ContractingBase, x: &[f64]) -> f64 {
    let mut out = vec![0.0; g.node_count()];
    step_into(g, base, x, None, Agg::ByOwner, &mut out);
    max_dist(&out, x)
}

/// Iterates from the constant `K_lo` vector until the max-norm step drops
/// to `eps · δ`, where `δ = 1 - (largest slope)` is the contraction margin.
/// Then the distance to the fixed point is at most `eps`. The threshold is
/// floored at a few ulps of the domain scale so it stays reachable.
fn iterate(
    g: &GameGraph,
    base: &ContractingBase,
    mask: Option<&[bool]>,
    agg: Agg,
    eps: f64,
) -> Result<(Vec<f64>, usize), SolverError> {
    let delta = base.margin().min(1.0);
    if !(delta > 0.0) {
        return Err(PayoffError::Contract { slope: 1.0 - delta, margin: base.required_margin() }.into());
    }
    let scale = base.lo().abs().max(base.hi().abs()).max(1.0);
    let threshold = (eps * delta).max(8.0 * f64::EPSILON * scale);
    let span = base.hi() - base.lo();
    let bound = if delta >= 1.0 || span <= threshold {
        2
    } else {
        ((threshold / span).ln() / (1.0 - delta).ln()).ceil() as usize + 10
    };
    let mut x = vec![base.lo(); g.node_count()];
    let mut y = x.clone();
    let mut step = f64::INFINITY;
    for k in 1..=bound {
        step_into(g, base, &x, mask, agg, &mut y);
        step = max_dist(&x, &y);
        std::mem::swap(&mut x, &mut y);
        if step <= threshold {
            return Ok((x, k));
        }
    }
    Err(SolverError::NoConvergence { bound, step })
}

/// Lowest-index edge at each node of `owner` whose modified cost is within
/// `eps_cmp` of zero; falls back to the best edge for that player.
fn tight_strategy(
    g: &GameGraph,
    base: &ContractingBase,
    x: &[f64],
    owner: Owner,
    eps_cmp: f64,
) -> PositionalStrategy {
    let mut choice = vec![None; g.node_count()];
    for u in g.nodes_of(owner) {
        let costs = g.out_edges(u).iter().map(|&e| (e, modified_cost_raw(g, base, x, e)));
        let tight = costs.clone().find(|(_, r)| r.abs() <= eps_cmp);
        let pick = tight.or_else(|| {
            costs.reduce(|best, cur| {
                let better = match owner {
                    Owner::Max => cur.1 > best.1,
                    Owner::Min => cur.1 < best.1,
                };
                if better {
                    cur
                } else {
                    best
                }
            })
        });
        choice[u] = pick.map(|(e, _)| e);
    }
    PositionalStrategy::new(g, owner, choice).expect("tight choices leave owned nodes")
}

/// Solves Bellman's equations by value iteration and extracts tight edges.
pub fn solve_value_iteration(g: &GameGraph, base: &ContractingBase, tol: Tolerances) -> Result<Equilibrium, SolverError> {
    check_alphabets(g, base)?;
    tol.check()?;
    let (x, steps) = iterate(g, base, None, Agg::ByOwner, tol.eps)?;
    let sigma = tight_strategy(g, base, &x, Owner::Max, tol.eps_cmp);
    let tau = tight_strategy(g, base, &x, Owner::Min, tol.eps_cmp);
    let residual = bellman_residual(g, base, &x);
    Ok(Equilibrium {
        sigma,
        tau,
        values: ValueVector::new(x, tol.eps),
        method: Method::ValueIteration,
        iterations: steps,
        residual,
    })
}

/// `Val[s]`: the value each node guarantees to the owner of `s` when the
/// opponent best-responds. For a Max strategy this is value iteration of
/// the all-min operator on the edges consistent with `s`; for a Min
/// strategy it is the all-max dual.
pub fn strategy_value(
    g: &GameGraph,
    base: &ContractingBase,
    s: &PositionalStrategy,
    eps: f64,
) -> Result<ValueVector, SolverError> {
    check_alphabets(g, base)?;
    if s.choices().len() != g.node_count() {
        return Err(SolverError::Argument("strategy belongs to a different graph".into()));
    }
    let mask = consistent_mask(g, s);
    let agg = match s.owner() {
        Owner::Max => Agg::AllMin,
        Owner::Min => Agg::AllMax,
    };
    let (x, _) = iterate(g, base, Some(&mask), agg, eps)?;
    Ok(ValueVector::new(x, eps))
}

fn modified_cost_raw(g: &GameGraph, base: &ContractingBase, x: &[f64], e: EdgeId) -> f64 {
    let edge = g.edge(e);
    base.apply(edge.label, x[edge.target]) - x[edge.source]
}

/// `R^x(e) = f_lab(e)(x_target(e)) - x_source(e)`.
pub fn modified_cost(g: &GameGraph, base: &ContractingBase, x: &ValueVector, e: EdgeId) -> Result<f64, SolverError> {
    check_len(g, &x.values)?;
    if e >= g.edge_count() {
        return Err(SolverError::Argument(format!("no edge {e}")));
    }
    Ok(modified_cost_raw(g, base, &x.values, e))
}

/// Edges at nodes of `s`'s owner that improve on `s` by more than
/// `eps_cmp`: `R > eps_cmp` for Max, `R < -eps_cmp` for Min. Sorted by
/// decreasing improvement `|R|`, ties by lower edge index.
pub fn find_violating(
    g: &GameGraph,
    base: &ContractingBase,
    s: &PositionalStrategy,
    vals: &ValueVector,
    eps_cmp: f64,
) -> Vec<(EdgeId, f64)> {
    let sign = owner_sign(s.owner());
    let mut out: Vec<(EdgeId, f64)> = (0..g.edge_count())
        .filter(|&e| g.owner(g.edge(e).source) == s.owner())
        .map(|e| (e, modified_cost_raw(g, base, &vals.values, e)))
        .filter(|&(_, r)| sign * r > eps_cmp)
        .collect();
    out.sort_by(|a, b| (sign * b.1).total_cmp(&(sign * a.1)).then(a.0.cmp(&b.0)));
    out
}

fn owner_sign(owner: Owner) -> f64 {
    match owner {
        Owner::Max => 1.0,
        Owner::Min => -1.0,
    }
}

/// `s` with the choice at `source(e)` replaced by `e`.
pub fn switch(g: &GameGraph, s: &PositionalStrategy, e: EdgeId) -> Result<PositionalStrategy, SolverError> {
    Ok(s.switch(g, e)?)
}

/// How strategy improvement picks among violating edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchRule {
    /// Largest modified cost.
    Greedy,
    /// Uniformly at random under the seed.
    Random(u64),
    /// Evaluate every violating single switch and keep the best total value.
    AllSingle,
}

/// A finished improvement run: the equilibrium plus the switch history.
#[derive(Debug, Clone)]
pub struct ImprovementRun {
    pub equilibrium: Equilibrium,
    /// Edges switched, in order.
    pub switches: Vec<EdgeId>,
    /// `Σ_u Val[s](u)` before each switch and at the end.
    pub sums: Vec<f64>,
}

fn improvement_cap(g: &GameGraph, owner: Owner) -> usize {
    10 * g.strategy_count(owner).min(STRATEGY_COUNT_CAP) as usize
}

/// Strategy improvement for Max from the lowest-index strategy.
pub fn strategy_improvement(
    g: &GameGraph,
    base: &ContractingBase,
    rule: SwitchRule,
    tol: Tolerances,
) -> Result<Equilibrium, SolverError> {
    let start = PositionalStrategy::first_edges(g, Owner::Max);
    Ok(improve(g, base, start, rule, tol)?.equilibrium)
}

/// Strategy improvement for the owner of `start` (Max, or the Min dual).
/// Each round computes `Val[s]`, stops when no edge violates by more than
/// `eps_cmp`, and otherwise switches one node. The opponent's reply is read
/// off the tight edges of the final `Val[s]`.
pub fn improve(
    g: &GameGraph,
    base: &ContractingBase,
    start: PositionalStrategy,
    rule: SwitchRule,
    tol: Tolerances,
) -> Result<ImprovementRun, SolverError> {
    check_alphabets(g, base)?;
    tol.check()?;
    let owner = start.owner();
    let sign = owner_sign(owner);
    let cap = improvement_cap(g, owner);
    let mut rng = match rule {
        SwitchRule::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut s = start;
    let mut vals = strategy_value(g, base, &s, tol.eps)?;
    let mut switches = Vec::new();
    let mut sums = vec![vals.sum()];
    loop {
        let violating = find_violating(g, base, &s, &vals, tol.eps_cmp);
        if violating.is_empty() {
            break;
        }
        if switches.len() >= cap {
            return Err(SolverError::IterationCap { cap });
        }
        let (e, next, next_vals) = match rule {
            SwitchRule::Greedy => {
                let e = violating[0].0;
                let next = s.switch(g, e)?;
                let v = strategy_value(g, base, &next, tol.eps)?;
                (e, next, v)
            }
            SwitchRule::Random(_) => {
                let rng = rng.as_mut().expect("seeded for the random rule");
                let e = violating[rng.gen_range(0..violating.len())].0;
                let next = s.switch(g, e)?;
                let v = strategy_value(g, base, &next, tol.eps)?;
                (e, next, v)
            }
            SwitchRule::AllSingle => {
                let mut best: Option<(EdgeId, PositionalStrategy, ValueVector)> = None;
                for &(e, _) in &violating {
                    let next = s.switch(g, e)?;
                    let v = strategy_value(g, base, &next, tol.eps)?;
                    if best.as_ref().is_none_or(|b| sign * v.sum() > sign * b.2.sum()) {
                        best = Some((e, next, v));
                    }
                }
                best.expect("violating list is non-empty")
            }
        };
        switches.push(e);
        s = next;
        vals = next_vals;
        sums.push(vals.sum());
    }
    let reply = tight_strategy(g, base, &vals.values, owner.opponent(), tol.eps_cmp);
    let (sigma, tau) = match owner {
        Owner::Max => (s, reply),
        Owner::Min => (reply, s),
    };
    let residual = bellman_residual(g, base, &vals.values);
    let iterations = switches.len();
    Ok(ImprovementRun {
        equilibrium: Equilibrium {
            sigma,
            tau,
            values: vals,
            method: Method::StrategyImprovement,
            iterations,
            residual,
        },
        switches,
        sums,
    })
}

/// Compares `Σ Val[s1]` with `Σ Val[s2]` for two strategies of one player
/// that differ at exactly one node.
///
/// Both values are computed on the union subgraph of their consistent
/// edges. Each strategy's consistent edges lie inside it, so these are the
/// full-game values, and one vector dominates the other node by node. The
/// result is `Equal` when every node agrees within `eps_cmp`. Should
/// rounding produce a mixed comparison, the sums decide.
pub fn neighbor_compare(
    g: &GameGraph,
    base: &ContractingBase,
    s1: &PositionalStrategy,
    s2: &PositionalStrategy,
    tol: Tolerances,
) -> Result<Ordering, SolverError> {
    check_alphabets(g, base)?;
    if s1.owner() != s2.owner() {
        return Err(SolverError::Argument("strategies belong to different players".into()));
    }
    let differing = s1.differing_nodes(s2);
    if differing.len() != 1 {
        return Err(SolverError::Argument(format!(
            "strategies must differ at exactly one node, they differ at {}",
            differing.len()
        )));
    }
    let m1 = consistent_mask(g, s1);
    let m2 = consistent_mask(g, s2);
    let union: Vec<bool> = m1.iter().zip(&m2).map(|(a, b)| *a || *b).collect();
    let sub = g.restrict(&union)?;
    let remap = |s: &PositionalStrategy| -> Result<PositionalStrategy, SolverError> {
        let ids: Vec<EdgeId> = s
            .choices()
            .iter()
            .flatten()
            .map(|&e| union[..e].iter().filter(|&&b| b).count())
            .collect();
        Ok(PositionalStrategy::from_edges(&sub, s.owner(), &ids)?)
    };
    let v1 = strategy_value(&sub, base, &remap(s1)?, tol.eps)?;
    let v2 = strategy_value(&sub, base, &remap(s2)?, tol.eps)?;
    let (mut above, mut below) = (false, false);
    for (a, b) in v1.values.iter().zip(&v2.values) {
        if a - b > tol.eps_cmp {
            above = true;
        } else if b - a > tol.eps_cmp {
            below = true;
        }
    }
    Ok(match (above, below) {
        (false, false) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (true, true) => v1.sum().total_cmp(&v2.sum()),
    })
}

/// Randomized single-switch improvement for Max: a uniformly random
/// violating edge is proposed and kept when [`neighbor_compare`] confirms it
/// is an improvement. Deterministic for a given seed.
pub fn random_switch_solve(
    g: &GameGraph,
    base: &ContractingBase,
    seed: u64,
    tol: Tolerances,
) -> Result<ImprovementRun, SolverError> {
    check_alphabets(g, base)?;
    tol.check()?;
    let cap = improvement_cap(g, Owner::Max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = PositionalStrategy::first_edges(g, Owner::Max);
    let mut vals = strategy_value(g, base, &s, tol.eps)?;
    let mut switches = Vec::new();
    let mut sums = vec![vals.sum()];
    'outer: loop {
        let mut candidates = find_violating(g, base, &s, &vals, tol.eps_cmp);
        while !candidates.is_empty() {
            if switches.len() >= cap {
                return Err(SolverError::IterationCap { cap });
            }
            let (e, _) = candidates.swap_remove(rng.gen_range(0..candidates.len()));
            let next = s.switch(g, e)?;
            if neighbor_compare(g, base, &next, &s, tol)? == Ordering::Greater {
                s = next;
                vals = strategy_value(g, base, &s, tol.eps)?;
                switches.push(e);
                sums.push(vals.sum());
                continue 'outer;
            }
        }
        break;
    }
    let tau = tight_strategy(g, base, &vals.values, Owner::Min, tol.eps_cmp);
    let residual = bellman_residual(g, base, &vals.values);
    let iterations = switches.len();
    Ok(ImprovementRun {
        equilibrium: Equilibrium { sigma: s, tau, values: vals, method: Method::RandomSwitch, iterations, residual },
        switches,
        sums,
    })
}

/// Payoffs of every positional strategy pair from every node.
#[derive(Debug, Clone)]
pub struct StrategyTable {
    pub max: Vec<PositionalStrategy>,
    pub min: Vec<PositionalStrategy>,
    /// `values[i][j][u]`: payoff of the play of `max[i]` and `min[j]` from `u`.
    pub values: Vec<Vec<Vec<f64>>>,
}

impl StrategyTable {
    /// `Val[max[i]]`: the pointwise minimum over Min's replies.
    pub fn max_guarantee(&self, i: usize) -> Vec<f64> {
        pointwise(self.values[i].iter(), f64::min)
    }

    /// `Val[min[j]]`: the pointwise maximum over Max's replies.
    pub fn min_guarantee(&self, j: usize) -> Vec<f64> {
        pointwise(self.values.iter().map(|row| &row[j]), f64::max)
    }

    /// Max strategies whose guarantee is within `tol` of the best guarantee
    /// at every node in `nodes`.
    pub fn optimal_max_at(&self, nodes: &[NodeId], tol: f64) -> Vec<usize> {
        let g: Vec<Vec<f64>> = (0..self.max.len()).map(|i| self.max_guarantee(i)).collect();
        let best = pointwise(g.iter(), f64::max);
        (0..g.len()).filter(|&i| nodes.iter().all(|&u| g[i][u] >= best[u] - tol)).collect()
    }

    /// Min strategies whose guarantee is within `tol` of the best at every
    /// node in `nodes`.
    pub fn optimal_min_at(&self, nodes: &[NodeId], tol: f64) -> Vec<usize> {
        let g: Vec<Vec<f64>> = (0..self.min.len()).map(|j| self.min_guarantee(j)).collect();
        let best = pointwise(g.iter(), f64::min);
        (0..g.len()).filter(|&j| nodes.iter().all(|&u| g[j][u] <= best[u] + tol)).collect()
    }
}

fn pointwise<'a>(rows: impl Iterator<Item = &'a Vec<f64>>, f: fn(f64, f64) -> f64) -> Vec<f64> {
    rows.fold(None, |acc: Option<Vec<f64>>, row| {
        Some(match acc {
            None => row.clone(),
            Some(a) => a.iter().zip(row).map(|(x, y)| f(*x, *y)).collect(),
        })
    })
    .unwrap_or_default()
}

/// Enumerates every positional strategy pair and evaluates each play lasso
/// with `eval`. Refuses more than [`BRUTE_FORCE_CAP`] pairs.
pub fn strategy_table<F>(g: &GameGraph, eval: F) -> Result<StrategyTable, SolverError>
where
    F: Fn(&UpWord) -> Result<f64, PayoffError>,
{
    let count = g.strategy_count(Owner::Max).saturating_mul(g.strategy_count(Owner::Min));
    if count > BRUTE_FORCE_CAP {
        return Err(SolverError::TooLarge { count, cap: BRUTE_FORCE_CAP });
    }
    let max: Vec<_> = PositionalStrategy::enumerate(g, Owner::Max).collect();
    let min: Vec<_> = PositionalStrategy::enumerate(g, Owner::Min).collect();
    let mut values = Vec::with_capacity(max.len());
    for sigma in &max {
        let mut row = Vec::with_capacity(min.len());
        for tau in &min {
            let cell = (0..g.node_count())
                .map(|u| eval(&play(g, sigma, tau, u).label_word(g)))
                .collect::<Result<Vec<_>, _>>()?;
            row.push(cell);
        }
        values.push(row);
    }
    Ok(StrategyTable { max, min, values })
}

/// [`strategy_table`] for an arbitrary payoff over the game's labels.
pub fn payoff_table<P: Payoff>(g: &GameGraph, payoff: &P) -> Result<StrategyTable, SolverError> {
    check_alphabets_of(g, payoff.alphabet().names())?;
    strategy_table(g, |w| payoff.eval(w))
}

/// Exhaustive solve: picks the first Max strategy optimal at every node and
/// the first such Min strategy, and checks that their guarantees coincide.
pub fn brute_force_solve(g: &GameGraph, base: &ContractingBase) -> Result<(Equilibrium, StrategyTable), SolverError> {
    check_alphabets(g, base)?;
    let table = strategy_table(g, |w| base.eval_raw(w))?;
    let all: Vec<NodeId> = (0..g.node_count()).collect();
    let tie = 1e-9;
    let i = *table.optimal_max_at(&all, tie).first().ok_or(SolverError::NoEquilibrium { gap: f64::NAN })?;
    let j = *table.optimal_min_at(&all, tie).first().ok_or(SolverError::NoEquilibrium { gap: f64::NAN })?;
    let vs = table.max_guarantee(i);
    let vt = table.min_guarantee(j);
    let gap = max_dist(&vs, &vt);
    if gap > tie {
        return Err(SolverError::NoEquilibrium { gap });
    }
    let residual = bellman_residual(g, base, &vs);
    let eq = Equilibrium {
        sigma: table.max[i].clone(),
        tau: table.min[j].clone(),
        values: ValueVector::new(vs, 0.0),
        method: Method::BruteForce,
        iterations: table.max.len() * table.min.len(),
        residual,
    };
    Ok((eq, table))
}

/// Outcome of [`verify_equilibrium`], on the post-mapped scale.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub val_sigma: Vec<f64>,
    pub val_tau: Vec<f64>,
    /// `max_u |Val[σ](u) - Val[τ](u)|`.
    pub gap: f64,
    pub worst_node: NodeId,
    pub tol: f64,
    pub pass: bool,
}

/// Computes `Val[σ]` and `Val[τ]` by one-player solves and compares them.
pub fn verify_equilibrium(
    g: &GameGraph,
    base: &ContractingBase,
    sigma: &PositionalStrategy,
    tau: &PositionalStrategy,
    tol: f64,
) -> Result<VerifyReport, SolverError> {
    if sigma.owner() != Owner::Max || tau.owner() != Owner::Min {
        return Err(SolverError::Argument("expected a Max strategy and a Min strategy".into()));
    }
    let eps = DEFAULT_EPS.min(tol * 0.1).max(f64::EPSILON);
    let val_sigma = strategy_value(g, base, sigma, eps)?.reported(base);
    let val_tau = strategy_value(g, base, tau, eps)?.reported(base);
    let (worst_node, gap) = val_sigma
        .iter()
        .zip(&val_tau)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0), |best, (u, d)| if d > best.1 { (u, d) } else { best });
    Ok(VerifyReport { val_sigma, val_tau, gap, worst_node, tol, pass: gap <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{not_multi_arena, Edge};
    use crate::payoff::{fixtures, PiecewiseLinearMap};
    use crate::words::{Alphabet, Letter};

    fn loops_base() -> ContractingBase {
        let a = Alphabet::new(["1", "3"]).unwrap();
        ContractingBase::new(
            a,
            vec![
                PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.0).unwrap(),
                PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.5).unwrap(),
            ],
            None,
        )
        .unwrap()
    }

    fn two_loops(owner: Owner) -> GameGraph {
        let a = Alphabet::new(["1", "3"]).unwrap();
        GameGraph::new(
            a,
            vec![owner],
            vec![
                Edge { source: 0, label: Letter(0), target: 0 },
                Edge { source: 0, label: Letter(1), target: 0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn bellman_step_takes_the_better_loop() {
        let g = two_loops(Owner::Max);
        let base = loops_base();
        for x in [0.0, 0.3, 1.0] {
            let y = bellman_step(&g, &base, &ValueVector::new(vec![x], 0.0)).unwrap();
            assert_eq!(y[0], x / 2.0 + 0.5);
        }
    }

    #[test]
    fn constant_maps_converge_in_one_step() {
        let a = Alphabet::numbered(1);
        let base =
            ContractingBase::new(a.clone(), vec![PiecewiseLinearMap::constant(0.0, 1.0, 0.3).unwrap()], None).unwrap();
        let g = GameGraph::new(a, vec![Owner::Min], vec![Edge { source: 0, label: Letter(0), target: 0 }]).unwrap();
        let y = bellman_step(&g, &base, &ValueVector::new(vec![0.9], 0.0)).unwrap();
        assert_eq!(y[0], 0.3);
        let eq = solve_value_iteration(&g, &base, Tolerances::default()).unwrap();
        assert_eq!(eq.values[0], 0.3);
        assert!(eq.iterations <= 2);
    }

    #[test]
    fn value_iteration_single_loop() {
        let a = Alphabet::new(["1", "3"]).unwrap();
        let g = GameGraph::new(a, vec![Owner::Max], vec![Edge { source: 0, label: Letter(1), target: 0 }]).unwrap();
        let eq = solve_value_iteration(&g, &loops_base(), Tolerances::default()).unwrap();
        assert!((eq.values[0] - 1.0).abs() <= 1e-9);
        assert_eq!(eq.sigma.choice(0), Some(0));
        assert!(eq.residual <= 2e-9);
    }

    #[test]
    fn fig2_value_iteration() {
        let fig = not_multi_arena();
        let base = fixtures::not_multi_base();
        let eq = solve_value_iteration(&fig.graph, &base, Tolerances::default()).unwrap();
        for (i, v) in [0.5, 0.26, 0.125].into_iter().enumerate() {
            assert!((eq.values[fig.v[i]] - v).abs() <= 1e-9);
        }
        assert_eq!(eq.sigma, fig.go_left());
    }

    #[test]
    fn fig2_go_right_values_and_violations() {
        let fig = not_multi_arena();
        let base = fixtures::not_multi_base();
        let right = fig.go_right();
        let vals = strategy_value(&fig.graph, &base, &right, 1e-12).unwrap();
        for (i, v) in [0.49, 0.25, 0.11].into_iter().enumerate() {
            assert!((vals[fig.v[i]] - v).abs() <= 1e-9);
        }
        let left = strategy_value(&fig.graph, &base, &fig.go_left(), 1e-12).unwrap();
        assert!((left[fig.v[1]] - 0.26).abs() <= 1e-9);
        let violating = find_violating(&fig.graph, &base, &right, &vals, 1e-7);
        let edges: Vec<EdgeId> = violating.iter().map(|v| v.0).collect();
        let mut expected = fig.left.to_vec();
        expected.sort();
        let mut got = edges.clone();
        got.sort();
        assert_eq!(got, expected);
        assert!(violating.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn modified_cost_example() {
        let a = Alphabet::new(["1", "3"]).unwrap();
        let g = GameGraph::new(a, vec![Owner::Max], vec![Edge { source: 0, label: Letter(1), target: 0 }]).unwrap();
        let r = modified_cost(&g, &loops_base(), &ValueVector::new(vec![0.0], 0.0), 0).unwrap();
        assert_eq!(r, 0.5);
    }

    #[test]
    fn improvement_reaches_go_left_from_everywhere() {
        let fig = not_multi_arena();
        let base = fixtures::not_multi_base();
        let tol = Tolerances::default();
        for rule in [SwitchRule::Greedy, SwitchRule::Random(3), SwitchRule::AllSingle] {
            for start in PositionalStrategy::enumerate(&fig.graph, Owner::Max) {
                let run = improve(&fig.graph, &base, start, rule, tol).unwrap();
                assert_eq!(run.equilibrium.sigma, fig.go_left());
                assert!(run.sums.windows(2).all(|w| w[1] > w[0]));
            }
        }
        let run = improve(&fig.graph, &base, fig.go_left(), SwitchRule::Greedy, tol).unwrap();
        assert!(run.switches.is_empty());
    }

    #[test]
    fn min_dual_improvement() {
        let g = two_loops(Owner::Min);
        let base = loops_base();
        let tol = Tolerances::default();
        let start = PositionalStrategy::from_edges(&g, Owner::Min, &[1]).unwrap();
        let run = improve(&g, &base, start, SwitchRule::Greedy, tol).unwrap();
        assert_eq!(run.switches, vec![0]);
        assert!(run.equilibrium.values[0].abs() <= 1e-9);
    }

    #[test]
    fn neighbor_compare_examples() {
        let g = two_loops(Owner::Max);
        let base = loops_base();
        let tol = Tolerances::default();
        let s1 = PositionalStrategy::from_edges(&g, Owner::Max, &[0]).unwrap();
        let s3 = PositionalStrategy::from_edges(&g, Owner::Max, &[1]).unwrap();
        assert_eq!(neighbor_compare(&g, &base, &s1, &s3, tol).unwrap(), Ordering::Less);
        assert_eq!(neighbor_compare(&g, &base, &s3, &s1, tol).unwrap(), Ordering::Greater);
        assert!(neighbor_compare(&g, &base, &s1, &s1, tol).is_err());
    }

    #[test]
    fn random_switch_single_node_bound() {
        let g = two_loops(Owner::Max);
        let base = loops_base();
        let run = random_switch_solve(&g, &base, 7, Tolerances::default()).unwrap();
        assert!(run.switches.len() <= 2);
        assert!((run.equilibrium.values[0] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn brute_force_fig2() {
        let fig = not_multi_arena();
        let base = fixtures::not_multi_base();
        let (eq, table) = brute_force_solve(&fig.graph, &base).unwrap();
        assert_eq!(table.max.len(), 8);
        assert_eq!(table.min.len(), 1);
        assert_eq!(eq.sigma, fig.go_left());
        let all: Vec<NodeId> = (0..fig.graph.node_count()).collect();
        assert_eq!(table.optimal_max_at(&all, 1e-9).len(), 1);
    }

    #[test]
    fn verify_examples() {
        let fig = not_multi_arena();
        let base = fixtures::not_multi_base();
        let tau = PositionalStrategy::first_edges(&fig.graph, Owner::Min);
        let bad = verify_equilibrium(&fig.graph, &base, &fig.go_right(), &tau, 1e-8).unwrap();
        assert!(!bad.pass);
        assert!(bad.gap >= 0.01 - 1e-9);
        let good = verify_equilibrium(&fig.graph, &base, &fig.go_left(), &tau, 1e-8).unwrap();
        assert!(good.pass);
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        let g = two_loops(Owner::Max);
        let base = fixtures::not_multi_base();
        assert!(matches!(
            solve_value_iteration(&g, &base, Tolerances::default()),
            Err(SolverError::AlphabetMismatch { .. })
        ));
    }
}
