//! Labeled game graphs, positional strategies, plays, and the arena builders
//! for the two counterexample constructions.

use std::collections::HashSet;

use thiserror::Error;

use crate::words::{Alphabet, FiniteWord, Letter, UpWord, WordError};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Max,
    Min,
}

impl Owner {
    pub fn opponent(self) -> Owner {
        match self {
            Owner::Max => Owner::Min,
            Owner::Min => Owner::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: NodeId,
    pub label: Letter,
    pub target: NodeId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("game graph has no nodes")]
    NoNodes,
    #[error("sink node {node}: every node needs an outgoing edge")]
    SinkNode { node: NodeId },
    #[error("edge {edge} has unknown label id {label}")]
    UnknownLabel { edge: EdgeId, label: usize },
    #[error("edge {edge} refers to missing node {node}")]
    BadEndpoint { edge: EdgeId, node: NodeId },
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Checks the raw parts of a game graph, reporting the first violation.
pub fn validate(alphabet: &Alphabet, owners: &[Owner], edges: &[Edge]) -> Result<(), GraphError> {
    let n = owners.len();
    if n == 0 {
        return Err(GraphError::NoNodes);
    }
    let mut has_out = vec![false; n];
    for (i, e) in edges.iter().enumerate() {
        if e.label.index() >= alphabet.size() {
            return Err(GraphError::UnknownLabel { edge: i, label: e.label.index() });
        }
        for node in [e.source, e.target] {
            if node >= n {
                return Err(GraphError::BadEndpoint { edge: i, node });
            }
        }
        has_out[e.source] = true;
    }
    match has_out.iter().position(|&b| !b) {
        Some(node) => Err(GraphError::SinkNode { node }),
        None => Ok(()),
    }
}

/// A finite arena with Max/Min node partition and letter-labeled edges.
#[derive(Debug, Clone, PartialEq)]
pub struct GameGraph {
    alphabet: Alphabet,
    owners: Vec<Owner>,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
}

impl GameGraph {
    /// Validates and builds. Parallel identical edges are kept once (first
    /// occurrence), so edge ids refer to the deduplicated list.
    pub fn new(alphabet: Alphabet, owners: Vec<Owner>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        validate(&alphabet, &owners, &edges)?;
        let mut seen = HashSet::new();
        let edges: Vec<Edge> = edges.into_iter().filter(|e| seen.insert(*e)).collect();
        let mut out = vec![Vec::new(); owners.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.source].push(i);
        }
        Ok(Self { alphabet, owners, edges, out })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn node_count(&self) -> usize {
        self.owners.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn owners(&self) -> &[Owner] {
        &self.owners
    }

    pub fn owner(&self, u: NodeId) -> Owner {
        self.owners[u]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn out_edges(&self, u: NodeId) -> &[EdgeId] {
        &self.out[u]
    }

    pub fn nodes_of(&self, owner: Owner) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).filter(move |&u| self.owners[u] == owner)
    }

    /// Number of positional strategies of `owner` (product of out-degrees),
    /// saturating at `u128::MAX`.
    pub fn strategy_count(&self, owner: Owner) -> u128 {
        self.nodes_of(owner).fold(1u128, |acc, u| acc.saturating_mul(self.out[u].len() as u128))
    }

    /// Subgraph keeping only edges selected by `mask`; every node must keep
    /// at least one outgoing edge.
    pub fn restrict(&self, mask: &[bool]) -> Result<GameGraph, GraphError> {
        let edges = self.edges.iter().zip(mask).filter(|(_, &keep)| keep).map(|(e, _)| *e).collect();
        GameGraph::new(self.alphabet.clone(), self.owners.clone(), edges)
    }
}

/// A memoryless strategy: one outgoing edge per owned node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PositionalStrategy {
    owner: Owner,
    choice: Vec<Option<EdgeId>>,
}

impl PositionalStrategy {
    /// `choice[u]` must be `Some(e)` with `source(e) = u` exactly for the
    /// nodes of `owner`, and `None` elsewhere.
    pub fn new(g: &GameGraph, owner: Owner, choice: Vec<Option<EdgeId>>) -> Result<Self, GraphError> {
        if choice.len() != g.node_count() {
            return Err(GraphError::Strategy(format!(
                "choice table has {} entries for {} nodes",
                choice.len(),
                g.node_count()
            )));
        }
        for (u, c) in choice.iter().enumerate() {
            match (g.owner(u) == owner, c) {
                (true, Some(e)) => {
                    if *e >= g.edge_count() || g.edge(*e).source != u {
                        return Err(GraphError::Strategy(format!("edge {e} does not leave node {u}")));
                    }
                }
                (true, None) => return Err(GraphError::Strategy(format!("no choice at owned node {u}"))),
                (false, Some(_)) => {
                    return Err(GraphError::Strategy(format!("choice at node {u} not owned by {owner:?}")))
                }
                (false, None) => {}
            }
        }
        Ok(Self { owner, choice })
    }

    /// The strategy picking the lowest-index edge everywhere.
    pub fn first_edges(g: &GameGraph, owner: Owner) -> Self {
        let choice = (0..g.node_count())
            .map(|u| (g.owner(u) == owner).then(|| g.out_edges(u)[0]))
            .collect();
        Self { owner, choice }
    }

    /// Builds from a list of chosen edges; owned nodes not mentioned keep
    /// their lowest-index edge.
    pub fn from_edges(g: &GameGraph, owner: Owner, edges: &[EdgeId]) -> Result<Self, GraphError> {
        let mut choice = Self::first_edges(g, owner).choice;
        for &e in edges {
            let src = g.edges().get(e).ok_or_else(|| GraphError::Strategy(format!("no edge {e}")))?.source;
            choice[src] = Some(e);
        }
        Self::new(g, owner, choice)
    }

    pub fn owner(&self) -> Owner {
        self.owner
    }

    pub fn choice(&self, u: NodeId) -> Option<EdgeId> {
        self.choice[u]
    }

    pub fn choices(&self) -> &[Option<EdgeId>] {
        &self.choice
    }

    /// Same strategy except at `source(e)`, which now takes `e`.
    pub fn switch(&self, g: &GameGraph, e: EdgeId) -> Result<Self, GraphError> {
        let edge = g.edges().get(e).ok_or_else(|| GraphError::Strategy(format!("no edge {e}")))?;
        if g.owner(edge.source) != self.owner {
            return Err(GraphError::Strategy(format!(
                "edge {e} leaves node {} which {:?} does not own",
                edge.source, self.owner
            )));
        }
        let mut choice = self.choice.clone();
        choice[edge.source] = Some(e);
        Ok(Self { owner: self.owner, choice })
    }

    /// Owned nodes where the two strategies choose differently.
    pub fn differing_nodes(&self, other: &PositionalStrategy) -> Vec<NodeId> {
        (0..self.choice.len()).filter(|&u| self.choice[u] != other.choice[u]).collect()
    }

    /// Every positional strategy of `owner`, in mixed-radix order with the
    /// lowest owned node varying fastest.
    pub fn enumerate(g: &GameGraph, owner: Owner) -> StrategyIter<'_> {
        let nodes: Vec<NodeId> = g.nodes_of(owner).collect();
        StrategyIter { g, owner, digits: vec![0; nodes.len()], nodes, done: false }
    }
}

pub struct StrategyIter<'a> {
    g: &'a GameGraph,
    owner: Owner,
    nodes: Vec<NodeId>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for StrategyIter<'_> {
    type Item = PositionalStrategy;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut choice = vec![None; self.g.node_count()];
        for (&u, &d) in self.nodes.iter().zip(&self.digits) {
            choice[u] = Some(self.g.out_edges(u)[d]);
        }
        let item = PositionalStrategy { owner: self.owner, choice };
        self.done = true;
        for (i, &u) in self.nodes.iter().enumerate() {
            self.digits[i] += 1;
            if self.digits[i] < self.g.out_edges(u).len() {
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(item)
    }
}

/// Edges consistent with a strategy: all edges leaving opponent nodes plus
/// the chosen edge at each owned node.
pub fn consistent_mask(g: &GameGraph, s: &PositionalStrategy) -> Vec<bool> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| g.owner(e.source) != s.owner() || s.choice(e.source) == Some(i))
        .collect()
}

/// [`consistent_mask`] as a sorted list of edge ids.
pub fn consistent_edges(g: &GameGraph, s: &PositionalStrategy) -> Vec<EdgeId> {
    consistent_mask(g, s).iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// A play of two positional strategies: a stem followed by a repeated cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<EdgeId>,
    pub cycle: Vec<EdgeId>,
}

impl Lasso {
    pub fn start(&self, g: &GameGraph) -> NodeId {
        let first = self.stem.first().or(self.cycle.first()).expect("cycle is non-empty");
        g.edge(*first).source
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.stem.iter().chain(&self.cycle).copied()
    }

    pub fn label_word(&self, g: &GameGraph) -> UpWord {
        let lab = |es: &[EdgeId]| FiniteWord(es.iter().map(|&e| g.edge(e).label).collect());
        UpWord::new(lab(&self.stem), lab(&self.cycle)).expect("lasso cycle is non-empty")
    }
}

/// The unique play of `sigma` (Max) and `tau` (Min) from `s`.
pub fn play(g: &GameGraph, sigma: &PositionalStrategy, tau: &PositionalStrategy, s: NodeId) -> Lasso {
    debug_assert_eq!(sigma.owner(), Owner::Max);
    debug_assert_eq!(tau.owner(), Owner::Min);
    let mut seen_at = vec![usize::MAX; g.node_count()];
    let mut path = Vec::new();
    let mut u = s;
    while seen_at[u] == usize::MAX {
        seen_at[u] = path.len();
        let e = match g.owner(u) {
            Owner::Max => sigma.choice(u),
            Owner::Min => tau.choice(u),
        }
        .expect("strategies are total on owned nodes");
        path.push(e);
        u = g.edge(e).target;
    }
    let cycle = path.split_off(seen_at[u]);
    Lasso { stem: path, cycle }
}

struct ArenaBuilder {
    owners: Vec<Owner>,
    edges: Vec<Edge>,
}

impl ArenaBuilder {
    fn new() -> Self {
        Self { owners: Vec::new(), edges: Vec::new() }
    }

    fn node(&mut self) -> NodeId {
        self.owners.push(Owner::Max);
        self.owners.len() - 1
    }

    fn edge(&mut self, source: NodeId, label: Letter, target: NodeId) -> EdgeId {
        self.edges.push(Edge { source, label, target });
        self.edges.len() - 1
    }

    /// Fresh-node path from `from` to `to` spelling `w` (non-empty).
    fn path(&mut self, from: NodeId, w: &[Letter], to: NodeId) {
        let mut cur = from;
        for (i, &a) in w.iter().enumerate() {
            let next = if i + 1 == w.len() { to } else { self.node() };
            self.edge(cur, a, next);
            cur = next;
        }
    }

    /// A lasso leaving `from` whose label is `word`; the cycle uses only
    /// fresh nodes. Returns the first edge.
    fn lasso(&mut self, from: NodeId, word: &UpWord) -> EdgeId {
        let (stem, cycle) = stem_and_cycle(word);
        let first = self.edges.len();
        let entry = self.node();
        self.path(from, &stem, entry);
        if cycle.len() == 1 {
            self.edge(entry, cycle[0], entry);
        } else {
            self.path(entry, &cycle, entry);
        }
        first
    }

    fn build(self, alphabet: &Alphabet) -> Result<GameGraph, GraphError> {
        GameGraph::new(alphabet.clone(), self.owners, self.edges)
    }
}

/// `p·q^ω` with a non-empty stem: an empty stem is replaced by the first
/// cycle letter and the cycle rotated, so the cycle never returns to the
/// lasso's start node.
fn stem_and_cycle(word: &UpWord) -> (Vec<Letter>, Vec<Letter>) {
    let mut stem = word.prefix().letters().to_vec();
    let mut cycle = word.cycle().letters().to_vec();
    if stem.is_empty() {
        stem.push(cycle[0]);
        cycle.rotate_left(1);
    }
    (stem, cycle)
}

/// The not-positionally-determined arena for a prefix-monotonicity
/// violation `φ(uα) > φ(uβ)`, `φ(vα) < φ(vβ)` with `α = p(q)^ω`,
/// `β = w(r)^ω`.
#[derive(Debug, Clone)]
pub struct Fig1Game {
    pub graph: GameGraph,
    /// Entry node reading `u` before `c` (equal to `c` when `u` is empty).
    pub a: NodeId,
    /// Entry node reading `v` before `c` (equal to `c` when `v` is empty).
    pub b: NodeId,
    /// The only node with a choice.
    pub c: NodeId,
    /// Edge out of `c` starting the `α` lasso.
    pub alpha_edge: EdgeId,
    /// Edge out of `c` starting the `β` lasso.
    pub beta_edge: EdgeId,
}

/// Builds the Max-only arena: `a --u--> c`, `b --v--> c`, and from `c` a
/// lasso labeled `p(q)^ω` and another labeled `w(r)^ω`. Exactly two
/// positional Max strategies exist.
pub fn build_fig1_game(
    alphabet: &Alphabet,
    u: &FiniteWord,
    v: &FiniteWord,
    p: &FiniteWord,
    q: &FiniteWord,
    w: &FiniteWord,
    r: &FiniteWord,
) -> Result<Fig1Game, GraphError> {
    for word in [u, v, p, q, w, r] {
        word.check(alphabet)?;
    }
    let alpha = UpWord::new(p.clone(), q.clone())?;
    let beta = UpWord::new(w.clone(), r.clone())?;
    let mut b = ArenaBuilder::new();
    let a_node = (!u.is_empty()).then(|| b.node());
    let b_node = (!v.is_empty()).then(|| b.node());
    let c = b.node();
    let alpha_edge = b.lasso(c, &alpha);
    let beta_edge = b.lasso(c, &beta);
    if let Some(a_node) = a_node {
        b.path(a_node, u.letters(), c);
    }
    if let Some(b_node) = b_node {
        b.path(b_node, v.letters(), c);
    }
    Ok(Fig1Game {
        graph: b.build(alphabet)?,
        a: a_node.unwrap_or(c),
        b: b_node.unwrap_or(c),
        c,
        alpha_edge,
        beta_edge,
    })
}

/// Three nodes `v_i`, each with a left lasso labeled `α_i` and a right
/// lasso labeled `β_i`. All nodes belong to Max.
#[derive(Debug, Clone)]
pub struct Fig2Game {
    pub graph: GameGraph,
    pub v: [NodeId; 3],
    pub left: [EdgeId; 3],
    pub right: [EdgeId; 3],
}

impl Fig2Game {
    /// Go left at every `v_i`.
    pub fn go_left(&self) -> PositionalStrategy {
        self.choose([false; 3])
    }

    /// Go right at every `v_i`.
    pub fn go_right(&self) -> PositionalStrategy {
        self.choose([true; 3])
    }

    /// `right[i]` selects the right lasso at `v_i`.
    pub fn choose(&self, right: [bool; 3]) -> PositionalStrategy {
        let mut s = PositionalStrategy::first_edges(&self.graph, Owner::Max);
        for (i, &r) in right.iter().enumerate() {
            let e = if r { self.right[i] } else { self.left[i] };
            s = s.switch(&self.graph, e).expect("lasso edges leave Max nodes");
        }
        s
    }
}

pub fn build_fig2_game(alphabet: &Alphabet, pairs: &[(UpWord, UpWord); 3]) -> Result<Fig2Game, GraphError> {
    for (x, y) in pairs {
        x.check(alphabet)?;
        y.check(alphabet)?;
    }
    let mut b = ArenaBuilder::new();
    let v = [b.node(), b.node(), b.node()];
    let mut left = [0; 3];
    let mut right = [0; 3];
    for i in 0..3 {
        left[i] = b.lasso(v[i], &pairs[i].0);
        right[i] = b.lasso(v[i], &pairs[i].1);
    }
    Ok(Fig2Game { graph: b.build(alphabet)?, v, left, right })
}

/// The counterexample arena over `{1, 2, 3}` with pairs
/// `(1(3), 2(3))`, `(22(3), 11(3))`, `(111(3), 222(3))`.
pub fn not_multi_arena() -> Fig2Game {
    let a = Alphabet::numbered(3);
    let p = |s: &str| a.parse_up(s).expect("fixture word");
    let pairs = [(p("1(3)"), p("2(3)")), (p("22(3)"), p("11(3)")), (p("111(3)"), p("222(3)"))];
    build_fig2_game(&a, &pairs).expect("fixture arena")
}
