//! JSON formats for games, payoffs, solver results and checker reports.
//!
//! Label-keyed maps keep file order, so parsing then serializing a file
//! written by [`to_json`] reproduces it byte for byte.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Witness;
use crate::graph::{Edge, GameGraph, GraphError, Owner};
use crate::payoff::{ContractingBase, MultiDiscountedSpec, Payoff, PayoffError, PiecewiseLinearMap};
use crate::solver::Equilibrium;
use crate::words::{Alphabet, WordError};

#[derive(Debug, Error)]
pub enum FormatError {
    // Not a `#[source]`: the message already carries the parser's detail.
    #[error("malformed JSON: {0}")]
    Json(serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error(transparent)]
    Word(#[from] WordError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

/// Serializes with the crate's canonical layout (compact, or two-space
/// indentation when `pretty`).
pub fn to_json<T: Serialize>(value: &T, pretty: bool) -> String {
    let out = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) };
    out.expect("format types serialize infallibly")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OwnerName {
    Max,
    Min,
}

impl From<Owner> for OwnerName {
    fn from(o: Owner) -> Self {
        match o {
            Owner::Max => OwnerName::Max,
            Owner::Min => OwnerName::Min,
        }
    }
}

impl From<OwnerName> for Owner {
    fn from(o: OwnerName) -> Self {
        match o {
            OwnerName::Max => Owner::Max,
            OwnerName::Min => Owner::Min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeFile {
    pub id: usize,
    pub owner: OwnerName,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub src: usize,
    pub label: String,
    pub dst: usize,
}

/// `{"labels":[...],"nodes":[{"id":0,"owner":"max"}],"edges":[{"src":0,"label":"3","dst":1}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub labels: Vec<String>,
    pub nodes: Vec<NodeFile>,
    pub edges: Vec<EdgeFile>,
}

impl GameFile {
    pub fn from_graph(g: &GameGraph) -> Self {
        let a = g.alphabet();
        GameFile {
            labels: a.names().to_vec(),
            nodes: g.owners().iter().enumerate().map(|(id, &o)| NodeFile { id, owner: o.into() }).collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeFile { src: e.source, label: a.name(e.label).to_string(), dst: e.target })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<GameGraph, FormatError> {
        let alphabet = Alphabet::new(self.labels.iter().cloned())?;
        let mut owners = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(FormatError::Invalid(format!("node at position {i} has id {}", n.id)));
            }
            owners.push(n.owner.into());
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let label = alphabet
                    .letter(&e.label)
                    .ok_or_else(|| FormatError::Word(WordError::UnknownLabel(e.label.clone())))?;
                Ok(Edge { source: e.src, label, target: e.dst })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(GameGraph::new(alphabet, owners, edges)?)
    }
}

pub fn parse_game(json: &str) -> Result<GameGraph, FormatError> {
    serde_json::from_str::<GameFile>(json)?.to_graph()
}

pub fn game_to_json(g: &GameGraph, pretty: bool) -> String {
    to_json(&GameFile::from_graph(g), pretty)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub breakpoints: Vec<[f64; 2]>,
}

impl MapFile {
    fn from_map(f: &PiecewiseLinearMap) -> Self {
        MapFile { breakpoints: f.points().iter().map(|&(x, y)| [x, y]).collect() }
    }

    fn to_map(&self) -> Result<PiecewiseLinearMap, FormatError> {
        Ok(PiecewiseLinearMap::new(self.breakpoints.iter().map(|p| (p[0], p[1])).collect())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PayoffFile {
    ContractingBase {
        domain: [f64; 2],
        functions: IndexMap<String, MapFile>,
        #[serde(default)]
        post_map: Option<MapFile>,
    },
    MultiDiscounted {
        lambda: IndexMap<String, f64>,
        w: IndexMap<String, f64>,
    },
}

/// A payoff read from a file.
#[derive(Debug, Clone)]
pub enum LoadedPayoff {
    Base(ContractingBase),
    MultiDiscounted(MultiDiscountedSpec),
}

impl LoadedPayoff {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            LoadedPayoff::Base(b) => b.alphabet(),
            LoadedPayoff::MultiDiscounted(s) => s.alphabet(),
        }
    }

    /// The contracting base used by the solvers (affine for multi-discounted).
    pub fn to_base(&self) -> ContractingBase {
        match self {
            LoadedPayoff::Base(b) => b.clone(),
            LoadedPayoff::MultiDiscounted(s) => s.to_base(),
        }
    }

    pub fn as_payoff(&self) -> &dyn Payoff {
        match self {
            LoadedPayoff::Base(b) => b,
            LoadedPayoff::MultiDiscounted(s) => s,
        }
    }
}

impl PayoffFile {
    pub fn from_base(b: &ContractingBase) -> Self {
        let a = b.alphabet();
        PayoffFile::ContractingBase {
            domain: [b.lo(), b.hi()],
            functions: a.names().iter().cloned().zip(b.maps().iter().map(MapFile::from_map)).collect(),
            post_map: b.post_map().map(MapFile::from_map),
        }
    }

    pub fn from_multi_discounted(s: &MultiDiscountedSpec) -> Self {
        let names = s.alphabet().names();
        PayoffFile::MultiDiscounted {
            lambda: names.iter().cloned().zip(s.lambda().iter().copied()).collect(),
            w: names.iter().cloned().zip(s.rewards().iter().copied()).collect(),
        }
    }

    pub fn load(&self) -> Result<LoadedPayoff, FormatError> {
        match self {
            PayoffFile::ContractingBase { domain, functions, post_map } => {
                let alphabet = Alphabet::new(functions.keys().cloned())?;
                let maps = functions
                    .iter()
                    .map(|(label, f)| {
                        let map = f.to_map()?;
                        if map.lo() != domain[0] || map.hi() != domain[1] {
                            return Err(FormatError::Invalid(format!(
                                "function `{label}` spans [{}, {}], domain is [{}, {}]",
                                map.lo(),
                                map.hi(),
                                domain[0],
                                domain[1]
                            )));
                        }
                        Ok(map)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let post = post_map.as_ref().map(MapFile::to_map).transpose()?;
                Ok(LoadedPayoff::Base(ContractingBase::new(alphabet, maps, post)?))
            }
            PayoffFile::MultiDiscounted { lambda, w } => {
                if !lambda.keys().eq(w.keys()) {
                    return Err(FormatError::Invalid("`lambda` and `w` must list the same labels in order".into()));
                }
                let alphabet = Alphabet::new(lambda.keys().cloned())?;
                let spec =
                    MultiDiscountedSpec::new(alphabet, lambda.values().copied().collect(), w.values().copied().collect())?;
                Ok(LoadedPayoff::MultiDiscounted(spec))
            }
        }
    }
}

pub fn parse_payoff(json: &str) -> Result<LoadedPayoff, FormatError> {
    serde_json::from_str::<PayoffFile>(json)?.load()
}

pub fn base_to_json(b: &ContractingBase, pretty: bool) -> String {
    to_json(&PayoffFile::from_base(b), pretty)
}

pub fn multi_discounted_to_json(s: &MultiDiscountedSpec, pretty: bool) -> String {
    to_json(&PayoffFile::from_multi_discounted(s), pretty)
}

/// `{"values":{"<node>":v},"sigma":{"<node>":edge},"tau":{...},"method":..,"iterations":n,"residual":r}`
/// with values on the post-mapped scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub values: IndexMap<String, f64>,
    pub sigma: IndexMap<String, usize>,
    pub tau: IndexMap<String, usize>,
    pub method: String,
    pub iterations: usize,
    pub residual: f64,
}

impl SolveReport {
    pub fn new(eq: &Equilibrium, base: &ContractingBase) -> Self {
        let choices = |s: &crate::graph::PositionalStrategy| {
            s.choices().iter().enumerate().filter_map(|(u, c)| c.map(|e| (u.to_string(), e))).collect()
        };
        SolveReport {
            values: eq.values.reported(base).into_iter().enumerate().map(|(u, v)| (u.to_string(), v)).collect(),
            sigma: choices(&eq.sigma),
            tau: choices(&eq.tau),
            method: eq.method.as_str().to_string(),
            iterations: eq.iterations,
            residual: eq.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub kind: String,
    pub words: Vec<String>,
    pub values: Vec<f64>,
    pub margin: f64,
}

impl WitnessReport {
    pub fn new(w: &Witness, alphabet: &Alphabet) -> Self {
        WitnessReport {
            kind: w.kind.as_str().to_string(),
            words: w.words.iter().map(|x| x.format(alphabet)).collect(),
            values: w.values.clone(),
            margin: w.margin,
        }
    }
}

/// `{"check":..,"result":..,"witness":{..}|null,"sample":{..},"tolerances":{..}}`,
/// plus optional check-specific details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub result: String,
    pub witness: Option<WitnessReport>,
    pub sample: serde_json::Value,
    pub tolerances: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub details: Option<serde_json::Value>,
}
