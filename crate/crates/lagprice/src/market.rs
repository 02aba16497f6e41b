//! Scenario-tree market model.
//!
//! A market is a rooted tree whose time-`t` vertices are the atoms of the
//! time-`t` information partition. Each vertex carries the price vector of
//! the `N+1` assets on its block, with asset `0` the numeraire (so its
//! price is pinned to `1` everywhere). Terminal vertices are the world
//! scenarios and carry the reference probabilities.
//!
//! [`DelayedView`] is the tree of the lagged filtration: the trader at
//! time `t` (for `1 <= t <= T-1`) only knows the time-`t-1` partition, and
//! at time `T` everything is revealed. Each delayed vertex points back at
//! the market vertex carrying the same information block.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{format_scalar, parse_scalar, Rational, ScalarParseError};

/// Opaque vertex identifier, unique within a tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Self {
        VertexId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("market file parse error: {0}")]
    Parse(String),
    #[error("scalar parse error at {context}: {source}")]
    Scalar {
        context: String,
        source: ScalarParseError,
    },
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(VertexId),
    #[error("unknown parent `{parent}` for vertex `{vertex}`")]
    UnknownParent { vertex: VertexId, parent: VertexId },
    #[error("market must have at least two assets (numeraire plus one risky)")]
    TooFewAssets,
    #[error("horizon must be at least 2, got {0}")]
    HorizonTooSmall(usize),
    #[error("expected exactly one vertex at time 0, found {0}")]
    RootCount(usize),
    #[error("vertex `{0}`: root must not have a parent")]
    RootHasParent(VertexId),
    #[error("vertex `{0}`: non-root vertex must have a parent")]
    MissingParent(VertexId),
    #[error("vertex `{vertex}` at time {time} has parent `{parent}` at time {parent_time}")]
    ParentTimeMismatch {
        vertex: VertexId,
        time: usize,
        parent: VertexId,
        parent_time: usize,
    },
    #[error("vertex `{vertex}` time {time} exceeds horizon {horizon}")]
    TimeBeyondHorizon {
        vertex: VertexId,
        time: usize,
        horizon: usize,
    },
    #[error("no vertices at time {0}")]
    EmptyLevel(usize),
    #[error("non-terminal vertex `{0}` has no children")]
    ChildlessInterior(VertexId),
    #[error("vertex `{vertex}`: numeraire price must be 1, got {price}")]
    NumerairePrice { vertex: VertexId, price: String },
    #[error("vertex `{vertex}`: expected {expected} prices, got {found}")]
    PriceArity {
        vertex: VertexId,
        expected: usize,
        found: usize,
    },
    #[error("terminal probability for `{0}` must be positive")]
    NonPositiveProbability(VertexId),
    #[error("probability given for `{0}`, which is not a terminal vertex")]
    ProbabilityOnNonTerminal(VertexId),
    #[error("missing terminal probability for `{0}`")]
    MissingProbability(VertexId),
    #[error("terminal probabilities sum to {0}, expected 1")]
    ProbabilitySum(String),
    #[error("claim value for `{0}` must be non-negative")]
    NegativeClaim(VertexId),
    #[error("claim names `{0}`, which is not a terminal vertex")]
    ClaimOnNonTerminal(VertexId),
    #[error("claim missing a value for terminal vertex `{0}`")]
    MissingClaimValue(VertexId),
}

/// One node of the market tree.
#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: VertexId,
    pub time: usize,
    pub parent: Option<usize>,
    pub prices: Vec<Rational>,
}

/// A finite-scenario discrete-time market on a scenario tree.
///
/// Immutable after construction; all structural invariants are checked in
/// [`Market::new`].
#[derive(Debug, Clone)]
pub struct Market {
    assets: Vec<String>,
    horizon: usize,
    vertices: Vec<Vertex>,
    children: Vec<Vec<usize>>,
    levels: Vec<Vec<usize>>,
    index_of: HashMap<VertexId, usize>,
    terminal_probs: BTreeMap<VertexId, Rational>,
}

impl Market {
    /// Validates and assembles a market from raw parts.
    pub fn new(
        assets: Vec<String>,
        horizon: usize,
        vertices: Vec<Vertex>,
        terminal_probs: BTreeMap<VertexId, Rational>,
    ) -> Result<Self, MarketError> {
        if assets.len() < 2 {
            return Err(MarketError::TooFewAssets);
        }
        if horizon < 2 {
            return Err(MarketError::HorizonTooSmall(horizon));
        }

        let mut index_of = HashMap::with_capacity(vertices.len());
        for (idx, v) in vertices.iter().enumerate() {
            if index_of.insert(v.id.clone(), idx).is_some() {
                return Err(MarketError::DuplicateVertex(v.id.clone()));
            }
        }

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        let mut levels: Vec<Vec<usize>> = vec![Vec::new(); horizon + 1];
        for (idx, v) in vertices.iter().enumerate() {
            if v.time > horizon {
                return Err(MarketError::TimeBeyondHorizon {
                    vertex: v.id.clone(),
                    time: v.time,
                    horizon,
                });
            }
            levels[v.time].push(idx);
            match v.parent {
                None => {
                    if v.time != 0 {
                        return Err(MarketError::MissingParent(v.id.clone()));
                    }
                }
                Some(p) => {
                    if v.time == 0 {
                        return Err(MarketError::RootHasParent(v.id.clone()));
                    }
                    let pv = &vertices[p];
                    if pv.time + 1 != v.time {
                        return Err(MarketError::ParentTimeMismatch {
                            vertex: v.id.clone(),
                            time: v.time,
                            parent: pv.id.clone(),
                            parent_time: pv.time,
                        });
                    }
                    children[p].push(idx);
                }
            }
        }

        if levels[0].len() != 1 {
            return Err(MarketError::RootCount(levels[0].len()));
        }
        for (t, level) in levels.iter().enumerate() {
            if level.is_empty() {
                return Err(MarketError::EmptyLevel(t));
            }
        }
        for (idx, v) in vertices.iter().enumerate() {
            if v.time < horizon && children[idx].is_empty() {
                return Err(MarketError::ChildlessInterior(v.id.clone()));
            }
            if v.prices.len() != assets.len() {
                return Err(MarketError::PriceArity {
                    vertex: v.id.clone(),
                    expected: assets.len(),
                    found: v.prices.len(),
                });
            }
            if !v.prices[0].is_one() {
                return Err(MarketError::NumerairePrice {
                    vertex: v.id.clone(),
                    price: format_scalar(&v.prices[0]),
                });
            }
        }

        let mut prob_sum = Rational::zero();
        for (id, p) in &terminal_probs {
            let idx = index_of
                .get(id)
                .copied()
                .ok_or_else(|| MarketError::ProbabilityOnNonTerminal(id.clone()))?;
            if vertices[idx].time != horizon {
                return Err(MarketError::ProbabilityOnNonTerminal(id.clone()));
            }
            if !p.is_positive() {
                return Err(MarketError::NonPositiveProbability(id.clone()));
            }
            prob_sum += p;
        }
        for &idx in &levels[horizon] {
            if !terminal_probs.contains_key(&vertices[idx].id) {
                return Err(MarketError::MissingProbability(vertices[idx].id.clone()));
            }
        }
        if !prob_sum.is_one() {
            return Err(MarketError::ProbabilitySum(format_scalar(&prob_sum)));
        }

        Ok(Market {
            assets,
            horizon,
            vertices,
            children,
            levels,
            index_of,
            terminal_probs,
        })
    }

    /// Number of assets including the numeraire.
    pub fn asset_count(&self) -> usize {
        self.assets.len()
    }

    pub fn asset_names(&self) -> &[String] {
        &self.assets
    }

    /// Trading horizon `T`.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn scenario_count(&self) -> usize {
        self.levels[self.horizon].len()
    }

    pub fn vertex(&self, idx: usize) -> &Vertex {
        &self.vertices[idx]
    }

    pub fn root(&self) -> usize {
        self.levels[0][0]
    }

    pub fn index_of(&self, id: &VertexId) -> Option<usize> {
        self.index_of.get(id).copied()
    }

    /// Vertex indices at time `t`, in document order.
    pub fn level(&self, t: usize) -> &[usize] {
        &self.levels[t]
    }

    pub fn children(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub fn parent(&self, idx: usize) -> Option<usize> {
        self.vertices[idx].parent
    }

    pub fn prices(&self, idx: usize) -> &[Rational] {
        &self.vertices[idx].prices
    }

    pub fn is_terminal(&self, idx: usize) -> bool {
        self.vertices[idx].time == self.horizon
    }

    /// Terminal vertex indices (the world scenarios).
    pub fn terminals(&self) -> &[usize] {
        &self.levels[self.horizon]
    }

    pub fn terminal_prob(&self, id: &VertexId) -> Option<&Rational> {
        self.terminal_probs.get(id)
    }

    pub fn terminal_probs(&self) -> &BTreeMap<VertexId, Rational> {
        &self.terminal_probs
    }

    /// Descendants of `idx` living at time `t` (which must be at or after
    /// the vertex's own time).
    pub fn descendants_at(&self, idx: usize, t: usize) -> Vec<usize> {
        let mut frontier = vec![idx];
        let mut time = self.vertices[idx].time;
        while time < t {
            frontier = frontier
                .into_iter()
                .flat_map(|v| self.children[v].iter().copied())
                .collect();
            time += 1;
        }
        frontier
    }

    /// Terminal descendants of `idx`.
    pub fn terminal_descendants(&self, idx: usize) -> Vec<usize> {
        self.descendants_at(idx, self.horizon)
    }

    /// Probability of reaching each vertex, computed backwards from the
    /// terminal probabilities by summing over children.
    pub fn vertex_probabilities(&self) -> BTreeMap<VertexId, Rational> {
        let mut probs: Vec<Rational> = vec![Rational::zero(); self.vertices.len()];
        for &idx in self.terminals() {
            probs[idx] = self.terminal_probs[&self.vertices[idx].id].clone();
        }
        for t in (0..self.horizon).rev() {
            for &idx in self.level(t) {
                probs[idx] = self.children[idx]
                    .iter()
                    .map(|&c| probs[c].clone())
                    .sum();
            }
        }
        self.vertices
            .iter()
            .enumerate()
            .map(|(idx, v)| (v.id.clone(), probs[idx].clone()))
            .collect()
    }

    /// Serializes the market back into the external document format.
    pub fn to_document(&self) -> MarketDocument {
        MarketDocument {
            assets: self.assets.clone(),
            horizon: self.horizon,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexRecord {
                    id: v.id.clone(),
                    time: v.time,
                    parent: v.parent.map(|p| self.vertices[p].id.clone()),
                    prices: v.prices.iter().map(format_scalar).collect(),
                })
                .collect(),
            probs: self
                .terminal_probs
                .iter()
                .map(|(id, p)| (id.clone(), format_scalar(p)))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("market serialization")
    }
}

/// External market file shape. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketDocument {
    pub assets: Vec<String>,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub vertices: Vec<VertexRecord>,
    pub probs: BTreeMap<VertexId, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: VertexId,
    pub time: usize,
    pub parent: Option<VertexId>,
    pub prices: Vec<String>,
}

/// Parses and validates a market document.
pub fn load_market(document: &str) -> Result<Market, MarketError> {
    let doc: MarketDocument =
        serde_json::from_str(document).map_err(|e| MarketError::Parse(e.to_string()))?;
    market_from_document(doc)
}

pub fn market_from_document(doc: MarketDocument) -> Result<Market, MarketError> {
    let mut index_of: HashMap<VertexId, usize> = HashMap::new();
    for (idx, rec) in doc.vertices.iter().enumerate() {
        if index_of.insert(rec.id.clone(), idx).is_some() {
            return Err(MarketError::DuplicateVertex(rec.id.clone()));
        }
    }
    let mut vertices = Vec::with_capacity(doc.vertices.len());
    for rec in &doc.vertices {
        let parent = match &rec.parent {
            None => None,
            Some(pid) => Some(*index_of.get(pid).ok_or_else(|| {
                MarketError::UnknownParent {
                    vertex: rec.id.clone(),
                    parent: pid.clone(),
                }
            })?),
        };
        let prices = rec
            .prices
            .iter()
            .enumerate()
            .map(|(n, s)| {
                parse_scalar(s).map_err(|source| MarketError::Scalar {
                    context: format!("price {n} of vertex `{}`", rec.id),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        vertices.push(Vertex {
            id: rec.id.clone(),
            time: rec.time,
            parent,
            prices,
        });
    }
    let mut probs = BTreeMap::new();
    for (id, s) in &doc.probs {
        let p = parse_scalar(s).map_err(|source| MarketError::Scalar {
            context: format!("probability of `{id}`"),
            source,
        })?;
        probs.insert(id.clone(), p);
    }
    Market::new(doc.assets, doc.horizon, vertices, probs)
}

/// One node of the delayed-information tree.
#[derive(Debug, Clone)]
pub struct GVertex {
    pub id: VertexId,
    pub time: usize,
    pub parent: Option<usize>,
    /// Market vertex carrying the same information block.
    pub f_ref: usize,
}

/// The delayed filtration's scenario tree.
///
/// Vertices at time `t` for `1 <= t <= T-1` are in bijection with market
/// vertices at `t-1`; vertices at time `T` are in bijection with the
/// scenarios. Price lookups resolve through `f_ref`.
#[derive(Debug, Clone)]
pub struct DelayedView {
    g_vertices: Vec<GVertex>,
    children: Vec<Vec<usize>>,
    levels: Vec<Vec<usize>>,
    index_of: HashMap<VertexId, usize>,
}

impl DelayedView {
    pub fn vertex(&self, idx: usize) -> &GVertex {
        &self.g_vertices[idx]
    }

    pub fn vertex_count(&self) -> usize {
        self.g_vertices.len()
    }

    pub fn root(&self) -> usize {
        self.levels[0][0]
    }

    pub fn level(&self, t: usize) -> &[usize] {
        &self.levels[t]
    }

    pub fn children(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub fn parent(&self, idx: usize) -> Option<usize> {
        self.g_vertices[idx].parent
    }

    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn index_of(&self, id: &VertexId) -> Option<usize> {
        self.index_of.get(id).copied()
    }

    /// Prices seen at a delayed vertex: those of its referenced market
    /// vertex.
    pub fn prices<'m>(&self, market: &'m Market, idx: usize) -> &'m [Rational] {
        market.prices(self.g_vertices[idx].f_ref)
    }

    /// Terminal descendants in the delayed tree.
    pub fn terminal_descendants(&self, idx: usize) -> Vec<usize> {
        let horizon = self.horizon();
        let mut frontier = vec![idx];
        let mut time = self.g_vertices[idx].time;
        while time < horizon {
            frontier = frontier
                .into_iter()
                .flat_map(|v| self.children[v].iter().copied())
                .collect();
            time += 1;
        }
        frontier
    }
}

/// Derives the delayed-information tree for a market.
///
/// Between times `T-1` and `T` the delayed tree branches across two market
/// levels: a delayed vertex at `T-1` refers to a market vertex at `T-2`,
/// and its children are that vertex's grandchildren.
pub fn derive_delayed_view(market: &Market) -> DelayedView {
    let horizon = market.horizon();
    let mut g_vertices: Vec<GVertex> = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); horizon + 1];
    // Maps (g_time, f_ref) to the delayed vertex index, used to wire up
    // parents level by level.
    let mut by_ref: HashMap<(usize, usize), usize> = HashMap::new();

    let push = |g_vertices: &mut Vec<GVertex>,
                    children: &mut Vec<Vec<usize>>,
                    levels: &mut Vec<Vec<usize>>,
                    by_ref: &mut HashMap<(usize, usize), usize>,
                    time: usize,
                    parent: Option<usize>,
                    f_ref: usize,
                    id: VertexId| {
        let idx = g_vertices.len();
        g_vertices.push(GVertex {
            id,
            time,
            parent,
            f_ref,
        });
        children.push(Vec::new());
        if let Some(p) = parent {
            children[p].push(idx);
        }
        levels[time].push(idx);
        by_ref.insert((time, f_ref), idx);
        idx
    };

    let f_root = market.root();
    push(
        &mut g_vertices,
        &mut children,
        &mut levels,
        &mut by_ref,
        0,
        None,
        f_root,
        gid(0, market, f_root),
    );

    // Times 1..=T-1: one delayed vertex per market vertex at t-1; its
    // parent is the delayed vertex referring to that vertex's parent (the
    // root for t = 1).
    for t in 1..horizon {
        for &f_idx in market.level(t - 1) {
            let parent = if t == 1 {
                Some(by_ref[&(0, f_root)])
            } else {
                let f_parent = market.parent(f_idx).expect("non-root has parent");
                Some(by_ref[&(t - 1, f_parent)])
            };
            push(
                &mut g_vertices,
                &mut children,
                &mut levels,
                &mut by_ref,
                t,
                parent,
                f_idx,
                gid(t, market, f_idx),
            );
        }
    }

    // Time T: one delayed vertex per scenario; its parent is the delayed
    // vertex at T-1 referring to the scenario's market grandparent.
    for &f_idx in market.terminals() {
        let f_grandparent = market
            .parent(f_idx)
            .and_then(|p| market.parent(p))
            .expect("horizon >= 2 guarantees a grandparent");
        let parent = Some(by_ref[&(horizon - 1, f_grandparent)]);
        push(
            &mut g_vertices,
            &mut children,
            &mut levels,
            &mut by_ref,
            horizon,
            parent,
            f_idx,
            gid(horizon, market, f_idx),
        );
    }

    let index_of = g_vertices
        .iter()
        .enumerate()
        .map(|(idx, v)| (v.id.clone(), idx))
        .collect();

    DelayedView {
        g_vertices,
        children,
        levels,
        index_of,
    }
}

fn gid(time: usize, market: &Market, f_idx: usize) -> VertexId {
    VertexId::new(format!("g{time}:{}", market.vertex(f_idx).id))
}

/// A contingent claim: one non-negative payoff per scenario.
#[derive(Debug, Clone)]
pub struct Claim {
    values: BTreeMap<VertexId, Rational>,
}

impl Claim {
    /// Validates a claim against a market: every terminal vertex must be
    /// covered and all values must be non-negative.
    pub fn new(
        market: &Market,
        values: BTreeMap<VertexId, Rational>,
    ) -> Result<Self, MarketError> {
        for (id, value) in &values {
            match market.index_of(id) {
                Some(idx) if market.is_terminal(idx) => {}
                _ => return Err(MarketError::ClaimOnNonTerminal(id.clone())),
            }
            if value.is_negative() {
                return Err(MarketError::NegativeClaim(id.clone()));
            }
        }
        for &idx in market.terminals() {
            if !values.contains_key(&market.vertex(idx).id) {
                return Err(MarketError::MissingClaimValue(market.vertex(idx).id.clone()));
            }
        }
        Ok(Claim { values })
    }

    /// Constant claim `B = c` on every scenario.
    pub fn constant(market: &Market, value: Rational) -> Result<Self, MarketError> {
        let values = market
            .terminals()
            .iter()
            .map(|&idx| (market.vertex(idx).id.clone(), value.clone()))
            .collect();
        Claim::new(market, values)
    }

    pub fn value(&self, id: &VertexId) -> &Rational {
        &self.values[id]
    }

    pub fn values(&self) -> &BTreeMap<VertexId, Rational> {
        &self.values
    }

    pub fn to_json(&self) -> String {
        let doc = ClaimDocument {
            claim: self
                .values
                .iter()
                .map(|(id, v)| (id.clone(), format_scalar(v)))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("claim serialization")
    }
}

/// External claim file shape. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimDocument {
    pub claim: BTreeMap<VertexId, String>,
}

/// Parses and validates a claim document against a market.
pub fn load_claim(market: &Market, document: &str) -> Result<Claim, MarketError> {
    let doc: ClaimDocument =
        serde_json::from_str(document).map_err(|e| MarketError::Parse(e.to_string()))?;
    let mut values = BTreeMap::new();
    for (id, s) in &doc.claim {
        let v = parse_scalar(s).map_err(|source| MarketError::Scalar {
            context: format!("claim value of `{id}`"),
            source,
        })?;
        values.insert(id.clone(), v);
    }
    Claim::new(market, values)
}
