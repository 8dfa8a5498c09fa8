//! ℤ₂-gain graphs.
//!
//! A gain graph is the quotient multigraph of a graph carrying a free
//! half-turn action. Every quotient edge stores a gain in `{+1, −1}` that
//! records whether its lift joins representatives (`+1`) or a representative
//! to the image of another (`−1`). Loops always carry gain `−1`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An element of ℤ₂ written multiplicatively.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Gain {
    Plus,
    Minus,
}

impl Gain {
    pub const ALL: [Gain; 2] = [Gain::Plus, Gain::Minus];

    pub fn from_sign(sign: i64) -> Option<Gain> {
        match sign {
            1 => Some(Gain::Plus),
            -1 => Some(Gain::Minus),
            _ => None,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Gain::Plus => 1,
            Gain::Minus => -1,
        }
    }

    pub fn is_identity(self) -> bool {
        self == Gain::Plus
    }
}

impl Mul for Gain {
    type Output = Gain;
    fn mul(self, rhs: Gain) -> Gain {
        if self == rhs {
            Gain::Plus
        } else {
            Gain::Minus
        }
    }
}

impl Neg for Gain {
    type Output = Gain;
    fn neg(self) -> Gain {
        self * Gain::Minus
    }
}

impl TryFrom<i64> for Gain {
    type Error = String;
    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Gain::from_sign(value).ok_or_else(|| format!("gain must be 1 or -1, got {value}"))
    }
}

impl From<Gain> for i64 {
    fn from(g: Gain) -> i64 {
        g.sign()
    }
}

impl fmt::Display for Gain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

/// Stable identifier of an edge. Ids survive switching and are never reused
/// by the move machinery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub gain: Gain,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite `x`, or `None` when `x` is not an endpoint.
    pub fn other(&self, x: usize) -> Option<usize> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }

    /// Endpoints as an ordered pair `(min, max)`.
    pub fn key(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop {edge} at vertex {vertex} has gain 1")]
    GainOneLoop { edge: EdgeId, vertex: usize },
    #[error("edges {first} and {second} are parallel with the same gain")]
    DuplicateParallelEdge { first: EdgeId, second: EdgeId },
    #[error("edge {edge} references vertex {vertex} but the graph has {vertex_count} vertices")]
    BadVertexIndex {
        edge: EdgeId,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge id {0} used twice")]
    DuplicateEdgeId(EdgeId),
}

/// A finite ℤ₂-gain graph with dense vertex indices `0..vertex_count`.
///
/// Construction through [`GainGraph::from_edges`] validates; the mutating
/// helpers used by the move machinery do not, and callers re-run
/// [`GainGraph::validate`] once they are done.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    next_id: u32,
}

impl GainGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(vertex_count: usize) -> Self {
        GainGraph {
            vertex_count,
            edges: Vec::new(),
            next_id: 0,
        }
    }

    /// Builds and validates a graph; edge ids are assigned in input order.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, Gain)>,
    {
        let mut g = GainGraph::new(vertex_count);
        for (u, v, gain) in edges {
            g.add_edge(u, v, gain);
        }
        g.validate()?;
        Ok(g)
    }

    /// Builds and validates a graph from edges that already carry ids.
    pub fn from_edge_records<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(GraphError::DuplicateEdgeId(w[0].id));
            }
        }
        let next_id = edges.last().map_or(0, |e| e.id.0 + 1);
        let g = GainGraph {
            vertex_count,
            edges,
            next_id,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in increasing id order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// The id the next added edge will receive.
    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_id)
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    /// Appends an edge without validating it.
    pub fn add_edge(&mut self, u: usize, v: usize, gain: Gain) -> EdgeId {
        let id = EdgeId(self.next_id);
        self.next_id += 1;
        self.edges.push(Edge { id, u, v, gain });
        id
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<Edge, GraphError> {
        let idx = self
            .edges
            .binary_search_by_key(&id, |e| e.id)
            .map_err(|_| GraphError::UnknownEdge(id))?;
        Ok(self.edges.remove(idx))
    }

    /// Deletes `v` and its incident edges; vertices above `v` shift down by one.
    pub fn remove_vertex(&mut self, v: usize) -> Result<Vec<Edge>, GraphError> {
        self.check_vertex(v)?;
        let (removed, kept): (Vec<Edge>, Vec<Edge>) =
            self.edges.drain(..).partition(|e| e.touches(v));
        let shift = |x: usize| if x > v { x - 1 } else { x };
        self.edges = kept
            .into_iter()
            .map(|e| Edge {
                u: shift(e.u),
                v: shift(e.v),
                ..e
            })
            .collect();
        self.vertex_count -= 1;
        Ok(removed)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// Checks vertex indices, loop gains and the parallel-edge rule.
    pub fn validate(&self) -> Result<(), GraphError> {
        let mut seen: std::collections::HashMap<(usize, usize, Gain), EdgeId> =
            std::collections::HashMap::new();
        for e in &self.edges {
            for x in [e.u, e.v] {
                if x >= self.vertex_count {
                    return Err(GraphError::BadVertexIndex {
                        edge: e.id,
                        vertex: x,
                        vertex_count: self.vertex_count,
                    });
                }
            }
            if e.is_loop() && e.gain == Gain::Plus {
                return Err(GraphError::GainOneLoop {
                    edge: e.id,
                    vertex: e.u,
                });
            }
            let (a, b) = e.key();
            if let Some(first) = seen.insert((a, b, e.gain), e.id) {
                return Err(GraphError::DuplicateParallelEdge {
                    first,
                    second: e.id,
                });
            }
        }
        Ok(())
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| {
                if e.is_loop() && e.u == v {
                    2
                } else if e.touches(v) {
                    1
                } else {
                    0
                }
            })
            .sum()
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    pub fn loop_at(&self, v: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.is_loop() && e.u == v)
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.loop_at(v).is_some()
    }

    /// Non-loop edges joining `a` and `b` (at most two in a valid graph).
    pub fn edges_between(&self, a: usize, b: usize) -> impl Iterator<Item = &Edge> + '_ {
        let key = (a.min(b), a.max(b));
        self.edges
            .iter()
            .filter(move |e| !e.is_loop() && e.key() == key)
    }

    pub fn find_edge(&self, a: usize, b: usize, gain: Gain) -> Option<&Edge> {
        if a == b {
            return self.loop_at(a).filter(|e| e.gain == gain);
        }
        self.edges_between(a, b).find(|e| e.gain == gain)
    }

    /// Distinct vertices joined to `v` by a non-loop edge.
    pub fn neighbours(&self, v: usize) -> BTreeSet<usize> {
        self.incident(v)
            .filter(|e| !e.is_loop())
            .filter_map(|e| e.other(v))
            .collect()
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut out = Vec::new();
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            let idx = out.len();
            let mut members = vec![s];
            comp[s] = idx;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = idx;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Subgraph induced by `vertices`, relabelled in the given order with
    /// fresh edge ids.
    pub fn induced(&self, vertices: &[usize]) -> GainGraph {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut g = GainGraph::new(vertices.len());
        for e in &self.edges {
            if index[e.u] != usize::MAX && index[e.v] != usize::MAX {
                g.add_edge(index[e.u], index[e.v], e.gain);
            }
        }
        g
    }

    /// Vertex-disjoint union; `other`'s vertices are shifted past ours and
    /// its edges receive fresh ids.
    pub fn disjoint_union(&self, other: &GainGraph) -> GainGraph {
        let mut g = self.clone();
        let shift = self.vertex_count;
        g.vertex_count += other.vertex_count;
        for e in &other.edges {
            g.add_edge(e.u + shift, e.v + shift, e.gain);
        }
        g
    }

    /// Balance of the edges with the given ids.
    pub fn is_balanced(&self, subset: &[EdgeId]) -> Result<bool, GraphError> {
        let edges = subset
            .iter()
            .map(|&id| self.edge(id).copied().ok_or(GraphError::UnknownEdge(id)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(balance_potential(self.vertex_count, &edges).is_some())
    }

    /// Negates the gain of every non-loop edge at `v`.
    pub fn switch(&self, v: usize) -> Result<GainGraph, GraphError> {
        let mut g = self.clone();
        g.switch_in_place(v)?;
        Ok(g)
    }

    pub fn switch_in_place(&mut self, v: usize) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        for e in &mut self.edges {
            if !e.is_loop() && e.touches(v) {
                e.gain = -e.gain;
            }
        }
        Ok(())
    }

    /// Switches at every vertex `x` with `signs[x] == Minus`.
    pub fn switch_by(&mut self, signs: &[Gain]) {
        for e in &mut self.edges {
            e.gain = e.gain * signs[e.u] * signs[e.v];
        }
    }

    /// The simple graph carrying the half-turn action.
    pub fn covering_graph(&self) -> Result<CoveringGraph, GraphError> {
        self.validate()?;
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            if e.is_loop() {
                edges.push((CoverVertex::plus(e.u), CoverVertex::minus(e.u)));
            } else {
                let twist = e.gain == Gain::Minus;
                edges.push((
                    CoverVertex::plus(e.u),
                    CoverVertex {
                        orbit: e.v,
                        negated: twist,
                    },
                ));
                edges.push((
                    CoverVertex::minus(e.u),
                    CoverVertex {
                        orbit: e.v,
                        negated: !twist,
                    },
                ));
            }
        }
        Ok(CoveringGraph {
            orbit_count: self.vertex_count,
            edges,
        })
    }
}

/// Returns a potential `σ` with `σ(u)·σ(v) = gain` on every edge when the
/// edge set is balanced, by breadth-first propagation.
pub(crate) fn balance_potential(vertex_count: usize, edges: &[Edge]) -> Option<Vec<Gain>> {
    if edges.iter().any(|e| e.is_loop()) {
        return None;
    }
    let mut adj: Vec<Vec<(usize, Gain)>> = vec![Vec::new(); vertex_count];
    for e in edges {
        adj[e.u].push((e.v, e.gain));
        adj[e.v].push((e.u, e.gain));
    }
    let mut pot: Vec<Option<Gain>> = vec![None; vertex_count];
    for s in 0..vertex_count {
        if pot[s].is_some() {
            continue;
        }
        pot[s] = Some(Gain::Plus);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let px = pot[x].expect("visited");
            for &(y, g) in &adj[x] {
                let want = px * g;
                match pot[y] {
                    None => {
                        pot[y] = Some(want);
                        queue.push_back(y);
                    }
                    Some(py) if py != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(pot.into_iter().map(|p| p.unwrap_or(Gain::Plus)).collect())
}

/// A vertex of the covering graph: orbit index plus which copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverVertex {
    pub orbit: usize,
    pub negated: bool,
}

impl CoverVertex {
    pub fn plus(orbit: usize) -> Self {
        CoverVertex {
            orbit,
            negated: false,
        }
    }

    pub fn minus(orbit: usize) -> Self {
        CoverVertex {
            orbit,
            negated: true,
        }
    }

    /// Image under the half-turn.
    pub fn flipped(self) -> Self {
        CoverVertex {
            orbit: self.orbit,
            negated: !self.negated,
        }
    }

    pub fn index(self) -> usize {
        2 * self.orbit + usize::from(self.negated)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringGraph {
    pub orbit_count: usize,
    pub edges: Vec<(CoverVertex, CoverVertex)>,
}

impl CoveringGraph {
    pub fn vertex_count(&self) -> usize {
        2 * self.orbit_count
    }

    /// No loops and no repeated edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|&(a, b)| {
            let key = if a <= b { (a, b) } else { (b, a) };
            a != b && seen.insert(key)
        })
    }

    /// True when the half-turn maps the edge set onto itself.
    pub fn is_invariant(&self) -> bool {
        let set: BTreeSet<_> = self
            .edges
            .iter()
            .map(|&(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        set.iter().all(|&(a, b)| {
            let (x, y) = (a.flipped(), b.flipped());
            set.contains(&if x <= y { (x, y) } else { (y, x) })
        })
    }
}
