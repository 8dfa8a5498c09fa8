//! Construction moves on gain graphs and their inverses.
//!
//! Every forward move appends its new vertices at the end of the index
//! range. Deleted edge ids are retired and new edges take fresh ids, so a
//! recorded sequence of moves replays exactly.
//!
//! Reductions are the inverse operations. Whether a reduction is admissible
//! is decided by performing it and re-checking sparsity, rather than through
//! the structural case analysis that justifies their existence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gain_graph::{balance_potential, Edge, EdgeId, Gain, GainGraph, GraphError};
use crate::sparsity::{check_tight, SparsityParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    H1a,
    H1b,
    H1c,
    H2a,
    H2b,
    H2c,
    H2d,
    H2e,
    H3a,
    H3b,
    H3c,
    H3d,
    VertexToK4,
    VertexSplit,
}

impl MoveKind {
    pub const ALL: [MoveKind; 14] = [
        MoveKind::H1a,
        MoveKind::H1b,
        MoveKind::H1c,
        MoveKind::H2a,
        MoveKind::H2b,
        MoveKind::H2c,
        MoveKind::H2d,
        MoveKind::H2e,
        MoveKind::H3a,
        MoveKind::H3b,
        MoveKind::H3c,
        MoveKind::H3d,
        MoveKind::VertexToK4,
        MoveKind::VertexSplit,
    ];

    /// The moves that never create loops; they generate the (2,2,2)-tight
    /// graphs from a single vertex.
    pub const LOOPLESS: [MoveKind; 6] = [
        MoveKind::H1a,
        MoveKind::H1b,
        MoveKind::H2a,
        MoveKind::H2b,
        MoveKind::VertexToK4,
        MoveKind::VertexSplit,
    ];

    /// Number of vertices the move adds.
    pub fn added_vertices(self) -> usize {
        if self == MoveKind::VertexToK4 {
            3
        } else {
            1
        }
    }
}

/// A forward move. The new vertex (or vertices) always receive the next
/// free indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum Move {
    /// New vertex joined to two distinct vertices.
    H1a {
        a: usize,
        gain_a: Gain,
        b: usize,
        gain_b: Gain,
    },
    /// New vertex joined to `a` by a double edge.
    H1b { a: usize },
    /// New vertex with a loop, joined to `a`.
    H1c { a: usize, gain: Gain },
    /// Subdivide `deleted = (x, y, α)` through the new vertex with gains
    /// `gain_x` and `α·gain_x`, and join it to a third vertex `z`.
    H2a {
        deleted: EdgeId,
        x: usize,
        gain_x: Gain,
        z: usize,
        gain_z: Gain,
    },
    /// Delete `(x, y, α)`; join the new vertex to `x` by a double edge and to
    /// `y` with `gain_y`.
    H2b {
        deleted: EdgeId,
        x: usize,
        gain_y: Gain,
    },
    /// Delete the loop at `x`; join the new vertex to `x` by a double edge
    /// and to `y ≠ x`.
    H2c {
        deleted_loop: EdgeId,
        y: usize,
        gain_y: Gain,
    },
    /// Subdivide `(x, y, α)` as in H2a and put a loop on the new vertex.
    H2d {
        deleted: EdgeId,
        x: usize,
        gain_x: Gain,
    },
    /// Delete the loop at `x`; the new vertex gets a double edge to `x` and
    /// a loop.
    H2e { deleted_loop: EdgeId },
    /// Subdivide two edges with four distinct ends through one new vertex.
    H3a {
        first: EdgeId,
        x: usize,
        gain_x: Gain,
        second: EdgeId,
        z: usize,
        gain_z: Gain,
    },
    /// Delete `(x, y, α)` and `(y, w, β)`; the new vertex gets a double edge
    /// to `y` and edges `(x, γ)`, `(w, ζ)` with `(γ, ζ) = (α, −β)`, or
    /// `(−α, β)` when `flip` is set.
    H3b {
        first: EdgeId,
        second: EdgeId,
        flip: bool,
    },
    /// Delete the loop at `x` and `(z, w, β)`; the new vertex gets a double
    /// edge to `x` and edges `(z, gain_z)`, `(w, β·gain_z)`.
    H3c {
        deleted_loop: EdgeId,
        deleted: EdgeId,
        z: usize,
        gain_z: Gain,
    },
    /// Delete the loops at `x ≠ z`; the new vertex gets double edges to both.
    H3d {
        first_loop: EdgeId,
        second_loop: EdgeId,
    },
    /// Replace `vertex` by a balanced K₄ on slots `0..4`, where slot 0 is
    /// `vertex` itself and slots 1–3 are new. Each non-loop edge at `vertex`
    /// is attached to the listed slot; a loop at `vertex` becomes an edge of
    /// gain −1 between the slots in `loop_ends` (a loop when they agree).
    VertexToK4 {
        vertex: usize,
        attach: Vec<(EdgeId, usize)>,
        loop_ends: Option<(usize, usize)>,
    },
    /// Split `vertex` along `pivot = (vertex, v2, γ)`: the new vertex `v0`
    /// takes over the `moved` edges (and the loop when `move_loop`) and is
    /// joined to `vertex` with gain 1 and to `v2` with gain γ.
    VertexSplit {
        vertex: usize,
        pivot: EdgeId,
        moved: Vec<EdgeId>,
        move_loop: bool,
    },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::H1a { .. } => MoveKind::H1a,
            Move::H1b { .. } => MoveKind::H1b,
            Move::H1c { .. } => MoveKind::H1c,
            Move::H2a { .. } => MoveKind::H2a,
            Move::H2b { .. } => MoveKind::H2b,
            Move::H2c { .. } => MoveKind::H2c,
            Move::H2d { .. } => MoveKind::H2d,
            Move::H2e { .. } => MoveKind::H2e,
            Move::H3a { .. } => MoveKind::H3a,
            Move::H3b { .. } => MoveKind::H3b,
            Move::H3c { .. } => MoveKind::H3c,
            Move::H3d { .. } => MoveKind::H3d,
            Move::VertexToK4 { .. } => MoveKind::VertexToK4,
            Move::VertexSplit { .. } => MoveKind::VertexSplit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move parameters do not fit the graph: {0}")]
    ParameterMismatch(String),
    #[error("result has a non-simple covering graph: {0}")]
    CoveringNotSimple(GraphError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn mismatch(msg: impl Into<String>) -> MoveError {
    MoveError::ParameterMismatch(msg.into())
}

fn edge_of(g: &GainGraph, id: EdgeId) -> Result<Edge, MoveError> {
    g.edge(id).copied().ok_or(MoveError::Graph(GraphError::UnknownEdge(id)))
}

fn non_loop(g: &GainGraph, id: EdgeId) -> Result<Edge, MoveError> {
    let e = edge_of(g, id)?;
    if e.is_loop() {
        return Err(mismatch(format!("{id} is a loop")));
    }
    Ok(e)
}

fn a_loop(g: &GainGraph, id: EdgeId) -> Result<Edge, MoveError> {
    let e = edge_of(g, id)?;
    if !e.is_loop() {
        return Err(mismatch(format!("{id} is not a loop")));
    }
    Ok(e)
}

fn check_vertex(g: &GainGraph, x: usize) -> Result<(), MoveError> {
    if x < g.vertex_count() {
        Ok(())
    } else {
        Err(MoveError::Graph(GraphError::VertexOutOfRange {
            vertex: x,
            vertex_count: g.vertex_count(),
        }))
    }
}

fn other_end(e: &Edge, x: usize) -> Result<usize, MoveError> {
    e.other(x)
        .ok_or_else(|| mismatch(format!("{x} is not an endpoint of {}", e.id)))
}

fn distinct(xs: &[usize]) -> bool {
    xs.iter()
        .enumerate()
        .all(|(i, a)| xs[i + 1..].iter().all(|b| a != b))
}

/// Applies a move. The result is validated; tightness is the caller's
/// concern.
pub fn apply_move(g: &GainGraph, mv: &Move) -> Result<GainGraph, MoveError> {
    let mut h = g.clone();
    match *mv {
        Move::H1a {
            a,
            gain_a,
            b,
            gain_b,
        } => {
            check_vertex(g, a)?;
            check_vertex(g, b)?;
            if a == b {
                return Err(mismatch("H1a needs two distinct neighbours"));
            }
            let v = h.add_vertex();
            h.add_edge(a, v, gain_a);
            h.add_edge(b, v, gain_b);
        }
        Move::H1b { a } => {
            check_vertex(g, a)?;
            let v = h.add_vertex();
            h.add_edge(a, v, Gain::Plus);
            h.add_edge(a, v, Gain::Minus);
        }
        Move::H1c { a, gain } => {
            check_vertex(g, a)?;
            let v = h.add_vertex();
            h.add_edge(a, v, gain);
            h.add_edge(v, v, Gain::Minus);
        }
        Move::H2a {
            deleted,
            x,
            gain_x,
            z,
            gain_z,
        } => {
            let e = non_loop(g, deleted)?;
            let y = other_end(&e, x)?;
            check_vertex(g, z)?;
            if z == x || z == y {
                return Err(mismatch("H2a needs three distinct neighbours"));
            }
            h.remove_edge(deleted)?;
            let v = h.add_vertex();
            h.add_edge(x, v, gain_x);
            h.add_edge(y, v, e.gain * gain_x);
            h.add_edge(z, v, gain_z);
        }
        Move::H2b { deleted, x, gain_y } => {
            let e = non_loop(g, deleted)?;
            let y = other_end(&e, x)?;
            h.remove_edge(deleted)?;
            let v = h.add_vertex();
            h.add_edge(x, v, Gain::Plus);
            h.add_edge(x, v, Gain::Minus);
            h.add_edge(y, v, gain_y);
        }
        Move::H2c {
            deleted_loop,
            y,
            gain_y,
        } => {
            let e = a_loop(g, deleted_loop)?;
            check_vertex(g, y)?;
            if y == e.u {
                return Err(mismatch("H2c needs a second vertex"));
            }
            h.remove_edge(deleted_loop)?;
            let v = h.add_vertex();
            h.add_edge(e.u, v, Gain::Plus);
            h.add_edge(e.u, v, Gain::Minus);
            h.add_edge(y, v, gain_y);
        }
        Move::H2d { deleted, x, gain_x } => {
            let e = non_loop(g, deleted)?;
            let y = other_end(&e, x)?;
            h.remove_edge(deleted)?;
            let v = h.add_vertex();
            h.add_edge(x, v, gain_x);
            h.add_edge(y, v, e.gain * gain_x);
            h.add_edge(v, v, Gain::Minus);
        }
        Move::H2e { deleted_loop } => {
            let e = a_loop(g, deleted_loop)?;
            h.remove_edge(deleted_loop)?;
            let v = h.add_vertex();
            h.add_edge(e.u, v, Gain::Plus);
            h.add_edge(e.u, v, Gain::Minus);
            h.add_edge(v, v, Gain::Minus);
        }
        Move::H3a {
            first,
            x,
            gain_x,
            second,
            z,
            gain_z,
        } => {
            let e = non_loop(g, first)?;
            let f = non_loop(g, second)?;
            let y = other_end(&e, x)?;
            let w = other_end(&f, z)?;
            if !distinct(&[x, y, z, w]) {
                return Err(mismatch("H3a needs four distinct ends"));
            }
            h.remove_edge(first)?;
            h.remove_edge(second)?;
            let v = h.add_vertex();
            h.add_edge(x, v, gain_x);
            h.add_edge(y, v, e.gain * gain_x);
            h.add_edge(z, v, gain_z);
            h.add_edge(w, v, f.gain * gain_z);
        }
        Move::H3b {
            first,
            second,
            flip,
        } => {
            let e = non_loop(g, first)?;
            let f = non_loop(g, second)?;
            if first == second {
                return Err(mismatch("H3b needs two edges"));
            }
            let y = if f.touches(e.u) { e.u } else { e.v };
            let x = other_end(&e, y)?;
            let w = other_end(&f, y)?;
            if !distinct(&[x, y, w]) {
                return Err(mismatch("H3b edges must form a path on three vertices"));
            }
            let (gamma, zeta) = if flip {
                (-e.gain, f.gain)
            } else {
                (e.gain, -f.gain)
            };
            h.remove_edge(first)?;
            h.remove_edge(second)?;
            let v = h.add_vertex();
            h.add_edge(x, v, gamma);
            h.add_edge(y, v, Gain::Plus);
            h.add_edge(y, v, Gain::Minus);
            h.add_edge(w, v, zeta);
        }
        Move::H3c {
            deleted_loop,
            deleted,
            z,
            gain_z,
        } => {
            let l = a_loop(g, deleted_loop)?;
            let f = non_loop(g, deleted)?;
            let w = other_end(&f, z)?;
            if !distinct(&[l.u, z, w]) {
                return Err(mismatch("H3c loop must avoid the deleted edge"));
            }
            h.remove_edge(deleted_loop)?;
            h.remove_edge(deleted)?;
            let v = h.add_vertex();
            h.add_edge(l.u, v, Gain::Plus);
            h.add_edge(l.u, v, Gain::Minus);
            h.add_edge(z, v, gain_z);
            h.add_edge(w, v, f.gain * gain_z);
        }
        Move::H3d {
            first_loop,
            second_loop,
        } => {
            let l1 = a_loop(g, first_loop)?;
            let l2 = a_loop(g, second_loop)?;
            if l1.u == l2.u {
                return Err(mismatch("H3d needs loops at two vertices"));
            }
            h.remove_edge(first_loop)?;
            h.remove_edge(second_loop)?;
            let v = h.add_vertex();
            for x in [l1.u, l2.u] {
                h.add_edge(x, v, Gain::Plus);
                h.add_edge(x, v, Gain::Minus);
            }
        }
        Move::VertexToK4 {
            vertex,
            ref attach,
            loop_ends,
        } => {
            check_vertex(g, vertex)?;
            let mut incident: Vec<EdgeId> = g
                .incident(vertex)
                .filter(|e| !e.is_loop())
                .map(|e| e.id)
                .collect();
            let mut listed: Vec<EdgeId> = attach.iter().map(|&(id, _)| id).collect();
            incident.sort_unstable();
            listed.sort_unstable();
            if incident != listed {
                return Err(mismatch("attachment must list every non-loop edge at the vertex once"));
            }
            if attach.iter().any(|&(_, s)| s > 3) {
                return Err(mismatch("K4 slots are 0..=3"));
            }
            let lp = g.loop_at(vertex).copied();
            match (lp, loop_ends) {
                (Some(_), Some((s, t))) if s <= 3 && t <= 3 => {}
                (None, None) => {}
                _ => return Err(mismatch("loop disposition does not match the vertex")),
            }
            let slots = [vertex, h.add_vertex(), h.add_vertex(), h.add_vertex()];
            for &(id, slot) in attach {
                if slot == 0 {
                    continue;
                }
                let e = h.remove_edge(id)?;
                let x = other_end(&e, vertex)?;
                h.add_edge(x, slots[slot], e.gain);
            }
            if let (Some(l), Some((s, t))) = (lp, loop_ends) {
                h.remove_edge(l.id)?;
                h.add_edge(slots[s], slots[t], Gain::Minus);
            }
            for i in 0..4 {
                for j in i + 1..4 {
                    h.add_edge(slots[i], slots[j], Gain::Plus);
                }
            }
        }
        Move::VertexSplit {
            vertex,
            pivot,
            ref moved,
            move_loop,
        } => {
            check_vertex(g, vertex)?;
            let p = non_loop(g, pivot)?;
            let v2 = other_end(&p, vertex)?;
            let mut seen = Vec::new();
            for &id in moved {
                let e = non_loop(g, id)?;
                if id == pivot || !e.touches(vertex) || seen.contains(&id) {
                    return Err(mismatch(format!("{id} cannot be moved by this split")));
                }
                seen.push(id);
            }
            let lp = g.loop_at(vertex).copied();
            if move_loop && lp.is_none() {
                return Err(mismatch("no loop to move"));
            }
            let v0 = h.add_vertex();
            for &id in moved {
                let e = h.remove_edge(id)?;
                let x = other_end(&e, vertex)?;
                h.add_edge(x, v0, e.gain);
            }
            if let (true, Some(l)) = (move_loop, lp) {
                h.remove_edge(l.id)?;
                h.add_edge(v0, v0, Gain::Minus);
            }
            h.add_edge(v0, vertex, Gain::Plus);
            h.add_edge(v0, v2, p.gain);
        }
    }
    h.validate().map_err(MoveError::CoveringNotSimple)?;
    Ok(h)
}

/// An inverse move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    /// Reverse H1, H2 or H3: delete `vertex` and add `added` between its
    /// neighbours.
    RemoveVertex {
        vertex: usize,
        kind: MoveKind,
        added: Vec<(usize, usize, Gain)>,
    },
    /// Contract a balanced K₄ (given by its six edges) to its least vertex.
    ContractK4 {
        vertices: [usize; 4],
        edges: [EdgeId; 6],
    },
    /// Contract `edge = (kept, removed)` of the balanced triangle closed by
    /// `kept_apex` and `removed_apex`.
    ContractEdge {
        kept: usize,
        removed: usize,
        apex: usize,
        edge: EdgeId,
        kept_apex: EdgeId,
        removed_apex: EdgeId,
    },
}

impl Reduction {
    /// Kind of the forward move that undoes this reduction.
    pub fn kind(&self) -> MoveKind {
        match self {
            Reduction::RemoveVertex { kind, .. } => *kind,
            Reduction::ContractK4 { .. } => MoveKind::VertexToK4,
            Reduction::ContractEdge { .. } => MoveKind::VertexSplit,
        }
    }

    /// The vertex the reduction is anchored at (least vertex for
    /// contractions).
    pub fn vertex(&self) -> usize {
        match self {
            Reduction::RemoveVertex { vertex, .. } => *vertex,
            Reduction::ContractK4 { vertices, .. } => vertices[0],
            Reduction::ContractEdge { kept, .. } => *kept,
        }
    }

    /// Vertices the reduction touches.
    pub fn support(&self, g: &GainGraph) -> Vec<usize> {
        match self {
            Reduction::RemoveVertex { vertex, .. } => {
                let mut s: Vec<usize> = g.neighbours(*vertex).into_iter().collect();
                s.push(*vertex);
                s
            }
            Reduction::ContractK4 { vertices, .. } => vertices.to_vec(),
            Reduction::ContractEdge {
                kept,
                removed,
                apex,
                ..
            } => vec![*kept, *removed, *apex],
        }
    }
}

/// Result of performing a reduction.
#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    /// The reduced graph.
    pub graph: GainGraph,
    /// A move on `graph` undoing the reduction.
    pub forward: Move,
    /// For every vertex of `apply_move(graph, forward)`, the corresponding
    /// vertex of the original graph. Edges and gains agree up to switching.
    pub vertex_map: Vec<usize>,
}

/// Non-loop edges at `v` as `(neighbour, gain, id)`, sorted.
fn spokes(g: &GainGraph, v: usize) -> Vec<(usize, Gain, EdgeId)> {
    let mut s: Vec<_> = g
        .incident(v)
        .filter(|e| !e.is_loop())
        .map(|e| (e.other(v).expect("incident"), e.gain, e.id))
        .collect();
    s.sort();
    s
}

/// Neighbours of `v` with their multiplicities, each entry
/// `(neighbour, gains)`.
fn grouped(spokes: &[(usize, Gain, EdgeId)]) -> Vec<(usize, Vec<Gain>)> {
    let mut out: Vec<(usize, Vec<Gain>)> = Vec::new();
    for &(x, g, _) in spokes {
        match out.last_mut() {
            Some((y, gs)) if *y == x => gs.push(g),
            _ => out.push((x, vec![g])),
        }
    }
    out
}

/// Every syntactically well-formed reduction, ordered by vertex, then move
/// kind, then gains; contractions follow.
pub fn enumerate_reductions(g: &GainGraph) -> Vec<Reduction> {
    use Gain::{Minus, Plus};
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        let s = spokes(g, v);
        let groups = grouped(&s);
        let has_loop = g.has_loop(v);
        let mut push = |kind: MoveKind, added: Vec<(usize, usize, Gain)>| {
            out.push(Reduction::RemoveVertex {
                vertex: v,
                kind,
                added,
            })
        };
        let singles: Vec<(usize, Gain)> = groups
            .iter()
            .filter(|(_, gs)| gs.len() == 1)
            .map(|(x, gs)| (*x, gs[0]))
            .collect();
        let doubles: Vec<usize> = groups
            .iter()
            .filter(|(_, gs)| gs.len() == 2)
            .map(|(x, _)| *x)
            .collect();
        match (has_loop, s.len()) {
            (false, 2) => {
                if doubles.is_empty() {
                    push(MoveKind::H1a, vec![]);
                } else {
                    push(MoveKind::H1b, vec![]);
                }
            }
            (true, 1) => push(MoveKind::H1c, vec![]),
            (false, 3) => {
                if doubles.is_empty() {
                    for i in 0..3 {
                        for j in i + 1..3 {
                            let (a, ga) = singles[i];
                            let (b, gb) = singles[j];
                            push(MoveKind::H2a, vec![(a, b, ga * gb)]);
                        }
                    }
                } else {
                    let a = doubles[0];
                    let (b, _) = singles[0];
                    for alpha in [Plus, Minus] {
                        push(MoveKind::H2b, vec![(a, b, alpha)]);
                    }
                    push(MoveKind::H2c, vec![(a, a, Minus)]);
                }
            }
            (true, 2) => {
                if doubles.is_empty() {
                    let (a, ga) = singles[0];
                    let (b, gb) = singles[1];
                    push(MoveKind::H2d, vec![(a, b, ga * gb)]);
                } else {
                    push(MoveKind::H2e, vec![(doubles[0], doubles[0], Minus)]);
                }
            }
            (false, 4) => match doubles.len() {
                0 => {
                    let n = &singles;
                    for (p, q) in [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))] {
                        let (a, ga) = n[p.0];
                        let (b, gb) = n[p.1];
                        let (c, gc) = n[q.0];
                        let (d, gd) = n[q.1];
                        push(MoveKind::H3a, vec![(a, b, ga * gb), (c, d, gc * gd)]);
                    }
                }
                1 => {
                    let y = doubles[0];
                    let (x, gx) = singles[0];
                    let (w, gw) = singles[1];
                    push(MoveKind::H3b, vec![(x, y, gx), (y, w, -gw)]);
                    push(MoveKind::H3b, vec![(x, y, -gx), (y, w, gw)]);
                    push(MoveKind::H3c, vec![(y, y, Minus), (x, w, gx * gw)]);
                }
                _ => {
                    let (a, b) = (doubles[0], doubles[1]);
                    push(MoveKind::H3d, vec![(a, a, Minus), (b, b, Minus)]);
                }
            },
            _ => {}
        }
    }
    out.extend(k4_candidates(g));
    out.extend(triangle_candidates(g));
    out
}

fn k4_candidates(g: &GainGraph) -> Vec<Reduction> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let vs = [a, b, c, d];
                    let options: Vec<Vec<Edge>> = pairs
                        .iter()
                        .map(|&(i, j)| g.edges_between(vs[i], vs[j]).copied().collect())
                        .collect();
                    if options.iter().any(|o| o.is_empty()) {
                        continue;
                    }
                    let inside = g
                        .edges()
                        .iter()
                        .filter(|e| vs.contains(&e.u) && vs.contains(&e.v))
                        .count();
                    if inside > 7 {
                        continue;
                    }
                    let total: usize = options.iter().map(|o| o.len()).product();
                    for choice in 0..total {
                        let mut rest = choice;
                        let chosen: Vec<Edge> = options
                            .iter()
                            .map(|o| {
                                let e = o[rest % o.len()];
                                rest /= o.len();
                                e
                            })
                            .collect();
                        if balance_potential(n, &chosen).is_some() {
                            let ids: Vec<EdgeId> = chosen.iter().map(|e| e.id).collect();
                            out.push(Reduction::ContractK4 {
                                vertices: vs,
                                edges: ids.try_into().expect("six edges"),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn triangle_candidates(g: &GainGraph) -> Vec<Reduction> {
    let mut out = Vec::new();
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let (a, b) = e.key();
        if g.edges_between(a, b).count() != 1 {
            continue;
        }
        for c in 0..g.vertex_count() {
            if c == a || c == b {
                continue;
            }
            for ac in g.edges_between(a, c) {
                for bc in g.edges_between(b, c) {
                    if e.gain * ac.gain * bc.gain == Gain::Plus {
                        out.push(Reduction::ContractEdge {
                            kept: a,
                            removed: b,
                            apex: c,
                            edge: e.id,
                            kept_apex: ac.id,
                            removed_apex: bc.id,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Performs a reduction and returns the reduced graph together with the
/// forward move that undoes it.
pub fn apply_reduction(g: &GainGraph, r: &Reduction) -> Result<ReductionOutcome, MoveError> {
    match r {
        Reduction::RemoveVertex {
            vertex,
            kind,
            added,
        } => remove_vertex(g, *vertex, *kind, added),
        Reduction::ContractK4 { vertices, edges } => contract_k4(g, vertices, edges),
        Reduction::ContractEdge {
            kept,
            removed,
            apex,
            edge,
            kept_apex,
            removed_apex,
        } => contract_edge(g, *kept, *removed, *apex, *edge, *kept_apex, *removed_apex),
    }
}

/// Maps vertices of the reduced graph back to the original, given the
/// sorted list of removed original vertices.
fn surviving(n: usize, removed: &[usize]) -> Vec<usize> {
    (0..n).filter(|x| !removed.contains(x)).collect()
}

fn remove_vertex(
    g: &GainGraph,
    v: usize,
    kind: MoveKind,
    added: &[(usize, usize, Gain)],
) -> Result<ReductionOutcome, MoveError> {
    check_vertex(g, v)?;
    let s = spokes(g, v);
    let loop_here = g.has_loop(v);
    let mut h = g.clone();
    h.remove_vertex(v)?;
    let shift = |x: usize| if x > v { x - 1 } else { x };
    let mut ids = Vec::new();
    for &(a, b, gain) in added {
        if a == v || b == v {
            return Err(mismatch("added edges must avoid the removed vertex"));
        }
        ids.push(h.add_edge(shift(a), shift(b), gain));
    }
    h.validate().map_err(MoveError::CoveringNotSimple)?;
    let groups = grouped(&s);
    let single = |x: usize| -> Option<Gain> {
        groups
            .iter()
            .find(|(y, gs)| *y == x && gs.len() == 1)
            .map(|(_, gs)| gs[0])
    };
    let gain_at = |x: usize| single(x).ok_or_else(|| mismatch("expected a single edge"));
    let shape_ok = match kind {
        MoveKind::H1a | MoveKind::H1b => !loop_here && s.len() == 2,
        MoveKind::H1c => loop_here && s.len() == 1,
        MoveKind::H2a | MoveKind::H2b | MoveKind::H2c => !loop_here && s.len() == 3,
        MoveKind::H2d | MoveKind::H2e => loop_here && s.len() == 2,
        MoveKind::H3a | MoveKind::H3b | MoveKind::H3c | MoveKind::H3d => {
            !loop_here && s.len() == 4
        }
        _ => false,
    };
    if !shape_ok {
        return Err(mismatch(format!("vertex {v} does not fit a reverse {kind:?}")));
    }
    let forward = match kind {
        MoveKind::H1a => {
            if groups.len() != 2 {
                return Err(mismatch("H1a needs two neighbours"));
            }
            Move::H1a {
                a: shift(s[0].0),
                gain_a: s[0].1,
                b: shift(s[1].0),
                gain_b: s[1].1,
            }
        }
        MoveKind::H1b => {
            if groups.len() != 1 {
                return Err(mismatch("H1b needs a double edge"));
            }
            Move::H1b { a: shift(s[0].0) }
        }
        MoveKind::H1c => Move::H1c {
            a: shift(s[0].0),
            gain: s[0].1,
        },
        MoveKind::H2a | MoveKind::H2d => {
            let (a, b, _) = *added.first().ok_or_else(|| mismatch("missing edge"))?;
            let gain_x = gain_at(a)?;
            if kind == MoveKind::H2a {
                let (z, gain_z) = groups
                    .iter()
                    .find(|(y, _)| *y != a && *y != b)
                    .map(|(y, gs)| (*y, gs[0]))
                    .ok_or_else(|| mismatch("missing third neighbour"))?;
                Move::H2a {
                    deleted: ids[0],
                    x: shift(a),
                    gain_x,
                    z: shift(z),
                    gain_z,
                }
            } else {
                Move::H2d {
                    deleted: ids[0],
                    x: shift(a),
                    gain_x,
                }
            }
        }
        MoveKind::H2b => {
            let (a, b, _) = *added.first().ok_or_else(|| mismatch("missing edge"))?;
            Move::H2b {
                deleted: ids[0],
                x: shift(a),
                gain_y: gain_at(b)?,
            }
        }
        MoveKind::H2c => {
            let (a, _, _) = *added.first().ok_or_else(|| mismatch("missing loop"))?;
            let (y, gain_y) = groups
                .iter()
                .find(|(y, _)| *y != a)
                .map(|(y, gs)| (*y, gs[0]))
                .ok_or_else(|| mismatch("missing second neighbour"))?;
            Move::H2c {
                deleted_loop: ids[0],
                y: shift(y),
                gain_y,
            }
        }
        MoveKind::H2e => Move::H2e {
            deleted_loop: ids[0],
        },
        MoveKind::H3a => {
            if added.len() != 2 {
                return Err(mismatch("H3a adds two edges"));
            }
            Move::H3a {
                first: ids[0],
                x: shift(added[0].0),
                gain_x: gain_at(added[0].0)?,
                second: ids[1],
                z: shift(added[1].0),
                gain_z: gain_at(added[1].0)?,
            }
        }
        MoveKind::H3b => {
            if added.len() != 2 {
                return Err(mismatch("H3b adds two edges"));
            }
            let (x, _, alpha) = added[0];
            Move::H3b {
                first: ids[0],
                second: ids[1],
                flip: alpha != gain_at(x)?,
            }
        }
        MoveKind::H3c => {
            if added.len() != 2 {
                return Err(mismatch("H3c adds a loop and an edge"));
            }
            let (z, _, _) = added[1];
            Move::H3c {
                deleted_loop: ids[0],
                deleted: ids[1],
                z: shift(z),
                gain_z: gain_at(z)?,
            }
        }
        MoveKind::H3d => Move::H3d {
            first_loop: ids[0],
            second_loop: ids[1],
        },
        MoveKind::VertexToK4 | MoveKind::VertexSplit => unreachable!("filtered above"),
    };
    let mut vertex_map = surviving(g.vertex_count(), &[v]);
    vertex_map.push(v);
    Ok(ReductionOutcome {
        graph: h,
        forward,
        vertex_map,
    })
}

fn contract_k4(
    g: &GainGraph,
    vertices: &[usize; 4],
    k4_edges: &[EdgeId; 6],
) -> Result<ReductionOutcome, MoveError> {
    let n = g.vertex_count();
    for &x in vertices {
        check_vertex(g, x)?;
    }
    if !distinct(vertices) {
        return Err(mismatch("K4 vertices must be distinct"));
    }
    let chosen = k4_edges
        .iter()
        .map(|&id| non_loop(g, id))
        .collect::<Result<Vec<_>, _>>()?;
    if chosen
        .iter()
        .any(|e| !vertices.contains(&e.u) || !vertices.contains(&e.v))
    {
        return Err(mismatch("K4 edges must join K4 vertices"));
    }
    let potential = balance_potential(n, &chosen).ok_or_else(|| mismatch("K4 is unbalanced"))?;
    let mut h = g.clone();
    h.switch_by(&potential);
    let slot_of = |x: usize| vertices.iter().position(|&y| y == x);
    let keep = vertices[0];
    let mut extras = Vec::new();
    let mut moved = Vec::new();
    for e in h.edges().to_vec() {
        if k4_edges.contains(&e.id) {
            h.remove_edge(e.id)?;
            continue;
        }
        match (slot_of(e.u), slot_of(e.v)) {
            (Some(s), Some(t)) => {
                h.remove_edge(e.id)?;
                extras.push((s, t, e.gain));
            }
            (Some(s), None) | (None, Some(s)) if s > 0 => {
                h.remove_edge(e.id)?;
                let x = if slot_of(e.u).is_some() { e.v } else { e.u };
                moved.push((x, e.gain, s));
            }
            _ => {}
        }
    }
    if extras.len() > 1 {
        return Err(mismatch("K4 induces more than one extra edge"));
    }
    let mut attach: Vec<(EdgeId, usize)> = Vec::new();
    for &(x, gain, s) in &moved {
        attach.push((h.add_edge(x, keep, gain), s));
    }
    let loop_ends = match extras.first() {
        Some(&(s, t, gain)) => {
            if gain != Gain::Minus {
                return Err(mismatch("extra K4 edge must be twisted"));
            }
            h.add_edge(keep, keep, Gain::Minus);
            Some((s, t))
        }
        None => None,
    };
    let mut removed = vertices[1..].to_vec();
    removed.sort_unstable();
    for &x in removed.iter().rev() {
        h.remove_vertex(x)?;
    }
    h.validate().map_err(MoveError::CoveringNotSimple)?;
    // `keep` is the least K4 vertex, so its index is unchanged.
    for e in h.incident(keep) {
        if !e.is_loop() && !attach.iter().any(|&(id, _)| id == e.id) {
            attach.push((e.id, 0));
        }
    }
    attach.sort_unstable();
    let mut vertex_map = surviving(n, &removed);
    vertex_map.extend_from_slice(&vertices[1..]);
    Ok(ReductionOutcome {
        graph: h,
        forward: Move::VertexToK4 {
            vertex: keep,
            attach,
            loop_ends,
        },
        vertex_map,
    })
}

fn contract_edge(
    g: &GainGraph,
    kept: usize,
    removed: usize,
    apex: usize,
    edge: EdgeId,
    kept_apex: EdgeId,
    removed_apex: EdgeId,
) -> Result<ReductionOutcome, MoveError> {
    let e = non_loop(g, edge)?;
    let ka = non_loop(g, kept_apex)?;
    let ra = non_loop(g, removed_apex)?;
    if e.key() != (kept.min(removed), kept.max(removed))
        || ka.key() != (kept.min(apex), kept.max(apex))
        || ra.key() != (removed.min(apex), removed.max(apex))
        || !distinct(&[kept, removed, apex])
    {
        return Err(mismatch("triangle edges do not match its vertices"));
    }
    if g.edges_between(kept, removed).count() != 1 {
        return Err(mismatch("contracted edge has a parallel twin"));
    }
    let mut h = g.clone();
    if e.gain == Gain::Minus {
        h.switch_in_place(removed)?;
    }
    if h.edge(kept_apex).expect("present").gain == Gain::Minus {
        h.switch_in_place(apex)?;
    }
    if h.edge(removed_apex).expect("present").gain != Gain::Plus {
        return Err(mismatch("triangle is unbalanced"));
    }
    h.remove_edge(edge)?;
    h.remove_edge(removed_apex)?;
    let mut moved = Vec::new();
    let mut move_loop = false;
    for e in h.incident(removed).copied().collect::<Vec<_>>() {
        h.remove_edge(e.id)?;
        if e.is_loop() {
            move_loop = true;
            h.add_edge(kept, kept, Gain::Minus);
        } else {
            let x = e.other(removed).expect("incident");
            moved.push(h.add_edge(x, kept, e.gain));
        }
    }
    h.remove_vertex(removed)?;
    h.validate().map_err(MoveError::CoveringNotSimple)?;
    let shift = |x: usize| if x > removed { x - 1 } else { x };
    let mut vertex_map = surviving(g.vertex_count(), &[removed]);
    vertex_map.push(removed);
    Ok(ReductionOutcome {
        graph: h,
        forward: Move::VertexSplit {
            vertex: shift(kept),
            pivot: kept_apex,
            moved,
            move_loop,
        },
        vertex_map,
    })
}

/// True when the reduction applies and leaves a tight graph.
pub fn is_admissible(g: &GainGraph, r: &Reduction, p: SparsityParams) -> bool {
    apply_reduction(g, r)
        .map(|o| check_tight(&o.graph, p).unwrap_or(false))
        .unwrap_or(false)
}

/// Draws random parameters for a move of the given kind. The result may
/// still be rejected by [`apply_move`] (for instance when it would create a
/// parallel edge with a repeated gain); `None` means the graph offers no
/// structure of the required shape.
pub fn random_move<R: Rng + ?Sized>(g: &GainGraph, kind: MoveKind, rng: &mut R) -> Option<Move> {
    let n = g.vertex_count();
    let gain = |rng: &mut R| if rng.gen_bool(0.5) { Gain::Plus } else { Gain::Minus };
    let non_loops: Vec<Edge> = g.edges().iter().filter(|e| !e.is_loop()).copied().collect();
    let loops: Vec<Edge> = g.edges().iter().filter(|e| e.is_loop()).copied().collect();
    let end = |e: &Edge, rng: &mut R| if rng.gen_bool(0.5) { e.u } else { e.v };
    if n == 0 {
        return None;
    }
    Some(match kind {
        MoveKind::H1a => {
            if n < 2 {
                return None;
            }
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            Move::H1a {
                a,
                gain_a: gain(rng),
                b,
                gain_b: gain(rng),
            }
        }
        MoveKind::H1b => Move::H1b {
            a: rng.gen_range(0..n),
        },
        MoveKind::H1c => Move::H1c {
            a: rng.gen_range(0..n),
            gain: gain(rng),
        },
        MoveKind::H2a => {
            let e = *non_loops.choose(rng)?;
            let x = end(&e, rng);
            let others: Vec<usize> = (0..n).filter(|&z| !e.touches(z)).collect();
            Move::H2a {
                deleted: e.id,
                x,
                gain_x: gain(rng),
                z: *others.choose(rng)?,
                gain_z: gain(rng),
            }
        }
        MoveKind::H2b => {
            let e = *non_loops.choose(rng)?;
            Move::H2b {
                deleted: e.id,
                x: end(&e, rng),
                gain_y: gain(rng),
            }
        }
        MoveKind::H2c => {
            let l = *loops.choose(rng)?;
            let others: Vec<usize> = (0..n).filter(|&y| y != l.u).collect();
            Move::H2c {
                deleted_loop: l.id,
                y: *others.choose(rng)?,
                gain_y: gain(rng),
            }
        }
        MoveKind::H2d => {
            let e = *non_loops.choose(rng)?;
            Move::H2d {
                deleted: e.id,
                x: end(&e, rng),
                gain_x: gain(rng),
            }
        }
        MoveKind::H2e => Move::H2e {
            deleted_loop: loops.choose(rng)?.id,
        },
        MoveKind::H3a => {
            let e = *non_loops.choose(rng)?;
            let apart: Vec<Edge> = non_loops
                .iter()
                .filter(|f| !f.touches(e.u) && !f.touches(e.v))
                .copied()
                .collect();
            let f = *apart.choose(rng)?;
            Move::H3a {
                first: e.id,
                x: end(&e, rng),
                gain_x: gain(rng),
                second: f.id,
                z: end(&f, rng),
                gain_z: gain(rng),
            }
        }
        MoveKind::H3b => {
            let e = *non_loops.choose(rng)?;
            let adjacent: Vec<Edge> = non_loops
                .iter()
                .filter(|f| f.id != e.id && (f.touches(e.u) != f.touches(e.v)))
                .copied()
                .collect();
            let f = *adjacent.choose(rng)?;
            Move::H3b {
                first: e.id,
                second: f.id,
                flip: rng.gen_bool(0.5),
            }
        }
        MoveKind::H3c => {
            let l = *loops.choose(rng)?;
            let apart: Vec<Edge> = non_loops
                .iter()
                .filter(|f| !f.touches(l.u))
                .copied()
                .collect();
            let f = *apart.choose(rng)?;
            Move::H3c {
                deleted_loop: l.id,
                deleted: f.id,
                z: end(&f, rng),
                gain_z: gain(rng),
            }
        }
        MoveKind::H3d => {
            if loops.len() < 2 {
                return None;
            }
            let picked: Vec<&Edge> = loops.choose_multiple(rng, 2).collect();
            Move::H3d {
                first_loop: picked[0].id,
                second_loop: picked[1].id,
            }
        }
        MoveKind::VertexToK4 => {
            let vertex = rng.gen_range(0..n);
            let attach = g
                .incident(vertex)
                .filter(|e| !e.is_loop())
                .map(|e| (e.id, rng.gen_range(0..4)))
                .collect();
            let loop_ends = g
                .has_loop(vertex)
                .then(|| (rng.gen_range(0..4), rng.gen_range(0..4)));
            Move::VertexToK4 {
                vertex,
                attach,
                loop_ends,
            }
        }
        MoveKind::VertexSplit => {
            let candidates: Vec<usize> = (0..n).filter(|&v| !spokes(g, v).is_empty()).collect();
            let vertex = *candidates.choose(rng)?;
            let s = spokes(g, vertex);
            let pivot = s.choose(rng)?.2;
            let moved = s
                .iter()
                .filter(|x| x.2 != pivot && rng.gen_bool(0.5))
                .map(|x| x.2)
                .collect();
            Move::VertexSplit {
                vertex,
                pivot,
                moved,
                move_loop: g.has_loop(vertex) && rng.gen_bool(0.5),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::BaseGraph;
    use crate::isomorphism::{are_isomorphic, complete_isomorphism};
    use Gain::{Minus, Plus};

    const P: SparsityParams = SparsityParams::TWO_TWO_ZERO;

    #[test]
    fn h1a_on_double_edge_loops_stays_tight() {
        let g = BaseGraph::DoubleEdgeLoops.graph();
        let h = apply_move(
            &g,
            &Move::H1a {
                a: 0,
                gain_a: Plus,
                b: 1,
                gain_b: Plus,
            },
        )
        .unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert!(check_tight(&h, P).unwrap());
        let reds = enumerate_reductions(&h);
        assert!(reds.contains(&Reduction::RemoveVertex {
            vertex: 2,
            kind: MoveKind::H1a,
            added: vec![],
        }));
    }

    #[test]
    fn h1c_on_single_loop() {
        let g = GainGraph::from_edges(1, [(0, 0, Minus)]).unwrap();
        let h = apply_move(&g, &Move::H1c { a: 0, gain: Plus }).unwrap();
        assert_eq!(crate::sparsity::f_value(&h), crate::sparsity::f_value(&g));
        assert_eq!(h.edge_count(), 3);
    }

    #[test]
    fn empty_split_is_h1a() {
        let g = BaseGraph::LoopedTriangle.graph();
        let split = apply_move(
            &g,
            &Move::VertexSplit {
                vertex: 0,
                pivot: EdgeId(0),
                moved: vec![],
                move_loop: false,
            },
        )
        .unwrap();
        let h1a = apply_move(
            &g,
            &Move::H1a {
                a: 0,
                gain_a: Plus,
                b: 1,
                gain_b: Plus,
            },
        )
        .unwrap();
        assert!(are_isomorphic(&split, &h1a));
        assert_eq!(split.degree(3), 2);
    }

    #[test]
    fn malformed_parameters_are_rejected() {
        let g = BaseGraph::DoubleEdgeLoops.graph();
        let full = Move::VertexToK4 {
            vertex: 0,
            attach: vec![(EdgeId(0), 1), (EdgeId(1), 1)],
            loop_ends: Some((1, 1)),
        };
        assert!(apply_move(&g, &full).is_ok());
        let partial = Move::VertexToK4 {
            vertex: 0,
            attach: vec![(EdgeId(0), 1)],
            loop_ends: Some((0, 0)),
        };
        assert!(matches!(apply_move(&g, &partial), Err(MoveError::ParameterMismatch(_))));
        let not_a_loop = Move::H2e {
            deleted_loop: EdgeId(0),
        };
        assert!(matches!(apply_move(&g, &not_a_loop), Err(MoveError::ParameterMismatch(_))));
        let missing = Move::H1b { a: 5 };
        assert!(matches!(apply_move(&g, &missing), Err(MoveError::Graph(_))));
    }

    #[test]
    fn every_reduction_round_trips() {
        let g = BaseGraph::K4TwoLoops.graph();
        let mv = Move::H2a {
            deleted: EdgeId(0),
            x: 0,
            gain_x: Minus,
            z: 2,
            gain_z: Plus,
        };
        let h = apply_move(&g, &mv).unwrap();
        let mut found = false;
        for r in enumerate_reductions(&h) {
            let Ok(out) = apply_reduction(&h, &r) else {
                continue;
            };
            let back = apply_move(&out.graph, &out.forward).unwrap();
            assert!(
                complete_isomorphism(&back, &h, &out.vertex_map).is_some(),
                "{r:?}"
            );
            if check_tight(&out.graph, P).unwrap() && are_isomorphic(&out.graph, &g) {
                found = true;
            }
        }
        assert!(found);
    }

    #[test]
    fn move_json_shape() {
        let mv = Move::H1b { a: 3 };
        let s = serde_json::to_string(&mv).unwrap();
        assert_eq!(s, r#"{"kind":"H1b","params":{"a":3}}"#);
        let back: Move = serde_json::from_str(&s).unwrap();
        assert_eq!(back, mv);
    }
}
