//! Decomposition of gain-tight graphs into base graphs and replay of
//! construction sequences.
//!
//! `decompose` reduces each connected component by blind search over
//! admissible reductions until a base graph remains, then re-expresses the
//! recorded forward moves on the catalogue copy of that base graph. The
//! bookkeeping is an isomorphism from the replayed graph to the reduced
//! graph at every stage, recomputed from the vertex correspondence after
//! each move.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{is_base_graph, BaseGraph};
use crate::gain_graph::{EdgeId, Gain, GainGraph};
use crate::isomorphism::{complete_isomorphism, GainIsomorphism};
use crate::moves::{
    apply_move, apply_reduction, enumerate_reductions, random_move, Move, MoveError, MoveKind,
    Reduction,
};
use crate::sparsity::{check_tight, SparsityError, SparsityParams};

/// Base graphs (replayed as a vertex-disjoint union in list order) followed
/// by moves on the growing graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionSequence {
    pub counts: SparsityParams,
    pub initial: Vec<BaseGraph>,
    pub steps: Vec<Move>,
}

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("input is not ({0})-gain-tight")]
    NotTight(SparsityParams),
    #[error("only counts (2,2,0) and (2,2,2) have an inductive construction, got ({0})")]
    UnsupportedCounts(SparsityParams),
    /// A tight graph with no admissible reduction. This contradicts the
    /// characterisation and therefore indicates a defect in this crate.
    #[error("no admissible reduction on a tight graph with {vertices} vertices and edges {edges:?}")]
    NoAdmissibleReduction {
        vertices: usize,
        edges: Vec<(usize, usize, i64)>,
    },
    #[error("replaying the reductions failed: {0}")]
    Replay(String),
    #[error(transparent)]
    Sparsity(#[from] SparsityError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("step {step} ({kind:?}) cannot be applied: {source}")]
    BadStep {
        step: usize,
        kind: MoveKind,
        #[source]
        source: MoveError,
    },
    #[error("graph after step {step} is not ({counts})-gain-tight")]
    NotTight { step: usize, counts: SparsityParams },
    #[error("initial graph is not ({0})-gain-tight")]
    BadInitial(SparsityParams),
    #[error(transparent)]
    Sparsity(#[from] SparsityError),
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("no ({counts})-gain-tight graph in this family has {n} vertices")]
    Unreachable { n: usize, counts: SparsityParams },
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

fn supported(p: SparsityParams) -> bool {
    p == SparsityParams::TWO_TWO_ZERO || p == SparsityParams::TWO_TWO_TWO
}

/// Kinds usable under the given counts.
pub fn allowed_kinds(p: SparsityParams) -> &'static [MoveKind] {
    if p == SparsityParams::TWO_TWO_TWO {
        &MoveKind::LOOPLESS
    } else {
        &MoveKind::ALL
    }
}

/// Replays a sequence, checking tightness after every step.
pub fn construct(seq: &ConstructionSequence) -> Result<GainGraph, ConstructError> {
    let mut g = seq
        .initial
        .iter()
        .fold(GainGraph::new(0), |acc, b| acc.disjoint_union(&b.graph()));
    if !check_tight(&g, seq.counts)? {
        return Err(ConstructError::BadInitial(seq.counts));
    }
    for (step, mv) in seq.steps.iter().enumerate() {
        g = apply_move(&g, mv).map_err(|source| ConstructError::BadStep {
            step,
            kind: mv.kind(),
            source,
        })?;
        if !check_tight(&g, seq.counts)? {
            return Err(ConstructError::NotTight {
                step,
                counts: seq.counts,
            });
        }
    }
    Ok(g)
}

/// One reduction step of a component: the reduced graph, the move that
/// rebuilds the previous graph from it, and the vertex correspondence.
struct Stage {
    reduced: GainGraph,
    forward: Move,
    vertex_map: Vec<usize>,
}

fn is_seed(g: &GainGraph, p: SparsityParams) -> Option<(BaseGraph, GainIsomorphism)> {
    if p == SparsityParams::TWO_TWO_TWO {
        (g.vertex_count() == 1 && g.edge_count() == 0).then(|| {
            (
                BaseGraph::Point,
                GainIsomorphism {
                    vertex_map: vec![0],
                    switching: vec![Gain::Plus],
                    edge_map: vec![],
                },
            )
        })
    } else {
        is_base_graph(g)
    }
}

/// Candidate reductions in search order: by anchor degree, anchor id, then
/// move kind; ties keep enumeration order.
fn ordered_reductions(g: &GainGraph, p: SparsityParams) -> Vec<Reduction> {
    let kinds = allowed_kinds(p);
    let mut rs: Vec<Reduction> = enumerate_reductions(g)
        .into_iter()
        .filter(|r| kinds.contains(&r.kind()))
        .collect();
    rs.sort_by_key(|r| (g.degree(r.vertex()), r.vertex(), r.kind()));
    rs
}

fn reduce_component(
    component: &GainGraph,
    p: SparsityParams,
) -> Result<(BaseGraph, GainIsomorphism, Vec<Stage>), DecomposeError> {
    let mut stages = Vec::new();
    let mut g = component.clone();
    loop {
        if p == SparsityParams::TWO_TWO_TWO {
            assert!(
                g.edges().iter().all(|e| !e.is_loop()),
                "a (2,2,2)-tight graph cannot carry a loop"
            );
        }
        if let Some((base, iso)) = is_seed(&g, p) {
            return Ok((base, iso, stages));
        }
        let mut next = None;
        for r in ordered_reductions(&g, p) {
            let Ok(out) = apply_reduction(&g, &r) else {
                continue;
            };
            if check_tight(&out.graph, p)? {
                next = Some(out);
                break;
            }
        }
        let out = next.ok_or_else(|| DecomposeError::NoAdmissibleReduction {
            vertices: g.vertex_count(),
            edges: g
                .edges()
                .iter()
                .map(|e| (e.u, e.v, e.gain.sign()))
                .collect(),
        })?;
        g = out.graph.clone();
        stages.push(Stage {
            reduced: out.graph,
            forward: out.forward,
            vertex_map: out.vertex_map,
        });
    }
}

/// Re-expresses a move on `g` as a move on `h`, given an isomorphism
/// `g → h`. The new vertices keep their positions at the end of the range.
fn translate_move(mv: &Move, g: &GainGraph, to: &GainIsomorphism) -> Result<Move, String> {
    let vx = |x: usize| to.vertex_map[x];
    let s = |x: usize| to.switching[x];
    let ex = |id: EdgeId| {
        to.map_edge(id)
            .ok_or_else(|| format!("edge {id} missing from the isomorphism"))
    };
    let other = |id: EdgeId, x: usize| -> Result<usize, String> {
        g.edge(id)
            .and_then(|e| e.other(x))
            .ok_or_else(|| format!("edge {id} does not end at {x}"))
    };
    Ok(match mv.clone() {
        Move::H1a {
            a,
            gain_a,
            b,
            gain_b,
        } => Move::H1a {
            a: vx(a),
            gain_a: gain_a * s(a),
            b: vx(b),
            gain_b: gain_b * s(b),
        },
        Move::H1b { a } => Move::H1b { a: vx(a) },
        Move::H1c { a, gain } => Move::H1c {
            a: vx(a),
            gain: gain * s(a),
        },
        Move::H2a {
            deleted,
            x,
            gain_x,
            z,
            gain_z,
        } => Move::H2a {
            deleted: ex(deleted)?,
            x: vx(x),
            gain_x: gain_x * s(x),
            z: vx(z),
            gain_z: gain_z * s(z),
        },
        Move::H2b { deleted, x, gain_y } => {
            let y = other(deleted, x)?;
            Move::H2b {
                deleted: ex(deleted)?,
                x: vx(x),
                gain_y: gain_y * s(y),
            }
        }
        Move::H2c {
            deleted_loop,
            y,
            gain_y,
        } => Move::H2c {
            deleted_loop: ex(deleted_loop)?,
            y: vx(y),
            gain_y: gain_y * s(y),
        },
        Move::H2d { deleted, x, gain_x } => Move::H2d {
            deleted: ex(deleted)?,
            x: vx(x),
            gain_x: gain_x * s(x),
        },
        Move::H2e { deleted_loop } => Move::H2e {
            deleted_loop: ex(deleted_loop)?,
        },
        Move::H3a {
            first,
            x,
            gain_x,
            second,
            z,
            gain_z,
        } => Move::H3a {
            first: ex(first)?,
            x: vx(x),
            gain_x: gain_x * s(x),
            second: ex(second)?,
            z: vx(z),
            gain_z: gain_z * s(z),
        },
        // Switching the new vertex absorbs the sign change at the shared end.
        Move::H3b {
            first,
            second,
            flip,
        } => Move::H3b {
            first: ex(first)?,
            second: ex(second)?,
            flip,
        },
        Move::H3c {
            deleted_loop,
            deleted,
            z,
            gain_z,
        } => Move::H3c {
            deleted_loop: ex(deleted_loop)?,
            deleted: ex(deleted)?,
            z: vx(z),
            gain_z: gain_z * s(z),
        },
        Move::H3d {
            first_loop,
            second_loop,
        } => Move::H3d {
            first_loop: ex(first_loop)?,
            second_loop: ex(second_loop)?,
        },
        Move::VertexToK4 {
            vertex,
            attach,
            loop_ends,
        } => Move::VertexToK4 {
            vertex: vx(vertex),
            attach: attach
                .into_iter()
                .map(|(id, slot)| ex(id).map(|id| (id, slot)))
                .collect::<Result<_, _>>()?,
            loop_ends,
        },
        Move::VertexSplit {
            vertex,
            pivot,
            moved,
            move_loop,
        } => Move::VertexSplit {
            vertex: vx(vertex),
            pivot: ex(pivot)?,
            moved: moved.into_iter().map(ex).collect::<Result<_, _>>()?,
            move_loop,
        },
    })
}

/// Relabels a move on `g` through an injective vertex map and an edge-id
/// map, without switching.
fn embed_move(
    mv: &Move,
    g: &GainGraph,
    vertex: &[usize],
    edge: &HashMap<EdgeId, EdgeId>,
) -> Result<Move, DecomposeError> {
    let iso = GainIsomorphism {
        vertex_map: vertex.to_vec(),
        switching: vec![Gain::Plus; vertex.len()],
        edge_map: edge.iter().map(|(&a, &b)| (a, b)).collect(),
    };
    translate_move(mv, g, &iso).map_err(DecomposeError::Replay)
}

/// Replays the stages of one component from its catalogue seed, producing
/// moves on the catalogue copy.
fn replay_component(
    component: &GainGraph,
    seed_iso: GainIsomorphism,
    stages: &[Stage],
    base: BaseGraph,
) -> Result<Vec<Move>, DecomposeError> {
    let mut h = base.graph();
    let mut alpha = seed_iso;
    let mut moves = Vec::with_capacity(stages.len());
    for i in (0..stages.len()).rev() {
        let stage = &stages[i];
        let target = if i == 0 { component } else { &stages[i - 1].reduced };
        let mv = translate_move(&stage.forward, &stage.reduced, &alpha.inverse())
            .map_err(DecomposeError::Replay)?;
        let next = apply_move(&h, &mv)?;
        let mut vertex_map: Vec<usize> = alpha
            .vertex_map
            .iter()
            .map(|&y| stage.vertex_map[y])
            .collect();
        vertex_map.extend(
            (h.vertex_count()..next.vertex_count()).map(|x| stage.vertex_map[x]),
        );
        alpha = complete_isomorphism(&next, target, &vertex_map).ok_or_else(|| {
            DecomposeError::Replay(format!("replayed {:?} does not match", mv.kind()))
        })?;
        h = next;
        moves.push(mv);
    }
    Ok(moves)
}

/// Splits `g` into components and reduces each to a seed.
pub fn decompose(g: &GainGraph, p: SparsityParams) -> Result<ConstructionSequence, DecomposeError> {
    if !supported(p) {
        return Err(DecomposeError::UnsupportedCounts(p));
    }
    if !check_tight(g, p)? {
        return Err(DecomposeError::NotTight(p));
    }
    let components = g.components();
    let mut initial = Vec::new();
    let mut local_moves = Vec::new();
    for comp in &components {
        let sub = g.induced(comp);
        let (base, iso, stages) = reduce_component(&sub, p)?;
        initial.push(base);
        local_moves.push((base, replay_component(&sub, iso, &stages, base)?));
    }
    // Components are replayed one after another on the union, translating
    // local labels to global ones.
    let mut global = initial
        .iter()
        .fold(GainGraph::new(0), |acc, b| acc.disjoint_union(&b.graph()));
    let mut steps = Vec::new();
    let mut vertex_offset = 0usize;
    let mut edge_offset = 0u32;
    for (base, moves) in local_moves {
        let seed = base.graph();
        let mut vmap: Vec<usize> = (0..seed.vertex_count()).map(|x| x + vertex_offset).collect();
        let mut emap: HashMap<EdgeId, EdgeId> = seed
            .edges()
            .iter()
            .map(|e| (e.id, EdgeId(e.id.0 + edge_offset)))
            .collect();
        vertex_offset += seed.vertex_count();
        edge_offset += seed.edge_count() as u32;
        let mut local = seed;
        for mv in moves {
            let gmv = embed_move(&mv, &local, &vmap, &emap)?;
            let next_local = apply_move(&local, &mv)?;
            let next_global = apply_move(&global, &gmv)?;
            for x in local.vertex_count()..next_local.vertex_count() {
                vmap.push(global.vertex_count() + x - local.vertex_count());
            }
            let fresh_local = next_local
                .edges()
                .iter()
                .filter(|e| e.id >= local.next_edge_id());
            let fresh_global = next_global
                .edges()
                .iter()
                .filter(|e| e.id >= global.next_edge_id());
            for (a, b) in fresh_local.zip(fresh_global) {
                emap.insert(a.id, b.id);
            }
            local = next_local;
            global = next_global;
            steps.push(gmv);
        }
    }
    Ok(ConstructionSequence {
        counts: p,
        initial,
        steps,
    })
}

/// A random tight graph on `n` vertices built by random moves from a random
/// seed; deterministic in `seed`.
pub fn random_tight(n: usize, p: SparsityParams, seed: u64) -> Result<GainGraph, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tight_with(n, p, &mut rng)
}

pub fn random_tight_with<R: Rng + ?Sized>(
    n: usize,
    p: SparsityParams,
    rng: &mut R,
) -> Result<GainGraph, GenerateError> {
    let unreachable = GenerateError::Unreachable { n, counts: p };
    let mut g = if p == SparsityParams::TWO_TWO_TWO {
        if n == 0 {
            return Err(unreachable);
        }
        BaseGraph::Point.graph()
    } else if p == SparsityParams::TWO_TWO_ZERO {
        let fits: Vec<BaseGraph> = BaseGraph::TWO_TWO_ZERO
            .into_iter()
            .filter(|b| b.graph().vertex_count() <= n)
            .collect();
        fits.choose(rng).ok_or(unreachable)?.graph()
    } else {
        return Err(DecomposeError::UnsupportedCounts(p).into());
    };
    let kinds = allowed_kinds(p);
    while g.vertex_count() < n {
        let room = n - g.vertex_count();
        let usable: Vec<MoveKind> = kinds
            .iter()
            .copied()
            .filter(|k| k.added_vertices() <= room)
            .collect();
        let kind = *usable.choose(rng).expect("single-vertex moves always fit");
        let Some(mv) = random_move(&g, kind, rng) else {
            continue;
        };
        if let Ok(h) = apply_move(&g, &mv) {
            debug_assert!(check_tight(&h, p).unwrap_or(false), "{mv:?} broke tightness");
            g = h;
        }
    }
    Ok(g)
}
