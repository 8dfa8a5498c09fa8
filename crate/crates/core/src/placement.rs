//! Rational placements of construction sequences as χ-isostatic half-turn
//! frameworks in a quadrilateral-normed plane.
//!
//! Placement works in facet coordinates `u = F₁·x`, `w = F₂·x` and their
//! rotation `α = u + w`, `β = u − w`. An edge from a new vertex `p` to a
//! fixed covering point `a` (its apex) has colour F₁ exactly when
//! `(α(p) − α(a))·(β(p) − β(a)) > 0`, so the positions of `p` that give one
//! colouring of the new edges form the open cells of the axis-parallel grid
//! through the apexes. Every cell is tried in seeded random order. A sampled
//! point is accepted only when the colouring oracle and the orbit-matrix rank
//! agree that the framework is isostatic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::BaseGraph;
use crate::colouring::{geometric_verdict, verdict_from_classes, ColouredQuotient, ColouringError};
use crate::constructor::ConstructionSequence;
use crate::gain_graph::{EdgeId, Gain, GainGraph, GraphError};
use crate::moves::{apply_move, Move, MoveError, MoveKind};
use crate::norm::{Facet, Norm, NormError};
use crate::rational::Q;
use crate::sparsity::SparsityParams;
use crate::symrigidity::{analyse, well_positioned, Framework, FrameworkError, RigidityError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RealisationConfig {
    pub seed: u64,
    /// Initial scale of the K₄ gadget relative to unit facet coordinates;
    /// halved after each failed attempt.
    pub radius: Q,
    /// Samples per candidate cell, and halvings of the K₄ scale.
    pub max_retries: usize,
    /// Sample points in a cell lie on a grid of this many steps per cell
    /// width, refined by a factor of two on every retry.
    pub grid_denominator: u32,
    pub norm: Norm,
}

impl Default for RealisationConfig {
    fn default() -> Self {
        RealisationConfig {
            seed: 0,
            radius: Q(BigRational::new(1.into(), 4.into())),
            max_retries: 24,
            grid_denominator: 8,
            norm: Norm::Linf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("realisation of {counts:?}-tight graphs for character {j} is not supported")]
    UnsupportedCharacter { j: usize, counts: SparsityParams },
    #[error("a graph with {vertices} vertices and {edges} edges cannot be isostatic")]
    WrongCounts { vertices: usize, edges: usize },
    #[error("placement needs a quadrilateral norm")]
    NotPolyhedral,
    #[error("no colouring of the new edges of {kind:?} gives an isostatic framework")]
    NoValidCell { kind: MoveKind },
    #[error("{kind:?}: no verified placement after {attempts} attempts")]
    RetriesExhausted { kind: MoveKind, attempts: usize },
    #[error("the base placement of {0} failed verification")]
    BadBase(&'static str),
    #[error("colouring and rank verdicts disagree for character {j}")]
    OracleDisagreement { j: usize },
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Colouring(#[from] ColouringError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The character a framework can be isostatic for, read off its counts.
fn character_of(vertices: usize, edges: usize) -> Option<usize> {
    if edges == 2 * vertices {
        Some(0)
    } else if edges + 2 == 2 * vertices {
        Some(1)
    } else {
        None
    }
}

fn counts_for(j: usize) -> Option<SparsityParams> {
    match j {
        0 => Some(SparsityParams::TWO_TWO_ZERO),
        1 => Some(SparsityParams::TWO_TWO_TWO),
        _ => None,
    }
}

/// Runs both oracles. `Ok(true)` means well-positioned and isostatic for
/// `j`; a disagreement between them is an error.
pub fn verify(fw: &Framework, j: usize) -> Result<bool, PlacementError> {
    if !well_positioned(fw) {
        return Ok(false);
    }
    let geo = geometric_verdict(fw)?;
    let geo = if j == 0 { geo.chi0_isostatic } else { geo.chi1_isostatic };
    let rank = analyse(fw, j)?.isostatic;
    if geo != rank {
        return Err(PlacementError::OracleDisagreement { j });
    }
    Ok(rank)
}

/// Facet coordinates of the base placements (for ℓ∞ these are the
/// positions themselves).
fn base_coordinates(b: BaseGraph) -> Vec<(i64, i64)> {
    match b {
        BaseGraph::DoubleEdgeLoops => vec![(-20, 25), (20, 11)],
        BaseGraph::LoopedTriangle => vec![(-25, 13), (15, 21), (-15, 31)],
        BaseGraph::R => vec![(-10, 0), (10, 11), (-6, 18)],
        BaseGraph::K4TwoLoops => vec![(-25, 0), (-5, 0), (-5, 11), (-21, 18)],
        BaseGraph::K4LoopAdjacentTwist | BaseGraph::K4LoopOppositeTwist => {
            vec![(-25, -5), (-5, -5), (-5, 6), (-21, 13)]
        }
        BaseGraph::K4AdjacentTwists => vec![(-50, -1), (-10, -1), (-10, 22), (-42, 35)],
        BaseGraph::K4DisjointTwists => vec![(-25, 1), (-5, 1), (-5, 13), (-21, 19)],
        BaseGraph::Point => vec![(3, 1)],
    }
}

fn base_positions(b: BaseGraph, scale: &BigRational, norm: &Norm) -> Result<Vec<Vec<BigRational>>, PlacementError> {
    base_coordinates(b)
        .into_iter()
        .map(|(u, w)| {
            let p = norm.from_facet_coordinates(&[q(u) * scale, q(w) * scale])?;
            Ok(p.to_vec())
        })
        .collect()
}

/// A verified isostatic placement of a seed graph: χ₀ for the (2,2,0)
/// seeds, χ₁ for the point.
pub fn base_placement(b: BaseGraph, cfg: &RealisationConfig) -> Result<Framework, PlacementError> {
    if !cfg.norm.is_polyhedral() {
        return Err(PlacementError::NotPolyhedral);
    }
    let fw = Framework::half_turn(&b.graph(), base_positions(b, &q(1), &cfg.norm)?, cfg.norm.clone())?;
    let j = if b == BaseGraph::Point { 1 } else { 0 };
    if !verify(&fw, j)? {
        return Err(PlacementError::BadBase(b.id()));
    }
    Ok(fw)
}

fn place_initial(bases: &[BaseGraph], j: usize, cfg: &RealisationConfig) -> Result<Framework, PlacementError> {
    let g = bases
        .iter()
        .fold(GainGraph::new(0), |acc, b| acc.disjoint_union(&b.graph()));
    let mut last = None;
    for attempt in 0..cfg.max_retries.max(1) {
        let mut positions = Vec::new();
        for (i, &b) in bases.iter().enumerate() {
            // Copies are scaled apart; a collision is retried with other factors.
            let scale = q(1) + q((i * (attempt + 1)) as i64) + frac(i as i64, attempt as i64 + 3);
            positions.extend(base_positions(b, &scale, &cfg.norm)?);
        }
        match Framework::half_turn(&g, positions, cfg.norm.clone()) {
            Ok(fw) if verify(&fw, j)? => return Ok(fw),
            Ok(_) => last = None,
            Err(e) => last = Some(e),
        }
    }
    Err(last.map_or(PlacementError::BadBase("union"), PlacementError::Framework))
}

/// Places a whole construction sequence, verifying every intermediate
/// framework.
pub fn realize(seq: &ConstructionSequence, j: usize, cfg: &RealisationConfig) -> Result<Framework, PlacementError> {
    if counts_for(j) != Some(seq.counts) {
        return Err(PlacementError::UnsupportedCharacter { j, counts: seq.counts });
    }
    if !cfg.norm.is_polyhedral() {
        return Err(PlacementError::NotPolyhedral);
    }
    let mut fw = place_initial(&seq.initial, j, cfg)?;
    for mv in &seq.steps {
        fw = extend_placement(&fw, mv, cfg)?;
    }
    Ok(fw)
}

/// Places the vertices a move adds, keeping the other positions (up to a
/// small perturbation of the expanded vertex for the K₄ move).
pub fn extend_placement(fw: &Framework, mv: &Move, cfg: &RealisationConfig) -> Result<Framework, PlacementError> {
    let h = fw.gain_graph().ok_or(ColouringError::NotHalfTurn)?;
    let g = apply_move(&h, mv)?;
    let Some(j) = character_of(g.vertex_count(), g.edge_count()) else {
        return Err(PlacementError::WrongCounts {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
        });
    };
    let mut rng = ChaCha8Rng::seed_from_u64(
        cfg.seed ^ (g.vertex_count() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    match mv {
        Move::VertexToK4 { vertex, .. } => place_k4(fw, &g, *vertex, j, cfg),
        _ => place_vertex(fw, &g, mv.kind(), j, cfg, &mut rng),
    }
}

fn alpha_beta(norm: &Norm, x: &[BigRational]) -> Result<(BigRational, BigRational), NormError> {
    let [u, w] = norm.facet_coordinates(x)?;
    Ok((&u + &w, u - w))
}

/// Open intervals between consecutive distinct values, with unbounded
/// ends represented by `None`.
fn intervals(mut vals: Vec<BigRational>) -> Vec<(Option<BigRational>, Option<BigRational>)> {
    vals.sort();
    vals.dedup();
    let mut out = Vec::with_capacity(vals.len() + 1);
    let mut lo = None;
    for v in vals {
        out.push((lo.take(), Some(v.clone())));
        lo = Some(v);
    }
    out.push((lo, None));
    out
}

fn sample_in(
    iv: &(Option<BigRational>, Option<BigRational>),
    reach: &BigRational,
    steps: u64,
    rng: &mut impl Rng,
) -> BigRational {
    let k = frac(rng.gen_range(1..steps) as i64, steps as i64);
    match iv {
        (Some(lo), Some(hi)) => lo + (hi - lo) * k,
        (Some(lo), None) => lo + reach * k,
        (None, Some(hi)) => hi - reach * k,
        (None, None) => reach * (k * q(2) - q(1)),
    }
}

/// Places the single new vertex (the last index of `g`).
fn place_vertex(
    fw: &Framework,
    g: &GainGraph,
    kind: MoveKind,
    j: usize,
    cfg: &RealisationConfig,
    rng: &mut impl Rng,
) -> Result<Framework, PlacementError> {
    let norm = &cfg.norm;
    let v = g.vertex_count() - 1;
    let old = fw.positions();

    // Colours of the surviving edges and apexes of the new ones.
    let mut base = ColouredQuotient { f1: Vec::new(), f2: Vec::new() };
    let mut apexes: Vec<(EdgeId, BigRational, BigRational)> = Vec::new();
    for e in g.edges() {
        if e.u == v || e.v == v {
            let apex = if e.is_loop() {
                vec![q(0), q(0)]
            } else {
                let w = if e.u == v { e.v } else { e.u };
                match e.gain {
                    Gain::Plus => old[w].clone(),
                    Gain::Minus => old[w].iter().map(|x| -x).collect(),
                }
            };
            let (a, b) = alpha_beta(norm, &apex)?;
            apexes.push((e.id, a, b));
        } else {
            let sign = if e.gain == Gain::Minus { -q(1) } else { q(1) };
            let delta: Vec<BigRational> = old[e.u].iter().zip(&old[e.v]).map(|(a, b)| a - b * &sign).collect();
            match norm.colour(&delta).map_err(|_| ColouringError::ConeBoundary(e.id))? {
                Facet::F1 => base.f1.push(e.id),
                Facet::F2 => base.f2.push(e.id),
            }
        }
    }

    let alphas = intervals(apexes.iter().map(|(_, a, _)| a.clone()).collect());
    let betas = intervals(apexes.iter().map(|(_, _, b)| b.clone()).collect());
    let spread = |vals: Vec<&BigRational>| {
        let max = vals.iter().map(|x| x.abs()).max().unwrap_or_else(|| q(0));
        max + q(1)
    };
    let reach = spread(apexes.iter().flat_map(|(_, a, b)| [a, b]).collect());

    let mut cells = Vec::new();
    for ia in &alphas {
        for ib in &betas {
            // Any interior point decides the colouring of the cell.
            let a = sample_in(ia, &reach, 2, rng);
            let b = sample_in(ib, &reach, 2, rng);
            let mut c = base.clone();
            for (id, aa, bb) in &apexes {
                if ((&a - aa) * (&b - bb)).is_positive() {
                    c.f1.push(*id);
                } else {
                    c.f2.push(*id);
                }
            }
            let verdict = verdict_from_classes(g, &c)?;
            let ok = if j == 0 { verdict.chi0_isostatic } else { verdict.chi1_isostatic };
            if ok {
                cells.push((ia.clone(), ib.clone()));
            }
        }
    }
    if cells.is_empty() {
        return Err(PlacementError::NoValidCell { kind });
    }
    cells.shuffle(rng);

    let mut attempts = 0;
    for (ia, ib) in &cells {
        for attempt in 0..cfg.max_retries.max(1) {
            attempts += 1;
            let steps = u64::from(cfg.grid_denominator.max(2)) << attempt.min(20);
            let a = sample_in(ia, &reach, steps, rng);
            let b = sample_in(ib, &reach, steps, rng);
            let half = frac(1, 2);
            let p = norm.from_facet_coordinates(&[(&a + &b) * &half, (&a - &b) * &half])?;
            let mut positions = old.to_vec();
            positions.push(p.to_vec());
            let Ok(next) = Framework::half_turn(g, positions, norm.clone()) else {
                continue;
            };
            if verify(&next, j)? {
                return Ok(next);
            }
        }
    }
    Err(PlacementError::RetriesExhausted { kind, attempts })
}

/// Facet coordinates of the K₄ gadget: edges 01, 23, 03 are F₁ and
/// 21, 02, 13 are F₂, so each class is a spanning tree of the K₄.
fn k4_template() -> [[BigRational; 2]; 4] {
    [
        [q(-1), q(0)],
        [q(1), q(0)],
        [frac(-3, 5), frac(9, 5)],
        [q(1), frac(11, 10)],
    ]
}

/// Shrinks the gadget around `p_vertex` until the attached edges keep the
/// colours the expanded vertex gave them.
fn place_k4(
    fw: &Framework,
    g: &GainGraph,
    vertex: usize,
    j: usize,
    cfg: &RealisationConfig,
) -> Result<Framework, PlacementError> {
    let norm = &cfg.norm;
    let centre = fw.positions()[vertex].clone();
    let mut eps = cfg.radius.0.clone();
    if !eps.is_positive() {
        eps = q(1);
    }
    let template: Vec<[BigRational; 2]> = k4_template()
        .iter()
        .map(|t| norm.from_facet_coordinates(t))
        .collect::<Result<_, _>>()?;
    let first_new = fw.vertex_count();
    let attempts = cfg.max_retries.max(1);
    for _ in 0..attempts {
        let at = |t: &[BigRational; 2]| -> Vec<BigRational> {
            centre.iter().zip(t).map(|(c, x)| c + x * &eps).collect()
        };
        let mut positions = fw.positions().to_vec();
        positions[vertex] = at(&template[0]);
        debug_assert_eq!(positions.len(), first_new);
        positions.extend(template[1..].iter().map(at));
        if let Ok(next) = Framework::half_turn(g, positions, norm.clone()) {
            if verify(&next, j)? {
                return Ok(next);
            }
        }
        eps /= q(2);
    }
    Err(PlacementError::RetriesExhausted {
        kind: MoveKind::VertexToK4,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructor::random_tight;
    use crate::constructor::decompose;

    #[test]
    fn every_base_placement_verifies() {
        for b in BaseGraph::TWO_TWO_ZERO.into_iter().chain([BaseGraph::Point]) {
            base_placement(b, &RealisationConfig::default()).unwrap();
        }
    }

    #[test]
    fn base_placements_transfer_to_l1() {
        let cfg = RealisationConfig {
            norm: Norm::L1,
            ..Default::default()
        };
        for b in BaseGraph::TWO_TWO_ZERO {
            base_placement(b, &cfg).unwrap();
        }
    }

    #[test]
    fn k4_template_classes_are_trees() {
        let t = k4_template();
        let colour = |a: usize, b: usize| {
            let d: Vec<BigRational> = (0..2).map(|i| &t[a][i] - &t[b][i]).collect();
            Norm::Linf.colour(&d).unwrap()
        };
        for (a, b) in [(0, 1), (2, 3), (0, 3)] {
            assert_eq!(colour(a, b), Facet::F1);
        }
        for (a, b) in [(2, 1), (0, 2), (1, 3)] {
            assert_eq!(colour(a, b), Facet::F2);
        }
    }

    #[test]
    fn small_random_graphs_realise() {
        for (j, p) in [(0, SparsityParams::TWO_TWO_ZERO), (1, SparsityParams::TWO_TWO_TWO)] {
            for seed in 0..6 {
                let g = random_tight(6, p, seed).unwrap();
                let seq = decompose(&g, p).unwrap();
                let fw = realize(&seq, j, &RealisationConfig { seed, ..Default::default() }).unwrap();
                assert!(verify(&fw, j).unwrap());
            }
        }
    }
}
