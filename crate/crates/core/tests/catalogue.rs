use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gainrig::catalog::{is_base_graph, BaseGraph};
use gainrig::constructor::{construct, decompose};
use gainrig::gain_graph::{Gain, GainGraph};
use gainrig::isomorphism::are_isomorphic;
use gainrig::moves::{apply_move, random_move, MoveKind};
use gainrig::placement::{base_placement, realize, RealisationConfig};
use gainrig::sparsity::{check_tight, SparsityParams};
use gainrig::symrigidity::{analyse, rigidity_matrix};

const K4_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[test]
fn seeds_are_pairwise_distinct() {
    let all = BaseGraph::TWO_TWO_ZERO;
    for (i, a) in all.iter().enumerate() {
        let g = a.graph();
        assert_eq!(g.edge_count(), 2 * g.vertex_count(), "{a}");
        for b in &all[i + 1..] {
            assert!(!are_isomorphic(&g, &b.graph()), "{a} ≅ {b}");
        }
    }
}

/// A balanced K₄ plus two extra edges (loops or twisted copies of K₄
/// edges) gives exactly the five seeds d–h up to relabelling and switching.
#[test]
fn k4_with_two_extra_edges_gives_five_classes() {
    let mut extras: Vec<(usize, usize, Gain)> = (0..4).map(|v| (v, v, Gain::Minus)).collect();
    extras.extend(K4_PAIRS.iter().map(|&(u, v)| (u, v, Gain::Minus)));
    let mut classes: Vec<GainGraph> = Vec::new();
    for i in 0..extras.len() {
        for j in i + 1..extras.len() {
            let edges = K4_PAIRS
                .iter()
                .map(|&(u, v)| (u, v, Gain::Plus))
                .chain([extras[i], extras[j]]);
            let g = GainGraph::from_edges(4, edges).unwrap();
            if check_tight(&g, SparsityParams::TWO_TWO_ZERO).unwrap()
                && !classes.iter().any(|c| are_isomorphic(c, &g))
            {
                classes.push(g);
            }
        }
    }
    assert_eq!(classes.len(), 5);
    let mut ids: Vec<&str> = classes
        .iter()
        .map(|g| is_base_graph(g).expect("every class is a seed").0.id())
        .collect();
    ids.sort_unstable();
    assert_eq!(ids, ["d", "e", "f", "g", "h"]);
}

/// Graphs grown from seeds (a) and (b) by H3 moves stay 4-regular, so no vertex of
/// degree 3 is available and decomposition has to undo degree-4 moves
/// (mostly H3, sometimes H2d, H2e or a vertex split).
#[test]
fn four_regular_graphs_decompose() {
    let h3 = [MoveKind::H3a, MoveKind::H3b, MoveKind::H3c, MoveKind::H3d];
    let p = SparsityParams::TWO_TWO_ZERO;
    let mut h3_steps = 0;
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = if seed % 2 == 0 { BaseGraph::DoubleEdgeLoops } else { BaseGraph::LoopedTriangle };
        let mut g = start.graph();
        let mut applied = 0;
        for _ in 0..60 {
            let kind = *h3.choose(&mut rng).unwrap();
            if let Some(mv) = random_move(&g, kind, &mut rng) {
                g = apply_move(&g, &mv).unwrap();
                applied += 1;
                if applied == 5 {
                    break;
                }
            }
        }
        assert!((0..g.vertex_count()).all(|v| g.degree(v) == 4), "seed {seed}");
        let seq = decompose(&g, p).unwrap();
        assert!(are_isomorphic(&construct(&seq).unwrap(), &g));
        h3_steps += seq.steps.iter().filter(|m| h3.contains(&m.kind())).count();
        let fw = realize(&seq, 0, &RealisationConfig { seed, ..Default::default() }).unwrap();
        assert!(analyse(&fw, 0).unwrap().isostatic);
    }
    assert!(h3_steps >= 30, "{h3_steps}");
}

/// Ranks of the fixed seed placements (χ₀ block, χ₁ block), computed
/// independently from the covering framework's ℓ∞ support functionals
/// restricted to symmetric and anti-symmetric motions, then frozen.
#[test]
fn seed_placement_ranks() {
    let cfg = RealisationConfig::default();
    let expected = [
        ("a", 4, 2),
        ("b", 6, 3),
        ("c", 6, 4),
        ("d", 8, 6),
        ("e", 8, 6),
        ("f", 8, 6),
        ("g", 8, 6),
        ("h", 8, 6),
    ];
    for (b, (id, r0, r1)) in BaseGraph::TWO_TWO_ZERO.into_iter().zip(expected) {
        assert_eq!(b.id(), id);
        let fw = base_placement(b, &cfg).unwrap();
        let a0 = analyse(&fw, 0).unwrap();
        let a1 = analyse(&fw, 1).unwrap();
        assert_eq!((a0.rank, a1.rank), (r0, r1), "{id}");
        assert_eq!(rigidity_matrix(&fw).unwrap().entries.rank(), r0 + r1);
    }
}
