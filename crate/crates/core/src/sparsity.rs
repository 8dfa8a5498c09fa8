//! (k,l,m)-gain-sparsity.
//!
//! A gain graph is (k,l,m)-gain-sparse when every nonempty edge set `F`
//! satisfies `|F| ≤ k|V(F)| − m` and every nonempty balanced `F` satisfies
//! `|F| ≤ k|V(F)| − l`. It is tight when additionally `|E| = k|V| − m`.
//!
//! [`check_sparsity`] scans vertex supports in increasing size. For the
//! general count the induced edge set is the worst case on a support. For
//! the balanced count, any balanced set on a support `S` is consistent with
//! some switching potential on `S`, so it suffices to take, for every such
//! potential, all induced non-loop edges consistent with it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gain_graph::{balance_potential, EdgeId, GainGraph, GraphError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct SparsityParams {
    k: u32,
    l: u32,
    m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparsityError {
    #[error("invalid counts ({k},{l},{m}): need k ≥ 1, 0 ≤ l ≤ 2k−1, 0 ≤ m ≤ l")]
    InvalidParams { k: u32, l: u32, m: u32 },
    #[error("cannot parse counts {0:?}; expected k,l,m")]
    Parse(String),
    #[error("graph has {0} vertices; the exhaustive checker handles at most 63")]
    TooManyVertices(usize),
    #[error("brute-force oracle limited to 20 edges, graph has {0}")]
    OracleGuard(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl SparsityParams {
    /// Counts matched by χ₀-symmetrically isostatic half-turn frameworks.
    pub const TWO_TWO_ZERO: SparsityParams = SparsityParams { k: 2, l: 2, m: 0 };
    /// Counts matched by χ₁-symmetrically isostatic half-turn frameworks.
    pub const TWO_TWO_TWO: SparsityParams = SparsityParams { k: 2, l: 2, m: 2 };

    pub fn new(k: u32, l: u32, m: u32) -> Result<Self, SparsityError> {
        if k == 0 || l >= 2 * k || m > l {
            return Err(SparsityError::InvalidParams { k, l, m });
        }
        Ok(SparsityParams { k, l, m })
    }

    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn m(&self) -> u32 {
        self.m
    }

    fn limit(&self, vertices: usize, kind: CountKind) -> i64 {
        let sub = match kind {
            CountKind::Balanced => self.l,
            CountKind::General => self.m,
        };
        i64::from(self.k) * vertices as i64 - i64::from(sub)
    }
}

impl TryFrom<[u32; 3]> for SparsityParams {
    type Error = SparsityError;
    fn try_from(v: [u32; 3]) -> Result<Self, Self::Error> {
        SparsityParams::new(v[0], v[1], v[2])
    }
}

impl From<SparsityParams> for [u32; 3] {
    fn from(p: SparsityParams) -> [u32; 3] {
        [p.k, p.l, p.m]
    }
}

impl FromStr for SparsityParams {
    type Err = SparsityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
        match parts.as_slice() {
            [Ok(k), Ok(l), Ok(m)] => SparsityParams::new(*k, *l, *m),
            _ => Err(SparsityError::Parse(s.to_string())),
        }
    }
}

impl fmt::Display for SparsityParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k, self.l, self.m)
    }
}

/// Which inequality a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    /// `|F| ≤ k|V(F)| − l` on balanced sets.
    Balanced,
    /// `|F| ≤ k|V(F)| − m` on all sets.
    General,
}

/// A nonempty edge set breaking one of the counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<usize>,
    pub size: usize,
    /// `k·|V(F)|`.
    pub k_times_vertices: i64,
    /// The bound `k|V(F)| − l` or `k|V(F)| − m` that `size` exceeds.
    pub limit: i64,
    pub kind: CountKind,
}

impl Witness {
    fn new(g: &GainGraph, edges: Vec<EdgeId>, p: SparsityParams, kind: CountKind) -> Witness {
        let mut vertices: Vec<usize> = edges
            .iter()
            .flat_map(|&id| {
                let e = g.edge(id).expect("witness edge");
                [e.u, e.v]
            })
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        Witness {
            size: edges.len(),
            k_times_vertices: i64::from(p.k) * vertices.len() as i64,
            limit: p.limit(vertices.len(), kind),
            edges,
            vertices,
            kind,
        }
    }

    /// Recomputes support, size and balance from the graph and confirms the
    /// violation.
    pub fn reverify(&self, g: &GainGraph, p: SparsityParams) -> bool {
        if self.edges.is_empty() {
            return false;
        }
        let fresh = Witness::new(g, self.edges.clone(), p, self.kind);
        if fresh.vertices != self.vertices || fresh.size as i64 <= fresh.limit {
            return false;
        }
        match self.kind {
            CountKind::General => true,
            CountKind::Balanced => g.is_balanced(&self.edges).unwrap_or(false),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// `2|V| − |E|`.
pub fn f_value(g: &GainGraph) -> i64 {
    2 * g.vertex_count() as i64 - g.edge_count() as i64
}

struct MaskEdge {
    id: EdgeId,
    ends: u64,
    u: u64,
    v: u64,
    is_loop: bool,
    twisted: bool,
}

fn mask_edges(g: &GainGraph) -> Vec<MaskEdge> {
    g.edges()
        .iter()
        .map(|e| MaskEdge {
            id: e.id,
            ends: (1u64 << e.u) | (1u64 << e.v),
            u: 1u64 << e.u,
            v: 1u64 << e.v,
            is_loop: e.is_loop(),
            twisted: e.gain == crate::gain_graph::Gain::Minus,
        })
        .collect()
}

/// Subsets of `0..n` with exactly `size` elements in increasing numeric order.
fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut current: Option<u64> = if size == 0 || size > n {
        None
    } else {
        Some((1u64 << size) - 1)
    };
    std::iter::from_fn(move || {
        let c = current?;
        // Gosper's hack for the next mask with the same popcount.
        let low = c & c.wrapping_neg();
        let ripple = c.wrapping_add(low);
        let next = (((ripple ^ c) >> 2) / low) | ripple;
        current = if ripple == 0 || next & !full != 0 {
            None
        } else {
            Some(next)
        };
        Some(c)
    })
}

/// Exhaustive sparsity check with a deterministic witness.
pub fn check_sparsity(g: &GainGraph, p: SparsityParams) -> Result<SparsityReport, SparsityError> {
    g.validate()?;
    let n = g.vertex_count();
    if n > 63 {
        return Err(SparsityError::TooManyVertices(n));
    }
    let edges = mask_edges(g);
    let k = i64::from(p.k);
    let check_balanced = p.l > p.m;
    for size in 1..=n {
        let general_limit = k * size as i64 - i64::from(p.m);
        let balanced_limit = k * size as i64 - i64::from(p.l);
        for s in subsets_of_size(n, size) {
            let induced: Vec<&MaskEdge> = edges.iter().filter(|e| e.ends & !s == 0).collect();
            let support = induced.iter().fold(0u64, |acc, e| acc | e.ends);
            if support != s {
                // Any violation here was already found on a smaller support.
                continue;
            }
            if induced.len() as i64 > general_limit {
                let ids = induced.iter().map(|e| e.id).collect();
                return Ok(SparsityReport {
                    passed: false,
                    witness: Some(Witness::new(g, ids, p, CountKind::General)),
                });
            }
            if !check_balanced {
                continue;
            }
            let non_loops: Vec<&MaskEdge> =
                induced.iter().copied().filter(|e| !e.is_loop).collect();
            if non_loops.len() as i64 <= balanced_limit {
                continue;
            }
            // Potentials are switchings on S; fixing the lowest vertex halves
            // the search.
            let free = s & !(s & s.wrapping_neg());
            let mut sigma = 0u64;
            loop {
                let consistent: Vec<&MaskEdge> = non_loops
                    .iter()
                    .copied()
                    .filter(|e| ((e.u & sigma != 0) != (e.v & sigma != 0)) == e.twisted)
                    .collect();
                if consistent.len() as i64 > balanced_limit
                    && consistent.iter().fold(0u64, |acc, e| acc | e.ends) == s
                {
                    let ids = consistent.iter().map(|e| e.id).collect();
                    return Ok(SparsityReport {
                        passed: false,
                        witness: Some(Witness::new(g, ids, p, CountKind::Balanced)),
                    });
                }
                if sigma == free {
                    break;
                }
                sigma = (sigma.wrapping_sub(free)) & free;
            }
        }
    }
    Ok(SparsityReport {
        passed: true,
        witness: None,
    })
}

/// Sparse and `|E| = k|V| − m`.
pub fn check_tight(g: &GainGraph, p: SparsityParams) -> Result<bool, SparsityError> {
    let target = i64::from(p.k) * g.vertex_count() as i64 - i64::from(p.m);
    if g.edge_count() as i64 != target {
        g.validate()?;
        return Ok(false);
    }
    Ok(check_sparsity(g, p)?.passed)
}

/// Reference implementation: enumerates every nonempty edge subset. Only
/// intended for cross-checking on small graphs.
pub fn brute_force_oracle(
    g: &GainGraph,
    p: SparsityParams,
) -> Result<SparsityReport, SparsityError> {
    g.validate()?;
    let e = g.edge_count();
    if e > 20 {
        return Err(SparsityError::OracleGuard(e));
    }
    let edges = g.edges();
    for mask in 1u32..(1u32 << e) {
        let subset: Vec<_> = (0..e)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| edges[i])
            .collect();
        let mut vertices: Vec<usize> = subset.iter().flat_map(|x| [x.u, x.v]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let size = subset.len() as i64;
        let ids: Vec<EdgeId> = subset.iter().map(|x| x.id).collect();
        if size > p.limit(vertices.len(), CountKind::General) {
            return Ok(SparsityReport {
                passed: false,
                witness: Some(Witness::new(g, ids, p, CountKind::General)),
            });
        }
        if size > p.limit(vertices.len(), CountKind::Balanced)
            && balance_potential(g.vertex_count(), &subset).is_some()
        {
            return Ok(SparsityReport {
                passed: false,
                witness: Some(Witness::new(g, ids, p, CountKind::Balanced)),
            });
        }
    }
    Ok(SparsityReport {
        passed: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gain_graph::Gain::{Minus, Plus};

    fn balanced_complete(n: usize) -> GainGraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b, Plus));
            }
        }
        GainGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SparsityParams::new(2, 2, 0).is_ok());
        assert!(SparsityParams::new(2, 4, 0).is_err());
        assert!(SparsityParams::new(2, 1, 2).is_err());
        assert!(SparsityParams::new(0, 0, 0).is_err());
        assert_eq!("2,2,2".parse::<SparsityParams>().unwrap(), SparsityParams::TWO_TWO_TWO);
        assert!("2,2".parse::<SparsityParams>().is_err());
    }

    #[test]
    fn f_values() {
        let a = GainGraph::from_edges(2, [(0, 1, Plus), (0, 1, Minus), (0, 0, Minus), (1, 1, Minus)])
            .unwrap();
        assert_eq!(f_value(&a), 0);
        let k4 = balanced_complete(4);
        assert_eq!(f_value(&k4), 2);
        let mut k4_plus = k4.clone();
        k4_plus.add_edge(0, 1, Minus);
        assert_eq!(f_value(&k4_plus), 1);
    }

    #[test]
    fn balanced_complete_five_fails_balanced_count() {
        // Ten balanced edges on five vertices exceed 2·5 − 2 = 8.
        let k5 = balanced_complete(5);
        let r = check_sparsity(&k5, SparsityParams::TWO_TWO_ZERO).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.kind, CountKind::Balanced);
        assert!(w.reverify(&k5, SparsityParams::TWO_TWO_ZERO));
        // The first offending support is a K4 plus one vertex: the smallest
        // supports with more than 2|S| − 2 balanced edges have five vertices.
        assert_eq!(w.vertices.len(), 5);
    }

    #[test]
    fn single_loop_is_sparse() {
        let g = GainGraph::from_edges(1, [(0, 0, Minus)]).unwrap();
        assert!(check_sparsity(&g, SparsityParams::TWO_TWO_ZERO).unwrap().passed);
        assert!(!check_tight(&g, SparsityParams::TWO_TWO_ZERO).unwrap());
    }

    #[test]
    fn tightness_examples() {
        let a = GainGraph::from_edges(2, [(0, 1, Plus), (0, 1, Minus), (0, 0, Minus), (1, 1, Minus)])
            .unwrap();
        assert!(check_tight(&a, SparsityParams::TWO_TWO_ZERO).unwrap());
        assert!(!check_tight(&balanced_complete(4), SparsityParams::TWO_TWO_ZERO).unwrap());
        assert!(check_tight(&GainGraph::new(1), SparsityParams::TWO_TWO_TWO).unwrap());
    }

    #[test]
    fn general_count_witness() {
        // With counts (1,1,1) a double edge on two vertices exceeds 1·2 − 1.
        let g = GainGraph::from_edges(2, [(0, 1, Plus), (0, 1, Minus)]).unwrap();
        let p = SparsityParams::new(1, 1, 1).unwrap();
        let r = check_sparsity(&g, p).unwrap();
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!(w.kind, CountKind::General);
        assert!(w.reverify(&g, p));
        assert!(!brute_force_oracle(&g, p).unwrap().passed);
    }

    #[test]
    fn oracle_guard_and_empty() {
        let g = GainGraph::new(3);
        assert!(brute_force_oracle(&g, SparsityParams::TWO_TWO_ZERO).unwrap().passed);
        let big = balanced_complete(7);
        assert!(matches!(
            brute_force_oracle(&big, SparsityParams::TWO_TWO_ZERO),
            Err(SparsityError::OracleGuard(21))
        ));
    }

    #[test]
    fn gosper_enumerates_all_subsets() {
        let total: usize = (1..=5).map(|s| subsets_of_size(5, s).count()).sum();
        assert_eq!(total, 31);
        assert_eq!(subsets_of_size(4, 2).collect::<Vec<_>>(), vec![3, 5, 6, 9, 10, 12]);
    }
}
