//! Rigidity matrices of rotationally symmetric frameworks and their
//! character blocks.
//!
//! A framework is stored by its quotient: one representative position per
//! vertex orbit and one edge `ũ → ω^k ṽ` per edge orbit, where `ω` acts by
//! the rotation through `2π/n` in the first coordinate plane. Only `n ∈ {1,
//! 2, 4}` admit a supported norm for which that rotation is an isometry, so
//! every rotation matrix here is integral and every polyhedral computation
//! stays in exact rational (or Gaussian rational) arithmetic. Smooth `ℓᵖ`
//! norms have irrational gradients and fall back to a floating-point SVD.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::ops::Neg;
use thiserror::Error;

use crate::gain_graph::{EdgeId, Gain, GainGraph, GraphError};
use crate::linalg::{complex_rational_rank, exact_rank, float_rank_with, RANK_TOLERANCE};
use crate::norm::{Norm, NormError};
use crate::rational::to_f64;
use crate::sparsity::SparsityParams;

/// An edge orbit `ũ → ω^shift ṽ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CyclicEdge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub shift: usize,
}

impl CyclicEdge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameworkError {
    #[error("no supported norm is invariant under a rotation of order {0}")]
    UnsupportedOrder(usize),
    #[error("the norm is not invariant under the rotation of order {0}")]
    NormNotInvariant(usize),
    #[error("expected {expected} positions, got {got}")]
    PositionCount { expected: usize, got: usize },
    #[error("vertex {0} has a position of the wrong dimension")]
    Dimension(usize),
    #[error("edge {0} joins a vertex to itself without a rotation, or to a fixed image")]
    DegenerateLoop(EdgeId),
    #[error("edge {0} refers to a missing vertex")]
    VertexOutOfRange(EdgeId),
    #[error("edges {0} and {1} lift to the same covering edges")]
    ParallelOrbits(EdgeId, EdgeId),
    #[error("vertex {0} is fixed by the rotation")]
    FixedVertex(usize),
    #[error("covering vertices of orbits {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RigidityError {
    #[error("edge {0} is not well-positioned")]
    NotWellPositioned(EdgeId),
    #[error("character index {j} out of range for order {n}")]
    CharacterOutOfRange { j: usize, n: usize },
    #[error("no trivial-motion table for n = {n}, d = {d}")]
    Unsupported { n: usize, d: usize },
}

/// A `ℤₙ`-symmetric framework given by its quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct Framework {
    order: usize,
    vertex_count: usize,
    edges: Vec<CyclicEdge>,
    positions: Vec<Vec<BigRational>>,
    norm: Norm,
}

/// Applies `q` quarter turns to the first two coordinates.
fn quarter_turn<T: Clone + Neg<Output = T>>(x: &[T], q: usize) -> Vec<T> {
    let mut out = x.to_vec();
    let (a, b) = (x[0].clone(), x[1].clone());
    let (na, nb) = match q % 4 {
        0 => (a, b),
        1 => (-b, a),
        2 => (-a, -b),
        _ => (b, -a),
    };
    out[0] = na;
    out[1] = nb;
    out
}

impl Framework {
    pub fn new(
        order: usize,
        vertex_count: usize,
        edges: Vec<CyclicEdge>,
        positions: Vec<Vec<BigRational>>,
        norm: Norm,
    ) -> Result<Framework, FrameworkError> {
        if !matches!(order, 1 | 2 | 4) {
            return Err(FrameworkError::UnsupportedOrder(order));
        }
        if !norm.rotation_invariant(order) {
            return Err(FrameworkError::NormNotInvariant(order));
        }
        if positions.len() != vertex_count {
            return Err(FrameworkError::PositionCount {
                expected: vertex_count,
                got: positions.len(),
            });
        }
        let d = positions.first().map_or(2, Vec::len);
        norm.check_dimension(d)?;
        if let Some(v) = positions.iter().position(|p| p.len() != d) {
            return Err(FrameworkError::Dimension(v));
        }
        let mut edges = edges;
        for e in edges.iter_mut() {
            e.shift %= order;
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(FrameworkError::VertexOutOfRange(e.id));
            }
            if e.is_loop() && (2 * e.shift) % order == 0 && !(order == 2 && e.shift == 1) {
                return Err(FrameworkError::DegenerateLoop(e.id));
            }
        }
        edges.sort_by_key(|e| e.id);
        let fw = Framework {
            order,
            vertex_count,
            edges,
            positions,
            norm,
        };
        fw.check_covering()?;
        Ok(fw)
    }

    /// A half-turn symmetric framework on a ℤ₂-gain graph.
    pub fn half_turn(
        g: &GainGraph,
        positions: Vec<Vec<BigRational>>,
        norm: Norm,
    ) -> Result<Framework, FrameworkError> {
        g.validate()?;
        let edges = g
            .edges()
            .iter()
            .map(|e| CyclicEdge {
                id: e.id,
                u: e.u,
                v: e.v,
                shift: usize::from(e.gain == Gain::Minus),
            })
            .collect();
        Framework::new(2, g.vertex_count(), edges, positions, norm)
    }

    fn check_covering(&self) -> Result<(), FrameworkError> {
        let n = self.order;
        // (lower end, upper end, orbit) of each covering edge seen so far.
        type Lifted = ((usize, usize), (usize, usize), EdgeId);
        let mut lifted: Vec<Lifted> = Vec::new();
        for e in &self.edges {
            for i in 0..n {
                let a = (e.u, i);
                let b = (e.v, (i + e.shift) % n);
                let key = if a <= b { (a, b) } else { (b, a) };
                if let Some(&(_, _, other)) = lifted.iter().find(|(x, y, _)| (*x, *y) == key) {
                    if other != e.id {
                        return Err(FrameworkError::ParallelOrbits(other, e.id));
                    }
                    continue;
                }
                lifted.push((key.0, key.1, e.id));
            }
        }
        let mut points: Vec<(Vec<BigRational>, usize)> = Vec::new();
        for v in 0..self.vertex_count {
            for i in 0..n {
                let p = self.covering_position(v, i);
                if let Some((_, w)) = points.iter().find(|(q, _)| *q == p) {
                    return Err(if *w == v {
                        FrameworkError::FixedVertex(v)
                    } else {
                        FrameworkError::CoincidentPoints(*w, v)
                    });
                }
                points.push((p, v));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn dimension(&self) -> usize {
        self.positions.first().map_or(2, Vec::len)
    }

    pub fn edges(&self) -> &[CyclicEdge] {
        &self.edges
    }

    pub fn positions(&self) -> &[Vec<BigRational>] {
        &self.positions
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    /// The quotient as a ℤ₂-gain graph (half-turn frameworks only).
    pub fn gain_graph(&self) -> Option<GainGraph> {
        if self.order != 2 {
            return None;
        }
        let edges = self.edges.iter().map(|e| crate::gain_graph::Edge {
            id: e.id,
            u: e.u,
            v: e.v,
            gain: if e.shift == 1 { Gain::Minus } else { Gain::Plus },
        });
        GainGraph::from_edge_records(self.vertex_count, edges).ok()
    }

    /// Same framework with new positions.
    pub fn with_positions(&self, positions: Vec<Vec<BigRational>>) -> Result<Framework, FrameworkError> {
        Framework::new(
            self.order,
            self.vertex_count,
            self.edges.clone(),
            positions,
            self.norm.clone(),
        )
    }

    /// Same framework without one edge orbit.
    pub fn without_edge(&self, id: EdgeId) -> Framework {
        let mut fw = self.clone();
        fw.edges.retain(|e| e.id != id);
        fw
    }

    fn quarter_turns(&self, k: usize) -> usize {
        (k % self.order) * (4 / self.order)
    }

    /// Position of the copy `ωⁱ ṽ` in the covering framework.
    pub fn covering_position(&self, v: usize, i: usize) -> Vec<BigRational> {
        quarter_turn(&self.positions[v], self.quarter_turns(i))
    }

    /// Representative difference vector `p_u − τ(ω^k) p_v` of an edge orbit.
    pub fn edge_difference(&self, e: &CyclicEdge) -> Vec<BigRational> {
        let pv = self.covering_position(e.v, e.shift);
        self.positions[e.u]
            .iter()
            .zip(pv)
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// True when the norm is differentiable along every edge of the covering.
pub fn well_positioned(fw: &Framework) -> bool {
    fw.edges
        .iter()
        .all(|e| fw.norm.is_smooth_at(&fw.edge_difference(e)))
}

fn first_rough_edge(fw: &Framework) -> Option<EdgeId> {
    fw.edges
        .iter()
        .find(|e| !fw.norm.is_smooth_at(&fw.edge_difference(e)))
        .map(|e| e.id)
}

/// Row functional of an edge with difference `delta` (exact, polyhedral
/// norms only).
pub fn support_covector(norm: &Norm, delta: &[BigRational]) -> Result<Vec<BigRational>, NormError> {
    norm.exact_covector(delta)
}

/// Entries of a rigidity or orbit matrix.
#[derive(Clone, Debug)]
pub enum MatrixEntries {
    Rational(Vec<Vec<BigRational>>),
    GaussianRational(Vec<Vec<Complex<BigRational>>>),
    Float(DMatrix<Complex<f64>>),
}

impl MatrixEntries {
    pub fn rank(&self) -> usize {
        self.rank_with_tolerance(RANK_TOLERANCE)
    }

    /// Rank with a relative singular-value cut-off; exact entries ignore it.
    pub fn rank_with_tolerance(&self, tolerance: f64) -> usize {
        match self {
            MatrixEntries::Rational(m) => exact_rank(m.clone()),
            MatrixEntries::GaussianRational(m) => complex_rational_rank(m.clone()),
            MatrixEntries::Float(m) => float_rank_with(m, tolerance),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, MatrixEntries::Float(_))
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixEntries::Rational(m) => (m.len(), m.first().map_or(0, Vec::len)),
            MatrixEntries::GaussianRational(m) => (m.len(), m.first().map_or(0, Vec::len)),
            MatrixEntries::Float(m) => (m.nrows(), m.ncols()),
        }
    }
}

/// Rigidity matrix of the covering framework.
#[derive(Clone, Debug)]
pub struct RigidityMatrix {
    /// `(edge orbit, copy index)` per row.
    pub rows: Vec<(EdgeId, usize)>,
    /// `(vertex orbit, copy index, coordinate)` per column.
    pub columns: Vec<(usize, usize, usize)>,
    pub entries: MatrixEntries,
}

/// Character block `R_χⱼ` of the rigidity matrix.
#[derive(Clone, Debug)]
pub struct OrbitMatrix {
    pub character: usize,
    /// Edge orbit per row.
    pub rows: Vec<EdgeId>,
    /// `(vertex orbit, coordinate)` per column.
    pub columns: Vec<(usize, usize)>,
    pub entries: MatrixEntries,
}

impl OrbitMatrix {
    pub fn rank(&self) -> usize {
        self.entries.rank()
    }
}

fn covector_f64(fw: &Framework, delta: &[BigRational]) -> Result<Vec<f64>, NormError> {
    let d: Vec<f64> = delta.iter().map(to_f64).collect();
    fw.norm.float_covector(&d)
}

/// `|E|·n × d|V|·n` rigidity matrix of the covering framework (loops of a
/// half-turn give a single covering edge).
pub fn rigidity_matrix(fw: &Framework) -> Result<RigidityMatrix, RigidityError> {
    if let Some(id) = first_rough_edge(fw) {
        return Err(RigidityError::NotWellPositioned(id));
    }
    let n = fw.order;
    let d = fw.dimension();
    let col = |v: usize, i: usize| (v * n + i) * d;
    let mut rows = Vec::new();
    let mut seen = Vec::new();
    for e in &fw.edges {
        for i in 0..n {
            let a = (e.u, i);
            let b = (e.v, (i + e.shift) % n);
            let key = if a <= b { (a, b) } else { (b, a) };
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            rows.push((e.id, i, a, b));
        }
    }
    let columns = (0..fw.vertex_count)
        .flat_map(|v| (0..n).flat_map(move |i| (0..d).map(move |c| (v, i, c))))
        .collect::<Vec<_>>();
    let width = columns.len();
    let delta = |a: (usize, usize), b: (usize, usize)| -> Vec<BigRational> {
        fw.covering_position(a.0, a.1)
            .iter()
            .zip(fw.covering_position(b.0, b.1))
            .map(|(x, y)| x - y)
            .collect()
    };
    let entries = if fw.norm.is_polyhedral() {
        let mut m = vec![vec![BigRational::zero(); width]; rows.len()];
        for (r, &(id, _, a, b)) in rows.iter().enumerate() {
            let phi = fw
                .norm
                .exact_covector(&delta(a, b))
                .map_err(|_| RigidityError::NotWellPositioned(id))?;
            for c in 0..d {
                m[r][col(a.0, a.1) + c] += &phi[c];
                m[r][col(b.0, b.1) + c] -= &phi[c];
            }
        }
        MatrixEntries::Rational(m)
    } else {
        let mut m = DMatrix::<Complex<f64>>::zeros(rows.len(), width);
        for (r, &(id, _, a, b)) in rows.iter().enumerate() {
            let phi = covector_f64(fw, &delta(a, b)).map_err(|_| RigidityError::NotWellPositioned(id))?;
            for c in 0..d {
                m[(r, col(a.0, a.1) + c)] += Complex::new(phi[c], 0.0);
                m[(r, col(b.0, b.1) + c)] -= Complex::new(phi[c], 0.0);
            }
        }
        MatrixEntries::Float(m)
    };
    Ok(RigidityMatrix {
        rows: rows.iter().map(|&(id, i, _, _)| (id, i)).collect(),
        columns,
        entries,
    })
}

/// `χⱼ(ω^k)` as a power of `i` (orders 1, 2 and 4 only).
fn character_quarter_turns(n: usize, j: usize, k: usize) -> usize {
    (j * k % n) * (4 / n)
}

fn gaussian_unit(q: usize) -> Complex<BigRational> {
    let one = BigRational::one();
    let zero = BigRational::zero();
    match q % 4 {
        0 => Complex::new(one, zero),
        1 => Complex::new(zero, one),
        2 => Complex::new(-one, zero),
        _ => Complex::new(zero, -one),
    }
}

/// The block of the rigidity operator on the `χⱼ`-symmetric motions. The
/// row of `ũ → ω^k ṽ` carries `φ` on `ũ` and `−χⱼ(ω^k)·φ∘τ(ω^k)` on `ṽ`.
pub fn orbit_matrix(fw: &Framework, j: usize) -> Result<OrbitMatrix, RigidityError> {
    let n = fw.order;
    if j >= n {
        return Err(RigidityError::CharacterOutOfRange { j, n });
    }
    if let Some(id) = first_rough_edge(fw) {
        return Err(RigidityError::NotWellPositioned(id));
    }
    let d = fw.dimension();
    let columns: Vec<(usize, usize)> = (0..fw.vertex_count)
        .flat_map(|v| (0..d).map(move |c| (v, c)))
        .collect();
    let width = columns.len();
    let rows: Vec<EdgeId> = fw.edges.iter().map(|e| e.id).collect();
    let entries = if fw.norm.is_polyhedral() {
        let mut m = vec![vec![Complex::<BigRational>::zero(); width]; rows.len()];
        for (r, e) in fw.edges.iter().enumerate() {
            let phi = fw
                .norm
                .exact_covector(&fw.edge_difference(e))
                .map_err(|_| RigidityError::NotWellPositioned(e.id))?;
            // φ∘R is the covector Rᵀφ = R⁻¹φ.
            let turns = fw.quarter_turns(e.shift);
            let pulled = quarter_turn(&phi, (4 - turns) % 4);
            let chi = gaussian_unit(character_quarter_turns(n, j, e.shift));
            for c in 0..d {
                m[r][e.u * d + c] = &m[r][e.u * d + c] + Complex::new(phi[c].clone(), BigRational::zero());
                let term = chi.clone() * Complex::new(pulled[c].clone(), BigRational::zero());
                m[r][e.v * d + c] = &m[r][e.v * d + c] - term;
            }
        }
        if n <= 2 {
            MatrixEntries::Rational(
                m.into_iter()
                    .map(|row| row.into_iter().map(|z| z.re).collect())
                    .collect(),
            )
        } else {
            MatrixEntries::GaussianRational(m)
        }
    } else {
        let mut m = DMatrix::<Complex<f64>>::zeros(rows.len(), width);
        for (r, e) in fw.edges.iter().enumerate() {
            let phi = covector_f64(fw, &fw.edge_difference(e))
                .map_err(|_| RigidityError::NotWellPositioned(e.id))?;
            let turns = fw.quarter_turns(e.shift);
            let pulled = quarter_turn(&phi, (4 - turns) % 4);
            let angle = std::f64::consts::TAU * (j * e.shift % n) as f64 / n as f64;
            let chi = Complex::from_polar(1.0, angle);
            for c in 0..d {
                m[(r, e.u * d + c)] += Complex::new(phi[c], 0.0);
                m[(r, e.v * d + c)] -= chi * pulled[c];
            }
        }
        MatrixEntries::Float(m)
    };
    Ok(OrbitMatrix {
        character: j,
        rows,
        columns,
        entries,
    })
}

/// Dimension of the `χⱼ`-symmetric trivial motions of a framework in a
/// `d`-dimensional space whose rigid motions are just the translations,
/// under an `n`-fold rotation.
pub fn trivial_dim(n: usize, j: usize, d: usize) -> Result<usize, RigidityError> {
    if n == 0 || d < 2 {
        return Err(RigidityError::Unsupported { n, d });
    }
    if j >= n {
        return Err(RigidityError::CharacterOutOfRange { j, n });
    }
    Ok(match (n, j) {
        (1, _) => d,
        (_, 0) => d - 2,
        (2, _) => 2,
        (_, j) if j == 1 || j == n - 1 => 1,
        _ => 0,
    })
}

/// The counts a `χⱼ`-isostatic half-turn framework must satisfy.
pub fn necessary_counts(d: usize, j: usize) -> Option<SparsityParams> {
    let m = trivial_dim(2, j, d).ok()?;
    SparsityParams::new(d as u32, d as u32, m as u32).ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RigidityReport {
    pub character: usize,
    pub rank: usize,
    pub edge_orbits: usize,
    pub vertex_orbits: usize,
    pub dimension: usize,
    pub flex_dim: usize,
    pub trivial_dim: usize,
    /// Always true: with only translations as rigid motions, every
    /// framework is full.
    pub full: bool,
    pub infinitesimally_rigid: bool,
    pub independent: bool,
    pub isostatic: bool,
    /// Whether the rank was computed in exact arithmetic.
    pub exact: bool,
}

/// Rank-based rigidity verdicts for one character.
pub fn analyse(fw: &Framework, j: usize) -> Result<RigidityReport, RigidityError> {
    analyse_with_tolerance(fw, j, RANK_TOLERANCE)
}

/// [`analyse`] with an explicit cut-off for floating-point ranks.
pub fn analyse_with_tolerance(fw: &Framework, j: usize, tolerance: f64) -> Result<RigidityReport, RigidityError> {
    let m = orbit_matrix(fw, j)?;
    let rank = m.entries.rank_with_tolerance(tolerance);
    let d = fw.dimension();
    let vertices = fw.vertex_count;
    let edges = fw.edges.len();
    let t = trivial_dim(fw.order, j, d)?;
    let columns = d * vertices;
    let rigid = rank + t == columns;
    let independent = rank == edges;
    Ok(RigidityReport {
        character: j,
        rank,
        edge_orbits: edges,
        vertex_orbits: vertices,
        dimension: d,
        flex_dim: columns - rank,
        trivial_dim: t,
        full: true,
        infinitesimally_rigid: rigid,
        independent,
        isostatic: rigid && independent,
        exact: m.entries.is_exact(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::BaseGraph;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn pts(p: &[(i64, i64)]) -> Vec<Vec<BigRational>> {
        p.iter().map(|&(x, y)| vec![q(x), q(y)]).collect()
    }

    fn base_a() -> Framework {
        Framework::half_turn(
            &BaseGraph::DoubleEdgeLoops.graph(),
            pts(&[(-20, 25), (20, 11)]),
            Norm::Linf,
        )
        .unwrap()
    }

    #[test]
    fn single_edge_row() {
        let g = GainGraph::from_edges(2, [(0, 1, Gain::Plus)]).unwrap();
        let fw = Framework::new(
            1,
            2,
            vec![CyclicEdge {
                id: g.edges()[0].id,
                u: 0,
                v: 1,
                shift: 0,
            }],
            pts(&[(3, 1), (0, 0)]),
            Norm::Linf,
        )
        .unwrap();
        let m = rigidity_matrix(&fw).unwrap();
        let MatrixEntries::Rational(rows) = m.entries else {
            panic!("exact")
        };
        assert_eq!(rows, vec![vec![q(1), q(0), q(-1), q(0)]]);
    }

    #[test]
    fn base_a_covering_rank() {
        let fw = base_a();
        let m = rigidity_matrix(&fw).unwrap();
        assert_eq!(m.entries.shape(), (6, 8));
        assert_eq!(m.entries.rank(), 6);
        let r0 = analyse(&fw, 0).unwrap();
        assert!(r0.isostatic, "{r0:?}");
        let r1 = analyse(&fw, 1).unwrap();
        assert!(!r1.independent);
        assert_eq!(r0.rank + r1.rank, 6);
    }

    #[test]
    fn loop_rows_by_character() {
        let fw = base_a();
        let loop_id = fw.edges().iter().find(|e| e.is_loop()).unwrap().id;
        let row = |j: usize| {
            let m = orbit_matrix(&fw, j).unwrap();
            let r = m.rows.iter().position(|&id| id == loop_id).unwrap();
            let MatrixEntries::Rational(rows) = m.entries else {
                panic!("exact")
            };
            rows[r].clone()
        };
        assert!(row(1).iter().all(Zero::is_zero));
        assert!(row(0).iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn dropping_an_orbit_keeps_independence() {
        let fw = base_a().without_edge(EdgeId(0));
        let r = analyse(&fw, 0).unwrap();
        assert!(r.independent && !r.infinitesimally_rigid);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn trivial_table() {
        assert_eq!(trivial_dim(2, 0, 2).unwrap(), 0);
        assert_eq!(trivial_dim(2, 1, 2).unwrap(), 2);
        assert_eq!(trivial_dim(4, 2, 2).unwrap(), 0);
        assert_eq!(trivial_dim(6, 5, 3).unwrap(), 1);
        assert!(trivial_dim(2, 2, 2).is_err());
        assert_eq!(necessary_counts(2, 1), Some(SparsityParams::TWO_TWO_TWO));
    }

    #[test]
    fn rejects_bad_frameworks() {
        let g = BaseGraph::DoubleEdgeLoops.graph();
        assert!(matches!(
            Framework::half_turn(&g, pts(&[(0, 0), (1, 3)]), Norm::Linf),
            Err(FrameworkError::FixedVertex(0))
        ));
        assert!(matches!(
            Framework::half_turn(&g, pts(&[(1, 3), (-1, -3)]), Norm::Linf),
            Err(FrameworkError::CoincidentPoints(0, 1))
        ));
        let skew = Norm::quadrilateral([q(1), q(0)], [q(1), q(2)]).unwrap();
        assert!(matches!(
            Framework::new(4, 1, vec![], pts(&[(1, 0)]), skew),
            Err(FrameworkError::NormNotInvariant(4))
        ));
        let diag = Framework::half_turn(&g, pts(&[(1, 3), (3, 5)]), Norm::Linf).unwrap();
        assert!(!well_positioned(&diag));
        assert!(matches!(analyse(&diag, 0), Err(RigidityError::NotWellPositioned(_))));
    }
}
