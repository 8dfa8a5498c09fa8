//! Framework colourings for quadrilateral norms and the combinatorial
//! rigidity tests they support for half-turn symmetry.

use serde::Serialize;
use thiserror::Error;

use crate::gain_graph::{EdgeId, GainGraph, GraphError};
use crate::norm::{Facet, NormError};
use crate::symrigidity::Framework;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColouringError {
    #[error("edge {0} is not well-positioned")]
    ConeBoundary(EdgeId),
    #[error("colourings need a quadrilateral norm")]
    NotPolyhedral,
    #[error("colourings are defined for half-turn symmetry only")]
    NotHalfTurn,
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Edge orbits split by framework colour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColouredQuotient {
    pub f1: Vec<EdgeId>,
    pub f2: Vec<EdgeId>,
}

impl ColouredQuotient {
    pub fn class(&self, facet: Facet) -> &[EdgeId] {
        match facet {
            Facet::F1 => &self.f1,
            Facet::F2 => &self.f2,
        }
    }

    pub fn colour_of(&self, id: EdgeId) -> Option<Facet> {
        if self.f1.contains(&id) {
            Some(Facet::F1)
        } else if self.f2.contains(&id) {
            Some(Facet::F2)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GeometricVerdict {
    pub chi0_isostatic: bool,
    pub chi1_isostatic: bool,
    pub infinitesimally_rigid: bool,
}

pub fn edge_colour(fw: &Framework, id: EdgeId) -> Result<Facet, ColouringError> {
    let e = fw
        .edges()
        .iter()
        .find(|e| e.id == id)
        .ok_or(ColouringError::UnknownEdge(id))?;
    fw.norm()
        .colour(&fw.edge_difference(e))
        .map_err(|err| match err {
            NormError::NotPolyhedral => ColouringError::NotPolyhedral,
            _ => ColouringError::ConeBoundary(id),
        })
}

pub fn monochrome_quotients(fw: &Framework) -> Result<ColouredQuotient, ColouringError> {
    let mut out = ColouredQuotient {
        f1: Vec::new(),
        f2: Vec::new(),
    };
    for e in fw.edges() {
        match edge_colour(fw, e.id)? {
            Facet::F1 => out.f1.push(e.id),
            Facet::F2 => out.f2.push(e.id),
        }
    }
    Ok(out)
}

/// Subgraph on the given edges, keeping every vertex of `g`.
fn edge_subgraph(g: &GainGraph, subset: &[EdgeId]) -> Result<GainGraph, GraphError> {
    let edges = subset
        .iter()
        .map(|&id| g.edge(id).copied().ok_or(GraphError::UnknownEdge(id)))
        .collect::<Result<Vec<_>, _>>()?;
    GainGraph::from_edge_records(g.vertex_count(), edges)
}

/// Every component (over the vertices the edges touch, or over all vertices
/// when `spanning`) has as many edges as vertices and an unbalanced cycle.
pub fn is_unbalanced_map_graph(
    g: &GainGraph,
    subset: &[EdgeId],
    spanning: bool,
) -> Result<bool, GraphError> {
    let h = edge_subgraph(g, subset)?;
    for comp in h.components() {
        let ids: Vec<EdgeId> = h
            .edges()
            .iter()
            .filter(|e| comp.contains(&e.u))
            .map(|e| e.id)
            .collect();
        if ids.is_empty() && !spanning {
            continue;
        }
        if ids.len() != comp.len() || h.is_balanced(&ids)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The edges form a spanning tree of `g` (loops count as cycles).
pub fn is_spanning_tree(g: &GainGraph, subset: &[EdgeId]) -> Result<bool, GraphError> {
    let h = edge_subgraph(g, subset)?;
    Ok(h.edge_count() + 1 == h.vertex_count() && h.components().len() == 1)
}

/// Spanning, connected, with an unbalanced cycle; such a class contains a
/// connected spanning unbalanced map graph.
pub fn contains_connected_unbalanced_map(g: &GainGraph, subset: &[EdgeId]) -> Result<bool, GraphError> {
    let h = edge_subgraph(g, subset)?;
    Ok(h.components().len() == 1 && !h.is_balanced(subset)?)
}

/// Colouring-based rigidity verdicts of a half-turn framework in a
/// quadrilateral-normed plane.
pub fn geometric_verdict(fw: &Framework) -> Result<GeometricVerdict, ColouringError> {
    if fw.order() != 2 {
        return Err(ColouringError::NotHalfTurn);
    }
    if !fw.norm().is_polyhedral() {
        return Err(ColouringError::NotPolyhedral);
    }
    let g = fw.gain_graph().ok_or(ColouringError::NotHalfTurn)?;
    let c = monochrome_quotients(fw)?;
    Ok(verdict_from_classes(&g, &c)?)
}

/// The verdicts determined by a colouring of the quotient's edges.
pub fn verdict_from_classes(
    g: &GainGraph,
    c: &ColouredQuotient,
) -> Result<GeometricVerdict, GraphError> {
    let both = |test: &dyn Fn(&[EdgeId]) -> Result<bool, GraphError>| -> Result<bool, GraphError> {
        Ok(test(&c.f1)? && test(&c.f2)?)
    };
    let n = g.vertex_count();
    let e = g.edge_count();
    let chi0 = e == 2 * n && both(&|s| is_unbalanced_map_graph(g, s, true))?;
    let chi1 = e + 2 == 2 * n && both(&|s| is_spanning_tree(g, s))?;
    let rigid = both(&|s| contains_connected_unbalanced_map(g, s))?;
    Ok(GeometricVerdict {
        chi0_isostatic: chi0,
        chi1_isostatic: chi1,
        infinitesimally_rigid: rigid,
    })
}
