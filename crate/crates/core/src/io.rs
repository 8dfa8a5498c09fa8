//! JSON file formats.
//!
//! A gain graph is `{"n": 2, "edges": [[0, 1, 1], [0, 0, -1]]}` with gains
//! written as ±1; edge ids are the positions in `edges`. A framework adds
//! `"positions"` (rationals as `"p/q"` strings, decimal strings or numbers),
//! `"group": {"n": order}` and `"norm"`. For order 4 the third entry of an
//! edge is the exponent `k` of the rotation `ω^k` instead of a sign.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gain_graph::{EdgeId, Gain, GainGraph, GraphError};
use crate::norm::Norm;
use crate::rational::Q;
use crate::symrigidity::{CyclicEdge, Framework, FrameworkError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("edge {edge}: gain {gain} is not allowed for group order {order}")]
    BadGain { edge: usize, gain: i64, order: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, i64)>,
}

impl GraphFile {
    pub fn from_graph(g: &GainGraph) -> GraphFile {
        GraphFile {
            n: g.vertex_count(),
            edges: g.edges().iter().map(|e| (e.u, e.v, e.gain.sign())).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<GainGraph, IoError> {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, s))| {
                Gain::from_sign(s)
                    .map(|g| (u, v, g))
                    .ok_or(IoError::BadGain { edge: i, gain: s, order: 2 })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GainGraph::from_edges(self.n, edges)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameworkFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, i64)>,
    pub positions: Vec<Vec<Q>>,
    pub group: GroupSpec,
    pub norm: Norm,
}

/// Group element of an edge as written in files: a sign for orders 1 and
/// 2, an exponent otherwise.
fn shift_from_file(edge: usize, gain: i64, order: usize) -> Result<usize, IoError> {
    let bad = || IoError::BadGain { edge, gain, order };
    match order {
        1 if gain == 1 => Ok(0),
        2 => Gain::from_sign(gain)
            .map(|g| usize::from(g == Gain::Minus))
            .ok_or_else(bad),
        n if n > 2 && (0..n as i64).contains(&gain) => Ok(gain as usize),
        _ => Err(bad()),
    }
}

fn shift_to_file(shift: usize, order: usize) -> i64 {
    match order {
        1 | 2 => {
            if shift == 0 {
                1
            } else {
                -1
            }
        }
        _ => shift as i64,
    }
}

impl FrameworkFile {
    pub fn from_framework(fw: &Framework) -> FrameworkFile {
        FrameworkFile {
            n: fw.vertex_count(),
            edges: fw
                .edges()
                .iter()
                .map(|e| (e.u, e.v, shift_to_file(e.shift, fw.order())))
                .collect(),
            positions: fw
                .positions()
                .iter()
                .map(|p| p.iter().cloned().map(Q).collect())
                .collect(),
            group: GroupSpec { n: fw.order() },
            norm: fw.norm().clone(),
        }
    }

    pub fn to_framework(&self) -> Result<Framework, IoError> {
        let order = self.group.n;
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, g))| {
                Ok(CyclicEdge {
                    id: EdgeId(i as u32),
                    u,
                    v,
                    shift: shift_from_file(i, g, order)?,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let positions = self
            .positions
            .iter()
            .map(|p| p.iter().map(|x| x.0.clone()).collect())
            .collect();
        if order == 2 {
            // Same validation as plain graph files (loop gains, parallels).
            let g = GraphFile {
                n: self.n,
                edges: self.edges.clone(),
            };
            g.to_graph()?;
        }
        Ok(Framework::new(order, self.n, edges, positions, self.norm.clone())?)
    }
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses JSON text, reporting serde's line and column on failure.
pub fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    parse_json(path, &read_text(path)?)
}

pub fn parse_graph_file(path: &Path) -> Result<GainGraph, IoError> {
    read_json::<GraphFile>(path)?.to_graph()
}

pub fn parse_framework_file(path: &Path) -> Result<Framework, IoError> {
    read_json::<FrameworkFile>(path)?.to_framework()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::BaseGraph;

    fn parse(text: &str) -> Result<GainGraph, IoError> {
        parse_json::<GraphFile>(Path::new("<test>"), text)?.to_graph()
    }

    #[test]
    fn double_edge_loops_file() {
        let g = parse(r#"{"n":2,"edges":[[0,1,1],[0,1,-1],[0,0,-1],[1,1,-1]]}"#).unwrap();
        assert!(crate::isomorphism::are_isomorphic(&g, &BaseGraph::DoubleEdgeLoops.graph()));
    }

    #[test]
    fn gain_one_loop_is_rejected() {
        let err = parse(r#"{"n":1,"edges":[[0,0,1]]}"#).unwrap_err();
        assert!(matches!(err, IoError::Graph(GraphError::GainOneLoop { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse("{\"n\":2,\n \"edges\": [[0,1]]}").unwrap_err() {
            IoError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other}"),
        }
        assert!(matches!(parse(r#"{"n":2,"edges":[[0,1,3]]}"#), Err(IoError::BadGain { .. })));
        assert!(matches!(parse(r#"{"n":2,"edges":[],"extra":1}"#), Err(IoError::Parse { .. })));
    }

    #[test]
    fn framework_round_trip() {
        let text = r#"{"n":2,"edges":[[0,1,1],[0,1,-1],[0,0,-1],[1,1,-1]],
            "positions":[["-20","25"],[20,"11/1"]],"group":{"n":2},"norm":"linf"}"#;
        let fw = parse_json::<FrameworkFile>(Path::new("<test>"), text)
            .unwrap()
            .to_framework()
            .unwrap();
        let back = FrameworkFile::from_framework(&fw);
        let json = serde_json::to_string(&back).unwrap();
        assert!(json.contains(r#"["-20","25"]"#));
        assert_eq!(back.to_framework().unwrap(), fw);
    }
}
