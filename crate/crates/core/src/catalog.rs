//! The base graphs of the inductive constructions.
//!
//! Eight small (2,2,0)-gain-tight graphs seed every (2,2,0)-tight graph; the
//! single vertex seeds every (2,2,2)-tight one. Vertex labels used below:
//!
//! | id | graph | vertices | edges |
//! |----|-------|----------|-------|
//! | a | double edge with a loop at each end | v=0, w=1 | vw(+), vw(−), loops v, w |
//! | b | balanced triangle with a loop at every vertex | v=0, w=1, z=2 | vw, vz, wz (+), loops v, w, z |
//! | c | `R`: two double edges, one single edge, one loop | v=0, w=1, z=2 | vw(±), vz(±), wz(+), loop v |
//! | d | balanced K₄ with loops at two vertices | v=0, w=1, x=2, z=3 | K₄(+), loops w, x |
//! | e | K₄, loop at x, twisted copy of wx | as d | K₄(+), loop x, wx(−) |
//! | f | K₄, loop at x, twisted copy of vz | as d | K₄(+), loop x, vz(−) |
//! | g | K₄, twisted copies of vw and wx | as d | K₄(+), vw(−), wx(−) |
//! | h | K₄, twisted copies of vz and wx | as d | K₄(+), vz(−), wx(−) |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gain_graph::{Gain, GainGraph};
use crate::isomorphism::{find_isomorphism, GainIsomorphism};

/// A seed graph of a construction sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BaseGraph {
    DoubleEdgeLoops,
    LoopedTriangle,
    R,
    K4TwoLoops,
    K4LoopAdjacentTwist,
    K4LoopOppositeTwist,
    K4AdjacentTwists,
    K4DisjointTwists,
    /// One vertex, no edges; the seed for (2,2,2)-tight graphs.
    Point,
}

impl BaseGraph {
    /// The eight (2,2,0) seeds in id order.
    pub const TWO_TWO_ZERO: [BaseGraph; 8] = [
        BaseGraph::DoubleEdgeLoops,
        BaseGraph::LoopedTriangle,
        BaseGraph::R,
        BaseGraph::K4TwoLoops,
        BaseGraph::K4LoopAdjacentTwist,
        BaseGraph::K4LoopOppositeTwist,
        BaseGraph::K4AdjacentTwists,
        BaseGraph::K4DisjointTwists,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BaseGraph::DoubleEdgeLoops => "a",
            BaseGraph::LoopedTriangle => "b",
            BaseGraph::R => "c",
            BaseGraph::K4TwoLoops => "d",
            BaseGraph::K4LoopAdjacentTwist => "e",
            BaseGraph::K4LoopOppositeTwist => "f",
            BaseGraph::K4AdjacentTwists => "g",
            BaseGraph::K4DisjointTwists => "h",
            BaseGraph::Point => "K1",
        }
    }

    pub fn graph(self) -> GainGraph {
        use Gain::{Minus, Plus};
        const K4: [(usize, usize, Gain); 6] = [
            (0, 1, Plus),
            (0, 2, Plus),
            (0, 3, Plus),
            (1, 2, Plus),
            (1, 3, Plus),
            (2, 3, Plus),
        ];
        let (n, edges): (usize, Vec<(usize, usize, Gain)>) = match self {
            BaseGraph::DoubleEdgeLoops => (
                2,
                vec![(0, 1, Plus), (0, 1, Minus), (0, 0, Minus), (1, 1, Minus)],
            ),
            BaseGraph::LoopedTriangle => (
                3,
                vec![
                    (0, 1, Plus),
                    (0, 2, Plus),
                    (1, 2, Plus),
                    (0, 0, Minus),
                    (1, 1, Minus),
                    (2, 2, Minus),
                ],
            ),
            BaseGraph::R => (
                3,
                vec![
                    (0, 1, Plus),
                    (0, 1, Minus),
                    (0, 2, Plus),
                    (0, 2, Minus),
                    (1, 2, Plus),
                    (0, 0, Minus),
                ],
            ),
            BaseGraph::K4TwoLoops => (4, with(&K4, &[(1, 1, Minus), (2, 2, Minus)])),
            BaseGraph::K4LoopAdjacentTwist => (4, with(&K4, &[(2, 2, Minus), (1, 2, Minus)])),
            BaseGraph::K4LoopOppositeTwist => (4, with(&K4, &[(2, 2, Minus), (0, 3, Minus)])),
            BaseGraph::K4AdjacentTwists => (4, with(&K4, &[(0, 1, Minus), (1, 2, Minus)])),
            BaseGraph::K4DisjointTwists => (4, with(&K4, &[(0, 3, Minus), (1, 2, Minus)])),
            BaseGraph::Point => (1, vec![]),
        };
        GainGraph::from_edges(n, edges).expect("catalogue graphs are valid")
    }
}

fn with(base: &[(usize, usize, Gain)], extra: &[(usize, usize, Gain)]) -> Vec<(usize, usize, Gain)> {
    base.iter().chain(extra).copied().collect()
}

impl fmt::Display for BaseGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for BaseGraph {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseGraph::TWO_TWO_ZERO
            .iter()
            .chain(&[BaseGraph::Point])
            .find(|b| b.id() == s)
            .copied()
            .ok_or_else(|| format!("unknown base graph id {s:?}"))
    }
}

impl TryFrom<String> for BaseGraph {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<BaseGraph> for String {
    fn from(b: BaseGraph) -> String {
        b.id().to_string()
    }
}

/// Recognises a (2,2,0) seed up to relabelling and switching. The returned
/// isomorphism maps the catalogue graph onto `g`.
pub fn is_base_graph(g: &GainGraph) -> Option<(BaseGraph, GainIsomorphism)> {
    if g.vertex_count() > 4 {
        return None;
    }
    BaseGraph::TWO_TWO_ZERO
        .iter()
        .find_map(|&b| find_isomorphism(&b.graph(), g).map(|iso| (b, iso)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isomorphism::relabel;
    use crate::sparsity::{check_tight, SparsityParams};

    #[test]
    fn all_seeds_are_tight() {
        for b in BaseGraph::TWO_TWO_ZERO {
            assert!(check_tight(&b.graph(), SparsityParams::TWO_TWO_ZERO).unwrap(), "{b}");
        }
        assert!(check_tight(&BaseGraph::Point.graph(), SparsityParams::TWO_TWO_TWO).unwrap());
    }

    #[test]
    fn recognition_up_to_switching() {
        let a = BaseGraph::DoubleEdgeLoops.graph().switch(0).unwrap();
        let a = relabel(&a, &[1, 0], &[Gain::Plus, Gain::Plus]);
        assert_eq!(is_base_graph(&a).map(|x| x.0), Some(BaseGraph::DoubleEdgeLoops));
        let r = relabel(
            &BaseGraph::R.graph(),
            &[2, 1, 0],
            &[Gain::Plus, Gain::Minus, Gain::Plus],
        );
        assert_eq!(is_base_graph(&r).map(|x| x.0), Some(BaseGraph::R));
        let k4 = GainGraph::from_edges(
            4,
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].map(|(u, v)| (u, v, Gain::Plus)),
        )
        .unwrap();
        assert!(is_base_graph(&k4).is_none());
    }

    #[test]
    fn ids_round_trip() {
        for b in BaseGraph::TWO_TWO_ZERO.iter().chain(&[BaseGraph::Point]) {
            assert_eq!(b.id().parse::<BaseGraph>().unwrap(), *b);
        }
        assert!("z".parse::<BaseGraph>().is_err());
    }
}
