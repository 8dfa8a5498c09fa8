//! Gain-graph isomorphism up to switching.
//!
//! Two gain graphs are equivalent when a vertex bijection followed by a
//! switching carries one edge multiset onto the other. Given the bijection,
//! the switching is forced along single edges and free across double edges,
//! so the search only enumerates bijections.

use std::collections::VecDeque;

use crate::gain_graph::{Edge, EdgeId, Gain, GainGraph};

/// A map `A → B`: vertex `x` goes to `vertex_map[x]`, an edge `(u, w, h)`
/// goes to the edge `(π u, π w, h·s_u·s_w)` of `B` named in `edge_map`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainIsomorphism {
    pub vertex_map: Vec<usize>,
    pub switching: Vec<Gain>,
    pub edge_map: Vec<(EdgeId, EdgeId)>,
}

impl GainIsomorphism {
    pub fn map_edge(&self, id: EdgeId) -> Option<EdgeId> {
        self.edge_map.iter().find(|(a, _)| *a == id).map(|&(_, b)| b)
    }

    pub fn inverse(&self) -> GainIsomorphism {
        let mut vertex_map = vec![0; self.vertex_map.len()];
        let mut switching = vec![Gain::Plus; self.vertex_map.len()];
        for (x, &y) in self.vertex_map.iter().enumerate() {
            vertex_map[y] = x;
            switching[y] = self.switching[x];
        }
        GainIsomorphism {
            vertex_map,
            switching,
            edge_map: self.edge_map.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }
}

fn multiplicity(g: &GainGraph) -> Vec<Vec<u8>> {
    let n = g.vertex_count();
    let mut m = vec![vec![0u8; n]; n];
    for e in g.edges() {
        m[e.u][e.v] += 1;
        if e.u != e.v {
            m[e.v][e.u] += 1;
        }
    }
    m
}

/// Completes a vertex bijection to a full isomorphism when possible.
pub fn complete_isomorphism(
    a: &GainGraph,
    b: &GainGraph,
    vertex_map: &[usize],
) -> Option<GainIsomorphism> {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() || vertex_map.len() != n {
        return None;
    }
    let mut hit = vec![false; n];
    for &y in vertex_map {
        if y >= n || std::mem::replace(&mut hit[y], true) {
            return None;
        }
    }
    let ma = multiplicity(a);
    let mb = multiplicity(b);
    for x in 0..n {
        for y in 0..n {
            if ma[x][y] != mb[vertex_map[x]][vertex_map[y]] {
                return None;
            }
        }
    }
    // Single edges force the relative switching of their endpoints.
    let mut forced: Vec<Vec<(usize, Gain)>> = vec![Vec::new(); n];
    for e in a.edges() {
        if e.is_loop() || ma[e.u][e.v] != 1 {
            continue;
        }
        let image = b
            .edges_between(vertex_map[e.u], vertex_map[e.v])
            .next()
            .expect("multiplicities agree");
        let rel = e.gain * image.gain;
        forced[e.u].push((e.v, rel));
        forced[e.v].push((e.u, rel));
    }
    let mut switching: Vec<Option<Gain>> = vec![None; n];
    for s in 0..n {
        if switching[s].is_some() {
            continue;
        }
        switching[s] = Some(Gain::Plus);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let sx = switching[x].expect("set");
            for &(y, rel) in &forced[x] {
                let want = sx * rel;
                match switching[y] {
                    None => {
                        switching[y] = Some(want);
                        queue.push_back(y);
                    }
                    Some(sy) if sy != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let switching: Vec<Gain> = switching.into_iter().map(|s| s.expect("set")).collect();
    let mut edge_map = Vec::with_capacity(a.edge_count());
    for e in a.edges() {
        let (pu, pv) = (vertex_map[e.u], vertex_map[e.v]);
        let gain = if e.is_loop() {
            e.gain
        } else {
            e.gain * switching[e.u] * switching[e.v]
        };
        let image = b.find_edge(pu, pv, gain)?;
        edge_map.push((e.id, image.id));
    }
    Some(GainIsomorphism {
        vertex_map: vertex_map.to_vec(),
        switching,
        edge_map,
    })
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Profile {
    degree: usize,
    has_loop: bool,
    doubles: usize,
    neighbours: usize,
}

fn profiles(g: &GainGraph) -> Vec<Profile> {
    let m = multiplicity(g);
    (0..g.vertex_count())
        .map(|v| Profile {
            degree: g.degree(v),
            has_loop: m[v][v] > 0,
            doubles: (0..g.vertex_count()).filter(|&w| w != v && m[v][w] == 2).count(),
            neighbours: (0..g.vertex_count()).filter(|&w| w != v && m[v][w] > 0).count(),
        })
        .collect()
}

/// Searches for an isomorphism `a → b` up to switching.
pub fn find_isomorphism(a: &GainGraph, b: &GainGraph) -> Option<GainIsomorphism> {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let pa = profiles(a);
    let pb = profiles(b);
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    let ma = multiplicity(a);
    let mb = multiplicity(b);
    // Assign vertices of `a` in breadth-first order from high degree so that
    // adjacency constraints prune early.
    let order = search_order(a);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut result = None;
    backtrack(
        0, &order, &pa, &pb, &ma, &mb, &mut map, &mut used, a, b, &mut result,
    );
    result
}

fn search_order(g: &GainGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for y in g.neighbours(x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    order
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    depth: usize,
    order: &[usize],
    pa: &[Profile],
    pb: &[Profile],
    ma: &[Vec<u8>],
    mb: &[Vec<u8>],
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    a: &GainGraph,
    b: &GainGraph,
    result: &mut Option<GainIsomorphism>,
) {
    if result.is_some() {
        return;
    }
    if depth == order.len() {
        *result = complete_isomorphism(a, b, map);
        return;
    }
    let x = order[depth];
    for y in 0..b.vertex_count() {
        if used[y] || pa[x] != pb[y] || ma[x][x] != mb[y][y] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&w| ma[x][w] == mb[y][map[w]]);
        if !consistent {
            continue;
        }
        map[x] = y;
        used[y] = true;
        backtrack(depth + 1, order, pa, pb, ma, mb, map, used, a, b, result);
        used[y] = false;
        map[x] = usize::MAX;
        if result.is_some() {
            return;
        }
    }
}

pub fn are_isomorphic(a: &GainGraph, b: &GainGraph) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Applies a vertex permutation and switching, producing the image graph
/// with edge ids preserved.
pub fn relabel(g: &GainGraph, vertex_map: &[usize], switching: &[Gain]) -> GainGraph {
    let edges = g.edges().iter().map(|e| Edge {
        u: vertex_map[e.u],
        v: vertex_map[e.v],
        gain: if e.is_loop() {
            e.gain
        } else {
            e.gain * switching[e.u] * switching[e.v]
        },
        ..*e
    });
    GainGraph::from_edge_records(g.vertex_count(), edges).expect("relabelling preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use Gain::{Minus, Plus};

    #[test]
    fn switched_relabelled_copy_is_isomorphic() {
        let r = GainGraph::from_edges(
            3,
            [
                (0, 1, Plus),
                (0, 1, Minus),
                (0, 2, Plus),
                (0, 2, Minus),
                (1, 2, Plus),
                (0, 0, Minus),
            ],
        )
        .unwrap();
        let image = relabel(&r, &[2, 0, 1], &[Plus, Minus, Plus]);
        let iso = find_isomorphism(&r, &image).expect("isomorphic");
        assert_eq!(iso.vertex_map[0], 2);
        assert_eq!(iso.edge_map.len(), 6);
        let back = iso.inverse();
        assert!(complete_isomorphism(&image, &r, &back.vertex_map).is_some());
    }

    #[test]
    fn balance_distinguishes_triangles() {
        let bal = GainGraph::from_edges(3, [(0, 1, Plus), (1, 2, Plus), (0, 2, Plus)]).unwrap();
        let unbal = GainGraph::from_edges(3, [(0, 1, Plus), (1, 2, Plus), (0, 2, Minus)]).unwrap();
        assert!(!are_isomorphic(&bal, &unbal));
        let switched = bal.switch(1).unwrap();
        assert!(are_isomorphic(&bal, &switched));
    }
}
