//! DFS topological ordering with its spanning tree.
//!
//! Ranks are handed out in decreasing order as vertices finish, starting at
//! `n`. Apart from the edge-forward property, such an ordering has the
//! subtree-interval property: every vertex ranked between a tree ancestor `v`
//! and its descendant `u` is reachable from `v`. The detector relies on it, so
//! a queue-based (Kahn) ordering cannot be substituted here.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{AugmentedGraph, Graph, VertexId};

/// 1-based topological rank.
pub type Rank = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopoError {
    #[error("graph is cyclic: edge '{from}' -> '{to}' closes a cycle")]
    Cyclic { from: String, to: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopoOrder {
    rank: Vec<Rank>,
    // index r - 1 holds the vertex of rank r
    vertex_at: Vec<VertexId>,
    tree_parent: Vec<Option<VertexId>>,
}

impl TopoOrder {
    /// Builds an order from explicit ranks, without any validation beyond
    /// the bijection. Mostly useful for feeding hand-made orderings to
    /// [`check_ordering_properties`].
    pub fn from_ranks(rank: Vec<Rank>, tree_parent: Vec<Option<VertexId>>) -> Option<Self> {
        let n = rank.len();
        if tree_parent.len() != n {
            return None;
        }
        let mut vertex_at = vec![None; n];
        for (v, &r) in rank.iter().enumerate() {
            if r == 0 || r > n || vertex_at[r - 1].is_some() {
                return None;
            }
            vertex_at[r - 1] = Some(VertexId::new(v));
        }
        Some(TopoOrder {
            rank,
            vertex_at: vertex_at.into_iter().map(Option::unwrap).collect(),
            tree_parent,
        })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    #[inline]
    pub fn rank(&self, v: VertexId) -> Rank {
        self.rank[v.index()]
    }

    #[inline]
    pub fn vertex_at(&self, r: Rank) -> VertexId {
        self.vertex_at[r - 1]
    }

    pub fn tree_parent(&self, v: VertexId) -> Option<VertexId> {
        self.tree_parent[v.index()]
    }

    /// Vertices in increasing rank.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.vertex_at.iter().copied()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Unvisited,
    Open,
    Done,
}

/// Iterative DFS from the unique source, children in adjacency order.
pub fn topological_sort(g: &AugmentedGraph) -> Result<TopoOrder, TopoError> {
    sort_from(g.graph(), g.source())
}

pub(crate) fn sort_from(g: &Graph, source: VertexId) -> Result<TopoOrder, TopoError> {
    let n = g.vertex_count();
    let mut mark = vec![Mark::Unvisited; n];
    let mut rank = vec![0; n];
    let mut vertex_at = vec![source; n];
    let mut tree_parent = vec![None; n];
    let mut next_rank = n;
    // (vertex, index of the next child to look at)
    let mut stack: Vec<(VertexId, usize)> = Vec::new();

    let cyclic = |from: VertexId, to: VertexId| TopoError::Cyclic {
        from: g.label(from).to_owned(),
        to: g.label(to).to_owned(),
    };

    mark[source.index()] = Mark::Open;
    stack.push((source, 0));
    while let Some(top) = stack.last_mut() {
        let (v, cursor) = *top;
        match g.successors(v).get(cursor) {
            Some(&w) => {
                top.1 += 1;
                match mark[w.index()] {
                    Mark::Unvisited => {
                        mark[w.index()] = Mark::Open;
                        tree_parent[w.index()] = Some(v);
                        stack.push((w, 0));
                    }
                    Mark::Open => return Err(cyclic(v, w)),
                    Mark::Done => {}
                }
            }
            None => {
                stack.pop();
                mark[v.index()] = Mark::Done;
                rank[v.index()] = next_rank;
                vertex_at[next_rank - 1] = v;
                next_rank -= 1;
            }
        }
    }

    if next_rank != 0 {
        // Something is unreachable from the only source, which in a graph
        // with one in-degree-0 vertex means a cycle exists somewhere.
        return Err(find_cycle_edge(g, &mut mark).map_or_else(
            || TopoError::Cyclic {
                from: "?".into(),
                to: "?".into(),
            },
            |(u, w)| cyclic(u, w),
        ));
    }

    Ok(TopoOrder {
        rank,
        vertex_at,
        tree_parent,
    })
}

fn find_cycle_edge(g: &Graph, mark: &mut [Mark]) -> Option<(VertexId, VertexId)> {
    for root in g.vertices() {
        if mark[root.index()] != Mark::Unvisited {
            continue;
        }
        mark[root.index()] = Mark::Open;
        let mut stack = vec![(root, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, cursor) = *top;
            match g.successors(v).get(cursor) {
                Some(&w) => {
                    top.1 += 1;
                    match mark[w.index()] {
                        Mark::Unvisited => {
                            mark[w.index()] = Mark::Open;
                            stack.push((w, 0));
                        }
                        Mark::Open => return Some((v, w)),
                        Mark::Done => {}
                    }
                }
                None => {
                    stack.pop();
                    mark[v.index()] = Mark::Done;
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderingViolation {
    RankNotBijective,
    BackwardEdge {
        from: String,
        to: String,
    },
    BrokenTree {
        vertex: String,
    },
    /// `witness` lies strictly between `ancestor` and `descendant` in rank
    /// but is not reachable from `ancestor`.
    UnreachableInterval {
        ancestor: String,
        descendant: String,
        witness: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderingReport {
    pub passed: bool,
    pub edges_checked: usize,
    pub ancestors_checked: usize,
    pub violation: Option<OrderingViolation>,
}

/// Checks the edge-forward rule on every edge and the subtree-interval
/// property from up to `max_ancestors` tree vertices (evenly spaced by rank).
///
/// Reachability is recomputed by plain BFS, independently of the sort.
pub fn check_ordering_properties(g: &Graph, t: &TopoOrder, max_ancestors: usize) -> OrderingReport {
    let n = g.vertex_count();
    let mut report = OrderingReport {
        passed: false,
        edges_checked: 0,
        ancestors_checked: 0,
        violation: None,
    };
    let fail = |mut r: OrderingReport, v| {
        r.violation = Some(v);
        r
    };

    if t.len() != n || (1..=n).any(|r| t.rank(t.vertex_at(r)) != r) {
        return fail(report, OrderingViolation::RankNotBijective);
    }
    for (u, v) in g.edges() {
        report.edges_checked += 1;
        if t.rank(u) >= t.rank(v) {
            return fail(
                report,
                OrderingViolation::BackwardEdge {
                    from: g.label(u).into(),
                    to: g.label(v).into(),
                },
            );
        }
    }

    // Largest rank inside each vertex's tree subtree. Tree children outrank
    // their parents, so sweeping from rank n down finalizes children first.
    let mut subtree_max: Vec<Rank> = (0..n).map(|v| t.rank(VertexId::new(v))).collect();
    for r in (1..=n).rev() {
        let v = t.vertex_at(r);
        match t.tree_parent(v) {
            Some(p) => {
                if p.index() >= n || t.rank(p) >= r || !g.has_edge(p, v) {
                    return fail(
                        report,
                        OrderingViolation::BrokenTree {
                            vertex: g.label(v).into(),
                        },
                    );
                }
                subtree_max[p.index()] = subtree_max[p.index()].max(subtree_max[v.index()]);
            }
            None if r != 1 => {
                return fail(
                    report,
                    OrderingViolation::BrokenTree {
                        vertex: g.label(v).into(),
                    },
                );
            }
            None => {}
        }
    }

    let step = if max_ancestors == 0 {
        usize::MAX
    } else {
        n.div_ceil(max_ancestors).max(1)
    };
    let mut seen = vec![false; n];
    for r in (1..=n).step_by(step) {
        let v = t.vertex_at(r);
        report.ancestors_checked += 1;
        let hi = subtree_max[v.index()];
        if hi <= r + 1 {
            continue;
        }
        seen.iter_mut().for_each(|s| *s = false);
        let mut queue = VecDeque::from([v]);
        seen[v.index()] = true;
        while let Some(x) = queue.pop_front() {
            for &y in g.successors(x) {
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    queue.push_back(y);
                }
            }
        }
        // The deepest descendant sets the widest interval; narrower ones
        // for shallower descendants are contained in it.
        if let Some(w) = (r + 1..hi).map(|q| t.vertex_at(q)).find(|w| !seen[w.index()]) {
            return fail(
                report,
                OrderingViolation::UnreachableInterval {
                    ancestor: g.label(v).into(),
                    descendant: g.label(t.vertex_at(hi)).into(),
                    witness: g.label(w).into(),
                },
            );
        }
    }

    report.passed = true;
    report
}
