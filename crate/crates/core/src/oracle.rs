//! Brute-force superbubble enumeration straight from the definition.
//!
//! Used as ground truth for the detector, so it shares none of the
//! detector's machinery: no ordering, no candidates, no range queries. Every
//! ordered pair is tested with its own forward and backward searches.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexId};

/// Largest graph accepted without an explicit override.
pub const DEFAULT_CAP: usize = 500;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {n} vertices, above the oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("graph is cyclic")]
    Cyclic,
}

/// Fixed-size vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    /// Returns `true` if `v` was not yet present.
    pub fn insert(&mut self, v: VertexId) -> bool {
        let (w, b) = (v.index() / 64, v.index() % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.words[v.index() / 64] & (1 << (v.index() % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| VertexId::new(i * 64 + b))
        })
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Backward,
}

fn closure_avoiding(g: &Graph, from: VertexId, avoid: VertexId, dir: Direction) -> VertexSet {
    let mut seen = VertexSet::new(g.vertex_count());
    seen.insert(from);
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        if x == avoid {
            continue;
        }
        let next = match dir {
            Direction::Forward => g.successors(x),
            Direction::Backward => g.predecessors(x),
        };
        for &y in next {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Everything reachable from `from` without expanding `avoid`. Contains
/// `from`, and `avoid` itself when some edge reaches it.
pub fn reachable_avoiding(g: &Graph, from: VertexId, avoid: VertexId) -> VertexSet {
    closure_avoiding(g, from, avoid, Direction::Forward)
}

/// Everything that reaches `to` without passing through `avoid`.
pub fn reaching_avoiding(g: &Graph, to: VertexId, avoid: VertexId) -> VertexSet {
    closure_avoiding(g, to, avoid, Direction::Backward)
}

/// Peels zero-in-degree vertices off the subgraph induced by `within`.
fn induced_acyclic(g: &Graph, within: &VertexSet) -> bool {
    let members: Vec<VertexId> = within.iter().collect();
    let mut indeg = vec![0usize; g.vertex_count()];
    for &v in &members {
        indeg[v.index()] = g.predecessors(v).iter().filter(|&&u| within.contains(u)).count();
    }
    let mut ready: Vec<VertexId> = members.iter().copied().filter(|v| indeg[v.index()] == 0).collect();
    let mut removed = 0;
    while let Some(v) = ready.pop() {
        removed += 1;
        for &w in g.successors(v) {
            if within.contains(w) {
                indeg[w.index()] -= 1;
                if indeg[w.index()] == 0 {
                    ready.push(w);
                }
            }
        }
    }
    removed == members.len()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OracleBubble {
    pub entrance: VertexId,
    pub exit: VertexId,
    /// Members other than entrance and exit, ascending by id.
    pub interior: Vec<VertexId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleResult {
    /// Sorted by `(entrance, exit)` id.
    pub bubbles: Vec<OracleBubble>,
}

#[derive(Debug, Serialize)]
pub struct LabeledOracleBubble<'a> {
    pub entrance: &'a str,
    pub exit: &'a str,
    pub interior: Vec<&'a str>,
}

#[derive(Debug, Serialize)]
pub struct OracleJson<'a> {
    pub items: Vec<LabeledOracleBubble<'a>>,
}

impl OracleResult {
    pub fn pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.bubbles.iter().map(|b| (b.entrance, b.exit)).collect()
    }

    pub fn to_json<'g>(&self, g: &'g Graph) -> OracleJson<'g> {
        OracleJson {
            items: self
                .bubbles
                .iter()
                .map(|b| LabeledOracleBubble {
                    entrance: g.label(b.entrance),
                    exit: g.label(b.exit),
                    interior: b.interior.iter().map(|&v| g.label(v)).collect(),
                })
                .collect(),
        }
    }
}

/// Enumerates all superbubbles of `g`, refusing graphs above [`DEFAULT_CAP`].
pub fn enumerate(g: &Graph) -> Result<OracleResult, OracleError> {
    enumerate_capped(g, DEFAULT_CAP)
}

pub fn enumerate_capped(g: &Graph, cap: usize) -> Result<OracleResult, OracleError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    if !induced_acyclic(g, &full_set(n)) {
        return Err(OracleError::Cyclic);
    }
    let bubbles: Vec<Vec<OracleBubble>> = (0..n)
        .into_par_iter()
        .map(|s| bubbles_from(g, VertexId::new(s)))
        .collect();
    Ok(OracleResult {
        bubbles: bubbles.into_iter().flatten().collect(),
    })
}

fn full_set(n: usize) -> VertexSet {
    let mut all = VertexSet::new(n);
    for i in 0..n {
        all.insert(VertexId::new(i));
    }
    all
}

/// Tests every exit for entrance `s`; at most one survives minimality.
fn bubbles_from(g: &Graph, s: VertexId) -> Vec<OracleBubble> {
    // (exit, U) for pairs meeting reachability, matching and acyclicity.
    let mut passing: Vec<(VertexId, VertexSet)> = Vec::new();
    for t in g.vertices().filter(|&t| t != s) {
        let forward = reachable_avoiding(g, s, t);
        if !forward.contains(t) {
            continue;
        }
        let backward = reaching_avoiding(g, t, s);
        if forward != backward || !induced_acyclic(g, &forward) {
            continue;
        }
        passing.push((t, forward));
    }
    passing
        .iter()
        .filter(|(t, u)| {
            !passing
                .iter()
                .any(|(other, _)| other != t && *other != s && u.contains(*other))
        })
        .map(|(t, u)| OracleBubble {
            entrance: s,
            exit: *t,
            interior: u.iter().filter(|&v| v != s && v != *t).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    fn graph(text: &str) -> Graph {
        parse_edge_list(text).unwrap().graph
    }

    fn labeled(g: &Graph, r: &OracleResult) -> Vec<(String, String)> {
        let mut v: Vec<_> = r
            .bubbles
            .iter()
            .map(|b| (g.label(b.entrance).to_owned(), g.label(b.exit).to_owned()))
            .collect();
        v.sort();
        v
    }

    fn names(g: &Graph, set: &VertexSet) -> Vec<String> {
        let mut v: Vec<_> = set.iter().map(|x| g.label(x).to_owned()).collect();
        v.sort();
        v
    }

    #[test]
    fn reachable_avoiding_sample() {
        let g = graph(include_str!("../testdata/sample.txt"));
        let set = reachable_avoiding(&g, g.id("v3").unwrap(), g.id("v8").unwrap());
        let mut expected: Vec<String> = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12]
            .iter()
            .map(|i| format!("v{i}"))
            .collect();
        expected.sort();
        assert_eq!(names(&g, &set), expected);
    }

    #[test]
    fn reachable_avoiding_small_cases() {
        let g = graph("a b\nb c\nx y");
        let (a, b, x) = (g.id("a").unwrap(), g.id("b").unwrap(), g.id("x").unwrap());
        assert_eq!(names(&g, &reachable_avoiding(&g, a, b)), ["a", "b"]);
        assert_eq!(names(&g, &reachable_avoiding(&g, a, x)), ["a", "b", "c"]);
    }

    #[test]
    fn sample_bubbles() {
        let g = graph(include_str!("../testdata/sample.txt"));
        let r = enumerate(&g).unwrap();
        let mut expected: Vec<(String, String)> =
            [("v8", "v14"), ("v3", "v8"), ("v5", "v7"), ("v11", "v12"), ("v1", "v3")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect();
        expected.sort();
        assert_eq!(labeled(&g, &r), expected);
        let v3v8 = r.bubbles.iter().find(|b| g.label(b.entrance) == "v3").unwrap();
        assert_eq!(v3v8.interior.len(), 8);
    }

    #[test]
    fn single_edge_and_diamond() {
        let g = graph("a b");
        assert_eq!(labeled(&g, &enumerate(&g).unwrap()), [("a".into(), "b".into())]);
        let g = graph("a b\na c\nb d\nc d");
        let r = enumerate(&g).unwrap();
        assert_eq!(labeled(&g, &r), [("a".into(), "d".into())]);
        assert_eq!(r.bubbles[0].interior.len(), 2);
    }

    #[test]
    fn minimality_keeps_innermost() {
        // a -> b -> c: <a,c> passes the first three tests but b sits inside.
        let g = graph("a b\nb c");
        let pairs = labeled(&g, &enumerate(&g).unwrap());
        assert_eq!(pairs, [("a".into(), "b".into()), ("b".into(), "c".into())]);
    }

    #[test]
    fn cap_and_cycles() {
        let g = graph("a b\nb c");
        assert_eq!(enumerate_capped(&g, 2), Err(OracleError::TooLarge { n: 3, cap: 2 }));
        let g = graph("s a\na b\nb a\nb t");
        assert_eq!(enumerate(&g), Err(OracleError::Cyclic));
    }

    #[test]
    fn interior_is_closed() {
        let g = graph(include_str!("../testdata/sample.txt"));
        for b in enumerate(&g).unwrap().bubbles {
            let mut members: Vec<_> = b.interior.clone();
            members.extend([b.entrance, b.exit]);
            for &x in &b.interior {
                for &y in g.successors(x).iter().chain(g.predecessors(x)) {
                    assert!(members.contains(&y));
                }
            }
        }
    }
}
