//! Graph representation, edge-list ingestion and source/sink augmentation.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

/// Label given to the artificial source added by [`augment`].
pub const ARTIFICIAL_SOURCE: &str = "__source__";
/// Label given to the artificial sink added by [`augment`].
pub const ARTIFICIAL_SINK: &str = "__sink__";

/// Longest accepted vertex label, in bytes.
pub const MAX_LABEL_LEN: usize = 255;

/// Dense vertex identifier, assigned in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(u32);

impl VertexId {
    pub fn new(index: usize) -> Self {
        VertexId(u32::try_from(index).expect("vertex index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: self-loop on vertex '{label}'")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: label '{label}' is reserved for artificial vertices")]
    ReservedLabel { line: usize, label: String },
    #[error("input contains no edges")]
    Empty,
    #[error("input is not valid UTF-8 at line {line}")]
    Encoding { line: usize },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("not a DAG-shaped input: no vertex with {missing}")]
    NotDagShaped { missing: &'static str },
    #[error("graph has no vertices")]
    NoVertices,
}

/// Immutable directed graph without self-loops or parallel edges.
///
/// Adjacency lists keep edge insertion order; that order is the child-visit
/// order of the topological sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    ids: HashMap<String, VertexId>,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    edge_count: usize,
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.labels.len()).map(VertexId::new)
    }

    /// All edges, grouped by tail in id order, each group in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |&v| (VertexId::new(u), v)))
    }

    #[inline]
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v.index()]
    }

    #[inline]
    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v.index()]
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_adj[v.index()].len()
    }

    #[inline]
    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_adj[v.index()].len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn id(&self, label: &str) -> Option<VertexId> {
        self.ids.get(label).copied()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.out_adj[u.index()].contains(&v)
    }

    pub fn sources(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.in_degree(v) == 0).collect()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.out_degree(v) == 0).collect()
    }

    /// Serializes back to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            out.push_str(self.label(u));
            out.push(' ');
            out.push_str(self.label(v));
            out.push('\n');
        }
        out
    }
}

/// Incremental graph construction. Duplicate edges are collapsed and counted.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    ids: HashMap<String, VertexId>,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    edge_set: HashSet<(VertexId, VertexId)>,
    duplicates: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `label`, creating the vertex on first sight.
    pub fn vertex(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = VertexId::new(self.labels.len());
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        id
    }

    /// Adds `u -> v`. Returns `false` if the edge was already present.
    ///
    /// Panics on a self-loop; callers that accept untrusted input check first.
    pub fn edge(&mut self, u: VertexId, v: VertexId) -> bool {
        assert_ne!(u, v, "self-loop on {}", self.labels[u.index()]);
        if !self.edge_set.insert((u, v)) {
            self.duplicates += 1;
            return false;
        }
        self.out_adj[u.index()].push(v);
        self.in_adj[v.index()].push(u);
        true
    }

    pub fn edge_by_label(&mut self, u: &str, v: &str) -> bool {
        let u = self.vertex(u);
        let v = self.vertex(v);
        self.edge(u, v)
    }

    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn build(self) -> Graph {
        Graph {
            edge_count: self.edge_set.len(),
            labels: self.labels,
            ids: self.ids,
            out_adj: self.out_adj,
            in_adj: self.in_adj,
        }
    }
}

/// A loaded graph plus the number of collapsed duplicate edge lines.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub graph: Graph,
    pub duplicate_edges: usize,
}

/// Parses the whitespace-separated edge-list format.
///
/// Each non-empty line that does not start with `#` holds exactly two labels.
pub fn load_edge_list<R: BufRead>(mut reader: R) -> Result<Loaded, GraphError> {
    let mut builder = GraphBuilder::new();
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let read = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| GraphError::Io(e.to_string()))?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| GraphError::Encoding { line: line_no })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (from, to) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(GraphError::Parse {
                    line: line_no,
                    reason: format!("expected two labels, got '{line}'"),
                })
            }
        };
        for label in [from, to] {
            if label.len() > MAX_LABEL_LEN {
                return Err(GraphError::Parse {
                    line: line_no,
                    reason: format!("label longer than {MAX_LABEL_LEN} bytes"),
                });
            }
            if label == ARTIFICIAL_SOURCE || label == ARTIFICIAL_SINK {
                return Err(GraphError::ReservedLabel {
                    line: line_no,
                    label: label.to_owned(),
                });
            }
        }
        if from == to {
            return Err(GraphError::SelfLoop {
                line: line_no,
                label: from.to_owned(),
            });
        }
        builder.edge_by_label(from, to);
    }
    if builder.labels.is_empty() {
        return Err(GraphError::Empty);
    }
    let duplicate_edges = builder.duplicates();
    Ok(Loaded {
        graph: builder.build(),
        duplicate_edges,
    })
}

pub fn parse_edge_list(text: &str) -> Result<Loaded, GraphError> {
    load_edge_list(text.as_bytes())
}

/// A single-source, single-sink graph derived from an input graph.
///
/// Original vertices keep their ids; artificial vertices are appended after
/// them, so ids below [`AugmentedGraph::original_count`] map straight back.
#[derive(Debug, Clone)]
pub struct AugmentedGraph {
    graph: Graph,
    original_count: usize,
    artificial_source: Option<VertexId>,
    artificial_sink: Option<VertexId>,
}

impl AugmentedGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn original_count(&self) -> usize {
        self.original_count
    }

    pub fn artificial_source(&self) -> Option<VertexId> {
        self.artificial_source
    }

    pub fn artificial_sink(&self) -> Option<VertexId> {
        self.artificial_sink
    }

    pub fn is_artificial(&self, v: VertexId) -> bool {
        v.index() >= self.original_count
    }

    /// Maps an augmented id back to the input graph, `None` for r′/t′.
    pub fn original_of(&self, v: VertexId) -> Option<VertexId> {
        (!self.is_artificial(v)).then_some(v)
    }

    /// The unique in-degree-0 vertex.
    pub fn source(&self) -> VertexId {
        self.artificial_source.unwrap_or_else(|| self.graph.sources()[0])
    }

    /// The unique out-degree-0 vertex.
    pub fn sink(&self) -> VertexId {
        self.artificial_sink.unwrap_or_else(|| self.graph.sinks()[0])
    }
}

/// Adds an artificial source (sink) when the graph has several sources (sinks).
pub fn augment(g: &Graph) -> Result<AugmentedGraph, GraphError> {
    if g.vertex_count() == 0 {
        return Err(GraphError::NoVertices);
    }
    let sources = g.sources();
    let sinks = g.sinks();
    if sources.is_empty() {
        return Err(GraphError::NotDagShaped { missing: "in-degree 0" });
    }
    if sinks.is_empty() {
        return Err(GraphError::NotDagShaped {
            missing: "out-degree 0",
        });
    }
    if sources.len() == 1 && sinks.len() == 1 {
        return Ok(AugmentedGraph {
            graph: g.clone(),
            original_count: g.vertex_count(),
            artificial_source: None,
            artificial_sink: None,
        });
    }

    let mut b = GraphBuilder::new();
    for v in g.vertices() {
        b.vertex(g.label(v));
    }
    for (u, v) in g.edges() {
        b.edge(u, v);
    }
    let artificial_source = (sources.len() > 1).then(|| {
        let r = b.vertex(ARTIFICIAL_SOURCE);
        for &s in &sources {
            b.edge(r, s);
        }
        r
    });
    let artificial_sink = (sinks.len() > 1).then(|| {
        let t = b.vertex(ARTIFICIAL_SINK);
        for &s in &sinks {
            b.edge(s, t);
        }
        t
    });
    Ok(AugmentedGraph {
        graph: b.build(),
        original_count: g.vertex_count(),
        artificial_source,
        artificial_sink,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Graph {
        parse_edge_list(include_str!("../testdata/sample.txt")).unwrap().graph
    }

    #[test]
    fn two_edge_chain() {
        let g = parse_edge_list("a b\nb c").unwrap().graph;
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let (a, b, c) = (g.id("a").unwrap(), g.id("b").unwrap(), g.id("c").unwrap());
        assert_eq!(g.successors(a), &[b]);
        assert_eq!(g.successors(b), &[c]);
        assert_eq!(g.predecessors(c), &[b]);
    }

    #[test]
    fn sample_sizes() {
        let g = sample();
        assert_eq!(g.vertex_count(), 15);
        assert_eq!(g.edge_count(), 21);
        assert_eq!(g.sources(), vec![g.id("v1").unwrap()]);
        assert_eq!(g.sinks(), vec![g.id("v14").unwrap()]);
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(
            parse_edge_list("a a").unwrap_err(),
            GraphError::SelfLoop {
                line: 1,
                label: "a".into()
            }
        );
    }

    #[test]
    fn malformed_lines_carry_line_number() {
        let err = parse_edge_list("# header\na b\nc\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err:?}");
        let err = parse_edge_list("a b c").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_and_comment_only_inputs_are_errors() {
        assert_eq!(parse_edge_list("").unwrap_err(), GraphError::Empty);
        assert_eq!(parse_edge_list("# nothing\n\n").unwrap_err(), GraphError::Empty);
    }

    #[test]
    fn reserved_and_oversized_labels() {
        let err = parse_edge_list("a __sink__").unwrap_err();
        assert!(matches!(err, GraphError::ReservedLabel { .. }));
        let long = "x".repeat(MAX_LABEL_LEN + 1);
        let err = parse_edge_list(&format!("a {long}")).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
        let ok = "y".repeat(MAX_LABEL_LEN);
        assert!(parse_edge_list(&format!("a {ok}")).is_ok());
    }

    #[test]
    fn invalid_utf8_rejected() {
        let err = load_edge_list(&b"a b\n\xff c\n"[..]).unwrap_err();
        assert_eq!(err, GraphError::Encoding { line: 2 });
    }

    #[test]
    fn duplicate_edges_collapse() {
        let loaded = parse_edge_list("a b\na b\nb c\na b\n").unwrap();
        assert_eq!(loaded.duplicate_edges, 2);
        assert_eq!(loaded.graph.edge_count(), 2);
        let a = loaded.graph.id("a").unwrap();
        assert_eq!(loaded.graph.successors(a).len(), 1);
    }

    #[test]
    fn first_appearance_ids_and_crlf() {
        let g = parse_edge_list("q p\r\n\r\n  p   r  \r\n").unwrap().graph;
        let labels: Vec<_> = g.vertices().map(|v| g.label(v).to_owned()).collect();
        assert_eq!(labels, ["q", "p", "r"]);
    }

    #[test]
    fn augment_leaves_single_source_sink_alone() {
        let g = sample();
        let aug = augment(&g).unwrap();
        assert!(aug.artificial_source().is_none());
        assert!(aug.artificial_sink().is_none());
        assert_eq!(aug.graph(), &g);
        assert_eq!(aug.source(), g.id("v1").unwrap());
        assert_eq!(aug.sink(), g.id("v14").unwrap());
    }

    #[test]
    fn augment_adds_source() {
        let g = parse_edge_list("a c\nb c").unwrap().graph;
        let aug = augment(&g).unwrap();
        let h = aug.graph();
        let r = aug.artificial_source().unwrap();
        assert!(aug.artificial_sink().is_none());
        assert_eq!(h.label(r), ARTIFICIAL_SOURCE);
        assert_eq!(h.successors(r), &[h.id("a").unwrap(), h.id("b").unwrap()]);
        assert_eq!(h.sources(), vec![r]);
        assert_eq!(h.sinks(), vec![h.id("c").unwrap()]);
        assert_eq!(aug.original_of(r), None);
        assert_eq!(aug.original_of(h.id("a").unwrap()), g.id("a"));
    }

    #[test]
    fn augment_adds_sink() {
        let g = parse_edge_list("a b\na c").unwrap().graph;
        let aug = augment(&g).unwrap();
        let h = aug.graph();
        let t = aug.artificial_sink().unwrap();
        assert!(aug.artificial_source().is_none());
        assert_eq!(h.predecessors(t), &[h.id("b").unwrap(), h.id("c").unwrap()]);
        assert_eq!(h.sinks(), vec![t]);
    }

    #[test]
    fn augment_is_idempotent() {
        let g = parse_edge_list("a c\nb c\nb d").unwrap().graph;
        let once = augment(&g).unwrap();
        let twice = augment(once.graph()).unwrap();
        assert_eq!(twice.graph().vertex_count(), once.graph().vertex_count());
        assert!(twice.artificial_source().is_none() && twice.artificial_sink().is_none());
    }

    #[test]
    fn augment_rejects_sourceless_graph() {
        let g = parse_edge_list("a b\nb a").unwrap().graph;
        assert!(matches!(augment(&g), Err(GraphError::NotDagShaped { .. })));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = sample();
        let again = parse_edge_list(&g.to_edge_list()).unwrap().graph;
        // Ids may be renumbered; labelled adjacency, in order, may not change.
        let by_label = |h: &Graph| {
            let mut rows: Vec<(String, Vec<String>, Vec<String>)> = h
                .vertices()
                .map(|v| {
                    let names = |vs: &[VertexId]| vs.iter().map(|&x| h.label(x).to_owned()).collect();
                    (h.label(v).to_owned(), names(h.successors(v)), names(h.predecessors(v)))
                })
                .collect();
            rows.sort();
            rows
        };
        assert_eq!(by_label(&again), by_label(&g));
        for v in g.vertices() {
            assert_eq!(g.id(g.label(v)), Some(v));
        }
    }
}
