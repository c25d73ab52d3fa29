//! Superbubble enumeration over a single-source, single-sink DAG.
//!
//! Candidates are collected in rank order (exit before entrance for a vertex
//! that is both), then consumed from the back. Every exit candidate is paired
//! with the nearest earlier entrance candidate and validated with two range
//! queries; failures hand back an alternative entrance further left, and
//! `alternative_entrance` remembers the chain of refuted alternatives so it is
//! never walked twice.

use serde::Serialize;
use thiserror::Error;

use crate::candidates::{CandidateList, EntryId, Role};
use crate::graph::{AugmentedGraph, Graph, VertexId};
use crate::rmq::{RangeArrays, RangeIndex};
use crate::topo::{topological_sort, Rank, TopoError, TopoOrder};

/// True iff some child of `v` has exactly one parent.
pub fn is_entrance(g: &Graph, v: VertexId) -> bool {
    g.successors(v).iter().any(|&c| g.in_degree(c) == 1)
}

/// True iff some parent of `v` has exactly one child.
pub fn is_exit(g: &Graph, v: VertexId) -> bool {
    g.predecessors(v).iter().any(|&p| g.out_degree(p) == 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorState {
    /// Nearest entrance candidate ranked strictly below each vertex.
    pub previous_entrance: Vec<Option<VertexId>>,
    /// Last refuted alternative recorded against each entrance.
    pub alternative_entrance: Vec<Option<VertexId>>,
    /// Entrance-candidate flag per vertex.
    pub entrance: Vec<bool>,
}

pub fn build_candidates(g: &Graph, order: &TopoOrder) -> (CandidateList, DetectorState) {
    let n = g.vertex_count();
    let mut list = CandidateList::new(n);
    let mut state = DetectorState {
        previous_entrance: vec![None; n],
        alternative_entrance: vec![None; n],
        entrance: vec![false; n],
    };
    let mut prev = None;
    for v in order.iter() {
        state.previous_entrance[v.index()] = prev;
        if is_exit(g, v) {
            list.push_back(v, Role::Exit);
        }
        if is_entrance(g, v) {
            list.push_back(v, Role::Entrance);
            state.entrance[v.index()] = true;
            prev = Some(v);
        }
    }
    (list, state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Valid,
    Alternative(VertexId),
    NoBubble,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("validation needs rank(start) < rank(end), got {start} >= {end}")]
pub struct RankOrderError {
    pub start: Rank,
    pub end: Rank,
}

/// Checks whether `<start, end>` closes a superbubble using two range queries.
pub fn validate_superbubble(
    order: &TopoOrder,
    state: &DetectorState,
    index: &RangeIndex,
    start: VertexId,
    end: VertexId,
) -> Result<Validation, RankOrderError> {
    let (s, e) = (order.rank(start), order.rank(end));
    if s >= e {
        return Err(RankOrderError { start: s, end: e });
    }
    // s >= 1 and e <= n keep both sentinels out of range.
    let out_child = index.children.query(s, e - 1).expect("in range") as Rank;
    let out_parent = index.parents.query(s + 1, e).expect("in range") as Rank;
    if out_child != e {
        return Ok(Validation::NoBubble);
    }
    if out_parent == s {
        return Ok(Validation::Valid);
    }
    let u = order.vertex_at(out_parent);
    let alt = if state.entrance[u.index()] {
        Some(u)
    } else {
        state.previous_entrance[u.index()]
    };
    // No entrance candidate left of the furthest parent: nothing can close here.
    Ok(alt.map_or(Validation::NoBubble, Validation::Alternative))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Superbubble {
    pub entrance: VertexId,
    pub exit: VertexId,
}

/// Superbubbles in decreasing rank of their exits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuperbubbleReport {
    pub items: Vec<Superbubble>,
    /// Bubbles dropped because they start at the artificial source or end at
    /// the artificial sink.
    pub filtered_count: usize,
}

#[derive(Debug, Serialize)]
pub struct LabeledBubble<'a> {
    pub entrance: &'a str,
    pub exit: &'a str,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportJson<'a> {
    pub items: Vec<LabeledBubble<'a>>,
    pub filtered_count: usize,
}

impl SuperbubbleReport {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `(entrance, exit)` label pairs in report order.
    pub fn labeled<'g>(&self, g: &'g Graph) -> Vec<(&'g str, &'g str)> {
        self.items
            .iter()
            .map(|b| (g.label(b.entrance), g.label(b.exit)))
            .collect()
    }

    pub fn to_json<'g>(&self, g: &'g Graph) -> ReportJson<'g> {
        ReportJson {
            items: self
                .items
                .iter()
                .map(|b| LabeledBubble {
                    entrance: g.label(b.entrance),
                    exit: g.label(b.exit),
                })
                .collect(),
            filtered_count: self.filtered_count,
        }
    }
}

/// Hooks into the scan. All methods default to no-ops.
pub trait Observer {
    fn report_call(&mut self, _start: VertexId, _exit: VertexId, _depth: usize) {}
    fn validated(&mut self, _entrance: VertexId, _exit: VertexId, _outcome: Validation) {}
    fn alternative_written(&mut self, _entrance: VertexId, _alternative: VertexId) {}
    fn reported(&mut self, _bubble: Superbubble) {}
}

impl Observer for () {}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanStats {
    pub report_calls: usize,
    pub validate_calls: usize,
    pub alternative_writes: usize,
}

/// Deliberate defects for mutation testing of the verification campaign.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Mutation {
    #[default]
    None,
    /// Never record refuted alternatives. Output-preserving; only the
    /// validate-call counter can tell.
    SkipAlternativeWrites,
    /// Treat an alternative that falls left of `start` as a found entrance.
    ReportUnvalidatedAlternative,
    /// Do not look for bubbles nested inside a reported one.
    SkipNested,
}

#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ScanOptions {
    pub mutation: Mutation,
}

struct Scan<'a, O> {
    aug: &'a AugmentedGraph,
    order: &'a TopoOrder,
    index: &'a RangeIndex,
    list: CandidateList,
    state: DetectorState,
    report: SuperbubbleReport,
    stats: ScanStats,
    options: ScanOptions,
    observer: &'a mut O,
}

impl<O: Observer> Scan<'_, O> {
    fn run(&mut self) {
        while let Some(tail) = self.list.tail() {
            match self.list.role(tail) {
                Role::Entrance => {
                    self.list.delete_tail();
                }
                Role::Exit => {
                    let head = self.list.head().expect("non-empty list");
                    self.report_superbubble(head, tail);
                }
            }
        }
    }

    /// The nested-bubble recursion, unrolled onto an explicit stack of the
    /// entrance entries whose interiors are still being drained.
    fn report_superbubble(&mut self, start: EntryId, exit: EntryId) {
        let mut open: Vec<EntryId> = Vec::new();
        if let Some(s) = self.report_one(start, exit, 0) {
            open.push(s);
        }
        while let Some(&s) = open.last() {
            let tail = self.list.tail().expect("entrance entry is still listed");
            if tail == s {
                open.pop();
            } else if self.list.role(tail) == Role::Exit && self.options.mutation != Mutation::SkipNested {
                let next = self.list.next(s).expect("tail follows s");
                if let Some(inner) = self.report_one(next, tail, open.len()) {
                    open.push(inner);
                }
            } else {
                self.list.delete_tail();
            }
        }
    }

    /// Finds the bubble ending at `exit` (the list tail), if any, deletes the
    /// tail, and returns the reported entrance's list entry.
    fn report_one(&mut self, start: EntryId, exit: EntryId, depth: usize) -> Option<EntryId> {
        debug_assert_eq!(self.list.tail(), Some(exit));
        let start_v = self.list.vertex(start);
        let exit_v = self.list.vertex(exit);
        self.stats.report_calls += 1;
        self.observer.report_call(start_v, exit_v, depth);

        let start_rank = self.order.rank(start_v);
        if start_rank >= self.order.rank(exit_v) {
            self.list.delete_tail();
            return None;
        }

        let mut found = None;
        let mut s = self.state.previous_entrance[exit_v.index()];
        while let Some(sv) = s.filter(|&sv| self.order.rank(sv) >= start_rank) {
            let outcome = validate_superbubble(self.order, &self.state, self.index, sv, exit_v)
                .expect("previous entrance ranks below exit");
            self.stats.validate_calls += 1;
            self.observer.validated(sv, exit_v, outcome);
            match outcome {
                Validation::Valid => {
                    found = Some(sv);
                    break;
                }
                Validation::NoBubble => break,
                Validation::Alternative(alt) => {
                    if self.state.alternative_entrance[sv.index()] == Some(alt) {
                        break;
                    }
                    if self.options.mutation != Mutation::SkipAlternativeWrites {
                        self.state.alternative_entrance[sv.index()] = Some(alt);
                        self.stats.alternative_writes += 1;
                        self.observer.alternative_written(sv, alt);
                    }
                    s = Some(alt);
                    if self.options.mutation == Mutation::ReportUnvalidatedAlternative
                        && self.order.rank(alt) < start_rank
                    {
                        found = Some(alt);
                    }
                }
            }
        }
        self.list.delete_tail();

        let entrance = found?;
        let bubble = Superbubble { entrance, exit: exit_v };
        self.observer.reported(bubble);
        if self.aug.artificial_source() == Some(entrance) || self.aug.artificial_sink() == Some(exit_v) {
            self.report.filtered_count += 1;
        } else {
            self.report.items.push(bubble);
        }
        Some(
            self.list
                .entrance_entry(entrance)
                .expect("validated entrance is a candidate"),
        )
    }
}

/// Result of [`scan`]: the report plus work counters.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub report: SuperbubbleReport,
    pub stats: ScanStats,
}

/// Candidate construction and the backwards scan, given a finished ordering
/// and range index.
pub fn scan<O: Observer>(
    aug: &AugmentedGraph,
    order: &TopoOrder,
    index: &RangeIndex,
    options: ScanOptions,
    observer: &mut O,
) -> ScanOutcome {
    let (list, state) = build_candidates(aug.graph(), order);
    let mut scan = Scan {
        aug,
        order,
        index,
        list,
        state,
        report: SuperbubbleReport::default(),
        stats: ScanStats::default(),
        options,
        observer,
    };
    scan.run();
    ScanOutcome {
        report: scan.report,
        stats: scan.stats,
    }
}

/// Everything the scan needs, computed once per graph.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub order: TopoOrder,
    pub arrays: RangeArrays,
    pub index: RangeIndex,
}

impl Prepared {
    pub fn new(aug: &AugmentedGraph) -> Result<Self, TopoError> {
        let order = topological_sort(aug)?;
        let arrays = RangeArrays::build(aug, &order);
        let index = RangeIndex::new(&arrays);
        Ok(Prepared { order, arrays, index })
    }
}

pub fn detect(aug: &AugmentedGraph) -> Result<SuperbubbleReport, TopoError> {
    detect_with(aug, ScanOptions::default(), &mut ()).map(|o| o.report)
}

#[doc(hidden)]
pub fn detect_with<O: Observer>(
    aug: &AugmentedGraph,
    options: ScanOptions,
    observer: &mut O,
) -> Result<ScanOutcome, TopoError> {
    let prepared = Prepared::new(aug)?;
    Ok(scan(aug, &prepared.order, &prepared.index, options, observer))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    ReportCall {
        start: VertexId,
        exit: VertexId,
        depth: usize,
    },
    Validate {
        entrance: VertexId,
        exit: VertexId,
        outcome: Validation,
    },
    AlternativeWrite {
        entrance: VertexId,
        alternative: VertexId,
    },
    Report(Superbubble),
}

/// Ordered record of a detection run.
#[derive(Debug, Clone, Default)]
pub struct TraceLog {
    pub events: Vec<TraceEvent>,
    pub stats: ScanStats,
}

impl Observer for TraceLog {
    fn report_call(&mut self, start: VertexId, exit: VertexId, depth: usize) {
        self.events.push(TraceEvent::ReportCall { start, exit, depth });
    }

    fn validated(&mut self, entrance: VertexId, exit: VertexId, outcome: Validation) {
        self.events.push(TraceEvent::Validate {
            entrance,
            exit,
            outcome,
        });
    }

    fn alternative_written(&mut self, entrance: VertexId, alternative: VertexId) {
        self.events.push(TraceEvent::AlternativeWrite { entrance, alternative });
    }

    fn reported(&mut self, bubble: Superbubble) {
        self.events.push(TraceEvent::Report(bubble));
    }
}

impl TraceLog {
    /// `(start, exit, depth)` of every report call, in call order.
    pub fn report_calls(&self) -> Vec<(VertexId, VertexId, usize)> {
        self.events
            .iter()
            .filter_map(|e| match *e {
                TraceEvent::ReportCall { start, exit, depth } => Some((start, exit, depth)),
                _ => None,
            })
            .collect()
    }

    /// Labels every event; `g` must be the graph the run was made on.
    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        use serde_json::json;
        let l = |v: VertexId| g.label(v).to_owned();
        let events: Vec<_> = self
            .events
            .iter()
            .map(|e| match *e {
                TraceEvent::ReportCall { start, exit, depth } => json!({
                    "event": "reportCall", "start": l(start), "exit": l(exit), "depth": depth
                }),
                TraceEvent::Validate {
                    entrance,
                    exit,
                    outcome,
                } => {
                    let (result, alternative) = match outcome {
                        Validation::Valid => ("valid", None),
                        Validation::Alternative(a) => ("alternative", Some(l(a))),
                        Validation::NoBubble => ("noBubble", None),
                    };
                    json!({
                        "event": "validate", "entrance": l(entrance), "exit": l(exit),
                        "result": result, "alternative": alternative
                    })
                }
                TraceEvent::AlternativeWrite { entrance, alternative } => json!({
                    "event": "alternativeWrite", "entrance": l(entrance), "alternative": l(alternative)
                }),
                TraceEvent::Report(b) => json!({
                    "event": "report", "entrance": l(b.entrance), "exit": l(b.exit)
                }),
            })
            .collect();
        json!({ "events": events, "stats": self.stats })
    }
}

/// [`detect`] plus an event log of the run.
pub fn trace_detect(aug: &AugmentedGraph) -> Result<(SuperbubbleReport, TraceLog), TopoError> {
    let mut log = TraceLog::default();
    let outcome = detect_with(aug, ScanOptions::default(), &mut log)?;
    log.stats = outcome.stats;
    Ok((outcome.report, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{augment, parse_edge_list};

    struct Fixture {
        aug: AugmentedGraph,
        prepared: Prepared,
    }

    impl Fixture {
        fn new(text: &str) -> Self {
            let aug = augment(&parse_edge_list(text).unwrap().graph).unwrap();
            let prepared = Prepared::new(&aug).unwrap();
            Fixture { aug, prepared }
        }

        fn sample() -> Self {
            Self::new(include_str!("../testdata/sample.txt"))
        }

        fn v(&self, label: &str) -> VertexId {
            self.aug.graph().id(label).unwrap()
        }

        fn labels(&self, vs: &[VertexId]) -> Vec<String> {
            vs.iter().map(|&v| self.aug.graph().label(v).to_owned()).collect()
        }
    }

    #[test]
    fn entrance_and_exit_predicates() {
        let f = Fixture::sample();
        let g = f.aug.graph();
        assert!(is_entrance(g, f.v("v1")));
        assert!(!is_entrance(g, f.v("v9")));
        assert!(is_exit(g, f.v("v14")));
        assert!(!is_exit(g, f.v("v4")));
        assert!(!is_exit(g, f.v("v1")));

        let c = Fixture::new("a b\nb c");
        assert!(is_entrance(c.aug.graph(), c.v("b")));
    }

    #[test]
    fn sample_candidates() {
        let f = Fixture::sample();
        let (list, state) = build_candidates(f.aug.graph(), &f.prepared.order);
        let got: Vec<_> = list
            .iter()
            .map(|(v, r)| {
                format!(
                    "{}({})",
                    f.aug.graph().label(v),
                    if r == Role::Entrance { "ent" } else { "exit" }
                )
            })
            .collect();
        assert_eq!(
            got,
            [
                "v1(ent)",
                "v3(exit)",
                "v3(ent)",
                "v11(ent)",
                "v12(exit)",
                "v5(ent)",
                "v10(exit)",
                "v7(exit)",
                "v8(exit)",
                "v8(ent)",
                "v13(ent)",
                "v14(exit)"
            ]
        );
        assert_eq!(state.previous_entrance[f.v("v14").index()], Some(f.v("v13")));
        assert_eq!(state.previous_entrance[f.v("v8").index()], Some(f.v("v5")));
        assert_eq!(state.previous_entrance[f.v("v1").index()], None);
        assert!(state.alternative_entrance.iter().all(Option::is_none));
    }

    #[test]
    fn chain_candidates() {
        let f = Fixture::new("a b\nb c");
        let (list, _) = build_candidates(f.aug.graph(), &f.prepared.order);
        let got: Vec<_> = list.iter().collect();
        assert_eq!(
            got,
            vec![
                (f.v("a"), Role::Entrance),
                (f.v("b"), Role::Exit),
                (f.v("b"), Role::Entrance),
                (f.v("c"), Role::Exit)
            ]
        );
    }

    #[test]
    fn validation_examples() {
        let f = Fixture::sample();
        let (_, state) = build_candidates(f.aug.graph(), &f.prepared.order);
        let val = |a: &str, b: &str| {
            validate_superbubble(&f.prepared.order, &state, &f.prepared.index, f.v(a), f.v(b)).unwrap()
        };
        assert_eq!(val("v13", "v14"), Validation::Alternative(f.v("v8")));
        assert_eq!(val("v5", "v8"), Validation::Alternative(f.v("v3")));
        assert_eq!(val("v3", "v8"), Validation::Valid);
        assert_eq!(val("v8", "v14"), Validation::Valid);
        assert!(validate_superbubble(&f.prepared.order, &state, &f.prepared.index, f.v("v8"), f.v("v3")).is_err());
    }

    #[test]
    fn sample_detection() {
        let f = Fixture::sample();
        let report = detect(&f.aug).unwrap();
        assert_eq!(
            report.labeled(f.aug.graph()),
            [("v8", "v14"), ("v3", "v8"), ("v5", "v7"), ("v11", "v12"), ("v1", "v3")]
        );
        assert_eq!(report.filtered_count, 0);
    }

    #[test]
    fn sample_trace() {
        let f = Fixture::sample();
        let (_, log) = trace_detect(&f.aug).unwrap();
        let calls = log.report_calls();
        let top: Vec<_> = calls
            .iter()
            .filter(|c| c.2 == 0)
            .map(|&(s, e, _)| f.labels(&[s, e]))
            .collect();
        assert_eq!(top, [["v1", "v14"], ["v1", "v8"], ["v1", "v3"]]);
        let nested: Vec<_> = calls
            .iter()
            .filter(|c| c.2 > 0)
            .map(|&(s, e, _)| f.labels(&[s, e]))
            .collect();
        assert_eq!(nested, [["v11", "v7"], ["v10", "v10"], ["v11", "v12"]]);
        // v10/v10 reports nothing: the event right after it is not a report.
        let pos = log
            .events
            .iter()
            .position(|e| matches!(e, TraceEvent::ReportCall { start, .. } if *start == f.v("v10")))
            .unwrap();
        assert!(!matches!(log.events.get(pos + 1), Some(TraceEvent::Report(_))));
        assert!(log.events.contains(&TraceEvent::AlternativeWrite {
            entrance: f.v("v13"),
            alternative: f.v("v8")
        }));
        assert_eq!(log.stats.report_calls, calls.len());
    }

    #[test]
    fn chain_reports_in_exit_order() {
        let f = Fixture::new("a b\nb c");
        let report = detect(&f.aug).unwrap();
        assert_eq!(report.labeled(f.aug.graph()), [("b", "c"), ("a", "b")]);
    }

    #[test]
    fn artificial_bubbles_are_filtered() {
        // Two sources a, b merging into c: r' -> {a, b} -> c is <r', c>.
        let f = Fixture::new("a c\nb c\nc d");
        let report = detect(&f.aug).unwrap();
        assert_eq!(report.labeled(f.aug.graph()), [("c", "d")]);
        assert_eq!(report.filtered_count, 1);
    }

    #[test]
    fn report_json_shape() {
        let f = Fixture::sample();
        let report = detect(&f.aug).unwrap();
        let text = serde_json::to_string(&report.to_json(f.aug.graph())).unwrap();
        assert!(
            text.starts_with(r#"{"items":[{"entrance":"v8","exit":"v14"},"#),
            "{text}"
        );
        assert!(text.ends_with(r#""filteredCount":0}"#));
    }
}
