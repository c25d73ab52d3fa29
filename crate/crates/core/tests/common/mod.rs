#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use superbubble::detector::{trace_detect, TraceEvent, Validation};
use superbubble::oracle;
use superbubble::topo::{check_ordering_properties, topological_sort};
use superbubble::{augment, parse_edge_list, Graph, VertexId};

pub const SAMPLE: &str = include_str!("../../testdata/sample.txt");

pub fn sample() -> Graph {
    parse_edge_list(SAMPLE).unwrap().graph
}

/// Counters describing what a property run actually exercised.
#[derive(Debug, Default, Clone, Copy)]
pub struct Coverage {
    pub bubbles: usize,
    pub forced_pairs: usize,
    pub interval_pairs: usize,
    pub alternative_pairs: usize,
    pub ancestors: usize,
}

impl Coverage {
    pub fn add(&mut self, o: Coverage) {
        self.bubbles += o.bubbles;
        self.forced_pairs += o.forced_pairs;
        self.interval_pairs += o.interval_pairs;
        self.alternative_pairs += o.alternative_pairs;
        self.ancestors += o.ancestors;
    }
}

/// Checks the structural guarantees of one detection run on `g`. Interiors
/// come from the brute-force oracle, so `g` should stay small.
pub fn check_properties(g: &Graph) -> Result<Coverage, String> {
    let aug = augment(g).map_err(|e| e.to_string())?;
    let h = aug.graph();
    let order = topological_sort(&aug).map_err(|e| e.to_string())?;
    let (report, log) = trace_detect(&aug).map_err(|e| e.to_string())?;
    let mut cov = Coverage {
        bubbles: report.len(),
        ..Coverage::default()
    };
    let name = |v: VertexId| h.label(v).to_owned();

    // Each vertex enters and exits at most one superbubble.
    let mut entrances = BTreeSet::new();
    let mut exits = BTreeSet::new();
    for b in &report.items {
        if !entrances.insert(b.entrance) {
            return Err(format!("{} is the entrance of two superbubbles", name(b.entrance)));
        }
        if !exits.insert(b.exit) {
            return Err(format!("{} is the exit of two superbubbles", name(b.exit)));
        }
    }

    // A lone edge between an out-degree-1 tail and an in-degree-1 head is
    // always a superbubble.
    let reported: BTreeSet<_> = report.items.iter().map(|b| (b.entrance, b.exit)).collect();
    for (p, c) in g.edges() {
        if g.out_degree(p) == 1 && g.in_degree(c) == 1 {
            cov.forced_pairs += 1;
            if !reported.contains(&(p, c)) {
                return Err(format!("forced pair <{}, {}> not reported", name(p), name(c)));
            }
        }
    }

    // Oracle interiors are exactly the rank intervals.
    let truth = oracle::enumerate(g).map_err(|e| e.to_string())?;
    let interiors: HashMap<_, _> = truth
        .bubbles
        .iter()
        .map(|b| ((b.entrance, b.exit), &b.interior))
        .collect();
    for b in &report.items {
        let interior = interiors
            .get(&(b.entrance, b.exit))
            .ok_or_else(|| format!("<{}, {}> unknown to the oracle", name(b.entrance), name(b.exit)))?;
        let (lo, hi) = (order.rank(b.entrance), order.rank(b.exit));
        let by_rank: BTreeSet<VertexId> = (lo + 1..hi).map(|r| order.vertex_at(r)).collect();
        let by_oracle: BTreeSet<VertexId> = interior.iter().copied().collect();
        if by_rank != by_oracle {
            return Err(format!(
                "<{}, {}> interior differs from its rank interval",
                name(b.entrance),
                name(b.exit)
            ));
        }
    }

    // Intervals nest or touch at one endpoint; they never cross.
    let spans: Vec<(usize, usize)> = report
        .items
        .iter()
        .map(|b| (order.rank(b.entrance), order.rank(b.exit)))
        .collect();
    for (i, &(a0, a1)) in spans.iter().enumerate() {
        for &(b0, b1) in &spans[i + 1..] {
            cov.interval_pairs += 1;
            let crosses = (a0 < b0 && b0 < a1 && a1 < b1) || (b0 < a0 && a0 < b1 && b1 < a1);
            if crosses {
                return Err(format!("intervals [{a0}, {a1}] and [{b0}, {b1}] cross"));
            }
        }
    }

    // Edges point forward and subtree intervals are reachable.
    let ordering = check_ordering_properties(h, &order, 64);
    if !ordering.passed {
        return Err(format!("ordering check failed: {:?}", ordering.violation));
    }
    cov.ancestors = ordering.ancestors_checked;

    // For a fixed entrance, a smaller exit never yields an earlier alternative.
    let mut alternatives: HashMap<VertexId, Vec<(usize, usize)>> = HashMap::new();
    for ev in &log.events {
        if let TraceEvent::Validate {
            entrance,
            exit,
            outcome: Validation::Alternative(t),
        } = *ev
        {
            alternatives
                .entry(entrance)
                .or_default()
                .push((order.rank(exit), order.rank(t)));
        }
    }
    for (s, seen) in &alternatives {
        for (i, &(e, t)) in seen.iter().enumerate() {
            for &(e2, t2) in &seen[i + 1..] {
                cov.alternative_pairs += 1;
                if (e2 < e && t2 < t) || (e < e2 && t < t2) {
                    return Err(format!("alternatives for {} went backwards", name(*s)));
                }
            }
        }
    }

    let bound = 4 * (h.vertex_count() + h.edge_count());
    if log.stats.validate_calls > bound {
        return Err(format!("{} validate calls exceed {bound}", log.stats.validate_calls));
    }
    Ok(cov)
}

/// Reference scans for range queries, 1-based and inclusive.
pub fn naive_min(base: &[u32], i: usize, j: usize) -> u32 {
    *base[i - 1..j].iter().min().unwrap()
}

pub fn naive_max(base: &[u32], i: usize, j: usize) -> u32 {
    *base[i - 1..j].iter().max().unwrap()
}
