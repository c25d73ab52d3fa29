//! Graphviz export, optionally annotated with a superbubble report.

use std::fmt::Write;

use crate::detector::SuperbubbleReport;
use crate::graph::{Graph, VertexId};
use crate::oracle::reachable_avoiding;

fn id(label: &str) -> String {
    let plain = label
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    let numeral = !label.is_empty() && label.chars().all(|c| c.is_ascii_digit());
    if plain || numeral {
        label.to_owned()
    } else {
        format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Renders `g` as a digraph. With a report, entrances are drawn as boxes,
/// exits as double circles, and each bubble's interior becomes a cluster.
/// Interiors of distinct superbubbles are nested or disjoint, so the clusters
/// nest the same way.
pub fn export_dot(g: &Graph, report: Option<&SuperbubbleReport>) -> String {
    let mut out = String::from("digraph G {\n");
    let report = report.filter(|r| !r.is_empty());

    if let Some(report) = report {
        let mut role = vec![(false, false); g.vertex_count()];
        for b in &report.items {
            role[b.entrance.index()].0 = true;
            role[b.exit.index()].1 = true;
        }
        for v in g.vertices() {
            let attrs = match role[v.index()] {
                (true, true) => "shape=box, peripheries=2, style=filled, fillcolor=gold",
                (true, false) => "shape=box, style=filled, fillcolor=palegreen",
                (false, true) => "shape=doublecircle, style=filled, fillcolor=lightblue",
                (false, false) => continue,
            };
            let _ = writeln!(out, "  {} [{attrs}];", id(g.label(v)));
        }
        write_clusters(&mut out, g, report);
    }

    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {} -> {};", id(g.label(u)), id(g.label(v)));
    }
    out.push_str("}\n");
    out
}

fn write_clusters(out: &mut String, g: &Graph, report: &SuperbubbleReport) {
    let interiors: Vec<Vec<VertexId>> = report
        .items
        .iter()
        .map(|b| {
            reachable_avoiding(g, b.entrance, b.exit)
                .iter()
                .filter(|&v| v != b.entrance && v != b.exit)
                .collect()
        })
        .collect();

    // Parent cluster = smallest other interior holding this bubble's entrance.
    let mut owner: Vec<Option<usize>> = vec![None; g.vertex_count()];
    let mut by_size: Vec<usize> = (0..interiors.len()).collect();
    by_size.sort_by_key(|&i| std::cmp::Reverse(interiors[i].len()));
    let mut parent = vec![None; interiors.len()];
    for &i in &by_size {
        parent[i] = owner[report.items[i].entrance.index()];
        for &v in &interiors[i] {
            owner[v.index()] = Some(i);
        }
    }

    let mut children = vec![Vec::new(); interiors.len()];
    let mut roots = Vec::new();
    for (i, p) in parent.iter().enumerate() {
        match p {
            Some(p) => children[*p].push(i),
            None => roots.push(i),
        }
    }

    let nest = Nest {
        g,
        report,
        owner: &owner,
        interiors: &interiors,
        children: &children,
    };
    for r in roots {
        nest.emit(out, r, 1);
    }
}

struct Nest<'a> {
    g: &'a Graph,
    report: &'a SuperbubbleReport,
    owner: &'a [Option<usize>],
    interiors: &'a [Vec<VertexId>],
    children: &'a [Vec<usize>],
}

impl Nest<'_> {
    fn emit(&self, out: &mut String, i: usize, depth: usize) {
        let g = self.g;
        let pad = "  ".repeat(depth);
        let b = self.report.items[i];
        let _ = writeln!(out, "{pad}subgraph cluster_{i} {{");
        let _ = writeln!(
            out,
            "{pad}  label=\"<{}, {}>\";",
            g.label(b.entrance).replace('"', "\\\""),
            g.label(b.exit).replace('"', "\\\"")
        );
        for &v in self.interiors[i].iter().filter(|v| self.owner[v.index()] == Some(i)) {
            let _ = writeln!(out, "{pad}  {};", id(g.label(v)));
        }
        for &c in &self.children[i] {
            self.emit(out, c, depth + 1);
        }
        let _ = writeln!(out, "{pad}}}");
    }
}
