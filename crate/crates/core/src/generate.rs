//! Seeded random DAGs with optional planted diamonds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder, VertexId};

/// Identifier of the generator's PRNG, recorded alongside generated output.
pub const PRNG_ID: &str = "chacha8/rand_chacha-0.3";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GenSpec {
    pub n: usize,
    pub extra_edges: usize,
    pub planted_bubbles: usize,
    pub seed: u64,
    /// Cap on out-degree, e.g. 4 to mimic nucleotide graphs.
    pub max_outdeg: Option<usize>,
    /// Number of vertices of the random part that get no tree parent, i.e.
    /// the number of sources before diamonds are attached.
    pub roots: usize,
}

impl GenSpec {
    pub fn new(n: usize, extra_edges: usize, seed: u64) -> Self {
        GenSpec {
            n,
            extra_edges,
            planted_bubbles: 0,
            seed,
            max_outdeg: None,
            roots: 1,
        }
    }

    pub fn planted(mut self, count: usize) -> Self {
        self.planted_bubbles = count;
        self
    }

    pub fn max_outdeg(mut self, cap: usize) -> Self {
        self.max_outdeg = Some(cap);
        self
    }

    pub fn roots(mut self, roots: usize) -> Self {
        self.roots = roots;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("infeasible spec: {0}")]
    Infeasible(String),
}

struct Builder {
    rng: ChaCha8Rng,
    out: GraphBuilder,
    labels: Vec<VertexId>,
    outdeg: Vec<usize>,
    cap: usize,
}

impl Builder {
    fn edge(&mut self, from: usize, to: usize) -> bool {
        if self.outdeg[from] >= self.cap {
            return false;
        }
        let added = self.out.edge(self.labels[from], self.labels[to]);
        if added {
            self.outdeg[from] += 1;
        }
        added
    }

    fn has_room(&self, pos: usize) -> bool {
        self.outdeg[pos] < self.cap
    }
}

/// Builds a random DAG over `spec.n` vertices labelled `v0..v{n-1}`.
///
/// Vertices are placed at random positions; every edge points to a later
/// position. The first `n - 4 * planted` positions form a random forest
/// plus `extra_edges` extra forward edges; each planted diamond
/// `s -> {a, b} -> d` has an untouched interior, so `<s, d>` is a superbubble.
pub fn generate(spec: &GenSpec) -> Result<Graph, GenError> {
    let n = spec.n;
    if n < 2 {
        return Err(GenError::TooSmall(n));
    }
    if spec.extra_edges > n * (n - 1) / 2 {
        return Err(GenError::Infeasible(format!(
            "{} extra edges exceed n(n-1)/2 = {}",
            spec.extra_edges,
            n * (n - 1) / 2
        )));
    }
    if spec.planted_bubbles * 4 > n {
        return Err(GenError::Infeasible(format!(
            "{} diamonds need {} vertices, only {n} available",
            spec.planted_bubbles,
            spec.planted_bubbles * 4
        )));
    }
    let cap = spec.max_outdeg.unwrap_or(usize::MAX);
    if cap < 2 && spec.planted_bubbles > 0 {
        return Err(GenError::Infeasible("diamonds need out-degree 2".into()));
    }
    if cap == 0 {
        return Err(GenError::Infeasible("out-degree cap of 0".into()));
    }
    let base = n - 4 * spec.planted_bubbles;
    let roots = spec.roots.clamp(1, base.max(1));
    let tree_edges = base.saturating_sub(roots);
    let room = (base * base.saturating_sub(1) / 2).saturating_sub(tree_edges);
    if spec.extra_edges > room {
        return Err(GenError::Infeasible(format!(
            "only {room} extra edges fit among {base} random vertices"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut names: Vec<usize> = (0..n).collect();
    names.shuffle(&mut rng);
    let mut out = GraphBuilder::new();
    let labels = names.iter().map(|i| out.vertex(&format!("v{i}"))).collect();
    let mut b = Builder {
        rng,
        out,
        labels,
        outdeg: vec![0; n],
        cap,
    };

    for i in roots..base {
        // The vertex right before i has no children yet, so some slot is free.
        let mut j = b.rng.gen_range(0..i);
        if !b.has_room(j) {
            j = (0..i).rev().find(|&k| b.has_room(k)).expect("i - 1 has room");
        }
        b.edge(j, i);
    }

    let mut added = 0;
    let mut attempts = 0usize;
    let budget = 64 * spec.extra_edges + 1024;
    while added < spec.extra_edges {
        attempts += 1;
        if attempts > budget {
            return Err(GenError::Infeasible(format!(
                "placed only {added} of {} extra edges under the out-degree cap",
                spec.extra_edges
            )));
        }
        let x = b.rng.gen_range(0..base);
        let y = b.rng.gen_range(0..base);
        if x == y {
            continue;
        }
        let (from, to) = (x.min(y), x.max(y));
        if b.edge(from, to) {
            added += 1;
        }
    }

    for k in 0..spec.planted_bubbles {
        let at = base + 4 * k;
        let (s, a, c, d) = (at, at + 1, at + 2, at + 3);
        b.edge(s, a);
        b.edge(s, c);
        b.edge(a, d);
        b.edge(c, d);
        if base > 0 {
            let p = b.rng.gen_range(0..base);
            if b.has_room(p) {
                b.edge(p, s);
            }
            if p + 1 < base {
                let q = b.rng.gen_range(p + 1..base);
                b.edge(d, q);
            }
        }
    }

    Ok(b.out.build())
}

/// Per-seed spec for fuzz campaigns: at most `max_n` vertices and
/// `max_m` edges, with a mix of sparse and dense graphs, up to three planted
/// diamonds and up to three sources.
pub fn fuzz_spec(seed: u64, max_n: usize, max_m: usize) -> GenSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d_d1ce_ba5e);
    let n = rng.gen_range(2..=max_n.max(2));
    let planted = rng.gen_range(0..=(n / 4).min(3));
    let base = n - 4 * planted;
    let roots = rng.gen_range(1..=3usize).min(base.max(1));
    let tree = base.saturating_sub(roots);
    let room = (base * base.saturating_sub(1) / 2).saturating_sub(tree);
    // Diamonds bring four edges plus up to two attachments each.
    let budget = max_m.saturating_sub(tree + 6 * planted);
    let density = [n / 3, n, 2 * n][rng.gen_range(0..3)];
    let extra = rng.gen_range(0..=room.min(budget).min(density));
    GenSpec {
        n,
        extra_edges: extra,
        planted_bubbles: planted,
        seed,
        max_outdeg: None,
        roots,
    }
}
