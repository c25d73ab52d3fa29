//! Differential checks of the detector against the brute-force oracle.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::detector::{detect_with, Mutation, ScanOptions, ScanStats};
use crate::generate::{generate, GenError, GenSpec};
use crate::graph::{augment, Graph, GraphError};
use crate::oracle::{self, OracleError};
use crate::topo::TopoError;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Topo(#[from] TopoError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Generate(#[from] GenError),
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub detected: BTreeSet<(String, String)>,
    pub expected: BTreeSet<(String, String)>,
    pub stats: ScanStats,
    /// Vertices plus edges of the augmented graph the detector ran on.
    pub size: usize,
}

impl Comparison {
    pub fn matches(&self) -> bool {
        self.detected == self.expected
    }
}

/// Runs detector and oracle on `g` and collects both label-pair sets.
pub fn compare(g: &Graph, oracle_cap: usize, mutation: Mutation) -> Result<Comparison, VerifyError> {
    let aug = augment(g)?;
    let outcome = detect_with(&aug, ScanOptions { mutation }, &mut ())?;
    let expected = oracle::enumerate_capped(g, oracle_cap)?;
    let label = |(a, b): (crate::VertexId, crate::VertexId)| (g.label(a).to_owned(), g.label(b).to_owned());
    let h = aug.graph();
    Ok(Comparison {
        detected: outcome
            .report
            .items
            .iter()
            .map(|b| label((b.entrance, b.exit)))
            .collect(),
        expected: expected.pairs().into_iter().map(label).collect(),
        stats: outcome.stats,
        size: h.vertex_count() + h.edge_count(),
    })
}

#[derive(Debug)]
pub struct SeedResult {
    pub seed: u64,
    pub spec: GenSpec,
    pub outcome: Result<Comparison, VerifyError>,
}

/// Compares detector and oracle on one generated graph per seed, in
/// parallel. Results come back in seed order.
pub fn campaign<F>(
    seeds: impl IntoParallelIterator<Item = u64>,
    spec_for: F,
    oracle_cap: usize,
    mutation: Mutation,
) -> Vec<SeedResult>
where
    F: Fn(u64) -> GenSpec + Sync,
{
    let mut results: Vec<SeedResult> = seeds
        .into_par_iter()
        .map(|seed| {
            let spec = spec_for(seed);
            let outcome = generate(&spec)
                .map_err(VerifyError::from)
                .and_then(|g| compare(&g, oracle_cap, mutation));
            SeedResult { seed, spec, outcome }
        })
        .collect();
    results.sort_by_key(|r| r.seed);
    results
}
