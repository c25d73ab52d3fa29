//! Phase-timed detection runs on generated graphs.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::detector::{scan, ScanOptions};
use crate::generate::{generate, GenError, GenSpec};
use crate::graph::{augment, AugmentedGraph, GraphError};
use crate::rmq::{RangeArrays, RangeIndex};
use crate::topo::{topological_sort, TopoError};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Topo(#[from] TopoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRecord {
    pub n: usize,
    pub m: usize,
    pub sort_secs: f64,
    pub arrays_secs: f64,
    pub scan_secs: f64,
    pub total_secs: f64,
    pub superbubbles: usize,
    pub validate_calls: usize,
}

impl BenchRecord {
    pub const CSV_HEADER: &'static str = "n,m,sort_s,arrays_rmq_s,scan_s,total_s,superbubbles,validate_calls";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{},{}",
            self.n,
            self.m,
            self.sort_secs,
            self.arrays_secs,
            self.scan_secs,
            self.total_secs,
            self.superbubbles,
            self.validate_calls
        )
    }

    pub fn phase_sum(&self) -> f64 {
        self.sort_secs + self.arrays_secs + self.scan_secs
    }
}

/// Times one full detection on an already augmented graph.
pub fn measure(aug: &AugmentedGraph) -> Result<BenchRecord, TopoError> {
    let g = aug.graph();
    let total = Instant::now();
    let t0 = Instant::now();
    let order = topological_sort(aug)?;
    let sort = t0.elapsed();
    let t1 = Instant::now();
    let arrays = RangeArrays::build(aug, &order);
    let index = RangeIndex::new(&arrays);
    let arrays_time = t1.elapsed();
    let t2 = Instant::now();
    let outcome = scan(aug, &order, &index, ScanOptions::default(), &mut ());
    let scan_time = t2.elapsed();
    let total = total.elapsed();
    Ok(BenchRecord {
        n: g.vertex_count(),
        m: g.edge_count(),
        sort_secs: sort.as_secs_f64(),
        arrays_secs: arrays_time.as_secs_f64(),
        scan_secs: scan_time.as_secs_f64(),
        total_secs: total.as_secs_f64(),
        superbubbles: outcome.report.len(),
        validate_calls: outcome.stats.validate_calls,
    })
}

/// Generates `spec` and keeps the fastest of `repeats` measurements.
pub fn bench_spec(spec: &GenSpec, repeats: usize) -> Result<BenchRecord, BenchError> {
    let aug = augment(&generate(spec)?)?;
    let mut best: Option<BenchRecord> = None;
    for _ in 0..repeats.max(1) {
        let r = measure(&aug)?;
        if best.is_none_or(|b| r.total_secs < b.total_secs) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one run"))
}

/// Ratio of each record's total time to its predecessor's.
pub fn doubling_ratios(records: &[BenchRecord]) -> Vec<f64> {
    records
        .windows(2)
        .map(|w| w[1].total_secs / w[0].total_secs.max(Duration::from_nanos(1).as_secs_f64()))
        .collect()
}
