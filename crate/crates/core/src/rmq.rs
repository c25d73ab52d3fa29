//! Sparse-table range minimum / maximum queries and the per-rank
//! furthest-parent / furthest-child arrays they index.
//!
//! Preprocessing is O(n log n); every query is two table lookups.

use std::marker::PhantomData;

use thiserror::Error;

use crate::graph::AugmentedGraph;
use crate::topo::{Rank, TopoOrder};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid query range [{i}, {j}] over 1..={len}")]
pub struct RangeError {
    pub i: usize,
    pub j: usize,
    pub len: usize,
}

/// Selects which extreme a [`SparseTable`] answers.
pub trait Extreme {
    fn pick(a: u32, b: u32) -> u32;
}

#[derive(Debug, Clone, Copy)]
pub enum Min {}

#[derive(Debug, Clone, Copy)]
pub enum Max {}

impl Extreme for Min {
    #[inline]
    fn pick(a: u32, b: u32) -> u32 {
        a.min(b)
    }
}

impl Extreme for Max {
    #[inline]
    fn pick(a: u32, b: u32) -> u32 {
        a.max(b)
    }
}

/// Range-extreme index over a 1-based array.
///
/// `levels[k][i]` holds the extreme of `base[i .. i + 2^k]` (0-based).
#[derive(Debug, Clone)]
pub struct SparseTable<E> {
    levels: Vec<Vec<u32>>,
    _extreme: PhantomData<E>,
}

pub type RangeMin = SparseTable<Min>;
pub type RangeMax = SparseTable<Max>;

impl<E: Extreme> SparseTable<E> {
    pub fn new(base: &[u32]) -> Self {
        let n = base.len();
        let mut levels = vec![base.to_vec()];
        let mut width = 1;
        while 2 * width <= n {
            let prev = levels.last().unwrap();
            let next: Vec<u32> = (0..=n - 2 * width).map(|i| E::pick(prev[i], prev[i + width])).collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable {
            levels,
            _extreme: PhantomData,
        }
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels[0].is_empty()
    }

    /// The underlying array, 0-based.
    pub fn base(&self) -> &[u32] {
        &self.levels[0]
    }

    /// Extreme of `base[i..=j]` for 1-based `1 <= i <= j <= len`.
    #[inline]
    pub fn query(&self, i: usize, j: usize) -> Result<u32, RangeError> {
        let len = self.len();
        if i == 0 || i > j || j > len {
            return Err(RangeError { i, j, len });
        }
        let (lo, span) = (i - 1, j - i + 1);
        let k = span.ilog2() as usize;
        let level = &self.levels[k];
        Ok(E::pick(level[lo], level[j - (1 << k)]))
    }
}

pub fn range_min(idx: &RangeMin, i: Rank, j: Rank) -> Result<Rank, RangeError> {
    idx.query(i, j).map(|r| r as Rank)
}

pub fn range_max(idx: &RangeMax, i: Rank, j: Rank) -> Result<Rank, RangeError> {
    idx.query(i, j).map(|r| r as Rank)
}

/// Per-rank furthest parent and furthest child.
///
/// `out_parent[r]` is the smallest rank among the parents of the vertex at
/// rank `r`; `out_child[r]` the largest rank among its children. The source
/// carries `n + 1` and the sink `0`; neither is ever inside a valid query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeArrays {
    out_parent: Vec<u32>,
    out_child: Vec<u32>,
}

impl RangeArrays {
    pub fn build(g: &AugmentedGraph, order: &TopoOrder) -> Self {
        let g = g.graph();
        let n = order.len();
        let sentinel_parent = (n + 1) as u32;
        let mut out_parent = Vec::with_capacity(n);
        let mut out_child = Vec::with_capacity(n);
        for v in order.iter() {
            let p = g
                .predecessors(v)
                .iter()
                .map(|&u| order.rank(u) as u32)
                .min()
                .unwrap_or(sentinel_parent);
            let c = g.successors(v).iter().map(|&u| order.rank(u) as u32).max().unwrap_or(0);
            out_parent.push(p);
            out_child.push(c);
        }
        RangeArrays { out_parent, out_child }
    }

    pub fn len(&self) -> usize {
        self.out_parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out_parent.is_empty()
    }

    pub fn out_parent(&self, r: Rank) -> u32 {
        self.out_parent[r - 1]
    }

    pub fn out_child(&self, r: Rank) -> u32 {
        self.out_child[r - 1]
    }

    pub fn out_parent_row(&self) -> &[u32] {
        &self.out_parent
    }

    pub fn out_child_row(&self) -> &[u32] {
        &self.out_child
    }
}

/// Query structures over [`RangeArrays`].
#[derive(Debug, Clone)]
pub struct RangeIndex {
    pub parents: RangeMin,
    pub children: RangeMax,
}

impl RangeIndex {
    pub fn new(arrays: &RangeArrays) -> Self {
        RangeIndex {
            parents: RangeMin::new(&arrays.out_parent),
            children: RangeMax::new(&arrays.out_child),
        }
    }
}
