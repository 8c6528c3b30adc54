//! Random k-neighborhood graphs.
//!
//! Each object gets `k` distinct neighbors drawn uniformly from the other
//! `n - 1` objects. Links point from the neighbors to the object and every
//! weight, including the implicit self-loop, is 1, so the table is the
//! sparse form of an adjacency matrix `A` with `A[j][i] = 1` for each
//! neighbor `j` of `i` and a unit diagonal.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RowStream;

/// `n` rows of `k` neighbor indices, stored flat as `u32`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTable {
    n: usize,
    k: usize,
    neighbors: Vec<u32>,
}

impl NeighborTable {
    /// Builds a table from explicit rows, checking range, self-exclusion and
    /// distinctness.
    pub fn from_rows<R: AsRef<[usize]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        check_index_range(n)?;
        let k = rows.first().map_or(0, |r| r.as_ref().len());
        let mut neighbors = Vec::with_capacity(n * k);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != k {
                return Err(Error::shape(format!(
                    "row {i} has {} neighbors, expected {k}",
                    row.len()
                )));
            }
            for (a, &j) in row.iter().enumerate() {
                if j >= n {
                    return Err(Error::invalid(format!("row {i}: neighbor {j} out of range")));
                }
                if j == i {
                    return Err(Error::invalid(format!("row {i} lists itself")));
                }
                if row[..a].contains(&j) {
                    return Err(Error::invalid(format!("row {i} repeats neighbor {j}")));
                }
            }
            neighbors.extend(row.iter().map(|&j| j as u32));
        }
        Ok(Self { n, k, neighbors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        (0..self.n).map(move |i| self.row(i))
    }
}

fn check_index_range(n: usize) -> Result<()> {
    if u32::try_from(n).is_err() {
        return Err(Error::invalid(format!("n must fit in 32 bits, got {n}")));
    }
    Ok(())
}

pub(crate) fn check_graph_params(n: usize, k: usize) -> Result<()> {
    check_index_range(n)?;
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if k < 1 {
        return Err(Error::invalid(format!("k must be at least 1, got {k}")));
    }
    if k > n - 1 {
        return Err(Error::invalid(format!("k must be at most n - 1 = {}, got {k}", n - 1)));
    }
    Ok(())
}

/// Samples graph number `graph_index` for `n` objects.
///
/// Row `i` depends only on `(seed, graph_index, i)`: a partial Fisher–Yates
/// shuffle draws `k` distinct values from `0..n-1` and values `>= i` are
/// shifted up by one to skip `i` itself.
pub fn generate_graph(n: usize, k: usize, graph_index: u64, seed: u64) -> Result<NeighborTable> {
    check_graph_params(n, k)?;
    let mut neighbors = vec![0u32; n * k];
    neighbors
        .par_chunks_mut(k)
        .with_min_len(256)
        .enumerate()
        .for_each_init(Scratch::default, |scratch, (i, row)| {
            let mut rng = RowStream::new(seed, graph_index, i as u64);
            sample_row(row, n - 1, i, &mut rng, scratch);
        });
    Ok(NeighborTable { n, k, neighbors })
}

/// Virtual array `0..m` with a record of swapped slots.
trait SwapSlots {
    fn get(&self, slot: usize) -> usize;
    fn set(&mut self, slot: usize, value: usize);
}

struct DenseSlots<'a>(&'a mut Vec<usize>);

impl SwapSlots for DenseSlots<'_> {
    fn get(&self, slot: usize) -> usize {
        self.0[slot]
    }
    fn set(&mut self, slot: usize, value: usize) {
        self.0[slot] = value;
    }
}

struct ScanSlots<'a>(&'a mut Vec<(usize, usize)>);

impl SwapSlots for ScanSlots<'_> {
    fn get(&self, slot: usize) -> usize {
        self.0.iter().rev().find(|(s, _)| *s == slot).map_or(slot, |&(_, v)| v)
    }
    fn set(&mut self, slot: usize, value: usize) {
        self.0.push((slot, value));
    }
}

struct MapSlots<'a>(&'a mut HashMap<usize, usize>);

impl SwapSlots for MapSlots<'_> {
    fn get(&self, slot: usize) -> usize {
        self.0.get(&slot).copied().unwrap_or(slot)
    }
    fn set(&mut self, slot: usize, value: usize) {
        self.0.insert(slot, value);
    }
}

fn partial_shuffle(out: &mut [usize], m: usize, rng: &mut RowStream, slots: &mut impl SwapSlots) {
    for (j, dst) in out.iter_mut().enumerate() {
        let r = j + rng.below((m - j) as u64) as usize;
        *dst = slots.get(r);
        // slot j is never read again
        let displaced = slots.get(j);
        slots.set(r, displaced);
    }
}

const SCAN_LIMIT: usize = 64;

/// Per-worker buffers reused across rows.
#[derive(Default)]
struct Scratch {
    drawn: Vec<usize>,
    dense: Vec<usize>,
    scan: Vec<(usize, usize)>,
    map: HashMap<usize, usize>,
}

fn sample_row(out: &mut [u32], m: usize, self_index: usize, rng: &mut RowStream, scratch: &mut Scratch) {
    let k = out.len();
    let drawn = &mut scratch.drawn;
    drawn.clear();
    drawn.resize(k, 0);
    if 2 * k >= m {
        scratch.dense.clear();
        scratch.dense.extend(0..m);
        partial_shuffle(drawn, m, rng, &mut DenseSlots(&mut scratch.dense));
    } else if k <= SCAN_LIMIT {
        scratch.scan.clear();
        partial_shuffle(drawn, m, rng, &mut ScanSlots(&mut scratch.scan));
    } else {
        scratch.map.clear();
        partial_shuffle(drawn, m, rng, &mut MapSlots(&mut scratch.map));
    }
    for (dst, &v) in out.iter_mut().zip(drawn.iter()) {
        *dst = if v >= self_index { v + 1 } else { v } as u32;
    }
}
