//! Feature propagation `X' = X·A` as a gather-sum over the neighbor table.

use rayon::prelude::*;

use crate::dataset::FeatureMatrix;
use crate::error::{Error, Result};
use crate::graph::NeighborTable;
use crate::scalar::Scalar;

/// Each object's column becomes itself plus the sum of its neighbors'
/// columns, in neighbor order. Runs in `O(n·k·D)` without building `A`.
pub fn propagate<S: Scalar>(data: &FeatureMatrix<S>, graph: &NeighborTable) -> Result<FeatureMatrix<S>> {
    let dim = data.dim();
    let mut out = vec![S::zero(); data.as_slice().len()];
    propagate_with(data, graph, &mut out, dim, |_, column, slot| {
        slot.copy_from_slice(column)
    })?;
    FeatureMatrix::from_column_major(dim, data.len(), out)
}

/// Runs `emit(i, propagated_column_i, slot_i)` for every object, where
/// `slot_i` is the `i`-th chunk of `width` items of `out`. Lets callers
/// reduce each column without materializing `X'`.
pub(crate) fn propagate_with<S, T, F>(
    data: &FeatureMatrix<S>,
    graph: &NeighborTable,
    out: &mut [T],
    width: usize,
    emit: F,
) -> Result<()>
where
    S: Scalar,
    T: Send,
    F: Fn(usize, &[S], &mut [T]) + Sync,
{
    if graph.n() != data.len() {
        return Err(Error::shape(format!(
            "graph has {} rows but data has {} objects",
            graph.n(),
            data.len()
        )));
    }
    debug_assert_eq!(out.len(), width * data.len());
    macro_rules! fixed {
        ($($d:literal)*) => {
            match data.dim() {
                $($d => gather::<S, T, F, $d>(data, graph, out, width, emit),)*
                _ => gather_dyn(data, graph, out, width, emit),
            }
        };
    }
    fixed!(1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16);
    Ok(())
}

const MIN_ROWS: usize = 256;
// rows ahead whose neighbor columns are prefetched
const LOOKAHEAD: usize = 2;

#[inline(always)]
fn prefetch<S>(column: &[S]) {
    #[cfg(target_arch = "x86_64")]
    // SAFETY: a prefetch is only a hint and never faults.
    unsafe {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        _mm_prefetch::<_MM_HINT_T0>(column.as_ptr().cast());
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = column;
}

fn gather<S, T, F, const D: usize>(data: &FeatureMatrix<S>, graph: &NeighborTable, out: &mut [T], width: usize, emit: F)
where
    S: Scalar,
    T: Send,
    F: Fn(usize, &[S], &mut [T]) + Sync,
{
    let (src, _) = data.as_slice().as_chunks::<D>();
    out.par_chunks_mut(width)
        .with_min_len(MIN_ROWS)
        .enumerate()
        .for_each(|(i, slot)| {
            if i + LOOKAHEAD < src.len() {
                for &j in graph.row(i + LOOKAHEAD) {
                    prefetch(&src[j as usize]);
                }
            }
            let mut acc = src[i];
            for &j in graph.row(i) {
                let v = &src[j as usize];
                for d in 0..D {
                    acc[d] += v[d];
                }
            }
            emit(i, &acc, slot);
        });
}

fn gather_dyn<S, T, F>(data: &FeatureMatrix<S>, graph: &NeighborTable, out: &mut [T], width: usize, emit: F)
where
    S: Scalar,
    T: Send,
    F: Fn(usize, &[S], &mut [T]) + Sync,
{
    out.par_chunks_mut(width)
        .with_min_len(MIN_ROWS)
        .enumerate()
        .for_each_init(Vec::new, |acc, (i, slot)| {
            if i + LOOKAHEAD < data.len() {
                for &j in graph.row(i + LOOKAHEAD) {
                    prefetch(data.column(j as usize));
                }
            }
            acc.clear();
            acc.extend_from_slice(data.column(i));
            for &j in graph.row(i) {
                for (a, &v) in acc.iter_mut().zip(data.column(j as usize)) {
                    *a += v;
                }
            }
            emit(i, acc, slot);
        });
}
