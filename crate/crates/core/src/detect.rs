//! Outlier factors over several random graphs and top-p selection.

use std::borrow::Cow;

use rayon::prelude::*;

use crate::dataset::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::fluctuation::{check_guard, propagated_fluctuation, FluctuationVector, DEFAULT_DENOM_GUARD};
use crate::graph::{check_graph_params, generate_graph, NeighborTable};
use crate::scalar::Scalar;

/// Optional preprocessing applied before graph generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Raw feature values.
    #[default]
    None,
    /// Each feature mapped onto `[0, 1]`; constant features become 0.
    MinMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FbodParams<S> {
    /// Neighbors per object.
    pub k: usize,
    /// Number of independently generated graphs.
    pub graphs: usize,
    /// How many of the highest-scoring objects are flagged.
    pub top_p: usize,
    pub seed: u64,
    pub denom_guard: S,
    pub normalize: Normalization,
}

impl<S: Scalar> FbodParams<S> {
    pub fn new(k: usize, graphs: usize, top_p: usize, seed: u64) -> Self {
        Self {
            k,
            graphs,
            top_p,
            seed,
            denom_guard: S::of_f64(DEFAULT_DENOM_GUARD),
            normalize: Normalization::None,
        }
    }

    pub fn with_normalization(mut self, normalize: Normalization) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn with_guard(mut self, guard: S) -> Self {
        self.denom_guard = guard;
        self
    }

    /// Checks the parameters against a dataset of `n` objects.
    pub fn validate(&self, n: usize) -> Result<()> {
        check_graph_params(n, self.k)?;
        if self.graphs < 1 {
            return Err(Error::invalid(format!(
                "graph count must be at least 1, got {}",
                self.graphs
            )));
        }
        if self.top_p > n {
            return Err(Error::invalid(format!(
                "top-p must be at most n = {n}, got {}",
                self.top_p
            )));
        }
        check_guard(self.denom_guard)
    }
}

/// Outlier factors with the descending ranking and the top-p flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport<S> {
    of: Vec<S>,
    order: Vec<usize>,
    predicted: Vec<bool>,
}

impl<S: Scalar> ScoreReport<S> {
    /// Ranks `of` in descending order (ties by ascending index) and flags the
    /// first `top_p` objects.
    pub fn from_scores(of: Vec<S>, top_p: usize) -> Result<Self> {
        if top_p > of.len() {
            return Err(Error::invalid(format!(
                "top-p must be at most n = {}, got {top_p}",
                of.len()
            )));
        }
        if let Some(i) = of.iter().position(|v| v.is_nan()) {
            return Err(Error::invalid(format!("outlier factor of object {i} is NaN")));
        }
        let order = descending_order(&of);
        let mut predicted = vec![false; of.len()];
        for &i in &order[..top_p] {
            predicted[i] = true;
        }
        Ok(Self { of, order, predicted })
    }

    pub fn len(&self) -> usize {
        self.of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.of.is_empty()
    }

    pub fn outlier_factors(&self) -> &[S] {
        &self.of
    }

    /// Object indices by descending outlier factor.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn predicted(&self) -> &[bool] {
        &self.predicted
    }

    /// The flagged objects, highest factor first.
    pub fn top(&self) -> &[usize] {
        let p = self.predicted.iter().filter(|&&x| x).count();
        &self.order[..p]
    }

    /// 1-based position of each object in [`order`](Self::order).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (pos, &i) in self.order.iter().enumerate() {
            ranks[i] = pos + 1;
        }
        ranks
    }
}

/// Maps a float to a `u64` whose unsigned order matches the float order
/// (`-0.0` sorts just below `+0.0`; NaN is excluded earlier).
#[inline]
fn ordered_bits(v: f64) -> u64 {
    let bits = v.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// Indices by descending value, ties by ascending index. LSD radix sort on
/// 8-bit digits: stable and linear in `n`.
fn descending_order<S: Scalar>(values: &[S]) -> Vec<usize> {
    let n = values.len();
    let mut keys: Vec<u64> = values
        .iter()
        .map(|v| !ordered_bits(if *v == S::zero() { 0.0 } else { v.as_f64() }))
        .collect();
    let mut idx: Vec<u32> = (0..n as u32).collect();
    let mut keys_tmp = vec![0u64; n];
    let mut idx_tmp = vec![0u32; n];
    for shift in (0..64).step_by(8) {
        let mut counts = [0usize; 257];
        for &key in &keys {
            counts[((key >> shift) & 0xff) as usize + 1] += 1;
        }
        if counts.contains(&n) {
            continue;
        }
        for b in 1..257 {
            counts[b] += counts[b - 1];
        }
        for (&key, &i) in keys.iter().zip(&idx) {
            let slot = &mut counts[((key >> shift) & 0xff) as usize];
            keys_tmp[*slot] = key;
            idx_tmp[*slot] = i;
            *slot += 1;
        }
        std::mem::swap(&mut keys, &mut keys_tmp);
        std::mem::swap(&mut idx, &mut idx_tmp);
    }
    idx.into_iter().map(|i| i as usize).collect()
}

/// Adds `Σ_{j ∈ N(i)} |f(i) - f(j)|` to `of[i]` for one graph.
fn accumulate<S: Scalar>(of: &mut [S], fluct: &[S], graph: &NeighborTable) {
    of.par_iter_mut().with_min_len(1024).enumerate().for_each(|(i, acc)| {
        let own = fluct[i];
        for &j in graph.row(i) {
            *acc += (own - fluct[j as usize]).abs();
        }
    });
}

/// Sums neighbor fluctuation gaps over all graphs; vector `t` is compared
/// only through table `t`.
pub fn outlier_factor<S: Scalar>(fluctuations: &[FluctuationVector<S>], graphs: &[NeighborTable]) -> Result<Vec<S>> {
    if fluctuations.is_empty() || fluctuations.len() != graphs.len() {
        return Err(Error::shape(format!(
            "{} fluctuation vectors for {} graphs",
            fluctuations.len(),
            graphs.len()
        )));
    }
    let n = graphs[0].n();
    for (t, (f, g)) in fluctuations.iter().zip(graphs).enumerate() {
        if f.len() != n || g.n() != n {
            return Err(Error::shape(format!(
                "graph {t}: {} fluctuations and {} rows, expected {n}",
                f.len(),
                g.n()
            )));
        }
    }
    let mut of = vec![S::zero(); n];
    for (f, g) in fluctuations.iter().zip(graphs) {
        accumulate(&mut of, f, g);
    }
    Ok(of)
}

fn prepared<'a, S: Scalar>(data: &'a Dataset<S>, params: &FbodParams<S>) -> Result<Cow<'a, FeatureMatrix<S>>> {
    params.validate(data.len())?;
    if let Some((object, feature)) = data.values().first_non_finite() {
        return Err(Error::NonFinite { object, feature });
    }
    Ok(match params.normalize {
        Normalization::None => Cow::Borrowed(data.values()),
        Normalization::MinMax => Cow::Owned(data.values().minmax_normalized()),
    })
}

fn graph_fluctuation<S: Scalar>(
    values: &FeatureMatrix<S>,
    params: &FbodParams<S>,
    t: usize,
) -> Result<(NeighborTable, FluctuationVector<S>)> {
    let graph = generate_graph(values.len(), params.k, t as u64, params.seed)?;
    let fluct = propagated_fluctuation(values, &graph, params.denom_guard)?;
    Ok((graph, fluct))
}

/// The per-graph neighbor tables and fluctuations `detect` would use.
pub fn fluctuation_trace<S: Scalar>(
    data: &Dataset<S>,
    params: &FbodParams<S>,
) -> Result<Vec<(NeighborTable, FluctuationVector<S>)>> {
    let values = prepared(data, params)?;
    (0..params.graphs)
        .map(|t| graph_fluctuation(&values, params, t))
        .collect()
}

/// Scores every object and flags the `top_p` most outlying.
///
/// Graphs are processed one at a time with `graph_index = 0..graphs`, so
/// memory stays at one table and one propagated matrix. The result is a
/// pure function of `(data, params)` regardless of the thread count.
pub fn detect<S: Scalar>(data: &Dataset<S>, params: &FbodParams<S>) -> Result<ScoreReport<S>> {
    let values = prepared(data, params)?;
    let mut of = vec![S::zero(); values.len()];
    for t in 0..params.graphs {
        let (graph, fluct) = graph_fluctuation(&values, params, t)?;
        accumulate(&mut of, &fluct, &graph);
    }
    ScoreReport::from_scores(of, params.top_p)
}
