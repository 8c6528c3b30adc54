//! Per-object fluctuation: how much propagation diluted an object's own
//! feature values.

use std::ops::Deref;

use rayon::prelude::*;

use crate::dataset::FeatureMatrix;
use crate::error::{Error, Result};
use crate::graph::NeighborTable;
use crate::propagate::propagate_with;
use crate::scalar::Scalar;

/// Default clamp applied to propagated denominators.
pub const DEFAULT_DENOM_GUARD: f64 = 1e-12;

/// One fluctuation value per object for a single graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationVector<S>(Vec<S>);

impl<S: Scalar> FluctuationVector<S> {
    pub fn new(values: Vec<S>) -> Self {
        Self(values)
    }

    pub fn into_vec(self) -> Vec<S> {
        self.0
    }
}

impl<S> Deref for FluctuationVector<S> {
    type Target = [S];

    fn deref(&self) -> &[S] {
        &self.0
    }
}

/// Denominator with magnitude at least `guard`, keeping its sign; exact
/// zero maps to `+guard`.
#[inline]
fn guarded<S: Scalar>(denominator: S, guard: S) -> S {
    if denominator == S::zero() {
        guard
    } else if denominator.abs() < guard {
        guard.copysign(denominator)
    } else {
        denominator
    }
}

pub(crate) fn check_guard<S: Scalar>(guard: S) -> Result<()> {
    if !(guard.is_finite() && guard > S::zero()) {
        return Err(Error::invalid(format!(
            "denominator guard must be positive and finite, got {guard}"
        )));
    }
    Ok(())
}

/// `Σ_d x[d,i] / x'[d,i]` for every object `i`. Zero numerators contribute
/// zero whatever the denominator.
pub fn fluctuation<S: Scalar>(
    original: &FeatureMatrix<S>,
    propagated: &FeatureMatrix<S>,
    guard: S,
) -> Result<FluctuationVector<S>> {
    check_guard(guard)?;
    if original.dim() != propagated.dim() || original.len() != propagated.len() {
        return Err(Error::shape(format!(
            "original is {}x{} but propagated is {}x{}",
            original.dim(),
            original.len(),
            propagated.dim(),
            propagated.len()
        )));
    }
    let values = original
        .as_slice()
        .par_chunks_exact(original.dim())
        .zip(propagated.as_slice().par_chunks_exact(original.dim()))
        .with_min_len(256)
        .map(|(x, xp)| object_fluctuation(x, xp, guard))
        .collect();
    Ok(FluctuationVector(values))
}

#[inline]
fn object_fluctuation<S: Scalar>(x: &[S], xp: &[S], guard: S) -> S {
    x.iter()
        .zip(xp)
        .filter(|(&num, _)| num != S::zero())
        .map(|(&num, &den)| num / guarded(den, guard))
        .sum()
}

/// Same values as `fluctuation(original, &propagate(original, graph)?, guard)`
/// without storing the propagated matrix.
pub(crate) fn propagated_fluctuation<S: Scalar>(
    original: &FeatureMatrix<S>,
    graph: &NeighborTable,
    guard: S,
) -> Result<FluctuationVector<S>> {
    check_guard(guard)?;
    let mut values = vec![S::zero(); original.len()];
    propagate_with(original, graph, &mut values, 1, |i, column, slot| {
        slot[0] = object_fluctuation(original.column(i), column, guard);
    })?;
    Ok(FluctuationVector(values))
}
