//! Feature matrices and labelled datasets.
//!
//! A matrix holds `dim` features for each of `len` objects. Storage is
//! column-major with one column per object, so the features of a single
//! object are contiguous. Files on disk use the usual one-row-per-object
//! layout; the loaders transpose.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<S> {
    dim: usize,
    len: usize,
    data: Vec<S>,
}

impl<S: Scalar> FeatureMatrix<S> {
    /// Wraps `data` laid out as `len` consecutive columns of `dim` values.
    pub fn from_column_major(dim: usize, len: usize, data: Vec<S>) -> Result<Self> {
        if dim == 0 || len == 0 {
            return Err(Error::shape(format!(
                "matrix must have at least one feature and one object, got {dim}x{len}"
            )));
        }
        if data.len() != dim * len {
            return Err(Error::shape(format!(
                "{}x{} matrix needs {} values, got {}",
                dim,
                len,
                dim * len,
                data.len()
            )));
        }
        Ok(Self { dim, len, data })
    }

    /// Builds a matrix from one feature vector per object.
    pub fn from_columns<C: AsRef<[S]>>(columns: &[C]) -> Result<Self> {
        let dim = columns.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(dim * columns.len());
        for (i, column) in columns.iter().enumerate() {
            let column = column.as_ref();
            if column.len() != dim {
                return Err(Error::shape(format!(
                    "object {i} has {} features, expected {dim}",
                    column.len()
                )));
            }
            data.extend_from_slice(column);
        }
        Self::from_column_major(dim, columns.len(), data)
    }

    pub fn zeros(dim: usize, len: usize) -> Result<Self> {
        Self::from_column_major(dim, len, vec![S::zero(); dim * len])
    }

    /// Number of features per object (rows).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of objects (columns).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, feature: usize, object: usize) -> S {
        self.data[object * self.dim + feature]
    }

    pub fn column(&self, object: usize) -> &[S] {
        &self.data[object * self.dim..(object + 1) * self.dim]
    }

    pub fn columns(&self) -> std::slice::ChunksExact<'_, S> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            dim: self.dim,
            len: self.len,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Position of the first non-finite entry as `(object, feature)`.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|at| (at / self.dim, at % self.dim))
    }

    /// Affinely maps every feature onto `[0, 1]`. Constant features become 0.
    pub fn minmax_normalized(&self) -> Self {
        let mut lo = vec![S::infinity(); self.dim];
        let mut hi = vec![S::neg_infinity(); self.dim];
        for column in self.columns() {
            for (d, &v) in column.iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }
        let mut out = self.clone();
        for column in out.data.chunks_exact_mut(self.dim) {
            for (d, v) in column.iter_mut().enumerate() {
                let range = hi[d] - lo[d];
                *v = if range > S::zero() {
                    (*v - lo[d]) / range
                } else {
                    S::zero()
                };
            }
        }
        out
    }
}

/// Objects to score, optionally with names for the features and binary
/// ground truth (`true` = outlier).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<S> {
    values: FeatureMatrix<S>,
    feature_names: Option<Vec<String>>,
    labels: Option<Vec<bool>>,
}

impl<S: Scalar> Dataset<S> {
    /// Requires at least two objects and only finite values.
    pub fn new(values: FeatureMatrix<S>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::shape(format!(
                "a dataset needs at least 2 objects, got {}",
                values.len()
            )));
        }
        if let Some((object, feature)) = values.first_non_finite() {
            return Err(Error::NonFinite { object, feature });
        }
        Ok(Self {
            values,
            feature_names: None,
            labels: None,
        })
    }

    pub fn from_columns<C: AsRef<[S]>>(columns: &[C]) -> Result<Self> {
        Self::new(FeatureMatrix::from_columns(columns)?)
    }

    pub fn with_labels(mut self, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::shape(format!(
                "{} labels for {} objects",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(Error::shape(format!(
                "{} feature names for {} features",
                names.len(),
                self.dim()
            )));
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn values(&self) -> &FeatureMatrix<S> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn outlier_count(&self) -> Option<usize> {
        self.labels().map(|l| l.iter().filter(|&&x| x).count())
    }
}
