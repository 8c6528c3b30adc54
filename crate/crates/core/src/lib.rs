//! Fluctuation-based outlier detection.
//!
//! Objects are linked into random k-neighborhood graphs, feature values are
//! propagated along the links, and each object is scored by how far its
//! *fluctuation* (the share of its propagated features that is still its
//! own) sits from its neighbors'. The whole pipeline is linear in the number
//! of objects.
//!
//! ```
//! use fbod::{detect, synth, FbodParams};
//!
//! let data = synth::make_clusters::<f64>(&synth::ClusterSpec::planted(7)).unwrap();
//! let report = detect(&data, &FbodParams::new(5, 3, 4, 7)).unwrap();
//! assert_eq!(report.top().len(), 4);
//! ```
//!
//! Numeric code is generic over [`Scalar`]; the `*64` / `*32` aliases below
//! fix the precision.

pub mod dataset;
pub mod detect;
pub mod error;
pub mod fluctuation;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod propagate;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use dataset::{Dataset, FeatureMatrix};
pub use detect::{detect, fluctuation_trace, outlier_factor, FbodParams, Normalization, ScoreReport};
pub use error::{Error, Result};
pub use fluctuation::{fluctuation, FluctuationVector, DEFAULT_DENOM_GUARD};
pub use graph::{generate_graph, NeighborTable};
pub use metrics::{confusion_metrics, evaluate, rank_auc, roc_auc_oracle, ConfusionCounts, EvalReport};
pub use propagate::propagate;
pub use scalar::Scalar;

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type FeatureMatrix64 = FeatureMatrix<f64>;
pub type FeatureMatrix32 = FeatureMatrix<f32>;
pub type FbodParams64 = FbodParams<f64>;
pub type FbodParams32 = FbodParams<f32>;
pub type ScoreReport64 = ScoreReport<f64>;
pub type ScoreReport32 = ScoreReport<f32>;
pub type FluctuationVector64 = FluctuationVector<f64>;
pub type FluctuationVector32 = FluctuationVector<f32>;
