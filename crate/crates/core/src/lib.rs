//! Prediction of higher-order simplex arrivals in temporal simplicial complexes.
//!
//! A dataset of timestamped simplices is sliced into a filtration. Every
//! candidate `(d+1)`-simplex `σ ∪ {ṽ}` near an existing d-simplex `σ` is
//! described by the face vector of the k-ball around `σ` plus a co-occurrence
//! score, and a discrete kernel estimator turns historical counts of possible
//! and realized candidates into an arrival probability.

pub mod baselines;
pub mod complex;
pub mod cooccurrence;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod feature;
pub mod fixtures;
pub mod ingestion;
pub mod neighborhood;
pub mod simplex;
pub mod stats;
pub mod synthetic;
pub mod tracker;

pub use complex::{ComplexSnapshot, FaceVector};
pub use cooccurrence::CoOccurrenceStore;
pub use error::{Error, Result};
pub use estimator::{
    build_index, build_slice_tables, confidence_interval, estimate, estimate_or_fallback, kernel, lattice_ball_size,
    BootstrapOptions, Counts, FallbackPolicy, FeatureIndex, KernelParams, SliceTable,
};
pub use feature::{extract, l1_distance, FeatureVector, SimplexContext};
pub use ingestion::{load_dataset, load_prefix, parse_dataset, slice, ArrivalLog, Filtration};
pub use neighborhood::{k_ball_simplex, k_ball_vertex, neighborhood_feature, sub_complex, KBall};
pub use simplex::{Simplex, VertexId};
pub use tracker::{FeatureConfig, FeatureTracker};
