//! Discrete-kernel estimator of arrival probabilities over a feature index.

mod bootstrap;
mod index;
mod kernel;

pub use bootstrap::{confidence_interval, BootstrapOptions, MIN_SLICES};
pub use index::{build_index, build_slice_tables, Counts, FeatureIndex, SliceTable};
pub use kernel::{estimate, estimate_or_fallback, kernel, lattice_ball_size, FallbackPolicy, KernelParams};
