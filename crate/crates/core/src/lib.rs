//! Random balanced samples: `n` coordinates, each uniform on `[-1, 1]`, that
//! sum exactly to zero.
//!
//! * [`geometry`]: the polytope `M(n)`, its Euclidean model, the cyclic
//!   difference map and the reachability orderings.
//! * [`samplers`]: degenerate, redistributed, symmetrized and Gerow-Robson
//!   generators together with their inverse maps.
//! * [`gr_analysis`]: exact rational analysis of densities that depend only on
//!   `max |x_k|`, down to a certified real-root count.
//! * [`stats`]: uniformity, covariance, balance and coverage diagnostics.

pub mod density;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod gr_analysis;
pub mod quadrature;
pub mod rng;
pub mod samplers;
pub mod stats;

pub use density::Density;
pub use error::{Error, Result};
pub use geometry::BalancedVector;
pub use rng::{SeededGenerator, Sign};
pub use samplers::{Method, SampleBatch, Sampler, SamplerConfig};
