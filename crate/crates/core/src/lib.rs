//! Geometric separability tests for Werner-type states.
//!
//! The toolkit models density matrices as points of a Euclidean ball under
//! the Hilbert–Schmidt metric and decides separability from where local
//! measurements send the unmeasured party:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products, partial traces
//!   and transposes, Hermitian spectra, the Hilbert–Schmidt distance.
//! - [`states`]: maximally entangled, GHZ, W, Werner and Haar-random states.
//! - [`geometry`]: ball radii, simplex division ratios, product bases and the
//!   absolute-separability radius.
//! - [`measurement`]: rank-1 local projections and seeded sweeps.
//! - [`separability`]: Werner thresholds, the pure-state measure
//!   `e = 1 - p_max`, and PPT / sampling oracles.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod measurement;
pub mod separability;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{hs_distance, ComplexMatrix, SubsystemDims};
pub use measurement::{Bipartition, MeasurementOutcome};
pub use num_complex::Complex64;
pub use separability::{PptScope, SeparabilityReport};
pub use states::{DensityMatrix, PureKet};
