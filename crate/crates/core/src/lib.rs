//! Statistics of the SNR in a RIS-aided THz link when the reflected beam is
//! randomly mispointed.
//!
//! The crate is layered bottom-up:
//!
//! - [`geometry`]: link configuration, angle conventions, frame changes.
//! - [`field`]: exact reflected power density and SNR at any point.
//! - [`analytic`]: closed-form PDF, CDF, moments, skewness and limits of the
//!   small-error approximation `α exp(-slope δθ²)`.
//! - [`montecarlo`]: seeded, parallel sampling oracle over either model.
//! - [`quadrature`]: adaptive Gauss–Kronrod used for moment checks.
//! - [`cli`] and [`validate`]: the command-line front end and its
//!   validation report.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod field;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod units;
pub mod validate;

pub use analytic::{ClosedFormParams, Misalignment, Plane};
pub use error::{Error, Result};
pub use geometry::{BeamDirection, LinkGeometry, ObservationPoint, PhysicalConfig};
pub use montecarlo::{EmpiricalDistribution, Model, SamplerSpec};
