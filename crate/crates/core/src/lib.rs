//! Field-of-view and bandwidth bounds for lensless in-line holography.
//!
//! [`gauge`] evaluates the closed-form bounds for a [`Setup`]; the remaining
//! modules form an angular-spectrum simulation harness used to check them:
//! [`propagate`] runs the forward model, [`edge`] supplies the analytic
//! knife-edge oracle, [`coherence`] models partial coherence and
//! [`experiment`] sweeps an opaque screen to measure modelling error.

pub mod coherence;
pub mod edge;
pub mod error;
pub mod experiment;
pub mod fft;
pub mod field;
pub mod gauge;
pub mod io;
pub mod model;
pub mod propagate;
pub mod rng;
pub mod scene;

pub use error::{Error, Result, Violation, Violations};
pub use field::{ComplexField, Grid};
pub use gauge::{Cause, GaugeOptions, GaugeReport, HalfWidthPair, SpatialCriterion};
pub use model::{Setup, SetupConfig};
pub use propagate::{TransferFunction, TransferKind, TransferOptions};

pub use num_complex::Complex64;

/// Version string embedded in every output artefact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
