//! Tensor calculus on coordinate charts: metrics, connections with optional
//! torsion, curvature and its covariant derivatives, curvature scalars, the
//! null-congruence criterion for scalar-degenerate geometries, and a
//! catalog of reference metrics.

pub mod catalog;
pub mod chart;
pub mod classify;
pub mod connection;
pub mod criterion;
pub mod curvature;
pub mod error;
pub mod identities;
pub mod invariants;
pub mod kundt;
pub mod probe;
pub mod tensor;

pub use chart::{Chart, Metric, Signature};
pub use connection::{christoffel, connection_with_torsion, covariant_derivative, Connection, Torsion};
pub use curvature::{riemann, CurvatureBundle, TensorKind};
pub use error::{CoreError, Result};
pub use tensor::{levi_civita, Tensor, Variance};

pub use curvscan_symbolic as symbolic;
