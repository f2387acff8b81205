//! Orientations of graphs that avoid forbidden oriented patterns: exact
//! counts, ordered-witness lower bounds, forcing-set upper bounds, and the
//! closed-form quantities that predict their growth on `G(n, p)`.
//!
//! Layers, bottom up:
//! - [`graph`]: undirected graphs, oriented graphs, vertex orders,
//!   independence numbers and path partitions.
//! - [`pattern`]: forbidden families compiled into constraint copies on a
//!   host graph.
//! - [`count`]: propagation and exact counting.
//! - [`witness`] and [`certify`]: lower and upper bound certificates.
//! - [`bounds`]: thresholds, Janson parameters and regime exponents.
//! - [`experiment`] and [`validation`]: grids over random graphs and the
//!   acceptance suite.

pub mod bounds;
pub mod certify;
pub mod count;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod orientation;
pub mod pattern;
pub mod rng;
pub mod validation;
pub mod witness;

pub use certify::{build_forcing_certificate, certificate_count_bound, verify_certificate, ForcingCertificate};
pub use count::{count_acyclic, count_extensions, count_oracle, count_restricted, BigCount};
pub use error::{Error, Result};
pub use graph::{Digraph, Graph, VertexOrder};
pub use orientation::{EdgeState, PartialOrientation};
pub use pattern::{compile_constraints, ConstraintSet, ForbiddenFamily};
pub use witness::{build_witness, recommended_cutoff, verify_witness, OrderedWitness};
