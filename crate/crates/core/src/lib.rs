//! Hopcounts in configuration-model random graphs whose degrees follow a
//! power law with exponent `tau` in (2, 3).
//!
//! The crate is organised bottom-up:
//!
//! * [`degree`]: the degree law `F`, its size-biased offspring law `G`,
//!   exact heavy-tail samplers and tail diagnostics.
//! * [`graph`]: degree sequences, the half-edge (stub) pool with eager and
//!   lazy uniform pairing, multigraph export and components.
//! * [`spg`]: shortest-path-graph exploration from one or two roots,
//!   hopcounts, a BFS oracle and coupling diagnostics.
//! * [`branching`]: the delayed branching process and samples of its
//!   doubly-exponential growth limit `Y`.
//! * [`limit_law`]: the integer minimiser, the centering constants and the
//!   Monte Carlo fluctuation law of the recentred hopcount.
//! * [`experiments`]: reproducible end-to-end experiments with CSV output.

pub mod branching;
pub mod degree;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod limit_law;
pub mod rng;
pub mod spg;
pub mod stats;

pub use branching::{BpRun, StopReason, YSampleSet};
pub use degree::{DegreeDistribution, DistributionSpec, OffspringDistribution, OffspringSource};
pub use error::{Error, Result};
pub use graph::{DegreeSequence, GroupedDegrees, MultiGraph, StubLayout, StubPool};
pub use limit_law::{LawConstants, LimitLawTable};
pub use spg::{HopcountResult, HopcountStatus, SpgTrace};
