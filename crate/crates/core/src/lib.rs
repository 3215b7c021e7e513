//! Analytical and simulation models for virtualized network functions (VNFs)
//! built as open networks of G/G/m FCFS queues.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! * [`model`]: the network description (queues, routing matrix) and report types,
//! * [`qna`]: the two-moment QNA decomposition solver,
//! * [`jackson`]: the M/M/m product-form baseline,
//! * [`sim`]: a discrete-event simulator for probabilistically routed networks,
//! * [`vmme`]: the three-tier virtualized MME scenario, its procedure-level
//!   simulator and the horizontal autoscaling sweep.
//!
//! ```ignore
//! use vnfperf_core::model::{NetworkSpec, QueueSpec, RoutingMatrix};
//! use vnfperf_core::qna;
//!
//! let net = NetworkSpec {
//!     queues: vec![QueueSpec::new(1, 1, 1, 1.0, 1.0, 0.5, 1.0)],
//!     routing: RoutingMatrix::zeros(1),
//! }
//! .validate()
//! .unwrap();
//! let report = qna::analyze(&net).unwrap();
//! assert!((report.mean_response_time - 2.0).abs() < 1e-12);
//! ```

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod dist;
pub mod error;
pub mod jackson;
mod linalg;
pub mod model;
pub mod qna;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod vmme;

pub use error::{SimError, SolveError};
pub use model::{Method, NetworkSpec, PerfReport, QueueMetrics, QueueSpec, RoutingMatrix, ValidatedNetwork};
