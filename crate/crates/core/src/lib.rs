//! Shared-processor scheduling of multiprocessor jobs.
//!
//! Every job runs on its own private processor and may additionally use any
//! number of `m` shared processors at once; the objective is the total
//! weighted overlap `Σ o(j, M_i) (w_j − c_i)`. The crate provides
//!
//! - the schedule model with feasibility checks ([`model`]),
//! - an exact solver that optimizes one LP per job permutation ([`lp`]),
//! - an exact enumeration of synchronized schedules ([`oracle`]),
//! - the α-private approximation via LP or min-cost flow ([`alpha`]),
//! - the schedule transformations used to reason about optimal schedules
//!   ([`structure`]).
//!
//! All algorithms are generic over [`num::Scalar`]: exact rationals or `f64`.

pub mod alpha;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod fuzz;
pub mod io;
pub mod lp;
pub mod model;
pub mod num;
pub mod oracle;
pub mod simplex;
pub mod structure;

pub use error::{Error, Result};
pub use model::{
    expand, synchronized_objective, total_weighted_overlap, validate, Instance, Job, OverlapReport,
    Piece, Schedule, SyncEntry, SynchronizedSchedule, Violation,
};
pub use num::{Rational, Scalar};
