//! Capacitated facility location (logistic network design) solved by a
//! two-layer annealing scheme.
//!
//! The outer layer anneals over which sites are open. For each proposed
//! configuration, the customer assignment is encoded as a QUBO with
//! one-hot and slack-expanded capacity penalties and handed to a pluggable
//! minimizer (exact enumeration, simulated annealing, tabu search,
//! simulated quantum annealing, or block decomposition).
//!
//! ```
//! use ndp_core::hybrid::{run_classical_baseline, AnnealSchedule};
//! use ndp_core::instance::parse_orlib;
//!
//! let inst = parse_orlib("2 2\n10 5\n10 5\n3 1 4\n3 4 1\n").unwrap();
//! let report = run_classical_baseline(&inst, &AnnealSchedule::standard(2), 7).unwrap();
//! assert_eq!(report.best_cost, 10.0);
//! ```

pub mod harness;
pub mod hybrid;
pub mod instance;
pub mod qubo;
pub mod solvers;
pub mod synthetic;

pub use hybrid::{run_classical_baseline, run_hybrid, AnnealSchedule, HybridConfig, SolveReport};
pub use instance::{parse_orlib, Assignment, Instance, OpenConfig};
pub use qubo::{Qubo, VarRole};
pub use solvers::{Backend, Sample, SampleSet, SolverParams};
