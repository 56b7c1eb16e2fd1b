//! Universal accelerated framework for composite convex minimization.
//!
//! The crate provides derivative oracles, Taylor models, regularized
//! subproblem solvers, the accelerated outer loop with its schedules, the
//! restart wrapper, a continuous-time ODE integrator, benchmark problems,
//! baselines, and numeric checkers for the auxiliary inequalities the
//! analysis relies on.

// negated comparisons are used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod continuum;
pub mod error;
pub mod lemmas;
pub mod oracle;
pub mod problems;
pub mod restart;
pub mod subsolver;
pub mod taylor;
pub mod trace;
pub mod uaf;

pub type Vector = nalgebra::DVector<f64>;

pub use error::{Error, Result};
pub use oracle::{Objective, SimpleConvexTerm};
