//! Time integration of nonlinear heat conduction problems
//! `u_t = div(k(u) grad u) + g` with `k(u) = k0 u^sigma`.
//!
//! Two monotone integrators are provided for the semidiscrete system
//! `y' = -A(y) y + g(t)`:
//!
//! - backward Euler, with the nonlinear system solved by fixed-point
//!   iterations `(I + dt A(y_m)) y_{m+1} = y_n + dt g`;
//! - nonlinear exponential Euler, which freezes the matrix at the latest
//!   end-of-step iterate and advances with `y_n + dt phi(-dt A_m)(g - A_m y_n)`,
//!   the `phi` action evaluated by a restarted Lanczos process.
//!
//! Module map: [`grid`] assembles the operator, [`matfun`] evaluates `phi`,
//! [`linsolve`] holds the inner solvers, [`stepper`] the integrators,
//! [`problems`] the benchmark cases, and [`oracle`] the brute-force references.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod linsolve;
pub mod matfun;
pub mod oracle;
pub mod problems;
pub mod stepper;
pub mod vecops;

pub use error::{Error, Result};
pub use grid::{assemble, build_grid, Conductivity, CsrMatrix, DiscreteOperator, Grid, ProblemSpec};
pub use linsolve::{cg_solve, chebyshev_solve, InnerSolver, LinSolveReport};
pub use matfun::{phi_action, phi_dense, phi_scalar, KrylovConfig, PhiActionResult};
pub use problems::{exact_1d, exact_2d, green_config, green_test, relative_error, TestCase};
pub use stepper::{
    backward_euler_step, exp_euler_step, run_simulation, RunFailure, RunReport, Scheme, StepResult, StepperConfig,
};
