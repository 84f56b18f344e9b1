//! Backward Euler and nonlinear exponential Euler steps with fixed-point
//! iterations on the matrix `A(y)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{assemble, DiscreteOperator, Grid, ProblemSpec};
use crate::linsolve::{cg_solve, chebyshev_solve, InnerSolver};
use crate::matfun::{phi_action, phi_scalar, KrylovConfig};
use crate::problems::relative_error;
use crate::vecops::{max_entry, min_entry, norm2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    BackwardEuler,
    ExpEuler,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::BackwardEuler => "backward_euler",
            Scheme::ExpEuler => "exp_euler",
        }
    }

    pub fn short(&self) -> &'static str {
        match self {
            Scheme::BackwardEuler => "BE",
            Scheme::ExpEuler => "EE",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "backward_euler" | "be" => Ok(Scheme::BackwardEuler),
            "exp_euler" | "exponential_euler" | "ee" => Ok(Scheme::ExpEuler),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    /// Relative tolerance of the nonlinear stopping test.
    pub tol: f64,
    pub max_nonlin_iters: usize,
    /// Linear solver for backward Euler.
    pub inner: InnerSolver,
    /// Settings for the phi actions of exponential Euler.
    pub krylov: KrylovConfig,
    /// Evaluate the frozen-matrix deviation estimate on every iteration.
    pub deviation_check: bool,
    /// Lower bound on the numerical range of `A(y)`; zero is always valid.
    pub omega: f64,
}

impl StepperConfig {
    /// Defaults: CG to `0.1 tol`, phi actions to `10 tol` with 30-dimensional
    /// Krylov subspaces, at most 100 nonlinear iterations per step.
    pub fn new(scheme: Scheme, dt: f64, tol: f64) -> Self {
        Self {
            scheme,
            dt,
            tol,
            max_nonlin_iters: 100,
            inner: InnerSolver::Cg { rtol: 0.1 * tol, max_iter: 10_000 },
            krylov: KrylovConfig::with_tol(10.0 * tol),
            deviation_check: false,
            omega: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.omega >= 0.0) {
            return Err(Error::Config(format!("omega must be nonnegative, got {}", self.omega)));
        }
        if self.max_nonlin_iters == 0 {
            return Err(Error::Config("max_nonlin_iters must be at least 1".into()));
        }
        match self.inner {
            InnerSolver::Cg { rtol, .. } if !(rtol > 0.0) => {
                return Err(Error::Config(format!("inner rtol must be positive, got {rtol}")))
            }
            InnerSolver::Chebyshev { n_iter: 0 } => {
                return Err(Error::Config("Chebyshev iteration count must be at least 1".into()))
            }
            _ => {}
        }
        self.krylov.validate()
    }
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub y_next: Vec<f64>,
    pub nonlin_iters: usize,
    pub matvecs_used: usize,
    /// Norm of the nonlinear residual of the accepted iterate.
    pub final_residual: f64,
    /// Residual norms of successive iterates.
    pub residual_history: Vec<f64>,
    /// Largest frozen-matrix deviation estimate of the step (exp Euler with
    /// `deviation_check`, zero otherwise).
    pub deviation_estimate: f64,
    /// Smallest relative slack `(bound - ||y^(m+1)||) / bound` of the
    /// boundedness inequality over the iterates; negative means violated.
    pub bound_slack: f64,
    /// Smallest entry over all iterates of the step.
    pub min_iterate_entry: f64,
    /// `||A(y_next)||_1`
    pub opnorm1: f64,
    pub krylov_restarts: usize,
}

/// Per-step record kept in a [`RunReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub t: f64,
    pub nonlin_iters: usize,
    pub matvecs: usize,
    pub final_residual: f64,
    pub min_entry: f64,
    pub bound_slack: f64,
    pub deviation_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scheme: Scheme,
    pub t0: f64,
    pub t_final: f64,
    pub steps: usize,
    pub final_state: Vec<f64>,
    /// Relative Euclidean error against the exact solution, when known.
    pub final_error: Option<f64>,
    pub total_nonlin_iters: usize,
    pub total_matvecs: usize,
    pub total_krylov_restarts: usize,
    pub min_entry_over_run: f64,
    pub max_opnorm1: f64,
    pub min_bound_slack: f64,
    pub max_deviation: f64,
    /// Steps whose deviation estimate exceeded `0.1 tol ||y_next||`.
    pub deviation_warnings: usize,
    pub per_step: Vec<StepSummary>,
    pub wall_time: f64,
}

impl RunReport {
    fn start(scheme: Scheme, t0: f64, y0: Vec<f64>) -> Self {
        Self {
            scheme,
            t0,
            t_final: t0,
            steps: 0,
            min_entry_over_run: min_entry(&y0),
            final_state: y0,
            final_error: None,
            total_nonlin_iters: 0,
            total_matvecs: 0,
            total_krylov_restarts: 0,
            max_opnorm1: 0.0,
            min_bound_slack: f64::INFINITY,
            max_deviation: 0.0,
            deviation_warnings: 0,
            per_step: Vec::new(),
            wall_time: 0.0,
        }
    }
}

/// A run aborted by a failing step, with everything computed before it.
#[derive(Debug, Clone, thiserror::Error)]
#[error("step {} at t = {:.6e} failed: {error}", partial.steps + 1, partial.t_final)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<RunReport>,
}

fn relative_slack(bound: f64, norm: f64) -> f64 {
    if bound > 0.0 {
        (bound - norm) / bound
    } else {
        -norm
    }
}

fn rhs_vector(y_n: &[f64], dt: f64, g: &[f64]) -> Vec<f64> {
    y_n.iter().zip(g).map(|(y, g)| y + dt * g).collect()
}

/// One backward Euler step solved by fixed-point iterations
/// `(I + dt A(y_m)) y_{m+1} = y_n + dt g`, starting at `y_0 = y_n`.
///
/// The stopping test uses the nonlinear residual of the newest iterate with
/// the matrix assembled at that iterate; at least one iteration is done.
pub fn backward_euler_step(
    spec: &ProblemSpec,
    grid: &Grid,
    y_n: &[f64],
    t_n: f64,
    cfg: &StepperConfig,
) -> Result<StepResult> {
    Error::check_len(grid.len(), y_n.len())?;
    let dt = cfg.dt;
    let t1 = t_n + dt;
    let y_n_norm = norm2(y_n);
    let mut op = assemble(spec, grid, y_n, t1)?;
    let mut matvecs = 0;
    let mut guess = y_n.to_vec();
    let mut history = Vec::new();
    let mut bound_slack = f64::INFINITY;
    let mut min_iterate = f64::INFINITY;

    for m in 1..=cfg.max_nonlin_iters {
        let rhs = rhs_vector(y_n, dt, &op.bvec);
        // Inner solves act on the correction from the previous iterate, so the
        // inner tolerance is relative to the current update, not to ||rhs||.
        let mut res = op.apply(&guess)?;
        for ((r, b), g) in res.iter_mut().zip(&rhs).zip(&guess) {
            *r = b - g - dt * *r;
        }
        let corr = match cfg.inner {
            InnerSolver::Cg { rtol, max_iter } => cg_solve(&op, dt, &res, rtol, max_iter)?,
            InnerSolver::Chebyshev { n_iter } => chebyshev_solve(&op, dt, &res, n_iter)?,
        };
        let x: Vec<f64> = guess.iter().zip(&corr.x).map(|(g, c)| g + c).collect();
        let bound = y_n_norm + dt * norm2(&op.bvec);
        bound_slack = bound_slack.min(relative_slack(bound, norm2(&x)));
        min_iterate = min_iterate.min(min_entry(&x));

        let next = assemble(spec, grid, &x, t1)?;
        let ax = next.apply(&x)?;
        let mut r = rhs_vector(y_n, dt, &next.bvec);
        let rhs_norm = norm2(&r);
        for ((ri, xi), axi) in r.iter_mut().zip(&x).zip(&ax) {
            *ri -= xi + dt * axi;
        }
        let r_norm = norm2(&r);
        history.push(r_norm);
        matvecs += op.matvecs();
        op = next;

        if r_norm <= cfg.tol * rhs_norm {
            return Ok(StepResult {
                opnorm1: op.norm1(),
                matvecs_used: matvecs + op.matvecs(),
                y_next: x,
                nonlin_iters: m,
                final_residual: r_norm,
                residual_history: history,
                deviation_estimate: 0.0,
                bound_slack,
                min_iterate_entry: min_iterate,
                krylov_restarts: 0,
            });
        }
        guess = x;
    }
    Err(Error::Convergence {
        method: "backward Euler fixed-point iteration",
        iterations: cfg.max_nonlin_iters,
        residual: history.last().copied().unwrap_or(f64::NAN),
        best: guess,
        hint: format!("; reduce dt (contraction needs dt < 1/(L (||y_n|| + dt ||g||)), here ||y_n|| = {y_n_norm:.3e})"),
    })
}

/// Prefactor `tau phi(-tau omega)` of the deviation bound at `tau = dt / 2`.
pub fn deviation_prefactor(dt: f64, omega: f64) -> f64 {
    let half = 0.5 * dt;
    half * phi_scalar(-half * omega)
}

/// Estimate of the distance between the frozen-matrix iterate and the
/// solution of the time-dependent-matrix problem, evaluated at the step
/// midpoint `s = t_n + dt / 2`:
/// `(dt/2) phi(-(dt/2) omega) ||[A_m - A(prev_mid)] y(s)||`.
///
/// `prev_mid` is the previous iterate's midpoint state (`y_n` on the first
/// iteration, where the estimate vanishes). Returns the estimate and the new
/// midpoint state `y(s)` of the frozen path.
#[allow(clippy::too_many_arguments)]
pub fn deviation_estimate(
    spec: &ProblemSpec,
    grid: &Grid,
    frozen: &DiscreteOperator,
    prev_mid: &[f64],
    y_n: &[f64],
    t_n: f64,
    dt: f64,
    omega: f64,
    krylov: &KrylovConfig,
) -> Result<(f64, Vec<f64>)> {
    let half = 0.5 * dt;
    let ay = frozen.apply(y_n)?;
    let v: Vec<f64> = frozen.bvec.iter().zip(&ay).map(|(g, a)| g - a).collect();
    let pa = phi_action(frozen, &v, half, krylov)?;
    let mid: Vec<f64> = y_n.iter().zip(&pa.w).map(|(y, w)| y + half * w).collect();
    let path = assemble(spec, grid, prev_mid, t_n + dt)?;
    let a_frozen = frozen.apply(&mid)?;
    let a_path = path.apply(&mid)?;
    let bracket: Vec<f64> = a_frozen.iter().zip(&a_path).map(|(a, b)| a - b).collect();
    Ok((deviation_prefactor(dt, omega) * norm2(&bracket), mid))
}

/// One nonlinear exponential Euler step. Iteration `m` freezes
/// `A_m = A(y_end^(m))` and sets `y_end^(m+1) = y_n + dt phi(-dt A_m)(g - A_m y_n)`;
/// it stops when the end-of-step residual `(A_m - A_{m+1}) y` is below
/// `tol ||A_{m+1} y||`.
pub fn exp_euler_step(
    spec: &ProblemSpec,
    grid: &Grid,
    y_n: &[f64],
    t_n: f64,
    cfg: &StepperConfig,
) -> Result<StepResult> {
    Error::check_len(grid.len(), y_n.len())?;
    let dt = cfg.dt;
    let t1 = t_n + dt;
    let y_n_norm = norm2(y_n);
    let decay = (-dt * cfg.omega).exp();
    let growth = dt * phi_scalar(-dt * cfg.omega);
    let mut op = assemble(spec, grid, y_n, t1)?;
    let mut matvecs = 0;
    let mut restarts = 0;
    let mut history = Vec::new();
    let mut bound_slack = f64::INFINITY;
    let mut min_iterate = f64::INFINITY;
    let mut deviation: f64 = 0.0;
    let mut prev_mid = y_n.to_vec();
    let mut last = y_n.to_vec();

    for m in 1..=cfg.max_nonlin_iters {
        let ay = op.apply(y_n)?;
        let v: Vec<f64> = op.bvec.iter().zip(&ay).map(|(g, a)| g - a).collect();
        let pa = phi_action(&op, &v, dt, &cfg.krylov)?;
        restarts += pa.restarts;
        let y_end: Vec<f64> = y_n.iter().zip(&pa.w).map(|(y, w)| y + dt * w).collect();

        let bound = decay * y_n_norm + growth * norm2(&op.bvec);
        bound_slack = bound_slack.min(relative_slack(bound, norm2(&y_end)));
        min_iterate = min_iterate.min(min_entry(&y_end));

        if cfg.deviation_check {
            let (d, mid) = deviation_estimate(spec, grid, &op, &prev_mid, y_n, t_n, dt, cfg.omega, &cfg.krylov)?;
            deviation = deviation.max(d);
            prev_mid = mid;
        }

        let next = assemble(spec, grid, &y_end, t1)?;
        let a_frozen = op.apply(&y_end)?;
        let a_next = next.apply(&y_end)?;
        let residual: Vec<f64> = (0..y_end.len()).map(|i| a_frozen[i] - a_next[i]).collect();
        let r_norm = norm2(&residual);
        history.push(r_norm);
        matvecs += op.matvecs();
        op = next;

        if r_norm <= cfg.tol * norm2(&a_next) {
            return Ok(StepResult {
                opnorm1: op.norm1(),
                matvecs_used: matvecs + op.matvecs(),
                y_next: y_end,
                nonlin_iters: m,
                final_residual: r_norm,
                residual_history: history,
                deviation_estimate: deviation,
                bound_slack,
                min_iterate_entry: min_iterate,
                krylov_restarts: restarts,
            });
        }
        last = y_end;
    }
    Err(Error::Convergence {
        method: "exponential Euler fixed-point iteration",
        iterations: cfg.max_nonlin_iters,
        residual: history.last().copied().unwrap_or(f64::NAN),
        best: last,
        hint: "; reduce dt (contraction needs dt phi(-dt omega) L max||y(s)|| < 1)".into(),
    })
}

pub fn step(spec: &ProblemSpec, grid: &Grid, y_n: &[f64], t_n: f64, cfg: &StepperConfig) -> Result<StepResult> {
    match cfg.scheme {
        Scheme::BackwardEuler => backward_euler_step(spec, grid, y_n, t_n, cfg),
        Scheme::ExpEuler => exp_euler_step(spec, grid, y_n, t_n, cfg),
    }
}

/// Number of whole steps of size `dt` in `[t0, t_end]`.
pub fn step_count(t0: f64, t_end: f64, dt: f64) -> Result<usize> {
    let steps = (t_end - t0) / dt;
    if !(steps >= -1e-8) || (steps - steps.round()).abs() > 1e-8 {
        return Err(Error::Config(format!("interval [{t0}, {t_end}] is not a whole number of steps of size {dt}")));
    }
    Ok(steps.round() as usize)
}

/// Integrates from `t0` to `t_end` starting from the problem's initial data.
pub fn run_simulation(
    spec: &ProblemSpec,
    grid: &Grid,
    cfg: &StepperConfig,
    t0: f64,
    t_end: f64,
) -> std::result::Result<RunReport, RunFailure> {
    let y0 = grid.sample(|x| (spec.initial)(x));
    run_from_state(spec, grid, cfg, t0, t_end, y0)
}

// wasm32-unknown-unknown has no monotonic clock; wall time reads as zero there.
#[cfg(not(target_arch = "wasm32"))]
struct Clock(std::time::Instant);
#[cfg(not(target_arch = "wasm32"))]
impl Clock {
    fn start() -> Self {
        Clock(std::time::Instant::now())
    }
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
#[cfg(target_arch = "wasm32")]
struct Clock;
#[cfg(target_arch = "wasm32")]
impl Clock {
    fn start() -> Self {
        Clock
    }
    fn seconds(&self) -> f64 {
        0.0
    }
}

/// Like [`run_simulation`] with an explicit initial vector.
pub fn run_from_state(
    spec: &ProblemSpec,
    grid: &Grid,
    cfg: &StepperConfig,
    t0: f64,
    t_end: f64,
    y0: Vec<f64>,
) -> std::result::Result<RunReport, RunFailure> {
    let started = Clock::start();
    let mut report = RunReport::start(cfg.scheme, t0, y0);
    let fail = |error: Error, mut partial: RunReport| {
        partial.wall_time = started.seconds();
        RunFailure { error, partial: Box::new(partial) }
    };
    let setup = (|| {
        spec.validate()?;
        cfg.validate()?;
        Error::check_len(grid.len(), report.final_state.len())?;
        spec.check_nonnegative_data(grid, t0)?;
        let low = min_entry(&report.final_state);
        if !(low >= 0.0) {
            return Err(Error::Contract(format!("initial state has a negative entry {low}")));
        }
        step_count(t0, t_end, cfg.dt)
    })();
    let n_steps = match setup {
        Ok(n) => n,
        Err(e) => return Err(fail(e, report)),
    };

    for n in 0..n_steps {
        let t_n = t0 + n as f64 * cfg.dt;
        let res = match step(spec, grid, &report.final_state, t_n, cfg) {
            Ok(r) => r,
            Err(e) => return Err(fail(e, report)),
        };
        let t_next = if n + 1 == n_steps { t_end } else { t0 + (n + 1) as f64 * cfg.dt };
        let min_e = min_entry(&res.y_next);
        report.steps += 1;
        report.t_final = t_next;
        report.total_nonlin_iters += res.nonlin_iters;
        report.total_matvecs += res.matvecs_used;
        report.total_krylov_restarts += res.krylov_restarts;
        report.min_entry_over_run = report.min_entry_over_run.min(min_e);
        report.max_opnorm1 = report.max_opnorm1.max(res.opnorm1);
        report.min_bound_slack = report.min_bound_slack.min(res.bound_slack);
        report.max_deviation = report.max_deviation.max(res.deviation_estimate);
        if res.deviation_estimate > 0.1 * cfg.tol * norm2(&res.y_next) {
            report.deviation_warnings += 1;
        }
        report.per_step.push(StepSummary {
            t: t_next,
            nonlin_iters: res.nonlin_iters,
            matvecs: res.matvecs_used,
            final_residual: res.final_residual,
            min_entry: min_e,
            bound_slack: res.bound_slack,
            deviation_estimate: res.deviation_estimate,
        });
        report.final_state = res.y_next;
    }

    if spec.exact.is_some() {
        report.final_error = relative_error(&report.final_state, spec, grid, t_end).ok();
    }
    report.wall_time = started.seconds();
    Ok(report)
}

/// `min_i y_i >= -rel * max_i y_i`, the monotonicity check used by tests.
pub fn is_nonnegative(y: &[f64], rel: f64) -> bool {
    min_entry(y) >= -rel * max_entry(y).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Conductivity};
    use nalgebra::{DMatrix, DVector};

    fn nonlinear_1d(n: usize) -> (ProblemSpec, Grid) {
        let spec = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 0.5, sigma: 2.0 });
        let grid = build_grid(&spec, &[n]).unwrap();
        (spec, grid)
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("be".parse::<Scheme>().unwrap(), Scheme::BackwardEuler);
        assert_eq!("exp_euler".parse::<Scheme>().unwrap(), Scheme::ExpEuler);
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(StepperConfig::new(Scheme::ExpEuler, 0.0, 1e-2).validate().is_err());
        assert!(StepperConfig::new(Scheme::ExpEuler, 1e-3, 0.0).validate().is_err());
        let mut cfg = StepperConfig::new(Scheme::ExpEuler, 1e-3, 1e-2);
        cfg.omega = -1.0;
        assert!(cfg.validate().is_err());
        cfg.omega = 0.0;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn zero_state_is_fixed_point() {
        let (spec, grid) = nonlinear_1d(6);
        for scheme in [Scheme::BackwardEuler, Scheme::ExpEuler] {
            let cfg = StepperConfig::new(scheme, 1e-2, 1e-2);
            let res = step(&spec, &grid, &[0.0; 6], 0.0, &cfg).unwrap();
            assert_eq!(res.y_next, vec![0.0; 6]);
            assert_eq!(res.nonlin_iters, 1);
        }
    }

    #[test]
    fn backward_euler_first_sweep_matches_dense_solve() {
        let spec = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 0.5, sigma: 2.0 }).with_boundary(|_, _| 1.0);
        let grid = build_grid(&spec, &[3]).unwrap();
        let y_n = [1.0; 3];
        let mut cfg = StepperConfig::new(Scheme::BackwardEuler, 1e-2, 1e-2);
        cfg.inner = InnerSolver::Cg { rtol: 1e-13, max_iter: 100 };
        cfg.max_nonlin_iters = 1;
        let op = assemble(&spec, &grid, &y_n, 1e-2).unwrap();
        let m = DMatrix::identity(3, 3) + op.matrix.to_dense() * 1e-2;
        let rhs = DVector::from_iterator(3, (0..3).map(|i| y_n[i] + 1e-2 * op.bvec[i]));
        let expected = m.lu().solve(&rhs).unwrap();
        // Uniform state with unit boundary is a steady state: one sweep suffices.
        let res = backward_euler_step(&spec, &grid, &y_n, 0.0, &cfg).unwrap();
        for i in 0..3 {
            assert!((res.y_next[i] - expected[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn backward_euler_reports_nonconvergence() {
        let spec = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 0.5, sigma: 2.0 }).with_boundary(|_, _| 1.0);
        let grid = build_grid(&spec, &[16]).unwrap();
        let mut cfg = StepperConfig::new(Scheme::BackwardEuler, 1.0, 1e-12);
        cfg.max_nonlin_iters = 2;
        let err = backward_euler_step(&spec, &grid, &[0.0; 16], 0.0, &cfg).unwrap_err();
        match err {
            Error::Convergence { iterations: 2, hint, .. } => assert!(hint.contains("reduce dt")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deviation_zero_on_first_iteration_and_linear_problems() {
        let (spec, grid) = nonlinear_1d(8);
        let y_n: Vec<f64> = (0..8).map(|i| 0.5 + 0.1 * i as f64).collect();
        let op = assemble(&spec, &grid, &y_n, 1e-3).unwrap();
        let kc = KrylovConfig::with_tol(1e-10);
        let (d, mid) = deviation_estimate(&spec, &grid, &op, &y_n, &y_n, 0.0, 1e-3, 0.0, &kc).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(mid.len(), 8);

        let lin = ProblemSpec::unit(1, Conductivity::Constant(1.0)).with_boundary(|_, _| 1.0);
        let grid = build_grid(&lin, &[8]).unwrap();
        let op = assemble(&lin, &grid, &y_n, 1e-3).unwrap();
        let other: Vec<f64> = y_n.iter().map(|y| 2.0 * y).collect();
        let (d, _) = deviation_estimate(&lin, &grid, &op, &other, &y_n, 0.0, 1e-3, 0.0, &kc).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn deviation_prefactor_values() {
        assert_eq!(deviation_prefactor(1e-3, 0.0), 5e-4);
        let w = 3.0;
        let expected = -(-5e-4_f64 * w).exp_m1() / w;
        assert!((deviation_prefactor(1e-3, w) - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn step_count_checks_whole_steps() {
        assert_eq!(step_count(0.0, 0.5, 1e-3).unwrap(), 500);
        assert_eq!(step_count(1e-4, 5.1e-3, 5e-6).unwrap(), 1000);
        assert_eq!(step_count(0.3, 0.3, 1e-3).unwrap(), 0);
        assert!(step_count(0.0, 0.5, 3e-3).is_err());
    }

    #[test]
    fn zero_step_run_returns_initial_state() {
        let (spec, grid) = nonlinear_1d(4);
        let spec = spec.with_initial(|x| x[0]).with_exact(|x, _| x[0]);
        let cfg = StepperConfig::new(Scheme::ExpEuler, 1e-3, 1e-2);
        let rep = run_simulation(&spec, &grid, &cfg, 0.2, 0.2).unwrap();
        assert_eq!(rep.steps, 0);
        assert_eq!(rep.final_state, grid.sample(|x| x[0]));
        assert_eq!(rep.final_error, Some(0.0));
    }

    #[test]
    fn failure_carries_partial_report() {
        let spec = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 0.5, sigma: 2.0 }).with_boundary(|_, _| 1.0);
        let grid = build_grid(&spec, &[16]).unwrap();
        let mut cfg = StepperConfig::new(Scheme::BackwardEuler, 0.5, 1e-14);
        cfg.max_nonlin_iters = 2;
        let fail = run_simulation(&spec, &grid, &cfg, 0.0, 1.0).unwrap_err();
        assert_eq!(fail.partial.steps, 0);
        assert!(matches!(fail.error, Error::Convergence { .. }));
    }
}
