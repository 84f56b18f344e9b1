//! Browser demo: the 1D heat wave, the Green function pulse and the 2D
//! self-similar pulse, each run to a chosen time with either scheme.
//!
//! The plain functions return `Result<_, String>` and are what the native
//! tests call; the `#[wasm_bindgen]` wrappers below convert errors to JS.

use nlheat_core::vecops::min_entry;
use nlheat_core::{green_config, run_simulation, RunReport, Scheme, StepperConfig, TestCase};
use wasm_bindgen::prelude::*;

const MAX_NODES_1D: usize = 1024;
const MAX_NODES_2D: usize = 128;
const MAX_STEPS: f64 = 20_000.0;

/// Result of a 1D run: node coordinates, computed values and, when the
/// case has one, the exact solution at the final time.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Profile {
    x: Vec<f64>,
    u: Vec<f64>,
    exact: Vec<f64>,
    stats: Stats,
}

/// Row-major `ny x nx` field of a 2D run, row 0 at `y = h`.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Field {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    stats: Stats,
}

#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub steps: usize,
    pub nonlin_iters: usize,
    pub matvecs: usize,
    /// Relative 2-norm error, NaN when there is no exact solution.
    pub error: f64,
    pub min_entry: f64,
}

impl Stats {
    fn of(r: &RunReport) -> Self {
        Stats {
            steps: r.steps,
            nonlin_iters: r.total_nonlin_iters,
            matvecs: r.total_matvecs,
            error: r.final_error.unwrap_or(f64::NAN),
            min_entry: min_entry(&r.final_state),
        }
    }
}

#[wasm_bindgen]
impl Profile {
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    pub fn u(&self) -> Vec<f64> {
        self.u.clone()
    }
    /// Empty for the Green function.
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }
    pub fn stats(&self) -> Stats {
        self.stats
    }
}

#[wasm_bindgen]
impl Field {
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
    pub fn stats(&self) -> Stats {
        self.stats
    }
}

fn scheme(name: &str) -> Result<Scheme, String> {
    name.parse::<Scheme>().map_err(|e| e.to_string())
}

fn check(n: usize, max_n: usize, dt: f64, span: f64) -> Result<(), String> {
    if n < 2 || n > max_n {
        return Err(format!("node count must be between 2 and {max_n}, got {n}"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(format!("time step must be positive, got {dt}"));
    }
    if span.is_nan() || span <= 0.0 {
        return Err("end time must be after the start time".into());
    }
    if span / dt > MAX_STEPS {
        return Err(format!("{:.0} steps requested, the demo allows {MAX_STEPS}", (span / dt).ceil()));
    }
    Ok(())
}

fn run(
    case: &TestCase,
    nodes: &[usize],
    cfg: &StepperConfig,
    t_end: f64,
) -> Result<(nlheat_core::Grid, RunReport), String> {
    let grid = case.grid(nodes).map_err(|e| e.to_string())?;
    let report = run_simulation(&case.spec, &grid, cfg, case.t0, t_end).map_err(|f| f.error.to_string())?;
    Ok((grid, report))
}

/// Heat wave on `[0, 1]` with `n` interior nodes, integrated to `t_end <= 0.5`.
pub fn heat_wave(n: usize, dt: f64, scheme_name: &str, tol: f64, t_end: f64) -> Result<Profile, String> {
    let case = TestCase::heat1d();
    if t_end > case.t_end {
        return Err(format!("end time is limited to {}", case.t_end));
    }
    check(n, MAX_NODES_1D, dt, t_end - case.t0)?;
    let cfg = StepperConfig::new(scheme(scheme_name)?, dt, tol);
    cfg.validate().map_err(|e| e.to_string())?;
    let (grid, report) = run(&case, &[n], &cfg, t_end)?;
    let exact = case.spec.exact.as_ref().expect("wave has an exact solution");
    Ok(Profile {
        x: (0..grid.len()).map(|i| grid.point(i)[0]).collect(),
        exact: grid.sample(|x| exact(x, t_end)),
        stats: Stats::of(&report),
        u: report.final_state,
    })
}

/// Unit pulse at the middle node integrated to `t = 0.1` with step `dt`.
pub fn green_function(n: usize, dt: f64, scheme_name: &str) -> Result<Profile, String> {
    let case = TestCase::green1d(n);
    check(n, MAX_NODES_1D, dt, case.t_end)?;
    let cfg = green_config(scheme(scheme_name)?, dt);
    let (grid, report) = run(&case, &[n], &cfg, case.t_end)?;
    Ok(Profile {
        x: (0..grid.len()).map(|i| grid.point(i)[0]).collect(),
        exact: Vec::new(),
        stats: Stats::of(&report),
        u: report.final_state,
    })
}

/// Self-similar 2D pulse on an `n x n` grid from its start time to `t_end`.
pub fn pulse_2d(n: usize, dt: f64, scheme_name: &str, tol: f64, t_end: f64) -> Result<Field, String> {
    let case = TestCase::heat2d();
    if t_end > case.t_end {
        return Err(format!("end time is limited to {}", case.t_end));
    }
    check(n, MAX_NODES_2D, dt, t_end - case.t0)?;
    let cfg = StepperConfig::new(scheme(scheme_name)?, dt, tol);
    cfg.validate().map_err(|e| e.to_string())?;
    let (grid, report) = run(&case, &[n, n], &cfg, t_end)?;
    let h = 1.0 / (n + 1) as f64;
    let mut values = vec![0.0; n * n];
    for (i, &v) in report.final_state.iter().enumerate() {
        let p = grid.point(i);
        let ix = (p[0] / h).round() as usize - 1;
        let iy = (p[1] / h).round() as usize - 1;
        values[iy * n + ix] = v;
    }
    Ok(Field { nx: n, ny: n, values, stats: Stats::of(&report) })
}

/// Start and end time of the 2D pulse.
pub fn pulse_2d_window() -> (f64, f64) {
    let case = TestCase::heat2d();
    (case.t0, case.t_end)
}

#[wasm_bindgen(js_name = heatWave)]
pub fn heat_wave_js(n: usize, dt: f64, scheme: &str, tol: f64, t_end: f64) -> Result<Profile, JsError> {
    heat_wave(n, dt, scheme, tol, t_end).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = greenFunction)]
pub fn green_function_js(n: usize, dt: f64, scheme: &str) -> Result<Profile, JsError> {
    green_function(n, dt, scheme).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pulse2d)]
pub fn pulse_2d_js(n: usize, dt: f64, scheme: &str, tol: f64, t_end: f64) -> Result<Field, JsError> {
    pulse_2d(n, dt, scheme, tol, t_end).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pulse2dStart)]
pub fn pulse_2d_start() -> f64 {
    pulse_2d_window().0
}

#[wasm_bindgen(js_name = pulse2dEnd)]
pub fn pulse_2d_end() -> f64 {
    pulse_2d_window().1
}
