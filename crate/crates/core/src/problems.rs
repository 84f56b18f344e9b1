//! Benchmark problems with known solutions: a traveling heat wave in 1D, a
//! self-similar heat pulse in 2D, and the numerical Green function test.

use crate::error::{Error, Result};
use crate::grid::{build_grid, Conductivity, Grid, ProblemSpec};
use crate::linsolve::InnerSolver;
use crate::stepper::{run_simulation, Scheme, StepperConfig};
use crate::vecops::{min_entry, norm2};

/// Traveling wave `((sigma c / k0)(c t - x))^(1/sigma)` behind the front
/// `x = c t`, zero ahead of it.
pub fn exact_1d(x: f64, t: f64, c: f64, k0: f64, sigma: f64) -> f64 {
    let s = c * t - x;
    if s <= 0.0 {
        0.0
    } else {
        (sigma * c / k0 * s).powf(1.0 / sigma)
    }
}

/// Self-similar solution `t^(-1/3) sqrt(max(0, 1.3 - (x^2 + y^2) t^(-1/3)) / 6)`
/// of `u_t = div(u^2 grad u)`.
pub fn exact_2d(x: f64, y: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("2D solution is singular for t <= 0 (t = {t})")));
    }
    let s = t.cbrt().recip();
    let arg = (1.3 - (x * x + y * y) * s).max(0.0);
    Ok(s * (arg / 6.0).sqrt())
}

/// Tabulated error, iteration and matvec counts for one sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRow {
    pub nodes: Vec<usize>,
    pub dt: f64,
    pub scheme: Scheme,
    pub error: f64,
    pub iterations: usize,
    pub matvecs: usize,
}

#[derive(Debug, Clone)]
pub struct TestCase {
    pub name: &'static str,
    pub spec: ProblemSpec,
    pub t0: f64,
    pub t_end: f64,
    /// Grids of the table sweep (nodes per axis).
    pub grids: Vec<Vec<usize>>,
    pub dts: Vec<f64>,
    pub expected: Vec<ExpectedRow>,
}

pub const CASE_NAMES: [&str; 3] = ["heat1d", "heat2d", "green1d"];

const HEAT1D_SPEED: f64 = 1.0;
const HEAT1D_K0: f64 = 0.5;
const HEAT1D_SIGMA: f64 = 2.0;

fn rows(nodes: &[usize], data: &[(f64, f64, usize, usize, f64, usize, usize)]) -> Vec<ExpectedRow> {
    data.iter()
        .flat_map(|&(dt, be_err, be_it, be_mv, ee_err, ee_it, ee_mv)| {
            [
                ExpectedRow {
                    nodes: nodes.to_vec(),
                    dt,
                    scheme: Scheme::BackwardEuler,
                    error: be_err,
                    iterations: be_it,
                    matvecs: be_mv,
                },
                ExpectedRow {
                    nodes: nodes.to_vec(),
                    dt,
                    scheme: Scheme::ExpEuler,
                    error: ee_err,
                    iterations: ee_it,
                    matvecs: ee_mv,
                },
            ]
        })
        .collect()
}

impl TestCase {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "heat1d" => Ok(Self::heat1d()),
            "heat2d" => Ok(Self::heat2d()),
            "green1d" => Ok(Self::green1d(128)),
            other => Err(Error::Config(format!("unknown test case '{other}' (known: {})", CASE_NAMES.join(", ")))),
        }
    }

    /// Heat wave entering `[0, 1]` from the left, `k0 = 0.5`, `sigma = 2`, `c = 1`.
    pub fn heat1d() -> Self {
        let exact = |x: &[f64], t: f64| exact_1d(x[0], t, HEAT1D_SPEED, HEAT1D_K0, HEAT1D_SIGMA);
        let spec = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: HEAT1D_K0, sigma: HEAT1D_SIGMA })
            .with_boundary(exact)
            .with_initial(move |x| exact(x, 0.0))
            .with_exact(exact);
        let mut expected = rows(
            &[128],
            &[
                (5e-5, 4.07e-3, 10000, 35646, 5.26e-3, 10039, 10926),
                (1e-4, 4.49e-3, 5000, 20206, 5.63e-3, 5072, 8053),
                (5e-4, 7.95e-3, 1008, 7098, 9.08e-3, 1118, 4247),
                (1e-3, 1.18e-2, 587, 5102, 1.11e-2, 642, 3473),
            ],
        );
        expected.extend(rows(
            &[256],
            &[
                (5e-5, 2.33e-3, 10000, 50130, 3.61e-3, 10073, 20584),
                (1e-4, 2.84e-3, 5000, 32482, 4.66e-3, 5102, 15241),
                (5e-4, 6.65e-3, 1086, 13276, 7.57e-3, 1142, 9318),
                (1e-3, 1.12e-2, 668, 9980, 1.08e-2, 768, 7526),
            ],
        ));
        Self {
            name: "heat1d",
            spec,
            t0: 0.0,
            t_end: 0.5,
            grids: vec![vec![128], vec![256]],
            dts: vec![5e-5, 1e-4, 5e-4, 1e-3],
            expected,
        }
    }

    /// Self-similar pulse centred at the origin corner of `[0, 1]^2`, `k0 = 1`, `sigma = 2`.
    pub fn heat2d() -> Self {
        // t >= t0 > 0 on every call, so the domain error cannot occur.
        let exact = |x: &[f64], t: f64| exact_2d(x[0], x[1], t).unwrap_or(0.0);
        let t0 = 1e-4;
        let spec = ProblemSpec::unit(2, Conductivity::PowerLaw { k0: 1.0, sigma: 2.0 })
            .with_boundary(exact)
            .with_initial(move |x| exact(x, t0))
            .with_exact(exact);
        let mut expected = rows(
            &[64, 64],
            &[
                (1e-6, 1.24e-2, 5000, 12306, 1.20e-2, 5000, 5079),
                (5e-6, 1.18e-2, 1011, 4266, 1.16e-2, 1038, 1601),
                (1e-5, 1.17e-2, 536, 2668, 1.17e-2, 613, 1806),
                (5e-5, 1.84e-2, 238, 2884, 1.75e-2, 479, 4164),
            ],
        );
        expected.extend(rows(
            &[128, 128],
            &[
                (1e-6, 7.44e-3, 5000, 20556, 7.20e-3, 5000, 6135),
                (5e-6, 7.24e-3, 1032, 6654, 7.51e-3, 1103, 4129),
                (1e-5, 7.65e-3, 613, 5814, 8.52e-3, 732, 5210),
                (5e-5, 1.95e-2, 398, 9688, 2.51e-2, 1045, 18403),
            ],
        ));
        expected.extend(rows(
            &[256, 256],
            &[
                (1e-6, 3.13e-3, 5000, 27700, 3.34e-3, 5000, 12746),
                (5e-6, 4.44e-3, 1082, 12860, 5.88e-3, 1202, 10800),
                (1e-5, 6.75e-3, 699, 13728, 9.51e-3, 1067, 17955),
                (5e-5, 2.22e-2, 710, 34812, 3.76e-2, 2759, 106906),
            ],
        ));
        Self {
            name: "heat2d",
            spec,
            t0,
            t_end: 0.0051,
            grids: vec![vec![64, 64], vec![128, 128], vec![256, 256]],
            dts: vec![1e-6, 5e-6, 1e-5, 5e-5],
            expected,
        }
    }

    /// Unit pulse at the centre node `n / 2` with homogeneous Dirichlet data,
    /// same conductivity as the 1D wave, integrated to `t = 0.1`.
    pub fn green1d(n: usize) -> Self {
        let h = 1.0 / (n + 1) as f64;
        let centre = (n / 2 + 1) as f64 * h;
        let spec = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: HEAT1D_K0, sigma: HEAT1D_SIGMA })
            .with_initial(move |x| if (x[0] - centre).abs() < 0.5 * h { 1.0 } else { 0.0 });
        Self {
            name: "green1d",
            spec,
            t0: 0.0,
            t_end: 0.1,
            grids: vec![vec![n]],
            dts: vec![0.1, 1e-4],
            expected: vec![],
        }
    }

    pub fn grid(&self, nodes: &[usize]) -> Result<Grid> {
        build_grid(&self.spec, nodes)
    }

    pub fn expected_row(&self, nodes: &[usize], dt: f64, scheme: Scheme) -> Option<&ExpectedRow> {
        self.expected.iter().find(|r| r.nodes == nodes && r.scheme == scheme && (r.dt - dt).abs() <= 1e-12 * dt)
    }
}

/// Settings for the Green function runs: the default nonlinear tolerance
/// with inner solves tight enough that the one-step solution keeps the
/// mirror symmetry of the pulse to rounding level.
pub fn green_config(scheme: Scheme, dt: f64) -> StepperConfig {
    let mut cfg = StepperConfig::new(scheme, dt, 1e-2);
    cfg.inner = InnerSolver::Cg { rtol: 1e-12, max_iter: 10_000 };
    cfg
}

/// Runs the Green function test on `n` nodes and returns the final state
/// with its smallest entry.
pub fn green_test(n: usize, cfg: &StepperConfig, t_end: f64) -> Result<(Vec<f64>, f64)> {
    let case = TestCase::green1d(n);
    let grid = case.grid(&[n])?;
    let report = run_simulation(&case.spec, &grid, cfg, 0.0, t_end).map_err(|f| f.error)?;
    let min = min_entry(&report.final_state);
    Ok((report.final_state, min))
}

/// `||y - y_exact(t)|| / ||y_exact(t)||` over the interior nodes.
pub fn relative_error(y: &[f64], spec: &ProblemSpec, grid: &Grid, t: f64) -> Result<f64> {
    Error::check_len(grid.len(), y.len())?;
    let exact = spec.exact.as_ref().ok_or_else(|| Error::UndefinedMetric("problem has no exact solution".into()))?;
    let reference = grid.sample(|x| exact(x, t));
    let denom = norm2(&reference);
    if denom == 0.0 {
        return Err(Error::UndefinedMetric(format!("exact solution vanishes on the grid at t = {t}")));
    }
    let diff: Vec<f64> = y.iter().zip(&reference).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_1d_branches() {
        assert_eq!(exact_1d(0.7, 0.5, 1.0, 0.5, 2.0), 0.0);
        assert_relative_eq!(exact_1d(0.25, 0.5, 1.0, 0.5, 2.0), 1.0, epsilon = 1e-15);
        assert_eq!(exact_1d(0.5, 0.5, 1.0, 0.5, 2.0), 0.0);
    }

    #[test]
    fn exact_2d_values() {
        assert_relative_eq!(exact_2d(0.0, 0.0, 0.001).unwrap(), 10.0 * (1.3f64 / 6.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(exact_2d(0.0, 0.0, 0.001).unwrap(), 4.654_746_681_256_314, max_relative = 1e-12);
        assert_eq!(exact_2d(1.0, 1.0, 0.0051).unwrap(), 0.0);
        let t: f64 = 0.002;
        let r = (1.3 * t.cbrt()).sqrt();
        assert!(exact_2d(r, 0.0, t).unwrap().abs() < 1e-6);
        assert!(matches!(exact_2d(0.0, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn registry() {
        for name in CASE_NAMES {
            assert_eq!(TestCase::by_name(name).unwrap().name, name);
        }
        assert!(matches!(TestCase::by_name("heat3d"), Err(Error::Config(_))));
    }

    #[test]
    fn table_sweeps() {
        let c = TestCase::heat1d();
        assert_eq!(c.dts, vec![5e-5, 1e-4, 5e-4, 1e-3]);
        assert_eq!(c.grids, vec![vec![128], vec![256]]);
        assert_eq!(c.expected.len(), 16);
        let row = c.expected_row(&[128], 1e-3, Scheme::ExpEuler).unwrap();
        assert_eq!((row.error, row.iterations, row.matvecs), (1.11e-2, 642, 3473));
        let c = TestCase::heat2d();
        assert_eq!(c.grids.len(), 3);
        assert_eq!(c.dts, vec![1e-6, 5e-6, 1e-5, 5e-5]);
        assert_eq!(c.expected.len(), 24);
    }

    #[test]
    fn relative_error_scaling() {
        let c = TestCase::heat1d();
        let g = c.grid(&[32]).unwrap();
        let exact = g.sample(|x| exact_1d(x[0], 0.5, 1.0, 0.5, 2.0));
        assert_eq!(relative_error(&exact, &c.spec, &g, 0.5).unwrap(), 0.0);
        let twice: Vec<f64> = exact.iter().map(|v| 2.0 * v).collect();
        assert_relative_eq!(relative_error(&twice, &c.spec, &g, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(relative_error(&exact, &c.spec, &g, 0.0), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn initial_and_boundary_consistent_with_exact() {
        for case in [TestCase::heat1d(), TestCase::heat2d()] {
            let nodes = vec![16; case.spec.dim];
            let g = case.grid(&nodes).unwrap();
            let exact = case.spec.exact.clone().unwrap();
            for i in 0..g.len() {
                let x = g.point(i);
                assert_eq!((case.spec.initial)(x), exact(x, case.t0));
            }
            for t in [case.t0, 0.5 * (case.t0 + case.t_end), case.t_end] {
                g.for_each_boundary_point(|p| assert_eq!((case.spec.boundary)(p, t), exact(p, t)));
            }
        }
    }

    #[test]
    fn green_initial_pulse_at_centre() {
        let c = TestCase::green1d(128);
        let g = c.grid(&[128]).unwrap();
        let y0 = g.sample(|x| (c.spec.initial)(x));
        assert_eq!(y0.iter().sum::<f64>(), 1.0);
        assert_eq!(y0[64], 1.0);
    }
}
