//! Solvers for the shifted systems `(I + dt A) x = rhs` of backward Euler.
//!
//! `A` is symmetric positive semidefinite, so the shifted matrix is SPD with
//! spectrum in `[1, 1 + dt ||A||_1]`. No preconditioning is applied; every
//! product with the shifted matrix costs exactly one operator matvec.

use crate::error::{Error, Result};
use crate::grid::DiscreteOperator;
use crate::vecops::{axpy, dot, norm2};

/// Inner solver selection for backward Euler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerSolver {
    Cg {
        rtol: f64,
        max_iter: usize,
    },
    /// Fixed number of Chebyshev iterations per system.
    Chebyshev {
        n_iter: usize,
    },
}

#[derive(Debug, Clone)]
pub struct LinSolveReport {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub matvecs: usize,
    pub final_residual_norm: f64,
}

fn shifted_apply(op: &DiscreteOperator, dt: f64, v: &[f64], out: &mut [f64]) -> Result<()> {
    op.apply_into(v, out)?;
    for (o, vi) in out.iter_mut().zip(v) {
        *o = vi + dt * *o;
    }
    Ok(())
}

fn check_dt(dt: f64) -> Result<()> {
    if dt >= 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("time step must be nonnegative, got {dt}")))
    }
}

pub fn cg_solve(op: &DiscreteOperator, dt: f64, rhs: &[f64], rtol: f64, max_iter: usize) -> Result<LinSolveReport> {
    cg_solve_with_guess(op, dt, rhs, None, rtol, max_iter)
}

/// Conjugate gradients started from `guess` (zero when `None`). Stops when
/// the recursively updated residual satisfies `||r|| <= rtol ||rhs||`.
pub fn cg_solve_with_guess(
    op: &DiscreteOperator,
    dt: f64,
    rhs: &[f64],
    guess: Option<&[f64]>,
    rtol: f64,
    max_iter: usize,
) -> Result<LinSolveReport> {
    check_dt(dt)?;
    let n = op.dim();
    Error::check_len(n, rhs.len())?;
    if dt == 0.0 {
        return Ok(LinSolveReport { x: rhs.to_vec(), iterations: 0, matvecs: 0, final_residual_norm: 0.0 });
    }
    let b_norm = norm2(rhs);
    if b_norm == 0.0 {
        return Ok(LinSolveReport { x: vec![0.0; n], iterations: 0, matvecs: 0, final_residual_norm: 0.0 });
    }
    let start = op.matvecs();
    let mut ap = vec![0.0; n];
    let (mut x, mut r) = match guess {
        Some(g) => {
            Error::check_len(n, g.len())?;
            shifted_apply(op, dt, g, &mut ap)?;
            (g.to_vec(), rhs.iter().zip(&ap).map(|(b, a)| b - a).collect::<Vec<_>>())
        }
        None => (vec![0.0; n], rhs.to_vec()),
    };
    let threshold = rtol * b_norm;
    let mut rs = dot(&r, &r);
    if rs.sqrt() <= threshold {
        return Ok(LinSolveReport { x, iterations: 0, matvecs: op.matvecs() - start, final_residual_norm: rs.sqrt() });
    }
    let mut p = r.clone();
    for it in 1..=max_iter {
        shifted_apply(op, dt, &p, &mut ap)?;
        let alpha = rs / dot(&p, &ap);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rs_new = dot(&r, &r);
        if rs_new.sqrt() <= threshold {
            return Ok(LinSolveReport {
                x,
                iterations: it,
                matvecs: op.matvecs() - start,
                final_residual_norm: rs_new.sqrt(),
            });
        }
        let beta = rs_new / rs;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rs = rs_new;
    }
    Err(Error::Convergence {
        method: "conjugate gradients",
        iterations: max_iter,
        residual: rs.sqrt() / b_norm,
        best: x,
        hint: String::new(),
    })
}

/// Exactly `n_iter` Chebyshev iterations for the interval `[1, 1 + dt ||A||_1]`,
/// starting from zero.
pub fn chebyshev_solve(op: &DiscreteOperator, dt: f64, rhs: &[f64], n_iter: usize) -> Result<LinSolveReport> {
    check_dt(dt)?;
    if n_iter < 1 {
        return Err(Error::Config("Chebyshev iteration count must be at least 1".into()));
    }
    let n = op.dim();
    Error::check_len(n, rhs.len())?;
    let lmin = 1.0;
    let lmax = 1.0 + dt * op.norm1();
    let theta = 0.5 * (lmax + lmin);
    let delta = 0.5 * (lmax - lmin);
    if delta == 0.0 {
        // Spectrum is {1}: one step is exact.
        let x = rhs.iter().map(|b| b / theta).collect();
        return Ok(LinSolveReport { x, iterations: 1, matvecs: 0, final_residual_norm: 0.0 });
    }

    let start = op.matvecs();
    let sigma = theta / delta;
    let mut rho = 1.0 / sigma;
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut d: Vec<f64> = r.iter().map(|ri| ri / theta).collect();
    let mut ad = vec![0.0; n];
    for _ in 0..n_iter {
        axpy(1.0, &d, &mut x);
        shifted_apply(op, dt, &d, &mut ad)?;
        axpy(-1.0, &ad, &mut r);
        let rho_next = 1.0 / (2.0 * sigma - rho);
        let c = 2.0 * rho_next / delta;
        for (di, ri) in d.iter_mut().zip(&r) {
            *di = rho_next * rho * *di + c * ri;
        }
        rho = rho_next;
    }
    Ok(LinSolveReport { x, iterations: n_iter, matvecs: op.matvecs() - start, final_residual_norm: norm2(&r) })
}

/// Chebyshev iterations needed to reduce the residual by `reduction` on the
/// interval `[1, kappa]`, from the classical bound `2 rho^n`.
pub fn chebyshev_iterations_for(kappa: f64, reduction: f64) -> usize {
    if kappa <= 1.0 {
        return 1;
    }
    let s = kappa.sqrt();
    let rho = (s - 1.0) / (s + 1.0);
    ((reduction / 2.0).ln() / rho.ln()).ceil().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{assemble, build_grid, Conductivity, ProblemSpec};
    use nalgebra::{DMatrix, DVector};

    fn three_node() -> DiscreteOperator {
        let spec = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 0.5, sigma: 2.0 }).with_boundary(|_, _| 1.0);
        let grid = build_grid(&spec, &[3]).unwrap();
        assemble(&spec, &grid, &[1.0; 3], 0.0).unwrap()
    }

    fn dense_reference(op: &DiscreteOperator, dt: f64, rhs: &[f64]) -> Vec<f64> {
        let m = DMatrix::identity(op.dim(), op.dim()) + op.matrix.to_dense() * dt;
        m.lu().solve(&DVector::from_column_slice(rhs)).unwrap().iter().copied().collect()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn cg_identity_short_circuit() {
        let op = three_node();
        let rep = cg_solve(&op, 0.0, &[1.0, 2.0, 3.0], 1e-12, 10).unwrap();
        assert_eq!(rep.x, vec![1.0, 2.0, 3.0]);
        assert_eq!(rep.iterations, 0);
        assert_eq!(op.matvecs(), 0);
    }

    #[test]
    fn cg_zero_rhs() {
        let rep = cg_solve(&three_node(), 0.1, &[0.0; 3], 1e-12, 10).unwrap();
        assert_eq!(rep.x, vec![0.0; 3]);
    }

    #[test]
    fn cg_matches_dense() {
        let op = three_node();
        let rhs = [1.0; 3];
        let rep = cg_solve(&op, 1e-2, &rhs, 1e-12, 50).unwrap();
        assert!(max_diff(&rep.x, &dense_reference(&op, 1e-2, &rhs)) < 1e-10);
        assert_eq!(rep.matvecs, rep.iterations);
        assert_eq!(rep.matvecs, op.matvecs());
        assert!(rep.final_residual_norm <= 1e-12 * 3f64.sqrt());
    }

    #[test]
    fn cg_warm_start_counts_initial_residual() {
        let op = three_node();
        let rhs = [1.0, 0.5, 2.0];
        let exact = dense_reference(&op, 1e-2, &rhs);
        let rep = cg_solve_with_guess(&op, 1e-2, &rhs, Some(&exact), 1e-10, 50).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.matvecs, 1);
    }

    #[test]
    fn cg_reports_nonconvergence() {
        let op = three_node();
        match cg_solve(&op, 10.0, &[1.0, 0.0, -1.0], 1e-30, 1) {
            Err(Error::Convergence { best, iterations: 1, .. }) => assert_eq!(best.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chebyshev_identity() {
        let op = three_node();
        let rep = chebyshev_solve(&op, 0.0, &[1.0, 2.0, 3.0], 5).unwrap();
        assert_eq!(rep.x, vec![1.0, 2.0, 3.0]);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn chebyshev_rejects_zero_iterations() {
        assert!(matches!(chebyshev_solve(&three_node(), 0.1, &[1.0; 3], 0), Err(Error::Config(_))));
    }

    #[test]
    fn chebyshev_classical_bound() {
        let op = three_node();
        let dt = 1e-2;
        let kappa = 1.0 + dt * op.norm1();
        let rho = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
        let rhs = [1.0; 3];
        for n in 1..8 {
            let rep = chebyshev_solve(&op, dt, &rhs, n).unwrap();
            assert!(rep.final_residual_norm <= 2.0 * rho.powi(n as i32) * norm2(&rhs) * (1.0 + 1e-12));
            assert_eq!(rep.matvecs, n);
        }
    }

    #[test]
    fn chebyshev_matches_dense() {
        let op = three_node();
        let rhs = [1.0; 3];
        let rep = chebyshev_solve(&op, 1e-2, &rhs, 50).unwrap();
        assert!(max_diff(&rep.x, &dense_reference(&op, 1e-2, &rhs)) < 1e-8);
    }

    #[test]
    fn iteration_count_from_bound() {
        assert_eq!(chebyshev_iterations_for(1.0, 1e-3), 1);
        let n = chebyshev_iterations_for(66.0, 1e-3);
        let s = 66f64.sqrt();
        let rho: f64 = (s - 1.0) / (s + 1.0);
        assert!(2.0 * rho.powi(n as i32) <= 1e-3);
        assert!(2.0 * rho.powi(n as i32 - 1) > 1e-3);
    }
}
