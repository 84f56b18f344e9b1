//! Brute-force references for validation at small sizes: explicit
//! integration of the full nonlinear system and dense linear algebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::{assemble, Grid, ProblemSpec};
use crate::matfun::phi_scalar;
use crate::stepper::step_count;
use crate::vecops::norm2;

const BLOWUP_FACTOR: f64 = 1e6;

/// `-A(y, t) y + g(y, t)` together with `||A||_1`.
fn rhs(spec: &ProblemSpec, grid: &Grid, y: &[f64], t: f64) -> Result<(Vec<f64>, f64)> {
    let op = assemble(spec, grid, y, t)?;
    let mut f = op.apply(y)?;
    for (fi, gi) in f.iter_mut().zip(&op.bvec) {
        *fi = gi - *fi;
    }
    Ok((f, op.norm1()))
}

fn check_step(dt: f64, norm1: f64, t: f64) -> Result<()> {
    if dt * norm1 > 0.5 {
        Err(Error::Stability { t, dt })
    } else {
        Ok(())
    }
}

fn check_growth(y: &[f64], scale: f64, t: f64, dt: f64) -> Result<()> {
    let n = norm2(y);
    if !n.is_finite() || n > BLOWUP_FACTOR * scale {
        Err(Error::Stability { t, dt })
    } else {
        Ok(())
    }
}

/// Classical RK4 on `y' = -A(y) y + g(t)` from the problem's initial data.
/// Requires `dt_fine ||A(y)||_1 <= 0.5` at every step.
pub fn reference_integrate(spec: &ProblemSpec, grid: &Grid, t0: f64, t_end: f64, dt_fine: f64) -> Result<Vec<f64>> {
    let mut y = grid.sample(|x| (spec.initial)(x));
    let steps = step_count(t0, t_end, dt_fine)?;
    let scale = norm2(&y).max(1.0);
    let n = y.len();
    let mut tmp = vec![0.0; n];
    for s in 0..steps {
        let t = t0 + s as f64 * dt_fine;
        let h = dt_fine;
        let (k1, norm1) = rhs(spec, grid, &y, t)?;
        check_step(h, norm1, t)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        let (k2, _) = rhs(spec, grid, &tmp, t + 0.5 * h)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        let (k3, _) = rhs(spec, grid, &tmp, t + 0.5 * h)?;
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        let (k4, _) = rhs(spec, grid, &tmp, t + h)?;
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_growth(&y, scale, t + h, h)?;
    }
    Ok(y)
}

/// Explicit Euler `y += dt (-A(y) y + g)`. For `dt max_i a_ii <= 1` each step
/// maps nonnegative states to nonnegative states.
pub fn explicit_euler_integrate(
    spec: &ProblemSpec,
    grid: &Grid,
    t0: f64,
    t_end: f64,
    dt_fine: f64,
) -> Result<Vec<f64>> {
    let mut y = grid.sample(|x| (spec.initial)(x));
    let steps = step_count(t0, t_end, dt_fine)?;
    let scale = norm2(&y).max(1.0);
    for s in 0..steps {
        let t = t0 + s as f64 * dt_fine;
        let (f, norm1) = rhs(spec, grid, &y, t)?;
        check_step(dt_fine, norm1, t)?;
        for (yi, fi) in y.iter_mut().zip(&f) {
            *yi += dt_fine * fi;
        }
        check_growth(&y, scale, t + dt_fine, dt_fine)?;
    }
    Ok(y)
}

/// LU solve of a small dense system.
pub fn dense_solve(matrix: &DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    if !matrix.is_square() {
        return Err(Error::Contract("dense_solve needs a square matrix".into()));
    }
    Error::check_len(matrix.nrows(), rhs.len())?;
    matrix
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(rhs))
        .map(|x| x.iter().copied().collect())
        .ok_or(Error::Singular)
}

/// Exact solution `e^{-tA} y0 + t phi(-tA) g` of the linear system
/// `y' = -A y + g` with constant symmetric `A` and `g`.
pub fn linear_solution_dense(a: &DMatrix<f64>, y0: &[f64], g: &[f64], t: f64) -> Vec<f64> {
    let eig = SymmetricEigen::new(a.clone());
    let q = &eig.eigenvectors;
    let qt_y = q.transpose() * DVector::from_column_slice(y0);
    let qt_g = q.transpose() * DVector::from_column_slice(g);
    let coeffs = DVector::from_iterator(
        y0.len(),
        eig.eigenvalues.iter().enumerate().map(|(i, &l)| (-t * l).exp() * qt_y[i] + t * phi_scalar(-t * l) * qt_g[i]),
    );
    (q * coeffs).iter().copied().collect()
}
