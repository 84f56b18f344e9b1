//! The function `phi(z) = (e^z - 1) / z` on scalars, small dense symmetric
//! matrices, and sparse operators.
//!
//! `phi_action` approximates `phi(-tau A) v` with a Lanczos process. It relies
//! on `u(t) = t phi(-t A) v` solving `u' = -A u + v, u(0) = 0`: when one Krylov
//! cycle cannot reach the tolerance over the whole interval, the basis is used
//! on the longest halved subinterval it can handle, and a new cycle is started
//! from `v - A u(s)`. This uses the exact identity
//! `u(s + d) = u(s) + d phi(-d A) (v - A u(s))`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::DiscreteOperator;
use crate::vecops::{axpy, dot, norm2};

const SERIES_THRESHOLD: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// `phi(z) = (e^z - 1) / z`, `phi(0) = 1`.
pub fn phi_scalar(z: f64) -> f64 {
    if z.abs() < SERIES_THRESHOLD {
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    } else {
        z.exp_m1() / z
    }
}

/// `phi(M)` for a symmetric matrix through its eigendecomposition.
pub fn phi_dense(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Contract(format!("phi_dense needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.amax();
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Contract(format!("phi_dense needs a symmetric matrix (asymmetry {asym:.3e})")));
    }
    let eig = SymmetricEigen::new(m.clone());
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let f = phi_scalar(lambda);
        scaled.column_mut(j).scale_mut(f);
    }
    Ok(scaled * q.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    /// Largest subspace per cycle.
    pub max_dim: usize,
    /// Cycles allowed after the first one.
    pub max_restarts: usize,
    /// Relative accuracy target, measured against `||v||`.
    pub tol: f64,
    /// Gram-Schmidt against the whole basis at every step.
    pub reorthogonalize: bool,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self { max_dim: 30, max_restarts: 500, tol: 1e-8, reorthogonalize: false }
    }
}

impl KrylovConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_dim < 2 {
            return Err(Error::Config(format!("Krylov dimension must be at least 2, got {}", self.max_dim)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("Krylov tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PhiActionResult {
    /// Approximation of `phi(-tau A) v`.
    pub w: Vec<f64>,
    pub matvecs: usize,
    pub restarts: usize,
    /// Residual-based error estimate, in the same units as `w`.
    pub est_error: f64,
}

/// Eigendecomposition of a Lanczos tridiagonal, reused across step sizes.
struct Projected {
    eigenvalues: Vec<f64>,
    q: DMatrix<f64>,
}

impl Projected {
    fn new(alpha: &[f64], beta: &[f64]) -> Self {
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        Self { eigenvalues: eig.eigenvalues.iter().copied().collect(), q: eig.eigenvectors }
    }

    /// `phi(-tau T) e_1`
    fn phi_e1(&self, tau: f64) -> Vec<f64> {
        let k = self.eigenvalues.len();
        let coef: Vec<f64> = (0..k).map(|j| phi_scalar(-tau * self.eigenvalues[j]) * self.q[(0, j)]).collect();
        (0..k).map(|i| (0..k).map(|j| self.q[(i, j)] * coef[j]).sum()).collect()
    }
}

struct Cycle {
    basis: Vec<Vec<f64>>,
    projected: Projected,
    /// Norm of the next (unused) Lanczos vector, zero on breakdown.
    beta_next: f64,
}

impl Cycle {
    fn estimate(&self, r_norm: f64, tau: f64, f: &[f64]) -> f64 {
        r_norm * tau * self.beta_next * f.last().map_or(0.0, |x| x.abs())
    }

    /// `u += tau * r_norm * V f`
    fn accumulate(&self, tau: f64, r_norm: f64, f: &[f64], u: &mut [f64]) {
        for (vj, fj) in self.basis.iter().zip(f) {
            axpy(tau * r_norm * fj, vj, u);
        }
    }
}

/// Runs Lanczos on `r` until the estimate for `phi(-tau A) r` drops below
/// `target` or the basis is full. Returns the cycle and whether it converged.
fn lanczos_cycle(
    op: &DiscreteOperator,
    r: &[f64],
    r_norm: f64,
    tau: f64,
    target: f64,
    cfg: &KrylovConfig,
) -> Result<(Cycle, bool)> {
    let n = r.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cfg.max_dim);
    let mut alpha = Vec::with_capacity(cfg.max_dim);
    let mut beta: Vec<f64> = Vec::with_capacity(cfg.max_dim);
    basis.push(r.iter().map(|x| x / r_norm).collect());
    let mut w = vec![0.0; n];
    let mut scale: f64 = 0.0;

    loop {
        let j = basis.len() - 1;
        op.apply_into(&basis[j], &mut w)?;
        let a = dot(&w, &basis[j]);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        if cfg.reorthogonalize {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = norm2(&w);
        alpha.push(a);
        scale = scale.max(a.abs()).max(b);
        let breakdown = b <= 1e-13 * scale;

        let projected = Projected::new(&alpha, &beta);
        let f = projected.phi_e1(tau);
        let cycle = Cycle { basis, projected, beta_next: if breakdown { 0.0 } else { b } };
        let est = cycle.estimate(r_norm, tau, &f);
        if breakdown || est <= target {
            return Ok((cycle, true));
        }
        if alpha.len() == cfg.max_dim {
            return Ok((cycle, false));
        }
        basis = cycle.basis;
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

/// Approximates `phi(-tau A) v` for symmetric positive semidefinite `A`.
pub fn phi_action(op: &DiscreteOperator, v: &[f64], tau: f64, cfg: &KrylovConfig) -> Result<PhiActionResult> {
    cfg.validate()?;
    Error::check_len(op.dim(), v.len())?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Config(format!("phi_action needs tau > 0, got {tau}")));
    }
    let n = v.len();
    let v_norm = norm2(v);
    if v_norm == 0.0 {
        return Ok(PhiActionResult { w: vec![0.0; n], matvecs: 0, restarts: 0, est_error: 0.0 });
    }
    let target = cfg.tol * v_norm;
    let start = op.matvecs();

    // u approximates tau * phi(-tau A) v; s is the time already covered.
    let mut u = vec![0.0; n];
    let mut s = 0.0;
    let mut restarts = 0;
    let mut weighted_est = 0.0;
    let mut r = v.to_vec();
    loop {
        let remaining = tau - s;
        if s > 0.0 {
            op.apply_into(&u, &mut r)?;
            for (ri, vi) in r.iter_mut().zip(v) {
                *ri = vi - *ri;
            }
        }
        let r_norm = norm2(&r);
        if r_norm == 0.0 {
            break;
        }
        let (cycle, converged) = lanczos_cycle(op, &r, r_norm, remaining, target, cfg)?;
        if converged {
            let f = cycle.projected.phi_e1(remaining);
            weighted_est += remaining * cycle.estimate(r_norm, remaining, &f);
            cycle.accumulate(remaining, r_norm, &f, &mut u);
            break;
        }
        if restarts == cfg.max_restarts {
            let f = cycle.projected.phi_e1(remaining);
            let est = cycle.estimate(r_norm, remaining, &f);
            cycle.accumulate(remaining, r_norm, &f, &mut u);
            let best = u.iter().map(|x| x / tau).collect();
            return Err(Error::Convergence {
                method: "restarted Lanczos phi action",
                iterations: restarts + 1,
                residual: (weighted_est + remaining * est) / tau,
                best,
                hint: "; raise max_restarts or max_dim".into(),
            });
        }
        let mut step = remaining;
        let mut f = Vec::new();
        let mut est = f64::INFINITY;
        for _ in 0..MAX_HALVINGS {
            step *= 0.5;
            f = cycle.projected.phi_e1(step);
            est = cycle.estimate(r_norm, step, &f);
            if est <= target {
                break;
            }
        }
        weighted_est += step * est;
        cycle.accumulate(step, r_norm, &f, &mut u);
        s += step;
        restarts += 1;
    }

    for x in u.iter_mut() {
        *x /= tau;
    }
    Ok(PhiActionResult { w: u, matvecs: op.matvecs() - start, restarts, est_error: weighted_est / tau })
}
