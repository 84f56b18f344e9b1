//! Uniform-grid finite differences for `div(k(u) grad u) + g` with Dirichlet
//! boundaries.
//!
//! Unknowns live on interior nodes only; boundary values are eliminated into
//! the right-hand side, giving the semidiscrete system `y' = -A(y) y + g(t)`.
//! The matrix uses the conservative 3-point (1D) or 5-point (2D) stencil with
//! face conductivity `(k(u_i) + k(u_j)) / 2`, so for nonnegative states it is
//! symmetric, positive semidefinite and has nonpositive off-diagonals.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Function of position and time, e.g. a boundary or source term.
pub type SpaceTimeFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
/// Function of position only (initial data).
pub type SpaceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Nodal conductivity law. Negative states are clamped to zero before
/// evaluation; the stored state is never modified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conductivity {
    /// `k(u) = k0 * u^sigma`
    PowerLaw { k0: f64, sigma: f64 },
    /// State-independent conductivity (linear diffusion).
    Constant(f64),
}

impl Conductivity {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Conductivity::PowerLaw { k0, sigma } => {
                let u = u.max(0.0);
                if sigma == 2.0 {
                    k0 * u * u
                } else if sigma == 1.0 {
                    k0 * u
                } else {
                    k0 * u.powf(sigma)
                }
            }
            Conductivity::Constant(k) => k,
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Conductivity::Constant(_))
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Conductivity::PowerLaw { k0, sigma } => {
                if !(k0 > 0.0 && k0.is_finite()) {
                    return Err(Error::Config(format!("k0 must be positive, got {k0}")));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
                }
            }
            Conductivity::Constant(k) => {
                if !(k > 0.0 && k.is_finite()) {
                    return Err(Error::Config(format!("conductivity must be positive, got {k}")));
                }
            }
        }
        Ok(())
    }
}

/// A heat conduction problem on an axis-aligned box.
#[derive(Clone)]
pub struct ProblemSpec {
    pub dim: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub conductivity: Conductivity,
    pub boundary: SpaceTimeFn,
    pub source: SpaceTimeFn,
    pub initial: SpaceFn,
    pub exact: Option<SpaceTimeFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("dim", &self.dim)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("conductivity", &self.conductivity)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    /// Problem on the unit interval / square with zero data everywhere.
    pub fn unit(dim: usize, conductivity: Conductivity) -> Self {
        let zero_st: SpaceTimeFn = Arc::new(|_, _| 0.0);
        Self {
            dim,
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
            conductivity,
            boundary: zero_st.clone(),
            source: zero_st,
            initial: Arc::new(|_| 0.0),
            exact: None,
        }
    }

    pub fn with_boundary(mut self, f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary = Arc::new(f);
        self
    }

    pub fn with_source(mut self, f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Arc::new(f);
        self
    }

    pub fn with_initial(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(f);
        self
    }

    pub fn with_exact(mut self, f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(f));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::Config(format!("dimension must be 1 or 2, got {}", self.dim)));
        }
        if self.lower.len() != self.dim || self.upper.len() != self.dim {
            return Err(Error::Config("domain bounds do not match the dimension".into()));
        }
        for (lo, hi) in self.lower.iter().zip(&self.upper) {
            if !(hi > lo) {
                return Err(Error::Config(format!("empty domain extent [{lo}, {hi}]")));
            }
        }
        self.conductivity.validate()
    }

    /// Samples initial data on the grid and boundary/source data at time `t`;
    /// all of them must be nonnegative.
    pub fn check_nonnegative_data(&self, grid: &Grid, t: f64) -> Result<()> {
        for i in 0..grid.len() {
            let x = grid.point(i);
            let u0 = (self.initial)(x);
            let g = (self.source)(x, t);
            if !(u0 >= 0.0) || !(g >= 0.0) {
                return Err(Error::Contract(format!(
                    "negative initial or source data at node {i}: u0 = {u0}, g = {g}"
                )));
            }
        }
        let mut bad = None;
        grid.for_each_boundary_point(|p| {
            let b = (self.boundary)(p, t);
            if !(b >= 0.0) && bad.is_none() {
                bad = Some((p.to_vec(), b));
            }
        });
        match bad {
            Some((p, b)) => Err(Error::Contract(format!("negative boundary value {b} at {p:?}"))),
            None => Ok(()),
        }
    }
}

/// Interior nodes of a uniform grid, x index running fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub nodes: Vec<usize>,
    pub spacing: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    coords: Vec<f64>,
}

pub fn build_grid(spec: &ProblemSpec, nodes_per_axis: &[usize]) -> Result<Grid> {
    spec.validate()?;
    if nodes_per_axis.len() != spec.dim {
        return Err(Error::Config(format!("{} node counts given for a {}D problem", nodes_per_axis.len(), spec.dim)));
    }
    if let Some(&n) = nodes_per_axis.iter().find(|&&n| n < 2) {
        return Err(Error::Config(format!("each axis needs at least 2 nodes, got {n}")));
    }
    let spacing: Vec<f64> = nodes_per_axis
        .iter()
        .zip(spec.lower.iter().zip(&spec.upper))
        .map(|(&n, (lo, hi))| (hi - lo) / (n + 1) as f64)
        .collect();
    let total: usize = nodes_per_axis.iter().product();
    let mut coords = Vec::with_capacity(total * spec.dim);
    match spec.dim {
        1 => {
            for i in 0..nodes_per_axis[0] {
                coords.push(spec.lower[0] + (i + 1) as f64 * spacing[0]);
            }
        }
        _ => {
            for j in 0..nodes_per_axis[1] {
                for i in 0..nodes_per_axis[0] {
                    coords.push(spec.lower[0] + (i + 1) as f64 * spacing[0]);
                    coords.push(spec.lower[1] + (j + 1) as f64 * spacing[1]);
                }
            }
        }
    }
    Ok(Grid {
        dim: spec.dim,
        nodes: nodes_per_axis.to_vec(),
        spacing,
        lower: spec.lower.clone(),
        upper: spec.upper.clone(),
        coords,
    })
}

impl Grid {
    /// Total number of unknowns.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nx(&self) -> usize {
        self.nodes[0]
    }

    pub fn ny(&self) -> usize {
        if self.dim == 2 {
            self.nodes[1]
        } else {
            1
        }
    }

    /// Samples `f(x)` at every interior node.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.point(i))).collect()
    }

    /// Visits every boundary point adjacent to an interior node.
    pub fn for_each_boundary_point(&self, mut f: impl FnMut(&[f64])) {
        match self.dim {
            1 => {
                f(&[self.lower[0]]);
                f(&[self.upper[0]]);
            }
            _ => {
                let (nx, ny) = (self.nx(), self.ny());
                for j in 0..ny {
                    let y = self.lower[1] + (j + 1) as f64 * self.spacing[1];
                    f(&[self.lower[0], y]);
                    f(&[self.upper[0], y]);
                }
                for i in 0..nx {
                    let x = self.lower[0] + (i + 1) as f64 * self.spacing[0];
                    f(&[x, self.lower[1]]);
                    f(&[x, self.upper[1]]);
                }
            }
        }
    }
}

/// Row-compressed sparse matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    /// Keeps the nonzero entries of a dense square matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        let n = m.nrows();
        let mut out = Self { n, row_ptr: Vec::with_capacity(n + 1), col_idx: Vec::new(), values: Vec::new() };
        out.row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != 0.0 {
                    out.col_idx.push(j);
                    out.values.push(m[(i, j)]);
                }
            }
            out.row_ptr.push(out.col_idx.len());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *o = s;
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for (&j, v) in self.col_idx.iter().zip(&self.values) {
            col[j] += v.abs();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// `||self - other||_1` for two matrices of the same size.
    pub fn diff_norm1(&self, other: &CsrMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        let mut col = vec![0.0; self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                col[j] += (v - other.get(i, j)).abs();
            }
            for (j, v) in other.row(i) {
                if self.get(i, j) == 0.0 {
                    col[j] += v.abs();
                }
            }
        }
        col.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// The assembled matrix `A(y)` and vector `g(t)` of `y' = -A(y) y + g(t)`,
/// with a counter of matrix-vector products.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: CsrMatrix,
    pub bvec: Vec<f64>,
    matvecs: Cell<usize>,
}

impl DiscreteOperator {
    pub fn new(matrix: CsrMatrix, bvec: Vec<f64>) -> Result<Self> {
        Error::check_len(matrix.dim(), bvec.len())?;
        Ok(Self { matrix, bvec, matvecs: Cell::new(0) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Number of `apply` calls so far.
    pub fn matvecs(&self) -> usize {
        self.matvecs.get()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        Error::check_len(self.dim(), v.len())?;
        Error::check_len(self.dim(), out.len())?;
        self.matrix.mul_into(v, out);
        self.matvecs.set(self.matvecs.get() + 1);
        Ok(())
    }

    pub fn norm1(&self) -> f64 {
        self.matrix.norm1()
    }

    /// Largest `omega >= 0` certified by Gershgorin discs: `min_i (a_ii - sum_j |a_ij|)`.
    pub fn gershgorin_omega(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.matrix.row(i).fold(0.0, |acc, (j, v)| if j == i { acc + v } else { acc - v.abs() }))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }
}

/// Assembles `A(y)` and `g(t)` for state `y` at time `t`.
pub fn assemble(spec: &ProblemSpec, grid: &Grid, y: &[f64], t: f64) -> Result<DiscreteOperator> {
    let n = grid.len();
    Error::check_len(n, y.len())?;
    let k = spec.conductivity;
    let kval: Vec<f64> = y.iter().map(|&u| k.eval(u)).collect();
    let (nx, ny) = (grid.nx(), grid.ny());
    let two_d = grid.dim == 2;
    let inv_hx2 = 1.0 / (grid.spacing[0] * grid.spacing[0]);
    let inv_hy2 = if two_d { 1.0 / (grid.spacing[1] * grid.spacing[1]) } else { 0.0 };

    let stencil = if two_d { 5 } else { 3 };
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(n * stencil);
    let mut values = Vec::with_capacity(n * stencil);
    let mut bvec = Vec::with_capacity(n);
    row_ptr.push(0);

    let mut bpoint = [0.0; 2];
    for idx in 0..n {
        let (i, j) = (idx % nx, idx / nx);
        let p = grid.point(idx);
        let ki = kval[idx];
        let mut diag = 0.0;
        let mut b = (spec.source)(p, t);

        // Dirichlet face: conductivity from the boundary value, flux into bvec.
        let dirichlet = |q: &[f64], inv_h2: f64, diag: &mut f64, b: &mut f64| {
            let ub = (spec.boundary)(q, t);
            let kf = 0.5 * (ki + k.eval(ub)) * inv_h2;
            *diag += kf;
            *b += kf * ub;
        };

        if two_d {
            if j > 0 {
                let kf = 0.5 * (ki + kval[idx - nx]) * inv_hy2;
                diag += kf;
                col_idx.push(idx - nx);
                values.push(-kf);
            } else {
                bpoint[0] = p[0];
                bpoint[1] = grid.lower[1];
                dirichlet(&bpoint[..2], inv_hy2, &mut diag, &mut b);
            }
        }
        if i > 0 {
            let kf = 0.5 * (ki + kval[idx - 1]) * inv_hx2;
            diag += kf;
            col_idx.push(idx - 1);
            values.push(-kf);
        } else {
            bpoint[0] = grid.lower[0];
            if two_d {
                bpoint[1] = p[1];
            }
            dirichlet(&bpoint[..grid.dim], inv_hx2, &mut diag, &mut b);
        }
        let diag_pos = values.len();
        col_idx.push(idx);
        values.push(0.0);
        if i + 1 < nx {
            let kf = 0.5 * (ki + kval[idx + 1]) * inv_hx2;
            diag += kf;
            col_idx.push(idx + 1);
            values.push(-kf);
        } else {
            bpoint[0] = grid.upper[0];
            if two_d {
                bpoint[1] = p[1];
            }
            dirichlet(&bpoint[..grid.dim], inv_hx2, &mut diag, &mut b);
        }
        if two_d {
            if j + 1 < ny {
                let kf = 0.5 * (ki + kval[idx + nx]) * inv_hy2;
                diag += kf;
                col_idx.push(idx + nx);
                values.push(-kf);
            } else {
                bpoint[0] = p[0];
                bpoint[1] = grid.upper[1];
                dirichlet(&bpoint[..2], inv_hy2, &mut diag, &mut b);
            }
        }
        values[diag_pos] = diag;
        bvec.push(b);
        row_ptr.push(col_idx.len());
    }

    DiscreteOperator::new(CsrMatrix { n, row_ptr, col_idx, values }, bvec)
}

/// `||A(y) - A(v)||_1 / ||y - v||_inf`, a sample of the Lipschitz ratio of
/// the operator map.
pub fn lipschitz_ratio(spec: &ProblemSpec, grid: &Grid, y: &[f64], v: &[f64], t: f64) -> Result<f64> {
    let a = assemble(spec, grid, y, t)?;
    let b = assemble(spec, grid, v, t)?;
    let dist = y.iter().zip(v).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
    if dist == 0.0 {
        return Ok(0.0);
    }
    Ok(a.matrix.diff_norm1(&b.matrix) / dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec1d() -> ProblemSpec {
        ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 0.5, sigma: 2.0 })
    }

    #[test]
    fn uniform_spacing_1d() {
        let g = build_grid(&spec1d(), &[128]).unwrap();
        assert_eq!(g.len(), 128);
        assert_eq!(g.spacing[0], 1.0 / 129.0);
        assert!(g.point(0)[0] > 0.0 && g.point(127)[0] < 1.0);
    }

    #[test]
    fn node_count_2d() {
        let s = ProblemSpec::unit(2, Conductivity::PowerLaw { k0: 1.0, sigma: 2.0 });
        let g = build_grid(&s, &[64, 64]).unwrap();
        assert_eq!(g.len(), 4096);
        assert_eq!(g.point(65), &[2.0 / 65.0, 2.0 / 65.0]);
        assert!(matches!(build_grid(&s, &[0, 64]), Err(Error::Config(_))));
        assert!(matches!(build_grid(&s, &[64]), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_conductivity_rejected() {
        let s = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 0.0, sigma: 2.0 });
        assert!(build_grid(&s, &[8]).is_err());
        let s = ProblemSpec::unit(1, Conductivity::PowerLaw { k0: 1.0, sigma: -1.0 });
        assert!(build_grid(&s, &[8]).is_err());
    }

    #[test]
    fn three_node_hand_assembly() {
        let g = build_grid(&spec1d(), &[3]).unwrap();
        assert_eq!(g.spacing[0], 0.25);
        let op = assemble(&spec1d(), &g, &[1.0; 3], 0.0).unwrap();
        assert_eq!(op.matrix.get(1, 0), -8.0);
        assert_eq!(op.matrix.get(1, 1), 16.0);
        assert_eq!(op.matrix.get(1, 2), -8.0);
        // Boundary faces see k(0) = 0, so the end rows only carry the inner face.
        assert_eq!(op.matrix.get(0, 0), 12.0);
        assert_eq!(op.bvec, vec![0.0; 3]);
        assert_eq!(op.apply(&[1.0; 3]).unwrap(), vec![4.0, 0.0, 4.0]);
    }

    #[test]
    fn dirichlet_contribution() {
        let s = spec1d().with_boundary(|_, _| 1.0);
        let g = build_grid(&s, &[3]).unwrap();
        let op = assemble(&s, &g, &[1.0; 3], 0.0).unwrap();
        assert_relative_eq!(op.bvec[0], 8.0);
        assert_relative_eq!(op.bvec[2], 8.0);
        assert_eq!(op.bvec[1], 0.0);
        assert_eq!(op.apply(&[1.0; 3]).unwrap(), vec![8.0, 0.0, 8.0]);
    }

    #[test]
    fn zero_state_gives_zero_operator() {
        let g = build_grid(&spec1d(), &[5]).unwrap();
        let op = assemble(&spec1d(), &g, &[0.0; 5], 0.3).unwrap();
        assert!(op.matrix.to_dense().iter().all(|&v| v == 0.0));
        assert!(op.bvec.iter().all(|&v| v == 0.0));
        assert_eq!(op.apply(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn apply_counts_and_checks_length() {
        let g = build_grid(&spec1d(), &[3]).unwrap();
        let op = assemble(&spec1d(), &g, &[1.0; 3], 0.0).unwrap();
        let c = op.matvecs();
        op.apply(&[0.0; 3]).unwrap();
        assert_eq!(op.matvecs(), c + 1);
        assert!(matches!(op.apply(&[0.0; 2]), Err(Error::Dimension { expected: 3, got: 2 })));
        assert_eq!(op.matvecs(), c + 1);
    }

    #[test]
    fn norm1_is_max_column_sum() {
        let g = build_grid(&spec1d(), &[3]).unwrap();
        let op = assemble(&spec1d(), &g, &[1.0; 3], 0.0).unwrap();
        assert_eq!(op.norm1(), 32.0);
    }

    #[test]
    fn negative_state_clamped_inside_k() {
        let g = build_grid(&spec1d(), &[3]).unwrap();
        let op = assemble(&spec1d(), &g, &[-1.0, 1.0, -1.0], 0.0).unwrap();
        // k(-1) is treated as k(0) = 0
        assert_eq!(op.matrix.get(0, 1), -4.0);
    }

    #[test]
    fn two_d_stencil_is_symmetric_and_conservative() {
        let s = ProblemSpec::unit(2, Conductivity::PowerLaw { k0: 1.0, sigma: 2.0 });
        let g = build_grid(&s, &[4, 3]).unwrap();
        let y: Vec<f64> = (0..12).map(|i| 1.0 + 0.1 * i as f64).collect();
        let op = assemble(&s, &g, &y, 0.0).unwrap();
        let m = op.matrix.to_dense();
        assert_eq!(m, m.transpose());
        // node (1,1) has no boundary face
        let idx = 4 + 1;
        let row_sum: f64 = m.row(idx).iter().sum();
        assert!(row_sum.abs() < 1e-12 * m[(idx, idx)]);
        assert_eq!(op.matrix.row(idx).count(), 5);
    }

    #[test]
    fn gershgorin_omega_zero_for_conservative_rows() {
        let g = build_grid(&spec1d(), &[4]).unwrap();
        let op = assemble(&spec1d(), &g, &[1.0; 4], 0.0).unwrap();
        assert_eq!(op.gershgorin_omega(), 0.0);
        let s = ProblemSpec::unit(1, Conductivity::Constant(1.0));
        let g = build_grid(&s, &[2]).unwrap();
        let op = assemble(&s, &g, &[0.0; 2], 0.0).unwrap();
        assert_relative_eq!(op.gershgorin_omega(), 9.0);
    }

    #[test]
    fn negative_data_detected() {
        let s = spec1d().with_boundary(|x, _| if x[0] > 0.5 { -1.0 } else { 0.0 });
        let g = build_grid(&s, &[4]).unwrap();
        assert!(matches!(s.check_nonnegative_data(&g, 0.0), Err(Error::Contract(_))));
        assert!(spec1d().check_nonnegative_data(&g, 0.0).is_ok());
    }
}
