//! `key = value` run configurations.
//!
//! ```text
//! # heat wave, exponential Euler
//! case = heat1d
//! scheme = exp_euler
//! n = 128
//! dt = 1e-3
//! tol = 1e-2
//! ```

use std::collections::BTreeMap;

use nlheat_core::{Error, InnerSolver, Result, Scheme, StepperConfig, TestCase};

const KEYS: [&str; 11] = [
    "case",
    "scheme",
    "n",
    "dt",
    "tol",
    "t_end",
    "inner",
    "krylov_dim",
    "max_nonlin_iters",
    "deviation_check",
    "omega",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerChoice {
    Cg,
    Chebyshev(usize),
}

impl InnerChoice {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("cg") {
            return Ok(InnerChoice::Cg);
        }
        match s.split_once(':') {
            Some((name, n)) if name.eq_ignore_ascii_case("cheb") => n
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .map(InnerChoice::Chebyshev)
                .ok_or_else(|| Error::Config(format!("bad Chebyshev iteration count in '{s}'"))),
            _ => Err(Error::Config(format!("inner solver must be 'cg' or 'cheb:N', got '{s}'"))),
        }
    }

    /// Solver settings for a nonlinear tolerance `tol`.
    pub fn solver(self, tol: f64) -> InnerSolver {
        match self {
            InnerChoice::Cg => InnerSolver::Cg { rtol: 0.1 * tol, max_iter: 10_000 },
            InnerChoice::Chebyshev(n_iter) => InnerSolver::Chebyshev { n_iter },
        }
    }

    pub fn label(self) -> String {
        match self {
            InnerChoice::Cg => "cg".into(),
            InnerChoice::Chebyshev(n) => format!("cheb:{n}"),
        }
    }
}

/// Parses `128` or `64x64`.
pub fn parse_nodes(s: &str) -> Result<Vec<usize>> {
    s.split(['x', 'X'])
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad node count '{s}'"))))
        .collect()
}

pub fn nodes_label(nodes: &[usize]) -> String {
    nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub scheme: Scheme,
    pub nodes: Option<Vec<usize>>,
    pub dt: f64,
    pub tol: f64,
    pub t_end: Option<f64>,
    pub inner: InnerChoice,
    pub krylov_dim: usize,
    pub max_nonlin_iters: usize,
    pub deviation_check: bool,
    pub omega: f64,
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("{key}: '{v}' is not a finite number")))
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| Error::Config(format!("{key}: '{v}' is not a nonnegative integer")))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
        }
    }
    let need = |k: &str| map.get(k).ok_or_else(|| Error::Config(format!("missing key '{k}'")));

    let case = need("case")?.clone();
    TestCase::by_name(&case)?;
    let tol = map.get("tol").map(|v| number("tol", v)).transpose()?.unwrap_or(1e-2);
    let cfg = RunConfig {
        case,
        scheme: need("scheme")?.parse()?,
        nodes: map.get("n").map(|v| parse_nodes(v)).transpose()?,
        dt: number("dt", need("dt")?)?,
        tol,
        t_end: map.get("t_end").map(|v| number("t_end", v)).transpose()?,
        inner: map.get("inner").map(|v| InnerChoice::parse(v)).transpose()?.unwrap_or(InnerChoice::Cg),
        krylov_dim: map.get("krylov_dim").map(|v| count("krylov_dim", v)).transpose()?.unwrap_or(30),
        max_nonlin_iters: map.get("max_nonlin_iters").map(|v| count("max_nonlin_iters", v)).transpose()?.unwrap_or(100),
        deviation_check: match map.get("deviation_check").map(|s| s.to_ascii_lowercase()) {
            None => false,
            Some(s) if s == "true" || s == "1" => true,
            Some(s) if s == "false" || s == "0" => false,
            Some(s) => return Err(Error::Config(format!("deviation_check: '{s}' is not a boolean"))),
        },
        omega: map.get("omega").map(|v| number("omega", v)).transpose()?.unwrap_or(0.0),
    };
    cfg.stepper().validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn stepper(&self) -> StepperConfig {
        let mut s = StepperConfig::new(self.scheme, self.dt, self.tol);
        s.inner = self.inner.solver(self.tol);
        s.krylov.max_dim = self.krylov_dim;
        s.max_nonlin_iters = self.max_nonlin_iters;
        s.deviation_check = self.deviation_check;
        s.omega = self.omega;
        s
    }

    /// Test case with its grid; the Green case is rebuilt for the node count.
    pub fn case_and_nodes(&self) -> Result<(TestCase, Vec<usize>)> {
        let base = TestCase::by_name(&self.case)?;
        let nodes = self.nodes.clone().unwrap_or_else(|| base.grids[0].clone());
        if nodes.len() != base.spec.dim {
            return Err(Error::Config(format!(
                "case {} is {}D but n = {}",
                self.case,
                base.spec.dim,
                nodes_label(&nodes)
            )));
        }
        let case = if self.case == "green1d" { TestCase::green1d(nodes[0]) } else { base };
        Ok((case, nodes))
    }

    /// `key = value` lines echoed into report headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("case".to_string(), self.case.clone()),
            ("scheme".into(), self.scheme.to_string()),
            ("dt".into(), format!("{:e}", self.dt)),
            ("tol".into(), format!("{:e}", self.tol)),
            ("inner".into(), self.inner.label()),
            ("krylov_dim".into(), self.krylov_dim.to_string()),
            ("krylov_tol".into(), format!("{:e}", self.stepper().krylov.tol)),
            ("max_nonlin_iters".into(), self.max_nonlin_iters.to_string()),
            ("deviation_check".into(), self.deviation_check.to_string()),
            ("omega".into(), format!("{:e}", self.omega)),
        ];
        if let Some(n) = &self.nodes {
            out.insert(2, ("n".into(), nodes_label(n)));
        }
        if let Some(t) = self.t_end {
            out.push(("t_end".into(), format!("{t:e}")));
        }
        out
    }
}
