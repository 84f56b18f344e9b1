use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use nlheat_core::oracle::reference_integrate;
use nlheat_core::vecops::{min_entry, norm2, sub};
use nlheat_core::{green_config, run_simulation, RunReport, Scheme, StepperConfig, TestCase};
use rayon::prelude::*;

use crate::config::{nodes_label, parse_config, parse_nodes, InnerChoice, RunConfig};
use crate::output::{finite, sci, solution_dat, write_file, Csv};
use crate::CliError;

const SCHEMES: [Scheme; 2] = [Scheme::BackwardEuler, Scheme::ExpEuler];

#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub inner: Option<InnerChoice>,
    pub timing: bool,
}

impl Options {
    fn stepper(&self, scheme: Scheme, dt: f64, default_tol: f64) -> StepperConfig {
        let tol = self.tol.unwrap_or(default_tol);
        let mut cfg = StepperConfig::new(scheme, dt, tol);
        cfg.inner = self.inner.unwrap_or(InnerChoice::Cg).solver(tol);
        cfg
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn optional(name: &str, x: Option<f64>) -> Result<String, CliError> {
    x.map(|v| finite(name, v)).transpose().map(Option::unwrap_or_default)
}

fn list<T>(s: Option<&str>, parse: impl Fn(&str) -> Result<T, CliError>) -> Result<Option<Vec<T>>, CliError> {
    s.map(|s| s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(&parse).collect()).transpose()
}

fn parse_dt(s: &str) -> Result<f64, CliError> {
    s.parse::<f64>()
        .ok()
        .filter(|d| *d > 0.0 && d.is_finite())
        .ok_or_else(|| CliError::Config(format!("bad time step '{s}'")))
}

fn parse_grid(case: &TestCase, s: &str) -> Result<Vec<usize>, CliError> {
    let mut nodes = parse_nodes(s)?;
    if nodes.len() == 1 && case.spec.dim == 2 {
        nodes.push(nodes[0]);
    }
    if nodes.len() != case.spec.dim {
        return Err(CliError::Config(format!("grid '{s}' does not fit the {}D case {}", case.spec.dim, case.name)));
    }
    Ok(nodes)
}

fn table_case(name: &str) -> Result<TestCase, CliError> {
    match name {
        "heat1d" | "heat2d" => Ok(TestCase::by_name(name)?),
        _ => Err(CliError::Config(format!("case must be heat1d or heat2d, got '{name}'"))),
    }
}

fn run_report_csv(rc: &RunConfig, nodes: &[usize], r: &RunReport, status: &str) -> Result<Csv, CliError> {
    let mut csv = Csv::new(
        &rc.echo(),
        &[
            "case",
            "scheme",
            "grid",
            "dt",
            "t_end",
            "steps",
            "error",
            "nonlin_iters",
            "matvecs",
            "krylov_restarts",
            "max_opnorm1",
            "min_entry",
            "min_bound_slack",
            "max_deviation",
            "deviation_warnings",
            "status",
        ],
    );
    let ran = r.steps > 0;
    csv.row(&[
        rc.case.clone(),
        r.scheme.to_string(),
        nodes_label(nodes),
        sci(rc.dt),
        finite("t_end", r.t_final)?,
        r.steps.to_string(),
        optional("error", r.final_error)?,
        r.total_nonlin_iters.to_string(),
        r.total_matvecs.to_string(),
        r.total_krylov_restarts.to_string(),
        optional("max_opnorm1", ran.then_some(r.max_opnorm1))?,
        optional("min_entry", ran.then_some(r.min_entry_over_run))?,
        optional("min_bound_slack", ran.then_some(r.min_bound_slack))?,
        optional("max_deviation", ran.then_some(r.max_deviation))?,
        r.deviation_warnings.to_string(),
        status.to_string(),
    ]);
    Ok(csv)
}

fn steps_csv(r: &RunReport) -> Result<Csv, CliError> {
    let mut csv = Csv::new(
        &[],
        &["t", "nonlin_iters", "matvecs", "final_residual", "min_entry", "bound_slack", "deviation_estimate"],
    );
    for s in &r.per_step {
        csv.row(&[
            finite("t", s.t)?,
            s.nonlin_iters.to_string(),
            s.matvecs.to_string(),
            finite("final_residual", s.final_residual)?,
            finite("min_entry", s.min_entry)?,
            finite("bound_slack", s.bound_slack)?,
            finite("deviation_estimate", s.deviation_estimate)?,
        ]);
    }
    Ok(csv)
}

pub fn run(config: &Path, opts: &Options) -> Result<(), CliError> {
    let text =
        fs::read_to_string(config).map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))?;
    let mut rc = parse_config(&text)?;
    if let Some(t) = opts.tol {
        rc.tol = t;
    }
    if let Some(i) = opts.inner {
        rc.inner = i;
    }
    let cfg = rc.stepper();
    cfg.validate()?;
    let (case, nodes) = rc.case_and_nodes()?;
    let grid = case.grid(&nodes)?;
    let t_end = rc.t_end.unwrap_or(case.t_end);
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();

    let (report, failure) = match run_simulation(&case.spec, &grid, &cfg, case.t0, t_end) {
        Ok(r) => (r, None),
        Err(f) => (*f.partial, Some(CliError::from(f.error))),
    };
    let status = if failure.is_some() { "failed" } else { "ok" };
    run_report_csv(&rc, &nodes, &report, status)?.write(&opts.path(&format!("{stem}_report.csv")))?;
    steps_csv(&report)?.write(&opts.path(&format!("{stem}_steps.csv")))?;
    write_file(&opts.path(&format!("{stem}_solution.dat")), &solution_dat(&grid, &report.final_state)?)?;
    if let Some(e) = failure {
        return Err(e);
    }
    println!(
        "{} {} grid {} dt {}: steps {}, error {}, iterations {}, matvecs {}, min entry {}",
        rc.case,
        rc.scheme.short(),
        nodes_label(&nodes),
        sci(rc.dt),
        report.steps,
        report.final_error.map(sci).unwrap_or_else(|| "-".into()),
        report.total_nonlin_iters,
        report.total_matvecs,
        sci(report.min_entry_over_run)
    );
    eprintln!("wall time {:.3}s", report.wall_time);
    Ok(())
}

struct Row {
    dt: f64,
    scheme: Scheme,
    nodes: Vec<usize>,
    outcome: Result<RunReport, String>,
}

pub fn table(case_name: &str, grids: Option<&str>, dts: Option<&str>, opts: &Options) -> Result<(), CliError> {
    let case = table_case(case_name)?;
    let grids = list(grids, |s| parse_grid(&case, s))?.unwrap_or_else(|| case.grids.clone());
    let dts = list(dts, parse_dt)?.unwrap_or_else(|| case.dts.clone());
    let mut jobs = Vec::new();
    for nodes in &grids {
        for &dt in &dts {
            for scheme in SCHEMES {
                jobs.push((nodes.clone(), dt, scheme));
            }
        }
    }
    let rows: Vec<Row> = jobs
        .into_par_iter()
        .map(|(nodes, dt, scheme)| {
            let cfg = opts.stepper(scheme, dt, 1e-2);
            let outcome = case.grid(&nodes).map_err(|e| e.to_string()).and_then(|g| {
                run_simulation(&case.spec, &g, &cfg, case.t0, case.t_end).map_err(|f| f.error.to_string())
            });
            Row { dt, scheme, nodes, outcome }
        })
        .collect();

    let mut best: HashMap<(String, Scheme), usize> = HashMap::new();
    for row in &rows {
        if let Ok(r) = &row.outcome {
            let e = best.entry((nodes_label(&row.nodes), row.scheme)).or_insert(usize::MAX);
            *e = (*e).min(r.total_matvecs);
        }
    }
    let tol = opts.tol.unwrap_or(1e-2);
    let header = vec![
        ("case".to_string(), case.name.to_string()),
        ("tol".into(), format!("{tol:e}")),
        ("krylov_tol".into(), format!("{:e}", 10.0 * tol)),
        ("inner".into(), opts.inner.unwrap_or(InnerChoice::Cg).label()),
        ("t0".into(), format!("{:e}", case.t0)),
        ("t_end".into(), format!("{:e}", case.t_end)),
    ];
    let mut csv = Csv::new(
        &header,
        &[
            "dt",
            "scheme",
            "grid",
            "error",
            "nonlin_iters",
            "matvecs",
            "max_opnorm1",
            "wall_time",
            "min_matvecs",
            "ref_error",
            "ref_iters",
            "ref_matvecs",
            "status",
        ],
    );
    let mut failures = 0;
    for row in &rows {
        let tabulated = case.expected_row(&row.nodes, row.dt, row.scheme);
        let ref_fields = match tabulated {
            Some(p) => [sci(p.error), p.iterations.to_string(), p.matvecs.to_string()],
            None => Default::default(),
        };
        let label = nodes_label(&row.nodes);
        let measured = row.outcome.as_ref().map_err(Clone::clone).and_then(|r| {
            Ok::<_, String>([
                optional("error", r.final_error).map_err(|e| e.to_string())?,
                r.total_nonlin_iters.to_string(),
                r.total_matvecs.to_string(),
                finite("max_opnorm1", r.max_opnorm1).map_err(|e| e.to_string())?,
                if opts.timing { sci(r.wall_time) } else { String::new() },
                if best.get(&(label.clone(), row.scheme)) == Some(&r.total_matvecs) { "*" } else { "" }.to_string(),
            ])
        });
        let (fields, status) = match measured {
            Ok(f) => (f, "ok".to_string()),
            Err(msg) => {
                failures += 1;
                (Default::default(), format!("\"failed: {}\"", msg.replace('"', "'")))
            }
        };
        let [error, iters, matvecs, opnorm, wall, marker] = fields;
        let [pe, pi, pm] = ref_fields;
        csv.row(&[
            sci(row.dt),
            row.scheme.short().into(),
            label,
            error,
            iters,
            matvecs,
            opnorm,
            wall,
            marker,
            pe,
            pi,
            pm,
            status,
        ]);
    }
    csv.write(&opts.path(&format!("table_{}.csv", case.name)))?;
    print!("{}", csv.as_str());
    if failures > 0 {
        return Err(CliError::Numerical(format!("{failures} of {} sweep rows failed", rows.len())));
    }
    Ok(())
}

pub fn green(opts: &Options) -> Result<(), CliError> {
    let n = 128;
    let case = TestCase::green1d(n);
    let grid = case.grid(&[n])?;
    let t_end = case.t_end;
    let mut jobs = Vec::new();
    for scheme in SCHEMES {
        for (tag, dt) in [("dtT", t_end), ("dtT1000", t_end / 1000.0)] {
            jobs.push((scheme, tag, dt));
        }
    }
    let results: Vec<Result<RunReport, CliError>> = jobs
        .par_iter()
        .map(|&(scheme, _, dt)| {
            let mut cfg = green_config(scheme, dt);
            if let Some(t) = opts.tol {
                cfg = StepperConfig { tol: t, krylov: nlheat_core::KrylovConfig::with_tol(10.0 * t), ..cfg };
            }
            if let Some(i) = opts.inner {
                cfg.inner = i.solver(cfg.tol);
            }
            run_simulation(&case.spec, &grid, &cfg, 0.0, t_end).map_err(|f| CliError::from(f.error))
        })
        .collect();

    let mut csv = Csv::new(
        &[
            ("n".into(), n.to_string()),
            ("t_end".into(), format!("{t_end:e}")),
            ("tol".into(), format!("{:e}", opts.tol.unwrap_or(1e-2))),
        ],
        &["scheme", "dt", "file", "min_entry", "nonlin_iters", "matvecs"],
    );
    for ((scheme, tag, dt), res) in jobs.iter().zip(results) {
        let r = res?;
        let file = format!("green_{}_{tag}.dat", scheme.short().to_ascii_lowercase());
        write_file(&opts.path(&file), &solution_dat(&grid, &r.final_state)?)?;
        let min = min_entry(&r.final_state);
        println!("{} dt={} min entry {}", scheme.short(), sci(*dt), sci(min));
        csv.row(&[
            scheme.short().into(),
            sci(*dt),
            file,
            finite("min_entry", min)?,
            r.total_nonlin_iters.to_string(),
            r.total_matvecs.to_string(),
        ]);
    }
    csv.write(&opts.path("green_summary.csv"))
}

fn default_convergence(case: &TestCase) -> (Vec<usize>, Vec<f64>) {
    if case.spec.dim == 1 {
        (vec![32], vec![1e-3, 5e-4, 2.5e-4])
    } else {
        (vec![32, 32], vec![2e-5, 1e-5, 5e-6])
    }
}

pub fn convergence(case_name: &str, grids: Option<&str>, dts: Option<&str>, opts: &Options) -> Result<(), CliError> {
    let case = table_case(case_name)?;
    let (default_grid, default_dts) = default_convergence(&case);
    let grids = list(grids, |s| parse_grid(&case, s))?.unwrap_or_else(|| vec![default_grid]);
    let dts = list(dts, parse_dt)?.unwrap_or(default_dts);
    let tol = opts.tol.unwrap_or(1e-8);
    let mut csv = Csv::new(
        &[("case".into(), case.name.to_string()), ("tol".into(), format!("{tol:e}"))],
        &["dt", "scheme", "grid", "error", "temporal_error", "order", "nonlin_iters", "matvecs", "reference_dt"],
    );
    let mut plot = String::from("# dt temporal_error_BE temporal_error_EE\n");
    for nodes in &grids {
        let grid = case.grid(nodes)?;
        let mut runs = Vec::new();
        for &dt in &dts {
            for scheme in SCHEMES {
                let mut cfg = opts.stepper(scheme, dt, tol);
                cfg.max_nonlin_iters = 500;
                let r = run_simulation(&case.spec, &grid, &cfg, case.t0, case.t_end)
                    .map_err(|f| CliError::from(f.error))?;
                runs.push((dt, scheme, r));
            }
        }
        let norm = runs.iter().map(|(_, _, r)| r.max_opnorm1).fold(0.0, f64::max);
        let span = case.t_end - case.t0;
        let fine_steps = (span * norm * 1.25 / 0.4).ceil().max(1.0);
        let dt_fine = span / fine_steps;
        let reference = reference_integrate(&case.spec, &grid, case.t0, case.t_end, dt_fine)?;
        let ref_norm = norm2(&reference);
        let mut previous: HashMap<Scheme, f64> = HashMap::new();
        let mut by_dt: Vec<(f64, [f64; 2])> = Vec::new();
        for (dt, scheme, r) in &runs {
            let temporal = norm2(&sub(&r.final_state, &reference)) / ref_norm;
            let order = previous.insert(*scheme, temporal).map(|p| (p / temporal).log2());
            csv.row(&[
                sci(*dt),
                scheme.short().into(),
                nodes_label(nodes),
                optional("error", r.final_error)?,
                finite("temporal_error", temporal)?,
                optional("order", order)?,
                r.total_nonlin_iters.to_string(),
                r.total_matvecs.to_string(),
                sci(dt_fine),
            ]);
            let slot = usize::from(*scheme == Scheme::ExpEuler);
            match by_dt.last_mut() {
                Some((d, v)) if d == dt => v[slot] = temporal,
                _ => {
                    let mut v = [0.0; 2];
                    v[slot] = temporal;
                    by_dt.push((*dt, v));
                }
            }
        }
        for (dt, [be, ee]) in by_dt {
            plot.push_str(&format!("{} {} {}\n", sci(dt), sci(be), sci(ee)));
        }
    }
    csv.write(&opts.path(&format!("convergence_{}.csv", case.name)))?;
    write_file(&opts.path(&format!("convergence_{}.dat", case.name)), &plot)?;
    print!("{}", csv.as_str());
    Ok(())
}
