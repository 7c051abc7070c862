//! The `aalg` command line.
//!
//! Every subcommand prints one JSON report on stdout. Tabular data (CSV) goes
//! to files named with `--out` / `--plot-dir`; existing files are only
//! replaced with `--force`. Exit codes follow [`Error::exit_code`].

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::classify::{
    classify_ricci_flat, decomposability, enumerate_sym_group, is_special_palindrome,
    isotropy_structure,
};
use crate::curvature::{
    curvature, is_flat, is_locally_symmetric, is_ricci_flat, ricci_closed_form, ricci_general,
    symmetry_residuals,
};
use crate::dynamics::{
    ctc_f, ctc_report, ctc_scan, f_max, integrate_geodesic, polar_diagnostics, write_columns,
    write_ctc_csv, write_trajectory_csv,
};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_diff, to_rows};
use crate::metric::{LorentzianStructure, MetricCase};
use crate::oracle::{compare_frames, convergence, ricci_fd, MetricField};
use crate::petrov::{is_simply_transitive, PetrovSolution};
use crate::DEFAULT_TOL;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "aalg",
    version,
    about = "Curvature and Petrov solutions of Lorentzian almost abelian Lie groups"
)]
pub struct Cli {
    /// Zero threshold for all predicates.
    #[arg(long, global = true, env = "AALG_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for randomized sampling; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Allow replacing existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PetrovArgs {
    /// Comma-separated λ₃,...,λ_{n-1}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub lambda: Option<Vec<f64>>,
    /// JSON `{"lambda": [...]}`, inline or as a file path.
    #[arg(long, conflicts_with = "lambda")]
    pub spec: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ricci tensor, flatness predicates and classification of an algebra spec.
    Ricci {
        /// JSON `{"n": 4, "metric": "b", "A": [[...], ...]}`, inline or a file path.
        #[arg(long)]
        spec: String,
    },
    /// Build a generalized Petrov solution and its isotropy group.
    Petrov {
        #[command(flatten)]
        source: PetrovArgs,
        /// Return the flat Minkowski member for all-zero λ instead of failing.
        #[arg(long)]
        allow_minkowski: bool,
        /// CSV of metric components against x_n.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of x_n samples in [-1, 1] for --out.
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Integrate the Arnold–Euler equation for a geodesic through the identity.
    Geodesic {
        #[command(flatten)]
        source: PetrovArgs,
        /// Initial velocity u₁,...,u_n; a seeded random unit vector if omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        u0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 100.0, allow_hyphen_values = true)]
        t_end: f64,
        /// CSV trajectory `t,u1,...,un,Q`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the closed timelike curve and the maximum of f.
    Ctc {
        #[command(flatten)]
        source: PetrovArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// CSV scan `t,x1,...,xn,norm`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for the f(t) curve and curve projections.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Cross-check the curvature engine against identities and finite differences.
    Verify {
        /// Algebra spec or `{"lambda": [...]}`, inline or a file path.
        #[arg(long)]
        spec: String,
        /// Finite-difference step.
        #[arg(long, default_value_t = crate::oracle::DEFAULT_STEP)]
        h: f64,
        /// Random points for the finite-difference comparison.
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Tolerance for the finite-difference comparison.
        #[arg(long, default_value_t = 1e-4)]
        fd_tol: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraSpec {
    n: Option<usize>,
    metric: MetricCase,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaSpec {
    lambda: Vec<f64>,
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn load_json(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Input(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("malformed JSON: {e}")))
}

fn parse_structure(value: &Value) -> Result<LorentzianStructure> {
    let spec: AlgebraSpec = serde_json::from_value(value.clone())
        .map_err(|e| Error::Input(format!("invalid algebra spec: {e}")))?;
    if let Some(n) = spec.n {
        if n < 3 {
            return Err(Error::Input(format!("n must be at least 3, got {n}")));
        }
        if spec.a.len() + 1 != n {
            return Err(Error::Input(format!(
                "n = {n} needs A with {} rows, got {}",
                n - 1,
                spec.a.len()
            )));
        }
    }
    LorentzianStructure::from_rows(spec.metric, &spec.a)
}

fn parse_lambda(value: &Value) -> Result<Vec<f64>> {
    let spec: LambdaSpec = serde_json::from_value(value.clone())
        .map_err(|e| Error::Input(format!("invalid lambda spec: {e}")))?;
    Ok(spec.lambda)
}

fn resolve_lambda(src: &PetrovArgs) -> Result<Vec<f64>> {
    match (&src.lambda, &src.spec) {
        (Some(l), _) => Ok(l.clone()),
        (None, Some(spec)) => parse_lambda(&load_json(spec)?),
        (None, None) => Err(Error::Input("pass --lambda or --spec".into())),
    }
}

fn create_output(path: &Path, force: bool) -> Result<BufWriter<File>> {
    if path.exists() && !force {
        return Err(Error::Input(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Input(format!("cannot create {}: {e}", path.display())))
}

fn header(cli: &Cli, command: &str, input: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!("aalg"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(cli.seed));
    m.insert("tol".into(), json!(cli.tol));
    m.insert("input".into(), input);
    m
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Parses `args`, runs the command and writes the JSON report to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return Err(Error::Input(e.to_string())),
        Err(e) => {
            write!(out, "{e}").map_err(io_err)?;
            return Ok(());
        }
    };
    execute(&cli, out)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Input(format!("write failed: {e}"))
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    if !(cli.tol > 0.0) {
        return Err(Error::Input(format!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    let (report, failures) = match &cli.command {
        Command::Ricci { spec } => (cmd_ricci(cli, spec)?, vec![]),
        Command::Petrov {
            source,
            allow_minkowski,
            out,
            samples,
        } => (
            cmd_petrov(cli, source, *allow_minkowski, out.as_deref(), *samples)?,
            vec![],
        ),
        Command::Geodesic {
            source,
            u0,
            t_end,
            out,
        } => (
            cmd_geodesic(cli, source, u0.as_deref(), *t_end, out.as_deref())?,
            vec![],
        ),
        Command::Ctc {
            source,
            samples,
            out,
            plot_dir,
        } => cmd_ctc(cli, source, *samples, out.as_deref(), plot_dir.as_deref())?,
        Command::Verify {
            spec,
            h,
            points,
            fd_tol,
        } => cmd_verify(cli, spec, *h, *points, *fd_tol)?,
    };
    let text = serde_json::to_string_pretty(&report).expect("json values serialize");
    writeln!(out, "{text}").map_err(io_err)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(failures))
    }
}

pub fn cmd_ricci(cli: &Cli, spec: &str) -> Result<Value> {
    let input = load_json(spec)?;
    let s = parse_structure(&input)?;
    let general = ricci_general(&s);
    let closed = ricci_closed_form(&s);
    let rf = is_ricci_flat(&s, cli.tol);
    let fl = is_flat(&s, cli.tol);
    let mut m = header(cli, "ricci", input);
    m.insert("n".into(), json!(s.dim()));
    m.insert("metric".into(), json!(s.case()));
    m.insert("A".into(), json!(to_rows(s.algebra().matrix())));
    m.insert("ricci_flat".into(), json!(rf.ricci_flat));
    m.insert("flat".into(), json!(fl.flat));
    m.insert("ricci_general".into(), json!(to_rows(&general)));
    m.insert("ricci_closed_form".into(), json!(to_rows(&closed)));
    m.insert(
        "closed_form_max_diff".into(),
        json!(max_abs_diff(&general, &closed)),
    );
    m.insert("ricci_flat_report".into(), to_value(&rf));
    m.insert("flat_report".into(), to_value(&fl));
    m.insert(
        "local_symmetry".into(),
        to_value(&is_locally_symmetric(&s, cli.tol)),
    );
    m.insert(
        "decomposition".into(),
        to_value(&s.algebra().decompose(s.case())),
    );
    m.insert(
        "classification".into(),
        to_value(&classify_ricci_flat(&s, cli.tol)),
    );
    m.insert(
        "killing_form".into(),
        json!(to_rows(&s.algebra().killing_form())),
    );
    m.insert(
        "mean_curvature".into(),
        json!(s
            .algebra()
            .mean_curvature(s.case())
            .iter()
            .collect::<Vec<_>>()),
    );
    Ok(Value::Object(m))
}

pub fn cmd_petrov(
    cli: &Cli,
    source: &PetrovArgs,
    allow_minkowski: bool,
    out: Option<&Path>,
    samples: usize,
) -> Result<Value> {
    let lambdas = resolve_lambda(source)?;
    let sol = if allow_minkowski {
        PetrovSolution::build_allowing_minkowski(&lambdas)?
    } else {
        PetrovSolution::build(&lambdas)?
    };
    let s = sol.structure();
    let mut m = header(cli, "petrov", json!({ "lambda": lambdas }));
    let transitive = is_simply_transitive(&lambdas);
    m.insert("n".into(), json!(sol.dim()));
    m.insert("lambda".into(), json!(sol.lambdas()));
    m.insert("alpha".into(), json!(sol.alpha()));
    m.insert("beta".into(), json!(sol.beta()));
    m.insert("degenerate".into(), json!(sol.is_degenerate()));
    m.insert("A".into(), json!(to_rows(&sol.associated_matrix())));
    m.insert(
        "constraint_residuals".into(),
        json!(sol.constraint_residuals()),
    );
    m.insert(
        "ricci_flat".into(),
        json!(is_ricci_flat(&s, cli.tol).ricci_flat),
    );
    m.insert("flat".into(), json!(is_flat(&s, cli.tol).flat));
    m.insert("simply_transitive".into(), json!(transitive));
    m.insert("palindrome".into(), json!(is_special_palindrome(&lambdas)));
    let isotropy = if transitive && !sol.is_degenerate() {
        let elements = enumerate_sym_group(&sol, cli.tol)?;
        m.insert("sym_group_order".into(), json!(elements.len()));
        to_value(&isotropy_structure(&elements)?)
    } else {
        Value::Null
    };
    m.insert("isotropy".into(), isotropy);
    m.insert(
        "decomposability".into(),
        to_value(&decomposability(&lambdas)),
    );
    let classical = if sol.dim() == 4 && !sol.is_degenerate() {
        to_value(&sol.to_classical_petrov(100, cli.seed)?)
    } else {
        Value::Null
    };
    m.insert("classical_reduction".into(), classical);

    if let Some(path) = out {
        if samples < 2 {
            return Err(Error::Input("--samples must be at least 2".into()));
        }
        let n = sol.dim();
        let xs: Vec<f64> = (0..samples)
            .map(|k| -1.0 + 2.0 * k as f64 / (samples - 1) as f64)
            .collect();
        let mut names = vec!["xn".to_string()];
        let mut columns = vec![xs.clone()];
        let metrics = xs
            .iter()
            .map(|xn| {
                let mut x = vec![0.0; n];
                x[n - 1] = *xn;
                sol.metric_at(&x)
            })
            .collect::<Result<Vec<_>>>()?;
        for i in 0..n {
            for j in i..n {
                names.push(format!("g{}_{}", i + 1, j + 1));
                columns.push(metrics.iter().map(|g| g[(i, j)]).collect());
            }
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write_columns(create_output(path, cli.force)?, &refs, &columns)?;
        m.insert("metric_csv".into(), json!(path.display().to_string()));
    }
    Ok(Value::Object(m))
}

pub fn cmd_geodesic(
    cli: &Cli,
    source: &PetrovArgs,
    u0: Option<&[f64]>,
    t_end: f64,
    out: Option<&Path>,
) -> Result<Value> {
    let lambdas = resolve_lambda(source)?;
    let sol = PetrovSolution::build(&lambdas)?;
    let n = sol.dim();
    let u0 = match u0 {
        Some(u) => u.to_vec(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / norm).collect()
        }
    };
    let traj = integrate_geodesic(&sol, &u0, t_end, cli.tol)?;
    let mut m = header(
        cli,
        "geodesic",
        json!({ "lambda": lambdas, "u0": u0, "t_end": t_end }),
    );
    m.insert("n".into(), json!(n));
    m.insert("alpha".into(), json!(sol.alpha()));
    m.insert("beta".into(), json!(sol.beta()));
    m.insert("q0".into(), json!(traj.q0));
    m.insert("max_q_drift".into(), json!(traj.max_q_drift));
    m.insert("stats".into(), to_value(&traj.stats));
    m.insert("samples".into(), json!(traj.samples.len()));
    m.insert(
        "final".into(),
        to_value(traj.samples.last().expect("nonempty")),
    );
    m.insert("sphere".into(), to_value(&traj.sphere));
    match polar_diagnostics(&traj, &sol) {
        Ok(p) => m.insert("polar".into(), to_value(&p)),
        Err(e) => m.insert("polar".into(), json!({ "not_applicable": e.to_string() })),
    };
    if let Some(path) = out {
        write_trajectory_csv(create_output(path, cli.force)?, &traj.samples)?;
        m.insert("trajectory_csv".into(), json!(path.display().to_string()));
    }
    Ok(Value::Object(m))
}

pub const F_THRESHOLD: f64 = -PI * PI / 4.0;

pub fn cmd_ctc(
    cli: &Cli,
    source: &PetrovArgs,
    samples: usize,
    out: Option<&Path>,
    plot_dir: Option<&Path>,
) -> Result<(Value, Vec<String>)> {
    let lambdas = resolve_lambda(source)?;
    let sol = PetrovSolution::build(&lambdas)?;
    let scan = ctc_scan(&sol, samples)?;
    let report = ctc_report(&sol, &scan);
    let fm = f_max(1e-12)?;
    let mut m = header(cli, "ctc", json!({ "lambda": lambdas, "samples": samples }));
    m.insert("n".into(), json!(sol.dim()));
    m.insert("alpha".into(), json!(sol.alpha()));
    m.insert("beta".into(), json!(sol.beta()));
    m.insert("f_max".into(), to_value(&fm));
    m.insert("threshold".into(), json!(F_THRESHOLD));
    m.insert(
        "f_max_below_threshold".into(),
        json!(fm.f_star < F_THRESHOLD),
    );
    m.insert("all_timelike".into(), json!(report.all_timelike));
    m.insert("ctc".into(), to_value(&report));

    if let Some(path) = out {
        write_ctc_csv(create_output(path, cli.force)?, &scan)?;
        m.insert("ctc_csv".into(), json!(path.display().to_string()));
    }
    if let Some(dir) = plot_dir {
        let files = write_plot_data(dir, &scan, cli.force)?;
        m.insert("plot_files".into(), json!(files));
    }

    let mut failures = vec![];
    if fm.f_star >= F_THRESHOLD {
        failures.push(format!("max f = {} is not below -pi^2/4", fm.f_star));
    }
    if !report.all_timelike {
        failures.push(format!(
            "norm {} >= 0 at t = {}",
            report.worst_norm, report.worst_t
        ));
    }
    Ok((Value::Object(m), failures))
}

/// `plot_f.csv` (`t,f,threshold`), `plot_ctc.csv` (`t,x1,x2,xn`) and the
/// projections `plot_x1xn.csv`, `plot_x2xn.csv`.
fn write_plot_data(
    dir: &Path,
    scan: &[crate::dynamics::CtcSample],
    force: bool,
) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Input(format!("cannot create {}: {e}", dir.display())))?;
    let t: Vec<f64> = scan.iter().map(|s| s.t).collect();
    let last = scan[0].point.len() - 1;
    let x1: Vec<f64> = scan.iter().map(|s| s.point[0]).collect();
    let x2: Vec<f64> = scan.iter().map(|s| s.point[1]).collect();
    let xn: Vec<f64> = scan.iter().map(|s| s.point[last]).collect();
    let f: Vec<f64> = t.iter().map(|t| ctc_f(*t)).collect();
    type PlotFile<'a> = (&'a str, Vec<&'a str>, Vec<Vec<f64>>);
    let files: [PlotFile; 4] = [
        (
            "plot_f.csv",
            vec!["t", "f", "threshold"],
            vec![t.clone(), f, vec![F_THRESHOLD; t.len()]],
        ),
        (
            "plot_ctc.csv",
            vec!["t", "x1", "x2", "xn"],
            vec![t.clone(), x1.clone(), x2.clone(), xn.clone()],
        ),
        ("plot_x1xn.csv", vec!["x1", "xn"], vec![x1, xn.clone()]),
        ("plot_x2xn.csv", vec!["x2", "xn"], vec![x2, xn]),
    ];
    let mut written = vec![];
    for (name, names, columns) in files {
        let path = dir.join(name);
        write_columns(create_output(&path, force)?, &names, &columns)?;
        written.push(path.display().to_string());
    }
    Ok(written)
}

struct Suite {
    name: &'static str,
    max_error: f64,
    tolerance: f64,
    detail: Value,
}

pub fn cmd_verify(
    cli: &Cli,
    spec: &str,
    h: f64,
    points: usize,
    fd_tol: f64,
) -> Result<(Value, Vec<String>)> {
    let input = load_json(spec)?;
    let petrov = if input.get("lambda").is_some() {
        Some(PetrovSolution::build(&parse_lambda(&input)?)?)
    } else {
        None
    };
    let s = match &petrov {
        Some(p) => p.structure(),
        None => parse_structure(&input)?,
    };
    if !(h > 0.0) || !(fd_tol > 0.0) || points == 0 {
        return Err(Error::Input(
            "need --h > 0, --fd-tol > 0 and --points >= 1".into(),
        ));
    }
    let scale = max_abs(s.algebra().matrix()).max(1.0).powi(2);
    let general = ricci_general(&s);
    let mut suites = vec![];

    suites.push(Suite {
        name: "closed_form_vs_general",
        max_error: max_abs_diff(&general, &ricci_closed_form(&s)),
        tolerance: cli.tol * scale,
        detail: Value::Null,
    });

    let res = symmetry_residuals(&s, &curvature(&s));
    suites.push(Suite {
        name: "curvature_symmetries",
        max_error: res.antisymmetry.max(res.skew_adjointness).max(res.bianchi),
        tolerance: cli.tol * scale,
        detail: to_value(&res),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let n = s.dim();
    let xs: Vec<Vec<f64>> = (0..points)
        .map(|_| (0..n).map(|_| rng.random_range(-0.5..0.5)).collect())
        .collect();
    let field = MetricField::from_structure(&s, h)?;
    let mut fd_errors = vec![];
    for x in &xs {
        fd_errors.push(compare_frames(&general, &ricci_fd(&field, x)?, x, &s));
    }
    let conv = convergence(&s, &general, &xs[0], h)?;
    suites.push(Suite {
        name: "finite_difference_oracle",
        max_error: fd_errors.iter().cloned().fold(0.0, f64::max),
        tolerance: fd_tol,
        detail: json!({ "h": h, "points": xs, "errors": fd_errors, "convergence": conv }),
    });

    if let Some(p) = &petrov {
        let mut worst = 0.0_f64;
        for x in &xs {
            let closed = p.metric_at(x)?;
            let general = s.coordinate_metric(x)?;
            worst = worst.max(max_abs_diff(&closed, &general) / max_abs(&closed).max(1.0));
        }
        suites.push(Suite {
            name: "petrov_metric_expansion",
            max_error: worst,
            tolerance: 1e-12,
            detail: Value::Null,
        });
        suites.push(Suite {
            name: "petrov_ricci_flat",
            max_error: max_abs(&general),
            tolerance: cli.tol * scale,
            detail: Value::Null,
        });
    }

    let mut failures = vec![];
    let suites_json: Vec<Value> = suites
        .iter()
        .map(|su| {
            let passed = su.max_error < su.tolerance;
            if !passed {
                failures.push(format!(
                    "{}: {:e} >= {:e}",
                    su.name, su.max_error, su.tolerance
                ));
            }
            json!({
                "name": su.name,
                "passed": passed,
                "max_error": su.max_error,
                "tolerance": su.tolerance,
                "detail": su.detail,
            })
        })
        .collect();
    let mut m = header(cli, "verify", input);
    m.insert("n".into(), json!(n));
    m.insert("metric".into(), json!(s.case()));
    m.insert("passed".into(), json!(failures.is_empty()));
    m.insert("suites".into(), Value::Array(suites_json));
    Ok((Value::Object(m), failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(args: &[&str]) -> (Result<()>, Value) {
        let mut buf = Vec::new();
        let mut full = vec!["aalg"];
        full.extend_from_slice(args);
        let r = run(full, &mut buf);
        let v = serde_json::from_slice(&buf).unwrap_or(Value::Null);
        (r, v)
    }

    #[test]
    fn ricci_petrov_spec() {
        let b = 3f64.sqrt() / 2.0;
        let spec = format!(
            r#"{{"n": 4, "metric": "b", "A": [[-0.5, {}, 0], [{b}, -0.5, 0], [0, 0, 1]]}}"#,
            -b
        );
        let (r, v) = run_json(&["ricci", "--spec", &spec]);
        r.unwrap();
        assert_eq!(v["ricci_flat"], json!(true));
        assert_eq!(v["flat"], json!(false));
        assert_eq!(v["classification"]["class"], json!("PetrovFamily"));
        assert_eq!(v["version"], json!(VERSION));
    }

    #[test]
    fn ricci_errors() {
        let (r, _) = run_json(&["ricci", "--spec", r#"{"n": 2, "metric": "a", "A": [[0]]}"#]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_json(&["ricci", "--spec", "{not json"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_json(&[
            "ricci",
            "--spec",
            r#"{"n": 4, "metric": "a", "A": [[0, 1], [1, 0]]}"#,
        ]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn petrov_reports() {
        let (r, v) = run_json(&["petrov", "--lambda", "1"]);
        r.unwrap();
        assert_eq!(v["alpha"], json!(-0.5));
        assert_eq!(v["isotropy"]["order"], json!(4));
        assert_eq!(v["classical_reduction"]["verified"], json!(true));

        let (_, v) = run_json(&["petrov", "--spec", r#"{"lambda": [1, -1]}"#]);
        assert_eq!(v["palindrome"], json!(true));
        assert_eq!(v["isotropy"]["label"], json!("Z₂×D₄"));

        let (_, v) = run_json(&["petrov", "--lambda", "1,1"]);
        assert_eq!(v["simply_transitive"], json!(false));
        assert_eq!(v["isotropy"], Value::Null);

        let (r, _) = run_json(&["petrov", "--lambda", "-1"]);
        assert_eq!(r.unwrap_err().exit_code(), 3);
    }

    #[test]
    fn ctc_sample_floor() {
        let (r, _) = run_json(&["ctc", "--lambda", "1", "--samples", "10"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
        let (r, _) = run_json(&["ctc", "--lambda", "0"]);
        assert_eq!(r.unwrap_err().exit_code(), 3);
    }

    #[test]
    fn bad_tolerance() {
        let (r, _) = run_json(&["--tol", "-1", "petrov", "--lambda", "1"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }
}
