//! Command-line front end: `solve`, `dn`, `nn`, `theory` and `sweep`.
//!
//! Every option may also come from a flat `key = value` config file
//! (`--config`), keyed by the long flag name without dashes (`nu`, `N`,
//! `scan-k`, ...). Flags override config entries. All output is CSV with
//! 17 significant digits, byte-identical for identical inputs.
//!
//! Exit status: 0 on success, 2 when a run ends with a divergence verdict,
//! 1 on usage or runtime errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::dn::{run_dn, run_dn_mode};
use crate::error::{Error, Result};
use crate::iteration::{IterationConfig, IterationReport, TraceInit, Verdict};
use crate::model::{
    fmt_f64, recover_control_h1, solve_monolithic_h1, solve_monolithic_l2_kkt, Decomposition, Dim, GridFunction,
    Mesh, Problem, Regularization, Target,
};
use crate::nn::{run_nn, run_nn_mode};
use crate::theory::{self, Frequency, Method, Symbol};

#[derive(Debug, Parser)]
#[command(name = "ddcontrol", version, about = "Domain decomposition for H⁻¹-regularized elliptic control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monolithic solve (H⁻¹ reduced equation or L² optimality system).
    Solve(Flags),
    /// Dirichlet-Neumann iteration.
    Dn(Flags),
    /// Neumann-Neumann iteration.
    Nn(Flags),
    /// Closed-form convergence factors and optimal relaxation parameters.
    Theory(Flags),
    /// Cross product of (nu, theta, m, N, method) runs, one summary row each.
    Sweep(Flags),
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// Regularization weight; `h2` sets ν = h². Lists `a,b,c` and ranges `a:b:step` in sweeps.
    #[arg(long)]
    nu: Option<String>,
    /// Cells per direction.
    #[arg(long = "N")]
    n: Option<String>,
    /// Interface node index, α = m/N.
    #[arg(long)]
    m: Option<String>,
    /// Interface position; must equal m/N.
    #[arg(long)]
    alpha: Option<String>,
    /// Relaxation parameter(s) or `optimal`.
    #[arg(long)]
    theta: Option<String>,
    /// dn, nn, or a list.
    #[arg(long)]
    method: Option<String>,
    /// l2 or h1.
    #[arg(long)]
    reg: Option<String>,
    /// 1 or 2.
    #[arg(long)]
    dim: Option<String>,
    /// Initial trace sin(kπx₂) on Γ.
    #[arg(long = "mode-k")]
    mode_k: Option<String>,
    /// Maximum number of iterations.
    #[arg(long)]
    iters: Option<String>,
    /// Stopping tolerance on the trace error.
    #[arg(long)]
    tol: Option<String>,
    /// const or random.
    #[arg(long)]
    trace0: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Largest frequency k of the factor scan.
    #[arg(long = "scan-k")]
    scan_k: Option<String>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<String>,
    /// Flat `key = value` file with defaults for any flag.
    #[arg(long)]
    config: Option<String>,
    /// Parallel sweep cells.
    #[arg(long)]
    jobs: Option<String>,
    /// zero, bump, sine, manufactured, or a CSV path.
    #[arg(long)]
    target: Option<String>,
    /// Constant κ, or `left,right` values on either side of the interface.
    #[arg(long)]
    kappa: Option<String>,
    /// solve output: state, control or adjoint.
    #[arg(long)]
    field: Option<String>,
    /// DN: Dirichlet solve on Ω₂ instead of Ω₁.
    #[arg(long)]
    swap: Option<String>,
}

const KEYS: &[&str] = &[
    "nu", "N", "m", "alpha", "theta", "method", "reg", "dim", "mode-k", "iters", "tol", "trace0", "seed", "scan-k",
    "out", "config", "jobs", "target", "kappa", "field", "swap",
];

impl Flags {
    fn into_map(self) -> BTreeMap<&'static str, String> {
        let pairs = [
            ("nu", self.nu),
            ("N", self.n),
            ("m", self.m),
            ("alpha", self.alpha),
            ("theta", self.theta),
            ("method", self.method),
            ("reg", self.reg),
            ("dim", self.dim),
            ("mode-k", self.mode_k),
            ("iters", self.iters),
            ("tol", self.tol),
            ("trace0", self.trace0),
            ("seed", self.seed),
            ("scan-k", self.scan_k),
            ("out", self.out),
            ("config", self.config),
            ("jobs", self.jobs),
            ("target", self.target),
            ("kappa", self.kappa),
            ("field", self.field),
            ("swap", self.swap),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Solve,
    Dn,
    Nn,
    Theory,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuSpec {
    Value(f64),
    /// ν = h² of the run's mesh.
    MeshSquared,
}

impl NuSpec {
    pub fn resolve(self, n_cells: usize) -> f64 {
        match self {
            NuSpec::Value(v) => v,
            NuSpec::MeshSquared => (1.0 / n_cells as f64).powi(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    Value(f64),
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterfaceSpec {
    Index(usize),
    Alpha(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Family(Target),
    Csv(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaSpec {
    Constant(f64),
    Split { left: f64, right: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    State,
    Control,
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trace0Spec {
    Constant,
    Random,
}

/// Fully resolved command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub subcommand: SubcommandKind,
    pub nu: Vec<NuSpec>,
    pub n_cells: Vec<usize>,
    pub interface: Vec<InterfaceSpec>,
    pub theta: Vec<ThetaSpec>,
    pub methods: Vec<Method>,
    pub reg: Regularization,
    pub dim: Dim,
    pub mode_k: Option<usize>,
    pub iters: usize,
    pub tol: f64,
    pub trace0: Trace0Spec,
    pub seed: u64,
    pub scan_k: Option<usize>,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub target: TargetSpec,
    pub kappa: KappaSpec,
    pub field: Field,
    pub swap: bool,
}

/// Parses the command line (program name first) into a [`RunSpec`].
pub fn parse_args<I, T>(argv: I) -> Result<RunSpec>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let key = e
            .get(clap::error::ContextKind::InvalidArg)
            .map(|v| v.to_string())
            .unwrap_or_else(|| "argv".into());
        let msg = e.to_string();
        let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
        Error::usage(key, first)
    })?;
    let (kind, flags) = match cli.command {
        Command::Solve(f) => (SubcommandKind::Solve, f),
        Command::Dn(f) => (SubcommandKind::Dn, f),
        Command::Nn(f) => (SubcommandKind::Nn, f),
        Command::Theory(f) => (SubcommandKind::Theory, f),
        Command::Sweep(f) => (SubcommandKind::Sweep, f),
    };
    let mut map = flags.into_map();
    if let Some(path) = map.get("config").cloned() {
        for (k, v) in read_config(Path::new(&path))? {
            map.entry(k).or_insert(v);
        }
    }
    resolve(kind, &map)
}

fn read_config(path: &Path) -> Result<Vec<(&'static str, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::usage("config", format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::usage("config", format!("line {}: expected `key = value`", lineno + 1)))?;
        let k = k.trim();
        let key = KEYS
            .iter()
            .find(|known| **known == k)
            .ok_or_else(|| Error::usage(k, "unknown key in config file"))?;
        if *key == "config" {
            return Err(Error::usage("config", "config files cannot include other config files"));
        }
        out.push((*key, v.trim().to_string()));
    }
    Ok(out)
}

fn parse_one<T: std::str::FromStr>(key: &str, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim()
        .parse::<T>()
        .map_err(|e| Error::usage(key, format!("malformed value {s:?}: {e}")))
}

/// Comma-separated values, each either a number or an inclusive range
/// `start:stop:step`.
fn parse_f64_list(key: &str, s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_one::<f64>(key, v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_one::<f64>(key, a)?, parse_one::<f64>(key, b)?, parse_one::<f64>(key, step)?);
                if !(step > 0.0) {
                    return Err(Error::usage(key, "range step must be positive"));
                }
                let count = ((b - a) / step + 1e-9).floor();
                if count >= 0.0 {
                    for i in 0..=(count as usize) {
                        out.push(a + i as f64 * step);
                    }
                }
            }
            _ => return Err(Error::usage(key, format!("malformed range {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(Error::usage(key, "empty range"));
    }
    Ok(out)
}

fn parse_usize_list(key: &str, s: &str) -> Result<Vec<usize>> {
    parse_f64_list(key, s)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::usage(key, format!("expected a nonnegative integer, got {v}")))
            }
        })
        .collect()
}

fn single<T: Clone>(key: &str, kind: SubcommandKind, v: Vec<T>) -> Result<Vec<T>> {
    if kind != SubcommandKind::Sweep && v.len() > 1 {
        return Err(Error::usage(key, "lists are only accepted by `sweep`"));
    }
    Ok(v)
}

fn resolve(kind: SubcommandKind, map: &BTreeMap<&'static str, String>) -> Result<RunSpec> {
    let get = |k: &str| map.get(k).map(String::as_str);

    let dim = match get("dim").unwrap_or("1") {
        "1" => Dim::One,
        "2" => Dim::Two,
        other => return Err(Error::usage("dim", format!("expected 1 or 2, got {other:?}"))),
    };

    let nu = match get("nu") {
        None => vec![NuSpec::Value(1.0)],
        Some(s) => {
            let mut v = Vec::new();
            for item in s.split(',').map(str::trim) {
                if item == "h2" {
                    v.push(NuSpec::MeshSquared);
                } else {
                    v.extend(parse_f64_list("nu", item)?.into_iter().map(NuSpec::Value));
                }
            }
            for n in &v {
                if let NuSpec::Value(x) = n {
                    if !(*x > 0.0 && x.is_finite()) {
                        return Err(Error::usage("nu", format!("must be positive, got {x}")));
                    }
                }
            }
            single("nu", kind, v)?
        }
    };

    let n_cells = single("N", kind, parse_usize_list("N", get("N").unwrap_or("99"))?)?;
    for &n in &n_cells {
        Mesh::new(dim, n).map_err(|e| Error::usage("N", e.to_string()))?;
    }

    let interface = match (get("m"), get("alpha")) {
        (Some(m), alpha) => {
            let ms = single("m", kind, parse_usize_list("m", m)?)?;
            if let Some(a) = alpha {
                let a = parse_one::<f64>("alpha", a)?;
                for &n in &n_cells {
                    for &m in &ms {
                        if (a - m as f64 / n as f64).abs() > 1e-12 {
                            return Err(Error::usage("alpha", format!("alpha = {a} differs from m/N = {m}/{n}")));
                        }
                    }
                }
            }
            ms.into_iter().map(InterfaceSpec::Index).collect()
        }
        (None, Some(a)) => single("alpha", kind, parse_f64_list("alpha", a)?)?
            .into_iter()
            .map(InterfaceSpec::Alpha)
            .collect(),
        (None, None) => vec![InterfaceSpec::Alpha(f64::NAN)],
    };
    // grid alignment is structural: check every (interface, N) pair up front
    for &n in &n_cells {
        for spec in &interface {
            decomposition_for(*spec, &Mesh::new(dim, n)?)?;
        }
    }

    let theta = match get("theta") {
        None => vec![ThetaSpec::Optimal],
        Some(s) => {
            let mut v = Vec::new();
            for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                if item == "optimal" {
                    v.push(ThetaSpec::Optimal);
                } else {
                    v.extend(parse_f64_list("theta", item)?.into_iter().map(ThetaSpec::Value));
                }
            }
            if v.is_empty() {
                return Err(Error::usage("theta", "empty range"));
            }
            v
        }
    };

    let methods = match (kind, get("method")) {
        (SubcommandKind::Dn, _) => vec![Method::Dn],
        (SubcommandKind::Nn, _) => vec![Method::Nn],
        (_, None) => vec![Method::Dn, Method::Nn],
        (_, Some(s)) => {
            let v: Vec<Method> = s
                .split(',')
                .map(|t| t.trim().parse::<Method>().map_err(|e| Error::usage("method", e.to_string())))
                .collect::<Result<_>>()?;
            v
        }
    };

    let reg = get("reg")
        .unwrap_or("h1")
        .parse::<Regularization>()
        .map_err(|e| Error::usage("reg", e.to_string()))?;

    let mode_k = get("mode-k").map(|s| parse_one::<usize>("mode-k", s)).transpose()?;
    let iters = parse_one::<usize>("iters", get("iters").unwrap_or("50"))?;
    if iters < 2 {
        return Err(Error::usage("iters", "need at least 2"));
    }
    let tol = parse_one::<f64>("tol", get("tol").unwrap_or("1e-10"))?;
    if !(tol > 0.0) {
        return Err(Error::usage("tol", "must be positive"));
    }
    let trace0 = match get("trace0").unwrap_or("const") {
        "const" => Trace0Spec::Constant,
        "random" => Trace0Spec::Random,
        other => return Err(Error::usage("trace0", format!("expected const or random, got {other:?}"))),
    };
    let seed = parse_one::<u64>("seed", get("seed").unwrap_or("0"))?;
    let scan_k = get("scan-k").map(|s| parse_one::<usize>("scan-k", s)).transpose()?;
    let out = get("out").map(PathBuf::from);
    let jobs = match get("jobs") {
        Some(s) => parse_one::<usize>("jobs", s)?.max(1),
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let target = match get("target").unwrap_or("zero") {
        s if s.ends_with(".csv") || s.contains('/') => TargetSpec::Csv(PathBuf::from(s)),
        s => TargetSpec::Family(s.parse::<Target>().map_err(|e| Error::usage("target", e.to_string()))?),
    };
    let kappa = match get("kappa") {
        None => KappaSpec::Constant(1.0),
        Some(s) => {
            let v: Vec<f64> = s.split(',').map(|t| parse_one::<f64>("kappa", t)).collect::<Result<_>>()?;
            if v.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
                return Err(Error::usage("kappa", "must be positive"));
            }
            match v.as_slice() {
                [c] => KappaSpec::Constant(*c),
                [l, r] => KappaSpec::Split { left: *l, right: *r },
                _ => return Err(Error::usage("kappa", "expected one value or `left,right`")),
            }
        }
    };
    let field = match get("field").unwrap_or("control") {
        "state" => Field::State,
        "control" => Field::Control,
        "adjoint" => Field::Adjoint,
        other => return Err(Error::usage("field", format!("expected state, control or adjoint, got {other:?}"))),
    };
    let swap = match get("swap").unwrap_or("false") {
        "true" | "1" | "yes" => true,
        "false" | "0" | "no" => false,
        other => return Err(Error::usage("swap", format!("expected true or false, got {other:?}"))),
    };

    Ok(RunSpec {
        subcommand: kind,
        nu,
        n_cells,
        interface,
        theta,
        methods,
        reg,
        dim,
        mode_k,
        iters,
        tol,
        trace0,
        seed,
        scan_k,
        out,
        jobs,
        target,
        kappa,
        field,
        swap,
    })
}

fn decomposition_for(spec: InterfaceSpec, mesh: &Mesh) -> Result<Decomposition> {
    let key = match spec {
        InterfaceSpec::Index(_) => "m",
        InterfaceSpec::Alpha(_) => "alpha",
    };
    let d = match spec {
        InterfaceSpec::Index(m) => Decomposition::new(mesh, m),
        // default interface: the node nearest to 1/3
        InterfaceSpec::Alpha(a) if a.is_nan() => {
            Decomposition::new(mesh, (mesh.n_cells() as f64 / 3.0).round() as usize)
        }
        InterfaceSpec::Alpha(a) => Decomposition::from_alpha(mesh, a),
    };
    d.map_err(|e| Error::usage(key, e.to_string()))
}

/// Result of [`run`]: the CSV text and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub exit_code: i32,
}

struct Setup {
    problem: Problem,
    decomposition: Decomposition,
}

fn build_problem(spec: &RunSpec, nu: NuSpec, n_cells: usize, interface: InterfaceSpec) -> Result<Setup> {
    let mesh = Mesh::new(spec.dim, n_cells)?;
    let decomposition = decomposition_for(interface, &mesh)?;
    let nu = nu.resolve(n_cells);
    let mut problem = Problem::new(mesh, nu)?;
    problem = match &spec.target {
        TargetSpec::Family(t) => problem.with_target_family(*t)?,
        TargetSpec::Csv(path) => {
            let g = GridFunction::read_csv(mesh, path)?;
            problem.with_target(g)?
        }
    };
    problem = match spec.kappa {
        KappaSpec::Constant(c) => problem.with_kappa_fn(|_, _| c)?,
        KappaSpec::Split { left, right } => {
            let alpha = decomposition.alpha();
            problem.with_kappa_fn(|x, _| if x < alpha { left } else { right })?
        }
    };
    Ok(Setup { problem, decomposition })
}

fn resolve_theta(theta: ThetaSpec, method: Method, nu: f64, alpha: f64, dim: Dim) -> f64 {
    match (theta, dim) {
        (ThetaSpec::Value(t), _) => t,
        (ThetaSpec::Optimal, Dim::One) => match method {
            Method::Dn => theory::theta_star_dn_1d(nu, alpha),
            Method::Nn => theory::theta_star_nn_1d(nu, alpha),
        },
        (ThetaSpec::Optimal, Dim::Two) => theory::theta_star_2d(method, nu, alpha).theta_star,
    }
}

fn iteration_config(spec: &RunSpec, theta: f64) -> IterationConfig {
    let init = match (spec.trace0, spec.mode_k) {
        (Trace0Spec::Random, _) => TraceInit::Random { seed: spec.seed },
        (Trace0Spec::Constant, Some(k)) => TraceInit::SineMode(k),
        (Trace0Spec::Constant, None) => TraceInit::Constant(1.0),
    };
    let mut c = IterationConfig::new(theta)
        .with_trace0(init)
        .with_tol(spec.tol)
        .with_max_iter(spec.iters);
    c.swap = spec.swap;
    c
}

fn run_method(method: Method, setup: &Setup, config: &IterationConfig) -> Result<IterationReport> {
    match method {
        Method::Dn => run_dn(&setup.problem, &setup.decomposition, config),
        Method::Nn => run_nn(&setup.problem, &setup.decomposition, config),
    }
}

/// Executes a resolved spec. The CSV is also written to `spec.out` when set.
pub fn run(spec: &RunSpec) -> Result<RunOutput> {
    let output = match spec.subcommand {
        SubcommandKind::Solve => run_solve(spec)?,
        SubcommandKind::Dn | SubcommandKind::Nn => run_iteration(spec)?,
        SubcommandKind::Theory => run_theory(spec)?,
        SubcommandKind::Sweep => run_sweep(spec)?,
    };
    if let Some(path) = &spec.out {
        std::fs::write(path, &output.csv)?;
    }
    Ok(output)
}

fn run_solve(spec: &RunSpec) -> Result<RunOutput> {
    let setup = build_problem(spec, spec.nu[0], spec.n_cells[0], spec.interface[0])?;
    let p = &setup.problem;
    let field = match spec.reg {
        Regularization::HMinus1 => {
            let y = solve_monolithic_h1(p)?;
            match spec.field {
                Field::State => y,
                Field::Control => recover_control_h1(p, &y)?,
                Field::Adjoint => {
                    return Err(Error::usage("field", "the H⁻¹ reduction has no adjoint variable"));
                }
            }
        }
        Regularization::L2 => {
            let s = solve_monolithic_l2_kkt(p).map_err(|e| match e {
                Error::UnsupportedDimension { .. } => Error::usage("reg", "the L² optimality system is 1D only"),
                other => other,
            })?;
            match spec.field {
                Field::State => s.state,
                Field::Control => s.control,
                Field::Adjoint => s.adjoint,
            }
        }
    };
    Ok(RunOutput {
        csv: field.to_csv(),
        exit_code: 0,
    })
}

fn header(method: Method, setup: &Setup, theta: f64) -> String {
    format!(
        "# method={},nu={},alpha={},N={},theta={}\n",
        method,
        fmt_f64(setup.problem.nu()),
        fmt_f64(setup.decomposition.alpha()),
        setup.problem.mesh().n_cells(),
        fmt_f64(theta)
    )
}

fn run_iteration(spec: &RunSpec) -> Result<RunOutput> {
    let method = spec.methods[0];
    let setup = build_problem(spec, spec.nu[0], spec.n_cells[0], spec.interface[0])?;
    let nu = setup.problem.nu();
    let alpha = setup.decomposition.alpha();
    let thetas: Vec<f64> = spec
        .theta
        .iter()
        .map(|t| resolve_theta(*t, method, nu, alpha, spec.dim))
        .collect();
    let reports: Vec<IterationReport> = thetas
        .iter()
        .map(|&t| run_method(method, &setup, &iteration_config(spec, t)))
        .collect::<Result<_>>()?;
    let diverged = reports.iter().any(|r| r.verdict == Verdict::Diverged);

    let mut csv = String::new();
    if reports.len() == 1 {
        csv.push_str(&header(method, &setup, thetas[0]));
        csv.push_str(&reports[0].to_csv());
    } else {
        writeln!(
            csv,
            "# method={},nu={},alpha={},N={}",
            method,
            fmt_f64(nu),
            fmt_f64(alpha),
            setup.problem.mesh().n_cells()
        )
        .unwrap();
        csv.push_str("iter");
        for t in &thetas {
            write!(csv, ",theta={}", fmt_f64(*t)).unwrap();
        }
        csv.push('\n');
        let rows = reports.iter().map(IterationReport::iterations).max().unwrap_or(0);
        for n in 1..=rows {
            write!(csv, "{n}").unwrap();
            for r in &reports {
                let cell = r.trace_err_at(n).map(fmt_f64).unwrap_or_default();
                write!(csv, ",{cell}").unwrap();
            }
            csv.push('\n');
        }
        csv.push_str("theta,verdict,rate\n");
        for (t, r) in thetas.iter().zip(&reports) {
            let rate = r.measured_rate.map(fmt_f64).unwrap_or_default();
            writeln!(csv, "{},{},{}", fmt_f64(*t), r.verdict, rate).unwrap();
        }
    }
    Ok(RunOutput {
        csv,
        exit_code: if diverged { 2 } else { 0 },
    })
}

fn run_theory(spec: &RunSpec) -> Result<RunOutput> {
    let mesh = Mesh::new(spec.dim, spec.n_cells[0])?;
    let decomposition = decomposition_for(spec.interface[0], &mesh)?;
    let alpha = decomposition.alpha();
    let nu = spec.nu[0].resolve(mesh.n_cells());
    let mut csv = String::new();
    let two_d = spec.dim == Dim::Two || spec.scan_k.is_some();
    if two_d {
        let k_scan = spec.scan_k.unwrap_or(40);
        for &method in &spec.methods {
            for &t in &spec.theta {
                let theta = resolve_theta(t, method, nu, alpha, Dim::Two);
                writeln!(csv, "# method={},nu={},alpha={},theta={}", method, fmt_f64(nu), fmt_f64(alpha), fmt_f64(theta))
                    .unwrap();
                csv.push_str("k,rho\n");
                for k in 0..=k_scan {
                    let r = theory::rho_2d(method, nu, alpha, theta, Frequency::Mode(k), Symbol::Continuum);
                    writeln!(csv, "{k},{}", fmt_f64(r)).unwrap();
                }
                let r = theory::rho_2d(method, nu, alpha, theta, Frequency::Limit, Symbol::Continuum);
                writeln!(csv, "limit,{}", fmt_f64(r)).unwrap();
            }
        }
        csv.push_str("method,nu,alpha,theta_star,sup_rho\n");
        for &method in &spec.methods {
            let e = theory::theta_star_2d(method, nu, alpha);
            writeln!(csv, "{},{},{},{},{}", method, fmt_f64(nu), fmt_f64(alpha), fmt_f64(e.theta_star), fmt_f64(e.sup_rho))
                .unwrap();
        }
    } else {
        csv.push_str("method,nu,alpha,theta,rho,theta_star\n");
        for &method in &spec.methods {
            let star = resolve_theta(ThetaSpec::Optimal, method, nu, alpha, Dim::One);
            for &t in &spec.theta {
                let theta = resolve_theta(t, method, nu, alpha, Dim::One);
                let rho = match method {
                    Method::Dn => theory::rho_dn_1d(nu, alpha, theta),
                    Method::Nn => theory::rho_nn_1d(nu, alpha, theta),
                };
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    method,
                    fmt_f64(nu),
                    fmt_f64(alpha),
                    fmt_f64(theta),
                    fmt_f64(rho),
                    fmt_f64(star)
                )
                .unwrap();
            }
        }
    }
    Ok(RunOutput { csv, exit_code: 0 })
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub nu: f64,
    pub alpha: f64,
    pub theta: f64,
    pub method: Method,
    pub verdict: Verdict,
    pub measured_rate: Option<f64>,
    pub predicted_rate: f64,
}

/// Predicted per-iteration factor: the 1D closed form, or in 2D the
/// supremum over frequencies.
pub fn predicted_rate(method: Method, nu: f64, alpha: f64, theta: f64, dim: Dim) -> f64 {
    match (dim, method) {
        (Dim::One, Method::Dn) => theory::rho_dn_1d(nu, alpha, theta),
        (Dim::One, Method::Nn) => theory::rho_nn_1d(nu, alpha, theta),
        (Dim::Two, _) => theory::sup_rho_2d(method, nu, alpha, theta, theory::DEFAULT_K_SCAN, Symbol::Continuum).sup,
    }
}

/// Runs the (nu, theta, interface, N, method) cross product, concurrently up
/// to `spec.jobs`, returning rows in cross-product order.
pub fn sweep(spec: &RunSpec) -> Result<Vec<SweepRow>> {
    let mut cells = Vec::new();
    for &nu in &spec.nu {
        for &theta in &spec.theta {
            for &iface in &spec.interface {
                for &n in &spec.n_cells {
                    for &method in &spec.methods {
                        cells.push((nu, theta, iface, n, method));
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::usage("jobs", e.to_string()))?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|&(nu, theta, iface, n, method)| {
                let setup = build_problem(spec, nu, n, iface)?;
                let nu = setup.problem.nu();
                let alpha = setup.decomposition.alpha();
                let theta = resolve_theta(theta, method, nu, alpha, spec.dim);
                let report = match spec.mode_k {
                    // single frequency of the square problem, measured on the line
                    Some(k) if spec.dim == Dim::Two && spec.trace0 == Trace0Spec::Constant => {
                        let config = iteration_config(spec, theta).with_trace0(TraceInit::Constant(1.0));
                        let m = setup.decomposition.interface_index();
                        match method {
                            Method::Dn => run_dn_mode(nu, n, m, k, &config)?,
                            Method::Nn => run_nn_mode(nu, n, m, k, &config)?,
                        }
                    }
                    _ => run_method(method, &setup, &iteration_config(spec, theta))?,
                };
                let predicted = match (spec.mode_k, spec.dim) {
                    (Some(k), Dim::Two) => theory::rho_2d(method, nu, alpha, theta, Frequency::Mode(k), Symbol::Continuum),
                    _ => predicted_rate(method, nu, alpha, theta, spec.dim),
                };
                Ok(SweepRow {
                    nu,
                    alpha,
                    theta,
                    method,
                    verdict: report.verdict,
                    measured_rate: report.measured_rate,
                    predicted_rate: predicted,
                })
            })
            .collect()
    })
}

fn run_sweep(spec: &RunSpec) -> Result<RunOutput> {
    let rows = sweep(spec)?;
    let mut csv = String::from("nu,alpha,theta,method,verdict,measured_rate,predicted_rate\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.nu),
            fmt_f64(r.alpha),
            fmt_f64(r.theta),
            r.method,
            r.verdict,
            r.measured_rate.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.predicted_rate)
        )
        .unwrap();
    }
    Ok(RunOutput { csv, exit_code: 0 })
}

/// Entry point of the `ddcontrol` binary; returns the process exit status.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    // help and version go through clap's own printer
    if let Err(e) = Cli::try_parse_from(&argv) {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            let _ = e.print();
            return 0;
        }
    }
    let spec = match parse_args(argv) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match run(&spec) {
        Ok(out) => {
            if spec.out.is_none() {
                print!("{}", out.csv);
            }
            out.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunSpec> {
        parse_args(std::iter::once("ddcontrol").chain(args.split_whitespace()))
    }

    #[test]
    fn rejects_unaligned_alpha() {
        let err = parse("dn --nu 1 --alpha 0.3333333333 --N 100").unwrap_err();
        assert!(matches!(&err, Error::Usage { key, .. } if key == "alpha"), "{err}");
        assert!(err.to_string().contains("not grid-aligned"));
    }

    #[test]
    fn unknown_flag_names_the_key() {
        let err = parse("dn --bogus 3").unwrap_err();
        assert!(err.to_string().contains("--bogus"), "{err}");
    }

    #[test]
    fn malformed_value_names_the_key() {
        let err = parse("dn --tol abc").unwrap_err();
        assert!(matches!(&err, Error::Usage { key, .. } if key == "tol"));
    }

    #[test]
    fn optimal_theta_resolves() {
        let spec = parse("dn --nu 1 --N 99 --m 33 --theta optimal").unwrap();
        assert_eq!(spec.theta, vec![ThetaSpec::Optimal]);
        let out = run(&spec).unwrap();
        let first = out.csv.lines().next().unwrap();
        assert!(first.contains("theta=3.5553939227913"), "{first}");
    }

    #[test]
    fn ranges_expand_inclusively() {
        let v = parse_f64_list("theta", "0.1:0.9:0.1").unwrap();
        assert_eq!(v.len(), 9);
        assert!((v[8] - 0.9).abs() < 1e-12);
        assert!(parse_f64_list("theta", "0.9:0.1:0.1").is_err());
        assert!(parse_f64_list("theta", "").is_err());
    }

    #[test]
    fn lists_only_in_sweep() {
        assert!(parse("dn --nu 1,2").is_err());
        assert!(parse("sweep --nu 1,2").is_ok());
    }

    #[test]
    fn h2_token() {
        let spec = parse("sweep --nu h2 --N 20").unwrap();
        assert_eq!(spec.nu, vec![NuSpec::MeshSquared]);
        assert!((spec.nu[0].resolve(20) - 0.0025).abs() < 1e-18);
    }
}
