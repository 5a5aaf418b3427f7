//! Configuration, bookkeeping and the shared driver loop of the DN and NN
//! iterations.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{fmt_f64, GridFunction, Mesh};
use crate::subdomain::Trace;

/// Initial interface trace.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceInit {
    Constant(f64),
    /// sin(kπx₂) along Γ; in 1D this is the constant 1.
    SineMode(usize),
    /// Uniform in [−1, 1], reproducible from the seed.
    Random { seed: u64 },
    Given(Trace),
}

impl TraceInit {
    pub fn build(&self, mesh: &Mesh) -> Result<Trace> {
        let t = match self {
            TraceInit::Constant(c) => Trace::constant(mesh, *c),
            TraceInit::SineMode(k) => Trace::sine_mode(mesh, *k),
            TraceInit::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Trace::new((0..Trace::len_for(mesh)).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            }
            TraceInit::Given(t) => {
                if t.len() != Trace::len_for(mesh) {
                    return Err(Error::MeshMismatch(format!(
                        "initial trace has {} values, interface has {}",
                        t.len(),
                        Trace::len_for(mesh)
                    )));
                }
                t.clone()
            }
        };
        if !t.is_finite() {
            return Err(Error::NonFinite { what: "initial trace" });
        }
        Ok(t)
    }
}

/// Parameters shared by the DN and NN iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationConfig {
    /// Relaxation parameter θ. Values outside (0, 1) run but are flagged.
    pub theta: f64,
    pub trace0: TraceInit,
    /// Stop once the sup-norm trace error drops to this level.
    pub tol: f64,
    pub max_iter: usize,
    /// A trace error above this aborts the run with a divergence verdict.
    pub divergence_guard: f64,
    /// DN only: put the Dirichlet solve on Ω₂ and the Neumann solve on Ω₁.
    pub swap: bool,
}

pub type DnConfig = IterationConfig;
pub type NnConfig = IterationConfig;

impl IterationConfig {
    pub fn new(theta: f64) -> Self {
        Self {
            theta,
            trace0: TraceInit::Constant(1.0),
            tol: 1e-10,
            max_iter: 50,
            divergence_guard: 1e8,
            swap: false,
        }
    }

    pub fn with_trace0(mut self, init: TraceInit) -> Self {
        self.trace0 = init;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn swapped(mut self) -> Self {
        self.swap = !self.swap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iter < 2 {
            return Err(Error::invalid("iters", format!("need at least 2, got {}", self.max_iter)));
        }
        if !(self.divergence_guard > self.tol) {
            return Err(Error::invalid("divergence_guard", "must exceed tol"));
        }
        Ok(())
    }

    /// Whether θ lies in the range (0, 1) covered by the convergence theory.
    pub fn theta_in_theory(&self) -> bool {
        self.theta > 0.0 && self.theta < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Diverged,
    MaxIter,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::Diverged => "diverged",
            Verdict::MaxIter => "max_iter",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Iteration index n ≥ 1.
    pub iter: usize,
    /// Sup-norm error of the trace entering iteration n.
    pub trace_err: f64,
    /// Trapezoid L² error of iteration n's subdomain solutions.
    pub subdomain_err: f64,
    /// `trace_err(n) / trace_err(n−1)`; absent for n = 1.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct IterationReport {
    pub theta: f64,
    pub theta_in_theory: bool,
    pub records: Vec<IterationRecord>,
    pub verdict: Verdict,
    /// Geometric mean of the last min(5, n−1) ratios.
    pub measured_rate: Option<f64>,
    /// Composite of the subdomain solutions from the last iteration.
    pub solution: GridFunction,
    /// The trace after the last update.
    pub final_trace: Trace,
}

impl IterationReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn trace_errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.trace_err).collect()
    }

    /// Trace error entering iteration `n` (1-based).
    pub fn trace_err_at(&self, n: usize) -> Option<f64> {
        self.records.get(n.checked_sub(1)?).map(|r| r.trace_err)
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.ratio).collect()
    }

    /// `iter,trace_err,ratio` rows followed by a `verdict,rate` record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,trace_err,ratio\n");
        for r in &self.records {
            let ratio = r.ratio.map(fmt_f64).unwrap_or_default();
            writeln!(out, "{},{},{}", r.iter, fmt_f64(r.trace_err), ratio).unwrap();
        }
        out.push_str("verdict,rate\n");
        let rate = self.measured_rate.map(fmt_f64).unwrap_or_default();
        writeln!(out, "{},{}", self.verdict, rate).unwrap();
        out
    }
}

pub(crate) fn geometric_mean_tail(ratios: &[f64], window: usize) -> Option<f64> {
    if ratios.is_empty() {
        return None;
    }
    let tail = &ratios[ratios.len().saturating_sub(window)..];
    if tail.contains(&0.0) {
        return Some(0.0);
    }
    let log_mean = tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64;
    Some(log_mean.exp())
}

/// Output of one iteration: the updated trace and the composite of the
/// subdomain solutions computed from the incoming trace.
pub(crate) struct StepOutcome {
    pub trace: Trace,
    pub solution: GridFunction,
}

/// Drives `step` from the configured initial trace until the trace error
/// meets `tol`, exceeds the divergence guard, or `max_iter` is reached.
pub(crate) fn drive(
    config: &IterationConfig,
    mesh: &Mesh,
    exact_trace: &Trace,
    reference: &GridFunction,
    mut step: impl FnMut(&Trace) -> Result<StepOutcome>,
) -> Result<IterationReport> {
    config.validate()?;
    let mut trace = config.trace0.build(mesh)?;
    let mut records: Vec<IterationRecord> = Vec::with_capacity(config.max_iter);
    let mut verdict = Verdict::MaxIter;
    let mut solution = GridFunction::zeros(*mesh);
    for n in 1..=config.max_iter {
        let trace_err = trace.sub(exact_trace).sup_norm();
        let ratio = records.last().map(|prev| trace_err / prev.trace_err);
        if !trace_err.is_finite() || trace_err > config.divergence_guard {
            records.push(IterationRecord {
                iter: n,
                trace_err,
                subdomain_err: f64::NAN,
                ratio,
            });
            verdict = Verdict::Diverged;
            break;
        }
        let outcome = step(&trace)?;
        let subdomain_err = outcome.solution.sub(reference)?.l2_norm();
        records.push(IterationRecord {
            iter: n,
            trace_err,
            subdomain_err,
            ratio,
        });
        solution = outcome.solution;
        if trace_err <= config.tol {
            verdict = Verdict::Converged;
            trace = outcome.trace;
            break;
        }
        trace = outcome.trace;
    }
    let ratios: Vec<f64> = records.iter().filter_map(|r| r.ratio).collect();
    let measured_rate = geometric_mean_tail(&ratios, 5);
    if verdict == Verdict::MaxIter {
        let first = records.first().map_or(0.0, |r| r.trace_err);
        let last = records.last().map_or(0.0, |r| r.trace_err);
        if measured_rate.is_some_and(|r| r > 1.0) && last > first {
            verdict = Verdict::Diverged;
        }
    }
    Ok(IterationReport {
        theta: config.theta,
        theta_in_theory: config.theta_in_theory(),
        records,
        verdict,
        measured_rate,
        solution,
        final_trace: trace,
    })
}
