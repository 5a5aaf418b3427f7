//! Relaxed Dirichlet-Neumann iteration.
//!
//! Each sweep solves a Dirichlet problem on Ω₁ with the current trace, hands
//! its interface flux to a Neumann problem on Ω₂, and relaxes
//! `trace ← (1−θ)·trace + θ·e₂(α)`. With `swap` the roles of Ω₁ and Ω₂ are
//! exchanged, which is the mirror image α ↦ 1−α.

use crate::error::{Error, Result};
use crate::iteration::{drive, DnConfig, IterationReport, StepOutcome};
use crate::model::{solve_monolithic_h1, Decomposition, Dim, GridFunction, Mesh, Problem};
use crate::subdomain::{
    variational_flux, InterfaceKind, Side, SubdomainSolution, SubdomainSolver, Trace,
};
use crate::theory::{self, Symbol};

/// Output of a single DN sweep.
#[derive(Debug, Clone)]
pub struct DnStep {
    pub trace: Trace,
    pub dirichlet: SubdomainSolution,
    pub neumann: SubdomainSolution,
}

impl DnStep {
    /// Left and right solutions glued at Γ; the interface column is taken from
    /// the Dirichlet solve.
    pub fn composite(&self) -> GridFunction {
        let mut g = self.neumann.to_grid_function();
        let d = self.dirichlet.to_grid_function();
        let ny = g.mesh().column_len();
        for i in self.dirichlet.columns() {
            g.values_mut()[i * ny..(i + 1) * ny].copy_from_slice(&d.values()[i * ny..(i + 1) * ny]);
        }
        g
    }
}

/// Factored subdomain operators for repeated DN sweeps.
pub struct DnSolver<'a> {
    problem: &'a Problem,
    decomposition: Decomposition,
    dirichlet: SubdomainSolver<'a>,
    neumann: SubdomainSolver<'a>,
}

impl<'a> DnSolver<'a> {
    pub fn new(problem: &'a Problem, decomposition: &Decomposition, swap: bool) -> Result<Self> {
        let dirichlet_side = if swap { Side::Right } else { Side::Left };
        Ok(Self {
            problem,
            decomposition: *decomposition,
            dirichlet: SubdomainSolver::new(problem, decomposition, dirichlet_side, InterfaceKind::Dirichlet)?,
            neumann: SubdomainSolver::new(
                problem,
                decomposition,
                dirichlet_side.opposite(),
                InterfaceKind::Neumann,
            )?,
        })
    }

    pub fn step(&self, trace: &Trace, theta: f64, rhs: &GridFunction) -> Result<DnStep> {
        if !trace.is_finite() {
            return Err(Error::NonFinite { what: "trace" });
        }
        let dirichlet = self.dirichlet.solve(trace, rhs)?;
        let flux = variational_flux(
            self.problem,
            &self.decomposition,
            self.dirichlet.side(),
            &dirichlet,
            rhs,
        )?;
        // continuity of the co-normal derivative: outward normals are opposite
        let neumann = self.neumann.solve(&flux.scaled(-1.0), rhs)?;
        let relaxed = trace.scaled(1.0 - theta).axpy(theta, &neumann.interface_trace());
        Ok(DnStep {
            trace: relaxed,
            dirichlet,
            neumann,
        })
    }
}

/// One DN sweep from `trace` with volume forcing `rhs`.
pub fn dn_step(
    problem: &Problem,
    decomposition: &Decomposition,
    trace: &Trace,
    config: &DnConfig,
    rhs: &GridFunction,
) -> Result<DnStep> {
    DnSolver::new(problem, decomposition, config.swap)?.step(trace, config.theta, rhs)
}

/// Iterates DN sweeps on the problem with forcing ŷ, measuring errors
/// against the monolithic solution (ŷ = 0 gives the error iteration).
pub fn run_dn(problem: &Problem, decomposition: &Decomposition, config: &DnConfig) -> Result<IterationReport> {
    let solver = DnSolver::new(problem, decomposition, config.swap)?;
    let reference = solve_monolithic_h1(problem)?;
    let exact = Trace::from_grid(&reference, decomposition);
    let rhs = problem.target().clone();
    drive(config, problem.mesh(), &exact, &reference, |t| {
        let s = solver.step(t, config.theta, &rhs)?;
        Ok(StepOutcome {
            solution: s.composite(),
            trace: s.trace,
        })
    })
}

fn require_2d(problem: &Problem) -> Result<()> {
    match problem.mesh().dim() {
        Dim::Two => Ok(()),
        Dim::One => Err(Error::UnsupportedDimension {
            dim: 1,
            what: "2D driver called on a 1D problem",
        }),
    }
}

/// [`dn_step`] on the unit square; the trace is the column of interior Γ values.
pub fn dn_step_2d(
    problem: &Problem,
    decomposition: &Decomposition,
    trace: &Trace,
    config: &DnConfig,
    rhs: &GridFunction,
) -> Result<DnStep> {
    require_2d(problem)?;
    dn_step(problem, decomposition, trace, config, rhs)
}

/// [`run_dn`] on the unit square. Use `TraceInit::SineMode(k)` to measure
/// the contraction of a single x₂ frequency.
pub fn run_dn_2d(problem: &Problem, decomposition: &Decomposition, config: &DnConfig) -> Result<IterationReport> {
    require_2d(problem)?;
    run_dn(problem, decomposition, config)
}

/// Error iteration for a single x₂ frequency k of the square problem with
/// κ = 1, carried out on the x₁ line: the discrete sine transform in x₂
/// turns the square operator into one line problem per frequency with weight
/// ν/(1 + ν·λ_k). This is the only way to observe k = 0, which has no
/// nonzero sine mode on the grid.
pub fn run_dn_mode(
    nu: f64,
    n_cells: usize,
    interface_index: usize,
    k: usize,
    config: &DnConfig,
) -> Result<IterationReport> {
    let (problem, decomposition) = mode_problem(nu, n_cells, interface_index, k)?;
    run_dn(&problem, &decomposition, config)
}

pub(crate) fn mode_problem(
    nu: f64,
    n_cells: usize,
    interface_index: usize,
    k: usize,
) -> Result<(Problem, Decomposition)> {
    let mesh = Mesh::line(n_cells)?;
    let reduced = theory::reduced_nu(nu, k, Symbol::Discrete { n_cells });
    let problem = Problem::new(mesh, reduced)?;
    let decomposition = Decomposition::new(&mesh, interface_index)?;
    Ok((problem, decomposition))
}
