//! Neumann-Neumann iteration: Dirichlet solves on both sides from a common
//! trace, Neumann corrections driven by the flux jump, then
//! `trace ← trace − θ·(ψ₁(α) + ψ₂(α))`.

use crate::error::{Error, Result};
use crate::iteration::{drive, IterationReport, NnConfig, StepOutcome};
use crate::model::{solve_monolithic_h1, Decomposition, Dim, GridFunction, Problem};
use crate::subdomain::{
    variational_flux, InterfaceKind, Side, SubdomainSolution, SubdomainSolver, Trace,
};

#[derive(Debug, Clone)]
pub struct NnStep {
    pub trace: Trace,
    /// e₁, e₂
    pub dirichlet: [SubdomainSolution; 2],
    /// ψ₁, ψ₂
    pub corrections: [SubdomainSolution; 2],
    /// Sum of the two outward fluxes of the Dirichlet solutions.
    pub flux_jump: Trace,
}

impl NnStep {
    pub fn composite(&self) -> GridFunction {
        let mut g = self.dirichlet[1].to_grid_function();
        let left = self.dirichlet[0].to_grid_function();
        let ny = g.mesh().column_len();
        for i in self.dirichlet[0].columns() {
            g.values_mut()[i * ny..(i + 1) * ny].copy_from_slice(&left.values()[i * ny..(i + 1) * ny]);
        }
        g
    }
}

pub struct NnSolver<'a> {
    problem: &'a Problem,
    decomposition: Decomposition,
    dirichlet: [SubdomainSolver<'a>; 2],
    neumann: [SubdomainSolver<'a>; 2],
    zero: GridFunction,
}

impl<'a> NnSolver<'a> {
    pub fn new(problem: &'a Problem, decomposition: &Decomposition) -> Result<Self> {
        let make = |side, kind| SubdomainSolver::new(problem, decomposition, side, kind);
        Ok(Self {
            problem,
            decomposition: *decomposition,
            dirichlet: [
                make(Side::Left, InterfaceKind::Dirichlet)?,
                make(Side::Right, InterfaceKind::Dirichlet)?,
            ],
            neumann: [
                make(Side::Left, InterfaceKind::Neumann)?,
                make(Side::Right, InterfaceKind::Neumann)?,
            ],
            zero: GridFunction::zeros(*problem.mesh()),
        })
    }

    pub fn step(&self, trace: &Trace, theta: f64, rhs: &GridFunction) -> Result<NnStep> {
        if !trace.is_finite() {
            return Err(Error::NonFinite { what: "trace" });
        }
        let solve_side = |k: usize| -> Result<(SubdomainSolution, Trace)> {
            let e = self.dirichlet[k].solve(trace, rhs)?;
            let g = variational_flux(self.problem, &self.decomposition, self.dirichlet[k].side(), &e, rhs)?;
            Ok((e, g))
        };
        let (left, right) = rayon::join(|| solve_side(0), || solve_side(1));
        let ((e1, g1), (e2, g2)) = (left?, right?);
        let jump = g1.axpy(1.0, &g2);

        // the correction equations carry no volume forcing
        let (psi1, psi2) = rayon::join(
            || self.neumann[0].solve(&jump, &self.zero),
            || self.neumann[1].solve(&jump, &self.zero),
        );
        let (psi1, psi2) = (psi1?, psi2?);
        let correction = psi1.interface_trace().axpy(1.0, &psi2.interface_trace());
        Ok(NnStep {
            trace: trace.axpy(-theta, &correction),
            dirichlet: [e1, e2],
            corrections: [psi1, psi2],
            flux_jump: jump,
        })
    }
}

pub fn nn_step(
    problem: &Problem,
    decomposition: &Decomposition,
    trace: &Trace,
    config: &NnConfig,
    rhs: &GridFunction,
) -> Result<NnStep> {
    NnSolver::new(problem, decomposition)?.step(trace, config.theta, rhs)
}

pub fn run_nn(problem: &Problem, decomposition: &Decomposition, config: &NnConfig) -> Result<IterationReport> {
    let solver = NnSolver::new(problem, decomposition)?;
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

pub fn run_nn_2d(problem: &Problem, decomposition: &Decomposition, config: &NnConfig) -> Result<IterationReport> {
    if problem.mesh().dim() != Dim::Two {
        return Err(Error::UnsupportedDimension {
            dim: 1,
            what: "2D driver called on a 1D problem",
        });
    }
    run_nn(problem, decomposition, config)
}

/// Single-frequency NN error iteration on the x₁ line; see
/// [`crate::dn::run_dn_mode`].
pub fn run_nn_mode(
    nu: f64,
    n_cells: usize,
    interface_index: usize,
    k: usize,
    config: &NnConfig,
) -> Result<IterationReport> {
    let (problem, decomposition) = crate::dn::mode_problem(nu, n_cells, interface_index, k)?;
    run_nn(&problem, &decomposition, config)
}
