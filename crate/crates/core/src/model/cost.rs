use std::fmt;
use std::str::FromStr;

use crate::assembly::{Region, Scaling};
use crate::error::{Error, Result};
use crate::model::monolithic::solve_state;
use crate::model::{GridFunction, Problem};

/// Norm used to penalize the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularization {
    L2,
    /// Energy norm ‖u‖²_{H⁻¹} = ‖√κ∇w‖², −div(κ∇w) = u.
    HMinus1,
}

impl FromStr for Regularization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" | "L2" => Ok(Self::L2),
            "h1" | "hminus1" | "H-1" => Ok(Self::HMinus1),
            other => Err(Error::invalid(
                "reg",
                format!("unknown regularization {other:?} (expected l2 or h1)"),
            )),
        }
    }
}

impl fmt::Display for Regularization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::L2 => "l2",
            Self::HMinus1 => "h1",
        })
    }
}

/// Control of the energy-regularized problem, u = (ŷ − y)/ν.
pub fn recover_control_h1(problem: &Problem, y: &GridFunction) -> Result<GridFunction> {
    let misfit = problem.target().sub(y)?;
    let nu = problem.nu();
    let values = misfit.values().iter().map(|v| v / nu).collect();
    GridFunction::from_values(*problem.mesh(), values)
}

/// Discrete energy norm squared: wᵀKw with K w = M u.
pub fn hminus1_norm_sq(problem: &Problem, control: &GridFunction) -> Result<f64> {
    let w = solve_state(problem, control)?;
    let region = Region::whole(*problem.mesh());
    let kw = region.apply(problem, Scaling::state(), w.values());
    Ok(w.values().iter().zip(&kw).map(|(a, b)| a * b).sum())
}

/// ½‖y − ŷ‖² + (ν/2)‖u‖² with trapezoid quadrature and the chosen control norm.
pub fn cost(
    problem: &Problem,
    y: &GridFunction,
    u: &GridFunction,
    mode: Regularization,
) -> Result<f64> {
    let misfit = y.sub(problem.target())?;
    u.same_mesh(y)?;
    let control = match mode {
        Regularization::L2 => u.inner(u),
        Regularization::HMinus1 => hminus1_norm_sq(problem, u)?,
    };
    Ok(0.5 * misfit.inner(&misfit) + 0.5 * problem.nu() * control)
}
