//! The control problem, its grids, and the monolithic solvers used as
//! reference solutions for the decomposition methods.

mod cost;
mod grid;
mod kkt;
mod mesh;
mod monolithic;
mod problem;

pub use cost::{cost, hminus1_norm_sq, recover_control_h1, Regularization};
pub use grid::{fmt_f64, GridFunction};
pub use kkt::{kkt_residual, solve_monolithic_l2_kkt, L2Solution};
pub use mesh::{Decomposition, Dim, Mesh, MIN_CELLS};
pub use monolithic::{h1_residual, neg_div_kappa_grad, solve_monolithic_h1, solve_state};
pub use problem::{Problem, Target};
