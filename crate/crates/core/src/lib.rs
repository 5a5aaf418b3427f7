//! Domain decomposition for elliptic optimal control with energy-norm
//! (H⁻¹) regularization.
//!
//! Penalizing the control in the energy norm collapses the optimality system
//! of
//!
//! ```text
//! min ½‖y − ŷ‖² + (ν/2)‖u‖²   subject to   −div(κ∇y) = u,  y = 0 on ∂Ω
//! ```
//!
//! to a single singularly perturbed equation −ν·div(κ∇y) + y = ŷ, with the
//! control recovered as u = (ŷ − y)/ν. This crate solves that equation with
//! two-subdomain Dirichlet-Neumann ([`dn`]) and Neumann-Neumann ([`nn`])
//! iterations on the unit interval and the unit square, and evaluates the
//! closed-form convergence factors and optimal relaxation parameters of both
//! methods ([`theory`]).
//!
//! The monolithic solvers in [`model`] (including the L²-regularized
//! optimality system for comparison) serve as reference solutions, and
//! [`cli`] drives reproducible CSV experiments.
//!
//! ```
//! use ddcontrol::{dn, iteration::DnConfig, model::{Decomposition, Mesh, Problem}, theory};
//!
//! let mesh = Mesh::line(300).unwrap();
//! let problem = Problem::new(mesh, 1.0).unwrap();
//! let split = Decomposition::new(&mesh, 100).unwrap(); // α = 1/3
//! let theta = theory::theta_star_dn_1d(1.0, split.alpha());
//! let report = dn::run_dn(&problem, &split, &DnConfig::new(theta)).unwrap();
//! assert!(report.trace_err_at(2).unwrap() < 1e-6);
//! ```

mod assembly;
pub mod cli;
pub mod dn;
pub mod error;
pub mod iteration;
pub mod linalg;
pub mod model;
pub mod nn;
pub mod subdomain;
pub mod theory;

pub use error::{Error, Result};
