use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::grid::GridFunction;
use super::mesh::{Dim, Mesh};
use crate::error::{Error, Result};

/// Built-in target states ŷ, sampled at the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Zero,
    /// x(1−x) in 1D, x₁(1−x₁)x₂(1−x₂) in 2D.
    Bump,
    /// sin(πx) in 1D, sin(πx₁)sin(πx₂) in 2D.
    Sine,
    /// Scaled sine whose continuum H⁻¹ state is exactly the unscaled sine:
    /// (νπ²+1)·sin(πx) in 1D and (2νπ²+1)·sin(πx₁)sin(πx₂) in 2D.
    Manufactured,
}

impl Target {
    pub fn sample(self, mesh: Mesh, nu: f64) -> GridFunction {
        let two_d = mesh.dim() == Dim::Two;
        let shape = move |x1: f64, x2: f64, f: fn(f64) -> f64| {
            if two_d {
                f(x1) * f(x2)
            } else {
                f(x1)
            }
        };
        match self {
            Target::Zero => GridFunction::zeros(mesh),
            Target::Bump => GridFunction::from_fn(mesh, move |a, b| shape(a, b, |x| x * (1.0 - x))),
            Target::Sine => GridFunction::from_fn(mesh, move |a, b| shape(a, b, |x| (PI * x).sin())),
            Target::Manufactured => {
                let scale = mesh.dim().as_usize() as f64 * nu * PI * PI + 1.0;
                GridFunction::from_fn(mesh, move |a, b| scale * shape(a, b, |x| (PI * x).sin()))
            }
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Target::Zero),
            "bump" => Ok(Target::Bump),
            "sine" => Ok(Target::Sine),
            "manufactured" => Ok(Target::Manufactured),
            other => Err(Error::invalid(
                "target",
                format!("unknown target family {other:?}"),
            )),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Zero => "zero",
            Target::Bump => "bump",
            Target::Sine => "sine",
            Target::Manufactured => "manufactured",
        })
    }
}

/// The continuous control problem on a concrete grid: regularization weight
/// ν, cellwise conductivity κ and target state ŷ.
#[derive(Debug, Clone)]
pub struct Problem {
    mesh: Mesh,
    nu: f64,
    kappa: Vec<f64>,
    target: GridFunction,
}

impl Problem {
    /// κ ≡ 1 and ŷ ≡ 0.
    pub fn new(mesh: Mesh, nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::invalid("nu", format!("must be positive and finite, got {nu}")));
        }
        Ok(Self {
            mesh,
            nu,
            kappa: vec![1.0; mesh.num_cells()],
            target: GridFunction::zeros(mesh),
        })
    }

    pub fn with_target(mut self, target: GridFunction) -> Result<Self> {
        target.same_mesh(&GridFunction::zeros(self.mesh))?;
        if !target.is_finite() {
            return Err(Error::NonFinite { what: "target state" });
        }
        self.target = target;
        Ok(self)
    }

    pub fn with_target_family(self, target: Target) -> Result<Self> {
        let sampled = target.sample(self.mesh, self.nu);
        self.with_target(sampled)
    }

    /// Cellwise conductivity, indexed by [`Mesh::cell`].
    pub fn with_kappa(mut self, kappa: Vec<f64>) -> Result<Self> {
        if kappa.len() != self.mesh.num_cells() {
            return Err(Error::MeshMismatch(format!(
                "{} conductivity values for {} cells",
                kappa.len(),
                self.mesh.num_cells()
            )));
        }
        if let Some(bad) = kappa.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(Error::invalid("kappa", format!("must be positive, got {bad}")));
        }
        self.kappa = kappa;
        Ok(self)
    }

    /// Conductivity evaluated at cell centres.
    pub fn with_kappa_fn(self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mesh = self.mesh;
        let (ni, nj) = match mesh.dim() {
            Dim::One => (mesh.n_cells(), 1),
            Dim::Two => (mesh.n_cells(), mesh.n_cells()),
        };
        let mut kappa = vec![0.0; mesh.num_cells()];
        for i in 0..ni {
            for j in 0..nj {
                let (x1, x2) = mesh.cell_center(i, j);
                kappa[mesh.cell(i, j)] = f(x1, x2);
            }
        }
        self.with_kappa(kappa)
    }

    /// Same grid and κ, with ŷ replaced by zero: the setting of the error
    /// equations.
    pub fn homogeneous(&self) -> Self {
        Self {
            target: GridFunction::zeros(self.mesh),
            ..self.clone()
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn kappa_at(&self, i: usize, j: usize) -> f64 {
        self.kappa[self.mesh.cell(i, j)]
    }

    pub fn target(&self) -> &GridFunction {
        &self.target
    }

    pub fn has_unit_kappa(&self) -> bool {
        self.kappa.iter().all(|&k| k == 1.0)
    }
}
