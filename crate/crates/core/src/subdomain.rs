//! Subdomain boundary-value problems of the two-subdomain iterations.
//!
//! The interface flux is the subdomain's half of the monolithic stencil row
//! at the interface nodes (see [`variational_flux`]). With that choice the
//! fixed point of every iteration built on these solves is the monolithic
//! discrete solution, not just an O(h) approximation of it.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::assembly::{Edge, Factored, Region, Scaling};
use crate::error::{Error, Result};
use crate::model::{Decomposition, Dim, GridFunction, Mesh, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Ω₁ = (0, α)
    Left,
    /// Ω₂ = (α, 1)
    Right,
}

impl Side {
    pub fn opposite(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values on the interior interface nodes: one scalar in 1D, N−1 values
/// along Γ in 2D (the endpoints of Γ lie on ∂Ω and stay 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Trace(Vec<f64>);

impl Trace {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(mesh: &Mesh) -> Self {
        Self(vec![0.0; Self::len_for(mesh)])
    }

    pub fn constant(mesh: &Mesh, value: f64) -> Self {
        Self(vec![value; Self::len_for(mesh)])
    }

    /// sin(kπx₂) sampled at the interior interface nodes (1 in 1D).
    pub fn sine_mode(mesh: &Mesh, k: usize) -> Self {
        match mesh.dim() {
            Dim::One => Self(vec![1.0]),
            Dim::Two => {
                let h = mesh.h();
                Self(
                    mesh.free_rows()
                        .map(|j| (k as f64 * std::f64::consts::PI * j as f64 * h).sin())
                        .collect(),
                )
            }
        }
    }

    pub fn len_for(mesh: &Mesh) -> usize {
        mesh.free_rows().len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|v| s * v).collect())
    }

    /// `self + s·other`
    pub fn axpy(&self, s: f64, other: &Trace) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn sub(&self, other: &Trace) -> Self {
        self.axpy(-1.0, other)
    }

    /// Restriction of a grid function to the interface column.
    pub fn from_grid(g: &GridFunction, decomposition: &Decomposition) -> Self {
        let m = decomposition.interface_index();
        Self(g.mesh().free_rows().map(|j| g.at(m, j)).collect())
    }
}

impl Index<usize> for Trace {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Trace {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceKind {
    /// Interface values prescribed.
    Dirichlet,
    /// Outward co-normal flux ν·κ·∂ₙe prescribed through the half-row equation.
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceBc {
    pub kind: InterfaceKind,
    pub data: Trace,
}

impl InterfaceBc {
    pub fn dirichlet(data: Trace) -> Self {
        Self {
            kind: InterfaceKind::Dirichlet,
            data,
        }
    }

    pub fn neumann(data: Trace) -> Self {
        Self {
            kind: InterfaceKind::Neumann,
            data,
        }
    }
}

/// Solution on one subdomain's closure, columns `first..=last`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainSolution {
    side: Side,
    mesh: Mesh,
    first: usize,
    last: usize,
    values: Vec<f64>,
}

impl SubdomainSolution {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn columns(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at global node `(i, j)`; `i` must lie in [`Self::columns`].
    pub fn at(&self, i: usize, j: usize) -> f64 {
        assert!((self.first..=self.last).contains(&i), "column {i} outside subdomain");
        self.values[(i - self.first) * self.mesh.column_len() + j]
    }

    pub fn interface_trace(&self) -> Trace {
        let m = match self.side {
            Side::Left => self.last,
            Side::Right => self.first,
        };
        Trace(self.mesh.free_rows().map(|j| self.at(m, j)).collect())
    }

    /// Embeds the solution into a full-grid function, zero elsewhere.
    pub fn to_grid_function(&self) -> GridFunction {
        let mut g = GridFunction::zeros(self.mesh);
        let ny = self.mesh.column_len();
        g.values_mut()[self.first * ny..(self.last + 1) * ny].copy_from_slice(&self.values);
        g
    }
}

fn region_for(mesh: Mesh, decomposition: &Decomposition, side: Side, kind: InterfaceKind) -> Region {
    let interface = match kind {
        InterfaceKind::Dirichlet => Edge::Dirichlet,
        InterfaceKind::Neumann => Edge::Neumann,
    };
    let m = decomposition.interface_index();
    match side {
        Side::Left => Region {
            mesh,
            first: 0,
            last: m,
            left: Edge::Physical,
            right: interface,
        },
        Side::Right => Region {
            mesh,
            first: m,
            last: mesh.n_cells(),
            left: interface,
            right: Edge::Physical,
        },
    }
}

/// A factored subdomain operator −ν·div(κ∇·) + I with a fixed interface
/// condition kind, reusable across iterations.
#[derive(Debug, Clone)]
pub struct SubdomainSolver<'a> {
    problem: &'a Problem,
    decomposition: Decomposition,
    side: Side,
    kind: InterfaceKind,
    region: Region,
    factored: Factored,
}

impl<'a> SubdomainSolver<'a> {
    pub fn new(
        problem: &'a Problem,
        decomposition: &Decomposition,
        side: Side,
        kind: InterfaceKind,
    ) -> Result<Self> {
        let mesh = *problem.mesh();
        decomposition.check(&mesh)?;
        // re-validate: a decomposition built for this N is always ≥ 2 cells thick
        Decomposition::new(&mesh, decomposition.interface_index())?;
        let region = region_for(mesh, decomposition, side, kind);
        let factored = region.factor(problem, Scaling::h1(problem.nu()))?;
        Ok(Self {
            problem,
            decomposition: *decomposition,
            side,
            kind,
            region,
            factored,
        })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn kind(&self) -> InterfaceKind {
        self.kind
    }

    /// Solves with interface datum `data` and volume forcing `rhs`
    /// (a full-grid function; only the subdomain's nodes are read).
    pub fn solve(&self, data: &Trace, rhs: &GridFunction) -> Result<SubdomainSolution> {
        let mesh = *self.problem.mesh();
        rhs.same_mesh(self.problem.target())?;
        if data.len() != Trace::len_for(&mesh) {
            return Err(Error::MeshMismatch(format!(
                "interface datum has {} values, interface has {}",
                data.len(),
                Trace::len_for(&mesh)
            )));
        }
        if !data.is_finite() {
            return Err(Error::NonFinite { what: "interface datum" });
        }
        let region = &self.region;
        let m = self.decomposition.interface_index();
        let n_local = region.num_local();
        let mut fixed = vec![0.0; n_local];
        let mut extra = vec![0.0; n_local];
        let measure = mesh.interface_measure();
        for (t, j) in mesh.free_rows().enumerate() {
            match self.kind {
                InterfaceKind::Dirichlet => fixed[region.local(m, j)] = data[t],
                InterfaceKind::Neumann => extra[region.local(m, j)] = measure * data[t],
            }
        }
        let source = region.restrict(rhs.values());
        let values = region.solve(
            self.problem,
            Scaling::h1(self.problem.nu()),
            &self.factored,
            &fixed,
            &source,
            &extra,
        );
        Ok(SubdomainSolution {
            side: self.side,
            mesh,
            first: region.first,
            last: region.last,
            values,
        })
    }
}

/// One-shot subdomain solve; see [`SubdomainSolver`] for repeated solves.
pub fn solve_subdomain(
    problem: &Problem,
    decomposition: &Decomposition,
    side: Side,
    bc: &InterfaceBc,
    rhs: &GridFunction,
) -> Result<SubdomainSolution> {
    SubdomainSolver::new(problem, decomposition, side, bc.kind)?.solve(&bc.data, rhs)
}

/// Outward co-normal flux of `sol` at the interface: the subdomain's half of
/// the monolithic residual row, divided by the interface length per node.
///
/// Left flux + right flux equals the monolithic residual at Γ, so the two
/// fluxes cancel exactly for the restriction of the monolithic solution.
pub fn variational_flux(
    problem: &Problem,
    decomposition: &Decomposition,
    side: Side,
    sol: &SubdomainSolution,
    rhs: &GridFunction,
) -> Result<Trace> {
    if sol.side != side {
        return Err(Error::SideMismatch {
            expected: side.name(),
            found: sol.side.name(),
        });
    }
    let mesh = *problem.mesh();
    decomposition.check(&mesh)?;
    rhs.same_mesh(problem.target())?;
    // any kind works here: only the column range matters
    let region = region_for(mesh, decomposition, side, InterfaceKind::Neumann);
    if (region.first, region.last) != (sol.first, sol.last) || sol.mesh != mesh {
        return Err(Error::MeshMismatch(
            "solution was computed for a different decomposition".into(),
        ));
    }
    let a_u = region.apply(problem, Scaling::h1(problem.nu()), &sol.values);
    let mass = region.lumped_mass(problem);
    let source = region.restrict(rhs.values());
    let m = decomposition.interface_index();
    let measure = mesh.interface_measure();
    Ok(Trace(
        mesh.free_rows()
            .map(|j| {
                let k = region.local(m, j);
                (a_u[k] - mass[k] * source[k]) / measure
            })
            .collect(),
    ))
}
