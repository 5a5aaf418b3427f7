//! Cell-by-cell assembly of `stiffness·K + reaction·M` on a range of x₁
//! columns.
//!
//! Every cell contributes its own conductance to the links along its edges
//! and a lumped share of mass to its corners. A region that stops at an
//! interface column therefore carries exactly its half of the monolithic
//! stencil row there, so left-half + right-half reproduces the full row.

use crate::error::Result;
use crate::linalg::{BandCholesky, SymmetricBand, Tridiagonal};
use crate::model::{Dim, Mesh, Problem};

/// Condition imposed on the first or last column of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Edge {
    /// Physical boundary, homogeneous Dirichlet.
    Physical,
    /// Interface column with prescribed values.
    Dirichlet,
    /// Interface column carrying the half-row flux equation.
    Neumann,
}

/// One cell's share of the operator: a link conductance between two
/// nodes, or a lumped mass weight at a node.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Contribution {
    Link(usize, usize, f64),
    Mass(usize, f64),
}

/// Operator scaling: `stiffness·K + reaction·M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaling {
    pub stiffness: f64,
    pub reaction: f64,
}

impl Scaling {
    /// −ν·div(κ∇·) + I
    pub fn h1(nu: f64) -> Self {
        Self {
            stiffness: nu,
            reaction: 1.0,
        }
    }

    /// −div(κ∇·)
    pub fn state() -> Self {
        Self {
            stiffness: 1.0,
            reaction: 0.0,
        }
    }
}

/// Columns `first..=last` of the mesh with boundary kinds at both ends.
/// Local node index is `(i - first) * column_len + j`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Region {
    pub mesh: Mesh,
    pub first: usize,
    pub last: usize,
    pub left: Edge,
    pub right: Edge,
}

impl Region {
    pub fn whole(mesh: Mesh) -> Self {
        Self {
            mesh,
            first: 0,
            last: mesh.n_cells(),
            left: Edge::Physical,
            right: Edge::Physical,
        }
    }

    pub fn num_local(&self) -> usize {
        (self.last - self.first + 1) * self.mesh.column_len()
    }

    pub fn local(&self, i: usize, j: usize) -> usize {
        (i - self.first) * self.mesh.column_len() + j
    }

    /// Range of columns holding unknowns.
    pub fn unknown_columns(&self) -> std::ops::RangeInclusive<usize> {
        let lo = if self.left == Edge::Neumann { self.first } else { self.first + 1 };
        let hi = if self.right == Edge::Neumann { self.last } else { self.last - 1 };
        lo..=hi
    }

    pub fn num_unknowns(&self) -> usize {
        let cols = self.unknown_columns();
        (cols.end() + 1 - cols.start()) * self.mesh.free_rows().len()
    }

    /// Unknown number of node `(i, j)`, if it is free.
    pub fn unknown(&self, i: usize, j: usize) -> Option<usize> {
        let cols = self.unknown_columns();
        let rows = self.mesh.free_rows();
        if cols.contains(&i) && rows.contains(&j) {
            Some((i - cols.start()) * rows.len() + (j - rows.start))
        } else {
            None
        }
    }

    /// Visits every link and mass share of the region's cells, in local
    /// node numbering.
    pub fn for_each_contribution(&self, problem: &Problem, mut visit: impl FnMut(Contribution)) {
        use Contribution::{Link, Mass};
        let mesh = &self.mesh;
        let h = mesh.h();
        match mesh.dim() {
            Dim::One => {
                for i in self.first..self.last {
                    let g = problem.kappa_at(i, 0) / h;
                    let (a, b) = (self.local(i, 0), self.local(i + 1, 0));
                    visit(Link(a, b, g));
                    visit(Mass(a, 0.5 * h));
                    visit(Mass(b, 0.5 * h));
                }
            }
            Dim::Two => {
                let n = mesh.n_cells();
                let quarter = 0.25 * h * h;
                for i in self.first..self.last {
                    for j in 0..n {
                        let g = 0.5 * problem.kappa_at(i, j);
                        let c00 = self.local(i, j);
                        let c10 = self.local(i + 1, j);
                        let c01 = self.local(i, j + 1);
                        let c11 = self.local(i + 1, j + 1);
                        visit(Link(c00, c10, g));
                        visit(Link(c01, c11, g));
                        visit(Link(c00, c01, g));
                        visit(Link(c10, c11, g));
                        for c in [c00, c10, c01, c11] {
                            visit(Mass(c, quarter));
                        }
                    }
                }
            }
        }
    }

    /// Lumped mass of every local node as seen from this region's cells.
    pub fn lumped_mass(&self, problem: &Problem) -> Vec<f64> {
        let mut m = vec![0.0; self.num_local()];
        self.for_each_contribution(problem, |c| {
            if let Contribution::Mass(a, w) = c {
                m[a] += w;
            }
        });
        m
    }

    /// `(stiffness·K + reaction·M) u` over the region's cells.
    pub fn apply(&self, problem: &Problem, scale: Scaling, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.num_local());
        let mut out = vec![0.0; u.len()];
        self.for_each_contribution(problem, |c| match c {
            Contribution::Link(a, b, g) => {
                let flux = scale.stiffness * g * (u[a] - u[b]);
                out[a] += flux;
                out[b] -= flux;
            }
            Contribution::Mass(a, w) => out[a] += scale.reaction * w * u[a],
        });
        out
    }

    /// Factors the operator restricted to the free unknowns.
    pub fn factor(&self, problem: &Problem, scale: Scaling) -> Result<Factored> {
        let n = self.num_unknowns();
        let ny = self.mesh.column_len();
        let node_of = |local: usize| (self.first + local / ny, local % ny);
        let unknown_of = |local: usize| {
            let (i, j) = node_of(local);
            self.unknown(i, j)
        };
        match self.mesh.dim() {
            Dim::One => {
                let mut diag = vec![0.0; n];
                let mut off = vec![0.0; n.saturating_sub(1)];
                self.for_each_contribution(problem, |c| match c {
                    Contribution::Link(a, b, g) => {
                        let g = scale.stiffness * g;
                        let (ua, ub) = (unknown_of(a), unknown_of(b));
                        if let Some(p) = ua {
                            diag[p] += g;
                        }
                        if let Some(q) = ub {
                            diag[q] += g;
                        }
                        if let (Some(p), Some(q)) = (ua, ub) {
                            off[p.min(q)] -= g;
                        }
                    }
                    Contribution::Mass(a, w) => {
                        if let Some(p) = unknown_of(a) {
                            diag[p] += scale.reaction * w;
                        }
                    }
                });
                Ok(Factored::Tridiagonal(Tridiagonal::factor(&off, &diag, &off)?))
            }
            Dim::Two => {
                let mut band = SymmetricBand::zeros(n, self.mesh.free_rows().len());
                self.for_each_contribution(problem, |c| match c {
                    Contribution::Link(a, b, g) => {
                        let g = scale.stiffness * g;
                        let (ua, ub) = (unknown_of(a), unknown_of(b));
                        if let Some(p) = ua {
                            band.add(p, p, g);
                        }
                        if let Some(q) = ub {
                            band.add(q, q, g);
                        }
                        if let (Some(p), Some(q)) = (ua, ub) {
                            band.add(p, q, -g);
                        }
                    }
                    Contribution::Mass(a, w) => {
                        if let Some(p) = unknown_of(a) {
                            band.add(p, p, scale.reaction * w);
                        }
                    }
                });
                Ok(Factored::Banded(band.cholesky()?))
            }
        }
    }

    /// Solves `A u = M f + boundary_flux` with `u` equal to `fixed` on the
    /// pinned nodes. `fixed` is a full local vector whose free entries are
    /// ignored; `extra` is added to the right-hand side at every node.
    pub fn solve(
        &self,
        problem: &Problem,
        scale: Scaling,
        factored: &Factored,
        fixed: &[f64],
        source: &[f64],
        extra: &[f64],
    ) -> Vec<f64> {
        let ny = self.mesh.column_len();
        let mut lifted = fixed.to_vec();
        for (k, v) in lifted.iter_mut().enumerate() {
            if self.unknown(self.first + k / ny, k % ny).is_some() {
                *v = 0.0;
            }
        }
        let a_lift = self.apply(problem, scale, &lifted);
        let mass = self.lumped_mass(problem);
        let mut rhs = vec![0.0; self.num_unknowns()];
        for k in 0..self.num_local() {
            if let Some(p) = self.unknown(self.first + k / ny, k % ny) {
                rhs[p] = mass[k] * source[k] + extra[k] - a_lift[k];
            }
        }
        factored.solve_in_place(&mut rhs);
        for (k, v) in lifted.iter_mut().enumerate() {
            if let Some(p) = self.unknown(self.first + k / ny, k % ny) {
                *v = rhs[p];
            }
        }
        lifted
    }

    /// Extracts columns `first..=last` of a global nodal vector.
    pub fn restrict(&self, global: &[f64]) -> Vec<f64> {
        let ny = self.mesh.column_len();
        global[self.first * ny..(self.last + 1) * ny].to_vec()
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Factored {
    Tridiagonal(Tridiagonal),
    Banded(BandCholesky),
}

impl Factored {
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        match self {
            Factored::Tridiagonal(t) => t.solve_in_place(rhs),
            Factored::Banded(b) => b.solve_in_place(rhs),
        }
    }
}
