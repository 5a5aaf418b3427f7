use std::ops::Range;

use crate::error::{Error, Result};

/// Spatial dimension of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Uniform grid on the unit interval or the unit square with `n_cells` cells
/// per direction.
///
/// Nodes are addressed as `(i, j)` where `i` is the x₁ column index and `j`
/// the x₂ index within a column; in 1D every column holds a single node
/// (`j = 0`). The flat node index is `i * column_len + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mesh {
    dim: Dim,
    n_cells: usize,
}

pub const MIN_CELLS: usize = 4;

impl Mesh {
    pub fn new(dim: Dim, n_cells: usize) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::invalid(
                "N",
                format!("need at least {MIN_CELLS} cells, got {n_cells}"),
            ));
        }
        Ok(Self { dim, n_cells })
    }

    /// Grid on (0, 1) with nodes `x_j = j / n_cells`.
    pub fn line(n_cells: usize) -> Result<Self> {
        Self::new(Dim::One, n_cells)
    }

    /// Grid on [0,1]×[0,1] with the same spacing in both directions.
    pub fn square(n_cells: usize) -> Result<Self> {
        Self::new(Dim::Two, n_cells)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn columns(&self) -> usize {
        self.n_cells + 1
    }

    /// Nodes per x₁ column: 1 in 1D, N+1 in 2D.
    pub fn column_len(&self) -> usize {
        match self.dim {
            Dim::One => 1,
            Dim::Two => self.n_cells + 1,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.columns() * self.column_len()
    }

    pub fn num_cells(&self) -> usize {
        match self.dim {
            Dim::One => self.n_cells,
            Dim::Two => self.n_cells * self.n_cells,
        }
    }

    /// Row indices `j` inside a column that are not on the x₂ boundary.
    pub fn free_rows(&self) -> Range<usize> {
        match self.dim {
            Dim::One => 0..1,
            Dim::Two => 1..self.n_cells,
        }
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        i * self.column_len() + j
    }

    pub fn cell(&self, i: usize, j: usize) -> usize {
        match self.dim {
            Dim::One => i,
            Dim::Two => i * self.n_cells + j,
        }
    }

    pub fn coords(&self, node: usize) -> (f64, f64) {
        let h = self.h();
        let (i, j) = (node / self.column_len(), node % self.column_len());
        (i as f64 * h, j as f64 * h)
    }

    /// Centre of cell `(i, j)`; the x₂ component is 0 in 1D.
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        match self.dim {
            Dim::One => ((i as f64 + 0.5) * h, 0.0),
            Dim::Two => ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h),
        }
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        let n = self.n_cells;
        i == 0 || i == n || (self.dim == Dim::Two && (j == 0 || j == n))
    }

    /// Length of the interface segment owned by one interface node.
    pub fn interface_measure(&self) -> f64 {
        match self.dim {
            Dim::One => 1.0,
            Dim::Two => self.h(),
        }
    }

    /// Composite-trapezoid weight of node `(i, j)`.
    pub fn trapezoid_weight(&self, i: usize, j: usize) -> f64 {
        let n = self.n_cells;
        let w1 = |k: usize| if k == 0 || k == n { 0.5 } else { 1.0 } * self.h();
        match self.dim {
            Dim::One => w1(i),
            Dim::Two => w1(i) * w1(j),
        }
    }
}

/// Grid-aligned two-subdomain split: Ω₁ = (0, α), Ω₂ = (α, 1) with
/// α = m·h (in 2D the interface is the column Γ = {α}×[0,1]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decomposition {
    m: usize,
    n_cells: usize,
}

impl Decomposition {
    pub fn new(mesh: &Mesh, m: usize) -> Result<Self> {
        let n = mesh.n_cells();
        if m < 2 || m + 2 > n {
            return Err(Error::SubdomainTooThin { m, n_cells: n });
        }
        Ok(Self { m, n_cells: n })
    }

    /// Accepts a real interface position only when it coincides with a node.
    pub fn from_alpha(mesh: &Mesh, alpha: f64) -> Result<Self> {
        let n = mesh.n_cells();
        let scaled = alpha * n as f64;
        let m = scaled.round();
        if !alpha.is_finite() || (scaled - m).abs() > 1e-9 || m < 0.0 {
            return Err(Error::NotGridAligned { alpha, n_cells: n });
        }
        Self::new(mesh, m as usize)
    }

    pub fn interface_index(&self) -> usize {
        self.m
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn alpha(&self) -> f64 {
        self.m as f64 / self.n_cells as f64
    }

    /// The mirror split α ↦ 1 − α.
    pub fn mirrored(&self) -> Self {
        Self {
            m: self.n_cells - self.m,
            n_cells: self.n_cells,
        }
    }

    pub(crate) fn check(&self, mesh: &Mesh) -> Result<()> {
        if self.n_cells != mesh.n_cells() {
            return Err(Error::MeshMismatch(format!(
                "decomposition built for N = {}, mesh has N = {}",
                self.n_cells,
                mesh.n_cells()
            )));
        }
        Ok(())
    }
}
