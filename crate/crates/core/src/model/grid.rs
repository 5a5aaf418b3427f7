use std::fmt::Write as _;
use std::path::Path;

use super::mesh::{Dim, Mesh};
use crate::error::{Error, Result};

/// Nodal values on a [`Mesh`], stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    mesh: Mesh,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(mesh: Mesh) -> Self {
        Self {
            mesh,
            values: vec![0.0; mesh.num_nodes()],
        }
    }

    pub fn from_values(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_nodes() {
            return Err(Error::MeshMismatch(format!(
                "{} values for a mesh with {} nodes",
                values.len(),
                mesh.num_nodes()
            )));
        }
        Ok(Self { mesh, values })
    }

    /// Samples `f(x1, x2)` at every node (`x2 = 0` in 1D).
    pub fn from_fn(mesh: Mesh, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..mesh.num_nodes())
            .map(|k| {
                let (x1, x2) = mesh.coords(k);
                f(x1, x2)
            })
            .collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.node(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Composite-trapezoid inner product.
    pub fn inner(&self, other: &GridFunction) -> f64 {
        debug_assert_eq!(self.mesh, other.mesh);
        let ny = self.mesh.column_len();
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(k, (a, b))| self.mesh.trapezoid_weight(k / ny, k % ny) * a * b)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.same_mesh(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridFunction {
            mesh: self.mesh,
            values,
        })
    }

    pub(crate) fn same_mesh(&self, other: &GridFunction) -> Result<()> {
        if self.mesh != other.mesh {
            return Err(Error::MeshMismatch(format!(
                "{:?} vs {:?}",
                self.mesh, other.mesh
            )));
        }
        Ok(())
    }

    /// CSV with header `x,value` (1D) or `x1,x2,value` (2D), one row per node
    /// in x₁-major order, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.mesh.dim() {
            Dim::One => out.push_str("x,value\n"),
            Dim::Two => out.push_str("x1,x2,value\n"),
        }
        for (k, v) in self.values.iter().enumerate() {
            let (x1, x2) = self.mesh.coords(k);
            match self.mesh.dim() {
                Dim::One => writeln!(out, "{},{}", fmt_f64(x1), fmt_f64(*v)),
                Dim::Two => writeln!(out, "{},{},{}", fmt_f64(x1), fmt_f64(x2), fmt_f64(*v)),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn from_csv(mesh: Mesh, text: &str, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Csv {
            path: path.to_path_buf(),
            reason,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let ncols = match (mesh.dim(), header.trim()) {
            (Dim::One, "x,value") => 2,
            (Dim::Two, "x1,x2,value") => 3,
            (_, other) => return Err(bad(format!("unexpected header {other:?}"))),
        };
        let mut values = Vec::with_capacity(mesh.num_nodes());
        for (row, line) in lines.enumerate() {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("row {}: {e}", row + 1)))?;
            if fields.len() != ncols {
                return Err(bad(format!("row {}: expected {ncols} fields", row + 1)));
            }
            if row >= mesh.num_nodes() {
                return Err(bad(format!("more than {} rows", mesh.num_nodes())));
            }
            let (x1, x2) = mesh.coords(row);
            let coord_ok = (fields[0] - x1).abs() < 1e-9 && (ncols == 2 || (fields[1] - x2).abs() < 1e-9);
            if !coord_ok {
                return Err(bad(format!("row {}: coordinates do not match the grid", row + 1)));
            }
            values.push(fields[ncols - 1]);
        }
        if values.len() != mesh.num_nodes() {
            return Err(bad(format!(
                "{} rows for a mesh with {} nodes",
                values.len(),
                mesh.num_nodes()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn read_csv(mesh: Mesh, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv(mesh, &text, path)
    }
}

/// Full-precision decimal used by every CSV writer in the crate.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
