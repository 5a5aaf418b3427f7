//! Direct solvers for the structured systems produced by the assembly:
//! tridiagonal elimination for 1D subdomains, banded Cholesky for the 2D
//! operators, and banded LU with partial pivoting for the indefinite KKT system.

use crate::error::{Error, Result};

/// Thomas elimination for a tridiagonal system.
///
/// `lower[i]` couples row `i + 1` to column `i`, `upper[i]` couples row `i`
/// to column `i + 1`. The factorization is stored so repeated right-hand sides
/// cost O(n).
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    // modified upper diagonal c'_i and pivots d'_i of the forward sweep
    upper_mod: Vec<f64>,
    pivots: Vec<f64>,
}

impl Tridiagonal {
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        assert!(n > 0, "empty tridiagonal system");
        assert_eq!(lower.len(), n - 1);
        assert_eq!(upper.len(), n - 1);
        let mut pivots = vec![0.0; n];
        let mut upper_mod = vec![0.0; n.saturating_sub(1)];
        pivots[0] = diag[0];
        for i in 0..n {
            if i > 0 {
                pivots[i] = diag[i] - lower[i - 1] * upper_mod[i - 1];
            }
            if pivots[i] == 0.0 || !pivots[i].is_finite() {
                return Err(Error::Singular(i));
            }
            if i + 1 < n {
                upper_mod[i] = upper[i] / pivots[i];
            }
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper_mod,
            pivots,
        })
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        rhs[0] /= self.pivots[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i - 1] * rhs[i - 1]) / self.pivots[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper_mod[i] * rhs[i + 1];
        }
    }
}

/// Symmetric band matrix stored by lower diagonals: `band[i][d]` holds
/// entry `(i, i - d)` for `d = 0..=bandwidth`.
#[derive(Debug, Clone)]
pub struct SymmetricBand {
    n: usize,
    bandwidth: usize,
    band: Vec<f64>,
}

impl SymmetricBand {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bandwidth,
            band: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Adds `value` to entries `(row, col)` and `(col, row)`.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let (r, c) = if row >= col { (row, col) } else { (col, row) };
        let d = r - c;
        assert!(d <= self.bandwidth, "entry ({row}, {col}) outside band");
        self.band[r * (self.bandwidth + 1) + d] += value;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (r, c) = if row >= col { (row, col) } else { (col, row) };
        let d = r - c;
        if d > self.bandwidth {
            0.0
        } else {
            self.band[r * (self.bandwidth + 1) + d]
        }
    }

    /// In-place band Cholesky, `A = L Lᵀ`.
    pub fn cholesky(mut self) -> Result<BandCholesky> {
        let w = self.bandwidth + 1;
        for j in 0..self.n {
            let jlo = j.saturating_sub(self.bandwidth);
            let mut diag = self.band[j * w];
            for k in jlo..j {
                let l = self.band[j * w + (j - k)];
                diag -= l * l;
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(Error::Singular(j));
            }
            let ljj = diag.sqrt();
            self.band[j * w] = ljj;
            let iend = (j + self.bandwidth).min(self.n - 1);
            for i in j + 1..=iend {
                let ilo = i.saturating_sub(self.bandwidth).max(jlo);
                let mut s = self.band[i * w + (i - j)];
                for k in ilo..j {
                    s -= self.band[i * w + (i - k)] * self.band[j * w + (j - k)];
                }
                self.band[i * w + (i - j)] = s / ljj;
            }
        }
        Ok(BandCholesky { factor: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    factor: SymmetricBand,
}

impl BandCholesky {
    pub fn dim(&self) -> usize {
        self.factor.n
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.factor.n;
        let b = self.factor.bandwidth;
        let w = b + 1;
        let l = &self.factor.band;
        assert_eq!(rhs.len(), n);
        for i in 0..n {
            let mut s = rhs[i];
            for k in i.saturating_sub(b)..i {
                s -= l[i * w + (i - k)] * rhs[k];
            }
            rhs[i] = s / l[i * w];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in i + 1..=(i + b).min(n - 1) {
                s -= l[k * w + (k - i)] * rhs[k];
            }
            rhs[i] = s / l[i * w];
        }
    }
}

/// General band matrix with `lower` sub- and `upper` super-diagonals, factored
/// by Gaussian elimination with partial pivoting (fill widens the upper band
/// to `lower + upper`).
#[derive(Debug, Clone)]
pub struct GeneralBand {
    n: usize,
    lower: usize,
    upper: usize,
    // row-major, each row holds columns i - lower ..= i + lower + upper
    rows: Vec<f64>,
}

impl GeneralBand {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            rows: vec![0.0; n * width],
        }
    }

    fn width(&self) -> usize {
        2 * self.lower + self.upper + 1
    }

    fn slot(&self, row: usize, col: usize) -> usize {
        // column offset relative to row - lower
        let off = col + self.lower - row;
        row * self.width() + off
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        assert!(
            col + self.lower >= row && col <= row + self.upper,
            "entry ({row}, {col}) outside band"
        );
        let s = self.slot(row, col);
        self.rows[s] += value;
    }

    pub fn lu(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.lower;
        let reach = self.lower + self.upper;
        let mut perm = vec![0usize; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.rows[self.slot(k, k)].abs();
            for i in k + 1..=last {
                let v = self.rows[self.slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(k));
            }
            perm[k] = p;
            let cmax = (k + reach).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    let a = self.slot(k, c);
                    let b = self.slot(p, c);
                    self.rows.swap(a, b);
                }
            }
            let pivot = self.rows[self.slot(k, k)];
            for i in k + 1..=last {
                let sik = self.slot(i, k);
                let m = self.rows[sik] / pivot;
                self.rows[sik] = m;
                if m != 0.0 {
                    for c in k + 1..=cmax {
                        let skc = self.rows[self.slot(k, c)];
                        let sic = self.slot(i, c);
                        self.rows[sic] -= m * skc;
                    }
                }
            }
        }
        Ok(BandLu { band: self, perm })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    band: GeneralBand,
    perm: Vec<usize>,
}

impl BandLu {
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let a = &self.band;
        let n = a.n;
        let kl = a.lower;
        let reach = a.lower + a.upper;
        assert_eq!(rhs.len(), n);
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                rhs.swap(k, p);
            }
            let bk = rhs[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                rhs[i] -= a.rows[a.slot(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = rhs[k];
            for c in k + 1..=(k + reach).min(n - 1) {
                s -= a.rows[a.slot(k, c)] * rhs[c];
            }
            rhs[k] = s / a.rows[a.slot(k, k)];
        }
    }
}
