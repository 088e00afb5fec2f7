//! Small dense row-major matrices for finite-state chains.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix must be square and non-empty, got {rows} rows with a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("row {row} has negative entry {value}")]
    NegativeEntry { row: usize, value: f64 },
    #[error("row {row} sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("chain is not irreducible: state {to} is unreachable from state {from}")]
    Reducible { from: usize, to: usize },
    #[error("stationary system is singular")]
    Singular,
}

/// Tolerance on row sums of stochastic matrices.
pub const STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::NotSquare { rows: 0, cols: 0 });
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for j in 0..n {
                out[j] += vi * self.get(i, j);
            }
        }
        out
    }

    /// Induced ∞-norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn check_stochastic(&self) -> Result<(), LinalgError> {
        for (i, row) in self.rows().enumerate() {
            if let Some(&v) = row.iter().find(|v| **v < 0.0 || !v.is_finite()) {
                return Err(LinalgError::NegativeEntry { row: i, value: v });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL * self.n as f64 {
                return Err(LinalgError::NotStochastic { row: i, sum });
            }
        }
        Ok(())
    }

    /// Every state reaches every other along positive-probability transitions.
    pub fn check_irreducible(&self) -> Result<(), LinalgError> {
        let n = self.n;
        for from in 0..n {
            let mut seen = vec![false; n];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if !seen[j] && self.get(i, j) > 0.0 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            if let Some(to) = seen.iter().position(|s| !s) {
                return Err(LinalgError::Reducible { from, to });
            }
        }
        Ok(())
    }

    /// Unique stationary row vector of an irreducible stochastic matrix, by
    /// solving `π(T − I) = 0` with one equation replaced by `Σπ = 1`, then
    /// clipping round-off negatives and renormalising.
    pub fn stationary(&self) -> Result<Vec<f64>, LinalgError> {
        self.check_stochastic()?;
        self.check_irreducible()?;
        let n = self.n;
        // Augmented system A π = b where A = (T − I)^T with last row all ones.
        let mut a = vec![vec![0.0; n + 1]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().take(n).enumerate() {
                *cell = self.get(j, i) - if i == j { 1.0 } else { 0.0 };
            }
        }
        for cell in a[n - 1].iter_mut().take(n) {
            *cell = 1.0;
        }
        a[n - 1][n] = 1.0;
        let x = solve_augmented(a)?;
        let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        Ok(clipped.into_iter().map(|v| v / total).collect())
    }
}

/// Gaussian elimination with partial pivoting on an `n × (n+1)` system.
fn solve_augmented(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>, LinalgError> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(LinalgError::Singular);
        }
        a.swap(col, pivot);
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..=n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    Ok((0..n).map(|i| a[i][n] / a[i][i]).collect())
}
