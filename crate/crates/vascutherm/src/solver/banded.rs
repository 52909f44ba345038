//! Banded LU factorization with partial pivoting.
//!
//! Row-major node numbering on structured grids keeps the assembled
//! operators inside a narrow band, so a band factorization covers the whole
//! mesh family this crate generates at a cost of `O(n * kl * (kl + ku))`.
//! Storage follows the classic band layout with `kl` extra superdiagonal
//! rows for pivoting fill.

use crate::assembly::CsrMatrix;

use super::backend::{BackendError, LinearSolverBackend};

pub struct BandedLu;

impl LinearSolverBackend for BandedLu {
    fn name(&self) -> &'static str {
        "banded-lu"
    }

    fn description(&self) -> &'static str {
        "direct band LU with partial pivoting (reference path for structured meshes)"
    }

    fn solve(&self, matrix: &CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>, BackendError> {
        if matrix.n_rows != matrix.n_cols {
            return Err(BackendError::NotSquare {
                rows: matrix.n_rows,
                cols: matrix.n_cols,
            });
        }
        if rhs.len() != matrix.n_rows {
            return Err(BackendError::DimensionMismatch {
                got: rhs.len(),
                expected: matrix.n_rows,
            });
        }
        let factored = factor(matrix)?;
        Ok(factored.solve(rhs))
    }
}

struct BandFactors {
    n: usize,
    kl: usize,
    ku: usize,
    /// Column-major band storage, `2*kl + ku + 1` rows per column; entry
    /// `(i, j)` lives at `j * m + (i - j + kl + ku)`.
    ab: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandFactors {
    #[inline]
    fn idx(&self, row: usize, col: usize) -> usize {
        let m = 2 * self.kl + self.ku + 1;
        col * m + (row + self.kl + self.ku - col)
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        // Forward substitution with the stored multipliers and row swaps.
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                x.swap(p, j);
            }
            let i_max = (j + self.kl).min(n - 1);
            for i in j + 1..=i_max {
                x[i] -= self.ab[self.idx(i, j)] * x[j];
            }
        }
        // Back substitution on the widened upper band.
        let width = self.kl + self.ku;
        for j in (0..n).rev() {
            x[j] /= self.ab[self.idx(j, j)];
            let i_min = j.saturating_sub(width);
            for i in i_min..j {
                x[i] -= self.ab[self.idx(i, j)] * x[j];
            }
        }
        x
    }
}

fn factor(matrix: &CsrMatrix) -> Result<BandFactors, BackendError> {
    let n = matrix.n_rows;
    let (kl, ku) = matrix.bandwidths();
    let m = 2 * kl + ku + 1;
    let mut factors = BandFactors {
        n,
        kl,
        ku,
        ab: vec![0.0; m * n],
        pivots: (0..n).collect(),
    };
    let mut scale = 0.0f64;
    for i in 0..n {
        for k in matrix.row_ptr[i]..matrix.row_ptr[i + 1] {
            let v = matrix.values[k];
            let slot = factors.idx(i, matrix.col_idx[k]);
            factors.ab[slot] = v;
            scale = scale.max(v.abs());
        }
    }
    // A pivot at accumulated-roundoff level signals rank deficiency, e.g.
    // the pure-Neumann constant nullspace.
    let tiny = scale * f64::EPSILON * (n as f64).max(16.0);

    let mut multipliers = vec![0.0f64; kl];
    for j in 0..n {
        let i_max = (j + kl).min(n - 1);
        let mut p = j;
        let mut best = factors.ab[factors.idx(j, j)].abs();
        for i in j + 1..=i_max {
            let v = factors.ab[factors.idx(i, j)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if !best.is_finite() {
            return Err(BackendError::NonFinite);
        }
        if best <= tiny {
            return Err(BackendError::Singular { column: j });
        }
        factors.pivots[j] = p;
        let j_hi = (j + kl + ku).min(n - 1);
        if p != j {
            for c in j..=j_hi {
                let a = factors.idx(j, c);
                let b = factors.idx(p, c);
                factors.ab.swap(a, b);
            }
        }
        // Scale the subdiagonal of column j into multipliers, then apply the
        // rank-1 update column by column; within a column the rows are
        // contiguous in storage.
        let below = i_max - j;
        if below == 0 {
            continue;
        }
        let diag = factors.ab[factors.idx(j, j)];
        let sub_base = factors.idx(j + 1, j);
        for t in 0..below {
            let l = factors.ab[sub_base + t] / diag;
            factors.ab[sub_base + t] = l;
            multipliers[t] = l;
        }
        for c in j + 1..=j_hi {
            let pivot_row_value = factors.ab[factors.idx(j, c)];
            if pivot_row_value == 0.0 {
                continue;
            }
            let col_base = factors.idx(j + 1, c);
            let column = &mut factors.ab[col_base..col_base + below];
            for (entry, &l) in column.iter_mut().zip(&multipliers[..below]) {
                *entry -= l * pivot_row_value;
            }
        }
    }
    Ok(factors)
}
