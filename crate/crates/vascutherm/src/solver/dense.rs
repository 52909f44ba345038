//! Dense LU with partial pivoting. Quadratic storage restricts it to desk
//! scale; it exists as a second, bandwidth-independent route behind the same
//! backend contract.

use crate::assembly::CsrMatrix;

use super::backend::{BackendError, LinearSolverBackend};

pub struct DenseLu;

impl LinearSolverBackend for DenseLu {
    fn name(&self) -> &'static str {
        "dense-lu"
    }

    fn description(&self) -> &'static str {
        "dense LU with partial pivoting (small systems, no bandwidth assumptions)"
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
        let n = matrix.n_rows;
        let mut a = matrix.to_dense();
        let mut x = rhs.to_vec();
        let scale = a.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tiny = scale * f64::EPSILON * (n as f64).max(16.0);

        for j in 0..n {
            let mut p = j;
            let mut best = a[j][j].abs();
            for i in j + 1..n {
                if a[i][j].abs() > best {
                    best = a[i][j].abs();
                    p = i;
                }
            }
            if !best.is_finite() {
                return Err(BackendError::NonFinite);
            }
            if best <= tiny {
                return Err(BackendError::Singular { column: j });
            }
            if p != j {
                a.swap(p, j);
                x.swap(p, j);
            }
            for i in j + 1..n {
                let l = a[i][j] / a[j][j];
                if l != 0.0 {
                    a[i][j] = l;
                    for c in j + 1..n {
                        a[i][c] -= l * a[j][c];
                    }
                    x[i] -= l * x[j];
                }
            }
        }
        for j in (0..n).rev() {
            x[j] /= a[j][j];
            for i in 0..j {
                x[i] -= a[i][j] * x[j];
            }
        }
        Ok(x)
    }
}
