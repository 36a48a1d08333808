//! Small dense complex linear algebra: row reduction with partial pivoting,
//! kernels, inverses and least squares through the normal equations.
//!
//! Everything here works at 16x8 scale; no attempt is made at blocking or
//! cache efficiency.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{GcxError, Result};

/// Reduced row echelon form together with the pivot columns found.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: DMatrix<C64>,
    pub pivots: Vec<usize>,
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Gauss-Jordan elimination with partial pivoting. A column is treated as
/// pivot-free when its best candidate falls below `tol * max|entry|`.
pub fn row_reduce(m: &DMatrix<C64>, tol: f64) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let threshold = tol * max_abs(m);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (best, best_abs) = (row..rows)
            .map(|r| (r, a[(r, col)].norm()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= threshold || best_abs == 0.0 {
            for r in row..rows {
                a[(r, col)] = C64::new(0.0, 0.0);
            }
            continue;
        }
        a.swap_rows(row, best);
        let p = a[(row, col)];
        for c in col..cols {
            a[(row, c)] /= p;
        }
        for r in 0..rows {
            if r != row {
                let f = a[(r, col)];
                if f != C64::new(0.0, 0.0) {
                    for c in col..cols {
                        let v = a[(row, c)];
                        a[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { matrix: a, pivots }
}

pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    row_reduce(m, tol).pivots.len()
}

/// Basis of the right kernel, one vector per free column.
pub fn kernel(m: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let cols = m.ncols();
    let Rref { matrix, pivots } = row_reduce(m, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = DVector::from_element(cols, C64::new(0.0, 0.0));
            v[f] = C64::new(1.0, 0.0);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -matrix[(i, f)];
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix; fails when a pivot vanishes.
pub fn inverse(m: &DMatrix<C64>, tol: f64) -> Result<DMatrix<C64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(GcxError::InvalidArgument("inverse of a non-square matrix".into()));
    }
    let mut aug = DMatrix::from_element(n, 2 * n, C64::new(0.0, 0.0));
    aug.view_mut((0, 0), (n, n)).copy_from(m);
    for i in 0..n {
        aug[(i, n + i)] = C64::new(1.0, 0.0);
    }
    // pivot threshold relative to the left block only
    let threshold = tol * max_abs(m);
    for col in 0..n {
        let (best, best_abs) = (col..n)
            .map(|r| (r, aug[(r, col)].norm()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= threshold || best_abs == 0.0 {
            return Err(GcxError::Degenerate("singular matrix".into()));
        }
        aug.swap_rows(col, best);
        let p = aug[(col, col)];
        for c in 0..2 * n {
            aug[(col, c)] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[(r, col)];
                for c in 0..2 * n {
                    let v = aug[(col, c)];
                    aug[(r, c)] -= f * v;
                }
            }
        }
    }
    Ok(aug.view((0, n), (n, n)).into_owned())
}

/// Least-squares solution of `a x = b` via the normal equations
/// `a^H a x = a^H b`, eliminated with partial pivoting. Rank-deficient
/// directions get a zero component, so the result is a basic solution; the
/// residual norm does not depend on that choice.
pub fn least_squares(a: &DMatrix<C64>, b: &DVector<C64>, tol: f64) -> (DVector<C64>, f64) {
    let n = a.ncols();
    let ah = a.adjoint();
    let normal = &ah * a;
    let rhs = &ah * b;
    let mut aug = DMatrix::from_element(n, n + 1, C64::new(0.0, 0.0));
    aug.view_mut((0, 0), (n, n)).copy_from(&normal);
    aug.set_column(n, &rhs);
    // the threshold must only see the normal matrix, not the right-hand side
    let threshold = tol * max_abs(&normal);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let (best, best_abs) = (row..n)
            .map(|r| (r, aug[(r, col)].norm()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= threshold || best_abs == 0.0 {
            continue;
        }
        aug.swap_rows(row, best);
        let p = aug[(row, col)];
        for c in 0..=n {
            aug[(row, c)] /= p;
        }
        for r in 0..n {
            if r != row {
                let f = aug[(r, col)];
                for c in 0..=n {
                    let v = aug[(row, c)];
                    aug[(r, c)] -= f * v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let mut x = DVector::from_element(n, C64::new(0.0, 0.0));
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[(i, n)];
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}
