//! Small dense symmetric linear algebra: Cholesky with a relative pivot
//! threshold, triangular solves, and Toeplitz assembly. Matrices are
//! row-major `Vec<f64>` of length n*n; problem sizes here are tiny (n ≤ 10).

/// Lower-triangular Cholesky factor of a symmetric matrix.
///
/// Returns `Err(k)` with the 1-based index of the first pivot that is not
/// strictly greater than `pivot_tol`.
pub fn cholesky(a: &[f64], n: usize, pivot_tol: f64) -> Result<Vec<f64>, usize> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                // NaN pivots must fail the test as well
                if !s.is_finite() || s <= pivot_tol {
                    return Err(i + 1);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves A x = b given the lower Cholesky factor L of A (forward then
/// backward substitution).
pub fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[i * n + k] * x[k];
        }
        x[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= l[k * n + i] * x[k];
        }
        x[i] /= l[i * n + i];
    }
    x
}

/// Symmetric Toeplitz matrix T with T[i][j] = lags[|i−j|].
pub fn toeplitz(lags: &[f64]) -> Vec<f64> {
    let n = lags.len();
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[i * n + j] = lags[i.abs_diff(j)];
        }
    }
    t
}
