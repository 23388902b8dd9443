//! Dense Cholesky factorization and triangular solves on row-major `n x n`
//! matrices.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite even with jitter {jitter:e}")]
    NotPositiveDefinite { jitter: f64 },
    #[error("matrix contains non-finite entries")]
    NotFinite,
}

/// Lower-triangular `L` with `L L^T = a`, or `None` if a pivot is not
/// positive.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !s.is_finite() || s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Cholesky of `a + jitter I`, trying no jitter first and then
/// `1e-10 * tr(a)/n`, growing tenfold up to `1e-4 * tr(a)/n`. Returns the
/// factor and the jitter that was added.
pub fn cholesky_jittered(a: &[f64], n: usize) -> Result<(Vec<f64>, f64), LinalgError> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NotFinite);
    }
    if let Some(l) = cholesky(a, n) {
        return Ok((l, 0.0));
    }
    let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
    let base = (trace / n.max(1) as f64).abs().max(f64::MIN_POSITIVE);
    let mut work = a.to_vec();
    let mut jitter = 1e-10 * base;
    let max_jitter = 1e-4 * base * (1.0 + 1e-9);
    loop {
        for i in 0..n {
            work[i * n + i] = a[i * n + i] + jitter;
        }
        if let Some(l) = cholesky(&work, n) {
            return Ok((l, jitter));
        }
        if jitter * 10.0 > max_jitter {
            return Err(LinalgError::NotPositiveDefinite { jitter });
        }
        jitter *= 10.0;
    }
}

/// Solves `L x = b` in place.
pub fn solve_lower(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Solves `L^T x = b` in place.
pub fn solve_lower_transpose(l: &[f64], n: usize, b: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Solves `L L^T x = b`.
pub fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    solve_lower(l, n, &mut x);
    solve_lower_transpose(l, n, &mut x);
    x
}

/// `ln det(L L^T)`.
pub fn log_det(l: &[f64], n: usize) -> f64 {
    2.0 * (0..n).map(|i| l[i * n + i].ln()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve() {
        let a = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let l = cholesky(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum();
                assert!((r - a[i * 3 + j]).abs() < 1e-12);
            }
        }
        let x = cholesky_solve(&l, 3, &[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
        let det = 4.0 * (5.0 * 3.0 - 1.0) - 2.0 * (2.0 * 3.0 - 0.6) + 0.6 * (2.0 - 5.0 * 0.6);
        assert!((log_det(&l, 3) - f64::ln(det)).abs() < 1e-12);
    }

    #[test]
    fn singular_needs_jitter() {
        let a = [1.0, 1.0, 1.0, 1.0];
        assert!(cholesky(&a, 2).is_none());
        let (_, jitter) = cholesky_jittered(&a, 2).unwrap();
        assert!(jitter > 0.0 && jitter <= 1e-4);
    }

    #[test]
    fn indefinite_fails_with_final_jitter() {
        let a = [1.0, 2.0, 2.0, 1.0];
        match cholesky_jittered(&a, 2) {
            Err(LinalgError::NotPositiveDefinite { jitter }) => {
                assert!((jitter - 1e-4).abs() < 1e-12, "{jitter}")
            }
            other => panic!("{other:?}"),
        }
    }
}
