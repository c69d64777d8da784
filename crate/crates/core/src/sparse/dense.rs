//! Small dense kernels for the `n x n` coupling blocks.

use crate::error::{Error, Result};

/// Inverse of a row-major `n x n` matrix by Gauss–Jordan elimination with
/// partial pivoting.
pub fn invert(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            actual: matrix.len(),
        });
    }
    let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut a = matrix.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
            .unwrap();
        let pivot = a[pivot_row * n + col];
        if pivot.abs() <= f64::EPSILON * scale * n as f64 || pivot == 0.0 {
            return Err(Error::Singular { row: col });
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
                inv.swap(col * n + k, pivot_row * n + k);
            }
        }
        let p = 1.0 / pivot;
        for k in 0..n {
            a[col * n + k] *= p;
            inv[col * n + k] *= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                a[r * n + k] -= f * a[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }
    Ok(inv)
}

/// Row-major product of two `n x n` matrices.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_with_pivoting() {
        let m = [0.0, 2.0, 1.0, 1.0];
        let inv = invert(&m, 2).unwrap();
        let prod = matmul(&m, &inv, 2);
        assert!((prod[0] - 1.0).abs() < 1e-15 && prod[1].abs() < 1e-15);
        assert!(prod[2].abs() < 1e-15 && (prod[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_detected() {
        assert!(matches!(invert(&[1.0, 2.0, 2.0, 4.0], 2), Err(Error::Singular { .. })));
    }

    #[test]
    fn matches_nalgebra_inverse() {
        let n = 6;
        let m: Vec<f64> = (0..n * n)
            .map(|i| ((i * 7919 % 101) as f64 / 50.0 - 1.0) + if i % (n + 1) == 0 { 4.0 } else { 0.0 })
            .collect();
        let ours = invert(&m, n).unwrap();
        let theirs = nalgebra::DMatrix::from_row_slice(n, n, &m).try_inverse().unwrap();
        for r in 0..n {
            for c in 0..n {
                assert!((ours[r * n + c] - theirs[(r, c)]).abs() < 1e-13);
            }
        }
    }
}
