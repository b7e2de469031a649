//! Thin wrappers over the LAPACK-backed dense solvers plus small helpers.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, UPLO};
use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn eigh(mat: &Array2<Complex64>) -> Result<(Array1<f64>, Array2<Complex64>)> {
    mat.eigh(UPLO::Lower)
        .map_err(|e| Error::Linalg(format!("hermitian eigendecomposition failed: {e}")))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(mat: &Array2<Complex64>) -> Result<Vec<f64>> {
    let (vals, _) = eigh(mat)?;
    Ok(vals.to_vec())
}

/// Eigenvalues of a general complex matrix.
pub fn eigvals(mat: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    let (vals, _) = mat
        .eig()
        .map_err(|e| Error::Linalg(format!("general eigendecomposition failed: {e}")))?;
    Ok(vals.to_vec())
}

/// Sort eigenvalues by real part, then imaginary part.
pub fn sort_complex(vals: &mut [Complex64]) {
    vals.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Minimal-cost bipartite matching of two equal-length eigenvalue lists in
/// the complex plane (exact bitmask DP; list lengths stay small).
///
/// Returns `perm` with `perm[i]` = index in `b` matched to `a[i]`.
pub fn match_eigenvalues(a: &[Complex64], b: &[Complex64]) -> Vec<usize> {
    let n = a.len();
    assert_eq!(n, b.len());
    assert!(n <= 20, "matching is exponential in list length");
    let full = 1usize << n;
    let inf = f64::INFINITY;
    // dp[mask] = min cost of assigning the first popcount(mask) rows to column set mask
    let mut dp = vec![inf; full];
    let mut choice = vec![usize::MAX; full];
    dp[0] = 0.0;
    for mask in 0..full {
        if dp[mask] == inf {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let c = dp[mask] + (a[i] - b[j]).norm();
                let nm = mask | (1 << j);
                if c < dp[nm] {
                    dp[nm] = c;
                    choice[nm] = j;
                }
            }
        }
    }
    // reconstruct
    let mut perm = vec![0usize; n];
    let mut mask = full - 1;
    for i in (0..n).rev() {
        let j = choice[mask];
        perm[i] = j;
        mask &= !(1 << j);
        let _ = i;
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn hermitian_eigenvalues() {
        let m = array![
            [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)]
        ];
        let vals = eigvalsh(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn general_eigenvalues() {
        let m = array![
            [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(2.0, -1.0)]
        ];
        let mut vals = eigvals(&m).unwrap();
        sort_complex(&mut vals);
        assert!((vals[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((vals[1] - Complex64::new(2.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn matching_recovers_permutation() {
        let a = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 1.0),
        ];
        let b = vec![a[2] + 0.01, a[0] + 0.01, a[1]];
        let perm = match_eigenvalues(&a, &b);
        assert_eq!(perm, vec![1, 2, 0]);
    }
}
