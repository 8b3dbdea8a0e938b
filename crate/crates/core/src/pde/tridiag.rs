//! Tridiagonal solves: the Thomas algorithm, falling back to LU with
//! partial pivoting when a pivot is too small.

use super::grid::Tridiagonal;
use crate::error::{Error, Result};

const PIVOT_RATIO: f64 = 1e-13;

pub fn solve(a: &Tridiagonal, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != a.len() {
        return Err(Error::Dimension { expected: a.len(), found: rhs.len() });
    }
    thomas(a, rhs).map_or_else(|| pivoted(a, rhs), Ok)
}

fn scale(a: &Tridiagonal) -> f64 {
    a.diag.iter().chain(&a.lower).chain(&a.upper).fold(0.0, |m, v| m.max(v.abs()))
}

/// `None` when a pivot falls below `PIVOT_RATIO` times the matrix scale.
pub fn thomas(a: &Tridiagonal, rhs: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let tiny = PIVOT_RATIO * scale(a);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = a.diag[0];
    if pivot.abs() <= tiny {
        return None;
    }
    c[0] = if n > 1 { a.upper[0] / pivot } else { 0.0 };
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = a.diag[i] - a.lower[i - 1] * c[i - 1];
        if pivot.abs() <= tiny || !pivot.is_finite() {
            return None;
        }
        c[i] = if i + 1 < n { a.upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - a.lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Gaussian elimination with partial pivoting; row swaps widen the upper
/// band by one.
pub fn pivoted(a: &Tridiagonal, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    let tiny = PIVOT_RATIO * scale(a);
    // Row i holds (d, u1, u2) at columns i, i+1, i+2 after elimination.
    let mut d = a.diag.clone();
    let mut u1: Vec<f64> = (0..n).map(|i| if i + 1 < n { a.upper[i] } else { 0.0 }).collect();
    let mut u2 = vec![0.0; n];
    let mut l: Vec<f64> = a.lower.clone();
    let mut b = rhs.to_vec();
    for i in 0..n {
        if i + 1 < n && l[i].abs() > d[i].abs() {
            // Swap rows i and i+1. Row i+1 is (l[i], d[i+1], u1[i+1]) at
            // columns i, i+1, i+2.
            let (rd, ru1, ru2) = (l[i], d[i + 1], u1[i + 1]);
            l[i] = d[i];
            d[i + 1] = u1[i];
            u1[i + 1] = u2[i];
            d[i] = rd;
            u1[i] = ru1;
            u2[i] = ru2;
            b.swap(i, i + 1);
        }
        if d[i].abs() <= tiny || !d[i].is_finite() {
            return Err(Error::Numerical { message: "singular tridiagonal system".into(), residual: d[i].abs() });
        }
        if i + 1 < n {
            let f = l[i] / d[i];
            d[i + 1] -= f * u1[i];
            u1[i + 1] -= f * u2[i];
            b[i + 1] -= f * b[i];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn dense_solve(a: &Tridiagonal, rhs: &[f64]) -> Vec<f64> {
        let d = a.to_dense();
        let n = a.len();
        let m = DMatrix::from_fn(n, n, |i, j| d[i][j]);
        m.lu().solve(&DVector::from_column_slice(rhs)).unwrap().iter().copied().collect()
    }

    #[test]
    fn diagonally_dominant() {
        let a = Tridiagonal { lower: vec![-1.0; 4], diag: vec![4.0; 5], upper: vec![-1.0; 4] };
        let rhs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let x = solve(&a, &rhs).unwrap();
        let r = a.apply(&x);
        for (ri, bi) in r.iter().zip(rhs) {
            assert!((ri - bi).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_leading_pivot_uses_fallback() {
        let a = Tridiagonal { lower: vec![1.0, 1.0], diag: vec![0.0, 1.0, 2.0], upper: vec![1.0, 3.0] };
        assert!(thomas(&a, &[1.0, 2.0, 3.0]).is_none());
        let x = solve(&a, &[1.0, 2.0, 3.0]).unwrap();
        let expected = dense_solve(&a, &[1.0, 2.0, 3.0]);
        for (u, v) in x.iter().zip(expected) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = Tridiagonal { lower: vec![1.0], diag: vec![1.0, 1.0], upper: vec![1.0] };
        assert!(matches!(solve(&a, &[1.0, 1.0]), Err(Error::Numerical { .. })));
        assert!(solve(&a, &[1.0]).is_err());
    }

    #[test]
    fn zero_rhs_gives_exact_zero() {
        let a = Tridiagonal { lower: vec![-1.0; 9], diag: vec![3.0; 10], upper: vec![-1.0; 9] };
        assert!(solve(&a, &[0.0; 10]).unwrap().iter().all(|&v| v == 0.0));
    }

    proptest! {
        #[test]
        fn both_paths_match_dense(
            n in 2usize..12,
            seed in prop::collection::vec(-1.0f64..1.0, 36),
            rhs in prop::collection::vec(-1.0f64..1.0, 12),
        ) {
            let a = Tridiagonal {
                lower: seed[..n - 1].to_vec(),
                diag: seed[12..12 + n].iter().map(|v| v * 2.0).collect(),
                upper: seed[24..24 + n - 1].to_vec(),
            };
            let dense = a.to_dense();
            let det = DMatrix::from_fn(n, n, |i, j| dense[i][j]).determinant();
            prop_assume!(det.abs() > 1e-3);
            let expected = dense_solve(&a, &rhs[..n]);
            let x = pivoted(&a, &rhs[..n]).unwrap();
            let tol = 1e-8 * expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (u, v) in x.iter().zip(&expected) {
                prop_assert!((u - v).abs() < tol);
            }
        }

        #[test]
        fn thomas_on_dominant_matrices(
            n in 1usize..40,
            off in prop::collection::vec(-1.0f64..1.0, 80),
            rhs in prop::collection::vec(-1.0f64..1.0, 40),
        ) {
            let a = Tridiagonal {
                lower: off[..n - 1].to_vec(),
                diag: vec![2.5; n],
                upper: off[40..40 + n - 1].to_vec(),
            };
            let x = thomas(&a, &rhs[..n]).unwrap();
            for (ri, bi) in a.apply(&x).iter().zip(&rhs[..n]) {
                prop_assert!((ri - bi).abs() < 1e-13);
            }
        }
    }
}
