use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kernel::BdfKernels;
use crate::rational::{self, Rational};

pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;

/// The banded lower-triangular Toeplitz matrix `B_{k,l}` with `b_0..b_{k-1}`
/// down its diagonals, and its symmetrization `B_k = B_{k,l} + B_{k,l}^T`.
///
/// Only the band is stored; entries are produced on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzForm {
    pub k: usize,
    pub m: usize,
    band: Vec<Rational>,
}

pub fn build_toeplitz(kernels: &BdfKernels, m: usize) -> Result<ToeplitzForm> {
    if m == 0 {
        return Err(Error::Precondition("matrix dimension must be at least 1".into()));
    }
    Ok(ToeplitzForm { k: kernels.order(), m, band: kernels.coefficients().to_vec() })
}

impl ToeplitzForm {
    /// Entry `(i, j)` of `B_{k,l}`.
    pub fn lower_entry(&self, i: usize, j: usize) -> Rational {
        if j > i {
            return Rational::zero();
        }
        self.band.get(i - j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Entry `(i, j)` of `B_k`.
    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.lower_entry(i, j) + self.lower_entry(j, i)
    }

    /// `B_k` as a dense row-major matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| (0..self.m).map(|j| rational::to_f64(&self.entry(i, j))).collect()).collect()
    }

    /// Half-bandwidth of `B_k`.
    pub fn bandwidth(&self) -> usize {
        self.band.len().saturating_sub(1).min(self.m - 1)
    }

    /// `B_k` entries at offsets `0..=bandwidth` in floating point.
    fn symmetric_band(&self) -> Vec<f64> {
        (0..=self.bandwidth())
            .map(|d| {
                let b = rational::to_f64(&self.band[d]);
                if d == 0 {
                    2.0 * b
                } else {
                    b
                }
            })
            .collect()
    }

    /// Number of eigenvalues of `B_k` strictly below `shift`, read off the
    /// signs of the pivots of `LDL^T = B_k - shift·I` (Sylvester's law of
    /// inertia).
    pub fn count_below(&self, shift: f64) -> usize {
        let a = self.symmetric_band();
        let p = a.len() - 1;
        let m = self.m;
        // l[r][c] holds L_{r, r-1-c}, the subdiagonal part of row r.
        let mut l = vec![vec![0.0; p]; m];
        let mut d = vec![0.0; m];
        let mut negatives = 0;
        for j in 0..m {
            let lo = j.saturating_sub(p);
            let mut dj = a[0] - shift;
            for i in lo..j {
                let lji = l[j][j - 1 - i];
                dj -= lji * lji * d[i];
            }
            if dj == 0.0 {
                // Perturb to the negative side; ties are measure-zero and the
                // bisection only needs a consistent count.
                dj = -f64::EPSILON * (a[0].abs() + shift.abs()).max(f64::MIN_POSITIVE);
            }
            d[j] = dj;
            if dj < 0.0 {
                negatives += 1;
            }
            for r in j + 1..=(j + p).min(m - 1) {
                let mut v = a[r - j];
                for i in r.saturating_sub(p)..j {
                    v -= l[r][r - 1 - i] * l[j][j - 1 - i] * d[i];
                }
                l[r][r - 1 - j] = v / dj;
            }
        }
        negatives
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let a = self.symmetric_band();
        let off: f64 = a[1..].iter().map(|v| 2.0 * v.abs()).sum();
        (a[0] - off, a[0] + off)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize, tol: f64) -> Result<f64> {
        if index >= self.m {
            return Err(Error::Precondition(format!("eigenvalue index {index} out of range for m = {}", self.m)));
        }
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
        }
        let (mut lo, mut hi) = self.gershgorin();
        lo -= tol;
        hi += tol;
        for _ in 0..200 {
            if hi - lo <= tol {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Numerical { message: "eigenvalue bisection did not converge".into(), residual: hi - lo })
    }
}

pub fn min_eigenvalue(t: &ToeplitzForm, tol: f64) -> Result<f64> {
    t.eigenvalue(0, tol)
}

pub fn max_eigenvalue(t: &ToeplitzForm, tol: f64) -> Result<f64> {
    t.eigenvalue(t.m - 1, tol)
}
