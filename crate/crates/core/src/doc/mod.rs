//! Discrete orthogonal convolution (DOC) kernels.
//!
//! `θ_j` is the convolution inverse of the BDF kernels:
//! `Σ_{m=0}^{j} θ_{j-m} b_m = δ_{j0}`. Everything here is exact.

mod decay;
mod roots;

pub use decay::{certify_decay, certify_decay_with, DecayBound, DecayCertificate};
pub use roots::{characteristic_roots, closed_form_theta, closed_form_theta_complex, CharacteristicRoots};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::BdfKernels;
use crate::par::Execution;
use crate::rational::{self, Rational};

/// Default number of kernels computed by the certification paths.
pub const DEFAULT_COUNT: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocKernels {
    k: usize,
    theta: Vec<Rational>,
}

impl DocKernels {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Largest computed index `J`.
    pub fn max_index(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.theta
    }

    pub fn get(&self, j: usize) -> Option<&Rational> {
        self.theta.get(j)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.theta.iter().map(rational::to_f64).collect()
    }

    /// First index with `θ_j = 0`, if any. DOC kernels of BDF-k are expected
    /// to be nonzero everywhere.
    pub fn first_zero(&self) -> Option<usize> {
        self.theta.iter().position(|t| t.is_zero())
    }
}

/// Computes `θ_0..θ_{count-1}` by forward recursion.
pub fn compute_doc_kernels(kernels: &BdfKernels, count: usize) -> Result<DocKernels> {
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    let b = kernels.coefficients();
    let k = kernels.order();
    let inv_b0 = Rational::one() / &b[0];
    let mut theta: Vec<Rational> = Vec::with_capacity(count);
    theta.push(inv_b0.clone());
    for j in 1..count {
        let s = (1..=j.min(k - 1)).fold(Rational::zero(), |acc, m| acc + &theta[j - m] * &b[m]);
        theta.push(-s * &inv_b0);
    }
    Ok(DocKernels { k, theta })
}

/// Which of the two orthogonality identities failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    /// `Σ_{l=j}^{n} θ_{n-l} b_{l-j} = δ_{nj}`
    DocAfterBdf,
    /// `Σ_{l=j}^{n} b_{n-l} θ_{l-j} = δ_{nj}`
    BdfAfterDoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthogonalityFailure {
    pub identity: Identity,
    pub n: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalityReport {
    pub holds: bool,
    /// Number of `(n, j)` pairs checked per identity.
    pub pairs_checked: usize,
    pub first_failure: Option<OrthogonalityFailure>,
}

/// Exact test of `Σ x_i y_i = target` (`target` is 1 or 0). The sum is kept
/// as an unreduced fraction `N/D` and compared as `N = target·D`, which
/// avoids a gcd per term; with denominators of a thousand bits that is the
/// dominant cost of the orthogonality sweep.
fn products_sum_to<'a>(terms: impl Iterator<Item = (&'a Rational, &'a Rational)>, target_one: bool) -> bool {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (x, y) in terms {
        let (tn, td) = (x.numer() * y.numer(), x.denom() * y.denom());
        num = num * &td + tn * &den;
        den *= td;
    }
    if target_one {
        num == den
    } else {
        num.is_zero()
    }
}

/// Checks both identities exactly for every `k ≤ j ≤ n' ≤ n`.
pub fn verify_orthogonality(
    b: &BdfKernels,
    theta: &DocKernels,
    n: usize,
    exec: Execution,
) -> Result<OrthogonalityReport> {
    let k = b.order();
    if n < k {
        return Err(Error::Precondition(format!("n = {n} must be at least k = {k}")));
    }
    let needed = n - k + 1;
    if theta.len() < needed {
        return Err(Error::Precondition(format!("need {needed} DOC kernels, only {} computed", theta.len())));
    }
    let bv = b.coefficients();
    let th = theta.values();
    let per_n = exec.map(n - k + 1, |offset| {
        let nn = k + offset;
        for j in k..=nn {
            let target_one = j == nn;
            // Only l - j < k (first identity) or n - l < k (second) contribute.
            let doc_after_bdf = (j..=nn.min(j + bv.len() - 1)).map(|l| (&th[nn - l], &bv[l - j]));
            if !products_sum_to(doc_after_bdf, target_one) {
                return Some(OrthogonalityFailure { identity: Identity::DocAfterBdf, n: nn, j });
            }
            let start = j.max((nn + 1).saturating_sub(bv.len()));
            let bdf_after_doc = (start..=nn).map(|l| (&bv[nn - l], &th[l - j]));
            if !products_sum_to(bdf_after_doc, target_one) {
                return Some(OrthogonalityFailure { identity: Identity::BdfAfterDoc, n: nn, j });
            }
        }
        None
    });
    let pairs_checked = (1..=n - k + 1).sum();
    let first_failure = per_n.into_iter().flatten().next();
    Ok(OrthogonalityReport { holds: first_failure.is_none(), pairs_checked, first_failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::generate_bdf_kernels;
    use crate::rational::{int, rat};

    fn doc(k: usize, count: usize) -> DocKernels {
        compute_doc_kernels(&generate_bdf_kernels(k).unwrap(), count).unwrap()
    }

    #[test]
    fn leading_values() {
        let t3 = doc(3, 4);
        assert_eq!(t3.values()[..2], [rat(6, 11), rat(42, 121)]);
        let t4 = doc(4, 4);
        assert_eq!(t4.values()[..3], [rat(12, 25), rat(276, 625), rat(2448, 15625)]);
        assert_eq!(rat(2448, 15625), rat(48 * 51, 25 * 25 * 25));
        let t5 = doc(5, 4);
        assert_eq!(t5.values()[..2], [rat(60, 137), rat(9780, 18769)]);
        assert_eq!(rat(9780, 18769), rat(60 * 163, 137 * 137));
    }

    #[test]
    fn theta0_is_reciprocal_of_b0() {
        for k in 1..=5 {
            let b = generate_bdf_kernels(k).unwrap();
            assert_eq!(doc(k, 1).values()[0], int(1) / b.get(0));
        }
    }

    #[test]
    fn zero_count_rejected() {
        let b = generate_bdf_kernels(3).unwrap();
        assert!(matches!(compute_doc_kernels(&b, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn recursion_solves_difference_equation() {
        // Direct oracle: Σ_{m=0}^{j} θ_{j-m} b_m = δ_{j0}, checked term by term.
        for k in 2..=5 {
            let b = generate_bdf_kernels(k).unwrap();
            let t = doc(k, 60);
            for j in 0..60 {
                let s: Rational = (0..=j).map(|m| &t.values()[j - m] * b.get(m)).sum();
                assert_eq!(s, if j == 0 { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn hand_evaluated_orthogonality_step() {
        // θ_1 b_0 + θ_0 b_1 = (42/121)(11/6) + (6/11)(-7/6) = 0
        let sum = rat(42, 121) * rat(11, 6) + rat(6, 11) * rat(-7, 6);
        assert_eq!(sum, int(0));
    }

    #[test]
    fn orthogonality_up_to_200() {
        for k in 2..=5 {
            let b = generate_bdf_kernels(k).unwrap();
            let t = compute_doc_kernels(&b, 200).unwrap();
            let report = verify_orthogonality(&b, &t, 200, Execution::Parallel).unwrap();
            assert!(report.holds, "k = {k}: {:?}", report.first_failure);
            assert_eq!(t.first_zero(), None);
        }
    }

    #[test]
    fn orthogonality_detects_corruption() {
        let b = generate_bdf_kernels(4).unwrap();
        let mut t = compute_doc_kernels(&b, 30).unwrap();
        t.theta[7] += rat(1, 1_000_000);
        let report = verify_orthogonality(&b, &t, 30, Execution::Sequential).unwrap();
        assert!(!report.holds);
        let failure = report.first_failure.unwrap();
        assert_eq!(failure.n - failure.j, 7);
    }

    #[test]
    fn orthogonality_preconditions() {
        let b = generate_bdf_kernels(3).unwrap();
        let t = compute_doc_kernels(&b, 5).unwrap();
        assert!(verify_orthogonality(&b, &t, 10, Execution::Sequential).is_err());
        assert!(verify_orthogonality(&b, &t, 2, Execution::Sequential).is_err());
        assert!(verify_orthogonality(&b, &t, 7, Execution::Sequential).unwrap().holds);
    }
}
