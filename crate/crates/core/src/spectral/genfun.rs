use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::surd::{sqrt_parts, QuadSurd};
use crate::error::{Error, Result};
use crate::kernel::BdfKernels;
use crate::poly::{chebyshev_t, RatPoly};
use crate::rational::{self, int, Rational};

/// `g(φ) = 2 Σ_j b_j cos(jφ)`, the symbol of `B_{k,l} + B_{k,l}^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingFunction {
    pub k: usize,
    /// `2 b_j` for `j = 0..k`.
    pub cosine_coefficients: Vec<Rational>,
}

impl GeneratingFunction {
    pub fn new(kernels: &BdfKernels) -> Self {
        Self { k: kernels.order(), cosine_coefficients: kernels.coefficients().iter().map(|b| b * int(2)).collect() }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.cosine_coefficients.iter().enumerate().map(|(j, c)| rational::to_f64(c) * (j as f64 * phi).cos()).sum()
    }

    /// `Z(x)` with `g(φ) = Z(cos φ)`, obtained by replacing `cos(jφ)` with the
    /// Chebyshev polynomial `T_j`. Exact.
    pub fn chebyshev_polynomial(&self) -> RatPoly {
        let mut coeffs = vec![Rational::zero(); self.cosine_coefficients.len().max(1)];
        for (j, c) in self.cosine_coefficients.iter().enumerate() {
            for (i, t) in chebyshev_t(j).iter().enumerate() {
                coeffs[i] += c * t;
            }
        }
        RatPoly::new(coeffs)
    }

    /// Exact value at a rational `cos φ`, e.g. `φ = 0` (`x = 1`) or `φ = π`
    /// (`x = -1`).
    pub fn eval_at_cos(&self, x: &Rational) -> Rational {
        self.chebyshev_polynomial().eval(x)
    }
}

/// Extremes of the generating function over `φ`, i.e. of `Z` over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaBound {
    pub k: usize,
    /// `σ_k = min g`.
    pub sigma: f64,
    /// Minimizing `cos φ`.
    pub argmin_cos: f64,
    /// `σ_k` when the minimizer is rational.
    #[serde(skip)]
    pub exact: Option<Rational>,
    /// Closed form as text: a fraction, or `(A±B*sqrt(d))/C` when the
    /// minimizer is a quadratic irrational.
    pub exact_form: Option<String>,
    pub g_max: f64,
    pub argmax_cos: f64,
}

/// Minimizes (and maximizes) `g` by locating the critical points of `Z` in
/// `[-1, 1]` with exact Sturm isolation and bisection to `tol`.
pub fn minimize_generating_function(g: &GeneratingFunction, tol: f64) -> Result<SigmaBound> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let z = g.chebyshev_polynomial();
    let dz = z.derivative();
    let lo = -Rational::one();
    let hi = Rational::one();

    // (x, value, exact value, exact form)
    let mut candidates: Vec<(f64, f64, Option<Rational>, Option<String>)> = Vec::new();
    for end in [&lo, &hi] {
        let v = z.eval(end);
        candidates.push((
            rational::to_f64(end),
            rational::to_f64(&v),
            Some(v.clone()),
            Some(rational::fraction_string(&v)),
        ));
    }
    if !dz.is_zero() {
        let surd_roots = quadratic_surd_roots(&dz);
        for root in dz.real_roots_in(&lo, &hi, tol)? {
            if let Some(x) = &root.exact {
                let v = z.eval(x);
                candidates.push((
                    root.approx,
                    rational::to_f64(&v),
                    Some(v.clone()),
                    Some(rational::fraction_string(&v)),
                ));
                continue;
            }
            let surd = surd_roots
                .iter()
                .find(|s| (s.to_f64() - root.approx).abs() <= 4.0 * tol.max(root.width))
                .map(|x| eval_surd(&z, x));
            // The critical value is insensitive to the root error to first
            // order; evaluate in floating point at the bracket midpoint.
            let value = surd.as_ref().map(QuadSurd::to_f64).unwrap_or_else(|| z.eval_f64(root.approx));
            candidates.push((root.approx, value, None, surd.map(|s| s.to_string())));
        }
    }

    let min = candidates.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap().clone();
    let max = candidates.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().clone();
    Ok(SigmaBound {
        k: g.k,
        sigma: min.1,
        argmin_cos: min.0,
        exact: min.2,
        exact_form: min.3,
        g_max: max.1,
        argmax_cos: max.0,
    })
}

/// Both roots of a quadratic as elements of `Q(√d)`, when the discriminant
/// is positive and not a perfect square.
fn quadratic_surd_roots(p: &RatPoly) -> Vec<QuadSurd> {
    if p.degree() != Some(2) {
        return vec![];
    }
    let [c0, c1, c2] = [&p.coeffs()[0], &p.coeffs()[1], &p.coeffs()[2]];
    let disc = c1 * c1 - int(4) * c2 * c0;
    if !disc.is_positive() {
        return vec![];
    }
    let Some((s, d)) = sqrt_parts(&disc) else { return vec![] };
    if d == BigInt::one() {
        return vec![];
    }
    let two_a = c2 * int(2);
    let centre = -c1 / &two_a;
    let half_width = s / &two_a;
    vec![QuadSurd { a: centre.clone(), b: half_width.clone(), d: d.clone() }, QuadSurd { a: centre, b: -half_width, d }]
}

fn eval_surd(p: &RatPoly, x: &QuadSurd) -> QuadSurd {
    p.coeffs().iter().rev().fold(QuadSurd::rational(Rational::zero(), x.d.clone()), |acc, c| {
        acc.mul(x).add(&QuadSurd::rational(c.clone(), x.d.clone()))
    })
}
