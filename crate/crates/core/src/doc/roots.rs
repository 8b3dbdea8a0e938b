use num_complex::Complex64;

use super::compute_doc_kernels;
use crate::error::{Error, Result};
use crate::kernel::generate_bdf_kernels;
use crate::poly::{complex_roots, solve_complex};

/// Roots `λ_i` of `Σ_{m=0}^{k-1} b_m λ^{k-1-m} = 0` and the weights `d_i`
/// such that `θ_j = Σ_i d_i λ_i^j` for every `j ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicRoots {
    pub k: usize,
    /// Sorted by descending modulus; conjugate pairs list the root with
    /// negative imaginary part first.
    pub roots: Vec<Complex64>,
    pub d: Vec<Complex64>,
    /// Largest `|p(λ_i)|` over the roots, with `p` using the `b_m` directly.
    pub residual: f64,
}

impl CharacteristicRoots {
    pub fn spectral_radius(&self) -> f64 {
        self.roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.norm()).collect()
    }
}

const RESIDUAL_LIMIT: f64 = 1e-12;

/// Finds the characteristic roots for `k` in `2..=5` and fits the `d_i` to
/// `θ_0..θ_{k-2}` by solving the Vandermonde system.
pub fn characteristic_roots(k: usize) -> Result<CharacteristicRoots> {
    if !(2..=5).contains(&k) {
        return Err(Error::UnsupportedOrder(k, "2..=5"));
    }
    let kernels = generate_bdf_kernels(k)?;
    let b = kernels.to_f64();
    let raw = complex_roots(&b, 1e-15, 1000)?;
    let roots = canonical_order(raw);

    let eval = |z: Complex64| b.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let residual = roots.iter().map(|&z| eval(z).norm()).fold(0.0, f64::max);
    if residual > RESIDUAL_LIMIT {
        return Err(Error::Numerical { message: format!("characteristic roots for k = {k} inaccurate"), residual });
    }

    let theta = compute_doc_kernels(&kernels, k - 1)?.to_f64();
    let n = k - 1;
    let vandermonde: Vec<Vec<Complex64>> = (0..n).map(|j| roots.iter().map(|r| r.powu(j as u32)).collect()).collect();
    let rhs: Vec<Complex64> = theta.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    let d = solve_complex(vandermonde, rhs)?;
    Ok(CharacteristicRoots { k, roots, d, residual })
}

/// Snaps near-real roots to the real axis, makes conjugate pairs exact, and
/// sorts.
fn canonical_order(raw: Vec<Complex64>) -> Vec<Complex64> {
    let scale = raw.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let mut lower: Vec<Complex64> = Vec::new();
    let mut real: Vec<Complex64> = Vec::new();
    for z in &raw {
        if z.im.abs() <= 1e-10 * scale {
            real.push(Complex64::new(z.re, 0.0));
        } else if z.im < 0.0 {
            // Average with the partner so the pair is exactly conjugate.
            let partner = raw
                .iter()
                .filter(|w| w.im > 0.0)
                .min_by(|a, b| (a.conj() - z).norm().total_cmp(&(b.conj() - z).norm()))
                .copied()
                .unwrap_or(z.conj());
            lower.push((z + partner.conj()) * 0.5);
        }
    }
    let mut out: Vec<Complex64> = real;
    for z in lower {
        out.push(z);
        out.push(z.conj());
    }
    // Pair members have bit-identical moduli, so they stay adjacent.
    out.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.im.total_cmp(&b.im)));
    out
}

/// `Σ_i d_i λ_i^j` without discarding the imaginary part.
pub fn closed_form_theta_complex(roots: &CharacteristicRoots, j: usize) -> Complex64 {
    roots.roots.iter().zip(&roots.d).map(|(l, d)| d * l.powu(j as u32)).sum()
}

/// Real part of the closed form. Conjugate symmetry makes the imaginary part
/// vanish up to rounding.
pub fn closed_form_theta(roots: &CharacteristicRoots, j: usize) -> f64 {
    closed_form_theta_complex(roots, j).re
}
