//! Polynomial helpers: exact rational polynomials with Sturm-sequence root
//! isolation, Chebyshev conversion, and a complex simultaneous-iteration root
//! finder for low-degree real polynomials.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    fn lead(&self) -> &Rational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    /// Euclidean remainder of `self` by a nonzero `divisor`.
    pub fn rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let factor = r.last().unwrap() / divisor.lead();
            for (i, c) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= &factor * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Exact quotient when `divisor` divides `self`.
    fn div_exact(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by zero polynomial");
        let Some(nd) = self.degree() else { return Self::new(vec![]) };
        if nd < dd {
            return Self::new(vec![]);
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let factor = &r[shift + dd] / divisor.lead();
            for (i, c) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= &factor * c;
            }
            q[shift] = factor;
        }
        Self::new(q)
    }

    fn monic_gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        let lead = a.lead().clone();
        Self::new(a.coeffs.iter().map(|c| c / &lead).collect())
    }

    /// The polynomial with every root kept once.
    pub fn squarefree(&self) -> Self {
        let g = Self::monic_gcd(self, &self.derivative());
        if g.degree() == Some(0) {
            self.clone()
        } else {
            self.div_exact(&g)
        }
    }

    fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(Self::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        chain
    }

    /// Every rational root, found by the rational root theorem on the
    /// integer-scaled polynomial. Only practical for small coefficients.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let Some(deg) = self.degree() else { return vec![] };
        if deg == 0 {
            return vec![];
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let mut roots = Vec::new();
        // Factor out x = 0 first so the constant term is nonzero.
        let zeros = ints.iter().take_while(|c| c.is_zero()).count();
        if zeros > 0 {
            roots.push(Rational::zero());
        }
        let ints = &ints[zeros..];
        if ints.len() <= 1 {
            return roots;
        }
        let (Some(p_divs), Some(q_divs)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) else {
            return roots;
        };
        for p in &p_divs {
            for q in &q_divs {
                for candidate in [Rational::new(p.clone(), q.clone()), Rational::new(-p.clone(), q.clone())] {
                    if self.eval(&candidate).is_zero() && !roots.contains(&candidate) {
                        roots.push(candidate);
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Distinct real roots in the closed interval `[lo, hi]`, each located to
    /// within `tol` by exact bisection. Returns isolating intervals' midpoints
    /// as `f64` together with exact values when a bisection point lands on a
    /// root.
    pub fn real_roots_in(&self, lo: &Rational, hi: &Rational, tol: f64) -> Result<Vec<RealRoot>> {
        if self.is_zero() {
            return Err(Error::Numerical { message: "zero polynomial has no isolated roots".into(), residual: 0.0 });
        }
        let p = self.squarefree();
        if p.degree() == Some(0) {
            return Ok(vec![]);
        }
        let chain = p.sturm_chain();
        let mut out = Vec::new();
        if p.eval(lo).is_zero() {
            out.push(RealRoot::exact(lo.clone()));
        }
        // Sturm counts roots in the half-open interval (a, b].
        let mut stack = vec![(lo.clone(), hi.clone())];
        let tol_r = tol_rational(tol);
        let mut guard = 0usize;
        while let Some((a, b)) = stack.pop() {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::Numerical { message: "root isolation did not terminate".into(), residual: tol });
            }
            let count = sign_changes(&chain, &a) - sign_changes(&chain, &b);
            match count {
                0 => {}
                1 => out.push(refine(&p, a, b, &tol_r)),
                _ => {
                    let mid = (&a + &b) / int(2);
                    stack.push((mid.clone(), b));
                    stack.push((a, mid));
                }
            }
        }
        out.sort_by(|x, y| x.approx.total_cmp(&y.approx));
        Ok(out)
    }
}

/// A real root located by [`RatPoly::real_roots_in`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoot {
    pub approx: f64,
    /// Present when the root is known exactly.
    pub exact: Option<Rational>,
    /// Width of the final bracketing interval.
    pub width: f64,
}

impl RealRoot {
    fn exact(r: Rational) -> Self {
        Self { approx: rational::to_f64(&r), exact: Some(r), width: 0.0 }
    }
}

fn tol_rational(tol: f64) -> Rational {
    Rational::from_float(tol).unwrap_or_else(|| rational::rat(1, 1_000_000_000_000))
}

fn refine(p: &RatPoly, mut a: Rational, mut b: Rational, tol: &Rational) -> RealRoot {
    if p.eval(&b).is_zero() {
        return RealRoot::exact(b);
    }
    // Any rational root inside the bracket is returned exactly.
    for r in p.rational_roots() {
        if r > a && r <= b {
            return RealRoot::exact(r);
        }
    }
    let sb = p.eval(&b).is_positive();
    while &b - &a > *tol {
        let mid = (&a + &b) / int(2);
        let v = p.eval(&mid);
        if v.is_zero() {
            return RealRoot::exact(mid);
        }
        if v.is_positive() == sb {
            b = mid;
        } else {
            a = mid;
        }
    }
    let width = rational::to_f64(&(&b - &a));
    RealRoot { approx: rational::to_f64(&((&a + &b) / int(2))), exact: None, width }
}

fn sign_changes(chain: &[RatPoly], x: &Rational) -> usize {
    let signs: Vec<bool> = chain.iter().map(|p| p.eval(x)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return None;
    }
    let limit = BigInt::from(10_000_000_000i64);
    if n > limit {
        return None;
    }
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            let other = &n / &i;
            if other != i {
                out.push(other);
            }
        }
        i += 1;
    }
    Some(out)
}

/// Coefficients of the Chebyshev polynomial `T_n(x)`, lowest degree first.
pub fn chebyshev_t(n: usize) -> Vec<Rational> {
    let mut prev = vec![int(1)];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![int(0), int(1)];
    for _ in 1..n {
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * int(2);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Roots of a real polynomial given by `coeffs` (highest degree first) via
/// Durand–Kerner iteration followed by Newton polishing.
pub fn complex_roots(coeffs_high_first: &[f64], tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    let lead = *coeffs_high_first.first().ok_or_else(|| Error::Precondition("empty polynomial".into()))?;
    if lead == 0.0 {
        return Err(Error::Precondition("leading coefficient must be nonzero".into()));
    }
    let monic: Vec<f64> = coeffs_high_first.iter().map(|c| c / lead).collect();
    let degree = monic.len() - 1;
    if degree == 0 {
        return Ok(vec![]);
    }
    let eval = |z: Complex64| monic.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let deriv = |z: Complex64| {
        monic[..degree]
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| acc * z + c * (degree - i) as f64)
    };
    let radius = 1.0 + monic[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..degree).map(|i| seed.powu(i as u32) * (0.5 * radius)).collect();
    let mut converged = false;
    for _ in 0..max_iter {
        let mut delta = 0.0f64;
        for i in 0..degree {
            let denom = (0..degree).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < tol {
            converged = true;
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*zi);
            if d.norm() == 0.0 {
                break;
            }
            *zi -= eval(*zi) / d;
        }
    }
    let residual = z.iter().map(|&zi| eval(zi).norm()).fold(0.0, f64::max);
    if !converged && residual > tol.sqrt() {
        return Err(Error::Numerical { message: "Durand–Kerner iteration did not converge".into(), residual });
    }
    Ok(z)
}

/// Solves the square complex system `a x = rhs` by Gaussian elimination
/// with partial pivoting.
pub fn solve_complex(mut a: Vec<Vec<Complex64>>, mut rhs: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = rhs.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension { expected: n, found: a.len() });
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        if a[pivot][col].norm() < 1e-300 {
            return Err(Error::Numerical { message: "singular complex system".into(), residual: 0.0 });
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (target, v) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= factor * v;
            }
            let v = rhs[col];
            rhs[row] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s = (row + 1..n).fold(rhs[row], |acc, c| acc - a[row][c] * x[c]);
        x[row] = s / a[row][row];
    }
    Ok(x)
}
