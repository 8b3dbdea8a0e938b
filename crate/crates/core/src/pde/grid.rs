use crate::error::{Error, Result};

/// Uniform grid on `[0, L]` with `M` interior nodes `x_i = i·h`, `h = L/(M+1)`.
/// The boundary values are zero and never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub num_interior: usize,
    pub length: f64,
}

impl Grid1D {
    pub fn new(num_interior: usize, length: f64) -> Result<Self> {
        if num_interior < 2 {
            return Err(Error::Precondition(format!("need at least 2 interior nodes, got {num_interior}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { num_interior, length })
    }

    pub fn unit(num_interior: usize) -> Result<Self> {
        Self::new(num_interior, 1.0)
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.num_interior + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.num_interior).map(|i| i as f64 * h).collect()
    }

    /// Eigenvalue of `-d²/dx²` (three-point stencil) for the mode
    /// `sin(jπx/L)`: `(4/h²) sin²(jπh/(2L))`.
    pub fn dirichlet_eigenvalue(&self, j: usize) -> f64 {
        let h = self.spacing();
        let s = (j as f64 * std::f64::consts::PI * h / (2.0 * self.length)).sin();
        4.0 * s * s / (h * h)
    }
}

/// The spatial setting of a run: a finite-difference grid, or a single
/// unknown with no spatial operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Space {
    Grid(Grid1D),
    Scalar,
}

impl Space {
    pub fn len(&self) -> usize {
        match self {
            Space::Grid(g) => g.num_interior,
            Space::Scalar => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample points; the scalar mode evaluates problem functions at `x = 0`.
    pub fn nodes(&self) -> Vec<f64> {
        match self {
            Space::Grid(g) => g.nodes(),
            Space::Scalar => vec![0.0],
        }
    }

    /// Quadrature weight of the discrete norm.
    pub fn weight(&self) -> f64 {
        match self {
            Space::Grid(g) => g.spacing(),
            Space::Scalar => 1.0,
        }
    }

    /// `sqrt(w Σ v_i²)`.
    pub fn norm(&self, v: &[f64]) -> f64 {
        (self.weight() * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// `εΔ_h v` written as `ε/h²·((v_{i+1} - v_i) - (v_i - v_{i-1}))`.
    /// Neighbouring values of a smooth grid function are close, so both
    /// differences are exact and only the final scaling rounds; the
    /// three-product form would add noise of size `ε|v|/h² · 2^{-52}`.
    pub fn apply_operator(&self, epsilon: f64, v: &[f64]) -> Vec<f64> {
        match self {
            Space::Scalar => vec![0.0; v.len()],
            Space::Grid(g) => {
                let c = epsilon / (g.spacing() * g.spacing());
                let n = v.len();
                (0..n)
                    .map(|i| {
                        let left = if i == 0 { 0.0 } else { v[i - 1] };
                        let right = if i + 1 == n { 0.0 } else { v[i + 1] };
                        c * ((right - v[i]) - (v[i] - left))
                    })
                    .collect()
            }
        }
    }

    pub fn operator(&self, epsilon: f64) -> Tridiagonal {
        match self {
            Space::Grid(g) => assemble_operator(g, epsilon),
            Space::Scalar => Tridiagonal { lower: vec![], diag: vec![0.0], upper: vec![] },
        }
    }
}

/// Tridiagonal matrix; `lower[i]` is entry `(i+1, i)`, `upper[i]` is `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.lower[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i + 1][i] = self.lower[i];
                a[i][i + 1] = self.upper[i];
            }
        }
        a
    }
}

/// `ε/h²·[1, -2, 1]` with the Dirichlet rows eliminated, so `A u ≈ εΔu`.
pub fn assemble_operator(grid: &Grid1D, epsilon: f64) -> Tridiagonal {
    let m = grid.num_interior;
    let c = epsilon / (grid.spacing() * grid.spacing());
    Tridiagonal { lower: vec![c; m - 1], diag: vec![-2.0 * c; m], upper: vec![c; m - 1] }
}
