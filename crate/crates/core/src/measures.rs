//! Jump measures, spatial quadrature grids and test functions.
//!
//! A [`JumpMeasure`] is a finite weighted atom set standing in for the
//! second-moment reweighted jump measure `ν̃(ds) = s² ν(ds)` on `ℝ∖{0}`.
//! The Lévy measure `ν` itself is never stored: only its moments of order
//! `p >= 2` are exposed, through `∫ s^p ν(ds) = ∫ s^(p-2) ν̃(ds)`.
//!
//! Exponential integrability of `ν̃` holds automatically for finitely many
//! atoms and is not checked.

use nalgebra::{DMatrix, SymmetricEigen};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Finite atom representation of `ν̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpMeasure {
    locations: Vec<f64>,
    weights: Vec<f64>,
}

impl JumpMeasure {
    /// Builds a measure from `(location, weight)` pairs.
    ///
    /// Locations must be finite, nonzero and pairwise distinct; weights must be
    /// finite and strictly positive.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (locations, weights): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
        if locations.is_empty() {
            return Err(Error::InvalidMeasure("at least one atom is required".into()));
        }
        for (j, (&s, &w)) in locations.iter().zip(&weights).enumerate() {
            if !s.is_finite() || s == 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom {j}: location {s} must be finite and nonzero"
                )));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom {j}: weight {w} must be finite and positive"
                )));
            }
        }
        let mut sorted = locations.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMeasure("atom locations must be distinct".into()));
        }
        Ok(Self { locations, weights })
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atom_count(&self) -> usize {
        self.locations.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.locations.iter().copied().zip(self.weights.iter().copied())
    }

    /// Total mass `ν̃(ℛ)`.
    pub fn mass(&self) -> f64 {
        self.moment_tilde(0)
    }

    /// `∫ s^k ν̃(ds)`.
    pub fn moment_tilde(&self, k: u32) -> f64 {
        self.atoms().map(|(s, w)| w * s.powi(k as i32)).sum()
    }

    /// `∫ s^p ν(ds)` for `p >= 2`.
    pub fn nu_moment(&self, p: u32) -> Result<f64> {
        if p < 2 {
            return Err(Error::Domain(format!(
                "moments of the Lévy measure are only defined for order >= 2, got {p}"
            )));
        }
        Ok(self.moment_tilde(p - 2))
    }

    /// The measure with every location multiplied by `c` and unchanged weights.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.atoms().map(|(s, w)| (c * s, w)))
    }

    /// SHA-256 over the little-endian bytes of all atoms, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (s, w) in self.atoms() {
            hasher.update(s.to_le_bytes());
            hasher.update(w.to_le_bytes());
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Free-function form of [`JumpMeasure::moment_tilde`].
pub fn moment_tilde(m: &JumpMeasure, k: u32) -> f64 {
    m.moment_tilde(k)
}

/// Free-function form of [`JumpMeasure::nu_moment`].
pub fn nu_moment(m: &JumpMeasure, p: u32) -> Result<f64> {
    m.nu_moment(p)
}

/// `M`-point Gauss rule for the gamma jump weight `s e^{-s} ds` on `(0, ∞)`.
///
/// Nodes are the eigenvalues of the Jacobi matrix of the monic generalized
/// Laguerre polynomials with parameter 1 (`a_n = 2n + 2`, `b_n = n(n + 1)`),
/// polished by Newton steps on the degree-`M` polynomial. Weights come from the
/// Christoffel function `1 / Σ_{k<M} p̂_k(x)²` of the orthonormal polynomials,
/// which keeps full relative accuracy in the far tail where eigenvector
/// components underflow. The total mass is `Γ(2) = 1` and the rule integrates
/// polynomials of degree `<= 2M - 1` exactly.
pub fn gauss_laguerre_gamma(m: usize) -> Result<JumpMeasure> {
    if m == 0 {
        return Err(Error::Domain("gamma quadrature needs at least one node".into()));
    }
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            2.0 * i as f64 + 2.0
        } else if i + 1 == j || j + 1 == i {
            let n = i.max(j) as f64;
            (n * (n + 1.0)).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let atoms = nodes
        .into_iter()
        .map(|mut x| {
            for _ in 0..3 {
                let (_, p, dp) = laguerre_orthonormal(m, x);
                if dp != 0.0 {
                    x -= p / dp;
                }
            }
            (x, 1.0 / laguerre_orthonormal(m, x).0)
        })
        .collect::<Vec<_>>();
    JumpMeasure::new(atoms)
}

/// `(Σ_{k<m} p̂_k(x)², p̂_m(x), p̂_m'(x))` for the orthonormal parameter-1 Laguerre family.
fn laguerre_orthonormal(m: usize, x: f64) -> (f64, f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut sum = 1.0;
    for k in 0..m {
        let kf = k as f64;
        let a = 2.0 * kf + 2.0;
        let sb = (kf * (kf + 1.0)).sqrt();
        let sb_next = ((kf + 1.0) * (kf + 2.0)).sqrt();
        let p_next = ((x - a) * p - sb * p_prev) / sb_next;
        let d_next = (p + (x - a) * d - sb * d_prev) / sb_next;
        (p_prev, p) = (p, p_next);
        (d_prev, d) = (d, d_next);
        if k + 1 < m {
            sum += p * p;
        }
    }
    (sum, p, d)
}

/// Quadrature surrogate for the spatial measure space `(X, σ)`.
///
/// Points are identified by their index `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpace {
    weights: Vec<f64>,
}

impl GridSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidGrid("at least one point is required".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::InvalidGrid(format!("weight {w} must be finite and positive")));
        }
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, point: usize) -> f64 {
        self.weights[point]
    }
}

/// A function on the grid, one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(grid: &GridSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "test function has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("test function values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(grid: &GridSpace, value: f64) -> Self {
        Self {
            values: vec![value; grid.len()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, point: usize) -> f64 {
        self.values[point]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
