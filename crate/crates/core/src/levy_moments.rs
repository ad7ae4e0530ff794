//! Ground truth from the Lévy–Khintchine exponent.
//!
//! On the grid, the noise coordinates `ω_i` are independent and infinitely
//! divisible with cumulants `κ_1 = 0`, `κ_p = σ_i ∫ s^p ν(ds)` for `p >= 2`.
//! Everything here is computed from those cumulants alone: moments of
//! `⟨ω, φ⟩ = Σ φ_i ω_i`, joint moments of the coordinates, and a brute-force
//! Gram–Schmidt realization of the Wick (chaos) inner product.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{factorial, BlockTensor};
use crate::measures::{GridSpace, JumpMeasure, TestFunction};

/// Largest monomial basis the chaos oracle will build.
pub const ORACLE_BASIS_LIMIT: usize = 10_000;

/// Largest condition estimate of the scaled Gram matrix the oracle accepts.
pub const ORACLE_CONDITION_LIMIT: f64 = 1e12;

/// Cumulant description of the discretized centered Lévy noise.
#[derive(Debug, Clone)]
pub struct CumulantModel {
    measure: JumpMeasure,
    grid: GridSpace,
}

impl CumulantModel {
    pub fn new(measure: JumpMeasure, grid: GridSpace) -> Self {
        Self { measure, grid }
    }

    pub fn measure(&self) -> &JumpMeasure {
        &self.measure
    }

    pub fn grid(&self) -> &GridSpace {
        &self.grid
    }

    /// `κ_p` of the coordinate `ω_i`.
    pub fn point_cumulant(&self, point: usize, p: u32) -> f64 {
        if p < 2 {
            return 0.0;
        }
        self.grid.weight(point) * self.measure.moment_tilde(p - 2)
    }

    /// Raw moments `E[ω_i^1..=max]` of one coordinate.
    pub fn point_moments(&self, point: usize, max: usize) -> Vec<f64> {
        let kappa: Vec<f64> = (1..=max as u32).map(|p| self.point_cumulant(point, p)).collect();
        moments_from_cumulants(&kappa)
    }
}

/// `p`-th cumulant of `⟨ω, φ⟩`.
pub fn cumulant(model: &CumulantModel, phi: &TestFunction, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::Domain("cumulants start at order 1".into()));
    }
    if phi.len() != model.grid.len() {
        return Err(Error::GridMismatch);
    }
    if p == 1 {
        return Ok(0.0);
    }
    let spatial: f64 = model
        .grid
        .weights()
        .iter()
        .zip(phi.values())
        .map(|(s, f)| s * f.powi(p as i32))
        .sum();
    Ok(model.measure.nu_moment(p)? * spatial)
}

/// Raw moments `m_1..m_K` from cumulants `κ_1..κ_K` via
/// `m_p = Σ_{j=1}^{p} C(p-1, j-1) κ_j m_{p-j}`, `m_0 = 1`.
pub fn moments_from_cumulants(kappa: &[f64]) -> Vec<f64> {
    let mut m = vec![1.0];
    for p in 1..=kappa.len() {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for j in 1..=p {
            acc += binom * kappa[j - 1] * m[p - j];
            binom = binom * (p - j) as f64 / j as f64;
        }
        m.push(acc);
    }
    m.remove(0);
    m
}

/// Moments `E[⟨ω, φ⟩^k]`, `k = 1..=max`.
pub fn field_moments(model: &CumulantModel, phi: &TestFunction, max: u32) -> Result<Vec<f64>> {
    let kappa = (1..=max).map(|p| cumulant(model, phi, p)).collect::<Result<Vec<_>>>()?;
    Ok(moments_from_cumulants(&kappa))
}

/// `E[Π_i ω_i^{e_i}]`.
pub fn joint_moment(model: &CumulantModel, exponents: &[u32]) -> f64 {
    exponents
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            if e == 0 {
                1.0
            } else {
                model.point_moments(i, e as usize)[e as usize - 1]
            }
        })
        .product()
}

/// Per-invocation memo of joint moments.
struct JointMoments<'a> {
    per_point: Vec<Vec<f64>>,
    memo: HashMap<Vec<u32>, f64>,
    _model: &'a CumulantModel,
}

impl<'a> JointMoments<'a> {
    fn new(model: &'a CumulantModel, max_degree: usize) -> Self {
        let per_point = (0..model.grid.len())
            .map(|i| {
                let mut m = vec![1.0];
                m.extend(model.point_moments(i, max_degree));
                m
            })
            .collect();
        Self {
            per_point,
            memo: HashMap::new(),
            _model: model,
        }
    }

    fn get(&mut self, exponents: &[u32]) -> f64 {
        if let Some(&v) = self.memo.get(exponents) {
            return v;
        }
        let v = exponents
            .iter()
            .enumerate()
            .map(|(i, &e)| self.per_point[i][e as usize])
            .product();
        self.memo.insert(exponents.to_vec(), v);
        v
    }
}

/// Polynomial in the grid coordinates, keyed by exponent vectors.
pub type Polynomial = BTreeMap<Vec<u32>, f64>;

fn add_exponents(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Exponent vectors over `vars` variables with total degree `<= max_degree`,
/// graded then reverse-lexicographic.
fn monomials(vars: usize, max_degree: usize) -> Vec<Vec<u32>> {
    fn rec(vars: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == vars {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=rest).rev() {
            cur.push(e);
            rec(vars, rest - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..=max_degree as u32 {
        rec(vars, d, &mut Vec::new(), &mut out);
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `⟨ω^{⊗n}, f⟩` as a polynomial: each multiset contributes its orbit size.
pub fn monomial_expansion(f: &BlockTensor) -> Polynomial {
    let lay = f.layout();
    let mut poly = Polynomial::new();
    for (i, rep) in lay.representatives().iter().enumerate() {
        let v = f.values()[i];
        if v == 0.0 {
            continue;
        }
        let mut e = vec![0u32; lay.grid_size()];
        for &x in rep {
            e[x] += 1;
        }
        *poly.entry(e).or_insert(0.0) += v * lay.orbit_size(i);
    }
    poly
}

/// Gram–Schmidt projector onto the complement of polynomials of degree `< n`.
pub struct ChaosOracle<'a> {
    level: usize,
    lower: Vec<Vec<u32>>,
    inv_gram: DMatrix<f64>,
    moments: JointMoments<'a>,
}

impl<'a> ChaosOracle<'a> {
    pub fn new(model: &'a CumulantModel, level: usize) -> Result<Self> {
        let vars = model.grid.len();
        let basis = binomial(vars + level, level);
        if basis > ORACLE_BASIS_LIMIT as f64 {
            return Err(Error::OracleScaleExceeded {
                basis: basis as usize,
                limit: ORACLE_BASIS_LIMIT,
            });
        }
        let mut moments = JointMoments::new(model, 2 * level);
        let lower = if level == 0 {
            Vec::new()
        } else {
            monomials(vars, level - 1)
        };
        let l = lower.len();
        let gram = DMatrix::from_fn(l, l, |i, j| moments.get(&add_exponents(&lower[i], &lower[j])));
        let inv_gram = if l == 0 {
            DMatrix::zeros(0, 0)
        } else {
            let scale = DVector::from_fn(l, |i, _| gram[(i, i)].sqrt().recip());
            let scaled = DMatrix::from_fn(l, l, |i, j| gram[(i, j)] * scale[i] * scale[j]);
            let eig = SymmetricEigen::new(scaled.clone()).eigenvalues;
            let (lo, hi) = eig
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e.abs())));
            let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            if condition > ORACLE_CONDITION_LIMIT {
                return Err(Error::IllConditioned { condition });
            }
            let inv = scaled.full_piv_lu().try_inverse().ok_or(Error::IllConditioned {
                condition: f64::INFINITY,
            })?;
            DMatrix::from_fn(l, l, |i, j| inv[(i, j)] * scale[i] * scale[j])
        };
        Ok(Self {
            level,
            lower,
            inv_gram,
            moments,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `E[p q]`.
    pub fn expectation_product(&mut self, p: &Polynomial, q: &Polynomial) -> f64 {
        let mut sum = 0.0;
        for (ea, ca) in p {
            for (eb, cb) in q {
                sum += ca * cb * self.moments.get(&add_exponents(ea, eb));
            }
        }
        sum
    }

    fn lower_moments(&mut self, p: &Polynomial) -> DVector<f64> {
        let lower = self.lower.clone();
        DVector::from_iterator(
            lower.len(),
            lower.iter().map(|m| {
                p.iter()
                    .map(|(e, c)| c * self.moments.get(&add_exponents(m, e)))
                    .sum::<f64>()
            }),
        )
    }

    /// `:p:`, the projection of `p` onto the complement of degree `< n`.
    pub fn wick(&mut self, p: &Polynomial) -> Polynomial {
        let rhs = self.lower_moments(p);
        let coeffs = &self.inv_gram * rhs;
        let mut out = p.clone();
        for (m, c) in self.lower.iter().zip(coeffs.iter()) {
            *out.entry(m.clone()).or_insert(0.0) -= c;
        }
        out
    }

    /// `E[:p: :q:] = E[pq] - b_p^T G^{-1} b_q`.
    pub fn wick_product_expectation(&mut self, p: &Polynomial, q: &Polynomial) -> f64 {
        let full = self.expectation_product(p, q);
        let bp = self.lower_moments(p);
        let bq = self.lower_moments(q);
        full - bp.dot(&(&self.inv_gram * bq))
    }

    /// `(f, g)_{𝔉_n} = E[:⟨ω^{⊗n},f⟩: :⟨ω^{⊗n},g⟩:] / n!`.
    pub fn inner_product(&mut self, f: &BlockTensor, g: &BlockTensor) -> Result<f64> {
        for t in [f, g] {
            if !t.is_symmetric_level() || t.level() != self.level {
                return Err(Error::DegreeMismatch {
                    expected: self.level,
                    found: t.level(),
                });
            }
            if t.layout().grid_size() != self.moments.per_point.len() {
                return Err(Error::GridMismatch);
            }
        }
        let (p, q) = (monomial_expansion(f), monomial_expansion(g));
        Ok(self.wick_product_expectation(&p, &q) / factorial(self.level))
    }
}

/// One-shot form of [`ChaosOracle::inner_product`].
pub fn chaos_oracle_inner_product(f: &BlockTensor, g: &BlockTensor, model: &CumulantModel, n: usize) -> Result<f64> {
    ChaosOracle::new(model, n)?.inner_product(f, g)
}
