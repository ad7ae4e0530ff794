//! Monic orthogonal polynomials of the jump measure.
//!
//! The polynomials satisfy `s P_n(s) = P_{n+1}(s) + a_n P_n(s) + b_n P_{n-1}(s)`
//! with `P_{-1} = 0`, `P_0 = 1`. Coefficients are computed by the discretized
//! Stieltjes procedure over the atoms; Hankel determinants are not used.

use crate::error::{Error, Result};
use crate::measures::JumpMeasure;

/// Relative threshold below which `b_k` is treated as exhaustion of the measure.
pub const DEGENERACY_THRESHOLD: f64 = 1e-13;

/// Three-term recurrence coefficients and squared norms of `P_0, ..., P_{N-1}`.
///
/// `a(n)` and `norm_sq(n)` are available for `n < depth`, `b(n)` for
/// `1 <= n < depth`. Entries at index `>= support_rank` belong to polynomials
/// that vanish on the support of the measure: their norms and `b` are zero and
/// their `a` is zero by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    a: Vec<f64>,
    b: Vec<f64>,
    norm_sq: Vec<f64>,
    support_rank: usize,
}

impl RecurrenceTable {
    /// Builds a table from explicit coefficients.
    ///
    /// `b` is indexed from 1, so `b.len() + 1 == a.len()`. Norms follow from
    /// `norm_sq_n = norm_sq_0 · b_1 ⋯ b_n`.
    pub fn from_coefficients(a: Vec<f64>, b: Vec<f64>, norm_sq_0: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Domain("recurrence table needs depth >= 1".into()));
        }
        if b.len() + 1 != a.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} a-coefficients need {} b-coefficients, got {}",
                a.len(),
                a.len() - 1,
                b.len()
            )));
        }
        if !(norm_sq_0 > 0.0 && norm_sq_0.is_finite()) {
            return Err(Error::Domain(format!("norm_sq_0 = {norm_sq_0} must be positive")));
        }
        if let Some(k) = b.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::DegenerateMeasure { depth: k + 1 });
        }
        let mut full_b = Vec::with_capacity(a.len());
        full_b.push(0.0);
        full_b.extend(b);
        let mut norm_sq = vec![norm_sq_0];
        for k in 1..a.len() {
            norm_sq.push(norm_sq[k - 1] * full_b[k]);
        }
        let support_rank = a.len();
        Ok(Self {
            a,
            b: full_b,
            norm_sq,
            support_rank,
        })
    }

    /// Number of polynomials `P_0..P_{N-1}` described by the table.
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// Number of leading polynomials with strictly positive norm.
    pub fn support_rank(&self) -> usize {
        self.support_rank
    }

    pub fn a(&self, n: usize) -> f64 {
        self.a[n]
    }

    pub fn b(&self, n: usize) -> f64 {
        assert!(n >= 1, "b is indexed from 1");
        self.b[n]
    }

    pub fn norm_sq(&self, n: usize) -> f64 {
        self.norm_sq[n]
    }

    pub fn a_coefficients(&self) -> &[f64] {
        &self.a
    }

    /// `b_1, ..., b_{N-1}`.
    pub fn b_coefficients(&self) -> &[f64] {
        &self.b[1..]
    }

    pub fn norms_sq(&self) -> &[f64] {
        &self.norm_sq
    }

    /// Copy of the table with `b_k` multiplied by `1 + relative`, leaving the
    /// norms untouched. Used for fault injection; the result is inconsistent
    /// by construction.
    pub fn with_perturbed_b(&self, k: usize, relative: f64) -> Result<Self> {
        if k == 0 || k >= self.depth() {
            return Err(Error::IndexBeyondDepth {
                index: k,
                depth: self.depth(),
            });
        }
        let mut out = self.clone();
        out.b[k] *= 1.0 + relative;
        Ok(out)
    }

    /// Value of the monic `P_n` at `s` by forward recurrence, `n <= depth`.
    pub fn eval_monic(&self, n: usize, s: f64) -> Result<f64> {
        if n > self.depth() {
            return Err(Error::IndexBeyondDepth {
                index: n,
                depth: self.depth(),
            });
        }
        let (mut prev, mut cur) = (0.0, 1.0);
        for k in 0..n {
            let bk = if k == 0 { 0.0 } else { self.b[k] };
            let next = (s - self.a[k]) * cur - bk * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }
}

/// Discretized Stieltjes procedure, requiring `depth <= atom count`.
pub fn stieltjes(m: &JumpMeasure, depth: usize) -> Result<RecurrenceTable> {
    if depth == 0 {
        return Err(Error::Domain("recurrence depth must be positive".into()));
    }
    if depth > m.atom_count() {
        return Err(Error::InsufficientSupport {
            requested: depth,
            atoms: m.atom_count(),
        });
    }
    run_stieltjes(m, depth)
}

/// Like [`stieltjes`], but accepts `depth` larger than the atom count.
///
/// With `M` atoms the polynomial `P_M` vanishes on the support, so every
/// entry from index `M` on is filled with zero norm, zero `b` and zero `a`.
/// Extended Fock space blocks that use those entries carry zero weight.
pub fn stieltjes_exhausting(m: &JumpMeasure, depth: usize) -> Result<RecurrenceTable> {
    if depth == 0 {
        return Err(Error::Domain("recurrence depth must be positive".into()));
    }
    let genuine = depth.min(m.atom_count());
    let mut table = run_stieltjes(m, genuine)?;
    table.a.resize(depth, 0.0);
    table.b.resize(depth, 0.0);
    table.norm_sq.resize(depth, 0.0);
    Ok(table)
}

fn run_stieltjes(m: &JumpMeasure, depth: usize) -> Result<RecurrenceTable> {
    let s = m.locations();
    let w = m.weights();
    let weighted = |f: &dyn Fn(usize) -> f64| -> f64 { (0..s.len()).map(|j| w[j] * f(j)).sum() };

    let mut a = Vec::with_capacity(depth);
    let mut b = vec![0.0; depth];
    let mut norm_sq = Vec::with_capacity(depth);
    let mut prev = vec![0.0; s.len()];
    let mut cur = vec![1.0; s.len()];

    for n in 0..depth {
        let norm = weighted(&|j| cur[j] * cur[j]);
        if n > 0 {
            let prev_norm = norm_sq[n - 1];
            let spread = weighted(&|j| (s[j] * prev[j]).powi(2)) / prev_norm;
            let bn: f64 = norm / prev_norm;
            if bn.is_nan() || bn <= DEGENERACY_THRESHOLD * spread {
                return Err(Error::DegenerateMeasure { depth: n });
            }
            b[n] = bn;
        }
        let an = weighted(&|j| s[j] * cur[j] * cur[j]) / norm;
        a.push(an);
        norm_sq.push(norm);

        let next: Vec<f64> = (0..s.len()).map(|j| (s[j] - an) * cur[j] - b[n] * prev[j]).collect();
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(RecurrenceTable {
        a,
        b,
        norm_sq,
        support_rank: depth,
    })
}
