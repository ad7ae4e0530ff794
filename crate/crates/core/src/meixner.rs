//! Meixner-class detection and the closed-form `J⁰`, `J⁻` of that class.
//!
//! A table is in the class when `a_n = λ(n+1)` and `b_n = κ n(n+1)`. The
//! class splits by `λ²/(4κ)`: gamma at 1, Pascal above, Meixner below.

use std::fmt;

use crate::error::{Error, Result};
use crate::fock::BlockTensor;
use crate::measures::{GridSpace, TestFunction};
use crate::orthopoly::RecurrenceTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeixnerClass {
    Gamma,
    Pascal,
    Meixner,
}

impl fmt::Display for MeixnerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeixnerClass::Gamma => "gamma-type",
            MeixnerClass::Pascal => "pascal-type",
            MeixnerClass::Meixner => "meixner-type",
        })
    }
}

/// Pattern fit `λ = a_0`, `κ = b_1 / 2` with its worst residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternFit {
    pub lambda: f64,
    pub kappa: f64,
    /// `max_n |a_n - λ(n+1)|`.
    pub a_residual: f64,
    /// `max_n |b_n - κ n(n+1)|`.
    pub b_residual: f64,
    /// `max(1, |a_n|, b_n)` over the fitted range.
    pub scale: f64,
    /// Number of fitted `a` coefficients.
    pub fitted_depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeixnerParameters {
    pub lambda: f64,
    pub kappa: f64,
    pub class: MeixnerClass,
    pub fit: PatternFit,
}

impl MeixnerParameters {
    /// `λ² / (4κ)`.
    pub fn ratio(&self) -> f64 {
        ratio(self.lambda, self.kappa)
    }
}

fn ratio(lambda: f64, kappa: f64) -> f64 {
    lambda * lambda / (4.0 * kappa)
}

pub fn classify(lambda: f64, kappa: f64, tol: f64) -> MeixnerClass {
    let r = ratio(lambda, kappa);
    if (r - 1.0).abs() <= tol {
        MeixnerClass::Gamma
    } else if r > 1.0 {
        MeixnerClass::Pascal
    } else {
        MeixnerClass::Meixner
    }
}

/// Fits the pattern over the non-padded part of the table.
pub fn fit_pattern(t: &RecurrenceTable) -> Result<PatternFit> {
    let depth = t.depth().min(t.support_rank());
    if depth < 3 {
        return Err(Error::InsufficientDepth { depth });
    }
    let lambda = t.a(0);
    let kappa = t.b(1) / 2.0;
    let mut a_residual = 0.0f64;
    let mut b_residual = 0.0f64;
    let mut scale = 1.0f64;
    for n in 0..depth {
        a_residual = a_residual.max((t.a(n) - lambda * (n + 1) as f64).abs());
        scale = scale.max(t.a(n).abs());
        if n >= 1 {
            b_residual = b_residual.max((t.b(n) - kappa * (n * (n + 1)) as f64).abs());
            scale = scale.max(t.b(n));
        }
    }
    Ok(PatternFit {
        lambda,
        kappa,
        a_residual,
        b_residual,
        scale,
        fitted_depth: depth,
    })
}

/// `Some` when both residuals are within `tol · scale`.
pub fn detect(t: &RecurrenceTable, tol: f64) -> Result<Option<MeixnerParameters>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let fit = fit_pattern(t)?;
    if fit.a_residual > tol * fit.scale || fit.b_residual > tol * fit.scale {
        return Ok(None);
    }
    Ok(Some(MeixnerParameters {
        lambda: fit.lambda,
        kappa: fit.kappa,
        class: classify(fit.lambda, fit.kappa, tol),
        fit,
    }))
}

fn check_symmetric(f: &BlockTensor, phi: &TestFunction) -> Result<()> {
    if !f.is_symmetric_level() {
        return Err(Error::DimensionMismatch(format!(
            "expected a plain symmetric tensor, got block {}",
            f.alpha()
        )));
    }
    if f.layout().grid_size() != phi.len() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `λ n (φ(x₁) f_n(x₁,…,x_n))^`.
pub fn corollary_neutral(phi: &TestFunction, f: &BlockTensor, lambda: f64) -> Result<BlockTensor> {
    check_symmetric(f, phi)?;
    let n = f.level();
    let values = f
        .layout()
        .representatives()
        .iter()
        .zip(f.values())
        .map(|(t, &v)| {
            let mean_phi = if n == 0 {
                0.0
            } else {
                t.iter().map(|&x| phi.at(x)).sum::<f64>() / n as f64
            };
            lambda * n as f64 * mean_phi * v
        })
        .collect();
    BlockTensor::from_values(f.layout().clone(), values)
}

/// `n ν̃(ℛ) ∫_X φ(x) f_n(x, x₁,…) σ(dx) + κ n(n-1) (φ(x₁) f_n(x₁, x₁, x₂,…))^`.
pub fn corollary_annihilation(
    phi: &TestFunction,
    grid: &GridSpace,
    f: &BlockTensor,
    kappa: f64,
    mass: f64,
) -> Result<BlockTensor> {
    check_symmetric(f, phi)?;
    if grid.len() != phi.len() {
        return Err(Error::GridMismatch);
    }
    let n = f.level();
    if n == 0 {
        return Err(Error::Domain("annihilation needs level n >= 1".into()));
    }
    let nf = n as f64;
    let out = BlockTensor::symmetric(n - 1, grid.len(), |x| {
        let mut tuple = Vec::with_capacity(n);
        let mut contraction = 0.0;
        for i in 0..grid.len() {
            tuple.clear();
            tuple.push(i);
            tuple.extend_from_slice(x);
            contraction += grid.weight(i) * phi.at(i) * f.get(&tuple);
        }
        let diagonal = if x.is_empty() {
            0.0
        } else {
            let sum: f64 = x
                .iter()
                .map(|&xp| {
                    tuple.clear();
                    tuple.push(xp);
                    tuple.extend_from_slice(x);
                    phi.at(xp) * f.get(&tuple)
                })
                .sum();
            sum / x.len() as f64
        };
        nf * mass * contraction + kappa * nf * (nf - 1.0) * diagonal
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ExtendedFockVector, FockSpace};
    use crate::jacobi::{annihilation, apply, neutral};
    use crate::measures::{gauss_laguerre_gamma, JumpMeasure};
    use crate::orthopoly::stieltjes;
    use std::sync::Arc;

    fn pattern_table(lambda: f64, kappa: f64, depth: usize) -> RecurrenceTable {
        let a = (0..depth).map(|n| lambda * (n + 1) as f64).collect();
        let b = (1..depth).map(|n| kappa * (n * (n + 1)) as f64).collect();
        RecurrenceTable::from_coefficients(a, b, 1.0).unwrap()
    }

    /// Poisson(1) jump sizes shifted off zero: atoms `k + 1`, weights `e^{-1}/k!`.
    fn shifted_poisson(atoms: usize) -> JumpMeasure {
        let mut w = (-1.0f64).exp();
        let mut out = Vec::new();
        for k in 0..atoms {
            if k > 0 {
                w /= k as f64;
            }
            out.push(((k + 1) as f64, w));
        }
        JumpMeasure::new(out).unwrap()
    }

    #[test]
    fn gamma_measure_is_gamma_type() {
        let t = stieltjes(&gauss_laguerre_gamma(40).unwrap(), 9).unwrap();
        let p = detect(&t, 1e-8).unwrap().unwrap();
        assert!((p.lambda - 2.0).abs() <= 1e-8);
        assert!((p.kappa - 1.0).abs() <= 1e-8);
        assert_eq!(p.class, MeixnerClass::Gamma);
    }

    #[test]
    fn synthetic_tables() {
        let p = detect(&pattern_table(1.0, 1.0, 6), 1e-10).unwrap().unwrap();
        assert_eq!((p.lambda, p.kappa, p.class), (1.0, 1.0, MeixnerClass::Meixner));
        let p = detect(&pattern_table(3.0, 1.0, 6), 1e-10).unwrap().unwrap();
        assert_eq!(p.class, MeixnerClass::Pascal);
        let p = detect(&pattern_table(2.0, 1.0, 6), 1e-10).unwrap().unwrap();
        assert_eq!(p.class, MeixnerClass::Gamma);
        assert_eq!(p.ratio(), 1.0);
    }

    #[test]
    fn charlier_is_not_meixner() {
        let charlier = RecurrenceTable::from_coefficients(
            (0..6).map(|n| (n + 1) as f64).collect(),
            (1..6).map(|n| n as f64).collect(),
            1.0,
        )
        .unwrap();
        assert_eq!(detect(&charlier, 1e-6).unwrap(), None);

        let t = stieltjes(&shifted_poisson(30), 6).unwrap();
        for n in 1..6 {
            assert!((t.b(n) - n as f64).abs() < 1e-8, "b_{n} = {}", t.b(n));
        }
        assert_eq!(detect(&t, 1e-6).unwrap(), None);
    }

    #[test]
    fn shallow_tables_are_rejected() {
        let t = pattern_table(2.0, 1.0, 2);
        assert!(matches!(detect(&t, 1e-8), Err(Error::InsufficientDepth { depth: 2 })));
    }

    #[test]
    fn scale_covariance() {
        let m = gauss_laguerre_gamma(40).unwrap();
        let base = detect(&stieltjes(&m, 9).unwrap(), 1e-8).unwrap().unwrap();
        for c in [0.5, 2.0] {
            let p = detect(&stieltjes(&m.scaled(c).unwrap(), 9).unwrap(), 1e-8)
                .unwrap()
                .unwrap();
            assert!((p.lambda - c * base.lambda).abs() <= 1e-8 * c.max(1.0));
            assert!((p.kappa - c * c * base.kappa).abs() <= 1e-8 * (c * c).max(1.0));
            assert!((p.ratio() - base.ratio()).abs() <= 1e-8);
            assert_eq!(p.class, base.class);
        }
    }

    #[test]
    fn closed_form_examples() {
        let g1 = GridSpace::new(vec![2.0]).unwrap();
        let phi = TestFunction::constant(&g1, 1.5);
        let f0 = BlockTensor::symmetric(0, 1, |_| 3.0);
        assert_eq!(corollary_neutral(&phi, &f0, 2.0).unwrap().values(), &[0.0]);
        let f2 = BlockTensor::symmetric(2, 1, |_| 0.75);
        let out = corollary_neutral(&phi, &f2, 2.0).unwrap();
        assert!((out.values()[0] - 2.0 * 2.0 * 1.5 * 0.75).abs() < 1e-15);

        let (kappa, mass) = (0.6, 1.3);
        let out = corollary_annihilation(&phi, &g1, &f2, kappa, mass).unwrap();
        let expect = 2.0 * mass * 2.0 * 1.5 * 0.75 + 2.0 * kappa * 1.5 * 0.75;
        assert!((out.values()[0] - expect).abs() < 1e-14);

        let zero = TestFunction::constant(&g1, 0.0);
        assert_eq!(
            corollary_annihilation(&zero, &g1, &f2, kappa, mass).unwrap().values(),
            &[0.0]
        );
        assert!(corollary_annihilation(&phi, &g1, &f0, kappa, mass).is_err());
    }

    fn agreement(space: &Arc<FockSpace>, phi: &TestFunction, lambda: f64, kappa: f64) -> f64 {
        let j0 = neutral(phi, space).unwrap();
        let jm = annihilation(phi, space).unwrap();
        let g = space.grid().len();
        let mut worst = 0.0f64;
        for n in 0..=space.depth() {
            let count = BlockTensor::symmetric(n, g, |_| 0.0).values().len();
            for idx in 0..count {
                let f = BlockTensor::symmetric_basis(n, g, idx);
                let v = ExtendedFockVector::from_symmetric(space, &f).unwrap();
                let mut pairs = vec![(
                    apply(&j0, &v).unwrap(),
                    ExtendedFockVector::from_symmetric(space, &corollary_neutral(phi, &f, lambda).unwrap()).unwrap(),
                )];
                if n >= 1 {
                    let c = corollary_annihilation(phi, space.grid(), &f, kappa, space.mass()).unwrap();
                    pairs.push((
                        apply(&jm, &v).unwrap(),
                        ExtendedFockVector::from_symmetric(space, &c).unwrap(),
                    ));
                }
                for (general, closed) in pairs {
                    let scale = general.data().iter().fold(1.0f64, |m, x| m.max(x.abs()));
                    for (x, y) in general.data().iter().zip(closed.data()) {
                        worst = worst.max((x - y).abs() / scale);
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn closed_forms_match_general_operators_for_gamma() {
        let table = stieltjes(&gauss_laguerre_gamma(40).unwrap(), 6).unwrap();
        let p = detect(&table, 1e-8).unwrap().unwrap();
        for weights in [vec![1.7], vec![0.6, 1.1], vec![0.3, 0.9, 1.4]] {
            let grid = GridSpace::new(weights).unwrap();
            let phi = TestFunction::new(&grid, (0..grid.len()).map(|i| 0.8 - 0.7 * i as f64).collect()).unwrap();
            let space = FockSpace::new(grid, table.clone(), 4).unwrap();
            let err = agreement(&space, &phi, p.lambda, p.kappa);
            assert!(err <= 1e-8, "grid {}: {err}", space.grid().len());
        }
    }

    #[test]
    fn closed_forms_match_on_synthetic_meixner_table() {
        let table = pattern_table(1.0, 0.7, 5);
        let grid = GridSpace::new(vec![0.5, 1.5]).unwrap();
        let phi = TestFunction::new(&grid, vec![1.2, -0.4]).unwrap();
        let space = FockSpace::new(grid, table, 4).unwrap();
        assert!(agreement(&space, &phi, 1.0, 0.7) <= 1e-12);
    }
}
