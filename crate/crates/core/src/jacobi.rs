//! The Jacobi field `J(φ) = J⁺(φ) + J⁰(φ) + J⁻(φ)` on the truncated space.
//!
//! Operators are assembled row by row: for every target block and target
//! representative, the defining formula is evaluated with the source vector
//! replaced by its coordinate functionals, which yields one sparse row. Where
//! the formula carries a block symmetrization `S_α`, it is applied literally by
//! averaging over all within-group rearrangements of the target tuple.
//!
//! * `J⁺`: level `n → n+1`, the block form of `φ ⊗̂ f_n`. A target block
//!   coordinate of size `k` is split off, leaving a source block where that
//!   coordinate has size `k - 1` (or disappears when `k = 1`).
//! * `J⁰`: level `n → n`, `Σ_k α_k a_{k-1} S_α(φ(x_{α_1+⋯+α_k}) D_α f_n)`.
//! * `J⁻`: level `n → n-1`, a `σ`-contraction with coefficient `n ν̃(ℛ)` and,
//!   for each `k >= 2`, a diagonal term with coefficient
//!   `(n/k) α_{k-1} b_{k-1}` reading the source in block `α - 1_{k-1} + 1_k`.
//!   `φ` is evaluated at the coordinate that is promoted from a `(k-1)`-block
//!   of the target to a `k`-block of the source.
//!
//! Creation out of the top level `N` is dropped.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{inner_product, partitions, ExtendedFockVector, FockSpace, MultiIndex};
use crate::measures::{JumpMeasure, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Creation,
    Neutral,
    Annihilation,
    Full,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OperatorKind::Creation => "creation",
            OperatorKind::Neutral => "neutral",
            OperatorKind::Annihilation => "annihilation",
            OperatorKind::Full => "full",
        };
        f.write_str(s)
    }
}

/// Sparse entries `(dst_local, src_local, value)` of one block pair.
pub type BlockEntries = Vec<(usize, usize, f64)>;

/// Block-sparse operator on a [`FockSpace`].
#[derive(Debug, Clone)]
pub struct FieldOperator {
    kind: OperatorKind,
    space: Arc<FockSpace>,
    phi: TestFunction,
    blocks: BTreeMap<(usize, usize), BlockEntries>,
}

/// Chooses one coordinate position inside a group of equal block size.
pub(crate) type PositionRule = fn(&Range<usize>) -> usize;

pub(crate) fn terminal(r: &Range<usize>) -> usize {
    r.end - 1
}

#[allow(dead_code)]
pub(crate) fn initial(r: &Range<usize>) -> usize {
    r.start
}

impl FieldOperator {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn phi(&self) -> &TestFunction {
        &self.phi
    }

    /// Block map keyed by `(source block id, target block id)`.
    pub fn blocks(&self) -> &BTreeMap<(usize, usize), BlockEntries> {
        &self.blocks
    }

    pub fn nnz(&self) -> usize {
        self.blocks.values().map(Vec::len).sum()
    }

    /// All entries as `(dst_global, src_global, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.blocks.iter().flat_map(move |(&(sb, db), e)| {
            let so = self.space.block(sb).offset;
            let d_o = self.space.block(db).offset;
            e.iter().map(move |&(dl, sl, v)| (d_o + dl, so + sl, v))
        })
    }

    /// Dense matrix in the global representative basis.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.space.dim();
        let mut m = DMatrix::zeros(n, n);
        for (d, s, v) in self.entries() {
            m[(d, s)] += v;
        }
        m
    }

    fn from_rows(
        kind: OperatorKind,
        space: &Arc<FockSpace>,
        phi: &TestFunction,
        rows: Vec<(usize, BTreeMap<usize, f64>)>,
    ) -> Self {
        let mut blocks: BTreeMap<(usize, usize), BlockEntries> = BTreeMap::new();
        for (dst, row) in rows {
            let db = space.block_of(dst);
            let dl = dst - space.block(db).offset;
            for (src, v) in row {
                if v == 0.0 {
                    continue;
                }
                let sb = space.block_of(src);
                let sl = src - space.block(sb).offset;
                blocks.entry((sb, db)).or_default().push((dl, sl, v));
            }
        }
        Self {
            kind,
            space: space.clone(),
            phi: phi.clone(),
            blocks,
        }
    }

    /// Blockwise sum; all parts must share space and `φ`.
    pub fn sum(kind: OperatorKind, parts: &[&FieldOperator]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Domain("empty operator sum".into()))?;
        let mut acc: BTreeMap<(usize, usize), BTreeMap<(usize, usize), f64>> = BTreeMap::new();
        for p in parts {
            if !Arc::ptr_eq(&p.space, &first.space) || p.phi != first.phi {
                return Err(Error::DimensionMismatch("operators act on different setups".into()));
            }
            for (key, entries) in &p.blocks {
                let slot = acc.entry(*key).or_default();
                for &(dl, sl, v) in entries {
                    *slot.entry((dl, sl)).or_insert(0.0) += v;
                }
            }
        }
        let blocks = acc
            .into_iter()
            .map(|(k, m)| (k, m.into_iter().map(|((dl, sl), v)| (dl, sl, v)).collect()))
            .collect();
        Ok(Self {
            kind,
            space: first.space.clone(),
            phi: first.phi.clone(),
            blocks,
        })
    }

    /// Sparse export, one line per entry:
    /// `src_level src_alpha src_tuple dst_level dst_alpha dst_tuple value`,
    /// where `alpha` is the position in the partition enumeration of its level
    /// and `tuple` the representative index inside its block.
    pub fn export(&self, measure: &JumpMeasure) -> String {
        let fmt_list = |v: &[f64]| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        out.push_str("# levy-jacobi sparse operator\n");
        out.push_str(&format!("# kind {}\n", self.kind));
        out.push_str(&format!("# truncation {}\n", self.space.depth()));
        out.push_str(&format!("# grid_weights {}\n", fmt_list(self.space.grid().weights())));
        out.push_str(&format!("# measure_sha256 {}\n", measure.fingerprint()));
        out.push_str(&format!("# phi {}\n", fmt_list(self.phi.values())));
        out.push_str("# src_level src_alpha src_tuple dst_level dst_alpha dst_tuple value\n");
        let alpha_pos = |id: usize| {
            let b = self.space.block(id);
            id - self.space.level_blocks(b.level).start
        };
        for (&(sb, db), entries) in &self.blocks {
            let (sl_level, dl_level) = (self.space.block(sb).level, self.space.block(db).level);
            let mut sorted = entries.clone();
            sorted.sort_by_key(|e| (e.1, e.0));
            for (dl, sl, v) in sorted {
                out.push_str(&format!(
                    "{} {} {} {} {} {} {:.16e}\n",
                    sl_level,
                    alpha_pos(sb),
                    sl,
                    dl_level,
                    alpha_pos(db),
                    dl,
                    v
                ));
            }
        }
        out
    }
}

fn check_phi(space: &FockSpace, phi: &TestFunction) -> Result<()> {
    if phi.len() != space.grid().len() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn src(space: &FockSpace, alpha: &MultiIndex, tuple: &[usize]) -> usize {
    space
        .index_of(alpha, tuple)
        .unwrap_or_else(|| panic!("source block {alpha} must lie inside the truncation"))
}

/// Builds rows for every representative of every block in `levels`, averaging
/// `term` over the within-group rearrangements of the target tuple.
fn symmetrized_rows(
    space: &FockSpace,
    levels: impl Iterator<Item = usize>,
    term: impl Fn(&MultiIndex, usize, &[usize], &mut BTreeMap<usize, f64>),
) -> Vec<(usize, BTreeMap<usize, f64>)> {
    let mut rows = Vec::new();
    for level in levels {
        for id in space.level_blocks(level) {
            let block = space.block(id);
            for i in 0..block.layout.len() {
                let arrangements = block.layout.arrangements(i);
                let mut row = BTreeMap::new();
                for x in &arrangements {
                    term(block.alpha(), level, x, &mut row);
                }
                let count = arrangements.len() as f64;
                row.values_mut().for_each(|v| *v /= count);
                rows.push((block.offset + i, row));
            }
        }
    }
    rows
}

/// `J⁺(φ)`.
pub fn creation(phi: &TestFunction, space: &Arc<FockSpace>) -> Result<FieldOperator> {
    check_phi(space, phi)?;
    let mut rows = Vec::new();
    for level in 1..=space.depth() {
        let n = level - 1;
        for id in space.level_blocks(level) {
            let block = space.block(id);
            let alpha = block.alpha();
            let sizes = alpha.position_sizes();
            for (i, t) in block.layout.representatives().iter().enumerate() {
                let mut row = BTreeMap::new();
                for (p, &k) in sizes.iter().enumerate() {
                    let source_alpha = if k == 1 {
                        alpha.shifted(1, -1)
                    } else {
                        alpha.shifted(k, -1).and_then(|a| a.shifted(k - 1, 1))
                    }
                    .expect("position p has block size k");
                    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); alpha.max_block()];
                    for (q, (&kq, &xq)) in sizes.iter().zip(t).enumerate() {
                        if q != p {
                            by_size[kq - 1].push(xq);
                        }
                    }
                    if k > 1 {
                        by_size[k - 2].push(t[p]);
                    }
                    let tuple: Vec<usize> = by_size.concat();
                    let coef = k as f64 * phi.at(t[p]) / (n + 1) as f64;
                    *row.entry(src(space, &source_alpha, &tuple)).or_insert(0.0) += coef;
                }
                rows.push((block.offset + i, row));
            }
        }
    }
    Ok(FieldOperator::from_rows(OperatorKind::Creation, space, phi, rows))
}

pub(crate) fn neutral_with_rule(
    phi: &TestFunction,
    space: &Arc<FockSpace>,
    rule: PositionRule,
) -> Result<FieldOperator> {
    check_phi(space, phi)?;
    let table = space.table();
    let rows = symmetrized_rows(space, 0..=space.depth(), |alpha, _level, x, row| {
        let target = src(space, alpha, x);
        for (k, range) in alpha.groups() {
            let coef = alpha.get(k) as f64 * table.a(k - 1) * phi.at(x[rule(&range)]);
            *row.entry(target).or_insert(0.0) += coef;
        }
    });
    Ok(FieldOperator::from_rows(OperatorKind::Neutral, space, phi, rows))
}

/// `J⁰(φ)`.
pub fn neutral(phi: &TestFunction, space: &Arc<FockSpace>) -> Result<FieldOperator> {
    neutral_with_rule(phi, space, terminal)
}

pub(crate) fn annihilation_with_rule(
    phi: &TestFunction,
    space: &Arc<FockSpace>,
    rule: PositionRule,
) -> Result<FieldOperator> {
    check_phi(space, phi)?;
    let table = space.table();
    let grid = space.grid();
    let mass = space.mass();
    let rows = symmetrized_rows(space, 0..space.depth(), |alpha, level, x, row| {
        let n = (level + 1) as f64;
        let plus_one = alpha.shifted(1, 1).expect("adding a singleton is always valid");
        let mut tuple = Vec::with_capacity(x.len() + 1);
        for i in 0..grid.len() {
            tuple.clear();
            tuple.push(i);
            tuple.extend_from_slice(x);
            let coef = n * mass * grid.weight(i) * phi.at(i);
            *row.entry(src(space, &plus_one, &tuple)).or_insert(0.0) += coef;
        }
        for (lower, range) in alpha.groups() {
            let k = lower + 1;
            let promoted = alpha
                .shifted(lower, -1)
                .and_then(|a| a.shifted(k, 1))
                .expect("group of size k-1 is nonempty");
            let q = rule(&range);
            let mut y = x.to_vec();
            y.swap(q, range.end - 1);
            let coef = n / k as f64 * alpha.get(lower) as f64 * table.b(lower) * phi.at(x[q]);
            *row.entry(src(space, &promoted, &y)).or_insert(0.0) += coef;
        }
    });
    Ok(FieldOperator::from_rows(OperatorKind::Annihilation, space, phi, rows))
}

/// `J⁻(φ)`.
pub fn annihilation(phi: &TestFunction, space: &Arc<FockSpace>) -> Result<FieldOperator> {
    annihilation_with_rule(phi, space, terminal)
}

/// `J(φ) = J⁺(φ) + J⁰(φ) + J⁻(φ)`.
pub fn full(phi: &TestFunction, space: &Arc<FockSpace>) -> Result<FieldOperator> {
    let c = creation(phi, space)?;
    let z = neutral(phi, space)?;
    let a = annihilation(phi, space)?;
    FieldOperator::sum(OperatorKind::Full, &[&c, &z, &a])
}

/// Blockwise matrix–vector product.
pub fn apply(op: &FieldOperator, v: &ExtendedFockVector) -> Result<ExtendedFockVector> {
    let same = Arc::ptr_eq(&op.space, v.space())
        || (op.space.depth() == v.space().depth()
            && op.space.grid() == v.space().grid()
            && op.space.table() == v.space().table());
    if !same {
        return Err(Error::DimensionMismatch(
            "operator and vector live in different spaces".into(),
        ));
    }
    let mut out = vec![0.0; op.space.dim()];
    let input = v.data();
    for (&(sb, db), entries) in &op.blocks {
        let so = op.space.block(sb).offset;
        let d_o = op.space.block(db).offset;
        for &(dl, sl, val) in entries {
            out[d_o + dl] += val * input[so + sl];
        }
    }
    ExtendedFockVector::from_data(&op.space, out)
}

/// `⟨Ω, J^k Ω⟩` for `k = 0..=max_order`, from an assembled full operator.
pub fn vacuum_moments(op: &FieldOperator, max_order: usize) -> Result<Vec<f64>> {
    if op.kind != OperatorKind::Full {
        return Err(Error::Domain(format!(
            "vacuum moments need the full field, got {}",
            op.kind
        )));
    }
    if op.space.depth() < max_order {
        return Err(Error::TruncationTooShallow {
            order: max_order,
            depth: op.space.depth(),
        });
    }
    let omega = ExtendedFockVector::vacuum(&op.space);
    let mut v = omega.clone();
    let mut out = vec![inner_product(&omega, &v)?];
    for _ in 0..max_order {
        v = apply(op, &v)?;
        out.push(inner_product(&omega, &v)?);
    }
    Ok(out)
}

/// `⟨Ω, J(φ)^k Ω⟩`; requires truncation `N >= k`.
pub fn vacuum_moment(phi: &TestFunction, k: usize, space: &Arc<FockSpace>) -> Result<f64> {
    if space.depth() < k {
        return Err(Error::TruncationTooShallow {
            order: k,
            depth: space.depth(),
        });
    }
    let op = full(phi, space)?;
    Ok(vacuum_moments(&op, k)?[k])
}

/// Gram matrix `⟨J^i Ω, J^j Ω⟩`, `0 <= i, j <= m`.
pub fn krylov_gram(op: &FieldOperator, m: usize) -> Result<DMatrix<f64>> {
    let mut vs = vec![ExtendedFockVector::vacuum(&op.space)];
    for _ in 0..m {
        let next = apply(op, vs.last().expect("nonempty"))?;
        vs.push(next);
    }
    let mut g = DMatrix::zeros(m + 1, m + 1);
    for i in 0..=m {
        for j in 0..=m {
            g[(i, j)] = inner_product(&vs[i], &vs[j])?;
        }
    }
    Ok(g)
}

fn entry_map(op: &FieldOperator) -> HashMap<(usize, usize), f64> {
    let mut m = HashMap::new();
    for (d, s, v) in op.entries() {
        *m.entry((d, s)).or_insert(0.0) += v;
    }
    m
}

/// Largest `|⟨e_r, J e_s⟩ - ⟨J e_r, e_s⟩|` over representative basis pairs,
/// relative to the largest `|⟨e_r, J e_s⟩|`.
///
/// On the truncated space this is exact for every level, including the top
/// one: the truncated operator is the compression `P J P`.
pub fn check_symmetry(op: &FieldOperator) -> f64 {
    let w = op.space.weights();
    let map = entry_map(op);
    let scale = map.iter().fold(0.0f64, |m, (&(d, _), v)| m.max((w[d] * v).abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for (&(d, s), &v) in &map {
        let mirrored = map.get(&(s, d)).copied().unwrap_or(0.0);
        worst = worst.max((w[d] * v - w[s] * mirrored).abs());
    }
    worst / scale
}

/// Deviation of `annihilation` from the adjoint of `creation`, relative to the
/// largest weighted entry of either.
pub fn check_adjoint_pair(creation: &FieldOperator, annihilation: &FieldOperator) -> Result<f64> {
    if !Arc::ptr_eq(&creation.space, &annihilation.space) {
        return Err(Error::DimensionMismatch("operators act on different spaces".into()));
    }
    let w = creation.space.weights();
    let c = entry_map(creation);
    let a = entry_map(annihilation);
    let scale = c
        .iter()
        .chain(a.iter())
        .fold(0.0f64, |m, (&(d, _), v)| m.max((w[d] * v).abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for (&(d, s), &v) in &c {
        let adj = a.get(&(s, d)).copied().unwrap_or(0.0);
        worst = worst.max((w[d] * v - w[s] * adj).abs());
    }
    for (&(d, s), &v) in &a {
        if !c.contains_key(&(s, d)) {
            worst = worst.max((w[d] * v).abs());
        }
    }
    Ok(worst / scale)
}

/// Partition enumeration position of `alpha` within its level.
pub fn alpha_position(alpha: &MultiIndex) -> usize {
    partitions(alpha.degree())
        .iter()
        .position(|a| a == alpha)
        .expect("every multi-index appears in its level")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::BlockTensor;
    use crate::levy_moments::{field_moments, CumulantModel};
    use crate::measures::{GridSpace, JumpMeasure};
    use crate::orthopoly::{stieltjes, stieltjes_exhausting};

    fn nu2() -> JumpMeasure {
        JumpMeasure::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    fn g1() -> GridSpace {
        GridSpace::new(vec![2.0]).unwrap()
    }

    fn nu2_space(depth: usize) -> Arc<FockSpace> {
        FockSpace::new(g1(), stieltjes_exhausting(&nu2(), depth).unwrap(), depth).unwrap()
    }

    fn skewed() -> JumpMeasure {
        JumpMeasure::new([(-1.3, 0.4), (0.4, 0.9), (1.1, 0.2), (2.5, 0.6), (3.2, 0.15)]).unwrap()
    }

    fn three_point() -> GridSpace {
        GridSpace::new(vec![0.7, 1.4, 0.4]).unwrap()
    }

    fn max_abs_diff(a: &ExtendedFockVector, b: &ExtendedFockVector) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn creation_examples() {
        let grid = three_point();
        let space = FockSpace::new(grid.clone(), stieltjes(&skewed(), 3).unwrap(), 3).unwrap();
        let phi = TestFunction::new(&grid, vec![0.5, -1.0, 2.0]).unwrap();
        let psi = [1.5, 0.25, -0.75];
        let cp = creation(&phi, &space).unwrap();

        let out = apply(&cp, &ExtendedFockVector::vacuum(&space)).unwrap();
        let lvl1 = out.block(&MultiIndex::singletons(1)).unwrap();
        assert_eq!(lvl1.values(), phi.values());

        let f1 = ExtendedFockVector::from_symmetric(&space, &BlockTensor::symmetric(1, 3, |t| psi[t[0]])).unwrap();
        let out = apply(&cp, &f1).unwrap();
        let expect = BlockTensor::symmetric(2, 3, |t| 0.5 * (phi.at(t[0]) * psi[t[1]] + phi.at(t[1]) * psi[t[0]]));
        let expect = ExtendedFockVector::from_symmetric(&space, &expect).unwrap();
        assert!(max_abs_diff(&out, &expect) < 1e-15);
    }

    #[test]
    fn creation_norm_on_single_point() {
        let space = nu2_space(2);
        let one = TestFunction::constant(&g1(), 1.0);
        let v = apply(&creation(&one, &space).unwrap(), &ExtendedFockVector::vacuum(&space)).unwrap();
        assert_eq!(v.block(&MultiIndex::singletons(1)).unwrap().values(), &[1.0]);
        assert!((inner_product(&v, &v).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn creation_truncates_top_level() {
        let space = nu2_space(2);
        let one = TestFunction::constant(&g1(), 1.0);
        let top = ExtendedFockVector::from_symmetric(&space, &BlockTensor::symmetric(2, 1, |_| 1.0)).unwrap();
        let out = apply(&creation(&one, &space).unwrap(), &top).unwrap();
        assert!(out.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn neutral_examples() {
        let grid = three_point();
        let m = skewed();
        let table = stieltjes(&m, 3).unwrap();
        let space = FockSpace::new(grid.clone(), table.clone(), 2).unwrap();
        let phi = TestFunction::new(&grid, vec![0.5, -1.0, 2.0]).unwrap();
        let j0 = neutral(&phi, &space).unwrap();

        let out = apply(&j0, &ExtendedFockVector::vacuum(&space)).unwrap();
        assert!(out.data().iter().all(|&x| x == 0.0));

        let f1 = [1.0, 3.0, -2.0];
        let v = ExtendedFockVector::from_symmetric(&space, &BlockTensor::symmetric(1, 3, |t| f1[t[0]])).unwrap();
        let out = apply(&j0, &v).unwrap().block(&MultiIndex::singletons(1)).unwrap();
        for (x, fx) in f1.iter().enumerate() {
            assert!((out.get(&[x]) - table.a(0) * phi.at(x) * fx).abs() < 1e-14);
        }

        let f2 = BlockTensor::symmetric(2, 3, |t| {
            (1.0 + t[0] as f64) * (2.0 - t[1] as f64) + (2.0 - t[0] as f64) * (1.0 + t[1] as f64)
        });
        let v = ExtendedFockVector::from_symmetric(&space, &f2).unwrap();
        let out = apply(&j0, &v).unwrap().block(&MultiIndex::new(vec![0, 1])).unwrap();
        for x in 0..3 {
            assert!((out.get(&[x]) - table.a(1) * phi.at(x) * f2.get(&[x, x])).abs() < 1e-14);
        }
    }

    #[test]
    fn annihilation_examples() {
        let grid = three_point();
        let m = skewed();
        let table = stieltjes(&m, 3).unwrap();
        let space = FockSpace::new(grid.clone(), table.clone(), 2).unwrap();
        let phi = TestFunction::new(&grid, vec![0.5, -1.0, 2.0]).unwrap();
        let jm = annihilation(&phi, &space).unwrap();
        let mass = m.mass();

        let out = apply(&jm, &ExtendedFockVector::vacuum(&space)).unwrap();
        assert!(out.data().iter().all(|&x| x == 0.0));

        let f1 = [1.0, 3.0, -2.0];
        let v = ExtendedFockVector::from_symmetric(&space, &BlockTensor::symmetric(1, 3, |t| f1[t[0]])).unwrap();
        let out = apply(&jm, &v).unwrap();
        let expect: f64 = mass * (0..3).map(|i| grid.weight(i) * phi.at(i) * f1[i]).sum::<f64>();
        assert!((out.data()[0] - expect).abs() < 1e-14);

        let f2 = BlockTensor::symmetric(2, 3, |t| ((t[0] * 3 + t[1] * 3) as f64).cos() + (t[0] * t[1]) as f64);
        let v = ExtendedFockVector::from_symmetric(&space, &f2).unwrap();
        let out = apply(&jm, &v).unwrap().block(&MultiIndex::singletons(1)).unwrap();
        for x in 0..3 {
            let contraction: f64 = (0..3).map(|i| grid.weight(i) * phi.at(i) * f2.get(&[i, x])).sum();
            let expect = 2.0 * mass * contraction + table.b(1) * phi.at(x) * f2.get(&[x, x]);
            assert!((out.get(&[x]) - expect).abs() < 1e-13, "{} vs {expect}", out.get(&[x]));
        }
    }

    #[test]
    fn full_examples_and_vacuum_moments() {
        let space = nu2_space(6);
        let one = TestFunction::constant(&g1(), 1.0);
        let j = full(&one, &space).unwrap();
        let out = apply(&j, &ExtendedFockVector::vacuum(&space)).unwrap();
        assert_eq!(out.data()[0], 0.0);
        assert_eq!(out.block(&MultiIndex::singletons(1)).unwrap().values(), &[1.0]);

        let m = vacuum_moments(&j, 6).unwrap();
        assert_eq!(m[0], 1.0);
        assert_eq!(m[1], 0.0);
        assert!((m[2] - 2.0).abs() < 1e-12);
        assert!((m[4] - 14.0).abs() < 1e-12);
        assert!((vacuum_moment(&one, 4, &space).unwrap() - 14.0).abs() < 1e-12);
        assert!(matches!(
            vacuum_moment(&one, 4, &nu2_space(3)),
            Err(Error::TruncationTooShallow { .. })
        ));
    }

    #[test]
    fn apply_zero_and_mismatch() {
        let space = nu2_space(3);
        let one = TestFunction::constant(&g1(), 1.0);
        let j = full(&one, &space).unwrap();
        let zero = ExtendedFockVector::zeros(&space);
        assert_eq!(apply(&j, &zero).unwrap(), zero);
        let other = nu2_space(2);
        assert!(apply(&j, &ExtendedFockVector::vacuum(&other)).is_err());
    }

    #[test]
    fn moments_match_cumulants_on_three_points_to_order_eight() {
        let grid = three_point();
        let measure = skewed();
        let phi = TestFunction::new(&grid, vec![0.9, -0.6, 1.3]).unwrap();
        let space = FockSpace::new(grid.clone(), stieltjes_exhausting(&measure, 8).unwrap(), 8).unwrap();
        let j = full(&phi, &space).unwrap();
        let got = vacuum_moments(&j, 8).unwrap();
        let expect = field_moments(&CumulantModel::new(measure, grid), &phi, 8).unwrap();
        for k in 1..=8 {
            let e = expect[k - 1];
            assert!(
                (got[k] - e).abs() <= 1e-8 * e.abs().max(1.0),
                "k={k}: {} vs {e}",
                got[k]
            );
        }
    }

    #[test]
    fn position_choice_inside_group_is_immaterial() {
        let grid = three_point();
        let space = FockSpace::new(grid.clone(), stieltjes(&skewed(), 5).unwrap(), 5).unwrap();
        let phi = TestFunction::new(&grid, vec![0.9, -0.6, 1.3]).unwrap();
        let pairs = [
            (
                neutral_with_rule(&phi, &space, terminal).unwrap(),
                neutral_with_rule(&phi, &space, initial).unwrap(),
            ),
            (
                annihilation_with_rule(&phi, &space, terminal).unwrap(),
                annihilation_with_rule(&phi, &space, initial).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            let (da, db) = (a.to_dense(), b.to_dense());
            assert!((da - db).amax() < 1e-13);
        }
    }

    #[test]
    fn symmetry_and_adjointness() {
        let grid = three_point();
        let space = FockSpace::new(grid.clone(), stieltjes(&skewed(), 4).unwrap(), 4).unwrap();
        let phi = TestFunction::new(&grid, vec![0.9, -0.6, 1.3]).unwrap();
        let c = creation(&phi, &space).unwrap();
        let z = neutral(&phi, &space).unwrap();
        let a = annihilation(&phi, &space).unwrap();
        assert!(check_symmetry(&z) <= 1e-10);
        assert!(check_adjoint_pair(&c, &a).unwrap() <= 1e-10);
        assert!(check_symmetry(&full(&phi, &space).unwrap()) <= 1e-10);
        assert!(check_symmetry(&c) > 0.1);
    }

    #[test]
    fn krylov_gram_is_positive_semidefinite() {
        let grid = three_point();
        let space = FockSpace::new(grid.clone(), stieltjes_exhausting(&nu2(), 6).unwrap(), 6).unwrap();
        let phi = TestFunction::new(&grid, vec![0.9, -0.6, 1.3]).unwrap();
        let g = krylov_gram(&full(&phi, &space).unwrap(), 3).unwrap();
        let scale = g.amax();
        let eig = g.symmetric_eigen().eigenvalues;
        assert!(eig.iter().all(|&e| e >= -1e-10 * scale), "{eig}");
    }

    #[test]
    fn export_lists_every_entry() {
        let space = nu2_space(2);
        let one = TestFunction::constant(&g1(), 1.0);
        let j = full(&one, &space).unwrap();
        let text = j.export(&nu2());
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), j.nnz());
        assert!(text.contains("# kind full"));
        assert!(body.contains(&"0 0 0 1 0 0 1.0000000000000000e0"));
        assert_eq!(alpha_position(&MultiIndex::new(vec![0, 1])), 1);
    }
}
