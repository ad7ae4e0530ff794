//! Extended Fock space on a finite grid.
//!
//! A level-`n` element decomposes into blocks indexed by multi-indices `α`
//! with `Σ k α_k = n`. Block `α` is a function of `|α|` grid points that is
//! symmetric within each group of coordinates sharing a block size. Coordinates
//! are laid out group by group, singletons first, then the size-2 coordinates,
//! and so on. Blocks are stored on representative tuples, sorted within every
//! group, and inner products expand representatives with their orbit sizes.
//!
//! The full space carries the inner product
//! `Σ_n n! Σ_α K_α Σ_tuples Πσ · F_{n,α} G_{n,α}` with
//! `K_α = n!/Πα_k! · Π (‖P_{k-1}‖² / (k!)²)^{α_k}`.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::GridSpace;
use crate::orthopoly::RecurrenceTable;

/// Multiplicities `(α_1, α_2, …)` with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut multiplicities: Vec<usize>) -> Self {
        while multiplicities.last() == Some(&0) {
            multiplicities.pop();
        }
        Self(multiplicities)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `(n)`: `n` coordinates, none repeated.
    pub fn singletons(n: usize) -> Self {
        Self::new(vec![n])
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.0
    }

    /// `α_k`, 1-based; zero beyond the stored entries.
    pub fn get(&self, k: usize) -> usize {
        assert!(k >= 1, "block sizes start at 1");
        self.0.get(k - 1).copied().unwrap_or(0)
    }

    /// `Σ k α_k`.
    pub fn degree(&self) -> usize {
        self.0.iter().enumerate().map(|(i, &m)| (i + 1) * m).sum()
    }

    /// `|α| = Σ α_k`.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Largest block size with nonzero multiplicity, 0 for the empty index.
    pub fn max_block(&self) -> usize {
        self.0.len()
    }

    /// `α + delta · 1_k`, or `None` if an entry would become negative.
    pub fn shifted(&self, k: usize, delta: isize) -> Option<Self> {
        assert!(k >= 1, "block sizes start at 1");
        let mut m = self.0.clone();
        if m.len() < k {
            m.resize(k, 0);
        }
        let v = m[k - 1] as isize + delta;
        if v < 0 {
            return None;
        }
        m[k - 1] = v as usize;
        Some(Self::new(m))
    }

    /// Block size of each coordinate position, in layout order.
    pub fn position_sizes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| std::iter::repeat_n(i + 1, m))
            .collect()
    }

    /// `(k, positions)` for every block size `k` with `α_k > 0`.
    pub fn groups(&self) -> Vec<(usize, Range<usize>)> {
        let mut start = 0;
        let mut out = Vec::new();
        for (i, &m) in self.0.iter().enumerate() {
            if m > 0 {
                out.push((i + 1, start..start + m));
            }
            start += m;
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of degree `n`, in reverse-lexicographic order of their
/// multiplicity vectors.
pub fn partitions(n: usize) -> Vec<MultiIndex> {
    fn descend(rest: usize, max_part: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(parts.clone());
            return;
        }
        for part in (1..=rest.min(max_part)).rev() {
            parts.push(part);
            descend(rest - part, part, parts, out);
            parts.pop();
        }
    }
    let mut raw = Vec::new();
    descend(n, n, &mut Vec::new(), &mut raw);
    let mut out: Vec<Vec<usize>> = raw
        .into_iter()
        .map(|parts| {
            let mut m = vec![0; n];
            for p in parts {
                m[p - 1] += 1;
            }
            m
        })
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out.into_iter().map(MultiIndex::new).collect()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `K_α` for the polynomial norms in `table`.
pub fn k_alpha(alpha: &MultiIndex, table: &RecurrenceTable) -> Result<f64> {
    let max = alpha.max_block();
    if max > table.depth() {
        return Err(Error::TableTooShallow {
            needed: max,
            depth: table.depth(),
        });
    }
    let mut value = factorial(alpha.degree());
    for (i, &m) in alpha.multiplicities().iter().enumerate() {
        let k = i + 1;
        let base = table.norm_sq(k - 1) / factorial(k).powi(2);
        value *= base.powi(m as i32) / factorial(m);
    }
    Ok(value)
}

/// Nondecreasing sequences of length `size` over `0..grid_size`, lexicographic.
fn multisets(grid_size: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(grid: usize, size: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in lo..grid {
            cur.push(v);
            rec(grid, size, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(grid_size, size, 0, &mut Vec::with_capacity(size), &mut out);
    out
}

/// Number of distinct arrangements of a sorted slice.
fn orbit_size(sorted: &[usize]) -> f64 {
    let mut count = factorial(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        count /= factorial(j);
        i += j;
    }
    count
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Representative tuples and lookup for one block index on a grid.
#[derive(Debug)]
pub struct BlockLayout {
    alpha: MultiIndex,
    grid_size: usize,
    groups: Vec<(usize, Range<usize>)>,
    reps: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
    orbit: Vec<f64>,
}

impl BlockLayout {
    pub fn new(alpha: MultiIndex, grid_size: usize) -> Self {
        let groups = alpha.groups();
        let mut reps: Vec<Vec<usize>> = vec![Vec::new()];
        for (_, range) in &groups {
            let choices = multisets(grid_size, range.len());
            reps = reps
                .iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |c| {
                        let mut t = prefix.clone();
                        t.extend_from_slice(c);
                        t
                    })
                })
                .collect();
        }
        let lookup = reps.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let orbit = reps
            .iter()
            .map(|r| groups.iter().map(|(_, g)| orbit_size(&r[g.clone()])).product())
            .collect();
        Self {
            alpha,
            grid_size,
            groups,
            reps,
            lookup,
            orbit,
        }
    }

    pub fn alpha(&self) -> &MultiIndex {
        &self.alpha
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Number of coordinates `|α|`.
    pub fn arity(&self) -> usize {
        self.alpha.size()
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn groups(&self) -> &[(usize, Range<usize>)] {
        &self.groups
    }

    pub fn representatives(&self) -> &[Vec<usize>] {
        &self.reps
    }

    pub fn representative(&self, i: usize) -> &[usize] {
        &self.reps[i]
    }

    /// Number of tuples in the within-group permutation orbit of representative `i`.
    pub fn orbit_size(&self, i: usize) -> f64 {
        self.orbit[i]
    }

    pub fn canonical(&self, tuple: &[usize]) -> Vec<usize> {
        let mut t = tuple.to_vec();
        for (_, g) in &self.groups {
            t[g.clone()].sort_unstable();
        }
        t
    }

    /// Index of the representative of `tuple`'s orbit.
    pub fn index_of(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity());
        let canon = self.canonical(tuple);
        *self
            .lookup
            .get(&canon)
            .unwrap_or_else(|| panic!("tuple {tuple:?} outside grid of size {}", self.grid_size))
    }

    /// All distinct within-group rearrangements of representative `i`, in
    /// lexicographic order.
    pub fn arrangements(&self, i: usize) -> Vec<Vec<usize>> {
        let rep = &self.reps[i];
        let mut out = vec![rep.clone()];
        for (_, g) in &self.groups {
            let mut perms = Vec::new();
            let mut cur = rep[g.clone()].to_vec();
            loop {
                perms.push(cur.clone());
                if !next_permutation(&mut cur) {
                    break;
                }
            }
            out = out
                .into_iter()
                .flat_map(|t| {
                    perms.iter().map(move |p| {
                        let mut t = t.clone();
                        t[g.clone()].copy_from_slice(p);
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// Coordinates of `D_α`: each block coordinate repeated by its block size.
    pub fn expand(&self, tuple: &[usize]) -> Vec<usize> {
        self.alpha
            .position_sizes()
            .iter()
            .zip(tuple)
            .flat_map(|(&k, &x)| std::iter::repeat_n(x, k))
            .collect()
    }
}

/// Values of one block, stored on representative tuples.
#[derive(Debug, Clone)]
pub struct BlockTensor {
    layout: Arc<BlockLayout>,
    values: Vec<f64>,
}

impl PartialEq for BlockTensor {
    fn eq(&self, other: &Self) -> bool {
        self.layout.alpha == other.layout.alpha
            && self.layout.grid_size == other.layout.grid_size
            && self.values == other.values
    }
}

impl BlockTensor {
    pub fn zeros(layout: Arc<BlockLayout>) -> Self {
        let values = vec![0.0; layout.len()];
        Self { layout, values }
    }

    pub fn from_values(layout: Arc<BlockLayout>, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::DimensionMismatch(format!(
                "block {} has {} representatives, got {} values",
                layout.alpha,
                layout.len(),
                values.len()
            )));
        }
        Ok(Self { layout, values })
    }

    /// Evaluates `f` on every representative tuple.
    pub fn from_fn(layout: Arc<BlockLayout>, f: impl Fn(&[usize]) -> f64) -> Self {
        let values = layout.reps.iter().map(|r| f(r)).collect();
        Self { layout, values }
    }

    /// A fully symmetric level-`n` tensor, i.e. the block `(n)`.
    pub fn symmetric(n: usize, grid_size: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        Self::from_fn(Arc::new(BlockLayout::new(MultiIndex::singletons(n), grid_size)), f)
    }

    /// Symmetrized indicator of the multiset `rep`.
    pub fn symmetric_basis(n: usize, grid_size: usize, index: usize) -> Self {
        let layout = Arc::new(BlockLayout::new(MultiIndex::singletons(n), grid_size));
        let mut t = Self::zeros(layout);
        t.values[index] = 1.0;
        t
    }

    pub fn layout(&self) -> &Arc<BlockLayout> {
        &self.layout
    }

    pub fn alpha(&self) -> &MultiIndex {
        &self.layout.alpha
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value at an arbitrary tuple.
    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.values[self.layout.index_of(tuple)]
    }

    /// True if this is a fully symmetric tensor `(n)` (including `n = 0`).
    pub fn is_symmetric_level(&self) -> bool {
        self.layout.alpha.max_block() <= 1
    }

    /// Level of a symmetric tensor, or the degree of `α` in general.
    pub fn level(&self) -> usize {
        self.layout.alpha.degree()
    }

    /// Dense copy over all `grid_size^{|α|}` tuples.
    pub fn to_raw(&self) -> RawTensor {
        RawTensor::from_fn(self.layout.grid_size, self.layout.arity(), |t| self.get(t))
    }

    /// `Σ_tuples Πσ · self · other`.
    pub fn weighted_dot(&self, other: &BlockTensor, grid: &GridSpace) -> Result<f64> {
        if self.alpha() != other.alpha() || self.layout.grid_size != other.layout.grid_size {
            return Err(Error::DimensionMismatch("blocks differ".into()));
        }
        Ok(self
            .layout
            .reps
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let sigma: f64 = r.iter().map(|&x| grid.weight(x)).product();
                self.layout.orbit[i] * sigma * self.values[i] * other.values[i]
            })
            .sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Every tuple of `arity` grid points, row-major.
pub fn all_tuples(grid_size: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..grid_size).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Dense function on all tuples of a fixed arity, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTensor {
    grid_size: usize,
    arity: usize,
    values: Vec<f64>,
}

impl RawTensor {
    pub fn from_fn(grid_size: usize, arity: usize, f: impl Fn(&[usize]) -> f64) -> Self {
        let values = all_tuples(grid_size, arity).iter().map(|t| f(t)).collect();
        Self {
            grid_size,
            arity,
            values,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        let idx = tuple.iter().fold(0, |acc, &x| acc * self.grid_size + x);
        self.values[idx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ_tuples Πσ · self · other`.
    pub fn weighted_dot(&self, other: &RawTensor, grid: &GridSpace) -> f64 {
        all_tuples(self.grid_size, self.arity)
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(t, (x, y))| t.iter().map(|&p| grid.weight(p)).product::<f64>() * x * y)
            .sum()
    }
}

/// `D_α f`: evaluate the symmetric level-`n` tensor `f` with every block-`k`
/// coordinate repeated `k` times.
pub fn d_alpha(f: &BlockTensor, alpha: &MultiIndex) -> Result<BlockTensor> {
    if !f.is_symmetric_level() {
        return Err(Error::Domain(format!(
            "D_α expects a symmetric tensor, got block {}",
            f.alpha()
        )));
    }
    if alpha.degree() != f.level() {
        return Err(Error::DegreeMismatch {
            expected: f.level(),
            found: alpha.degree(),
        });
    }
    let layout = Arc::new(BlockLayout::new(alpha.clone(), f.layout.grid_size));
    let lay = layout.clone();
    Ok(BlockTensor::from_fn(layout, |t| f.get(&lay.expand(t))))
}

/// `S_α g`: average of `g` over permutations inside each group of `α`.
pub fn s_alpha(g: &RawTensor, alpha: &MultiIndex) -> Result<BlockTensor> {
    if g.arity != alpha.size() {
        return Err(Error::DimensionMismatch(format!(
            "S_α for {alpha} needs arity {}, got {}",
            alpha.size(),
            g.arity
        )));
    }
    let layout = Arc::new(BlockLayout::new(alpha.clone(), g.grid_size));
    let values = (0..layout.len())
        .map(|i| {
            let arr = layout.arrangements(i);
            arr.iter().map(|t| g.get(t)).sum::<f64>() / arr.len() as f64
        })
        .collect();
    Ok(BlockTensor { layout, values })
}

#[derive(Debug)]
pub struct FockBlock {
    pub level: usize,
    pub layout: Arc<BlockLayout>,
    pub k_alpha: f64,
    pub offset: usize,
}

impl FockBlock {
    pub fn alpha(&self) -> &MultiIndex {
        self.layout.alpha()
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.layout.len()
    }
}

/// Truncated extended Fock space: all blocks of levels `0..=depth` on a grid,
/// with the weights induced by a recurrence table.
#[derive(Debug)]
pub struct FockSpace {
    grid: GridSpace,
    table: RecurrenceTable,
    depth: usize,
    blocks: Vec<FockBlock>,
    levels: Vec<Range<usize>>,
    block_ids: HashMap<MultiIndex, usize>,
    weights: Vec<f64>,
}

impl FockSpace {
    /// Requires `table.depth() >= depth`, so that every `‖P_{k-1}‖`, `a_{k-1}`
    /// and `b_{k-1}` with `k <= depth` is available.
    pub fn new(grid: GridSpace, table: RecurrenceTable, depth: usize) -> Result<Arc<Self>> {
        if depth > table.depth() {
            return Err(Error::TableTooShallow {
                needed: depth,
                depth: table.depth(),
            });
        }
        let mut blocks = Vec::new();
        let mut levels = Vec::new();
        let mut block_ids = HashMap::new();
        let mut weights = Vec::new();
        let mut offset = 0;
        for level in 0..=depth {
            let start = blocks.len();
            for alpha in partitions(level) {
                let layout = Arc::new(BlockLayout::new(alpha.clone(), grid.len()));
                let k = k_alpha(&alpha, &table)?;
                let level_weight = factorial(level) * k;
                for (i, r) in layout.representatives().iter().enumerate() {
                    let sigma: f64 = r.iter().map(|&x| grid.weight(x)).product();
                    weights.push(level_weight * layout.orbit_size(i) * sigma);
                }
                block_ids.insert(alpha, blocks.len());
                let len = layout.len();
                blocks.push(FockBlock {
                    level,
                    layout,
                    k_alpha: k,
                    offset,
                });
                offset += len;
            }
            levels.push(start..blocks.len());
        }
        Ok(Arc::new(Self {
            grid,
            table,
            depth,
            blocks,
            levels,
            block_ids,
            weights,
        }))
    }

    pub fn grid(&self) -> &GridSpace {
        &self.grid
    }

    pub fn table(&self) -> &RecurrenceTable {
        &self.table
    }

    /// Truncation level `N`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `ν̃(ℛ) = ‖P_0‖²`.
    pub fn mass(&self) -> f64 {
        self.table.norm_sq(0)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn blocks(&self) -> &[FockBlock] {
        &self.blocks
    }

    pub fn block(&self, id: usize) -> &FockBlock {
        &self.blocks[id]
    }

    /// Block ids of level `n`, in partition order.
    pub fn level_blocks(&self, n: usize) -> Range<usize> {
        self.levels[n].clone()
    }

    pub fn block_id(&self, alpha: &MultiIndex) -> Option<usize> {
        self.block_ids.get(alpha).copied()
    }

    /// Block containing global coordinate `index`.
    pub fn block_of(&self, index: usize) -> usize {
        self.blocks.partition_point(|b| b.offset <= index) - 1
    }

    /// Global coordinate of the representative of `tuple` in block `alpha`,
    /// or `None` if the block lies above the truncation.
    pub fn index_of(&self, alpha: &MultiIndex, tuple: &[usize]) -> Option<usize> {
        let b = &self.blocks[self.block_id(alpha)?];
        Some(b.offset + b.layout.index_of(tuple))
    }

    /// Diagonal of the inner product in the representative basis.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn same_setup(&self, other: &FockSpace) -> bool {
        self.grid == other.grid && self.table == other.table
    }
}

/// Element of the truncated extended Fock space.
#[derive(Debug, Clone)]
pub struct ExtendedFockVector {
    space: Arc<FockSpace>,
    data: Vec<f64>,
}

impl PartialEq for ExtendedFockVector {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.space, &other.space) || self.space.same_setup(&other.space))
            && self.space.depth == other.space.depth
            && self.data == other.data
    }
}

impl ExtendedFockVector {
    pub fn zeros(space: &Arc<FockSpace>) -> Self {
        Self {
            space: space.clone(),
            data: vec![0.0; space.dim()],
        }
    }

    /// `Ω = (1, 0, 0, …)`.
    pub fn vacuum(space: &Arc<FockSpace>) -> Self {
        let mut v = Self::zeros(space);
        v.data[0] = 1.0;
        v
    }

    /// Unit vector at global representative coordinate `index`.
    pub fn basis(space: &Arc<FockSpace>, index: usize) -> Self {
        let mut v = Self::zeros(space);
        v.data[index] = 1.0;
        v
    }

    pub fn from_data(space: &Arc<FockSpace>, data: Vec<f64>) -> Result<Self> {
        if data.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "space has dimension {}, got {} values",
                space.dim(),
                data.len()
            )));
        }
        Ok(Self {
            space: space.clone(),
            data,
        })
    }

    /// The level-`n` vector whose `α`-blocks are `D_α f` for a symmetric `f`.
    pub fn from_symmetric(space: &Arc<FockSpace>, f: &BlockTensor) -> Result<Self> {
        if !f.is_symmetric_level() {
            return Err(Error::Domain(format!(
                "expected a symmetric tensor, got block {}",
                f.alpha()
            )));
        }
        if f.layout.grid_size != space.grid.len() {
            return Err(Error::GridMismatch);
        }
        let n = f.level();
        if n > space.depth {
            return Err(Error::TruncationTooShallow {
                order: n,
                depth: space.depth,
            });
        }
        let mut v = Self::zeros(space);
        for id in space.level_blocks(n) {
            let block = &space.blocks[id];
            let d = d_alpha(f, block.alpha())?;
            v.data[block.range()].copy_from_slice(d.values());
        }
        Ok(v)
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Copy of block `alpha`, or `None` above the truncation.
    pub fn block(&self, alpha: &MultiIndex) -> Option<BlockTensor> {
        let b = &self.space.blocks[self.space.block_id(alpha)?];
        Some(BlockTensor {
            layout: b.layout.clone(),
            values: self.data[b.range()].to_vec(),
        })
    }

    pub fn set_block(&mut self, tensor: &BlockTensor) -> Result<()> {
        let id = self
            .space
            .block_id(tensor.alpha())
            .ok_or_else(|| Error::DimensionMismatch(format!("block {} above truncation", tensor.alpha())))?;
        let b = &self.space.blocks[id];
        if tensor.layout.grid_size != self.space.grid.len() {
            return Err(Error::GridMismatch);
        }
        self.data[b.range()].copy_from_slice(tensor.values());
        Ok(())
    }

    /// Largest level with a nonzero coefficient.
    pub fn top_level(&self) -> Option<usize> {
        (0..=self.space.depth).rev().find(|&n| {
            self.space
                .level_blocks(n)
                .any(|id| self.data[self.space.blocks[id].range()].iter().any(|&x| x != 0.0))
        })
    }

    pub fn axpy(&mut self, scale: f64, other: &ExtendedFockVector) -> Result<()> {
        if !Arc::ptr_eq(&self.space, &other.space)
            && !(self.space.same_setup(&other.space) && self.space.depth == other.space.depth)
        {
            return Err(Error::DimensionMismatch("vectors live in different spaces".into()));
        }
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += scale * y;
        }
        Ok(())
    }

    /// Writes one record per `(level, α, representative, value)`.
    ///
    /// Record layout: `level alpha tuple value`, where `alpha` and `tuple` are
    /// comma-separated (`-` when empty) and values carry 17 significant digits.
    pub fn to_records(&self) -> String {
        let mut out = format!(
            "# extended-fock-vector grid_points {} depth {}\n",
            self.space.grid.len(),
            self.space.depth
        );
        for block in &self.space.blocks {
            let alpha = join_or_dash(block.alpha().multiplicities());
            for (i, rep) in block.layout.representatives().iter().enumerate() {
                out.push_str(&format!(
                    "{} {} {} {:.16e}\n",
                    block.level,
                    alpha,
                    join_or_dash(rep),
                    self.data[block.offset + i]
                ));
            }
        }
        out
    }

    /// Parses records written by [`to_records`](Self::to_records) into `space`.
    /// Blocks not mentioned stay zero; records above the truncation are rejected.
    pub fn from_records(space: &Arc<FockSpace>, text: &str) -> Result<Self> {
        let mut v = Self::zeros(space);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let level: usize = fields[0].parse().map_err(|_| bad("bad level"))?;
            let alpha = MultiIndex::new(parse_list(fields[1]).ok_or_else(|| bad("bad alpha"))?);
            let tuple = parse_list(fields[2]).ok_or_else(|| bad("bad tuple"))?;
            let value: f64 = fields[3].parse().map_err(|_| bad("bad value"))?;
            if alpha.degree() != level {
                return Err(bad("alpha degree does not match level"));
            }
            if tuple.len() != alpha.size() || tuple.iter().any(|&x| x >= space.grid.len()) {
                return Err(bad("tuple does not fit alpha and grid"));
            }
            let idx = space
                .index_of(&alpha, &tuple)
                .ok_or_else(|| bad("level above truncation"))?;
            v.data[idx] = value;
        }
        Ok(v)
    }
}

fn join_or_dash(values: &[usize]) -> String {
    if values.is_empty() {
        "-".into()
    } else {
        values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn parse_list(s: &str) -> Option<Vec<usize>> {
    if s == "-" {
        return Some(Vec::new());
    }
    s.split(',').map(|p| p.parse().ok()).collect()
}

/// Inner product of the extended Fock space. Vectors may have different
/// truncations as long as grid and recurrence table agree; missing levels
/// count as zero.
pub fn inner_product(f: &ExtendedFockVector, g: &ExtendedFockVector) -> Result<f64> {
    let (fs, gs) = (&f.space, &g.space);
    if Arc::ptr_eq(fs, gs) {
        return Ok(fs
            .weights
            .iter()
            .zip(&f.data)
            .zip(&g.data)
            .map(|((w, x), y)| w * (x * y))
            .sum());
    }
    if fs.grid != gs.grid {
        return Err(Error::GridMismatch);
    }
    if fs.table != gs.table {
        return Err(Error::DimensionMismatch(
            "vectors use different recurrence tables".into(),
        ));
    }
    let shallow = if fs.depth <= gs.depth { fs } else { gs };
    let dim = shallow.dim();
    // Blocks are laid out identically up to the shallower truncation.
    Ok(shallow
        .weights
        .iter()
        .zip(&f.data[..dim])
        .zip(&g.data[..dim])
        .map(|((w, x), y)| w * (x * y))
        .sum())
}

/// `(f, g)_{𝔉_n} = Σ_α K_α ⟨D_α f, D_α g⟩`, without the `n!` level weight.
pub fn level_inner_product(f: &BlockTensor, g: &BlockTensor, grid: &GridSpace, table: &RecurrenceTable) -> Result<f64> {
    if f.level() != g.level() {
        return Err(Error::DegreeMismatch {
            expected: f.level(),
            found: g.level(),
        });
    }
    if f.layout.grid_size != grid.len() || g.layout.grid_size != grid.len() {
        return Err(Error::GridMismatch);
    }
    let mut sum = 0.0;
    for alpha in partitions(f.level()) {
        let k = k_alpha(&alpha, table)?;
        sum += k * d_alpha(f, &alpha)?.weighted_dot(&d_alpha(g, &alpha)?, grid)?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::JumpMeasure;
    use crate::orthopoly::{stieltjes, stieltjes_exhausting};

    fn nu2_table(depth: usize) -> RecurrenceTable {
        let m = JumpMeasure::new([(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        stieltjes_exhausting(&m, depth).unwrap()
    }

    fn g1() -> GridSpace {
        GridSpace::new(vec![2.0]).unwrap()
    }

    /// Brute-force partition count by enumerating all multiplicity vectors.
    fn brute_partition_count(n: usize) -> usize {
        fn rec(k: usize, rest: usize, n: usize) -> usize {
            if k > n {
                return usize::from(rest == 0);
            }
            (0..=rest / k).map(|m| rec(k + 1, rest - m * k, n)).sum()
        }
        rec(1, n, n)
    }

    #[test]
    fn partitions_examples() {
        assert_eq!(partitions(0), vec![MultiIndex::empty()]);
        assert_eq!(
            partitions(3),
            vec![
                MultiIndex::new(vec![3]),
                MultiIndex::new(vec![1, 1]),
                MultiIndex::new(vec![0, 0, 1])
            ]
        );
        assert_eq!(partitions(5).len(), 7);
        let counts: Vec<usize> = (0..=6).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11]);
        for n in 0..=9 {
            let p = partitions(n);
            assert_eq!(p.len(), brute_partition_count(n));
            assert!(p.iter().all(|a| a.degree() == n));
            let mut dedup = p.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), p.len());
        }
    }

    #[test]
    fn shifts() {
        let a = MultiIndex::new(vec![1, 1]);
        assert_eq!(a.shifted(1, -1), Some(MultiIndex::new(vec![0, 1])));
        assert_eq!(a.shifted(2, -1), Some(MultiIndex::new(vec![1])));
        assert_eq!(a.shifted(3, -1), None);
        assert_eq!(a.shifted(3, 1), Some(MultiIndex::new(vec![1, 1, 1])));
        assert_eq!(a.size(), 2);
        assert_eq!(a.degree(), 3);
        assert_eq!(a.to_string(), "(1,1)");
    }

    #[test]
    fn k_alpha_examples() {
        let t = nu2_table(2);
        assert_eq!(k_alpha(&MultiIndex::new(vec![1]), &t).unwrap(), 1.0);
        assert_eq!(k_alpha(&MultiIndex::new(vec![0, 1]), &t).unwrap(), 0.5);
        assert_eq!(k_alpha(&MultiIndex::new(vec![1, 1]), &t).unwrap(), 1.5);
        assert!(k_alpha(&MultiIndex::new(vec![0, 0, 1]), &t).is_err());
    }

    #[test]
    fn k_alpha_singletons_is_mass_power() {
        let m = JumpMeasure::new([(-1.0, 0.3), (2.0, 0.9), (3.5, 0.4)]).unwrap();
        let t = stieltjes(&m, 3).unwrap();
        for n in 0..6 {
            let k = k_alpha(&MultiIndex::singletons(n), &t).unwrap();
            assert!((k - m.mass().powi(n as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn layout_representatives() {
        let lay = BlockLayout::new(MultiIndex::new(vec![2, 1]), 3);
        // C(4,2) * 3 representatives.
        assert_eq!(lay.len(), 18);
        assert_eq!(lay.representative(0), &[0, 0, 0]);
        assert_eq!(lay.index_of(&[2, 1, 0]), lay.index_of(&[1, 2, 0]));
        let total: f64 = (0..lay.len()).map(|i| lay.orbit_size(i)).sum();
        assert_eq!(total, 27.0);
        for i in 0..lay.len() {
            assert_eq!(lay.arrangements(i).len() as f64, lay.orbit_size(i));
        }
    }

    #[test]
    fn d_alpha_examples() {
        let f2 = BlockTensor::symmetric(2, 3, |t| (1 + t[0]) as f64 * (1 + t[1]) as f64 + (t[0] + t[1]) as f64);
        let d = d_alpha(&f2, &MultiIndex::new(vec![0, 1])).unwrap();
        for x in 0..3 {
            assert_eq!(d.get(&[x]), f2.get(&[x, x]));
        }
        assert_eq!(d_alpha(&f2, &MultiIndex::singletons(2)).unwrap(), f2);

        let f3 = BlockTensor::symmetric(3, 3, |t| {
            (t[0] * 7 + t[1] * 7 + t[2] * 7) as f64 + (t[0] * t[1] * t[2]) as f64
        });
        let d = d_alpha(&f3, &MultiIndex::new(vec![1, 1])).unwrap();
        for x1 in 0..3 {
            for x2 in 0..3 {
                assert_eq!(d.get(&[x1, x2]), f3.get(&[x1, x2, x2]));
            }
        }
        assert!(matches!(
            d_alpha(&f3, &MultiIndex::new(vec![0, 1])),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn d_alpha_of_symmetrized_products_matches_pointwise() {
        // f = sym(u1 ⊗ … ⊗ un) evaluated pointwise against D_α of the stored tensor.
        let us: Vec<Vec<f64>> = vec![vec![1.0, -2.0, 0.5], vec![0.3, 1.7, -1.1], vec![2.0, 0.0, 1.0]];
        for g in 1..=3usize {
            for n in 0..=3usize {
                let eval = |t: &[usize]| -> f64 {
                    let mut idx: Vec<usize> = (0..n).collect();
                    let mut total = 0.0;
                    let mut count = 0.0;
                    loop {
                        total += idx.iter().enumerate().map(|(j, &p)| us[j][t[p]]).product::<f64>();
                        count += 1.0;
                        if !next_permutation(&mut idx) {
                            break;
                        }
                    }
                    total / count
                };
                let f = BlockTensor::symmetric(n, g, eval);
                for alpha in partitions(n) {
                    let d = d_alpha(&f, &alpha).unwrap();
                    let lay = d.layout().clone();
                    for t in all_tuples(g, alpha.size()) {
                        let expect = eval(&lay.expand(&t));
                        assert!((d.get(&t) - expect).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn s_alpha_examples() {
        let phi = [1.0, 2.0, -1.0];
        let psi = [0.5, -3.0, 4.0];
        let g = RawTensor::from_fn(3, 2, |t| phi[t[0]] * psi[t[1]]);
        let s = s_alpha(&g, &MultiIndex::singletons(2)).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let expect = 0.5 * (phi[x] * psi[y] + phi[y] * psi[x]);
                assert!((s.get(&[x, y]) - expect).abs() < 1e-15);
            }
        }
        let s11 = s_alpha(&g, &MultiIndex::new(vec![0, 2])).unwrap();
        assert!((s11.get(&[0, 1]) - 0.5 * (phi[0] * psi[1] + phi[1] * psi[0])).abs() < 1e-15);
        let s_unchanged = s_alpha(&g, &MultiIndex::new(vec![1, 1])).unwrap();
        assert_eq!(s_unchanged.to_raw(), g);
        assert!(s_alpha(&g, &MultiIndex::singletons(3)).is_err());
    }

    #[test]
    fn s_alpha_idempotent_and_self_adjoint() {
        let grid = GridSpace::new(vec![0.7, 1.3, 2.1]).unwrap();
        let g = RawTensor::from_fn(3, 3, |t| ((t[0] * 9 + t[1] * 3 + t[2]) as f64).sin());
        let h = RawTensor::from_fn(3, 3, |t| ((t[0] * 5 + t[1] * 11 + t[2] * 2) as f64).cos());
        for alpha in [
            MultiIndex::singletons(3),
            MultiIndex::new(vec![2, 1]),
            MultiIndex::new(vec![1, 2]),
            MultiIndex::new(vec![0, 0, 3]),
        ] {
            let sg = s_alpha(&g, &alpha).unwrap().to_raw();
            let ssg = s_alpha(&sg, &alpha).unwrap().to_raw();
            for (a, b) in sg.values().iter().zip(ssg.values()) {
                assert!((a - b).abs() < 1e-12);
            }
            let sh = s_alpha(&h, &alpha).unwrap().to_raw();
            let lhs = sg.weighted_dot(&h, &grid);
            let rhs = g.weighted_dot(&sh, &grid);
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn inner_product_examples() {
        let space = FockSpace::new(g1(), nu2_table(2), 2).unwrap();
        let omega = ExtendedFockVector::vacuum(&space);
        assert_eq!(inner_product(&omega, &omega).unwrap(), 1.0);

        let f1 = ExtendedFockVector::from_symmetric(&space, &BlockTensor::symmetric(1, 1, |_| 1.0)).unwrap();
        assert!((inner_product(&f1, &f1).unwrap() - 2.0).abs() < 1e-15);

        let f2t = BlockTensor::symmetric(2, 1, |_| 1.0);
        let f2 = ExtendedFockVector::from_symmetric(&space, &f2t).unwrap();
        assert!((inner_product(&f2, &f2).unwrap() - 10.0).abs() < 1e-14);
        let lvl = level_inner_product(&f2t, &f2t, &g1(), &nu2_table(2)).unwrap();
        assert!((lvl - 5.0).abs() < 1e-14);
        assert_eq!(inner_product(&omega, &f2).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_across_truncations() {
        let shallow = FockSpace::new(g1(), nu2_table(3), 1).unwrap();
        let deep = FockSpace::new(g1(), nu2_table(3), 3).unwrap();
        let a = ExtendedFockVector::from_symmetric(&shallow, &BlockTensor::symmetric(1, 1, |_| 1.0)).unwrap();
        let mut b = ExtendedFockVector::from_symmetric(&deep, &BlockTensor::symmetric(1, 1, |_| 3.0)).unwrap();
        b.axpy(
            1.0,
            &ExtendedFockVector::from_symmetric(&deep, &BlockTensor::symmetric(3, 1, |_| 1.0)).unwrap(),
        )
        .unwrap();
        assert!((inner_product(&a, &b).unwrap() - 6.0).abs() < 1e-14);

        let other_grid = FockSpace::new(GridSpace::new(vec![1.0]).unwrap(), nu2_table(3), 1).unwrap();
        let c = ExtendedFockVector::vacuum(&other_grid);
        assert_eq!(inner_product(&a, &c), Err(Error::GridMismatch));
    }

    #[test]
    fn gram_matrix_positive_definite() {
        let m = JumpMeasure::new([(-1.5, 0.4), (0.5, 1.0), (2.0, 0.6), (3.0, 0.2)]).unwrap();
        let space = FockSpace::new(GridSpace::new(vec![0.5, 1.5]).unwrap(), stieltjes(&m, 4).unwrap(), 4).unwrap();
        // Diagonal in the representative basis, so positivity means positive weights.
        assert!(space.weights().iter().all(|&w| w > 0.0));
        let vs: Vec<ExtendedFockVector> = (0..space.dim()).map(|i| ExtendedFockVector::basis(&space, i)).collect();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                let a = inner_product(&vs[i], &vs[j]).unwrap();
                let b = inner_product(&vs[j], &vs[i]).unwrap();
                assert_eq!(a, b);
                if i != j {
                    assert_eq!(a, 0.0);
                }
            }
        }
    }

    #[test]
    fn records_round_trip() {
        let space = FockSpace::new(GridSpace::new(vec![1.0, 2.0]).unwrap(), nu2_table(3), 3).unwrap();
        let data: Vec<f64> = (0..space.dim()).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let v = ExtendedFockVector::from_data(&space, data).unwrap();
        let text = v.to_records();
        assert!(text.lines().nth(1).unwrap().starts_with("0 - - "));
        let back = ExtendedFockVector::from_records(&space, &text).unwrap();
        assert_eq!(back, v);
        assert!(ExtendedFockVector::from_records(&space, "4 4 0,0,0,0 1.0").is_err());
        assert!(ExtendedFockVector::from_records(&space, "2 1 0 1.0").is_err());
    }
}
