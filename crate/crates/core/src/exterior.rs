//! Sparse exterior algebra over the rationals.
//!
//! Basis vectors are addressed by *position* `0..dim`. Positions follow the
//! canonical label order `1, -1, 2, -2, …, p, -p, 0` of a hyperbolic basis
//! (or `1..n` for a plain basis); [`Label`] converts between the two.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Rational};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 32;

/// A signed basis label: `±i` for hyperbolic pairs, `0` for the anisotropic
/// vector in odd dimension, or `1..=n` for a plain basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub i32);

impl Label {
    /// Sort key in the canonical order `1, -1, 2, -2, …, 0`.
    pub fn canonical_key(self) -> u32 {
        match self.0 {
            0 => u32::MAX,
            i if i > 0 => 2 * (i as u32 - 1),
            i => 2 * (i.unsigned_abs() - 1) + 1,
        }
    }

    pub fn partner(self) -> Label {
        Label(-self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Labels `1, -1, …, p, -p` followed by `0` when `n` is odd.
pub fn hyperbolic_labels(n: usize) -> Vec<Label> {
    let p = (n / 2) as i32;
    let mut labels: Vec<Label> = (1..=p).flat_map(|i| [Label(i), Label(-i)]).collect();
    if n % 2 == 1 {
        labels.push(Label(0));
    }
    labels
}

pub fn plain_labels(n: usize) -> Vec<Label> {
    (1..=n as i32).map(Label).collect()
}

/// A set of basis positions, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    /// Builds a set from distinct positions; `None` on repeats or out-of-range positions.
    pub fn from_positions<I: IntoIterator<Item = usize>>(positions: I) -> Option<Self> {
        let mut bits = 0u32;
        for p in positions {
            if p >= MAX_DIM || bits & (1 << p) != 0 {
                return None;
            }
            bits |= 1 << p;
        }
        Some(IndexSet(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, pos: usize) -> bool {
        pos < MAX_DIM && self.0 & (1 << pos) != 0
    }

    pub fn with(self, pos: usize) -> Self {
        IndexSet(self.0 | (1 << pos))
    }

    pub fn without(self, pos: usize) -> Self {
        IndexSet(self.0 & !(1 << pos))
    }

    pub fn union(self, other: Self) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn minus(self, other: Self) -> Self {
        IndexSet(self.0 & !other.0)
    }

    /// Positions in ascending order.
    pub fn positions(self) -> Positions {
        Positions(self.0)
    }

    /// Number of elements strictly below `pos`.
    pub fn rank_of(self, pos: usize) -> usize {
        (self.0 & ((1u32 << pos) - 1)).count_ones() as usize
    }

    /// All `k`-subsets of `0..n` in increasing order.
    pub fn subsets(n: usize, k: usize) -> Vec<IndexSet> {
        let mut out = Vec::new();
        if k > n {
            return out;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(IndexSet::from_positions(idx.iter().copied()).expect("distinct"));
            let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
                return out;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

pub struct Positions(u32);

impl Iterator for Positions {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.positions().cmp(other.positions())
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.positions()).finish()
    }
}

/// Sign of `e_a ∧ e_b` relative to `e_{a ∪ b}`: parity of pairs `i ∈ a`, `j ∈ b` with `i > j`.
pub fn merge_sign(a: IndexSet, b: IndexSet) -> i32 {
    let mut inversions = 0;
    for j in b.positions() {
        inversions += (a.bits() >> j >> 1).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign and set for the ordered wedge `e_{p_1} ∧ ⋯ ∧ e_{p_k}`, or `None` on a repeat.
pub fn sort_positions(positions: &[usize]) -> Option<(i32, IndexSet)> {
    let set = IndexSet::from_positions(positions.iter().copied())?;
    let mut inversions = 0;
    for (i, a) in positions.iter().enumerate() {
        inversions += positions[i + 1..].iter().filter(|b| *b < a).count();
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, set))
}

/// A linear functional on `V`, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covector {
    pub coords: Vec<Rational>,
}

impl Covector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Covector { coords }
    }

    /// The dual basis functional `e_pos^*`.
    pub fn dual_basis(dim: usize, pos: usize) -> Self {
        Covector::new(linalg::unit(dim, pos))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn eval(&self, v: &[Rational]) -> Rational {
        linalg::dot(&self.coords, v)
    }
}

/// Homogeneous element of `⋀^grade V` with exact coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiVector {
    dim: usize,
    grade: usize,
    terms: BTreeMap<IndexSet, Rational>,
}

impl MultiVector {
    pub fn zero(dim: usize, grade: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        MultiVector {
            dim,
            grade,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, c: Rational) -> Self {
        let mut m = MultiVector::zero(dim, 0);
        m.add_term(IndexSet::EMPTY, c);
        m
    }

    /// A vector as a grade-1 element.
    pub fn from_vector(v: &[Rational]) -> Self {
        let mut m = MultiVector::zero(v.len(), 1);
        for (i, c) in v.iter().enumerate() {
            m.add_term(IndexSet::EMPTY.with(i), c.clone());
        }
        m
    }

    /// The ordered wedge `e_{p_1} ∧ ⋯ ∧ e_{p_k}`.
    pub fn blade(dim: usize, positions: &[usize]) -> Self {
        let mut m = MultiVector::zero(dim, positions.len());
        if let Some((sign, set)) = sort_positions(positions) {
            m.add_term(set, linalg::rat(sign as i64));
        }
        m
    }

    /// Builds from `(set, coefficient)` pairs, summing repeated sets.
    pub fn from_terms<I>(dim: usize, grade: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (IndexSet, Rational)>,
    {
        if grade > dim {
            return Err(Error::GradeOutOfRange { grade, dim });
        }
        let mut m = MultiVector::zero(dim, grade);
        for (set, c) in terms {
            if set.len() != grade || set.bits() >> dim != 0 {
                return Err(Error::Precondition(format!(
                    "index set {set:?} invalid for grade {grade} in dimension {dim}"
                )));
            }
            m.add_term(set, c);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexSet, &Rational)> + '_ {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    pub fn coefficient(&self, set: IndexSet) -> Rational {
        self.terms.get(&set).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the ordered wedge `e_{p_1} ∧ ⋯ ∧ e_{p_k}`.
    pub fn coefficient_ordered(&self, positions: &[usize]) -> Rational {
        match sort_positions(positions) {
            Some((sign, set)) => self.coefficient(set) * linalg::rat(sign as i64),
            None => Rational::zero(),
        }
    }

    /// Some index set with nonzero coefficient (the first in order).
    pub fn leading(&self) -> Option<(IndexSet, &Rational)> {
        self.terms.iter().next().map(|(s, c)| (*s, c))
    }

    pub fn add_term(&mut self, set: IndexSet, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(set.len(), self.grade);
        match self.terms.entry(set) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return MultiVector::zero(self.dim, self.grade);
        }
        MultiVector {
            dim: self.dim,
            grade: self.grade,
            terms: self.terms.iter().map(|(s, x)| (*s, x * c)).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.grade != other.grade {
            return Err(Error::Precondition(format!(
                "grade mismatch: {} vs {}",
                self.grade, other.grade
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let grade = self.grade + other.grade;
        let mut out = MultiVector::zero(self.dim, grade.min(self.dim));
        if grade > self.dim {
            out.grade = grade;
            return Ok(out);
        }
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.intersects(*b) {
                    continue;
                }
                let c = x * y;
                out.add_term(
                    a.union(*b),
                    if merge_sign(*a, *b) > 0 { c } else { -c },
                );
            }
        }
        Ok(out)
    }

    /// `v_1 ∧ ⋯ ∧ v_k` for vectors of a common length.
    pub fn wedge_vectors(dim: usize, vectors: &[Vec<Rational>]) -> Self {
        let mut acc = MultiVector::scalar(dim, Rational::one());
        for v in vectors {
            acc = acc
                .wedge(&MultiVector::from_vector(v))
                .expect("vectors share the ambient dimension");
        }
        acc
    }

    /// Contraction by a covector: `v_1 ∧ ⋯ ∧ v_k ↦ Σ (-1)^{i-1} β(v_i) v_1 ∧ ⋯ v̂_i ⋯ ∧ v_k`.
    pub fn contract(&self, beta: &Covector) -> Result<Self> {
        if beta.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: beta.dim(),
            });
        }
        if self.grade == 0 {
            return Err(Error::GradeZero);
        }
        let mut out = MultiVector::zero(self.dim, self.grade - 1);
        let support: u32 = beta
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(0, |acc, (i, _)| acc | (1 << i));
        for (set, x) in &self.terms {
            for (slot, pos) in set.positions().enumerate() {
                if support & (1 << pos) == 0 {
                    continue;
                }
                let c = x * &beta.coords[pos];
                out.add_term(set.without(pos), if slot % 2 == 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    /// Contraction by the dual basis covector `e_pos^*`.
    pub fn contract_dual(&self, pos: usize) -> Self {
        let mut out = MultiVector::zero(self.dim, self.grade.saturating_sub(1));
        for (set, x) in &self.terms {
            if set.contains(pos) {
                let c = if set.rank_of(pos) % 2 == 0 { x.clone() } else { -x.clone() };
                out.terms.insert(set.without(pos), c);
            }
        }
        out
    }

    /// Image under `⋀^k M` for an `m × dim` matrix `M` (rows indexed by target positions).
    pub fn apply_linear(&self, matrix: &[Vec<Rational>]) -> Self {
        let target = matrix.len();
        let columns: Vec<Vec<(usize, Rational)>> = (0..self.dim)
            .map(|c| {
                matrix
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| !row[c].is_zero())
                    .map(|(r, row)| (r, row[c].clone()))
                    .collect()
            })
            .collect();
        self.apply_columns(target, &columns)
    }

    /// `⋀^k M` where column `c` of `M` is given sparsely as `(row, value)` pairs.
    pub fn apply_columns(&self, target: usize, columns: &[Vec<(usize, Rational)>]) -> Self {
        let mut out = MultiVector::zero(target, self.grade);
        if self.grade > target {
            return out;
        }
        for (set, x) in &self.terms {
            let mut partial: BTreeMap<IndexSet, Rational> = BTreeMap::new();
            partial.insert(IndexSet::EMPTY, x.clone());
            for pos in set.positions() {
                let mut next: BTreeMap<IndexSet, Rational> = BTreeMap::new();
                for (acc, c) in &partial {
                    for (r, m) in &columns[pos] {
                        if acc.contains(*r) {
                            continue;
                        }
                        let above = (acc.bits() >> r >> 1).count_ones();
                        let v = c * m;
                        let v = if above % 2 == 0 { v } else { -v };
                        let entry = next.entry(acc.with(*r)).or_insert_with(Rational::zero);
                        *entry += v;
                    }
                }
                next.retain(|_, v| !v.is_zero());
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (s, c) in partial {
                out.add_term(s, c);
            }
        }
        out
    }

    /// `Some(c)` with `self = c · other` when `other ≠ 0` and the two are proportional.
    pub fn ratio_to(&self, other: &Self) -> Option<Rational> {
        if self.dim != other.dim || self.grade != other.grade {
            return None;
        }
        let (set, y) = other.leading()?;
        let c = self.coefficient(set) / y;
        if self.len() != other.len() {
            return None;
        }
        let proportional = other
            .terms
            .iter()
            .all(|(s, y)| self.terms.get(s).is_some_and(|x| *x == y * &c));
        proportional.then_some(c)
    }

    /// Dense coefficient vector over `IndexSet::subsets(dim, grade)`.
    pub fn to_dense(&self, basis: &[IndexSet]) -> Vec<Rational> {
        basis.iter().map(|s| self.coefficient(*s)).collect()
    }
}

impl fmt::Debug for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·e{:?}", s.positions().collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

impl Add for &MultiVector {
    type Output = MultiVector;

    fn add(self, rhs: &MultiVector) -> MultiVector {
        self.checked_add(rhs).expect("operands share dimension and grade")
    }
}

impl Sub for &MultiVector {
    type Output = MultiVector;

    fn sub(self, rhs: &MultiVector) -> MultiVector {
        self + &(-rhs)
    }
}

impl Neg for &MultiVector {
    type Output = MultiVector;

    fn neg(self) -> MultiVector {
        MultiVector {
            dim: self.dim,
            grade: self.grade,
            terms: self.terms.iter().map(|(s, c)| (*s, -c)).collect(),
        }
    }
}
