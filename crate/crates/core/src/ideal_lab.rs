//! Degree-two equations of `Ĝr_iso(3,7)` and of one component of `Ĝr_iso(4,8)`,
//! computed by interpolation, decomposed under the maximal torus of `SO(V)`,
//! and regenerated from highest weight vectors of minimal rank.
//!
//! Both varieties are torus-stable, so their ideals are spanned by torus
//! eigenvectors and every kernel is computed one weight block at a time. A
//! rank profile over `𝔽_p` fixes how many sample rows the exact kernel needs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::PluckerRelation;
use crate::counterexamples::{derivation, so_basis};
use crate::error::{Error, Result};
use crate::exterior::{hyperbolic_labels, sort_positions, IndexSet, Label, MultiVector};
use crate::igcp;
use crate::linalg::{self, rat, Echelon, ModPEchelon, Rational};
use crate::quadratic::QuadraticSpace;

/// Holdout points every computed equation must vanish on.
pub const HOLDOUT: usize = 100;
/// Sample count as a multiple of the number of degree-2 monomials.
pub const SAMPLE_FACTOR: usize = 4;
const MAX_DOUBLINGS: usize = 3;
const MAX_GENERATORS: usize = 64;
/// Random column orders tried when searching for low-rank generators.
const CIRCUIT_ORDERINGS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variety {
    /// `Ĝr_iso(3,7)` in the standard space with `⟨e_0, e_0⟩ = 1`.
    Iso37,
    /// The component of `Ĝr_iso(4,8)` containing the row spaces of `[I₄ | A]`, `A` skew.
    Iso48Component,
}

impl Variety {
    pub fn space(self) -> QuadraticSpace {
        match self {
            Variety::Iso37 => QuadraticSpace::standard(7),
            Variety::Iso48Component => QuadraticSpace::standard(8),
        }
    }

    pub fn grade(self) -> usize {
        match self {
            Variety::Iso37 => 3,
            Variety::Iso48Component => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variety::Iso37 => "iso37",
            Variety::Iso48Component => "iso48_component",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "iso37" => Some(Variety::Iso37),
            "iso48_component" | "iso48" => Some(Variety::Iso48Component),
            _ => None,
        }
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Torus weight in `ℤ^p`: label `i > 0` adds `+1` in slot `i`, `-i` adds `-1`, `0` adds nothing.
pub type Weight = Vec<i32>;

fn label_weight(label: Label, p: usize) -> Weight {
    let mut w = vec![0; p];
    let i = label.0;
    if i != 0 {
        w[i.unsigned_abs() as usize - 1] = i.signum();
    }
    w
}

fn add_weights(a: &[i32], b: &[i32]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn is_positive(w: &[i32]) -> bool {
    w.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Weight of the Plücker coordinate `x_I` of a standard space.
pub fn coordinate_weight(dim: usize, set: IndexSet) -> Weight {
    let labels = hyperbolic_labels(dim);
    set.positions().fold(vec![0; dim / 2], |acc, pos| {
        add_weights(&acc, &label_weight(labels[pos], dim / 2))
    })
}

/// Either a common weight of all monomials, or `"mixed"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TorusWeight {
    Weight(Weight),
    Mixed(MixedTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedTag {
    Mixed,
}

impl TorusWeight {
    pub fn mixed() -> Self {
        TorusWeight::Mixed(MixedTag::Mixed)
    }

    pub fn weight(&self) -> Option<&[i32]> {
        match self {
            TorusWeight::Weight(w) => Some(w),
            TorusWeight::Mixed(_) => None,
        }
    }
}

/// Linear function on `⋀^k V` for a standard space `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub dim: usize,
    pub grade: usize,
    pub coeffs: BTreeMap<IndexSet, Rational>,
}

impl LinearForm {
    pub fn zero(dim: usize, grade: usize) -> Self {
        LinearForm {
            dim,
            grade,
            coeffs: BTreeMap::new(),
        }
    }

    /// `Σ c · x_{l_1,…,l_k}` with each index tuple read in written order.
    pub fn written(dim: usize, terms: &[(i64, &[i32])]) -> Self {
        let grade = terms[0].1.len();
        let mut out = LinearForm::zero(dim, grade);
        for (c, labels) in terms {
            let (sign, set) = written_coordinate(dim, labels);
            out.add(set, rat(*c * sign as i64));
        }
        out
    }

    pub fn add(&mut self, set: IndexSet, c: Rational) {
        let entry = self.coeffs.entry(set).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&set);
        }
    }

    pub fn eval(&self, omega: &MultiVector) -> Rational {
        self.coeffs.iter().map(|(s, c)| c * omega.coefficient(*s)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Position set and sign of `x_{l_1,…,l_k}` written in the given label order.
fn written_coordinate(dim: usize, labels: &[i32]) -> (i32, IndexSet) {
    let all = hyperbolic_labels(dim);
    let positions: Vec<usize> = labels
        .iter()
        .map(|l| all.iter().position(|x| x.0 == *l).expect("label in space"))
        .collect();
    sort_positions(&positions).expect("distinct labels")
}

/// Quadratic form `Σ c · x_I x_J` on `⋀^k V` for a standard space `V`; keys have `I ≤ J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadric {
    pub dim: usize,
    pub grade: usize,
    pub terms: BTreeMap<(IndexSet, IndexSet), Rational>,
}

impl Quadric {
    pub fn zero(dim: usize, grade: usize) -> Self {
        Quadric {
            dim,
            grade,
            terms: BTreeMap::new(),
        }
    }

    pub fn n_coords(&self) -> usize {
        IndexSet::subsets(self.dim, self.grade).len()
    }

    pub fn add(&mut self, a: IndexSet, b: IndexSet, c: Rational) {
        let key = if a <= b { (a, b) } else { (b, a) };
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn from_relation(rel: &PluckerRelation) -> Self {
        let mut q = Quadric::zero(rel.n, rel.k);
        for (a, b, sign) in &rel.terms {
            q.add(*a, *b, rat(*sign as i64));
        }
        q
    }

    pub fn product(l: &LinearForm, m: &LinearForm) -> Self {
        let mut q = Quadric::zero(l.dim, l.grade);
        for (a, c) in &l.coeffs {
            for (b, d) in &m.coeffs {
                q.add(*a, *b, c * d);
            }
        }
        q
    }

    pub fn plus(&self, other: &Quadric, scale: i64) -> Quadric {
        let mut q = self.clone();
        let s = rat(scale);
        for ((a, b), c) in &other.terms {
            q.add(*a, *b, c * &s);
        }
        q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, omega: &MultiVector) -> Rational {
        self.terms
            .iter()
            .map(|((a, b), c)| c * omega.coefficient(*a) * omega.coefficient(*b))
            .sum()
    }

    /// Coordinates involved, and the symmetric matrix on them.
    pub fn sym(&self) -> (Vec<IndexSet>, Vec<Vec<Rational>>) {
        let mut coords: Vec<IndexSet> = self.terms.keys().flat_map(|(a, b)| [*a, *b]).collect();
        coords.sort();
        coords.dedup();
        let at: HashMap<IndexSet, usize> = coords.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let half = linalg::ratio(1, 2);
        let mut m = vec![linalg::zeros(coords.len()); coords.len()];
        for ((a, b), c) in &self.terms {
            let (i, j) = (at[a], at[b]);
            if i == j {
                m[i][i] += c;
            } else {
                let h = c * &half;
                m[i][j] += &h;
                m[j][i] += &h;
            }
        }
        (coords, m)
    }
}

/// Rank of the symmetric matrix of `q`.
pub fn quadric_rank(q: &Quadric) -> usize {
    linalg::rank(&q.sym().1)
}

pub fn torus_weight(q: &Quadric) -> TorusWeight {
    let mut weights = q
        .terms
        .keys()
        .map(|(a, b)| add_weights(&coordinate_weight(q.dim, *a), &coordinate_weight(q.dim, *b)));
    let Some(first) = weights.next() else {
        return TorusWeight::Weight(vec![0; q.dim / 2]);
    };
    if weights.all(|w| w == first) {
        TorusWeight::Weight(first)
    } else {
        TorusWeight::mixed()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSpace {
    pub weight: Weight,
    pub basis: Vec<Quadric>,
}

/// Random points of the variety as Plücker vectors, drawn from a dense open cell.
///
/// `Iso37`: rows `e_i + Σ_j A_ij e_{-j} + b_i e_0` with `A = S - c₀ b bᵀ`, `S` skew.
/// `Iso48Component`: rows of `[I₄ | A]` with `A` skew.
pub fn sample_variety_points<R: Rng + ?Sized>(variety: Variety, count: usize, rng: &mut R) -> Vec<MultiVector> {
    let space = variety.space();
    let p = variety.grade();
    let n = space.dim();
    let pos = |l: i32| space.position(Label(l)).expect("label");
    let c0 = space.c0().cloned();
    (0..count)
        .map(|_| {
            let mut s = vec![vec![0i64; p]; p];
            for i in 0..p {
                for j in i + 1..p {
                    s[i][j] = rng.gen_range(-4..=4);
                    s[j][i] = -s[i][j];
                }
            }
            let b: Vec<i64> = (0..p).map(|_| rng.gen_range(-4..=4)).collect();
            let rows: Vec<Vec<Rational>> = (0..p)
                .map(|i| {
                    let mut r = linalg::zeros(n);
                    r[pos(i as i32 + 1)] = Rational::one();
                    for j in 0..p {
                        let mut a = rat(s[i][j]);
                        if let Some(c0) = &c0 {
                            a -= c0 * rat(b[i] * b[j]);
                        }
                        r[pos(-(j as i32 + 1))] = a;
                    }
                    if c0.is_some() {
                        r[pos(0)] = rat(b[i]);
                    }
                    r
                })
                .collect();
            let omega = MultiVector::wedge_vectors(n, &rows);
            primitive_form(&omega)
        })
        .collect()
}

fn primitive_form(omega: &MultiVector) -> MultiVector {
    let basis: Vec<IndexSet> = omega.terms().map(|(s, _)| s).collect();
    let coeffs: Vec<Rational> = omega.terms().map(|(_, c)| c.clone()).collect();
    let prim = linalg::primitive(&coeffs);
    MultiVector::from_terms(omega.dim(), omega.grade(), basis.into_iter().zip(prim)).expect("same shape")
}

/// Coordinate layout after eliminating the linear equations.
#[derive(Clone, Debug)]
struct Layout {
    dim: usize,
    coords: Vec<IndexSet>,
    /// Each coordinate as a combination of free coordinates (indices into `free`).
    subst: Vec<Vec<(usize, Rational)>>,
    free: Vec<usize>,
    monomials: Vec<(usize, usize)>,
    mono_index: HashMap<(usize, usize), usize>,
    blocks: BTreeMap<Weight, Vec<usize>>,
    /// Block weight and position inside the block for each monomial.
    mono_block: Vec<(Weight, usize)>,
}

/// Sparse polynomial over the monomials of a [`Layout`].
type Poly = BTreeMap<usize, Rational>;

fn poly_add(p: &mut Poly, m: usize, c: Rational) {
    let e = p.entry(m).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&m);
    }
}

impl Layout {
    fn new(dim: usize, coords: Vec<IndexSet>, linear: &[LinearForm]) -> Self {
        let index: HashMap<IndexSet, usize> = coords.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut echelon = Echelon::new(coords.len());
        for l in linear {
            let mut v = linalg::zeros(coords.len());
            for (s, c) in &l.coeffs {
                v[index[s]] = c.clone();
            }
            echelon.insert(v);
        }
        let (rows, pivots) = echelon.into_sorted();
        let free: Vec<usize> = (0..coords.len()).filter(|i| !pivots.contains(i)).collect();
        let free_at: HashMap<usize, usize> = free.iter().enumerate().map(|(f, i)| (*i, f)).collect();
        let mut subst: Vec<Vec<(usize, Rational)>> = (0..coords.len())
            .map(|i| free_at.get(&i).map(|&f| vec![(f, Rational::one())]).unwrap_or_default())
            .collect();
        for (row, &p) in rows.iter().zip(&pivots) {
            subst[p] = free
                .iter()
                .enumerate()
                .filter(|(_, &i)| !row[i].is_zero())
                .map(|(f, &i)| (f, -row[i].clone()))
                .collect();
        }
        let weights: Vec<Weight> = free.iter().map(|&i| coordinate_weight(dim, coords[i])).collect();
        let mut monomials = Vec::new();
        let mut mono_index = HashMap::new();
        let mut blocks: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
        let mut mono_block = Vec::new();
        for f in 0..free.len() {
            for g in f..free.len() {
                let m = monomials.len();
                let w = add_weights(&weights[f], &weights[g]);
                let block = blocks.entry(w.clone()).or_default();
                mono_block.push((w, block.len()));
                block.push(m);
                mono_index.insert((f, g), m);
                monomials.push((f, g));
            }
        }
        Layout {
            dim,
            coords,
            subst,
            free,
            monomials,
            mono_index,
            blocks,
            mono_block,
        }
    }

    fn grade(&self) -> usize {
        self.coords[0].len()
    }

    fn mono(&self, f: usize, g: usize) -> usize {
        self.mono_index[&if f <= g { (f, g) } else { (g, f) }]
    }

    fn reduce_linear(&self, l: &BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
        let mut out = BTreeMap::new();
        for (i, c) in l {
            for (f, d) in &self.subst[*i] {
                poly_add(&mut out, *f, c * d);
            }
        }
        out
    }

    fn reduce_quadric(&self, q: &Quadric) -> Poly {
        let index: HashMap<IndexSet, usize> = self.coords.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut out = Poly::new();
        for ((a, b), c) in &q.terms {
            for (f, x) in &self.subst[index[a]] {
                for (g, y) in &self.subst[index[b]] {
                    poly_add(&mut out, self.mono(*f, *g), c * x * y);
                }
            }
        }
        out
    }

    fn to_quadric(&self, p: &Poly) -> Quadric {
        let mut q = Quadric::zero(self.dim, self.grade());
        for (m, c) in p {
            let (f, g) = self.monomials[*m];
            q.add(self.coords[self.free[f]], self.coords[self.free[g]], c.clone());
        }
        q
    }

    fn split(&self, p: &Poly) -> BTreeMap<Weight, Vec<Rational>> {
        let mut out: BTreeMap<Weight, Vec<Rational>> = BTreeMap::new();
        for (m, c) in p {
            let (w, local) = &self.mono_block[*m];
            out.entry(w.clone())
                .or_insert_with(|| linalg::zeros(self.blocks[w].len()))[*local] = c.clone();
        }
        out
    }

    fn block_poly(&self, w: &Weight, v: &[Rational]) -> Poly {
        self.blocks[w]
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (*m, c.clone()))
            .collect()
    }

    fn poly_rank(&self, p: &Poly) -> usize {
        quadric_rank(&self.to_quadric(p))
    }

    fn free_values(&self, omega: &MultiVector) -> Vec<Rational> {
        self.free.iter().map(|&i| omega.coefficient(self.coords[i])).collect()
    }
}

/// Linear part and weight-decomposed `I₂` of the ideal through the sample points.
#[derive(Clone, Debug)]
pub struct DegreeParts {
    pub linear: Vec<LinearForm>,
    pub i2: Vec<WeightSpace>,
    pub samples: usize,
    layout: Layout,
    i2_blocks: BTreeMap<Weight, Echelon>,
}

impl DegreeParts {
    pub fn i2_dim(&self) -> usize {
        self.i2_blocks.values().map(|e| e.dim()).sum()
    }

    pub fn reduced_coords(&self) -> usize {
        self.layout.free.len()
    }

    pub fn monomial_count(&self) -> usize {
        self.layout.monomials.len()
    }

    /// Whether `q` agrees with an element of `I₂` on the linear span of the variety.
    pub fn contains(&self, q: &Quadric) -> bool {
        let p = self.layout.reduce_quadric(q);
        self.layout.split(&p).iter().all(|(w, v)| {
            self.i2_blocks.get(w).is_some_and(|e| e.contains(v))
        })
    }

    /// `q` with the linear equations substituted away.
    pub fn reduce(&self, q: &Quadric) -> Quadric {
        self.layout.to_quadric(&self.layout.reduce_quadric(q))
    }
}

fn to_mod_p_vec(values: &[Rational]) -> Vec<u64> {
    values.iter().map(|c| linalg::to_mod_p(c).expect("integral sample")).collect()
}

/// Exact kernel of the evaluation rows, using as many rows as the `𝔽_p`
/// profile says are needed; `rows(i)` produces the `i`th row.
fn block_kernel(
    ncols: usize,
    count: usize,
    rows_mod_p: &[Vec<u64>],
    rows: impl Fn(usize) -> Vec<Rational>,
) -> Result<Vec<Vec<Rational>>> {
    let mut profile = ModPEchelon::new();
    let mut half_rank = 0;
    for (i, r) in rows_mod_p.iter().enumerate() {
        if i == count / 2 {
            half_rank = profile.rank();
        }
        if profile.rank() < ncols {
            profile.insert(r.clone());
        }
    }
    if count / 2 >= rows_mod_p.len() {
        half_rank = profile.rank();
    }
    if half_rank != profile.rank() {
        return Err(Error::Exhausted(format!(
            "rank did not stabilize ({half_rank} on half the samples, {} on all)",
            profile.rank()
        )));
    }
    let target = profile.rank();
    let mut exact = Echelon::new(ncols);
    for i in 0..count {
        if exact.dim() == target {
            break;
        }
        exact.insert(rows(i));
    }
    let kernel = exact.nullspace();
    for v in &kernel {
        let vp = to_mod_p_vec(v);
        for r in rows_mod_p {
            let s = r.iter().zip(&vp).fold(0u64, |acc, (a, b)| {
                (acc + linalg::mod_mul(*a, *b)) % linalg::PRIME
            });
            if s != 0 {
                return Err(Error::Exhausted("kernel vector fails on a sample".into()));
            }
        }
    }
    Ok(kernel)
}

/// Linear forms and quadrics vanishing on `points` (and checked on `holdout`).
///
/// The point set must be torus-stable up to sampling, as it is for the
/// varieties above, so that kernels may be computed one weight block at a time.
pub fn degree_parts(points: &[MultiVector], holdout: &[MultiVector]) -> Result<DegreeParts> {
    let first = points.first().ok_or_else(|| Error::Precondition("no sample points".into()))?;
    let (dim, grade) = (first.dim(), first.grade());
    let coords = IndexSet::subsets(dim, grade);
    let values: Vec<Vec<Rational>> = points.par_iter().map(|w| w.to_dense(&coords)).collect();
    let values_p: Vec<Vec<u64>> = values.iter().map(|v| to_mod_p_vec(v)).collect();
    let count = points.len();

    let mut coord_blocks: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    for (i, s) in coords.iter().enumerate() {
        coord_blocks.entry(coordinate_weight(dim, *s)).or_default().push(i);
    }
    let mut linear = Vec::new();
    for cols in coord_blocks.values() {
        let rows_p: Vec<Vec<u64>> = values_p.iter().map(|v| cols.iter().map(|&c| v[c]).collect()).collect();
        let kernel = block_kernel(cols.len(), count, &rows_p, |i| cols.iter().map(|&c| values[i][c].clone()).collect())?;
        for v in kernel {
            let mut l = LinearForm::zero(dim, grade);
            for (c, x) in cols.iter().zip(v) {
                l.add(coords[*c], x);
            }
            linear.push(l);
        }
    }
    let needed = 3 * {
        let m = coords.len() - linear.len();
        m * (m + 1) / 2
    };
    if count < needed {
        return Err(Error::Precondition(format!(
            "{count} samples, need at least {needed} (three per degree-2 monomial)"
        )));
    }

    let layout = Layout::new(dim, coords, &linear);
    let free_values: Vec<Vec<Rational>> = values.iter().map(|v| layout.free.iter().map(|&i| v[i].clone()).collect()).collect();
    let free_p: Vec<Vec<u64>> = free_values.iter().map(|v| to_mod_p_vec(v)).collect();
    let block_list: Vec<(&Weight, &Vec<usize>)> = layout.blocks.iter().collect();
    let kernels: Vec<Result<(Weight, Echelon)>> = block_list
        .par_iter()
        .map(|(w, monos)| {
            let rows_p: Vec<Vec<u64>> = free_p
                .iter()
                .map(|v| {
                    monos
                        .iter()
                        .map(|&m| {
                            let (f, g) = layout.monomials[m];
                            linalg::mod_mul(v[f], v[g])
                        })
                        .collect()
                })
                .collect();
            let kernel = block_kernel(monos.len(), count, &rows_p, |i| {
                monos
                    .iter()
                    .map(|&m| {
                        let (f, g) = layout.monomials[m];
                        &free_values[i][f] * &free_values[i][g]
                    })
                    .collect()
            })?;
            let mut e = Echelon::new(monos.len());
            for v in kernel {
                e.insert(v);
            }
            Ok(((*w).clone(), e))
        })
        .collect();
    let mut i2_blocks = BTreeMap::new();
    for k in kernels {
        let (w, e) = k?;
        if e.dim() > 0 {
            i2_blocks.insert(w, e);
        }
    }
    let i2: Vec<WeightSpace> = i2_blocks
        .iter()
        .map(|(w, e)| WeightSpace {
            weight: w.clone(),
            basis: e.rows().iter().map(|v| layout.to_quadric(&layout.block_poly(w, v))).collect(),
        })
        .collect();

    for h in holdout {
        for l in &linear {
            if !l.eval(h).is_zero() {
                return Err(Error::Exhausted("a linear form fails on a holdout point".into()));
            }
        }
        let free = layout.free_values(h);
        for (w, e) in &i2_blocks {
            for v in e.rows() {
                let s: Rational = layout.blocks[w]
                    .iter()
                    .zip(v)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&m, c)| {
                        let (f, g) = layout.monomials[m];
                        c * &free[f] * &free[g]
                    })
                    .sum();
                if !s.is_zero() {
                    return Err(Error::Exhausted("a quadric fails on a holdout point".into()));
                }
            }
        }
    }
    Ok(DegreeParts {
        linear,
        i2,
        samples: count,
        layout,
        i2_blocks,
    })
}

/// Root element of `𝔰𝔬(V)` acting on functions by `(X·f)(ω) = -f(X·ω)`.
#[derive(Clone, Debug)]
struct LieOp {
    /// Weight added to a function by the action.
    shift: Weight,
    /// `X·x_f` in free coordinates, for each free coordinate `f`.
    action: Vec<BTreeMap<usize, Rational>>,
}

impl LieOp {
    fn act(&self, layout: &Layout, p: &Poly) -> Poly {
        let mut out = Poly::new();
        for (m, c) in p {
            let (f, g) = layout.monomials[*m];
            for (h, d) in &self.action[f] {
                poly_add(&mut out, layout.mono(*h, g), c * d);
            }
            for (h, d) in &self.action[g] {
                poly_add(&mut out, layout.mono(f, *h), c * d);
            }
        }
        out
    }
}

fn root_operators(layout: &Layout) -> Vec<LieOp> {
    let space = QuadraticSpace::standard(layout.dim);
    let labels = space.labels().to_vec();
    let p = layout.dim / 2;
    let index: HashMap<IndexSet, usize> = layout.coords.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut ops = Vec::new();
    let basis = so_basis(&space);
    let mut k = 0;
    for a in 0..layout.dim {
        for b in a + 1..layout.dim {
            let x = &basis[k];
            k += 1;
            if labels[a].0 != 0 && labels[a].partner() == labels[b] {
                continue;
            }
            let root = add_weights(&label_weight(labels[a], p), &label_weight(labels[b], p));
            // X·x_J = -Σ_I D_{J,I} x_I where D is the derivation matrix.
            let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); layout.coords.len()];
            for (i, set) in layout.coords.iter().enumerate() {
                let image = derivation(&x.matrix, &MultiVector::blade(layout.dim, &set.positions().collect::<Vec<_>>()));
                for (j, d) in image.terms() {
                    poly_add(&mut rows[index[&j]], i, -d.clone());
                }
            }
            let action = layout.free.iter().map(|&j| layout.reduce_linear(&rows[j])).collect();
            ops.push(LieOp {
                shift: root.iter().map(|x| -x).collect(),
                action,
            });
        }
    }
    ops
}

/// `I₂` together with the root operators of `𝔰𝔬(V)` acting on it.
#[derive(Clone, Debug)]
pub struct Lab {
    pub parts: DegreeParts,
    ops: Vec<LieOp>,
}

/// Span of quadrics, one echelon basis per weight block.
#[derive(Clone, Debug, Default)]
pub struct Closure {
    blocks: BTreeMap<Weight, Echelon>,
}

impl Closure {
    pub fn dim(&self) -> usize {
        self.blocks.values().map(|e| e.dim()).sum()
    }

    fn block_dim(&self, w: &Weight) -> usize {
        self.blocks.get(w).map_or(0, |e| e.dim())
    }
}

impl Lab {
    pub fn new(parts: DegreeParts) -> Self {
        let ops = root_operators(&parts.layout);
        Lab { parts, ops }
    }

    fn layout(&self) -> &Layout {
        &self.parts.layout
    }

    pub fn raising_count(&self) -> usize {
        self.ops.iter().filter(|o| is_positive(&o.shift)).count()
    }

    /// Raising images of `q`, all of which vanish for a highest weight vector.
    pub fn raise(&self, q: &Quadric) -> Vec<Quadric> {
        let p = self.layout().reduce_quadric(q);
        self.ops
            .iter()
            .filter(|o| is_positive(&o.shift))
            .map(|o| self.layout().to_quadric(&o.act(self.layout(), &p)))
            .collect()
    }

    /// Elements of each weight space of `I₂` annihilated by every raising operator.
    pub fn highest_weight_vectors(&self) -> Vec<WeightSpace> {
        self.hwv_blocks()
            .into_iter()
            .map(|(w, vs)| WeightSpace {
                basis: vs.iter().map(|v| self.layout().to_quadric(&self.layout().block_poly(&w, v))).collect(),
                weight: w,
            })
            .collect()
    }

    fn hwv_blocks(&self) -> Vec<(Weight, Vec<Vec<Rational>>)> {
        let layout = self.layout();
        let raising: Vec<&LieOp> = self.ops.iter().filter(|o| is_positive(&o.shift)).collect();
        let blocks: Vec<(&Weight, &Echelon)> = self.parts.i2_blocks.iter().collect();
        blocks
            .par_iter()
            .map(|(w, e)| {
                let basis = e.rows();
                // Columns: images of each basis vector under all raising operators.
                let mut rows: BTreeMap<(usize, usize), Vec<Rational>> = BTreeMap::new();
                for (col, v) in basis.iter().enumerate() {
                    let p = layout.block_poly(w, v);
                    for (o, op) in raising.iter().enumerate() {
                        for (m, c) in op.act(layout, &p) {
                            rows.entry((o, m)).or_insert_with(|| linalg::zeros(basis.len()))[col] = c;
                        }
                    }
                }
                let rows: Vec<Vec<Rational>> = rows.into_values().collect();
                let kernel = linalg::nullspace(&rows, basis.len());
                let vectors = kernel
                    .iter()
                    .map(|k| {
                        let mut v = linalg::zeros(basis[0].len());
                        for (c, b) in k.iter().zip(basis) {
                            linalg::axpy(&mut v, c, b);
                        }
                        v
                    })
                    .collect();
                ((*w).clone(), vectors)
            })
            .filter(|(_, v): &(Weight, Vec<Vec<Rational>>)| !v.is_empty())
            .collect()
    }

    /// Smallest lowering-stable subspace containing `seeds` and `closure`.
    pub fn lowering_closure(&self, seeds: &[Quadric], closure: &mut Closure) {
        let layout = self.layout();
        let mut queue: Vec<Poly> = seeds.iter().map(|q| layout.reduce_quadric(q)).collect();
        while let Some(p) = queue.pop() {
            let mut grew = false;
            for (w, v) in layout.split(&p) {
                let n = v.len();
                grew |= closure.blocks.entry(w).or_insert_with(|| Echelon::new(n)).insert(v);
            }
            if grew {
                let images: Vec<Poly> = self
                    .ops
                    .par_iter()
                    .filter(|o| !is_positive(&o.shift))
                    .map(|o| o.act(layout, &p))
                    .filter(|img| !img.is_empty())
                    .collect();
                queue.extend(images);
            }
        }
    }

    /// Elements of `I₂_w` of minimal support: the rows of its reduced echelon
    /// form under the natural, reversed and `orderings` random column orders.
    fn circuits<R: Rng + ?Sized>(&self, w: &Weight, orderings: usize, rng: &mut R) -> Vec<Vec<Rational>> {
        let basis = self.parts.i2_blocks[w].rows();
        let n = self.layout().blocks[w].len();
        let mut orders: Vec<Vec<usize>> = vec![(0..n).collect(), (0..n).rev().collect()];
        for _ in 0..orderings {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            orders.push(order);
        }
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for order in orders {
            let mut e = Echelon::new(n);
            for v in basis {
                e.insert(order.iter().map(|&c| v[c].clone()).collect());
            }
            for row in e.into_sorted().0 {
                let mut v = linalg::zeros(n);
                for (k, &c) in order.iter().enumerate() {
                    v[c] = row[k].clone();
                }
                let v = linalg::primitive(&v);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Element of `I₂_w` outside `closure` of minimal rank among the
    /// highest weight vectors and the minimal-support elements; ties go to
    /// fewer monomials, then to the first found.
    fn pick_generator<R: Rng + ?Sized>(
        &self,
        w: &Weight,
        hwv: &[Vec<Rational>],
        closure: &Closure,
        rng: &mut R,
    ) -> Option<(Poly, usize)> {
        let layout = self.layout();
        let covered = closure.blocks.get(w);
        let mut candidates: Vec<Vec<Rational>> = hwv.to_vec();
        candidates.extend(self.circuits(w, CIRCUIT_ORDERINGS, rng));
        candidates
            .into_iter()
            .filter(|v| !linalg::is_zero_vec(v) && !covered.is_some_and(|e| e.contains(v)))
            .map(|v| {
                let p = layout.block_poly(w, &v);
                let r = layout.poly_rank(&p);
                (p, r)
            })
            .min_by_key(|(p, r)| (*r, p.len()))
    }
}

/// Generator chosen by the pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricRecord {
    pub dim: usize,
    pub grade: usize,
    pub terms: Vec<MonomialRecord>,
    pub rank: usize,
    pub weight: TorusWeight,
}

/// `coeff · x_left · x_right` with index tuples as hyperbolic labels in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialRecord {
    pub left: Vec<i32>,
    pub right: Vec<i32>,
    pub coeff: String,
}

impl QuadricRecord {
    pub fn new(q: &Quadric) -> Self {
        let labels = hyperbolic_labels(q.dim);
        let names = |s: IndexSet| s.positions().map(|p| labels[p].0).collect();
        QuadricRecord {
            dim: q.dim,
            grade: q.grade,
            terms: q
                .terms
                .iter()
                .map(|((a, b), c)| MonomialRecord {
                    left: names(*a),
                    right: names(*b),
                    coeff: c.to_string(),
                })
                .collect(),
            rank: quadric_rank(q),
            weight: torus_weight(q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ListedCheck {
    pub index: usize,
    pub quadric: QuadricRecord,
    pub in_i2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub variety: Variety,
    pub seed: u64,
    pub samples: usize,
    pub holdout: usize,
    pub n_coords: usize,
    pub linear_dim: usize,
    pub reduced_coords: usize,
    pub i2_dim: usize,
    pub weight_spaces: usize,
    pub hwv_weights: usize,
    pub generators: Vec<QuadricRecord>,
    pub closure_dim: usize,
    pub max_generator_rank: usize,
    pub listed: Vec<ListedCheck>,
    pub certified: bool,
}

/// The quadrics displayed for each variety, index tuples in written order.
pub fn listed_quadrics(variety: Variety) -> Vec<Quadric> {
    let n = variety.space().dim();
    let l = |terms: &[(i64, &[i32])]| LinearForm::written(n, terms);
    let prod = |a: &LinearForm, b: &LinearForm| Quadric::product(a, b);
    match variety {
        Variety::Iso37 => {
            let q1 = prod(&l(&[(1, &[0, 1, 2])]), &l(&[(1, &[0, 1, 2])]))
                .plus(&prod(&l(&[(1, &[1, 2, 3])]), &l(&[(1, &[1, 2, -3])])), 2);
            let q2 = prod(&l(&[(1, &[0, 1, 2])]), &l(&[(1, &[1, 2, -2]), (1, &[1, 3, -3])]))
                .plus(&prod(&l(&[(1, &[1, 2, 3])]), &l(&[(1, &[0, 1, -3])])), 2);
            let q3 = prod(&l(&[(1, &[0, 1, 3])]), &l(&[(1, &[0, 1, -3])]))
                .plus(&prod(&l(&[(1, &[0, 1, 2])]), &l(&[(1, &[0, 1, -2])])), 1);
            let q4 = prod(&l(&[(1, &[1, 2, 3])]), &l(&[(1, &[0, 1, -1]), (1, &[0, 2, -2]), (-1, &[0, 3, -3])]))
                .plus(&prod(&l(&[(1, &[0, 1, 2])]), &l(&[(1, &[2, 3, -2]), (1, &[1, 3, -1])])), 1);
            let s = l(&[(1, &[0, 2, -2]), (1, &[0, 3, -3])]);
            let q5 = prod(&l(&[(1, &[0, 1, -1])]), &l(&[(1, &[0, 1, -1])]))
                .plus(&prod(&s, &s), -1)
                .plus(
                    &prod(&l(&[(1, &[1, 3, -3]), (1, &[1, 2, -2])]), &l(&[(1, &[3, -1, -3]), (1, &[2, -1, -2])])),
                    2,
                );
            vec![q1, q2, q3, q4, q5]
        }
        Variety::Iso48Component => {
            let q1 = prod(&l(&[(1, &[1, 2, 3, -3])]), &l(&[(1, &[1, 2, 3, -3])]))
                .plus(&prod(&l(&[(1, &[1, 2, 3, 4])]), &l(&[(1, &[1, 2, -3, -4])])), -1);
            let q2 = prod(&l(&[(2, &[1, 2, 3, -3])]), &l(&[(1, &[1, 3, 4, -1])])).plus(
                &prod(
                    &l(&[(1, &[1, 2, 3, 4])]),
                    &l(&[(1, &[1, 2, -1, -2]), (-1, &[1, 3, -1, -3]), (-1, &[1, 4, -1, -4])]),
                ),
                -1,
            );
            let s = l(&[(1, &[1, 4, -1, -4]), (1, &[2, 4, -2, -4]), (-1, &[3, 4, -3, -4])]);
            let q3 = prod(&s, &s).plus(&prod(&l(&[(1, &[3, 4, -1, -2])]), &l(&[(1, &[1, 2, -3, -4])])), -4);
            vec![q1, q2, q3]
        }
    }
}

/// Samples, computes `I₂`, and regenerates it from minimal-rank highest weight vectors.
pub fn run_rank4_pipeline(variety: Variety, seed: u64) -> Result<(Lab, PipelineReport)> {
    let mut rng = igcp::trial_rng(seed, 0);
    let n_coords = IndexSet::subsets(variety.space().dim(), variety.grade()).len();
    let holdout = sample_variety_points(variety, HOLDOUT, &mut igcp::trial_rng(seed, 1));
    // A first batch fixes the linear part and with it the number of monomials.
    let mut points = sample_variety_points(variety, SAMPLE_FACTOR * n_coords, &mut rng);
    let linear = degree_parts_linear(&points)?;
    let m = n_coords - linear;
    let mut target = SAMPLE_FACTOR * m * (m + 1) / 2;
    let mut doublings = 0;
    let parts = loop {
        if points.len() < target {
            points.extend(sample_variety_points(variety, target - points.len(), &mut rng));
        }
        match degree_parts(&points, &holdout) {
            Ok(parts) => break parts,
            Err(Error::Exhausted(_)) if doublings < MAX_DOUBLINGS => {
                doublings += 1;
                target *= 2;
            }
            Err(e) => return Err(e),
        }
    };
    let lab = Lab::new(parts);
    let hwv = lab.hwv_blocks();
    let mut closure = Closure::default();
    let mut generators = Vec::new();
    let mut search_rng = igcp::trial_rng(seed, 2);
    loop {
        if closure.dim() == lab.parts.i2_dim() {
            break;
        }
        if generators.len() == MAX_GENERATORS {
            let remaining: Vec<String> = lab
                .parts
                .i2_blocks
                .iter()
                .filter(|(w, e)| closure.block_dim(w) < e.dim())
                .map(|(w, _)| format!("{w:?}"))
                .collect();
            return Err(Error::Exhausted(format!(
                "closure stalled at {} of {}; uncovered weights {}",
                closure.dim(),
                lab.parts.i2_dim(),
                remaining.join(" ")
            )));
        }
        // The highest weight space not yet generated.
        let Some(w) = lab
            .parts
            .i2_blocks
            .iter()
            .rev()
            .find(|(w, e)| closure.block_dim(w) < e.dim())
            .map(|(w, _)| w.clone())
        else {
            break;
        };
        let hw = hwv.iter().find(|(x, _)| *x == w).map_or(&[][..], |(_, vs)| &vs[..]);
        let (poly, _) = lab
            .pick_generator(&w, hw, &closure, &mut search_rng)
            .expect("an uncovered weight space has an uncovered element");
        let q = lab.layout().to_quadric(&poly);
        lab.lowering_closure(std::slice::from_ref(&q), &mut closure);
        generators.push(QuadricRecord::new(&q));
    }
    let listed: Vec<ListedCheck> = listed_quadrics(variety)
        .iter()
        .enumerate()
        .map(|(index, q)| ListedCheck {
            index: index + 1,
            quadric: QuadricRecord::new(q),
            in_i2: lab.parts.contains(q),
        })
        .collect();
    let max_rank = generators.iter().map(|g| g.rank).max().unwrap_or(0);
    let certified = max_rank <= 4 && listed.iter().all(|c| c.in_i2) && closure.dim() == lab.parts.i2_dim();
    let report = PipelineReport {
        variety,
        seed,
        samples: lab.parts.samples,
        holdout: HOLDOUT,
        n_coords,
        linear_dim: lab.parts.linear.len(),
        reduced_coords: lab.parts.reduced_coords(),
        i2_dim: lab.parts.i2_dim(),
        weight_spaces: lab.parts.i2.len(),
        hwv_weights: hwv.len(),
        generators,
        closure_dim: closure.dim(),
        max_generator_rank: max_rank,
        listed,
        certified,
    };
    Ok((lab, report))
}

fn degree_parts_linear(points: &[MultiVector]) -> Result<usize> {
    let (dim, grade) = (points[0].dim(), points[0].grade());
    let coords = IndexSet::subsets(dim, grade);
    let values: Vec<Vec<Rational>> = points.iter().map(|w| w.to_dense(&coords)).collect();
    let mut e = Echelon::new(coords.len());
    let mut p = ModPEchelon::new();
    for v in &values {
        if p.rank() == coords.len() {
            break;
        }
        p.insert(to_mod_p_vec(v));
    }
    let target = p.rank();
    for v in values {
        if e.dim() == target {
            break;
        }
        e.insert(v);
    }
    Ok(coords.len() - e.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones;
    use crate::quadratic::Subspace;
    use std::sync::OnceLock;

    fn x(dim: usize, labels: &[i32]) -> LinearForm {
        LinearForm::written(dim, &[(1, labels)])
    }

    fn lab(variety: Variety) -> &'static (Lab, PipelineReport) {
        static LABS: OnceLock<[(Lab, PipelineReport); 2]> = OnceLock::new();
        let labs = LABS.get_or_init(|| {
            [
                run_rank4_pipeline(Variety::Iso37, 5).unwrap(),
                run_rank4_pipeline(Variety::Iso48Component, 5).unwrap(),
            ]
        });
        &labs[variety as usize]
    }

    #[test]
    fn torus_weights() {
        let sq = Quadric::product(&x(7, &[1, 2, 3]), &x(7, &[1, 2, 3]));
        assert_eq!(torus_weight(&sq), TorusWeight::Weight(vec![2, 2, 2]));
        let q = Quadric::product(&x(7, &[0, 1, 2]), &x(7, &[0, 1, -2]));
        assert_eq!(torus_weight(&q), TorusWeight::Weight(vec![2, 0, 0]));
        assert_eq!(torus_weight(&sq.plus(&q, 1)), TorusWeight::mixed());
        // The Klein quadric is SO(4)-invariant.
        let klein = Quadric::from_relation(&cones::plucker_relations(2, 4)[0]);
        assert_eq!(torus_weight(&klein), TorusWeight::Weight(vec![0, 0]));
        assert_eq!(serde_json::to_string(&TorusWeight::mixed()).unwrap(), "\"mixed\"");
    }

    #[test]
    fn quadric_ranks() {
        let klein = Quadric::from_relation(&cones::plucker_relations(2, 4)[0]);
        assert_eq!(quadric_rank(&klein), 6);
        let q = Quadric::product(&x(7, &[0, 1, 2]), &x(7, &[0, 1, 2]))
            .plus(&Quadric::product(&x(7, &[1, 2, 3]), &x(7, &[1, 2, -3])), 2);
        assert_eq!(quadric_rank(&q), 3);
        let q = Quadric::product(&x(7, &[0, 1, 3]), &x(7, &[0, 1, -3]))
            .plus(&Quadric::product(&x(7, &[0, 1, 2]), &x(7, &[0, 1, -2])), 1);
        assert_eq!(quadric_rank(&q), 4);
        assert_eq!(quadric_rank(&Quadric::zero(7, 3)), 0);
    }

    #[test]
    fn sampled_points_lie_on_the_variety() {
        let mut rng = igcp::trial_rng(9, 0);
        for variety in [Variety::Iso37, Variety::Iso48Component] {
            let space = variety.space();
            for w in sample_variety_points(variety, 20, &mut rng) {
                assert!(cones::in_isotropic_cone(&space, &w));
                let rels = cones::plucker_relations(w.grade(), w.dim());
                assert!(rels.iter().all(|r| r.eval(&w).is_zero()));
            }
        }
        for w in sample_variety_points(Variety::Iso48Component, 20, &mut rng) {
            let l = cones::extract_subspace(&w).unwrap();
            let positive = Subspace::from_vectors(8, &(0..4).map(|i| linalg::unit(8, 2 * i)).collect::<Vec<_>>());
            assert_eq!(l.intersection(&positive).dim() % 2, 0);
        }
        let a = sample_variety_points(Variety::Iso37, 5, &mut igcp::trial_rng(3, 0));
        let b = sample_variety_points(Variety::Iso37, 5, &mut igcp::trial_rng(3, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn degree_parts_shapes() {
        let (lab37, r37) = lab(Variety::Iso37);
        assert_eq!(r37.linear_dim, 0);
        assert_eq!(r37.i2_dim, 336);
        let total: usize = lab37.parts.i2.iter().map(|s| s.basis.len()).sum();
        assert_eq!(total, lab37.parts.i2_dim());
        for space in &lab37.parts.i2 {
            for q in &space.basis {
                assert_eq!(torus_weight(q), TorusWeight::Weight(space.weight.clone()));
            }
        }
        let (_, r48) = lab(Variety::Iso48Component);
        assert!(r48.linear_dim > 0);
        assert_eq!(r48.reduced_coords, 35);
        assert_eq!(r48.i2_dim, 336);
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let pts = sample_variety_points(Variety::Iso37, 50, &mut igcp::trial_rng(1, 0));
        assert!(matches!(degree_parts(&pts, &[]), Err(Error::Precondition(_))));
        assert!(degree_parts(&[], &[]).is_err());
    }

    #[test]
    fn listed_quadrics_have_small_rank_and_lie_in_i2() {
        for variety in [Variety::Iso37, Variety::Iso48Component] {
            let (lab, _) = lab(variety);
            for q in listed_quadrics(variety) {
                assert!(quadric_rank(&q) <= 4);
                assert!(lab.parts.contains(&q));
            }
        }
        let mut rng = igcp::trial_rng(17, 0);
        for w in sample_variety_points(Variety::Iso37, 1000, &mut rng) {
            assert!(listed_quadrics(Variety::Iso37).iter().all(|q| q.eval(&w).is_zero()));
        }
    }

    #[test]
    fn highest_weight_vectors_are_annihilated() {
        let (lab, _) = lab(Variety::Iso48Component);
        let first = &listed_quadrics(Variety::Iso48Component)[0];
        assert!(lab.raise(first).iter().all(|q| lab.parts.reduce(q).is_zero()));
        for space in lab.highest_weight_vectors() {
            for q in &space.basis {
                assert!(lab.raise(q).iter().all(|r| r.is_zero()));
            }
        }
    }

    #[test]
    fn root_operators_shift_weights() {
        let (lab, _) = lab(Variety::Iso37);
        let q = &lab.parts.i2[lab.parts.i2.len() / 2].basis[0];
        let w = torus_weight(q).weight().unwrap().to_vec();
        let layout = lab.layout();
        let p = layout.reduce_quadric(q);
        for op in &lab.ops {
            let image = layout.to_quadric(&op.act(layout, &p));
            if !image.is_zero() {
                assert_eq!(torus_weight(&image), TorusWeight::Weight(add_weights(&w, &op.shift)));
                assert!(lab.parts.contains(&image));
            }
        }
    }

    #[test]
    fn lowering_closures() {
        let (lab, report) = lab(Variety::Iso37);
        let mut empty = Closure::default();
        lab.lowering_closure(&[], &mut empty);
        assert_eq!(empty.dim(), 0);
        let listed = listed_quadrics(Variety::Iso37);
        let mut one = Closure::default();
        lab.lowering_closure(&listed[..1], &mut one);
        let mut all = Closure::default();
        lab.lowering_closure(&listed, &mut all);
        assert!(one.dim() > 0 && one.dim() <= all.dim());
        assert_eq!(all.dim(), report.i2_dim);
    }

    #[test]
    fn pipeline_certifies_both_varieties() {
        for variety in [Variety::Iso37, Variety::Iso48Component] {
            let (_, report) = lab(variety);
            assert!(report.certified);
            assert!(report.generators.iter().all(|g| g.rank <= 4));
            assert_eq!(report.closure_dim, report.i2_dim);
            assert!(report.listed.iter().all(|c| c.in_i2));
        }
    }
}
