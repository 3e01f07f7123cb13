//! Nondegenerate symmetric bilinear forms, hyperbolic bases and isotropic
//! subspaces.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exterior::{hyperbolic_labels, plain_labels, Label, MAX_DIM};
use crate::linalg::{self, rat, ratio, Echelon, Rational};

/// Box for random integer coordinates.
pub const SAMPLE_BOX: i64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// `⟨e_i, e_{-i}⟩ = 1`, `⟨e_0, e_0⟩ = 2c₀`, all other pairings zero.
    Hyperbolic,
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSpace {
    gram: Vec<Vec<Rational>>,
    labels: Vec<Label>,
    kind: BasisKind,
    c0: Option<Rational>,
    /// For hyperbolic spaces, `partner[i]` is the position paired with `i`.
    partner: Vec<usize>,
}

impl QuadraticSpace {
    /// Standard hyperbolic space of dimension `n`, with `c₀ = 1/2` when `n` is odd.
    pub fn standard(n: usize) -> Self {
        let c0 = (n % 2 == 1).then(|| ratio(1, 2));
        Self::hyperbolic(hyperbolic_labels(n), c0).expect("standard labels are valid")
    }

    /// The 7-dimensional space whose Gram matrix is `diag(-½) ⊕ ( 0 I₃ / I₃ 0 )`,
    /// so `⟨e_0, e_0⟩ = -½` and `⟨e_i, e_{-i}⟩ = 1`. This is the normalization
    /// under which `ω₇` has a 14-dimensional orthogonal stabilizer.
    pub fn j7() -> Self {
        Self::hyperbolic(hyperbolic_labels(7), Some(ratio(-1, 4))).expect("valid")
    }

    /// The 8-dimensional split space `( 0 I₄ / I₄ 0 )` in the hyperbolic ordering.
    pub fn j8() -> Self {
        Self::standard(8)
    }

    /// Hyperbolic space on an arbitrary label list (pairs `±i` plus optionally `0`).
    pub fn hyperbolic(labels: Vec<Label>, c0: Option<Rational>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Precondition(format!("dimension {n} out of range")));
        }
        let pos = |l: Label| labels.iter().position(|&m| m == l);
        let mut partner = vec![usize::MAX; n];
        let mut gram = vec![linalg::zeros(n); n];
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Precondition(format!("repeated label {l}")));
            }
            if l.0 == 0 {
                let c = c0.clone().ok_or_else(|| {
                    Error::Precondition("label 0 requires c0".into())
                })?;
                if c.is_zero() {
                    return Err(Error::Degenerate);
                }
                gram[i][i] = &c + &c;
                partner[i] = i;
            } else {
                let j = pos(l.partner())
                    .ok_or_else(|| Error::Precondition(format!("label {l} has no partner")))?;
                gram[i][j] = Rational::one();
                partner[i] = j;
            }
        }
        let has_zero = labels.contains(&Label(0));
        Ok(QuadraticSpace {
            gram,
            labels,
            kind: BasisKind::Hyperbolic,
            c0: if has_zero { c0 } else { None },
            partner,
        })
    }

    /// A space given by an arbitrary symmetric nondegenerate Gram matrix.
    pub fn from_gram(gram: Vec<Vec<Rational>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Precondition(format!("dimension {n} out of range")));
        }
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("Gram matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if linalg::determinant(&gram).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(QuadraticSpace {
            gram,
            labels: plain_labels(n),
            kind: BasisKind::Plain,
            c0: None,
            partner: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// `p = ⌊n/2⌋`.
    pub fn witt(&self) -> usize {
        self.dim() / 2
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kind == BasisKind::Hyperbolic
    }

    pub fn c0(&self) -> Option<&Rational> {
        self.c0.as_ref()
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Position paired with `pos` in a hyperbolic basis (itself for label 0).
    pub fn partner(&self, pos: usize) -> usize {
        self.partner[pos]
    }

    pub fn zero_position(&self) -> Option<usize> {
        self.position(Label(0)).filter(|_| self.is_hyperbolic())
    }

    /// Positions `(e_i, e_{-i})` of the hyperbolic pairs in label order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.dim())
            .filter(|&i| self.labels[i].0 > 0)
            .map(|i| (i, self.partner[i]))
            .collect()
    }

    /// The last hyperbolic pair `(e_p, e_{-p})`.
    pub fn last_pair(&self) -> Result<(usize, usize)> {
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic);
        }
        self.pairs().last().copied().ok_or(Error::Precondition(
            "space has no hyperbolic pair".into(),
        ))
    }

    fn check_len(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `vᵀ G w`.
    pub fn bilinear(&self, v: &[Rational], w: &[Rational]) -> Rational {
        debug_assert_eq!(v.len(), self.dim());
        debug_assert_eq!(w.len(), self.dim());
        match self.kind {
            BasisKind::Hyperbolic => {
                let mut acc = Rational::zero();
                for (i, x) in v.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let y = &w[self.partner[i]];
                    if !y.is_zero() {
                        acc += if self.labels[i].0 == 0 {
                            x * y * &self.gram[i][i]
                        } else {
                            x * y
                        };
                    }
                }
                acc
            }
            BasisKind::Plain => linalg::dot(v, &linalg::mat_vec(&self.gram, w)),
        }
    }

    pub fn norm(&self, v: &[Rational]) -> Rational {
        self.bilinear(v, v)
    }

    /// The covector `⟨v, ·⟩`, i.e. `G v`.
    pub fn lower(&self, v: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.gram, v)
    }

    pub fn is_isotropic(&self, v: &[Rational]) -> bool {
        self.norm(v).is_zero()
    }

    pub fn is_isotropic_subspace(&self, l: &Subspace) -> bool {
        let b = l.basis();
        (0..b.len()).all(|i| (i..b.len()).all(|j| self.bilinear(&b[i], &b[j]).is_zero()))
    }

    pub fn orthogonal_complement(&self, l: &Subspace) -> Subspace {
        let rows: Vec<Vec<Rational>> = l.basis().iter().map(|v| self.lower(v)).collect();
        Subspace::from_vectors(self.dim(), &linalg::nullspace(&rows, self.dim()))
    }

    /// Some `w` with `⟨e_j, w⟩ = δ_{ij}` against `targets`, orthogonal to `orth`,
    /// then corrected to be isotropic along `targets[i]`.
    fn isotropic_partner(
        &self,
        targets: &[Vec<Rational>],
        i: usize,
        orth: &[Vec<Rational>],
    ) -> Result<Vec<Rational>> {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (j, t) in targets.iter().enumerate() {
            rows.push(self.lower(t));
            rhs.push(if i == j { Rational::one() } else { Rational::zero() });
        }
        for o in orth {
            rows.push(self.lower(o));
            rhs.push(Rational::zero());
        }
        let w = linalg::solve(&rows, &rhs).ok_or(Error::LinearlyDependent)?;
        let half = self.norm(&w) / rat(2);
        let mut w = w;
        linalg::axpy(&mut w, &-half, &targets[i]);
        Ok(w)
    }

    /// Extends an isotropic basis `e_1..e_k` to a hyperbolic tuple
    /// `(e_1, e_{-1}, …, e_k, e_{-k})`.
    pub fn complete_hyperbolic(&self, basis: &[Vec<Rational>]) -> Result<HyperbolicTuple> {
        self.complete_hyperbolic_within(basis, &[])
    }

    /// As [`complete_hyperbolic`](Self::complete_hyperbolic) with all partners
    /// orthogonal to `orth`.
    pub fn complete_hyperbolic_within(
        &self,
        basis: &[Vec<Rational>],
        orth: &[Vec<Rational>],
    ) -> Result<HyperbolicTuple> {
        for v in basis.iter().chain(orth) {
            self.check_len(v)?;
        }
        let sub = Subspace::from_vectors(self.dim(), basis);
        if sub.dim() != basis.len() {
            return Err(Error::LinearlyDependent);
        }
        if !self.is_isotropic_subspace(&sub) {
            return Err(Error::NotIsotropicSubspace);
        }
        let mut partners: Vec<Vec<Rational>> = Vec::new();
        for i in 0..basis.len() {
            let mut constraints: Vec<Vec<Rational>> = orth.to_vec();
            constraints.extend(partners.iter().cloned());
            partners.push(self.isotropic_partner(basis, i, &constraints)?);
        }
        let vectors = basis
            .iter()
            .zip(partners)
            .flat_map(|(e, w)| [e.clone(), w])
            .collect();
        let tuple = HyperbolicTuple { vectors };
        tuple.verify(self)?;
        Ok(tuple)
    }

    /// Hyperbolic basis adapted to two maximal isotropic subspaces:
    /// `W1 = span{e_1..e_p}` and `W2 = span{e_1..e_q, e_{-(q+1)}..e_{-p}}`
    /// with `q = dim(W1 ∩ W2)`.
    pub fn common_hyperbolic_basis(&self, w1: &Subspace, w2: &Subspace) -> Result<HyperbolicBasis> {
        let p = self.witt();
        for w in [w1, w2] {
            if !self.is_isotropic_subspace(w) {
                return Err(Error::NotIsotropicSubspace);
            }
            if w.dim() != p {
                return Err(Error::NotMaximalIsotropic {
                    expected: p,
                    found: w.dim(),
                });
            }
        }
        let common = w1.intersection(w2);
        let q = common.dim();
        let a: Vec<Vec<Rational>> = common.basis().to_vec();
        let u1 = complement_basis(&common, w1);
        let u2 = complement_basis(&common, w2);
        let pairing: Vec<Vec<Rational>> = u1
            .iter()
            .map(|x| u2.iter().map(|y| self.bilinear(x, y)).collect())
            .collect();
        let dual: Vec<Vec<Rational>> = if u1.is_empty() {
            Vec::new()
        } else {
            // Columns of u2 · M⁻¹ give ⟨u1_i, u2''_j⟩ = δ_ij.
            let inv = linalg::inverse(&pairing).ok_or(Error::Degenerate)?;
            (0..u2.len())
                .map(|j| {
                    let mut v = linalg::zeros(self.dim());
                    for (k, y) in u2.iter().enumerate() {
                        linalg::axpy(&mut v, &inv[k][j], y);
                    }
                    v
                })
                .collect()
        };
        let mut orth = u1.clone();
        orth.extend(dual.iter().cloned());
        let inner = self.complete_hyperbolic_within(&a, &orth)?;
        let mut vectors = inner.vectors;
        for (x, y) in u1.into_iter().zip(dual) {
            vectors.push(x);
            vectors.push(y);
        }
        if self.dim() % 2 == 1 {
            let span = Subspace::from_vectors(self.dim(), &vectors);
            let rest = self.orthogonal_complement(&span);
            vectors.push(rest.basis()[0].clone());
        }
        let basis = HyperbolicBasis { vectors, q };
        basis.verify(self)?;
        Ok(basis)
    }

    /// Random nonzero isotropic vector `x + λe_p + μe_{-p}` with `x ∈ V′` from the
    /// integer box, `λ ≠ 0` and `μ = -⟨x,x⟩ / 2λ`.
    pub fn random_isotropic_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Rational>> {
        let (ep, emp) = self.last_pair()?;
        let mut x: Vec<Rational> = (0..self.dim())
            .map(|_| rat(rng.gen_range(-SAMPLE_BOX..=SAMPLE_BOX)))
            .collect();
        x[ep] = Rational::zero();
        x[emp] = Rational::zero();
        let lambda = loop {
            let l = rng.gen_range(-SAMPLE_BOX..=SAMPLE_BOX);
            if l != 0 {
                break rat(l);
            }
        };
        Ok(self.complete_isotropic(x, lambda))
    }

    /// `x + λe_p + μe_{-p}` for `x ∈ V′`, with `μ` chosen to make it isotropic.
    pub fn complete_isotropic(&self, mut x: Vec<Rational>, lambda: Rational) -> Vec<Rational> {
        let (ep, emp) = self.last_pair().expect("hyperbolic space with a pair");
        debug_assert!(x[ep].is_zero() && x[emp].is_zero());
        let mu = -self.norm(&x) / (&lambda + &lambda);
        x[ep] = lambda;
        x[emp] = mu;
        x
    }

    /// Verifies maximal Witt index `⌊n/2⌋` by constructing a maximal isotropic subspace.
    pub fn witt_index(&self) -> Result<usize> {
        match self.kind {
            BasisKind::Hyperbolic => Ok(self.witt()),
            BasisKind::Plain => self.hyperbolic_change().map(|_| self.witt()),
        }
    }

    /// Rewrites a plain space in a hyperbolic basis. Returns the hyperbolic space and
    /// the matrix taking old coordinates to new coordinates.
    pub fn to_hyperbolic(&self) -> Result<(QuadraticSpace, Vec<Vec<Rational>>)> {
        if self.is_hyperbolic() {
            let n = self.dim();
            return Ok((self.clone(), (0..n).map(|i| linalg::unit(n, i)).collect()));
        }
        let basis = self.hyperbolic_change()?;
        let n = self.dim();
        let c0 = (n % 2 == 1).then(|| self.norm(&basis[n - 1]) / rat(2));
        let space = QuadraticSpace::hyperbolic(hyperbolic_labels(n), c0)?;
        let bt = linalg::transpose(&basis, n);
        let to_new = linalg::inverse(&bt).ok_or(Error::Degenerate)?;
        Ok((space, to_new))
    }

    /// Hyperbolic basis vectors in label order, constructed greedily.
    fn hyperbolic_change(&self) -> Result<Vec<Vec<Rational>>> {
        let n = self.dim();
        let p = self.witt();
        let mut found: Vec<Vec<Rational>> = Vec::new();
        for _ in 0..p {
            let span = Subspace::from_vectors(n, &found);
            let rest = self.orthogonal_complement(&span);
            let Some(v) = self.find_isotropic_in(rest.basis()) else {
                return Err(Error::WittIndex {
                    expected: p,
                    found: found.len() / 2,
                });
            };
            let pair = self.complete_hyperbolic_within(&[v], &found)?;
            found.extend(pair.vectors);
        }
        if n % 2 == 1 {
            let span = Subspace::from_vectors(n, &found);
            found.push(self.orthogonal_complement(&span).basis()[0].clone());
        }
        Ok(found)
    }

    /// Some isotropic vector in the span of `basis` (a nondegenerate subspace).
    fn find_isotropic_in(&self, basis: &[Vec<Rational>]) -> Option<Vec<Rational>> {
        let diag = self.orthogonal_basis(basis);
        let d: Vec<Rational> = diag.iter().map(|v| self.norm(v)).collect();
        let combine = |coeffs: &[(usize, Rational)]| {
            let mut v = linalg::zeros(self.dim());
            for (i, c) in coeffs {
                linalg::axpy(&mut v, c, &diag[*i]);
            }
            v
        };
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                let r = -&d[j] / &d[i];
                if let Some(s) = rational_sqrt(&r) {
                    return Some(combine(&[(i, s), (j, Rational::one())]));
                }
            }
        }
        // Small search over ternary and quaternary subforms.
        const B: i64 = 12;
        for size in [3usize, 4] {
            if d.len() < size {
                break;
            }
            for combo in subsets_of(d.len(), size) {
                for x in 1..=B {
                    for y in -B..=B {
                        let partial = &d[combo[0]] * rat(x * x) + &d[combo[1]] * rat(y * y);
                        if size == 3 {
                            let r = -partial / &d[combo[2]];
                            if let Some(z) = rational_sqrt(&r) {
                                let v = combine(&[(combo[0], rat(x)), (combo[1], rat(y)), (combo[2], z)]);
                                if !linalg::is_zero_vec(&v) {
                                    return Some(v);
                                }
                            }
                        } else {
                            for z in -B..=B {
                                let r = -(&partial + &d[combo[2]] * rat(z * z)) / &d[combo[3]];
                                if let Some(w) = rational_sqrt(&r) {
                                    let v = combine(&[
                                        (combo[0], rat(x)),
                                        (combo[1], rat(y)),
                                        (combo[2], rat(z)),
                                        (combo[3], w),
                                    ]);
                                    if !linalg::is_zero_vec(&v) {
                                        return Some(v);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Gram–Schmidt over ℚ; requires the span to be nondegenerate.
    fn orthogonal_basis(&self, basis: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        let mut pool: Vec<Vec<Rational>> = basis.to_vec();
        let mut out: Vec<Vec<Rational>> = Vec::new();
        while !pool.is_empty() {
            let pick = pool
                .iter()
                .position(|v| !self.norm(v).is_zero())
                .or_else(|| {
                    // All isotropic: some pair sum is anisotropic.
                    (1..pool.len()).find(|&j| !self.bilinear(&pool[0], &pool[j]).is_zero()).map(|j| {
                        let s: Vec<Rational> = pool[0].iter().zip(&pool[j]).map(|(a, b)| a + b).collect();
                        pool[0] = s;
                        0
                    })
                });
            let Some(i) = pick else { break };
            let v = pool.swap_remove(i);
            let nv = self.norm(&v);
            for u in pool.iter_mut() {
                let c = -self.bilinear(u, &v) / &nv;
                linalg::axpy(u, &c, &v);
            }
            out.push(v);
        }
        out
    }
}

fn subsets_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    crate::exterior::IndexSet::subsets(n, k)
        .into_iter()
        .map(|s| s.positions().collect())
        .collect()
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let sqrt_int = |x: &BigInt| {
        let s = x.sqrt();
        (&s * &s == *x).then_some(s)
    };
    Some(Rational::new(sqrt_int(q.numer())?, sqrt_int(q.denom())?))
}

/// Basis vectors of `w` (in its echelon basis) completing a basis of `sub ⊆ w`.
fn complement_basis(sub: &Subspace, w: &Subspace) -> Vec<Vec<Rational>> {
    let mut ech = Echelon::new(w.ambient_dim());
    for v in sub.basis() {
        ech.insert(v.clone());
    }
    w.basis()
        .iter()
        .filter(|v| ech.insert((*v).clone()))
        .cloned()
        .collect()
}

/// Linear subspace of `Q^n` stored by its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn from_vectors(ambient: usize, vectors: &[Vec<Rational>]) -> Self {
        let mut ech = Echelon::new(ambient);
        for v in vectors {
            ech.insert(v.clone());
        }
        let (basis, _) = ech.into_sorted();
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| linalg::unit(ambient, i)).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut ech = Echelon::new(self.ambient);
        for b in &self.basis {
            ech.insert(b.clone());
        }
        ech.contains(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        let mut ech = Echelon::new(self.ambient);
        for b in &self.basis {
            ech.insert(b.clone());
        }
        other.basis.iter().all(|v| ech.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::from_vectors(self.ambient, &all)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // Solve Σ a_i x_i = Σ b_j y_j.
        let a = self.basis.len();
        let b = other.basis.len();
        if a == 0 || b == 0 {
            return Subspace::zero(self.ambient);
        }
        let rows: Vec<Vec<Rational>> = (0..self.ambient)
            .map(|r| {
                self.basis
                    .iter()
                    .map(|x| x[r].clone())
                    .chain(other.basis.iter().map(|y| -y[r].clone()))
                    .collect()
            })
            .collect();
        let kernel = linalg::nullspace(&rows, a + b);
        let vectors: Vec<Vec<Rational>> = kernel
            .iter()
            .map(|k| {
                let mut v = linalg::zeros(self.ambient);
                for (c, x) in k[..a].iter().zip(&self.basis) {
                    linalg::axpy(&mut v, c, x);
                }
                v
            })
            .collect();
        Subspace::from_vectors(self.ambient, &vectors)
    }

    /// Image under a matrix with `m` rows.
    pub fn map(&self, matrix: &[Vec<Rational>]) -> Subspace {
        let images: Vec<Vec<Rational>> = self.basis.iter().map(|v| linalg::mat_vec(matrix, v)).collect();
        Subspace::from_vectors(matrix.len(), &images)
    }
}

/// Ordered vectors `(e_1, e_{-1}, …, e_k, e_{-k})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicTuple {
    pub vectors: Vec<Vec<Rational>>,
}

impl HyperbolicTuple {
    pub fn k(&self) -> usize {
        self.vectors.len() / 2
    }

    pub fn verify(&self, space: &QuadraticSpace) -> Result<()> {
        check_pairings(space, &self.vectors[..2 * self.k()])
    }
}

fn check_pairings(space: &QuadraticSpace, vectors: &[Vec<Rational>]) -> Result<()> {
    for i in 0..vectors.len() {
        for j in i..vectors.len() {
            let expected = if i % 2 == 0 && j == i + 1 {
                Rational::one()
            } else {
                Rational::zero()
            };
            if space.bilinear(&vectors[i], &vectors[j]) != expected {
                return Err(Error::Precondition(format!(
                    "hyperbolic pairing ({i}, {j}) violated"
                )));
            }
        }
    }
    Ok(())
}

/// Full hyperbolic basis in label order, plus `e_0` in odd dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicBasis {
    pub vectors: Vec<Vec<Rational>>,
    pub q: usize,
}

impl HyperbolicBasis {
    pub fn verify(&self, space: &QuadraticSpace) -> Result<()> {
        let n = space.dim();
        let paired = 2 * space.witt();
        check_pairings(space, &self.vectors[..paired])?;
        if n % 2 == 1 {
            let e0 = &self.vectors[paired];
            if space.norm(e0).is_zero()
                || self.vectors[..paired].iter().any(|v| !space.bilinear(v, e0).is_zero())
            {
                return Err(Error::Precondition("e0 complement invalid".into()));
            }
        }
        Ok(())
    }

    /// Vector labelled `±(i+1)`: `positive` selects `e_{i+1}`.
    pub fn pair_vector(&self, i: usize, positive: bool) -> &[Rational] {
        &self.vectors[2 * i + usize::from(!positive)]
    }

    pub fn e0(&self) -> Option<&[Rational]> {
        (self.vectors.len() % 2 == 1).then(|| self.vectors.last().unwrap().as_slice())
    }

    /// `span{e_1..e_p}`.
    pub fn positive_span(&self) -> Subspace {
        let p = self.vectors.len() / 2;
        let n = self.vectors[0].len();
        let v: Vec<Vec<Rational>> = (0..p).map(|i| self.pair_vector(i, true).to_vec()).collect();
        Subspace::from_vectors(n, &v)
    }

    /// `span{e_1..e_q, e_{-(q+1)}..e_{-p}}`.
    pub fn mixed_span(&self) -> Subspace {
        let p = self.vectors.len() / 2;
        let n = self.vectors[0].len();
        let v: Vec<Vec<Rational>> = (0..p)
            .map(|i| self.pair_vector(i, i < self.q).to_vec())
            .collect();
        Subspace::from_vectors(n, &v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(n: usize, i: usize) -> Vec<Rational> {
        linalg::unit(n, i)
    }

    fn label_vec(space: &QuadraticSpace, terms: &[(i32, i64)]) -> Vec<Rational> {
        let mut v = linalg::zeros(space.dim());
        for (l, c) in terms {
            v[space.position(Label(*l)).unwrap()] = rat(*c);
        }
        v
    }

    #[test]
    fn basic_pairings() {
        let s = QuadraticSpace::standard(7);
        let e1 = label_vec(&s, &[(1, 1)]);
        let em1 = label_vec(&s, &[(-1, 1)]);
        assert_eq!(s.bilinear(&e1, &em1), rat(1));
        let h = label_vec(&s, &[(1, 1), (-1, 1)]);
        assert_eq!(s.norm(&h), rat(2));
        assert!(!s.is_isotropic(&h));
        let j7 = QuadraticSpace::j7();
        let e0 = label_vec(&j7, &[(0, 1)]);
        assert_eq!(j7.norm(&e0), ratio(-1, 2));
    }

    #[test]
    fn e0_combination_is_isotropic() {
        for space in [QuadraticSpace::standard(7), QuadraticSpace::j7()] {
            let c0 = space.c0().unwrap().clone();
            let mut v = label_vec(&space, &[(0, 1), (1, 1)]);
            v[space.position(Label(-1)).unwrap()] = -c0;
            assert!(space.is_isotropic(&v));
        }
    }

    #[test]
    fn isotropic_subspaces() {
        let s = QuadraticSpace::standard(8);
        let l = Subspace::from_vectors(8, &[label_vec(&s, &[(1, 1)]), label_vec(&s, &[(2, 1)])]);
        assert!(s.is_isotropic_subspace(&l));
        let h = Subspace::from_vectors(8, &[label_vec(&s, &[(1, 1)]), label_vec(&s, &[(-1, 1)])]);
        assert!(!s.is_isotropic_subspace(&h));
        let w2 = Subspace::from_vectors(
            8,
            &[
                label_vec(&s, &[(1, 1)]),
                label_vec(&s, &[(-2, 1)]),
                label_vec(&s, &[(-3, 1)]),
                label_vec(&s, &[(-4, 1)]),
            ],
        );
        assert!(s.is_isotropic_subspace(&w2));
        assert_eq!(s.orthogonal_complement(&w2), w2);
    }

    #[test]
    fn complement_examples() {
        let s = QuadraticSpace::standard(5);
        let l = Subspace::from_vectors(5, &[unit(5, 0)]);
        let perp = s.orthogonal_complement(&l);
        assert_eq!(perp.dim(), 4);
        assert!(!perp.contains(&unit(5, 1)));
        for i in [0, 2, 3, 4] {
            assert!(perp.contains(&unit(5, i)));
        }
        assert_eq!(s.orthogonal_complement(&Subspace::full(5)).dim(), 0);
        assert_eq!(s.orthogonal_complement(&Subspace::zero(5)).dim(), 5);
    }

    #[test]
    fn complete_hyperbolic_on_sum() {
        let s = QuadraticSpace::standard(6);
        let v = label_vec(&s, &[(1, 1), (2, 1)]);
        let t = s.complete_hyperbolic(std::slice::from_ref(&v)).unwrap();
        assert_eq!(s.bilinear(&v, &t.vectors[1]), rat(1));
        assert!(s.is_isotropic(&t.vectors[1]));
        assert!(s.complete_hyperbolic(&[label_vec(&s, &[(1, 1), (-1, 1)])]).is_err());
    }

    #[test]
    fn common_basis_examples() {
        for n in [4, 5] {
            let s = QuadraticSpace::standard(n);
            let w1 = Subspace::from_vectors(n, &[label_vec(&s, &[(1, 1)]), label_vec(&s, &[(2, 1)])]);
            let w2 = Subspace::from_vectors(n, &[label_vec(&s, &[(1, 1)]), label_vec(&s, &[(-2, 1)])]);
            let b = s.common_hyperbolic_basis(&w1, &w2).unwrap();
            assert_eq!(b.q, 1);
            assert_eq!(b.positive_span(), w1);
            assert_eq!(b.mixed_span(), w2);
        }
        let s = QuadraticSpace::standard(8);
        let pos: Vec<Vec<Rational>> = (1..=4).map(|i| label_vec(&s, &[(i, 1)])).collect();
        let neg: Vec<Vec<Rational>> = (1..=4).map(|i| label_vec(&s, &[(-i, 1)])).collect();
        let w1 = Subspace::from_vectors(8, &pos);
        let w2 = Subspace::from_vectors(8, &neg);
        let b = s.common_hyperbolic_basis(&w1, &w2).unwrap();
        assert_eq!(b.q, 0);
        assert_eq!(b.positive_span(), w1);
        assert_eq!(b.mixed_span(), w2);
        let same = s.common_hyperbolic_basis(&w1, &w1).unwrap();
        assert_eq!(same.q, 4);
        assert_eq!(same.mixed_span(), w1);
    }

    #[test]
    fn isotropic_sampling() {
        let s = QuadraticSpace::standard(9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let v = s.random_isotropic_vector(&mut rng).unwrap();
            assert!(s.is_isotropic(&v));
            assert!(!linalg::is_zero_vec(&v));
        }
        let s = QuadraticSpace::standard(6);
        let x = label_vec(&s, &[(1, 1), (-1, 1)]);
        let v = s.complete_isotropic(x, rat(1));
        assert_eq!(v, label_vec(&s, &[(1, 1), (-1, 1), (3, 1), (-3, -1)]));
        let v0 = s.complete_isotropic(linalg::zeros(6), rat(-3));
        assert_eq!(v0, label_vec(&s, &[(3, -3)]));
    }

    #[test]
    fn witt_indices() {
        assert_eq!(QuadraticSpace::standard(7).witt_index().unwrap(), 3);
        assert_eq!(QuadraticSpace::standard(8).witt_index().unwrap(), 4);
        assert_eq!(QuadraticSpace::standard(2).witt_index().unwrap(), 1);
        let diag = |d: &[i64]| {
            let n = d.len();
            QuadraticSpace::from_gram(
                (0..n)
                    .map(|i| (0..n).map(|j| if i == j { rat(d[i]) } else { rat(0) }).collect())
                    .collect(),
            )
            .unwrap()
        };
        assert_eq!(diag(&[1, -1, 1, -1, 1]).witt_index().unwrap(), 2);
        assert_eq!(diag(&[1, 1, -2]).witt_index().unwrap(), 1);
        assert!(diag(&[1, 1, 1, -1]).witt_index().is_err());
        let (h, _) = diag(&[2, -2, 3, -3, 5]).to_hyperbolic().unwrap();
        assert!(h.is_hyperbolic());
        assert_eq!(h.c0(), Some(&ratio(5, 2)));
    }

    #[test]
    fn degenerate_and_asymmetric_rejected() {
        let g = vec![vec![rat(1), rat(0)], vec![rat(0), rat(0)]];
        assert_eq!(QuadraticSpace::from_gram(g), Err(Error::Degenerate));
        let g = vec![vec![rat(0), rat(1)], vec![rat(2), rat(0)]];
        assert_eq!(QuadraticSpace::from_gram(g), Err(Error::NotSymmetric));
    }
}
