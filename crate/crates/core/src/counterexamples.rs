//! The counterexamples in dimensions 7 and 8, their symmetry algebras, the
//! octonionic form, and the Lagrangian variant.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::cones;
use crate::error::{Error, Result};
use crate::exterior::{Covector, IndexSet, Label, MultiVector};
use crate::igcp::{self, QuotientSpace};
use crate::linalg::{self, rat, Rational};
use crate::quadratic::QuadraticSpace;

fn blade(space: &QuadraticSpace, labels: &[i32]) -> MultiVector {
    let positions: Vec<usize> = labels
        .iter()
        .map(|l| space.position(Label(*l)).expect("label in space"))
        .collect();
    MultiVector::blade(space.dim(), &positions)
}

fn sum(terms: &[(i64, MultiVector)]) -> MultiVector {
    let mut acc = MultiVector::zero(terms[0].1.dim(), terms[0].1.grade());
    for (c, t) in terms {
        acc = &acc + &t.scale(&rat(*c));
    }
    acc
}

/// `ω₇ = e₁∧e₂∧e₃ + e₋₁∧e₋₂∧e₋₃ + e₀∧(e₁∧e₋₁ + e₂∧e₋₂ + e₃∧e₋₃)` in [`QuadraticSpace::j7`].
pub fn omega7() -> MultiVector {
    let s = QuadraticSpace::j7();
    sum(&[
        (1, blade(&s, &[1, 2, 3])),
        (1, blade(&s, &[-1, -2, -3])),
        (1, blade(&s, &[0, 1, -1])),
        (1, blade(&s, &[0, 2, -2])),
        (1, blade(&s, &[0, 3, -3])),
    ])
}

/// The 4-form in [`QuadraticSpace::j8`] whose `Φ_v` images are all isotropic decomposable.
pub fn omega8() -> MultiVector {
    let s = QuadraticSpace::j8();
    let mut terms = vec![(2, blade(&s, &[1, 2, 3, 4])), (2, blade(&s, &[-1, -2, -3, -4]))];
    for i in 1..=4 {
        for j in i + 1..=4 {
            terms.push((1, blade(&s, &[i, j, -i, -j])));
        }
    }
    sum(&terms)
}

/// Element of `𝔰𝔬(V)`: a matrix with `XᵀG + GX = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraElement {
    pub matrix: Vec<Vec<Rational>>,
}

impl LieAlgebraElement {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.matrix, v)
    }

    pub fn preserves(&self, gram: &[Vec<Rational>]) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let mut s = Rational::zero();
                for k in 0..n {
                    s += &self.matrix[k][i] * &gram[k][j] + &gram[i][k] * &self.matrix[k][j];
                }
                s.is_zero()
            })
        })
    }

    pub fn bracket(&self, other: &Self) -> Self {
        let n = self.dim();
        let mul = |a: &[Vec<Rational>], b: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
                .collect()
        };
        let xy = mul(&self.matrix, &other.matrix);
        let yx = mul(&other.matrix, &self.matrix);
        LieAlgebraElement {
            matrix: xy
                .iter()
                .zip(&yx)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    pub fn combination(basis: &[LieAlgebraElement], coeffs: &[Rational]) -> Self {
        let n = basis[0].dim();
        let mut m = vec![linalg::zeros(n); n];
        for (x, c) in basis.iter().zip(coeffs) {
            for (row, xrow) in m.iter_mut().zip(&x.matrix) {
                linalg::axpy(row, c, xrow);
            }
        }
        LieAlgebraElement { matrix: m }
    }
}

/// Basis `X_{a,b} : x ↦ ⟨e_b, x⟩ e_a − ⟨e_a, x⟩ e_b` for `a < b`.
pub fn so_basis(space: &QuadraticSpace) -> Vec<LieAlgebraElement> {
    let n = space.dim();
    let g = space.gram();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let mut m = vec![linalg::zeros(n); n];
            for c in 0..n {
                m[a][c] += &g[b][c];
                m[b][c] -= &g[a][c];
            }
            out.push(LieAlgebraElement { matrix: m });
        }
    }
    out
}

/// Derivation action `X·(v₁∧⋯∧v_k) = Σ v₁∧⋯∧Xv_i∧⋯∧v_k`.
pub fn lie_act(x: &LieAlgebraElement, omega: &MultiVector) -> Result<MultiVector> {
    if x.dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: omega.dim(),
            found: x.dim(),
        });
    }
    Ok(derivation(&x.matrix, omega))
}

/// Derivation action of an arbitrary square matrix.
pub fn derivation(matrix: &[Vec<Rational>], omega: &MultiVector) -> MultiVector {
    let n = omega.dim();
    let mut out = MultiVector::zero(n, omega.grade());
    for (set, c) in omega.terms() {
        for pos in set.positions() {
            let rest = set.without(pos);
            let front = set.rank_of(pos);
            for (r, row) in matrix.iter().enumerate() {
                let m = &row[pos];
                if m.is_zero() || rest.contains(r) {
                    continue;
                }
                let parity = front + rest.rank_of(r);
                let v = c * m;
                out.add_term(rest.with(r), if parity % 2 == 0 { v } else { -v });
            }
        }
    }
    out
}

fn kernel_dim(images: &[Vec<Rational>]) -> usize {
    // Columns are the images; kernel of the column map.
    images.len() - linalg::rank(images)
}

fn dense(omega: &MultiVector) -> Vec<Rational> {
    omega.to_dense(&IndexSet::subsets(omega.dim(), omega.grade()))
}

/// Basis of `{X ∈ 𝔰𝔬(V) : X·ω = 0}` in `so_basis` coordinates.
pub fn stabilizer_basis(space: &QuadraticSpace, omega: &MultiVector) -> Vec<Vec<Rational>> {
    let basis = so_basis(space);
    let images: Vec<Vec<Rational>> = basis
        .iter()
        .map(|x| dense(&derivation(&x.matrix, omega)))
        .collect();
    let rows = linalg::transpose(&images, images[0].len());
    linalg::nullspace(&rows, basis.len())
}

pub fn stabilizer_dimension(space: &QuadraticSpace, omega: &MultiVector) -> usize {
    stabilizer_basis(space, omega).len()
}

/// `dim {X ∈ 𝔤 : X v₀ = 0}` where `𝔤` is the stabilizer of `ω`.
pub fn vector_stabilizer_dimension(space: &QuadraticSpace, omega: &MultiVector, v0: &[Rational]) -> usize {
    let basis = so_basis(space);
    let stab = stabilizer_basis(space, omega);
    if stab.is_empty() {
        return 0;
    }
    let images: Vec<Vec<Rational>> = stab
        .iter()
        .map(|c| LieAlgebraElement::combination(&basis, c).apply(v0))
        .collect();
    kernel_dim(&images)
}

/// `dim {X ∈ 𝔤𝔩(V) : X·ω = 0}`.
pub fn gl_stabilizer_dimension(omega: &MultiVector) -> usize {
    let n = omega.dim();
    let images: Vec<Vec<Rational>> = (0..n * n)
        .map(|k| {
            let mut m = vec![linalg::zeros(n); n];
            m[k / n][k % n] = Rational::one();
            dense(&derivation(&m, omega))
        })
        .collect();
    kernel_dim(&images)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub which: u8,
    pub in_grassmann: bool,
    pub igcp_images_checked: usize,
    pub all_images_isotropic: bool,
    pub dim_g: usize,
    pub dim_stab_v0: usize,
    pub orbit_dim: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Space, form and base vector `v₀` of the counterexample in dimension 7 or 8.
pub fn counterexample(which: u8) -> Result<(QuadraticSpace, MultiVector, Vec<Rational>)> {
    let (space, omega, v0_label) = match which {
        7 => (QuadraticSpace::j7(), omega7(), -3),
        8 => (QuadraticSpace::j8(), omega8(), -4),
        _ => {
            return Err(Error::Precondition(format!(
                "counterexamples exist in dimension 7 and 8, not {which}"
            )))
        }
    };
    let mut v0 = linalg::zeros(space.dim());
    v0[space.position(Label(v0_label)).expect("label")] = Rational::one();
    Ok((space, omega, v0))
}

pub fn check_counterexample(which: u8, samples: usize, seed: u64) -> Result<CounterexampleReport> {
    let (space, omega, v0) = counterexample(which)?;
    let mut rng = igcp::trial_rng(seed, 0);
    let mut checked = 0;
    let mut all_iso = true;
    let structured = igcp::structured_candidates(&space);
    let random = (0..samples)
        .map(|_| space.random_isotropic_vector(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    for v in structured.iter().chain(&random) {
        let q = QuotientSpace::new(&space, v)?;
        let image = q.phi(&omega)?;
        checked += 1;
        all_iso &= cones::in_isotropic_cone(q.induced(), &image);
    }
    let dim_g = stabilizer_dimension(&space, &omega);
    let dim_stab_v0 = vector_stabilizer_dimension(&space, &omega, &v0);
    Ok(CounterexampleReport {
        which,
        in_grassmann: cones::in_grassmann_cone(&omega),
        igcp_images_checked: checked,
        all_images_isotropic: all_iso,
        dim_g,
        dim_stab_v0,
        orbit_dim: dim_g - dim_stab_v0,
        samples,
        seed,
    })
}

/// The octonionic triple-product 3-form on `e₁..e₇`, one term per Fano line.
pub fn fano_form() -> MultiVector {
    let lines: [([usize; 3], i64); 7] = [
        ([1, 2, 3], 1),
        ([1, 4, 5], 1),
        ([1, 6, 7], 1),
        ([2, 4, 6], 1),
        ([2, 5, 7], -1),
        ([3, 4, 7], 1),
        ([3, 5, 6], 1),
    ];
    let terms: Vec<(i64, MultiVector)> = lines
        .iter()
        .map(|(l, c)| (*c, MultiVector::blade(7, &[l[0] - 1, l[1] - 1, l[2] - 1])))
        .collect();
    sum(&terms)
}

/// `ω₇` under `e₀ ↦ e₄*`, `e_{±i} ↦ e_i* ± e_{i+4}*` (the normalizing `√2` dropped).
pub fn fano_substitution() -> MultiVector {
    let s = QuadraticSpace::j7();
    let mut matrix = vec![linalg::zeros(7); 7];
    for (pos, label) in s.labels().iter().enumerate() {
        let i = label.0;
        if i == 0 {
            matrix[3][pos] = Rational::one();
        } else {
            let k = i.unsigned_abs() as usize;
            matrix[k - 1][pos] = Rational::one();
            matrix[k + 3][pos] = rat(i.signum() as i64);
        }
    }
    omega7().apply_linear(&matrix)
}

/// The substituted `ω₇` equals exactly twice the Fano form.
pub fn fano_change_of_basis_check() -> bool {
    fano_substitution() == fano_form().scale(&rat(2))
}

/// `V` of dimension `4m` with `⟨e_i, e_{-i}⟩ = 1 = -⟨e_{-i}, e_i⟩` for `i > 0`.
#[derive(Clone, Debug)]
pub struct SkewSpace {
    labels: Vec<Label>,
}

impl SkewSpace {
    pub fn new(pairs: usize) -> Self {
        SkewSpace {
            labels: crate::exterior::hyperbolic_labels(2 * pairs),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// `⟨v, w⟩ = Σ_{i>0} v_i w_{-i} − v_{-i} w_i`.
    pub fn bilinear(&self, v: &[Rational], w: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for pair in 0..self.dim() / 2 {
            let (p, m) = (2 * pair, 2 * pair + 1);
            acc += &v[p] * &w[m] - &v[m] * &w[p];
        }
        acc
    }

    /// `Φ_v(ω)` embedded in `⋀V` through the projection onto `{v, w}⊥`, which
    /// vanishes exactly when `Φ_v(ω)` does.
    pub fn phi(&self, v: &[Rational], omega: &MultiVector) -> Result<MultiVector> {
        let n = self.dim();
        let beta: Vec<Rational> = (0..n).map(|j| self.bilinear(v, &linalg::unit(n, j))).collect();
        let a = (0..n).find(|&a| !beta[a].is_zero()).ok_or(Error::ZeroVector)?;
        let mut w = linalg::zeros(n);
        w[a] = beta[a].recip();
        let contracted = omega.contract(&Covector::new(beta))?;
        // P(x) = x + ⟨w,x⟩ v − ⟨v,x⟩ w.
        let projection: Vec<Vec<Rational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let e = linalg::unit(n, c);
                        let mut x = if r == c { Rational::one() } else { Rational::zero() };
                        x += self.bilinear(&w, &e) * &v[r];
                        x -= self.bilinear(v, &e) * &w[r];
                        x
                    })
                    .collect()
            })
            .collect();
        Ok(contracted.apply_linear(&projection))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LagrangianReport {
    pub m: usize,
    pub dim: usize,
    pub terms: usize,
    pub wedge_square_nonzero: bool,
    pub top_coefficient: String,
    pub images_checked: usize,
    pub all_images_zero: bool,
    pub seed: u64,
}

/// `α^{∧m}` for `α = Σ e_i ∧ e_{-i}` over `2m` pairs, with its `Φ_v` images
/// checked on all basis vectors and `samples` random vectors.
pub fn lagrangian_counterexample(m: usize, samples: usize, seed: u64) -> Result<(MultiVector, LagrangianReport)> {
    if m < 2 {
        return Err(Error::Precondition("the Lagrangian example needs m >= 2".into()));
    }
    let space = SkewSpace::new(2 * m);
    let n = space.dim();
    let mut alpha = MultiVector::zero(n, 2);
    for i in 0..2 * m {
        alpha = &alpha + &MultiVector::blade(n, &[2 * i, 2 * i + 1]);
    }
    let mut omega = MultiVector::scalar(n, Rational::one());
    for _ in 0..m {
        omega = omega.wedge(&alpha)?;
    }
    let square = omega.wedge(&omega)?;
    let top = square.coefficient(IndexSet::from_bits((1u32 << n) - 1));
    let mut rng = igcp::trial_rng(seed, 0);
    let mut vectors: Vec<Vec<Rational>> = (0..n).map(|i| linalg::unit(n, i)).collect();
    for _ in 0..samples {
        let v: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-10..=10))).collect();
        if !linalg::is_zero_vec(&v) {
            vectors.push(v);
        }
    }
    let mut all_zero = true;
    for v in &vectors {
        all_zero &= space.phi(v, &omega)?.is_zero();
    }
    let report = LagrangianReport {
        m,
        dim: n,
        terms: omega.len(),
        wedge_square_nonzero: !square.is_zero(),
        top_coefficient: top.to_string(),
        images_checked: vectors.len(),
        all_images_zero: all_zero,
        seed,
    };
    Ok((omega, report))
}
