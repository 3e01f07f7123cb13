//! Grassmann and isotropic Grassmann cones.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{merge_sign, IndexSet, MultiVector};
use crate::igcp::QuotientSpace;
use crate::linalg::{self, Rational};
use crate::quadratic::{QuadraticSpace, Subspace};

/// Quadratic relation `Σ sign · x_A x_B` among Plücker coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PluckerRelation {
    pub k: usize,
    pub n: usize,
    pub terms: Vec<(IndexSet, IndexSet, i32)>,
}

impl PluckerRelation {
    pub fn eval(&self, omega: &MultiVector) -> Rational {
        let mut acc = Rational::zero();
        for (a, b, s) in &self.terms {
            let x = omega.coefficient(*a);
            if x.is_zero() {
                continue;
            }
            let y = omega.coefficient(*b);
            if y.is_zero() {
                continue;
            }
            let t = x * y;
            if *s > 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        acc
    }
}

type RelationCache = Mutex<HashMap<(usize, usize), Arc<Vec<PluckerRelation>>>>;

/// The shuffle relations `Σ_{a∈J} (-1)^{pos(a)} x_{I∪a} x_{J∖a}` for
/// `|I| = k-1`, `|J| = k+1`, deduplicated up to sign. Cached per `(k, n)`.
pub fn plucker_relations(k: usize, n: usize) -> Arc<Vec<PluckerRelation>> {
    static CACHE: OnceLock<RelationCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("cache lock").get(&(k, n)) {
        return r.clone();
    }
    let relations = Arc::new(generate_relations(k, n));
    cache
        .lock()
        .expect("cache lock")
        .insert((k, n), relations.clone());
    relations
}

fn generate_relations(k: usize, n: usize) -> Vec<PluckerRelation> {
    if k == 0 || k > n {
        return Vec::new();
    }
    let mut seen: BTreeSet<Vec<(IndexSet, IndexSet, i32)>> = BTreeSet::new();
    for i in IndexSet::subsets(n, k - 1) {
        for j in IndexSet::subsets(n, k + 1) {
            let mut acc: HashMap<(IndexSet, IndexSet), i32> = HashMap::new();
            for (slot, a) in j.positions().enumerate() {
                if i.contains(a) {
                    continue;
                }
                let single = IndexSet::EMPTY.with(a);
                let sign = if slot % 2 == 0 { 1 } else { -1 } * merge_sign(i, single);
                let x = i.with(a);
                let y = j.without(a);
                let key = if x <= y { (x, y) } else { (y, x) };
                *acc.entry(key).or_default() += sign;
            }
            let mut terms: Vec<(IndexSet, IndexSet, i32)> = acc
                .into_iter()
                .filter(|(_, s)| *s != 0)
                .map(|((a, b), s)| (a, b, s))
                .collect();
            if terms.is_empty() {
                continue;
            }
            terms.sort();
            let g = terms.iter().fold(0, |g, t| gcd(g, t.2.abs()));
            let flip = if terms[0].2 < 0 { -1 } else { 1 };
            for t in terms.iter_mut() {
                t.2 = t.2 / g * flip;
            }
            seen.insert(terms);
        }
    }
    seen.into_iter()
        .map(|terms| PluckerRelation { k, n, terms })
        .collect()
}

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Vectors `ι(e*_{I₀∖i}) ω` for `i ∈ I₀`, where `I₀` is the leading index set.
/// They span `L_ω` whenever `ω` is decomposable.
pub fn factor_vectors(omega: &MultiVector) -> Option<Vec<Vec<Rational>>> {
    let (i0, _) = omega.leading()?;
    let positions: Vec<usize> = i0.positions().collect();
    let vectors = positions
        .iter()
        .map(|&i| {
            let mut cur = omega.clone();
            for &j in positions.iter().rev() {
                if j != i {
                    cur = cur.contract_dual(j);
                }
            }
            let mut v = linalg::zeros(omega.dim());
            for (s, c) in cur.terms() {
                v[s.positions().next().expect("grade one")] = c.clone();
            }
            v
        })
        .collect();
    Some(vectors)
}

/// Exact factorization `ω = v_1 ∧ ⋯ ∧ v_k`, or `None` if `ω` is zero or not decomposable.
pub fn factorize(omega: &MultiVector) -> Option<Vec<Vec<Rational>>> {
    if omega.grade() == 0 {
        return None;
    }
    let mut vectors = factor_vectors(omega)?;
    let wedge = MultiVector::wedge_vectors(omega.dim(), &vectors);
    let c = omega.ratio_to(&wedge)?;
    if c.is_zero() {
        return None;
    }
    for x in vectors[0].iter_mut() {
        *x *= &c;
    }
    Some(vectors)
}

pub fn in_grassmann_cone(omega: &MultiVector) -> bool {
    omega.is_zero() || omega.grade() <= 1 || factorize(omega).is_some()
}

/// Membership by evaluating every shuffle relation; slower than
/// [`in_grassmann_cone`] but yields a certificate.
pub fn violated_relation(omega: &MultiVector) -> Option<(PluckerRelation, Rational)> {
    plucker_relations(omega.grade(), omega.dim())
        .iter()
        .find_map(|r| {
            let v = r.eval(omega);
            (!v.is_zero()).then(|| (r.clone(), v))
        })
}

/// `L_ω` for a nonzero decomposable `ω`.
pub fn extract_subspace(omega: &MultiVector) -> Result<Subspace> {
    if omega.is_zero() {
        return Err(Error::ZeroForm);
    }
    if omega.grade() == 0 {
        return Ok(Subspace::zero(omega.dim()));
    }
    let vectors = factorize(omega).ok_or(Error::NotDecomposable)?;
    Ok(Subspace::from_vectors(omega.dim(), &vectors))
}

/// Why a form fails to lie in the isotropic Grassmann cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeFailure {
    NotDecomposable,
    /// Factors `i` and `j` of `L_ω` pair to a nonzero value.
    NotIsotropic { i: usize, j: usize, pairing: String },
}

/// `Ok(())` if `ω ∈ Ĝr_iso(k, V)`, otherwise the reason.
pub fn isotropic_cone_check(space: &QuadraticSpace, omega: &MultiVector) -> Result<(), ConeFailure> {
    if omega.is_zero() || omega.grade() == 0 {
        return Ok(());
    }
    let vectors = factorize(omega).ok_or(ConeFailure::NotDecomposable)?;
    for i in 0..vectors.len() {
        for j in i..vectors.len() {
            let b = space.bilinear(&vectors[i], &vectors[j]);
            if !b.is_zero() {
                return Err(ConeFailure::NotIsotropic {
                    i,
                    j,
                    pairing: b.to_string(),
                });
            }
        }
    }
    Ok(())
}

pub fn in_isotropic_cone(space: &QuadraticSpace, omega: &MultiVector) -> bool {
    isotropic_cone_check(space, omega).is_ok()
}

/// Vectors `v_1..v_k` spanning a random isotropic subspace: sample an isotropic
/// `v_1`, recurse in `V_{v_1}`, and lift the result.
pub fn random_isotropic_basis<R: Rng + ?Sized>(
    space: &QuadraticSpace,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Rational>>> {
    if k > space.witt() {
        return Err(Error::Precondition(format!(
            "k = {k} exceeds the Witt index {}",
            space.witt()
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let v = linalg::primitive(&space.random_isotropic_vector(rng)?);
    let mut out = vec![v.clone()];
    if k > 1 {
        let q = QuotientSpace::new(space, &v)?;
        for y in random_isotropic_basis(q.induced(), k - 1, rng)? {
            out.push(linalg::primitive(&q.lift(&y)));
        }
    }
    Ok(out)
}

/// `v_1 ∧ ⋯ ∧ v_k` for a random isotropic frame.
pub fn random_isotropic_frame<R: Rng + ?Sized>(
    space: &QuadraticSpace,
    k: usize,
    rng: &mut R,
) -> Result<MultiVector> {
    let basis = random_isotropic_basis(space, k, rng)?;
    Ok(MultiVector::wedge_vectors(space.dim(), &basis))
}

/// Sum of `terms` random basis blades with small nonzero integer coefficients.
pub fn random_sparse_form<R: Rng + ?Sized>(dim: usize, grade: usize, terms: usize, rng: &mut R) -> MultiVector {
    let all = IndexSet::subsets(dim, grade);
    let mut omega = MultiVector::zero(dim, grade);
    for _ in 0..terms {
        let set = all[rng.gen_range(0..all.len())];
        let c = loop {
            let c = rng.gen_range(-5..=5i64);
            if c != 0 {
                break c;
            }
        };
        omega.add_term(set, linalg::rat(c));
    }
    omega
}

/// Random form not in the Grassmann cone.
pub fn random_non_decomposable<R: Rng + ?Sized>(dim: usize, grade: usize, rng: &mut R) -> Result<MultiVector> {
    if grade < 2 || grade + 2 > dim {
        return Err(Error::Precondition(format!(
            "every form of grade {grade} in dimension {dim} is decomposable"
        )));
    }
    if grade == 2 {
        let mut omega = MultiVector::blade(dim, &[0, 1]);
        omega = &omega + &MultiVector::blade(dim, &[2, 3]);
        let extra = random_sparse_form(dim, 2, 3, rng);
        let candidate = &omega + &extra;
        return Ok(if in_grassmann_cone(&candidate) { omega } else { candidate });
    }
    for _ in 0..1000 {
        let terms = rng.gen_range(2..=6);
        let omega = random_sparse_form(dim, grade, terms, rng);
        if !in_grassmann_cone(&omega) {
            return Ok(omega);
        }
    }
    Err(Error::Exhausted("no non-decomposable form sampled".into()))
}
