//! Quotients `V_v = v⊥/⟨v⟩`, the maps `Φ_v`, and the main-theorem machinery.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cones::{self, ConeFailure};
use crate::error::{Error, Result};
use crate::exterior::{hyperbolic_labels, merge_sign, Covector, IndexSet, Label, MultiVector};
use crate::linalg::{self, rat, Rational};
use crate::quadratic::{QuadraticSpace, Subspace};

/// `V_v` realized as `{v, w}⊥` for the partner `w = e_{-a} / v_a`, where `a` is
/// the position of the last hyperbolic pair on which `v` is nonzero.
///
/// The representatives `r_b = e_b - (⟨e_b, v⟩ / v_a) e_{-a}` for the remaining
/// positions `b` form a hyperbolic basis with the parent's labels and `c₀`.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    v: Vec<Rational>,
    w: Vec<Rational>,
    pivot: usize,
    opposite: usize,
    kept: Vec<usize>,
    /// Parent position to quotient index.
    index_of: Vec<Option<usize>>,
    small: Option<SmallScalars>,
    /// `v_b / v_a` for each kept position `b`.
    ratios: Vec<Rational>,
    rep_basis: Vec<Vec<Rational>>,
    lowered_v: Covector,
    induced: QuadraticSpace,
}

impl QuotientSpace {
    pub fn new(space: &QuadraticSpace, v: &[Rational]) -> Result<Self> {
        if !space.is_hyperbolic() {
            return Err(Error::NotHyperbolic);
        }
        if v.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: v.len(),
            });
        }
        if linalg::is_zero_vec(v) {
            return Err(Error::ZeroVector);
        }
        if !space.is_isotropic(v) {
            return Err(Error::NotIsotropic);
        }
        let pivot = space
            .pairs()
            .into_iter()
            .rev()
            .find_map(|(pos, neg)| {
                if !v[pos].is_zero() {
                    Some(pos)
                } else if !v[neg].is_zero() {
                    Some(neg)
                } else {
                    None
                }
            })
            .ok_or(Error::NotIsotropic)?;
        let opposite = space.partner(pivot);
        let va = &v[pivot];
        let mut w = linalg::zeros(space.dim());
        w[opposite] = va.recip();
        let kept: Vec<usize> = (0..space.dim())
            .filter(|&b| b != pivot && b != opposite)
            .collect();
        let ratios: Vec<Rational> = kept.iter().map(|&b| &v[b] / va).collect();
        let lowered = space.lower(v);
        let rep_basis = kept
            .iter()
            .map(|&b| {
                let mut r = linalg::unit(space.dim(), b);
                r[opposite] = -(&lowered[b] / va);
                r
            })
            .collect();
        let labels = kept.iter().map(|&b| space.labels()[b]).collect();
        let induced = QuadraticSpace::hyperbolic(labels, space.c0().cloned())?;
        let mut index_of = vec![None; space.dim()];
        for (j, &b) in kept.iter().enumerate() {
            index_of[b] = Some(j);
        }
        let small = SmallScalars::new(v, &lowered);
        Ok(QuotientSpace {
            v: v.to_vec(),
            w,
            pivot,
            opposite,
            kept,
            index_of,
            small,
            ratios,
            rep_basis,
            lowered_v: Covector::new(lowered),
            induced,
        })
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    pub fn partner(&self) -> &[Rational] {
        &self.w
    }

    pub fn rep_basis(&self) -> &[Vec<Rational>] {
        &self.rep_basis
    }

    pub fn induced(&self) -> &QuadraticSpace {
        &self.induced
    }

    /// Parent positions represented in the quotient, in order.
    pub fn kept_positions(&self) -> &[usize] {
        &self.kept
    }

    /// Coordinates in `V_v` of the class of `x ∈ v⊥`.
    pub fn coords(&self, x: &[Rational]) -> Vec<Rational> {
        let xa = &x[self.pivot];
        self.kept
            .iter()
            .zip(&self.ratios)
            .map(|(&b, r)| if xa.is_zero() { x[b].clone() } else { &x[b] - r * xa })
            .collect()
    }

    /// The representative in `{v, w}⊥` of a quotient vector.
    pub fn lift(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = linalg::zeros(self.v.len());
        for (c, r) in y.iter().zip(&self.rep_basis) {
            linalg::axpy(&mut out, c, r);
        }
        out
    }

    /// Coordinate map as an `(n-2) × n` matrix.
    pub fn coordinate_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.v.len();
        (0..n)
            .map(|c| self.coords(&linalg::unit(n, c)))
            .fold(vec![Vec::new(); self.kept.len()], |mut rows, col| {
                for (row, x) in rows.iter_mut().zip(col) {
                    row.push(x);
                }
                rows
            })
    }

    /// `⋀ C` applied to a form on `v⊥`.
    pub fn project(&self, eta: &MultiVector) -> MultiVector {
        let n = self.v.len();
        let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
        for (j, &b) in self.kept.iter().enumerate() {
            columns[b].push((j, Rational::one()));
        }
        columns[self.pivot] = self
            .ratios
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(j, r)| (j, -r.clone()))
            .collect();
        eta.apply_columns(self.kept.len(), &columns)
    }

    /// `Φ_v(ω)`: contract by `⟨v, ·⟩`, then pass to `V_v`.
    pub fn phi(&self, omega: &MultiVector) -> Result<MultiVector> {
        if omega.dim() == self.v.len() && omega.grade() > 0 {
            if let Some(image) = self.phi_small(omega) {
                return Ok(image);
            }
        }
        self.phi_exact(omega)
    }

    /// `Φ_v(ω)` through rational arithmetic only.
    pub fn phi_exact(&self, omega: &MultiVector) -> Result<MultiVector> {
        Ok(self.project(&omega.contract(&self.lowered_v)?))
    }

    fn compress(&self, set: IndexSet) -> IndexSet {
        IndexSet::from_positions(set.positions().map(|b| self.index_of[b].expect("kept position")))
            .expect("fits")
    }

    /// `Φ_v(ω)` in `i128` after clearing denominators, or `None` on overflow.
    ///
    /// With `η = ι ω` and `e_a` the pivot, `C(e_a ∧ α) = -Σ_b (v_b / v_a) ē_b ∧ α`,
    /// so `v_a · C(η)` has integer coefficients.
    fn phi_small(&self, omega: &MultiVector) -> Option<MultiVector> {
        let small = self.small.as_ref()?;
        let (omega_scale, coeffs) = small_form(omega)?;
        let mut eta: HashMap<IndexSet, i128> = HashMap::new();
        for (set, c) in coeffs {
            for (slot, pos) in set.positions().enumerate() {
                let l = small.lowered[pos];
                if l == 0 {
                    continue;
                }
                let t = c.checked_mul(l)?;
                let e = eta.entry(set.without(pos)).or_insert(0);
                *e = if slot % 2 == 0 { e.checked_add(t)? } else { e.checked_sub(t)? };
            }
        }
        let va = small.v[self.pivot];
        let mut out: HashMap<IndexSet, i128> = HashMap::new();
        let mut add = |set: IndexSet, t: i128| -> Option<()> {
            let e = out.entry(set).or_insert(0);
            *e = e.checked_add(t)?;
            Some(())
        };
        for (set, c) in eta {
            if c == 0 || set.contains(self.opposite) {
                continue;
            }
            if !set.contains(self.pivot) {
                add(self.compress(set), c.checked_mul(va)?)?;
                continue;
            }
            let rest = self.compress(set.without(self.pivot));
            // `e_T = ± e_a ∧ e_rest`, and `C(e_a)` carries a minus sign.
            let c = if set.rank_of(self.pivot) % 2 == 0 { -c } else { c };
            for (j, &b) in self.kept.iter().enumerate() {
                let vb = small.v[b];
                if vb == 0 || rest.contains(j) {
                    continue;
                }
                let t = c.checked_mul(vb)?;
                add(rest.with(j), if rest.rank_of(j) % 2 == 0 { t } else { -t })?;
            }
        }
        let den = BigInt::from(small.lowered_scale) * BigInt::from(omega_scale) * BigInt::from(va);
        let mut image = MultiVector::zero(self.kept.len(), omega.grade() - 1);
        for (set, c) in out {
            if c != 0 {
                image.add_term(set, Rational::new(BigInt::from(c), den.clone()));
            }
        }
        Some(image)
    }
}

/// `v` and `⟨v, ·⟩` rescaled to machine integers.
#[derive(Clone, Debug)]
struct SmallScalars {
    v: Vec<i128>,
    lowered: Vec<i128>,
    /// `⟨v, ·⟩ = lowered / lowered_scale`.
    lowered_scale: i128,
}

impl SmallScalars {
    fn new(v: &[Rational], lowered: &[Rational]) -> Option<Self> {
        let (_, v) = small_vector(&v.iter().collect::<Vec<_>>())?;
        let (lowered_scale, lowered) = small_vector(&lowered.iter().collect::<Vec<_>>())?;
        Some(SmallScalars {
            v,
            lowered,
            lowered_scale,
        })
    }
}

/// `(d, n)` with `x = n / d` entrywise, if everything fits in `i64`.
fn small_vector(xs: &[&Rational]) -> Option<(i128, Vec<i128>)> {
    let mut d = BigInt::one();
    for x in xs {
        d = d.lcm(x.denom());
    }
    let out = xs
        .iter()
        .map(|x| (x.numer() * (&d / x.denom())).to_i64().map(i128::from))
        .collect::<Option<Vec<_>>>()?;
    Some((d.to_i64()?.into(), out))
}

fn small_form(omega: &MultiVector) -> Option<(i128, Vec<(IndexSet, i128)>)> {
    let (d, values) = small_vector(&omega.terms().map(|(_, c)| c).collect::<Vec<_>>())?;
    Some((d, omega.terms().map(|(s, _)| s).zip(values).collect()))
}

pub fn quotient_space(space: &QuadraticSpace, v: &[Rational]) -> Result<QuotientSpace> {
    QuotientSpace::new(space, v)
}

pub fn phi_v(space: &QuadraticSpace, v: &[Rational], omega: &MultiVector) -> Result<MultiVector> {
    QuotientSpace::new(space, v)?.phi(omega)
}

/// `ω = ω₁ ∧ e_p ∧ e_{-p} + ω₂ ∧ e_p + ω₃ ∧ e_{-p} + ω₄` with `ω_i` supported on `V′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaDecomposition {
    pub omega1: MultiVector,
    pub omega2: MultiVector,
    pub omega3: MultiVector,
    pub omega4: MultiVector,
    pub pair: (usize, usize),
}

impl OmegaDecomposition {
    pub fn parts(&self) -> [&MultiVector; 4] {
        [&self.omega1, &self.omega2, &self.omega3, &self.omega4]
    }

    pub fn reassemble(&self) -> MultiVector {
        let n = self.omega4.dim();
        let (ep, emp) = self.pair;
        let e = |pos: usize| MultiVector::blade(n, &[pos]);
        let w = |a: &MultiVector, b: &MultiVector| a.wedge(b).expect("same dimension");
        let t1 = w(&w(&self.omega1, &e(ep)), &e(emp));
        let t2 = w(&self.omega2, &e(ep));
        let t3 = w(&self.omega3, &e(emp));
        &(&(&t1 + &t2) + &t3) + &self.omega4
    }
}

pub fn decompose(space: &QuadraticSpace, omega: &MultiVector) -> Result<OmegaDecomposition> {
    let (ep, emp) = space.last_pair()?;
    let (n, k) = (omega.dim(), omega.grade());
    if k == 0 {
        return Err(Error::GradeZero);
    }
    let mut parts = [
        MultiVector::zero(n, k.saturating_sub(2)),
        MultiVector::zero(n, k - 1),
        MultiVector::zero(n, k - 1),
        MultiVector::zero(n, k),
    ];
    let pair = IndexSet::EMPTY.with(ep).with(emp);
    for (set, c) in omega.terms() {
        let (slot, removed) = match (set.contains(ep), set.contains(emp)) {
            (true, true) => (0, pair),
            (true, false) => (1, IndexSet::EMPTY.with(ep)),
            (false, true) => (2, IndexSet::EMPTY.with(emp)),
            (false, false) => (3, IndexSet::EMPTY),
        };
        let rest = set.minus(removed);
        let sign = merge_sign(rest, removed);
        parts[slot].add_term(rest, if sign > 0 { c.clone() } else { -c.clone() });
    }
    let [omega1, omega2, omega3, omega4] = parts;
    Ok(OmegaDecomposition {
        omega1,
        omega2,
        omega3,
        omega4,
        pair: (ep, emp),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case_id: Option<u8>,
    /// Which of `ω₁..ω₄` are nonzero.
    pub zero_pattern: [bool; 4],
    pub checked_conditions: Vec<(String, bool)>,
}

fn subspace_or_zero(omega: &MultiVector) -> Option<Subspace> {
    if omega.is_zero() {
        return None;
    }
    cones::extract_subspace(omega).ok()
}

pub fn classify(space: &QuadraticSpace, omega: &MultiVector) -> Result<CaseReport> {
    let d = decompose(space, omega)?;
    let nz = d.parts().map(|x| !x.is_zero());
    let iso = |x: &MultiVector| cones::in_isotropic_cone(space, x);
    let mut conds: Vec<(String, bool)> = Vec::new();
    let case = match nz {
        [false, true, false, false] => {
            conds.push(("omega2 isotropic decomposable".into(), iso(&d.omega2)));
            1
        }
        [false, false, true, false] => {
            conds.push(("omega3 isotropic decomposable".into(), iso(&d.omega3)));
            2
        }
        [false, true, true, true] => {
            conds.push(("dim V odd".into(), space.dim() % 2 == 1));
            conds.push(("omega2 isotropic decomposable".into(), iso(&d.omega2)));
            conds.push(("omega3 isotropic decomposable".into(), iso(&d.omega3)));
            conds.push(("omega4 decomposable".into(), cones::in_grassmann_cone(&d.omega4)));
            let (l2, l3, l4) = (
                subspace_or_zero(&d.omega2),
                subspace_or_zero(&d.omega3),
                subspace_or_zero(&d.omega4),
            );
            let eq = matches!((&l2, &l3), (Some(a), Some(b)) if a == b);
            let sub = matches!((&l2, &l4), (Some(a), Some(b)) if b.contains_subspace(a));
            conds.push(("L2 = L3".into(), eq));
            conds.push(("L2 in L4".into(), sub));
            3
        }
        [true, true, true, true] => {
            conds.push(("omega1 isotropic decomposable".into(), iso(&d.omega1)));
            conds.push(("omega2 isotropic decomposable".into(), iso(&d.omega2)));
            conds.push(("omega3 isotropic decomposable".into(), iso(&d.omega3)));
            conds.push(("omega4 decomposable".into(), cones::in_grassmann_cone(&d.omega4)));
            let (l1, l2, l3, l4) = (
                subspace_or_zero(&d.omega1),
                subspace_or_zero(&d.omega2),
                subspace_or_zero(&d.omega3),
                subspace_or_zero(&d.omega4),
            );
            let (meet, join) = match (&l1, &l2, &l3, &l4) {
                (Some(a), Some(b), Some(c), Some(e)) => {
                    (b.intersection(c) == *a, b.sum(c) == *e)
                }
                _ => (false, false),
            };
            conds.push(("L2 meet L3 = L1".into(), meet));
            conds.push(("L2 + L3 = L4".into(), join));
            4
        }
        _ => {
            conds.push(("zero pattern matches a case".into(), false));
            0
        }
    };
    let ok = case != 0 && conds.iter().all(|(_, b)| *b);
    Ok(CaseReport {
        case_id: ok.then_some(case),
        zero_pattern: nz,
        checked_conditions: conds,
    })
}

/// A hyperbolic basis as `(label, vector)` pairs plus its `c₀`.
#[derive(Clone, Debug)]
struct Frame {
    vectors: Vec<(Label, Vec<Rational>)>,
    c0: Option<Rational>,
}

impl Frame {
    fn standard(space: &QuadraticSpace) -> Self {
        let n = space.dim();
        Frame {
            vectors: space
                .labels()
                .iter()
                .enumerate()
                .map(|(i, l)| (*l, linalg::unit(n, i)))
                .collect(),
            c0: space.c0().cloned(),
        }
    }

    fn get(&self, label: Label) -> Option<&[Rational]> {
        self.vectors
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| v.as_slice())
    }

    /// The structured isotropic vectors used in the proof of the main theorem.
    fn candidates(&self) -> Vec<Vec<Rational>> {
        let combo = |terms: &[(&[Rational], Rational)]| {
            let mut v = linalg::zeros(terms[0].0.len());
            for (x, c) in terms {
                linalg::axpy(&mut v, c, x);
            }
            v
        };
        let nonzero: Vec<&(Label, Vec<Rational>)> =
            self.vectors.iter().filter(|(l, _)| l.0 != 0).collect();
        let mut out: Vec<Vec<Rational>> = nonzero.iter().map(|(_, v)| v.clone()).collect();
        if let (Some(e0), Some(c0)) = (self.get(Label(0)), &self.c0) {
            for (l, v) in &nonzero {
                let opp = self.get(l.partner()).expect("paired label");
                out.push(combo(&[(e0, Rational::one()), (opp, Rational::one()), (v, -c0.clone())]));
            }
        }
        for (i, (a, x)) in nonzero.iter().enumerate() {
            for (b, y) in &nonzero[i + 1..] {
                if a.0 == -b.0 {
                    continue;
                }
                out.push(combo(&[(x, Rational::one()), (y, Rational::one())]));
                out.push(combo(&[(x, Rational::one()), (y, -Rational::one())]));
            }
        }
        out
    }
}

/// Structured candidates in the standard basis.
pub fn structured_candidates(space: &QuadraticSpace) -> Vec<Vec<Rational>> {
    Frame::standard(space).candidates()
}

/// Structured candidates in a hyperbolic basis adapted to `L_{ω₂}` and `L_{ω₃}`,
/// when both are isotropic decomposable and nonzero.
pub fn adapted_candidates(space: &QuadraticSpace, omega: &MultiVector) -> Result<Vec<Vec<Rational>>> {
    let d = decompose(space, omega)?;
    let (ep, emp) = d.pair;
    if d.omega2.is_zero() || d.omega3.is_zero() {
        return Ok(Vec::new());
    }
    if !cones::in_isotropic_cone(space, &d.omega2) || !cones::in_isotropic_cone(space, &d.omega3) {
        return Ok(Vec::new());
    }
    let mut e_p = linalg::zeros(space.dim());
    e_p[ep] = Rational::one();
    let vprime = QuotientSpace::new(space, &e_p)?;
    let restrict = |omega: &MultiVector| -> Result<Subspace> {
        let l = cones::extract_subspace(omega)?;
        let vs: Vec<Vec<Rational>> = l.basis().iter().map(|v| vprime.coords(v)).collect();
        Ok(Subspace::from_vectors(vprime.induced().dim(), &vs))
    };
    let (w1, w2) = (restrict(&d.omega2)?, restrict(&d.omega3)?);
    let inner = vprime.induced();
    let basis = inner.common_hyperbolic_basis(&w1, &w2)?;
    let labels = hyperbolic_labels(inner.dim());
    let mut vectors: Vec<(Label, Vec<Rational>)> = labels
        .iter()
        .zip(&basis.vectors)
        .map(|(l, v)| (*l, vprime.lift(v)))
        .collect();
    let p = space.witt() as i32;
    vectors.push((Label(p), linalg::unit(space.dim(), ep)));
    vectors.push((Label(-p), linalg::unit(space.dim(), emp)));
    let c0 = basis.e0().map(|e0| inner.norm(e0) / rat(2));
    Ok(Frame { vectors, c0 }.candidates())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessStage {
    Structured,
    Adapted,
    Random,
}

/// A relation among quotient Plücker coordinates, with index sets as labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCertificate {
    pub terms: Vec<(Vec<i32>, Vec<i32>, i32)>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    PluckerRelation(RelationCertificate),
    Isotropy { i: usize, j: usize, pairing: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub v: Vec<String>,
    pub stage: WitnessStage,
    pub candidate_index: usize,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSearch {
    pub found: bool,
    pub candidates_tried: usize,
    pub witness: Option<Witness>,
}

pub fn labels_of(space: &QuadraticSpace, set: IndexSet) -> Vec<i32> {
    set.positions().map(|p| space.labels()[p].0).collect()
}

/// The first shuffle relation `ω` violates, with its value, if `ω ∉ Ĝr(k, V)`.
pub fn relation_certificate(space: &QuadraticSpace, omega: &MultiVector) -> Option<RelationCertificate> {
    let (rel, value) = cones::violated_relation(omega)?;
    Some(RelationCertificate {
        terms: rel
            .terms
            .iter()
            .map(|(a, b, s)| (labels_of(space, *a), labels_of(space, *b), *s))
            .collect(),
        value: value.to_string(),
    })
}

fn certify(space: &QuadraticSpace, image: &MultiVector, failure: ConeFailure) -> Certificate {
    match failure {
        ConeFailure::NotIsotropic { i, j, pairing } => Certificate::Isotropy { i, j, pairing },
        ConeFailure::NotDecomposable => Certificate::PluckerRelation(
            relation_certificate(space, image).expect("non-decomposable forms violate a relation"),
        ),
    }
}

/// Tests one candidate; returns the failure if `Φ_v(ω)` leaves the isotropic cone.
pub fn test_candidate(
    space: &QuadraticSpace,
    v: &[Rational],
    omega: &MultiVector,
) -> Result<Option<(QuotientSpace, MultiVector, ConeFailure)>> {
    let q = QuotientSpace::new(space, v)?;
    let image = q.phi(omega)?;
    Ok(match cones::isotropic_cone_check(q.induced(), &image) {
        Ok(()) => None,
        Err(f) => Some((q, image, f)),
    })
}

/// Searches for an isotropic `v` with `Φ_v(ω) ∉ Ĝr_iso(p-1, V_v)`: structured
/// vectors, then vectors adapted to `ω`, then `budget` random isotropic vectors.
pub fn find_witness<R: Rng + ?Sized>(
    space: &QuadraticSpace,
    omega: &MultiVector,
    budget: usize,
    rng: &mut R,
) -> Result<WitnessSearch> {
    if space.dim() < 5 {
        return Err(Error::Precondition("witness search needs dim V >= 5".into()));
    }
    if omega.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: omega.dim(),
        });
    }
    if omega.grade() != space.witt() {
        return Err(Error::Precondition(format!(
            "expected a form of grade {}, got {}",
            space.witt(),
            omega.grade()
        )));
    }
    let mut tried = 0;
    let hit = |v: &[Rational], stage, tried: usize| -> Result<Option<Witness>> {
        Ok(test_candidate(space, v, omega)?.map(|(q, image, f)| Witness {
            v: v.iter().map(|x| x.to_string()).collect(),
            stage,
            candidate_index: tried,
            certificate: certify(q.induced(), &image, f),
        }))
    };
    let stages = [
        (WitnessStage::Structured, structured_candidates(space)),
        (WitnessStage::Adapted, adapted_candidates(space, omega)?),
    ];
    for (stage, candidates) in stages {
        for v in candidates {
            tried += 1;
            if let Some(w) = hit(&v, stage, tried)? {
                return Ok(WitnessSearch {
                    found: true,
                    candidates_tried: tried,
                    witness: Some(w),
                });
            }
        }
    }
    for _ in 0..budget {
        let v = space.random_isotropic_vector(rng)?;
        tried += 1;
        if let Some(w) = hit(&v, WitnessStage::Random, tried)? {
            return Ok(WitnessSearch {
                found: true,
                candidates_tried: tried,
                witness: Some(w),
            });
        }
    }
    Ok(WitnessSearch {
        found: false,
        candidates_tried: tried,
        witness: None,
    })
}

/// Deterministic per-trial generator derived from `(seed, stream)`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonConeKind {
    /// A few random basis blades.
    Sparse,
    /// An isotropic frame plus one extra basis blade.
    PerturbedFrame,
    /// A wedge of random vectors spanning a non-isotropic subspace.
    NonIsotropicWedge,
}

/// Random grade-`p` form outside `Ĝr_iso(p, V)`.
pub fn random_non_cone<R: Rng + ?Sized>(
    space: &QuadraticSpace,
    kind: NonConeKind,
    rng: &mut R,
) -> Result<MultiVector> {
    let (n, p) = (space.dim(), space.witt());
    for _ in 0..1000 {
        let omega = match kind {
            NonConeKind::Sparse => {
                let terms = rng.gen_range(2..=6);
                cones::random_sparse_form(n, p, terms, rng)
            }
            NonConeKind::PerturbedFrame => {
                let frame = cones::random_isotropic_frame(space, p, rng)?;
                let sets = IndexSet::subsets(n, p);
                let set = sets[rng.gen_range(0..sets.len())];
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                let mut omega = frame;
                omega.add_term(set, rat(sign));
                omega
            }
            NonConeKind::NonIsotropicWedge => {
                let vs: Vec<Vec<Rational>> = (0..p)
                    .map(|_| (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect())
                    .collect();
                MultiVector::wedge_vectors(n, &vs)
            }
        };
        if !omega.is_zero() && !cones::in_isotropic_cone(space, &omega) {
            return Ok(omega);
        }
    }
    Err(Error::Exhausted(format!("no {kind:?} form outside the cone")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonConeTrial {
    pub trial: usize,
    pub kind: NonConeKind,
    pub witness_found: bool,
    pub stage: Option<WitnessStage>,
    pub candidates_tried: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameTrial {
    pub trial: usize,
    pub witness_found: bool,
    pub candidates_tried: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainTheoremReport {
    pub dim: usize,
    pub trials: usize,
    pub budget: usize,
    pub seed: u64,
    pub witnesses_found: usize,
    pub structured_hits: usize,
    pub adapted_hits: usize,
    pub random_hits: usize,
    pub frames_preserved: usize,
    pub non_cone: Vec<NonConeTrial>,
    pub frames: Vec<FrameTrial>,
}

impl MainTheoremReport {
    pub fn all_confirmed(&self) -> bool {
        self.witnesses_found == self.trials && self.frames_preserved == self.trials
    }
}

/// Empirical check of the main theorem in `std:dim` for `dim > 8`.
pub fn verify_main_theorem(dim: usize, trials: usize, budget: usize, seed: u64) -> Result<MainTheoremReport> {
    if dim <= 8 {
        return Err(Error::Precondition(format!(
            "the main theorem needs dim V > 8 (got {dim}); dimensions 7 and 8 have counterexamples"
        )));
    }
    let space = QuadraticSpace::standard(dim);
    let p = space.witt();
    let kinds = [
        NonConeKind::Sparse,
        NonConeKind::PerturbedFrame,
        NonConeKind::NonIsotropicWedge,
    ];
    let non_cone: Vec<NonConeTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, 2 * t as u64);
            let kind = kinds[t % kinds.len()];
            let omega = random_non_cone(&space, kind, &mut rng)?;
            let search = find_witness(&space, &omega, budget, &mut rng)?;
            Ok(NonConeTrial {
                trial: t,
                kind,
                witness_found: search.found,
                stage: search.witness.map(|w| w.stage),
                candidates_tried: search.candidates_tried,
            })
        })
        .collect::<Result<_>>()?;
    let frames: Vec<FrameTrial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, 2 * t as u64 + 1);
            let omega = cones::random_isotropic_frame(&space, p, &mut rng)?;
            let search = find_witness(&space, &omega, budget, &mut rng)?;
            Ok(FrameTrial {
                trial: t,
                witness_found: search.found,
                candidates_tried: search.candidates_tried,
            })
        })
        .collect::<Result<_>>()?;
    let count = |stage| non_cone.iter().filter(|t| t.stage == Some(stage)).count();
    Ok(MainTheoremReport {
        dim,
        trials,
        budget,
        seed,
        witnesses_found: non_cone.iter().filter(|t| t.witness_found).count(),
        structured_hits: count(WitnessStage::Structured),
        adapted_hits: count(WitnessStage::Adapted),
        random_hits: count(WitnessStage::Random),
        frames_preserved: frames.iter().filter(|t| !t.witness_found).count(),
        non_cone,
        frames,
    })
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub space: QuadraticSpace,
    pub omega: MultiVector,
    /// The vectors used, each in the coordinates of the space it was applied in.
    pub chain: Vec<Vec<Rational>>,
}

/// Applies `Φ_v` with nonzero results until the ambient dimension is 7 or 8.
pub fn reduce_to_base<R: Rng + ?Sized>(
    space: &QuadraticSpace,
    omega: &MultiVector,
    budget: usize,
    rng: &mut R,
) -> Result<Reduction> {
    if space.dim() <= 8 {
        return Err(Error::Precondition(format!(
            "reduction needs dim V > 8 (got {})",
            space.dim()
        )));
    }
    let mut cur = Reduction {
        space: space.clone(),
        omega: omega.clone(),
        chain: Vec::new(),
    };
    if omega.is_zero() {
        return Ok(cur);
    }
    while cur.space.dim() > 8 {
        let mut next = None;
        let random = (0..budget)
            .map(|_| cur.space.random_isotropic_vector(rng))
            .collect::<Result<Vec<_>>>()?;
        for v in random.into_iter().chain(structured_candidates(&cur.space)) {
            let q = QuotientSpace::new(&cur.space, &v)?;
            let image = q.phi(&cur.omega)?;
            if !image.is_zero() {
                next = Some((q, image, v));
                break;
            }
        }
        let (q, image, v) = next.ok_or_else(|| {
            Error::Exhausted(format!(
                "every sampled Φ_v vanished in dimension {}",
                cur.space.dim()
            ))
        })?;
        cur.chain.push(v);
        cur.space = q.induced().clone();
        cur.omega = image;
    }
    Ok(cur)
}

/// `ω ↦ ω ∧ e_{p+1}` into the standard space of dimension `n + 2`.
pub fn pad(space: &QuadraticSpace, omega: &MultiVector) -> Result<(QuadraticSpace, MultiVector)> {
    let n = space.dim();
    if !space.is_hyperbolic() || space.labels() != hyperbolic_labels(n).as_slice() {
        return Err(Error::NotHyperbolic);
    }
    let bigger = QuadraticSpace::hyperbolic(hyperbolic_labels(n + 2), space.c0().cloned())?;
    let columns: Vec<Vec<(usize, Rational)>> = space
        .labels()
        .iter()
        .map(|l| vec![(bigger.position(*l).expect("label survives"), Rational::one())])
        .collect();
    let embedded = omega.apply_columns(n + 2, &columns);
    let new_pos = bigger
        .position(Label(space.witt() as i32 + 1))
        .expect("new pair");
    let padded = embedded.wedge(&MultiVector::blade(n + 2, &[new_pos]))?;
    Ok((bigger, padded))
}

/// A wedge `v ∧ v₂ ∧ ⋯ ∧ v_k` with `v` isotropic and every `v_i ∈ v⊥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicGenerator {
    pub v: Vec<Rational>,
    pub rest: Vec<Vec<Rational>>,
}

impl IsotropicGenerator {
    pub fn is_valid(&self, space: &QuadraticSpace) -> bool {
        !linalg::is_zero_vec(&self.v)
            && space.is_isotropic(&self.v)
            && self.rest.iter().all(|x| space.bilinear(&self.v, x).is_zero())
    }

    pub fn wedge(&self) -> MultiVector {
        let mut vectors = vec![self.v.clone()];
        vectors.extend(self.rest.iter().cloned());
        MultiVector::wedge_vectors(self.v.len(), &vectors)
    }
}

/// Explicit generators whose wedges span `⋀^k V` for `0 < k < dim V`.
///
/// A basis blade with an unpaired label `±j` is itself a generator with `v = e_{±j}`.
/// A blade made of whole pairs `e_{j₁} ∧ e_{-j₁} ∧ η` is reached through
/// `(e_{j₀} + e_{j₁}) ∧ (e_{-j₀} - e_{-j₁}) ∧ η` and `(e_{j₀} + e_{-j₁}) ∧ (e_{-j₀} - e_{j₁}) ∧ η`
/// for a free pair `j₀`, and when every pair is used (odd dimension) through
/// `(e₀ + e_{j₁} - c₀e_{-j₁}) ∧ (e_{j₁} + c₀e_{-j₁}) ∧ η`.
pub fn isotropic_generators(space: &QuadraticSpace, k: usize) -> Result<Vec<IsotropicGenerator>> {
    let n = space.dim();
    if !space.is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!("need 0 < k < {n}, got k = {k}")));
    }
    let e = |pos: usize| linalg::unit(n, pos);
    let combo = |terms: &[(usize, Rational)]| {
        let mut v = linalg::zeros(n);
        for (pos, c) in terms {
            v[*pos] += c;
        }
        v
    };
    let one = Rational::one;
    let mut out = Vec::new();
    for set in IndexSet::subsets(n, k) {
        let positions: Vec<usize> = set.positions().collect();
        let unpaired = positions
            .iter()
            .copied()
            .find(|&a| space.labels()[a].0 != 0 && !set.contains(space.partner(a)));
        if let Some(a) = unpaired {
            out.push(IsotropicGenerator {
                v: e(a),
                rest: positions.iter().filter(|&&b| b != a).map(|&b| e(b)).collect(),
            });
            continue;
        }
        let Some(j1) = positions.iter().copied().find(|&a| space.labels()[a].0 > 0) else {
            // The blade `e₀`, reached through `e₀ + e₁ - c₀e_{-1}` and its pure parts.
            let (j, m) = space.pairs()[0];
            let c0 = space.c0().expect("odd hyperbolic space has c0").clone();
            out.push(IsotropicGenerator {
                v: combo(&[(positions[0], one()), (j, one()), (m, -c0)]),
                rest: Vec::new(),
            });
            continue;
        };
        let m1 = space.partner(j1);
        let eta: Vec<Vec<Rational>> = positions
            .iter()
            .filter(|&&b| b != j1 && b != m1)
            .map(|&b| e(b))
            .collect();
        let free = space
            .pairs()
            .into_iter()
            .find(|&(pos, _)| !set.contains(pos));
        let with_eta = |first: Vec<Rational>| {
            let mut rest = vec![first];
            rest.extend(eta.iter().cloned());
            rest
        };
        match free {
            Some((j0, m0)) => {
                out.push(IsotropicGenerator {
                    v: combo(&[(j0, one()), (j1, one())]),
                    rest: with_eta(combo(&[(m0, one()), (m1, -one())])),
                });
                out.push(IsotropicGenerator {
                    v: combo(&[(j0, one()), (m1, one())]),
                    rest: with_eta(combo(&[(m0, one()), (j1, -one())])),
                });
            }
            None => {
                let z = space.zero_position().expect("odd dimension when every pair is used");
                let c0 = space.c0().expect("odd hyperbolic space has c0").clone();
                out.push(IsotropicGenerator {
                    v: combo(&[(z, one()), (j1, one()), (m1, -c0.clone())]),
                    rest: with_eta(combo(&[(j1, one()), (m1, c0)])),
                });
            }
        }
    }
    Ok(out)
}
