use isograss::cones;
use isograss::exterior::{Covector, IndexSet, MultiVector};
use isograss::igcp::{self, decompose, trial_rng, QuotientSpace};
use isograss::io::{self, LabelKind};
use isograss::linalg::{self, rat};
use isograss::{QuadraticSpace, Rational, Subspace};
use proptest::prelude::*;
use rand::Rng;

fn form(n: usize, k: usize) -> impl Strategy<Value = MultiVector> {
    let sets = IndexSet::subsets(n, k);
    let count = sets.len();
    prop::collection::vec((0..count, -6i64..=6), 0..6).prop_map(move |terms| {
        let mut omega = MultiVector::zero(n, k);
        for (i, c) in terms {
            omega.add_term(sets[i], rat(c));
        }
        omega
    })
}

fn covector(n: usize) -> impl Strategy<Value = Covector> {
    prop::collection::vec(-5i64..=5, n).prop_map(|v| Covector::new(v.into_iter().map(rat).collect()))
}

/// Dimension plus two forms of the given grades.
fn pair(i: usize, j: usize) -> impl Strategy<Value = (MultiVector, MultiVector)> {
    (i + j..=8usize).prop_flat_map(move |n| (form(n, i), form(n, j)))
}

fn sign(odd: bool) -> Rational {
    if odd {
        rat(-1)
    } else {
        rat(1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wedge_is_graded_commutative(i in 1usize..4, j in 1usize..4, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let n = 8;
        let a = cones::random_sparse_form(n, i, 3, &mut rng);
        let b = cones::random_sparse_form(n, j, 3, &mut rng);
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&sign(i * j % 2 == 1)));
    }

    #[test]
    fn wedge_is_associative(seed in any::<u64>(), i in 1usize..3, j in 1usize..3, k in 1usize..3) {
        let mut rng = trial_rng(seed, 0);
        let n = 7;
        let a = cones::random_sparse_form(n, i, 3, &mut rng);
        let b = cones::random_sparse_form(n, j, 3, &mut rng);
        let c = cones::random_sparse_form(n, k, 3, &mut rng);
        prop_assert_eq!(
            a.wedge(&b).unwrap().wedge(&c).unwrap(),
            a.wedge(&b.wedge(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn wedge_distributes((a, b, c) in (4usize..=8).prop_flat_map(|n| (form(n, 2), form(n, 2), form(n, 1)))) {
        prop_assert_eq!((&a + &b).wedge(&c).unwrap(), &a.wedge(&c).unwrap() + &b.wedge(&c).unwrap());
    }

    #[test]
    fn contraction_is_an_anti_derivation((a, b) in pair(2, 3), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let beta = Covector::new((0..a.dim()).map(|_| rat(rng.gen_range(-4..=4))).collect());
        let lhs = a.wedge(&b).unwrap().contract(&beta).unwrap();
        let rhs = &a.contract(&beta).unwrap().wedge(&b).unwrap()
            + &a.wedge(&b.contract(&beta).unwrap()).unwrap().scale(&sign(a.grade() % 2 == 1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_squares_to_zero(omega in form(7, 3), beta in covector(7)) {
        prop_assert!(omega.contract(&beta).unwrap().contract(&beta).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip(omega in form(6, 3), hyperbolic in any::<bool>()) {
        let kind = if hyperbolic { LabelKind::Hyperbolic } else { LabelKind::Plain };
        let text = io::multivector_to_json(&omega, kind);
        prop_assert_eq!(io::parse_multivector(&text).unwrap(), omega);
    }

    #[test]
    fn decompose_reassembles(omega in (5usize..=9).prop_flat_map(|n| form(n, 3))) {
        let space = QuadraticSpace::standard(omega.dim());
        prop_assert_eq!(decompose(&space, &omega).unwrap().reassemble(), omega);
    }

    #[test]
    fn wedges_of_vectors_are_decomposable(vs in prop::collection::vec(prop::collection::vec(-3i64..=3, 7), 1..5)) {
        let vs: Vec<Vec<Rational>> = vs.into_iter().map(|v| v.into_iter().map(rat).collect()).collect();
        let omega = MultiVector::wedge_vectors(7, &vs);
        prop_assert!(cones::in_grassmann_cone(&omega));
        if !omega.is_zero() {
            prop_assert_eq!(cones::extract_subspace(&omega).unwrap(), Subspace::from_vectors(7, &vs));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rule_lemma(seed in any::<u64>(), n in 6usize..=9, in_l in any::<bool>()) {
        let mut rng = trial_rng(seed, 0);
        let space = QuadraticSpace::standard(n);
        let k = rng.gen_range(2..=space.witt());
        let basis = cones::random_isotropic_basis(&space, k, &mut rng).unwrap();
        let omega = MultiVector::wedge_vectors(n, &basis);
        let v = if in_l {
            let mut v = basis[0].clone();
            for b in &basis[1..] {
                linalg::axpy(&mut v, &rat(rng.gen_range(-2..=2)), b);
            }
            v
        } else {
            space.random_isotropic_vector(&mut rng).unwrap()
        };
        let q = QuotientSpace::new(&space, &v).unwrap();
        let image = q.phi(&omega).unwrap();
        let perp = basis.iter().all(|b| space.bilinear(&v, b) == rat(0));
        prop_assert_eq!(image.is_zero(), perp);
        if !perp {
            let v_perp = space.orthogonal_complement(&Subspace::from_vectors(n, std::slice::from_ref(&v)));
            let meet = Subspace::from_vectors(n, &basis).intersection(&v_perp);
            let coords: Vec<_> = meet.basis().iter().map(|x| q.coords(x)).collect();
            prop_assert_eq!(cones::extract_subspace(&image).unwrap(), Subspace::from_vectors(n - 2, &coords));
        }
    }

    #[test]
    fn phi_preserves_isotropic_cone(seed in any::<u64>(), n in 5usize..=10) {
        let mut rng = trial_rng(seed, 0);
        let space = QuadraticSpace::standard(n);
        let k = rng.gen_range(1..=space.witt());
        let omega = cones::random_isotropic_frame(&space, k, &mut rng).unwrap();
        let v = space.random_isotropic_vector(&mut rng).unwrap();
        let q = QuotientSpace::new(&space, &v).unwrap();
        let image = q.phi(&omega).unwrap();
        prop_assert!(cones::in_isotropic_cone(q.induced(), &image));
    }

    #[test]
    fn phi_is_linear(a in form(7, 3), b in form(7, 3), seed in any::<u64>()) {
        let space = QuadraticSpace::j7();
        let v = space.random_isotropic_vector(&mut trial_rng(seed, 0)).unwrap();
        let q = QuotientSpace::new(&space, &v).unwrap();
        let two = rat(2);
        prop_assert_eq!(
            q.phi(&(&a + &b.scale(&two))).unwrap(),
            &q.phi(&a).unwrap() + &q.phi(&b).unwrap().scale(&two)
        );
    }

    #[test]
    fn some_structured_vector_sees_a_nonzero_form(omega in (5usize..=9).prop_flat_map(|n| (1..n).prop_flat_map(move |k| form(n, k)))) {
        prop_assume!(!omega.is_zero());
        let space = QuadraticSpace::standard(omega.dim());
        let seen = igcp::structured_candidates(&space)
            .iter()
            .any(|v| !igcp::phi_v(&space, v, &omega).unwrap().is_zero());
        prop_assert!(seen);
    }

    #[test]
    fn quotient_is_nondegenerate(seed in any::<u64>(), n in 5usize..=11) {
        let space = QuadraticSpace::standard(n);
        let v = space.random_isotropic_vector(&mut trial_rng(seed, 0)).unwrap();
        let q = QuotientSpace::new(&space, &v).unwrap();
        prop_assert_eq!(q.induced().dim(), n - 2);
        for r in q.rep_basis() {
            prop_assert_eq!(space.bilinear(r, &v), rat(0));
            prop_assert_eq!(space.bilinear(r, q.partner()), rat(0));
        }
        let gram: Vec<Vec<Rational>> = q.rep_basis().iter()
            .map(|r| q.rep_basis().iter().map(|s| space.bilinear(r, s)).collect())
            .collect();
        prop_assert_eq!(gram.as_slice(), q.induced().gram());
        prop_assert_ne!(linalg::determinant(&gram), rat(0));
    }
}