//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use isograss::cones::{self, plucker_relations};
use isograss::counterexamples::{self, check_counterexample, lagrangian_counterexample, omega7, omega8};
use isograss::exterior::{hyperbolic_labels, Covector, IndexSet, MultiVector};
use isograss::ideal_lab::{quadric_rank, run_rank4_pipeline, PipelineReport, Quadric, Variety};
use isograss::igcp::{self, classify, decompose, isotropic_generators, phi_v, trial_rng, MainTheoremReport, QuotientSpace};
use isograss::linalg::{self, rat};
use isograss::{QuadraticSpace, Rational, Subspace};
use num_traits::Zero;
use rand::Rng;

const SEED: u64 = 20240901;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: usize, title: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("{d}; over the {} s limit", limit.as_secs())),
        Err(e) => (false, e),
    };
    println!(
        "criterion {id:>2} {} {title} [{:.1} s]: {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn json<T: serde::Serialize + ?Sized>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("reports serialize")
}

fn klein() -> Check {
    let rels = plucker_relations(2, 4);
    ensure(rels.len() == 1, || format!("{} relations", rels.len()))?;
    let rel = &rels[0];
    let set = |a: usize, b: usize| IndexSet::from_positions([a, b]).unwrap();
    let normalize = |flip: i32| -> BTreeSet<(IndexSet, IndexSet, i32)> {
        rel.terms
            .iter()
            .map(|&(a, b, s)| (a.min(b), a.max(b), s * flip))
            .collect()
    };
    let expected: BTreeSet<_> = [
        (set(0, 1), set(2, 3), 1),
        (set(0, 2), set(1, 3), -1),
        (set(0, 3), set(1, 2), 1),
    ]
    .into_iter()
    .collect();
    ensure(normalize(1) == expected || normalize(-1) == expected, || {
        format!("unexpected terms {:?}", rel.terms)
    })?;
    let rank = quadric_rank(&Quadric::from_relation(rel));
    ensure(rank == 6, || format!("rank {rank}"))?;
    Ok("x12 x34 - x13 x24 + x14 x23, rank 6".into())
}

fn counterexample_check(which: u8, v_label: i32, expected_image: (&[usize], i64), dims: (usize, usize, usize)) -> Result<(String, String), String> {
    let (space, omega, _) = counterexamples::counterexample(which).map_err(|e| e.to_string())?;
    let omega_ok = omega == if which == 7 { omega7() } else { omega8() };
    ensure(omega_ok, || "form mismatch".into())?;
    let mut v = linalg::zeros(space.dim());
    v[space.position(isograss::Label(v_label)).unwrap()] = rat(1);
    let image = phi_v(&space, &v, &omega).map_err(|e| e.to_string())?;
    let target = MultiVector::blade(space.dim() - 2, expected_image.0).scale(&rat(expected_image.1));
    ensure(image == target, || format!("Φ image {image:?}"))?;
    let report = check_counterexample(which, 10_000, SEED).map_err(|e| e.to_string())?;
    ensure(!report.in_grassmann, || "form is decomposable".into())?;
    ensure(report.all_images_isotropic, || "some image leaves the isotropic cone".into())?;
    ensure(report.igcp_images_checked >= 10_000, || "too few images".into())?;
    let got = (report.dim_g, report.dim_stab_v0, report.orbit_dim);
    ensure(got == dims, || format!("Lie dims {got:?}"))?;
    Ok((
        format!(
            "not decomposable, exact image, {} images isotropic, Lie dims {:?}",
            report.igcp_images_checked, got
        ),
        json(&report),
    ))
}

fn main_theorem(dim: usize) -> Result<(String, MainTheoremReport), String> {
    let r = igcp::verify_main_theorem(dim, 100, 200, SEED).map_err(|e| e.to_string())?;
    let misses: Vec<usize> = r.non_cone.iter().filter(|t| !t.witness_found).map(|t| t.trial).collect();
    let leaks: Vec<usize> = r.frames.iter().filter(|t| t.witness_found).map(|t| t.trial).collect();
    let line = format!(
        "dim {dim}: witnesses {}/100 (misses {misses:?}), frames preserved {}/100 (leaks {leaks:?})",
        r.witnesses_found, r.frames_preserved
    );
    ensure(misses.is_empty() && leaks.is_empty(), || line.clone())?;
    Ok((line, r))
}

/// The positions of `V′ = span{e_i : i ≠ ±p}` inside `V`.
fn v_prime(space: &QuadraticSpace) -> (QuadraticSpace, Vec<usize>) {
    let n = space.dim();
    let sub = QuadraticSpace::hyperbolic(hyperbolic_labels(n - 2), space.c0().cloned()).unwrap();
    let positions = sub.labels().iter().map(|l| space.position(*l).unwrap()).collect();
    (sub, positions)
}

fn embed(n: usize, positions: &[usize], x: &[Rational]) -> Vec<Rational> {
    let mut out = linalg::zeros(n);
    for (&p, c) in positions.iter().zip(x) {
        out[p] = c.clone();
    }
    out
}

fn small_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<Rational> {
    (0..n).map(|_| rat(rng.gen_range(-4..=4))).collect()
}

/// Random isotropic frames sorted by how `L` meets `V′`, each with its expected case.
fn cases_suite(space: &QuadraticSpace, per_type: usize, rng: &mut impl Rng) -> Result<String, String> {
    let n = space.dim();
    let p = space.witt();
    let odd = n % 2 == 1;
    let (sub, pos) = v_prime(space);
    let (ep, emp) = space.last_pair().unwrap();
    let v_prime_space = Subspace::from_vectors(n, &pos.iter().map(|&b| linalg::unit(n, b)).collect::<Vec<_>>());
    let mut counts = [0usize; 5];
    let types: &[u8] = if odd { &[1, 2, 3, 4] } else { &[1, 2, 4] };
    for &ty in types {
        for _ in 0..per_type {
            let basis = if ty == 4 {
                loop {
                    let basis = cones::random_isotropic_basis(space, p, rng).map_err(|e| e.to_string())?;
                    let l = Subspace::from_vectors(n, &basis);
                    if l.intersection(&v_prime_space).dim() == p - 2 {
                        break basis;
                    }
                }
            } else {
                let lp: Vec<Vec<Rational>> = cones::random_isotropic_basis(&sub, p - 1, rng)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(|x| embed(n, &pos, x))
                    .collect();
                let lambda = rat(rng.gen_range(1..=4));
                let mut x = match ty {
                    1 | 2 => {
                        let mut x = linalg::zeros(n);
                        for b in &lp {
                            linalg::axpy(&mut x, &rat(rng.gen_range(-3..=3)), b);
                        }
                        x
                    }
                    _ => {
                        // An anisotropic vector of `L′⊥ ∩ V′`.
                        let perp = space
                            .orthogonal_complement(&Subspace::from_vectors(n, &lp))
                            .intersection(&v_prime_space);
                        loop {
                            let mut x = linalg::zeros(n);
                            for b in perp.basis() {
                                linalg::axpy(&mut x, &rat(rng.gen_range(-3..=3)), b);
                            }
                            if !space.norm(&x).is_zero() {
                                break x;
                            }
                        }
                    }
                };
                match ty {
                    1 => x[ep] = lambda,
                    2 => x[emp] = lambda,
                    _ => {
                        let mu = -space.norm(&x) / (&lambda + &lambda);
                        x[ep] = lambda;
                        x[emp] = mu;
                    }
                }
                let mut basis = lp;
                basis.push(x);
                basis
            };
            let omega = MultiVector::wedge_vectors(n, &basis).scale(&rat(rng.gen_range(1..=5)));
            ensure(cones::in_isotropic_cone(space, &omega), || format!("type {ty} sample left the cone"))?;
            let report = classify(space, &omega).map_err(|e| e.to_string())?;
            let case = report.case_id.ok_or_else(|| format!("type {ty}: no case, {:?}", report.checked_conditions))?;
            ensure(report.checked_conditions.iter().all(|(_, b)| *b), || format!("{:?}", report.checked_conditions))?;
            ensure(case == ty, || format!("type {ty} classified as case {case}"))?;
            ensure(odd || case != 3, || "case 3 in even dimension".into())?;
            counts[case as usize] += 1;
        }
    }
    Ok(format!("dim {n}: cases {:?}", &counts[1..]))
}

fn cases() -> Check {
    let mut rng = trial_rng(SEED, 5);
    let even = cases_suite(&QuadraticSpace::standard(8), 500, &mut rng)?;
    let odd = cases_suite(&QuadraticSpace::standard(9), 500, &mut rng)?;
    Ok(format!("{even}; {odd}"))
}

fn rule_lemma(rng: &mut impl Rng) -> Result<String, String> {
    let (mut zero, mut nonzero) = (0, 0);
    for t in 0..500 {
        let n = 7 + t % 4;
        let space = QuadraticSpace::standard(n);
        let k = 2 + t % (space.witt() - 1);
        let basis = cones::random_isotropic_basis(&space, k, rng).map_err(|e| e.to_string())?;
        let omega = MultiVector::wedge_vectors(n, &basis);
        let l = Subspace::from_vectors(n, &basis);
        let v = if t % 2 == 0 {
            let mut v = linalg::zeros(n);
            while linalg::is_zero_vec(&v) {
                for b in &basis {
                    linalg::axpy(&mut v, &rat(rng.gen_range(-3..=3)), b);
                }
            }
            v
        } else {
            space.random_isotropic_vector(rng).map_err(|e| e.to_string())?
        };
        let q = QuotientSpace::new(&space, &v).map_err(|e| e.to_string())?;
        let image = q.phi(&omega).map_err(|e| e.to_string())?;
        let in_perp = basis.iter().all(|b| space.bilinear(&v, b).is_zero());
        if in_perp {
            ensure(image.is_zero(), || format!("trial {t}: v ∈ L⊥ but Φ_v(ω) ≠ 0"))?;
            zero += 1;
        } else {
            ensure(!image.is_zero(), || format!("trial {t}: v ∉ L⊥ but Φ_v(ω) = 0"))?;
            let v_perp = space.orthogonal_complement(&Subspace::from_vectors(n, std::slice::from_ref(&v)));
            let meet = l.intersection(&v_perp);
            let expected = Subspace::from_vectors(n - 2, &meet.basis().iter().map(|x| q.coords(x)).collect::<Vec<_>>());
            let got = cones::extract_subspace(&image).map_err(|e| e.to_string())?;
            ensure(got == expected, || format!("trial {t}: L of the image is not (L ∩ v⊥)/⟨v⟩"))?;
            nonzero += 1;
        }
    }
    ensure(zero > 0 && nonzero > 0, || "a branch was never exercised".into())?;
    Ok(format!("rule lemma {zero} zero / {nonzero} nonzero"))
}

fn decomposition(rng: &mut impl Rng) -> Result<String, String> {
    for t in 0..500 {
        let space = QuadraticSpace::standard(7 + t % 4);
        let omega = cones::random_sparse_form(space.dim(), space.witt(), 1 + t % 8, rng);
        let d = decompose(&space, &omega).map_err(|e| e.to_string())?;
        ensure(d.reassemble() == omega, || format!("trial {t}: reassembly differs"))?;
    }
    Ok("reassembly 500/500".into())
}

fn wprime(rng: &mut impl Rng) -> Result<String, String> {
    for t in 0..200 {
        let space = QuadraticSpace::standard(9 + t % 2);
        let n = space.dim();
        let k = 3 + t % (space.witt() - 2);
        let omega = cones::random_sparse_form(n, k, 2 + t % 6, rng);
        let (sub, pos) = v_prime(&space);
        let v = embed(n, &pos, &sub.random_isotropic_vector(rng).map_err(|e| e.to_string())?);
        let q = QuotientSpace::new(&space, &v).map_err(|e| e.to_string())?;
        let d = decompose(&space, &omega).map_err(|e| e.to_string())?;
        let dp = decompose(q.induced(), &q.phi(&omega).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for (i, (part, image_part)) in d.parts().iter().zip(dp.parts()).enumerate() {
            let mapped = q.phi(part).map_err(|e| e.to_string())?;
            ensure(&mapped == image_part, || format!("trial {t}: part {} differs", i + 1))?;
        }
    }
    Ok("Φ_v commutes with the decomposition 200/200".into())
}

fn anti_derivation(rng: &mut impl Rng) -> Result<String, String> {
    for t in 0..300 {
        let n = 5 + t % 6;
        let (i, j) = (1 + t % 3, 1 + (t / 3) % 3);
        let a = cones::random_sparse_form(n, i, 1 + t % 5, rng);
        let b = cones::random_sparse_form(n, j, 1 + t % 4, rng);
        let beta = Covector::new(small_vector(n, rng));
        let lhs = a.wedge(&b).unwrap().contract(&beta).unwrap();
        let first = a.contract(&beta).unwrap().wedge(&b).unwrap();
        let second = a.wedge(&b.contract(&beta).unwrap()).unwrap();
        let sign = if i % 2 == 0 { rat(1) } else { rat(-1) };
        let rhs = &first + &second.scale(&sign);
        ensure(lhs == rhs, || format!("trial {t}: anti-derivation fails"))?;
    }
    Ok("anti-derivation 300/300".into())
}

fn spanning() -> Result<String, String> {
    let mut ranks = Vec::new();
    for (k, n) in [(2, 5), (3, 6), (3, 7), (4, 8), (4, 9)] {
        let space = QuadraticSpace::standard(n);
        let gens = isotropic_generators(&space, k).map_err(|e| e.to_string())?;
        ensure(gens.iter().all(|g| g.is_valid(&space)), || format!("({k},{n}): invalid generator"))?;
        let basis = IndexSet::subsets(n, k);
        let rows: Vec<Vec<Rational>> = gens.iter().map(|g| g.wedge().to_dense(&basis)).collect();
        let r = linalg::rank(&rows);
        ensure(r == basis.len(), || format!("({k},{n}): rank {r} of {}", basis.len()))?;
        ranks.push(r);
    }
    Ok(format!("spanning ranks {ranks:?}"))
}

fn lemmas() -> Check {
    let mut rng = trial_rng(SEED, 6);
    Ok([
        rule_lemma(&mut rng)?,
        decomposition(&mut rng)?,
        wprime(&mut rng)?,
        anti_derivation(&mut rng)?,
        spanning()?,
    ]
    .join(", "))
}

fn lagrangian() -> Result<(String, String), String> {
    let (_, r) = lagrangian_counterexample(2, 1000, SEED).map_err(|e| e.to_string())?;
    ensure(r.wedge_square_nonzero, || "ω∧ω = 0".into())?;
    ensure(r.all_images_zero, || "some Φ_v(ω) ≠ 0".into())?;
    ensure(r.images_checked >= 1000 + r.dim, || format!("{} images", r.images_checked))?;
    Ok((
        format!("ω∧ω = {} · top, {} images all zero", r.top_coefficient, r.images_checked),
        json(&r),
    ))
}

fn pipeline(variety: Variety, listed: usize) -> Result<(String, String), String> {
    let (_, r): (_, PipelineReport) = run_rank4_pipeline(variety, SEED).map_err(|e| e.to_string())?;
    ensure(r.listed.len() == listed, || format!("{} listed quadrics", r.listed.len()))?;
    let missing: Vec<usize> = r.listed.iter().filter(|c| !c.in_i2).map(|c| c.index).collect();
    ensure(missing.is_empty(), || format!("listed quadrics {missing:?} not in I2"))?;
    let ranks: Vec<usize> = r.generators.iter().map(|g| g.rank).collect();
    ensure(ranks.iter().all(|&x| x <= 4), || format!("generator ranks {ranks:?}"))?;
    ensure(r.closure_dim == r.i2_dim, || format!("closure {} of {}", r.closure_dim, r.i2_dim))?;
    ensure(r.certified, || "not certified".into())?;
    if variety == Variety::Iso48Component {
        ensure(r.linear_dim > 0, || "no linear part".into())?;
    }
    Ok((
        format!(
            "linear {}, dim I2 {}, generator ranks {ranks:?}, closure {}, {listed} listed in I2",
            r.linear_dim, r.i2_dim, r.closure_dim
        ),
        json(&r),
    ))
}

/// Reruns everything randomized and compares JSON byte for byte. The main-theorem
/// runs are repeated on a 10-trial prefix, which uses the same per-trial streams.
fn determinism(reports: &[(String, String)], theorem: &[MainTheoremReport]) -> Check {
    let mut compared = 0;
    for (name, first) in reports {
        let again = match name.as_str() {
            "omega7" => json(&check_counterexample(7, 10_000, SEED).map_err(|e| e.to_string())?),
            "omega8" => json(&check_counterexample(8, 10_000, SEED).map_err(|e| e.to_string())?),
            "lagrangian" => json(&lagrangian_counterexample(2, 1000, SEED).map_err(|e| e.to_string())?.1),
            "iso37" => json(&run_rank4_pipeline(Variety::Iso37, SEED).map_err(|e| e.to_string())?.1),
            "iso48" => json(&run_rank4_pipeline(Variety::Iso48Component, SEED).map_err(|e| e.to_string())?.1),
            other => return Err(format!("unknown report {other}")),
        };
        ensure(&again == first, || format!("{name} report differs on rerun"))?;
        compared += 1;
    }
    for full in theorem {
        let prefix = igcp::verify_main_theorem(full.dim, 10, full.budget, full.seed).map_err(|e| e.to_string())?;
        ensure(json(&prefix.non_cone) == json(&full.non_cone[..10]), || format!("dim {} non-cone trials differ", full.dim))?;
        ensure(json(&prefix.frames) == json(&full.frames[..10]), || format!("dim {} frame trials differ", full.dim))?;
        let twice = igcp::verify_main_theorem(full.dim, 10, full.budget, full.seed).map_err(|e| e.to_string())?;
        ensure(json(&prefix) == json(&twice), || format!("dim {} prefix differs on rerun", full.dim))?;
        compared += 1;
    }
    ensure(compared == reports.len() + theorem.len() && compared > 0, || "nothing compared".into())?;
    Ok(format!("{compared} reports byte-identical"))
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    let mut reports: Vec<(String, String)> = Vec::new();
    let mut theorem: Vec<MainTheoremReport> = Vec::new();
    let mut keep = |name: &str, r: Result<(String, String), String>| {
        r.map(|(line, report)| {
            reports.push((name.to_string(), report));
            line
        })
    };

    all &= run(1, "Klein quadric", secs(1), klein);
    all &= run(2, "counterexample ω₇", secs(30), || {
        keep("omega7", counterexample_check(7, -3, (&[0, 2], 1), (14, 8, 6)))
    });
    all &= run(3, "counterexample ω₈", secs(60), || {
        keep("omega8", counterexample_check(8, -1, (&[0, 2, 4], 2), (21, 14, 7)))
    });
    for dim in [9, 10] {
        all &= run(4, "main theorem", secs(300), || {
            main_theorem(dim).map(|(line, r)| {
                theorem.push(r);
                line
            })
        });
    }
    all &= run(5, "case classifier", secs(120), cases);
    all &= run(6, "lemmas and spanning", secs(120), lemmas);
    all &= run(7, "Lagrangian example", secs(30), || keep("lagrangian", lagrangian()));
    all &= run(8, "pipeline iso37", secs(600), || keep("iso37", pipeline(Variety::Iso37, 5)));
    all &= run(9, "pipeline iso48_component", secs(1200), || {
        keep("iso48", pipeline(Variety::Iso48Component, 3))
    });
    all &= run(10, "determinism", secs(900), || determinism(&reports, &theorem));

    if !all {
        std::process::exit(1);
    }
}
