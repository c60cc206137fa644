use super::*;
use crate::category::{self, Morphism};
use crate::concrete::{f_r_matrix, specialize};
use crate::poly::rat;
use crate::random;
use crate::relcalc::star;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> FieldSpec {
    FieldSpec::prime(2).unwrap()
}

fn dense(m: &LinMap) -> Vec<Vec<i64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m.get(i, j).to_integer().try_into().unwrap()).collect()).collect()
}

#[test]
fn standard_structure_maps() {
    let data = standard_target(&f2(), 1).unwrap();
    assert_eq!(dense(&data.m), vec![vec![1, 0, 0, 0], vec![0, 0, 0, 1]]);
    assert_eq!(dense(data.eps.as_ref().unwrap()), vec![vec![1], vec![1]]);
    assert_eq!(dense(&data.z), vec![vec![1], vec![0]]);
    assert_eq!(dense(&data.plus), vec![vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
    assert_eq!(dense(&data.mu[0]), vec![vec![1, 1], vec![0, 0]]);
    assert!(standard_target(&FieldSpec::prime(2).unwrap(), 13).is_err());
}

#[test]
fn standard_targets_satisfy_all_axioms() {
    for (q, n) in [(2, 1), (3, 1), (4, 1), (2, 2)] {
        let spec = FieldSpec::from_order(q).unwrap();
        let data = standard_target(&spec, n).unwrap();
        let report = check_axioms(&data).unwrap();
        let bad: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        assert!(bad.is_empty(), "q={q} n={n}: {bad:?}");
        assert_eq!(report.dim, Some(rat((q as i64).pow(n as u32))));
        let semi = check_axioms(&data.without_unit()).unwrap();
        assert!(semi.all_pass());
        assert!(semi.checks.len() < report.checks.len());
        assert!(semi.checks.iter().all(|c| !c.name.contains('ε') || c.name.contains("ε*")));
        assert_eq!(semi.dim, None);
    }
}

#[test]
fn corrupted_zero_scaling_is_named() {
    let mut data = standard_target(&f2(), 1).unwrap();
    data.mu[0] = LinMap::identity(2, 1).unwrap();
    let report = check_axioms(&data).unwrap();
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    assert!(failed.contains(&"(Lin3) μ_0=z∘ε*"));
    let lin3 = report.checks.iter().find(|c| c.name == "(Lin3) μ_0=z∘ε*").unwrap();
    assert_eq!(lin3.counterexample, Some((0, 1)));
    let mut bad = standard_target(&f2(), 1).unwrap();
    bad.m = LinMap::identity(2, 1).unwrap();
    assert!(matches!(check_axioms(&bad), Err(Error::ShapeMismatch(_))));
}

#[test]
fn formal_axioms_hold() {
    for q in [2, 3, 4] {
        let spec = FieldSpec::from_order(q).unwrap();
        for id in frobenius_axioms(&spec) {
            assert!(id.holds_formally(&spec).unwrap(), "q={q}: {}", id.name);
        }
    }
}

#[test]
fn lemmas_hold_formally_and_concretely() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for q in [2, 3] {
        let spec = FieldSpec::prime(q).unwrap();
        let data = standard_target(&spec, 1).unwrap();
        for _ in 0..3 {
            for id in lemma_suite(&spec, &mut rng) {
                assert!(id.holds_formally(&spec).unwrap(), "q={q}: {}", id.name);
                assert_eq!(id.counterexample(&data).unwrap(), None, "q={q}: {}", id.name);
            }
        }
    }
}

#[test]
fn term_examples() {
    let spec = f2();
    let data = standard_target(&spec, 2).unwrap();
    let ev = |s: &str| term_eval(&data, &parse(s, &spec).unwrap(), None);
    assert_eq!(ev("m . m*").unwrap(), LinMap::identity(4, 1).unwrap());
    assert_eq!(dense(&ev("eps* . eps").unwrap()), vec![vec![4]]);
    assert!(matches!(ev("t * id(1)"), Err(Error::RequiresEvaluation)));
    let t = rat(4);
    assert_eq!(term_eval(&data, &parse("t * id(0)", &spec).unwrap(), Some(&t)).unwrap().get(0, 0), t);
    let semi = data.without_unit();
    assert!(matches!(term_eval(&semi, &parse("eps* . eps", &spec).unwrap(), None), Err(Error::MissingUnit)));
    assert!(matches!(term_eval(&semi, &parse("rel(2;1,1;[])", &spec).unwrap(), None), Err(Error::MissingUnit)));
    assert!(term_eval(&semi, &parse("rel(2;1,1;[[1,1]])", &spec).unwrap(), None).is_ok());
}

#[test]
fn mu_a_acts_as_the_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..30 {
        let spec = FieldSpec::from_order([2, 3, 4][rng.gen_range(0..3)]).unwrap();
        let data = standard_target(&spec, 1).unwrap();
        let (r, d) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let a = random::matrix(&mut rng, &spec, r, d);
        let got = mu_a_eval(&data, &a).unwrap();
        // v ↦ Av on tuples of scalars, independently computed
        let q = spec.q() as u64;
        let expected = LinMap::from_columns(q, d, r, |col| {
            let v: Vec<FieldElement> = (0..d).map(|j| spec.elem(col / q.pow(j as u32) % q).unwrap()).collect();
            let w: u64 = (0..r)
                .map(|i| {
                    let x = (0..d).fold(FieldElement::ZERO, |acc, j| spec.add(acc, spec.mul(a.get(i, j), v[j])));
                    x.code() as u64 * q.pow(i as u32)
                })
                .sum();
            SparseVec::from([(w, BigRational::one())])
        })
        .unwrap();
        assert_eq!(got, expected, "{a}");
    }
}

#[test]
fn mu_calculus_on_concrete_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let spec = FieldSpec::prime(3).unwrap();
    let data = standard_target(&spec, 1).unwrap();
    for _ in 0..20 {
        let a = random::matrix(&mut rng, &spec, 2, 1);
        let b = random::matrix(&mut rng, &spec, 1, 2);
        let lhs = mu_a_eval(&data, &b).unwrap().compose(&mu_a_eval(&data, &a).unwrap()).unwrap();
        assert_eq!(lhs, mu_a_eval(&data, &b.matmul(&a).unwrap()).unwrap());
        let lhs = mu_a_eval(&data, &a).unwrap().kron(&mu_a_eval(&data, &b).unwrap()).unwrap();
        assert_eq!(lhs, mu_a_eval(&data, &a.block_diag(&b).unwrap()).unwrap());
    }
}

#[test]
fn hat_f_calculus() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..40 {
        let spec = FieldSpec::prime([2, 3][rng.gen_range(0..2)]).unwrap();
        let data = standard_target(&spec, 1).unwrap().without_unit();
        let (s, k, l) = (rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=1));
        let r = random::rel_infty(&mut rng, &spec, s, k);
        let sr = random::rel_infty(&mut rng, &spec, k, l);
        let (composite, d) = star(&r, &sr).unwrap();
        assert_eq!(d, 0);
        let lhs = hat_f(&data, &sr).unwrap().compose(&hat_f(&data, &r).unwrap()).unwrap();
        assert_eq!(lhs, hat_f(&data, &composite).unwrap());
        let lhs = hat_f(&data, &r).unwrap().kron(&hat_f(&data, &sr).unwrap()).unwrap();
        assert_eq!(lhs, hat_f(&data, &crate::relcalc::product(&r, &sr).unwrap()).unwrap());
        // on the standard target f̂_R is F_1(f_R)
        assert_eq!(hat_f(&data, &r).unwrap(), f_r_matrix(&r, 1).unwrap().into_map());
    }
    let spec = f2();
    assert!(matches!(hat_f(&standard_target(&spec, 1).unwrap(), &Relation::zero(&spec, 1, 1)), Err(Error::NotRelInfty)));
}

#[test]
fn decomposition_round_trip_against_specialization() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..40 {
        let spec = f2();
        let n = rng.gen_range(1..=2);
        let data = standard_target(&spec, n).unwrap();
        let (s, k) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let r = random::relation(&mut rng, &spec, s, k);
        let via_terms = term_eval(&data, &build::decompose(&r), None).unwrap();
        assert_eq!(via_terms, f_r_matrix(&r, n).unwrap().into_map(), "{r}");
    }
}

#[test]
fn evaluation_paths_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..40 {
        let spec = FieldSpec::prime([2, 3][rng.gen_range(0..2)]).unwrap();
        let data = standard_target(&spec, 1).unwrap();
        let t = rat(spec.q() as i64);
        let dom = rng.gen_range(0..=2);
        let term = random::term(&mut rng, &spec, dom, 2);
        if term.cod() > 3 || width(&term) > 6 {
            continue;
        }
        let formal = crate::dsl::eval_formal(&term, &spec, &category::TMode::Symbolic).unwrap();
        let concrete = term_eval(&data, &term, Some(&t)).unwrap();
        assert_eq!(specialize(&formal, 1).unwrap().into_map(), concrete, "{term}");
    }
    let _ = Morphism::zero(&f2(), 0, 0);
}

#[test]
fn json_round_trip() {
    let data = standard_target(&FieldSpec::from_order(4).unwrap(), 1).unwrap();
    let back = FrobeniusData::from_json(&data.to_json()).unwrap();
    assert_eq!(back, data);
    let semi = data.without_unit();
    assert_eq!(FrobeniusData::from_json(&semi.to_json()).unwrap(), semi);
    let mut broken = data.to_json();
    broken["mu"] = serde_json::json!([]);
    assert!(FrobeniusData::from_json(&broken).is_err());
    let report = check_axioms(&data).unwrap();
    let j = serde_json::to_value(&report.checks[0]).unwrap();
    assert_eq!(j["pass"], true);
    assert!(j.get("counterexample").is_none());
}
