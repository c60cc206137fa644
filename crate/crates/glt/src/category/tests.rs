use super::*;
use crate::dsl::{eval_formal, parse};
use crate::random;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> FieldSpec {
    FieldSpec::prime(2).unwrap()
}

fn sym() -> TMode {
    TMode::Symbolic
}

fn ev(src: &str, spec: &FieldSpec) -> Morphism {
    eval_formal(&parse(src, spec).unwrap(), spec, &sym()).unwrap()
}

fn field(rng: &mut ChaCha8Rng) -> FieldSpec {
    FieldSpec::from_order([2, 3, 4][rng.gen_range(0..3)]).unwrap()
}

fn rel(rng: &mut ChaCha8Rng, spec: &FieldSpec, s: usize, k: usize) -> Morphism {
    Morphism::from_relation(random::relation(rng, spec, s, k))
}

/// A random combination of two basis morphisms with small polynomial coefficients.
fn combo(rng: &mut ChaCha8Rng, spec: &FieldSpec, s: usize, k: usize) -> Morphism {
    let c1 = PolyQ::from_coeffs(vec![crate::poly::rat(rng.gen_range(-2..3)), crate::poly::rat(rng.gen_range(0..2))]);
    let c2 = PolyQ::from_int(rng.gen_range(1..4));
    rel(rng, spec, s, k).scale(&c1).add(&rel(rng, spec, s, k).scale(&c2)).unwrap()
}

#[test]
fn scalar_loops_and_speciality() {
    let spec = f2();
    assert_eq!(ev("eps* . eps", &spec), Morphism::scalar(&spec, PolyQ::t()));
    assert_eq!(ev("m . m*", &spec), identity(&spec, 1));
    assert_eq!(ev("z* . z", &spec), Morphism::scalar(&spec, PolyQ::one()));
    assert_eq!(ev("eps* . eps", &spec).to_string(), "t * rel(2;0,0;[])");
    let four = TMode::Evaluated(crate::poly::rat(4));
    let e = eval_formal(&parse("eps* . eps", &spec).unwrap(), &spec, &four).unwrap();
    assert_eq!(e.to_string(), "4 * rel(2;0,0;[])");
}

#[test]
fn composition_is_associative_and_unital() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let spec = field(&mut rng);
        let a: Vec<usize> = (0..4).map(|_| rng.gen_range(0..=3)).collect();
        let (f, g, h) = (rel(&mut rng, &spec, a[0], a[1]), rel(&mut rng, &spec, a[1], a[2]), rel(&mut rng, &spec, a[2], a[3]));
        let left = compose(&h, &compose(&g, &f, &sym()).unwrap(), &sym()).unwrap();
        let right = compose(&compose(&h, &g, &sym()).unwrap(), &f, &sym()).unwrap();
        assert_eq!(left, right);
        assert_eq!(compose(&identity(&spec, a[1]), &f, &sym()).unwrap(), f);
        assert_eq!(compose(&f, &identity(&spec, a[0]), &sym()).unwrap(), f);
    }
}

#[test]
fn interchange_and_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..150 {
        let spec = field(&mut rng);
        let a: Vec<usize> = (0..6).map(|_| rng.gen_range(0..=2)).collect();
        let f = combo(&mut rng, &spec, a[0], a[1]);
        let f2 = rel(&mut rng, &spec, a[1], a[2]);
        let g = rel(&mut rng, &spec, a[3], a[4]);
        let g2 = combo(&mut rng, &spec, a[4], a[5]);
        let lhs = tensor(&compose(&f2, &f, &sym()).unwrap(), &compose(&g2, &g, &sym()).unwrap()).unwrap();
        let rhs = compose(&tensor(&f2, &g2).unwrap(), &tensor(&f, &g).unwrap(), &sym()).unwrap();
        assert_eq!(lhs, rhs);

        let (l, k) = (a[0], a[3]);
        let sigma = symmetry(&spec, l, k);
        assert_eq!(compose(&symmetry(&spec, k, l), &sigma, &sym()).unwrap(), identity(&spec, l + k));
        let f = rel(&mut rng, &spec, l, a[1]);
        let g = rel(&mut rng, &spec, k, a[4]);
        let nat_l = compose(&symmetry(&spec, a[1], a[4]), &tensor(&f, &g).unwrap(), &sym()).unwrap();
        let nat_r = compose(&tensor(&g, &f).unwrap(), &sigma, &sym()).unwrap();
        assert_eq!(nat_l, nat_r);
    }
}

#[test]
fn permutations_form_a_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = FieldSpec::prime(3).unwrap();
    for _ in 0..50 {
        let k = rng.gen_range(0..=4);
        let p = random::permutation(&mut rng, k);
        let p2 = random::permutation(&mut rng, k);
        let both: Vec<usize> = p.iter().map(|&i| p2[i]).collect();
        let lhs = compose(&permutation(&spec, &p2).unwrap(), &permutation(&spec, &p).unwrap(), &sym()).unwrap();
        assert_eq!(lhs, permutation(&spec, &both).unwrap());
        let built = eval_formal(&build::permutation(&p), &spec, &sym()).unwrap();
        assert_eq!(built, permutation(&spec, &p).unwrap());
    }
    assert!(permutation(&spec, &[0, 0]).is_err());
}

#[test]
fn mu_morphisms_follow_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let spec = field(&mut rng);
        let (r, k, l) = (rng.gen_range(0..=3), rng.gen_range(0..=3), rng.gen_range(0..=3));
        let a = random::matrix(&mut rng, &spec, k, l);
        let b = random::matrix(&mut rng, &spec, r, k);
        let lhs = compose(&mu_morphism(&b), &mu_morphism(&a), &sym()).unwrap();
        assert_eq!(lhs, mu_morphism(&b.matmul(&a).unwrap()));
        assert_eq!(tensor(&mu_morphism(&a), &mu_morphism(&b)).unwrap(), mu_morphism(&a.block_diag(&b).unwrap()));
        // the generator composite agrees with the literal
        assert_eq!(eval_formal(&build::mu(&a), &spec, &sym()).unwrap(), mu_morphism(&a));
    }
}

#[test]
fn duals() {
    let spec = f2();
    assert_eq!(dual(&ev("eps", &spec)).unwrap(), ev("eps*", &spec));
    assert_eq!(dual(&ev("m", &spec)).unwrap(), ev("m*", &spec));
    assert_eq!(dual(&ev("z", &spec)).unwrap(), ev("z*", &spec));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let spec = field(&mut rng);
        let d = rng.gen_range(0..=3);
        let a = random::invertible(&mut rng, &spec, d);
        assert_eq!(dual(&mu_morphism(&a)).unwrap(), mu_morphism(&a.inverse().unwrap()));
        let (s, k) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let f = combo(&mut rng, &spec, s, k);
        assert_eq!(dual(&dual(&f).unwrap()).unwrap(), f);
        // closed form: exchange the two coordinate blocks
        let r = random::relation(&mut rng, &spec, s, k);
        assert_eq!(dual(&Morphism::from_relation(r.clone())).unwrap(), Morphism::from_relation(r.swap_blocks()));
    }
}

#[test]
fn snakes() {
    for q in [2, 3, 4] {
        let spec = FieldSpec::from_order(q).unwrap();
        for k in 0..=2 {
            let id = identity(&spec, k);
            let a = compose(&tensor(&ev_bar(&spec, k), &id).unwrap(), &tensor(&id, &coev_bar(&spec, k)).unwrap(), &sym()).unwrap();
            let b = compose(&tensor(&id, &ev_bar(&spec, k)).unwrap(), &tensor(&coev_bar(&spec, k), &id).unwrap(), &sym()).unwrap();
            assert_eq!(a, id);
            assert_eq!(b, id);
        }
    }
}

#[test]
fn traces_and_gram() {
    let spec = f2();
    assert_eq!(trace(&identity(&spec, 1), &sym()).unwrap(), PolyQ::t());
    assert_eq!(trace(&identity(&spec, 2), &sym()).unwrap(), PolyQ::t().pow(2));
    let (rels, g) = gram(&spec, 0, 1, &sym()).unwrap();
    assert_eq!(rels.len(), 2);
    let one = PolyQ::one();
    assert_eq!(g, vec![vec![PolyQ::t(), one.clone()], vec![one.clone(), one.clone()]]);
    assert_eq!(crate::poly::determinant(&g), PolyQ::t() - one);
    assert_eq!(count_relations(&spec, 1, 1), 5u32.into());
    assert_eq!(count_relations(&spec, 0, 0), 1u32.into());
}

#[test]
fn pairing_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..60 {
        let spec = field(&mut rng);
        let (s, k, l) = (rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=2));
        let r = random::relation(&mut rng, &spec, s, k);
        let sr = random::relation(&mut rng, &spec, k, l);
        let f = Morphism::from_relation(r.clone());
        let g = Morphism::from_relation(sr.clone());
        assert_eq!(phi(&r).unwrap(), t_iso(&f).unwrap());
        assert_eq!(t_inv(&t_iso(&f).unwrap(), s, k).unwrap(), f);
        let lhs = t_iso(&compose(&g, &f, &sym()).unwrap()).unwrap();
        assert_eq!(lhs, ast(&t_iso(&f).unwrap(), &t_iso(&g).unwrap(), k).unwrap());
        let (composite, d) = relcalc::star(&r, &sr).unwrap();
        let rhs = phi(&composite).unwrap().scale(&PolyQ::t().pow(d as u32));
        assert_eq!(ast(&phi(&r).unwrap(), &phi(&sr).unwrap(), k).unwrap(), rhs);
    }
}

#[test]
fn orbit_basis() {
    let spec = f2();
    let full = Relation::full(&spec, 1, 1);
    assert_eq!(orbit_expand(&full).unwrap().len(), 1);
    let zero = Relation::zero(&spec, 1, 1);
    let ex = orbit_expand(&zero).unwrap();
    assert_eq!(ex.len(), 5);
    assert!(ex.values().all(|c| c.is_one()));
    for m in enumerate_subspaces(&spec, 2, None).unwrap() {
        let r = Relation::new(1, 1, m).unwrap();
        let back = orbit_invert(&spec, 1, 1, &orbit_expand(&r).unwrap()).unwrap();
        assert_eq!(back, Morphism::from_relation(r));
    }
}

#[test]
fn generator_decomposition_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let spec = FieldSpec::prime([2, 3][rng.gen_range(0..2)]).unwrap();
        let (s, k) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let r = random::relation(&mut rng, &spec, s, k);
        let term = decompose_generators(&r);
        assert!(term.generators().iter().all(|g| !matches!(g, dsl::Gen::Ev | dsl::Gen::Coev | dsl::Gen::ZStar)));
        assert_eq!(eval_formal(&term, &spec, &sym()).unwrap(), Morphism::from_relation(r));
    }
    let id = identity_relation_of(&f2());
    assert_eq!(eval_formal(&decompose_generators(&id), &f2(), &sym()).unwrap(), identity(&f2(), 1));
}

fn identity_relation_of(spec: &FieldSpec) -> Relation {
    relcalc::identity_relation(spec, 1)
}

#[test]
fn text_and_json() {
    let spec = f2();
    let f = ev("eps* . eps", &spec).add(&identity(&spec, 0).scale(&"3/2*t^2 - 1".parse().unwrap())).unwrap();
    assert_eq!(f.to_string(), "(3/2*t^2 + t - 1) * rel(2;0,0;[])");
    let json = serde_json::to_value(&f).unwrap();
    assert_eq!(json["s"], 0);
    assert_eq!(json["terms"][0]["coeff"], "3/2*t^2 + t - 1");
    assert_eq!(Morphism::zero(&spec, 1, 1).to_string(), "0");
    assert!(compose(&ev("m", &spec), &ev("m", &spec), &sym()).is_err());
}

mod props {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn morphism(rng: &mut ChaCha8Rng, spec: &FieldSpec, s: usize, k: usize) -> Morphism {
        let mut f = Morphism::zero(spec, s, k);
        for c in ["1", "t - 1/2", "-2*t^2"].iter().take(rng.gen_range(1..=3)) {
            let r = random::relation(rng, spec, s, k);
            f = f.add(&Morphism::from_relation(r).scale(&c.parse().unwrap())).unwrap();
        }
        f
    }

    fn setup() -> impl Strategy<Value = (ChaCha8Rng, FieldSpec, Vec<usize>)> {
        (any::<u64>(), prop::sample::select(vec![2u64, 3, 4])).prop_map(|(seed, q)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = (0..4).map(|_| rng.gen_range(0..=2)).collect();
            (rng, FieldSpec::from_order(q).unwrap(), a)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn composition_is_associative_and_unital((mut rng, spec, a) in setup()) {
            let f = morphism(&mut rng, &spec, a[0], a[1]);
            let g = morphism(&mut rng, &spec, a[1], a[2]);
            let h = morphism(&mut rng, &spec, a[2], a[3]);
            let left = compose(&compose(&h, &g, &sym()).unwrap(), &f, &sym()).unwrap();
            let right = compose(&h, &compose(&g, &f, &sym()).unwrap(), &sym()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(compose(&identity(&spec, a[1]), &f, &sym()).unwrap(), f.clone());
            prop_assert_eq!(compose(&f, &identity(&spec, a[0]), &sym()).unwrap(), f);
        }

        #[test]
        fn interchange_and_symmetry_naturality((mut rng, spec, a) in setup()) {
            let f = morphism(&mut rng, &spec, a[0], a[1]);
            let g = morphism(&mut rng, &spec, a[1], a[2]);
            let h = morphism(&mut rng, &spec, a[3], a[0]);
            let k = morphism(&mut rng, &spec, a[0], a[3]);
            let lhs = compose(&tensor(&g, &k).unwrap(), &tensor(&f, &h).unwrap(), &sym()).unwrap();
            let rhs = tensor(&compose(&g, &f, &sym()).unwrap(), &compose(&k, &h, &sym()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let swapped = compose(&symmetry(&spec, a[1], a[3]), &tensor(&f, &k).unwrap(), &sym()).unwrap();
            let expected = compose(&tensor(&k, &f).unwrap(), &symmetry(&spec, a[0], a[0]), &sym()).unwrap();
            prop_assert_eq!(swapped, expected);
        }

        #[test]
        fn dual_reverses_composition((mut rng, spec, a) in setup()) {
            let f = morphism(&mut rng, &spec, a[0], a[1]);
            let g = morphism(&mut rng, &spec, a[1], a[2]);
            let lhs = dual(&compose(&g, &f, &sym()).unwrap()).unwrap();
            let rhs = compose(&dual(&f).unwrap(), &dual(&g).unwrap(), &sym()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(dual(&dual(&f).unwrap()).unwrap(), f);
        }
    }
}
