use super::*;
use crate::category::{compose, identity, tensor};
use crate::random;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> FieldSpec {
    FieldSpec::prime(2).unwrap()
}

fn sym() -> TMode {
    TMode::Symbolic
}

#[test]
fn arities_are_inferred() {
    let spec = f2();
    let t = parse("m . m*", &spec).unwrap();
    assert_eq!((t.dom(), t.cod()), (1, 1));
    let t = parse("(eps* @ id(1)) . coev", &spec).unwrap();
    assert_eq!((t.dom(), t.cod()), (0, 1));
    assert!(matches!(parse("m . z", &spec), Err(Error::ArityMismatch(_))));
    assert!(matches!(parse("m + id(1)", &spec), Err(Error::ArityMismatch(_))));
    let t = parse("rel(2;1,1;[[1,1]]) @ muM([[1,0],[1,1]]) @ sigma", &spec).unwrap();
    assert_eq!((t.dom(), t.cod()), (5, 5));
    let t = parse("muM(0,3;[])", &spec).unwrap();
    assert_eq!((t.dom(), t.cod()), (3, 0));
}

#[test]
fn precedence() {
    let spec = f2();
    // `.` binds tighter than `@`
    let t = parse("m . m* @ id(1)", &spec).unwrap();
    assert!(matches!(t.node(), Node::Tensor(..)));
    let t = parse("2 * m . m* + t * id(1)", &spec).unwrap();
    let Node::LinComb(items) = t.node() else { panic!("expected a sum") };
    assert_eq!(items.len(), 2);
    assert_eq!(items[1].0, PolyQ::t());
    let t = parse("m . sigma . m*", &spec).unwrap();
    let Node::Compose(a, _) = t.node() else { panic!("expected a composite") };
    assert!(matches!(a.node(), Node::Compose(..)));
}

#[test]
fn errors() {
    let spec = f2();
    assert!(matches!(parse("m . (m*", &spec), Err(Error::Syntax { pos: 7, .. })));
    assert!(matches!(parse("m $ m", &spec), Err(Error::Syntax { pos: 2, .. })));
    assert!(matches!(parse("frob", &spec), Err(Error::UnknownGenerator(_))));
    assert!(parse("", &spec).is_err());
    assert!(parse("id(1) id(1)", &spec).is_err());
}

#[test]
fn formal_evaluation() {
    let spec = f2();
    let e = |s: &str| eval_formal(&parse(s, &spec).unwrap(), &spec, &sym()).unwrap();
    assert_eq!(e("mu(1)"), identity(&spec, 1));
    assert_eq!(e("eps* . eps"), Morphism::scalar(&spec, PolyQ::t()));
    assert_eq!(e("plus . (z @ id(1))"), identity(&spec, 1));
    assert_eq!(e("(eps* @ id(1)) . coev"), e("eps"));
    assert_eq!(e("ev"), e("eps* . m"));
    assert_eq!(e("coev"), e("m* . eps"));
    assert_eq!(e("z*"), e("ev . (id(1) @ z)"));
    assert_eq!(e("t * id(1) + -1 * id(1)"), identity(&spec, 1).scale(&"t - 1".parse().unwrap()));
    let three = FieldSpec::prime(3).unwrap();
    let t = parse("mu(-1) . mu(2)", &three).unwrap();
    assert_eq!(eval_formal(&t, &three, &sym()).unwrap(), identity(&three, 1));
    assert!(matches!(parse("rel(3;1,1;[[1,1]])", &spec), Err(Error::FieldMismatch(..))));
    let wrong = Term::rel(parse_relation("rel(3;1,1;[[1,1]])").unwrap());
    assert!(matches!(eval_formal(&wrong, &spec, &sym()), Err(Error::FieldMismatch(..))));
}

#[test]
fn bindings() {
    let spec = f2();
    let t = parse_program("a := m . m*; b := a @ a; b . sigma", &spec).unwrap();
    assert_eq!((t.dom(), t.cod()), (2, 2));
    assert!(parse_program("m := eps; m", &spec).is_err());
    assert!(parse_program("a := eps; b", &spec).is_err());
}

#[test]
fn relation_literals() {
    let r = parse_relation("rel(3;1,1;[[1,2]])").unwrap();
    assert_eq!(r.spec().q(), 3);
    assert_eq!(r.to_string(), "rel(3;1,1;[[1,2]])");
    let r = parse_relation("rel(2^2;0,1;[[3]])").unwrap();
    assert_eq!(r.to_string(), "rel(4;0,1;[[1]])");
    assert!(parse_relation("rel(6;0,1;[])").is_err());
}

#[test]
fn expanded_terms_avoid_derived_atoms() {
    let spec = f2();
    let t = parse("ev @ coev @ z*", &spec).unwrap().expand_derived();
    assert!(!t.generators().iter().any(|g| matches!(g, Gen::Ev | Gen::Coev | Gen::ZStar)));
    assert_eq!(eval_formal(&t, &spec, &sym()).unwrap(), eval_formal(&parse("ev @ coev @ z*", &spec).unwrap(), &spec, &sym()).unwrap());
    assert!(t.needs_unit());
    assert!(!parse("m . m* @ z*", &spec).unwrap().needs_unit());
    assert!(parse("rel(2;1,1;[])", &spec).unwrap().needs_unit());
}

#[test]
fn random_terms_evaluate_compositionally() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let spec = FieldSpec::from_order([2, 3, 4][rng.gen_range(0..3)]).unwrap();
        let dom = rng.gen_range(0..=2);
        let b = random::term(&mut rng, &spec, dom, 2);
        if b.cod() > 3 {
            continue;
        }
        let a = random::term(&mut rng, &spec, b.cod(), 2);
        let (ea, eb) = (eval_formal(&a, &spec, &sym()).unwrap(), eval_formal(&b, &spec, &sym()).unwrap());
        let ab = Term::compose(a.clone(), b.clone()).unwrap();
        assert_eq!(eval_formal(&ab, &spec, &sym()).unwrap(), compose(&ea, &eb, &sym()).unwrap());
        let axb = Term::tensor(a, b);
        assert_eq!(eval_formal(&axb, &spec, &sym()).unwrap(), tensor(&ea, &eb).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_fixpoint(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3, 4, 9])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = FieldSpec::from_order(q).unwrap();
        let dom = rng.gen_range(0..=2);
        let t = random::term(&mut rng, &spec, dom, 3);
        let printed = t.to_string();
        let back = parse(&printed, &spec).unwrap();
        prop_assert_eq!(&back, &t, "{}", printed);
        prop_assert_eq!(back.to_string(), printed);
    }
}
