//! Seeded random objects for property sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dsl::{Gen, Term};
use crate::field::{FieldElement, FieldSpec};
use crate::matrix::MatFq;
use crate::poly::PolyQ;
use crate::relcalc::Relation;

pub fn element<R: Rng + ?Sized>(rng: &mut R, spec: &FieldSpec) -> FieldElement {
    FieldElement(rng.gen_range(0..spec.q()))
}

pub fn nonzero_element<R: Rng + ?Sized>(rng: &mut R, spec: &FieldSpec) -> FieldElement {
    FieldElement(rng.gen_range(1..spec.q()))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, spec: &FieldSpec, rows: usize, cols: usize) -> MatFq {
    let entries = (0..rows * cols).map(|_| element(rng, spec)).collect();
    MatFq::from_entries(spec, rows, cols, entries)
}

pub fn invertible<R: Rng + ?Sized>(rng: &mut R, spec: &FieldSpec, n: usize) -> MatFq {
    loop {
        let m = matrix(rng, spec, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// A random subspace of F_q^{s+k}; the number of spanning vectors is uniform in `0..=s+k`.
pub fn relation<R: Rng + ?Sized>(rng: &mut R, spec: &FieldSpec, s: usize, k: usize) -> Relation {
    let gens = rng.gen_range(0..=s + k);
    Relation::new(s, k, matrix(rng, spec, gens, s + k)).expect("width is s+k")
}

/// A random relation whose projection to the codomain block is surjective.
pub fn rel_infty<R: Rng + ?Sized>(rng: &mut R, spec: &FieldSpec, s: usize, k: usize) -> Relation {
    let a = matrix(rng, spec, k, s);
    let extra = rng.gen_range(0..=s);
    let a_prime = matrix(rng, spec, extra, s).rref().0;
    Relation::from_normal_form(&a, &a_prime).expect("shapes agree")
}

/// A uniformly random permutation of `0..k`.
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    p.shuffle(rng);
    p
}

/// A random well-typed term with the given domain.
pub fn term<R: Rng + ?Sized>(rng: &mut R, spec: &FieldSpec, dom: usize, depth: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    let choice = if leaf { rng.gen_range(0..4) } else { rng.gen_range(4..8) };
    match choice {
        0 => {
            let fits: Vec<Gen> =
                [Gen::Eps, Gen::EpsStar, Gen::M, Gen::MStar, Gen::Sigma, Gen::Z, Gen::ZStar, Gen::Plus, Gen::Ev, Gen::Coev]
                    .into_iter()
                    .chain(spec.elements().map(Gen::Mu))
                    .filter(|g| g.arity().0 == dom)
                    .collect();
            if fits.is_empty() {
                Term::id(dom)
            } else {
                Term::gen(fits[rng.gen_range(0..fits.len())])
            }
        }
        1 => Term::id(dom),
        2 => {
            let cod = rng.gen_range(0..=2);
            Term::rel(relation(rng, spec, dom, cod))
        }
        3 => {
            let rows = rng.gen_range(0..=2);
            Term::mu_matrix(matrix(rng, spec, rows, dom))
        }
        4 | 5 => {
            let b = term(rng, spec, dom, depth - 1);
            let a = term(rng, spec, b.cod(), depth - 1);
            Term::compose(a, b).unwrap()
        }
        6 => {
            let left = rng.gen_range(0..=dom);
            Term::tensor(term(rng, spec, left, depth - 1), term(rng, spec, dom - left, depth - 1))
        }
        _ => {
            let a = term(rng, spec, dom, depth - 1);
            let b = Term::rel(relation(rng, spec, dom, a.cod()));
            let c1 = PolyQ::from_coeffs(vec![crate::poly::rat(rng.gen_range(-3..4)), crate::poly::rat(rng.gen_range(-1..2))]);
            let c2 = PolyQ::constant(crate::poly::rat(rng.gen_range(-2..3)) / crate::poly::rat(rng.gen_range(1..4)));
            Term::lincomb(vec![(c1, a), (c2, b)]).unwrap()
        }
    }
}
