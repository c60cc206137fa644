//! Special string diagrams assembled from generator atoms.

use super::{Gen, Term};
use crate::field::FieldSpec;
use crate::matrix::MatFq;
use crate::relcalc::Relation;

fn g(gen: Gen) -> Term {
    Term::gen(gen)
}

fn whisker(left: usize, t: Term, right: usize) -> Term {
    let mut parts = Vec::new();
    if left > 0 {
        parts.push(Term::id(left));
    }
    parts.push(t);
    if right > 0 {
        parts.push(Term::id(right));
    }
    Term::tensor_all(parts)
}

/// `t ⊗ t ⊗ ... ⊗ t` (`n` copies); `id(0)` for `n = 0`.
pub fn power(t: &Term, n: usize) -> Term {
    Term::tensor_all(std::iter::repeat_n(t.clone(), n))
}

/// Iterated comultiplication `[1] -> [k]`: `eps*` for `k = 0`, `id(1)` for `k = 1`,
/// then `(m* @ id(k-2)) . ... . (m* @ id(1)) . m*`.
pub fn comult_iter(k: usize) -> Term {
    match k {
        0 => g(Gen::EpsStar),
        1 => Term::id(1),
        _ => Term::chain(vec![whisker(0, g(Gen::MStar), k - 2), comult_iter(k - 1)]),
    }
}

/// Iterated addition `[k] -> [1]`: `z` for `k = 0`, `id(1)` for `k = 1`,
/// then `plus . (plus @ id(1)) . ... . (plus @ id(k-2))`.
pub fn plus_iter(k: usize) -> Term {
    match k {
        0 => g(Gen::Z),
        1 => Term::id(1),
        _ => Term::chain(vec![plus_iter(k - 1), whisker(0, g(Gen::Plus), k - 2)]),
    }
}

/// Permutation of `k = p.len()` strands sending strand `i` to position `p[i]`,
/// as a product of adjacent swaps.
pub fn permutation(p: &[usize]) -> Term {
    let k = p.len();
    let mut arr = p.to_vec();
    let mut swaps = Vec::new();
    for pass in 0..k {
        for j in 0..k.saturating_sub(pass + 1) {
            if arr[j] > arr[j + 1] {
                arr.swap(j, j + 1);
                swaps.push(whisker(j, g(Gen::Sigma), k - j - 2));
            }
        }
    }
    if swaps.is_empty() {
        return Term::id(k);
    }
    swaps.reverse();
    Term::chain(swaps)
}

/// Strand `i` of `k` goes to `k - 1 - i`.
pub fn reversal(k: usize) -> Term {
    permutation(&(0..k).rev().collect::<Vec<_>>())
}

/// Regroups `d` blocks of `r` strands into `r` blocks of `d`: position `j*r + i` goes to `i*d + j`.
pub fn regroup(d: usize, r: usize) -> Term {
    let mut p = vec![0; d * r];
    for j in 0..d {
        for i in 0..r {
            p[j * r + i] = i * d + j;
        }
    }
    permutation(&p)
}

/// Nested pairing `[2k] -> [0]`, pairing position `i` with `2k - 1 - i`.
pub fn ev_nested(k: usize) -> Term {
    match k {
        0 => Term::id(0),
        1 => g(Gen::Ev),
        _ => Term::chain(vec![ev_nested(k - 1), whisker(k - 1, g(Gen::Ev), k - 1)]),
    }
}

/// Nested copairing `[0] -> [2k]`.
pub fn coev_nested(k: usize) -> Term {
    match k {
        0 => Term::id(0),
        1 => g(Gen::Coev),
        _ => Term::chain(vec![whisker(k - 1, g(Gen::Coev), k - 1), coev_nested(k - 1)]),
    }
}

/// Position-wise pairing `[2k] -> [0]`, pairing position `i` with `k + i`.
pub fn ev_bar(k: usize) -> Term {
    if k == 0 {
        return Term::id(0);
    }
    Term::chain(vec![ev_nested(k), Term::tensor(Term::id(k), reversal(k))])
}

/// Position-wise copairing `[0] -> [2k]`.
pub fn coev_bar(k: usize) -> Term {
    if k == 0 {
        return Term::id(0);
    }
    Term::chain(vec![Term::tensor(Term::id(k), reversal(k)), coev_nested(k)])
}

/// `μ_A : [d] -> [r]` for `A: r x d`, as
/// `(plus_iter(d))^{⊗r} . (⊗ mu(A_ij)) . regroup . (comult_iter(r))^{⊗d}`;
/// the factor at position `i*d + j` is multiplied by `A_ij`.
pub fn mu(a: &MatFq) -> Term {
    let (r, d) = (a.rows(), a.cols());
    let copy = power(&comult_iter(r), d);
    let scale = Term::tensor_all((0..r).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| g(Gen::Mu(a.get(i, j)))));
    let sum = power(&plus_iter(d), r);
    Term::chain(vec![sum, scale, regroup(d, r), copy])
}

/// `φ_R = (z*)^{⊗dim R} . μ_B : [s+k] -> [0]`, `B` the basis of `R`.
pub fn phi(r: &Relation) -> Term {
    let b = r.basis();
    Term::chain(vec![power(&g(Gen::ZStar), b.rows()), mu(b)])
}

/// `(φ @ id(k)) . (id(s) @ coev_bar(k))`, the inverse of the pairing-form isomorphism.
pub fn t_inverse(phi: Term, s: usize, k: usize) -> Term {
    Term::chain(vec![Term::tensor(phi, Term::id(k)), Term::tensor(Term::id(s), coev_bar(k))])
}

/// `ev_bar(k) . (f @ id(k))`, the pairing form of `f: [s] -> [k]`.
pub fn t_iso(f: Term) -> Term {
    let k = f.cod();
    Term::chain(vec![ev_bar(k), Term::tensor(f, Term::id(k))])
}

/// The dual of `f: [s] -> [k]` as a snake: `(ev_bar(k) @ id(s)) . (id(k) @ f @ id(s)) . (id(k) @ coev_bar(s))`.
pub fn dual(f: Term) -> Term {
    let (s, k) = (f.dom(), f.cod());
    Term::chain(vec![
        Term::tensor(ev_bar(k), Term::id(s)),
        Term::tensor_all([Term::id(k), f, Term::id(s)]),
        Term::tensor(Term::id(k), coev_bar(s)),
    ])
}

/// `ev = eps* . m`.
pub fn ev_expanded() -> Term {
    Term::chain(vec![g(Gen::EpsStar), g(Gen::M)])
}

/// `coev = m* . eps`.
pub fn coev_expanded() -> Term {
    Term::chain(vec![g(Gen::MStar), g(Gen::Eps)])
}

/// `z* = eps* . m . (id(1) @ z)`.
pub fn z_star_expanded() -> Term {
    Term::chain(vec![g(Gen::EpsStar), g(Gen::M), Term::tensor(Term::id(1), g(Gen::Z))])
}

/// `f_R` written over `m, m*, eps, eps*, sigma, z, plus, mu(a)` and identities.
pub fn decompose(r: &Relation) -> Term {
    t_inverse(phi(r), r.s(), r.k()).expand_derived()
}

/// `f̂_R = (id(k) @ (z*)^{⊗d}) . μ_[A;A']` for `R = Row[-A I_k; A' 0]` in Rel^∞;
/// uses no unit.
pub fn hat_f(r: &Relation) -> crate::Result<Term> {
    let (a, a_prime) = r.rel_infty_normal_form()?;
    let stacked = a.vstack(&a_prime)?;
    Ok(Term::chain(vec![Term::tensor(Term::id(r.k()), power(&g(Gen::ZStar), a_prime.rows())), mu(&stacked)]))
}

/// Convenience: `μ_A` from rows of codes.
pub fn mu_from_rows(spec: &FieldSpec, cols: usize, rows: &[Vec<u32>]) -> crate::Result<Term> {
    Ok(mu(&MatFq::from_rows(spec, cols, rows)?))
}
