//! The formal category: objects `[k]`, morphisms finite sums `Σ c_R f_R`
//! with `c_R ∈ Q[t]`, composition `f_S ∘ f_R = t^{d(R,S)} f_{S⋆R}`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::dsl::{self, build, Term};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::{enumerate_subspaces, MatFq};
use crate::poly::PolyQ;
use crate::relcalc::{self, Relation};

/// How `t` is treated by composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TMode {
    Symbolic,
    Evaluated(BigRational),
}

impl TMode {
    fn power(&self, d: usize) -> PolyQ {
        match self {
            TMode::Symbolic => PolyQ::monomial(BigRational::one(), d),
            TMode::Evaluated(v) => PolyQ::constant(num_traits::pow(v.clone(), d)),
        }
    }

    fn apply(&self, c: &PolyQ) -> PolyQ {
        match self {
            TMode::Symbolic => c.clone(),
            TMode::Evaluated(v) => PolyQ::constant(c.eval(v)),
        }
    }
}

/// An element of `Hom([s], [k])`, kept canonical: no zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Morphism {
    spec: FieldSpec,
    s: usize,
    k: usize,
    terms: BTreeMap<Relation, PolyQ>,
}

impl Morphism {
    pub fn zero(spec: &FieldSpec, s: usize, k: usize) -> Morphism {
        Morphism { spec: spec.clone(), s, k, terms: BTreeMap::new() }
    }

    /// The basis morphism `f_R`.
    pub fn from_relation(r: Relation) -> Morphism {
        let mut m = Morphism::zero(r.spec(), r.s(), r.k());
        m.terms.insert(r, PolyQ::one());
        m
    }

    /// A scalar `c ∈ Hom([0],[0])`.
    pub fn scalar(spec: &FieldSpec, c: PolyQ) -> Morphism {
        Morphism::from_relation(Relation::zero(spec, 0, 0)).scale(&c)
    }

    /// Builds from a list of terms, merging duplicates.
    pub fn from_terms(spec: &FieldSpec, s: usize, k: usize, terms: impl IntoIterator<Item = (Relation, PolyQ)>) -> Result<Morphism> {
        let mut m = Morphism::zero(spec, s, k);
        for (r, c) in terms {
            m.check_relation(&r)?;
            m.accumulate(r, c);
        }
        Ok(m)
    }

    fn check_relation(&self, r: &Relation) -> Result<()> {
        if r.spec() != &self.spec {
            return Err(Error::FieldMismatch(r.spec().to_string(), self.spec.to_string()));
        }
        if (r.s(), r.k()) != (self.s, self.k) {
            return Err(Error::ArityMismatch(format!("{}->{} term in a {}->{} morphism", r.s(), r.k(), self.s, self.k)));
        }
        Ok(())
    }

    fn accumulate(&mut self, r: Relation, c: PolyQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(r) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Terms in canonical relation order.
    pub fn terms(&self) -> impl Iterator<Item = (&Relation, &PolyQ)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, r: &Relation) -> PolyQ {
        self.terms.get(r).cloned().unwrap_or_else(PolyQ::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether some coefficient involves `t`.
    pub fn has_t(&self) -> bool {
        self.terms.values().any(|c| !c.is_constant())
    }

    fn check_same_hom(&self, other: &Morphism) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch(self.spec.to_string(), other.spec.to_string()));
        }
        if (self.s, self.k) != (other.s, other.k) {
            return Err(Error::ArityMismatch(format!("{}->{} plus {}->{}", self.s, self.k, other.s, other.k)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        self.check_same_hom(other)?;
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.accumulate(r.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Morphism) -> Result<Morphism> {
        self.add(&other.scale(&PolyQ::from_int(-1)))
    }

    pub fn scale(&self, c: &PolyQ) -> Morphism {
        let mut out = Morphism::zero(&self.spec, self.s, self.k);
        for (r, x) in &self.terms {
            out.accumulate(r.clone(), x * c);
        }
        out
    }

    /// Substitutes a value for `t` in every coefficient.
    pub fn evaluate(&self, t: &BigRational) -> Morphism {
        let mode = TMode::Evaluated(t.clone());
        let mut out = Morphism::zero(&self.spec, self.s, self.k);
        for (r, c) in &self.terms {
            out.accumulate(r.clone(), mode.apply(c));
        }
        out
    }

    /// The coefficient of an endomorphism of `[0]`, read as a scalar.
    pub fn as_scalar(&self) -> Result<PolyQ> {
        if (self.s, self.k) != (0, 0) {
            return Err(Error::ArityMismatch(format!("{}->{} is not a scalar", self.s, self.k)));
        }
        Ok(self.coefficient(&Relation::zero(&self.spec, 0, 0)))
    }
}

impl fmt::Display for Morphism {
    /// `c1 * rel(...) + c2 * rel(...)`, or `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.coeffs().iter().filter(|x| !x.is_zero()).count() > 1 {
                write!(f, "({c}) * {r}")?;
            } else {
                write!(f, "{c} * {r}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism[{}->{}]({self})", self.s, self.k)
    }
}

struct TermList<'a>(&'a BTreeMap<Relation, PolyQ>);

impl Serialize for TermList<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.0.len()))?;
        for (r, c) in self.0 {
            seq.serialize_element(&TermEntry(r, c))?;
        }
        seq.end()
    }
}

struct TermEntry<'a>(&'a Relation, &'a PolyQ);

impl Serialize for TermEntry<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = ser.serialize_map(Some(2))?;
        m.serialize_entry("coeff", &self.1.to_string())?;
        m.serialize_entry("rel", &self.0.basis().to_codes())?;
        m.end()
    }
}

impl Serialize for Morphism {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("Morphism", 4)?;
        st.serialize_field("q", &self.spec)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("terms", &TermList(&self.terms))?;
        st.end()
    }
}

/// `f ∘ g` for `g: [s] -> [k]`, `f: [k] -> [l]`.
pub fn compose(f: &Morphism, g: &Morphism, mode: &TMode) -> Result<Morphism> {
    if f.spec != g.spec {
        return Err(Error::FieldMismatch(f.spec.to_string(), g.spec.to_string()));
    }
    if g.k != f.s {
        return Err(Error::ArityMismatch(format!("{}->{} after {}->{}", f.s, f.k, g.s, g.k)));
    }
    let mut out = Morphism::zero(&f.spec, g.s, f.k);
    for (s_rel, c_s) in &f.terms {
        for (r_rel, c_r) in &g.terms {
            let (composite, d) = relcalc::star(r_rel, s_rel)?;
            let c = &(&mode.apply(c_s) * &mode.apply(c_r)) * &mode.power(d);
            out.accumulate(composite, c);
        }
    }
    Ok(out)
}

/// `f ⊗ g`.
pub fn tensor(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    if f.spec != g.spec {
        return Err(Error::FieldMismatch(f.spec.to_string(), g.spec.to_string()));
    }
    let mut out = Morphism::zero(&f.spec, f.s + g.s, f.k + g.k);
    for (r1, c1) in &f.terms {
        for (r2, c2) in &g.terms {
            out.accumulate(relcalc::product(r1, r2)?, c1 * c2);
        }
    }
    Ok(out)
}

pub fn identity(spec: &FieldSpec, k: usize) -> Morphism {
    Morphism::from_relation(relcalc::identity_relation(spec, k))
}

/// The symmetry `[l] ⊗ [k] -> [k] ⊗ [l]`.
pub fn symmetry(spec: &FieldSpec, l: usize, k: usize) -> Morphism {
    Morphism::from_relation(relcalc::sigma_relation(spec, l, k))
}

/// Strand `i` goes to position `p[i]` (0-based).
pub fn permutation(spec: &FieldSpec, p: &[usize]) -> Result<Morphism> {
    Ok(Morphism::from_relation(relcalc::permutation_relation(spec, p)?))
}

/// `μ_A: [d] -> [r]` for `A: r x d`.
pub fn mu_morphism(a: &MatFq) -> Morphism {
    Morphism::from_relation(relcalc::mu_relation(a))
}

fn eval(t: &Term, spec: &FieldSpec) -> Morphism {
    dsl::eval_formal(t, spec, &TMode::Symbolic).expect("builder terms are well typed")
}

/// Position-wise pairing `[2k] -> [0]`.
pub fn ev_bar(spec: &FieldSpec, k: usize) -> Morphism {
    eval(&build::ev_bar(k), spec)
}

/// Position-wise copairing `[0] -> [2k]`.
pub fn coev_bar(spec: &FieldSpec, k: usize) -> Morphism {
    eval(&build::coev_bar(k), spec)
}

/// Dual `[k] -> [s]` of `f: [s] -> [k]`, computed as a snake.
pub fn dual(f: &Morphism) -> Result<Morphism> {
    let (s, k, spec) = (f.s, f.k, &f.spec);
    let sym = TMode::Symbolic;
    let open = tensor(&identity(spec, k), &coev_bar(spec, s))?;
    let middle = tensor(&tensor(&identity(spec, k), f)?, &identity(spec, s))?;
    let close = tensor(&ev_bar(spec, k), &identity(spec, s))?;
    compose(&close, &compose(&middle, &open, &sym)?, &sym)
}

/// Categorical trace of an endomorphism.
pub fn trace(h: &Morphism, mode: &TMode) -> Result<PolyQ> {
    if h.s != h.k {
        return Err(Error::ArityMismatch(format!("trace of {}->{}", h.s, h.k)));
    }
    let spec = &h.spec;
    let inner = compose(&tensor(h, &identity(spec, h.s))?, &coev_bar(spec, h.s), mode)?;
    compose(&ev_bar(spec, h.s), &inner, mode)?.as_scalar()
}

/// `gram[i][j] = trace(dual(f_{R_j}) ∘ f_{R_i})` over `Rel_{s,k}` in canonical order.
pub fn gram(spec: &FieldSpec, s: usize, k: usize, mode: &TMode) -> Result<(Vec<Relation>, Vec<Vec<PolyQ>>)> {
    let rels: Vec<Relation> = enumerate_subspaces(spec, s + k, None)?.into_iter().map(|m| Relation::new(s, k, m)).collect::<Result<_>>()?;
    let basis: Vec<Morphism> = rels.iter().cloned().map(Morphism::from_relation).collect();
    let duals: Vec<Morphism> = basis.iter().map(dual).collect::<Result<_>>()?;
    let mut g = vec![vec![PolyQ::zero(); rels.len()]; rels.len()];
    for (i, fi) in basis.iter().enumerate() {
        for (j, dj) in duals.iter().enumerate() {
            g[i][j] = trace(&compose(dj, fi, mode)?, mode)?;
        }
    }
    Ok((rels, g))
}

/// `|Rel_{s,k}|`.
pub fn count_relations(spec: &FieldSpec, s: usize, k: usize) -> num_bigint::BigUint {
    (0..=s + k).map(|d| crate::matrix::gaussian_binomial(spec, s + k, d)).sum()
}

/// `φ_R = (z*)^{⊗dim R} ∘ μ_B : [s+k] -> [0]`, `B` the basis of `R`.
pub fn phi(r: &Relation) -> Result<Morphism> {
    let spec = r.spec();
    let z_star = Morphism::from_relation(Relation::full(spec, 1, 0));
    let mut zs = identity(spec, 0);
    for _ in 0..r.dim() {
        zs = tensor(&zs, &z_star)?;
    }
    compose(&zs, &mu_morphism(r.basis()), &TMode::Symbolic)
}

/// `T(f) = ev_bar_k ∘ (f ⊗ Id_k) : [s+k] -> [0]`.
pub fn t_iso(f: &Morphism) -> Result<Morphism> {
    let spec = &f.spec;
    compose(&ev_bar(spec, f.k), &tensor(f, &identity(spec, f.k))?, &TMode::Symbolic)
}

/// Inverse of [`t_iso`]: `(φ ⊗ Id_k) ∘ (Id_s ⊗ coev_bar_k) : [s] -> [k]`.
pub fn t_inv(phi: &Morphism, s: usize, k: usize) -> Result<Morphism> {
    if (phi.s, phi.k) != (s + k, 0) {
        return Err(Error::ArityMismatch(format!("pairing form {}->{} split as {s}+{k}", phi.s, phi.k)));
    }
    let spec = &phi.spec;
    compose(&tensor(phi, &identity(spec, k))?, &tensor(&identity(spec, s), &coev_bar(spec, k))?, &TMode::Symbolic)
}

/// `φ1 ⊛ φ2 = (φ1 ⊗ φ2) ∘ (Id_s ⊗ coev_bar_k ⊗ Id_l)` for `φ1: [s+k] -> [0]`, `φ2: [k+l] -> [0]`.
pub fn ast(phi1: &Morphism, phi2: &Morphism, k: usize) -> Result<Morphism> {
    if phi1.k != 0 || phi2.k != 0 || phi1.s < k || phi2.s < k {
        return Err(Error::ArityMismatch(format!("⊛ of {}->{} and {}->{} over {k}", phi1.s, phi1.k, phi2.s, phi2.k)));
    }
    let spec = &phi1.spec;
    let (s, l) = (phi1.s - k, phi2.s - k);
    let copair = tensor(&tensor(&identity(spec, s), &coev_bar(spec, k))?, &identity(spec, l))?;
    compose(&tensor(phi1, phi2)?, &copair, &TMode::Symbolic)
}

/// `f_R = Σ_{S ⊇ R} f̆_{O_S}`: every superspace with coefficient 1.
pub fn orbit_expand(r: &Relation) -> Result<BTreeMap<Relation, BigRational>> {
    let mut out = BTreeMap::new();
    for m in enumerate_subspaces(r.spec(), r.s() + r.k(), None)? {
        let sup = Relation::new(r.s(), r.k(), m)?;
        if sup.dim() >= r.dim() && sup.contains(r)? {
            out.insert(sup, BigRational::one());
        }
    }
    Ok(out)
}

/// The morphism `Σ c_S f̆_{O_S}` rewritten in the basis `f_R`.
pub fn orbit_invert(spec: &FieldSpec, s: usize, k: usize, orbit: &BTreeMap<Relation, BigRational>) -> Result<Morphism> {
    // c_S = Σ_{T ⊆ S} a_T, solved upward through the lattice
    let mut solved: Vec<(Relation, BigRational)> = Vec::new();
    for m in enumerate_subspaces(spec, s + k, None)? {
        let sub = Relation::new(s, k, m)?;
        let mut a = orbit.get(&sub).cloned().unwrap_or_else(BigRational::zero);
        for (t, at) in &solved {
            if t.dim() < sub.dim() && sub.contains(t)? {
                a -= at;
            }
        }
        if !a.is_zero() {
            solved.push((sub, a));
        }
    }
    Morphism::from_terms(spec, s, k, solved.into_iter().map(|(r, a)| (r, PolyQ::constant(a))))
}

/// A generator term evaluating to exactly `f_R`.
pub fn decompose_generators(r: &Relation) -> Term {
    build::decompose(r)
}

#[cfg(test)]
mod tests;
