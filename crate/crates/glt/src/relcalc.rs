//! Typed subspaces R ⊂ F_q^{s+k} and their composition calculus.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::matrix::MatFq;

/// A subspace of F_q^{s+k} read as a morphism `[s] -> [k]`. The first `s`
/// coordinates are the domain block, the last `k` the codomain block.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    s: usize,
    k: usize,
    basis: MatFq,
}

impl Relation {
    /// The row space of `m`, which must have `s + k` columns.
    pub fn new(s: usize, k: usize, m: MatFq) -> Result<Relation> {
        if m.cols() != s + k {
            return Err(Error::ShapeMismatch(format!("{} columns for arity {s}->{k}", m.cols())));
        }
        Ok(Relation { s, k, basis: m.rref().0 })
    }

    pub fn from_rows(spec: &FieldSpec, s: usize, k: usize, rows: &[Vec<u32>]) -> Result<Relation> {
        Relation::new(s, k, MatFq::from_rows(spec, s + k, rows)?)
    }

    /// `{0} ⊂ F_q^{s+k}`.
    pub fn zero(spec: &FieldSpec, s: usize, k: usize) -> Relation {
        Relation { s, k, basis: MatFq::zeros(spec, 0, s + k) }
    }

    /// The whole of F_q^{s+k}.
    pub fn full(spec: &FieldSpec, s: usize, k: usize) -> Relation {
        Relation { s, k, basis: MatFq::identity(spec, s + k) }
    }

    pub fn spec(&self) -> &FieldSpec {
        self.basis.spec()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// RREF basis with `s + k` columns.
    pub fn basis(&self) -> &MatFq {
        &self.basis
    }

    /// Orthogonal complement, with the same arities.
    pub fn perp(&self) -> Relation {
        Relation { s: self.s, k: self.k, basis: self.basis.perp() }
    }

    /// The same subspace with a different split of its coordinates.
    pub fn retype(&self, s: usize, k: usize) -> Result<Relation> {
        Relation::new(s, k, self.basis.clone())
    }

    /// Whether `other ⊂ self` as subspaces of the same ambient space.
    pub fn contains(&self, other: &Relation) -> Result<bool> {
        self.basis.row_space_contains(&other.basis)
    }

    /// Same subspace with domain and codomain blocks exchanged.
    pub fn swap_blocks(&self) -> Relation {
        let cols: Vec<usize> = (self.s..self.s + self.k).chain(0..self.s).collect();
        Relation::new(self.k, self.s, self.basis.select_columns(&cols)).expect("width preserved")
    }

    /// Whether the projection onto the codomain block is onto F_q^k.
    pub fn is_rel_infty(&self) -> bool {
        let cod: Vec<usize> = (self.s..self.s + self.k).collect();
        self.basis.select_columns(&cod).rank() == self.k
    }

    /// `(A, A')` with `R = Row[-A I_k; A' 0]`, `A'` in RREF of full row rank.
    pub fn rel_infty_normal_form(&self) -> Result<(MatFq, MatFq)> {
        let (s, k) = (self.s, self.k);
        let order: Vec<usize> = (s..s + k).chain(0..s).collect();
        let (r, _) = self.basis.select_columns(&order).rref();
        let pivots = r.pivots();
        if pivots.len() < k || pivots[..k].iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::NotRelInfty);
        }
        let dom: Vec<usize> = (k..k + s).collect();
        let head: Vec<usize> = (0..k).collect();
        let tail: Vec<usize> = (k..r.rows()).collect();
        let a = r.select_rows(&head).select_columns(&dom).neg();
        let a_prime = r.select_rows(&tail).select_columns(&dom);
        Ok((a, a_prime))
    }

    /// `Row[-A I_k; A' 0]` for `A: k x s`, `A': d x s`.
    pub fn from_normal_form(a: &MatFq, a_prime: &MatFq) -> Result<Relation> {
        let (k, s) = (a.rows(), a.cols());
        if a_prime.cols() != s {
            return Err(Error::ShapeMismatch(format!("A' has {} columns, A has {s}", a_prime.cols())));
        }
        let top = a.neg().hstack(&MatFq::identity(a.spec(), k))?;
        let bottom = a_prime.hstack(&MatFq::zeros(a.spec(), a_prime.rows(), k))?;
        Relation::new(s, k, top.vstack(&bottom)?)
    }

    /// Elementwise comparison key used by the canonical order.
    fn order_key(&self) -> (usize, usize, usize, Vec<usize>, Vec<FieldElement>) {
        (self.s, self.k, self.dim(), self.basis.pivots(), self.basis.entries().to_vec())
    }
}

impl Ord for Relation {
    /// Arities first, then the subspace enumeration order: dimension, pivot set, entries.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.spec().p(), self.spec().e()).cmp(&(other.spec().p(), other.spec().e())).then_with(|| self.order_key().cmp(&other.order_key()))
    }
}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Relation {
    /// `rel(q;s,k;[[row],...])`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rel({};{},{};{})", self.spec().q(), self.s, self.k, self.basis)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("Relation", 4)?;
        st.serialize_field("q", self.spec())?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("basis", &self.basis.to_codes())?;
        st.end()
    }
}

fn same_field(a: &Relation, b: &Relation) -> Result<()> {
    if a.spec() != b.spec() {
        return Err(Error::FieldMismatch(a.spec().to_string(), b.spec().to_string()));
    }
    Ok(())
}

/// Places the rows of `m` into a wider zero matrix, column `j` of `m` going to `cols[j]`.
fn embed(m: &MatFq, width: usize, cols: &[usize]) -> MatFq {
    let mut out = MatFq::zeros(m.spec(), m.rows(), width);
    for i in 0..m.rows() {
        for (j, &c) in cols.iter().enumerate() {
            out.set(i, c, m.get(i, j));
        }
    }
    out
}

/// Composite relation `S⋆R : [s] -> [l]` of `R: [s] -> [k]` then `S: [k] -> [l]`,
/// with the defect `d = k - dim(projection of (R,0)+(0,S) onto the middle block)`.
pub fn star(r: &Relation, s_rel: &Relation) -> Result<(Relation, usize)> {
    same_field(r, s_rel)?;
    if r.k != s_rel.s {
        return Err(Error::ArityMismatch(format!("compose {}->{} after {}->{}", s_rel.s, s_rel.k, r.s, r.k)));
    }
    let (s, k, l) = (r.s, r.k, s_rel.k);
    // middle block first, then the outer coordinates in [dom | cod] order
    let w = s + k + l;
    let r_cols: Vec<usize> = (k..k + s).chain(0..k).collect();
    let s_cols: Vec<usize> = (0..k).chain(k + s..w).collect();
    let sum = embed(r.basis(), w, &r_cols).vstack(&embed(s_rel.basis(), w, &s_cols))?;
    let (red, _) = sum.rref();
    let pivots = red.pivots();
    let middle_rank = pivots.iter().filter(|&&p| p < k).count();
    let outer_rows: Vec<usize> = (middle_rank..red.rows()).collect();
    let outer_cols: Vec<usize> = (k..w).collect();
    let composite = Relation::new(s, l, red.select_rows(&outer_rows).select_columns(&outer_cols))?;
    Ok((composite, k - middle_rank))
}

/// `R1 × R2` in the ambient order `[dom1 | dom2 | cod1 | cod2]`.
pub fn product(r1: &Relation, r2: &Relation) -> Result<Relation> {
    same_field(r1, r2)?;
    let (s1, k1, s2, k2) = (r1.s, r1.k, r2.s, r2.k);
    let w = s1 + s2 + k1 + k2;
    let c1: Vec<usize> = (0..s1).chain(s1 + s2..s1 + s2 + k1).collect();
    let c2: Vec<usize> = (s1..s1 + s2).chain(s1 + s2 + k1..w).collect();
    let m = embed(r1.basis(), w, &c1).vstack(&embed(r2.basis(), w, &c2))?;
    Relation::new(s1 + s2, k1 + k2, m)
}

/// Knop's composition in the orthogonal indexing: the image of the fiber
/// product `Rp ×_{F_q^k} Sp` in F_q^{s+l}, and the dimension `e` of its kernel.
pub fn knop_diamond(rp: &Relation, sp: &Relation) -> Result<(Relation, usize)> {
    same_field(rp, sp)?;
    if rp.k != sp.s {
        return Err(Error::ArityMismatch(format!("diamond of {}->{} with {}->{}", rp.s, rp.k, sp.s, sp.k)));
    }
    let (s, k, l) = (rp.s, rp.k, sp.k);
    let w = s + k + l;
    let spec = rp.spec();
    // Rp × F^l and F^s × Sp inside F^{s+k+l}
    let free_l = embed(&MatFq::identity(spec, l), w, &(s + k..w).collect::<Vec<_>>());
    let free_s = embed(&MatFq::identity(spec, s), w, &(0..s).collect::<Vec<_>>());
    let left = embed(rp.basis(), w, &(0..s + k).collect::<Vec<_>>()).vstack(&free_l)?;
    let right = embed(sp.basis(), w, &(s..w).collect::<Vec<_>>()).vstack(&free_s)?;
    let fiber = left.intersect(&right)?;
    // outer coordinates first
    let order: Vec<usize> = (0..s).chain(s + k..w).chain(s..s + k).collect();
    let (red, _) = fiber.select_columns(&order).rref();
    let outer = red.pivots().iter().filter(|&&p| p < s + l).count();
    let image = red.select_rows(&(0..outer).collect::<Vec<_>>()).select_columns(&(0..s + l).collect::<Vec<_>>());
    Ok((Relation::new(s, l, image)?, red.rows() - outer))
}

fn from_pairs(spec: &FieldSpec, s: usize, k: usize, pairs: &[(usize, usize)]) -> Relation {
    // each pair (i, j) contributes the vector e_i - e_j
    let mut m = MatFq::zeros(spec, pairs.len(), s + k);
    let minus_one = spec.neg(FieldElement::ONE);
    for (row, &(i, j)) in pairs.iter().enumerate() {
        m.set(row, i, FieldElement::ONE);
        m.set(row, j, minus_one);
    }
    Relation::new(s, k, m).expect("width is s+k")
}

/// The identity `[k] -> [k]`: `{(a, -a)}`.
pub fn identity_relation(spec: &FieldSpec, k: usize) -> Relation {
    from_pairs(spec, k, k, &(0..k).map(|i| (i, k + i)).collect::<Vec<_>>())
}

/// The symmetry `[l+k] -> [k+l]`: `{(a, b, -b, -a)}`.
pub fn sigma_relation(spec: &FieldSpec, l: usize, k: usize) -> Relation {
    let n = l + k;
    let pairs: Vec<(usize, usize)> = (0..l).map(|i| (i, n + k + i)).chain((0..k).map(|j| (l + j, n + j))).collect();
    from_pairs(spec, n, n, &pairs)
}

/// Permutation relation: strand `i` of the domain goes to position `p[i]`.
pub fn permutation_relation(spec: &FieldSpec, p: &[usize]) -> Result<Relation> {
    let k = p.len();
    let mut seen = vec![false; k];
    for &x in p {
        if x >= k || std::mem::replace(&mut seen[x], true) {
            return Err(Error::InvalidPermutation(p.to_vec()));
        }
    }
    Ok(from_pairs(spec, k, k, &p.iter().enumerate().map(|(i, &x)| (i, k + x)).collect::<Vec<_>>()))
}

/// Nested pairing `[2k] -> [0]`: `{(a_1..a_k, -a_k..-a_1)}`.
pub fn ev_relation(spec: &FieldSpec, k: usize) -> Relation {
    from_pairs(spec, 2 * k, 0, &(0..k).map(|i| (i, 2 * k - 1 - i)).collect::<Vec<_>>())
}

/// Nested copairing `[0] -> [2k]`.
pub fn coev_relation(spec: &FieldSpec, k: usize) -> Relation {
    from_pairs(spec, 0, 2 * k, &(0..k).map(|i| (i, 2 * k - 1 - i)).collect::<Vec<_>>())
}

/// `Row[-A | I_r] ⊂ F_q^{d+r}` for `A: r x d`, the relation of `v ↦ A v`.
pub fn mu_relation(a: &MatFq) -> Relation {
    let m = a.neg().hstack(&MatFq::identity(a.spec(), a.rows())).expect("same row count");
    Relation::new(a.cols(), a.rows(), m).expect("width is d+r")
}

/// Relations of the named generators. `a` is required for `mu`.
pub fn generator_relation(spec: &FieldSpec, name: &str, a: Option<FieldElement>) -> Result<Relation> {
    let rows = |s: usize, k: usize, rows: &[&[i64]]| {
        let m: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|&x| spec.from_int(x).code()).collect()).collect();
        Relation::from_rows(spec, s, k, &m)
    };
    match (name, a) {
        ("eps", None) => Ok(Relation::zero(spec, 0, 1)),
        ("eps_star" | "eps*", None) => Ok(Relation::zero(spec, 1, 0)),
        ("m", None) => rows(2, 1, &[&[1, -1, 0], &[1, 0, -1]]),
        ("m_star" | "m*", None) => rows(1, 2, &[&[1, -1, 0], &[1, 0, -1]]),
        ("z", None) => Ok(Relation::full(spec, 0, 1)),
        ("z_star" | "z*", None) => Ok(Relation::full(spec, 1, 0)),
        ("plus", None) => rows(2, 1, &[&[1, 1, -1]]),
        ("sigma", None) => Ok(sigma_relation(spec, 1, 1)),
        ("ev", None) => Ok(ev_relation(spec, 1)),
        ("coev", None) => Ok(coev_relation(spec, 1)),
        ("mu", Some(a)) => {
            if a.code() >= spec.q() {
                return Err(Error::BadElement { code: a.code() as u64, q: spec.q() });
            }
            Ok(mu_relation(&MatFq::from_entries(spec, 1, 1, vec![a])))
        }
        _ => Err(Error::UnknownGenerator(name.to_string())),
    }
}
