//! The specialization functor `F_n`: `[k]` goes to the `k`-th tensor power of
//! the permutation module on `V = F_q^n`, and `f_R` to an explicit 0/1 matrix.
//!
//! A vector `v ∈ V` has code `Σ_c code(v_c) q^c`; a tuple `(v_1|...|v_s)` has
//! index `Σ_i code(v_i) (q^n)^(i-1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;
use serde_json::{json, Value};

use crate::category::Morphism;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::linmap::{checked_size, rational_rank, LinMap, SparseVec, COLUMN_LIMIT};
use crate::matrix::{enumerate_subspaces, MatFq};
use crate::relcalc::Relation;

/// A linear map between tensor powers of `C[F_q^n]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConcreteMap {
    spec: FieldSpec,
    n: usize,
    map: LinMap,
}

impl ConcreteMap {
    pub fn new(spec: &FieldSpec, n: usize, map: LinMap) -> Result<ConcreteMap> {
        if map.base() != vector_count(spec, n)? {
            return Err(Error::ShapeMismatch(format!("basis of size {} over {spec} with n = {n}", map.base())));
        }
        Ok(ConcreteMap { spec: spec.clone(), n, map })
    }

    pub fn identity(spec: &FieldSpec, n: usize, k: usize) -> Result<ConcreteMap> {
        ConcreteMap::new(spec, n, LinMap::identity(vector_count(spec, n)?, k)?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.map.dom()
    }

    pub fn k(&self) -> usize {
        self.map.cod()
    }

    pub fn map(&self) -> &LinMap {
        &self.map
    }

    pub fn into_map(self) -> LinMap {
        self.map
    }

    pub fn get(&self, row: u64, col: u64) -> BigRational {
        self.map.get(row, col)
    }

    /// `{"n","s","k","entries":[[row,col,value],...]}` sorted by `(row, col)`;
    /// integral values are JSON numbers, others strings like `"3/2"`.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self.map.entries().into_iter().map(|(i, j, v)| json!([i, j, rational_json(&v)])).collect();
        json!({"n": self.n, "s": self.s(), "k": self.k(), "entries": entries})
    }
}

impl Serialize for ConcreteMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(ser)
    }
}

pub(crate) fn rational_json(v: &BigRational) -> Value {
    if v.is_integer() {
        if let Some(i) = v.to_integer().to_i64() {
            return json!(i);
        }
    }
    Value::String(v.to_string())
}

/// `q^n`, the number of vectors in `F_q^n`.
pub fn vector_count(spec: &FieldSpec, n: usize) -> Result<u64> {
    checked_size(spec.q() as u64, n, 1 << 24)
}

pub(crate) fn decode_vector(spec: &FieldSpec, n: usize, mut code: u64) -> Vec<FieldElement> {
    let q = spec.q() as u64;
    (0..n)
        .map(|_| {
            let c = code % q;
            code /= q;
            FieldElement((c) as u32)
        })
        .collect()
}

pub(crate) fn encode_vector(spec: &FieldSpec, v: &[FieldElement]) -> u64 {
    let q = spec.q() as u64;
    v.iter().rev().fold(0, |acc, x| acc * q + x.code() as u64)
}

/// Splits a tuple index into its `count` vectors.
pub(crate) fn decode_tuple(spec: &FieldSpec, n: usize, count: usize, mut idx: u64) -> Vec<Vec<FieldElement>> {
    let base = spec.q().pow(n as u32) as u64;
    (0..count)
        .map(|_| {
            let v = decode_vector(spec, n, idx % base);
            idx /= base;
            v
        })
        .collect()
}

pub(crate) fn encode_tuple(spec: &FieldSpec, n: usize, vs: &[Vec<FieldElement>]) -> u64 {
    let base = spec.q().pow(n as u32) as u64;
    vs.iter().rev().fold(0, |acc, v| acc * base + encode_vector(spec, v))
}

/// `Σ_i c_i v_i` coordinatewise.
fn combine(spec: &FieldSpec, n: usize, coeffs: &[FieldElement], vs: &[Vec<FieldElement>]) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::ZERO; n];
    for (c, v) in coeffs.iter().zip(vs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o = spec.add(*o, spec.mul(*c, *x));
        }
    }
    out
}

/// `F_n(f_R)`: entry `(w, v)` is 1 iff `(v|w)` is orthogonal to every row of `R`.
///
/// Per input column the valid outputs form a coset of the solution space, so
/// the cost is `q^{ns}` times the number of solutions.
pub fn f_r_matrix(r: &Relation, n: usize) -> Result<ConcreteMap> {
    let spec = r.spec();
    let (s, k) = (r.s(), r.k());
    let base = vector_count(spec, n)?;
    checked_size(base, s.max(k), 1 << 22)?;
    // columns reordered as [cod | dom]
    let order: Vec<usize> = (s..s + k).chain(0..s).collect();
    let (red, _) = r.basis().select_columns(&order).rref();
    let pivots = red.pivots();
    let solve: Vec<usize> = (0..pivots.len()).filter(|&i| pivots[i] < k).collect();
    let checks: Vec<usize> = (0..pivots.len()).filter(|&i| pivots[i] >= k).collect();
    let free: Vec<usize> = (0..k).filter(|c| !pivots.contains(c)).collect();
    let free_count = checked_size(base, free.len(), 1 << 40)?;
    let neg_one = spec.neg(FieldElement::ONE);
    let dom_coeffs = |row: usize| -> Vec<FieldElement> { (0..s).map(|i| red.get(row, k + i)).collect() };

    let map = LinMap::from_columns(base, s, k, |col| {
        let vs = decode_tuple(spec, n, s, col);
        let mut out = SparseVec::new();
        if checks.iter().any(|&row| combine(spec, n, &dom_coeffs(row), &vs).iter().any(|x| !x.is_zero())) {
            return out;
        }
        // pivot w_p = -(Σ_i D_i v_i + Σ_free C_f w_f)
        let offsets: Vec<Vec<FieldElement>> = solve.iter().map(|&row| combine(spec, n, &dom_coeffs(row), &vs)).collect();
        let mut ws = vec![vec![FieldElement::ZERO; n]; k];
        for assignment in 0..free_count {
            let chosen = decode_tuple(spec, n, free.len(), assignment);
            for (f, w) in free.iter().zip(&chosen) {
                ws[*f] = w.clone();
            }
            for (idx, &row) in solve.iter().enumerate() {
                let fc: Vec<FieldElement> = free.iter().map(|&f| red.get(row, f)).collect();
                let partial = combine(spec, n, &fc, &chosen);
                let total = combine(spec, n, &[FieldElement::ONE, FieldElement::ONE], &[offsets[idx].clone(), partial]);
                ws[pivots[row]] = total.iter().map(|&x| spec.mul(neg_one, x)).collect();
            }
            out.insert(encode_tuple(spec, n, &ws), BigRational::one());
        }
        out
    })?;
    ConcreteMap::new(spec, n, map)
}

/// `F_n(f)` with `t = q^n`.
pub fn specialize(f: &Morphism, n: usize) -> Result<ConcreteMap> {
    let spec = f.spec();
    let base = vector_count(spec, n)?;
    let t = BigRational::from_integer(BigInt::from(base));
    let mut acc = LinMap::zero(base, f.s(), f.k())?;
    for (r, c) in f.terms() {
        let c = c.eval(&t);
        acc = acc.add(&f_r_matrix(r, n)?.map.scale(&c))?;
    }
    ConcreteMap::new(spec, n, acc)
}

fn check_pair(a: &ConcreteMap, b: &ConcreteMap) -> Result<()> {
    if a.spec != b.spec || a.n != b.n {
        return Err(Error::FieldMismatch(format!("{} n={}", a.spec, a.n), format!("{} n={}", b.spec, b.n)));
    }
    Ok(())
}

/// `a ∘ b`.
pub fn concrete_compose(a: &ConcreteMap, b: &ConcreteMap) -> Result<ConcreteMap> {
    check_pair(a, b)?;
    ConcreteMap::new(&a.spec, a.n, a.map.compose(&b.map)?)
}

/// `a ⊗ b`, `a` on the leading tensor factors.
pub fn concrete_tensor(a: &ConcreteMap, b: &ConcreteMap) -> Result<ConcreteMap> {
    check_pair(a, b)?;
    ConcreteMap::new(&a.spec, a.n, a.map.kron(&b.map)?)
}

/// Rank over Q of the matrices `F_n(f_R)`, `R ∈ Rel_{s,k}`, and whether they
/// are linearly independent.
pub fn independence_check(spec: &FieldSpec, s: usize, k: usize, n: usize) -> Result<(usize, bool)> {
    let rels = enumerate_subspaces(spec, s + k, None)?;
    let mut vectors = Vec::with_capacity(rels.len());
    for m in rels {
        let f = f_r_matrix(&Relation::new(s, k, m)?, n)?;
        let rows = f.map.nrows();
        let mut v = SparseVec::new();
        for (i, j, x) in f.map.entries() {
            v.insert(j * rows + i, x);
        }
        vectors.push(v);
    }
    let rank = rational_rank(&vectors);
    Ok((rank, rank == vectors.len()))
}

/// `F_{n+1}(f_R)` restricted to tuples from `F_q^n ⊂ F_q^{n+1}` (last
/// coordinate zero) lands in such tuples and agrees with `F_n(f_R)`.
pub fn rel_infty_stability(r: &Relation, n: usize) -> Result<bool> {
    if !r.is_rel_infty() {
        return Err(Error::NotRelInfty);
    }
    let spec = r.spec();
    let small = f_r_matrix(r, n)?;
    let big = f_r_matrix(r, n + 1)?;
    let embed = |idx: u64, count: usize| -> u64 {
        let mut vs = decode_tuple(spec, n, count, idx);
        vs.iter_mut().for_each(|v| v.push(FieldElement::ZERO));
        encode_tuple(spec, n + 1, &vs)
    };
    for col in 0..small.map.ncols() {
        let expected: SparseVec = small.map.column(col).iter().map(|(&i, x)| (embed(i, r.k()), x.clone())).collect();
        if big.map.column(embed(col, r.s())) != &expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Row space of the relations `{u : Σ_i u_i x_i = 0}` satisfied by a tuple.
fn tuple_relations(spec: &FieldSpec, n: usize, xs: &[Vec<FieldElement>]) -> MatFq {
    let width = xs.len();
    let mut m = MatFq::zeros(spec, n, width);
    for (i, x) in xs.iter().enumerate() {
        for (c, &v) in x.iter().enumerate() {
            m.set(c, i, v);
        }
    }
    m.kernel()
}

/// The orbit matrix `f̆_{O_S}`: entry `(w, v)` is 1 iff the relations
/// satisfied by `(v|w)` are exactly `S`.
pub fn orbit_matrix(sub: &Relation, n: usize) -> Result<ConcreteMap> {
    let spec = sub.spec();
    let (s, k) = (sub.s(), sub.k());
    let base = vector_count(spec, n)?;
    checked_size(base, s + k, COLUMN_LIMIT)?;
    let rows = base.pow(k as u32);
    let map = LinMap::from_columns(base, s, k, |col| {
        let mut out = SparseVec::new();
        let vs = decode_tuple(spec, n, s, col);
        for row in 0..rows {
            let mut xs = vs.clone();
            xs.extend(decode_tuple(spec, n, k, row));
            if &tuple_relations(spec, n, &xs) == sub.basis() {
                out.insert(row, BigRational::one());
            }
        }
        out
    })?;
    ConcreteMap::new(spec, n, map)
}

/// Specializes `Σ_S c_S f̆_{O_S}`.
pub fn specialize_orbit_sum(
    spec: &FieldSpec,
    s: usize,
    k: usize,
    n: usize,
    orbit: &std::collections::BTreeMap<Relation, BigRational>,
) -> Result<ConcreteMap> {
    let mut acc = LinMap::zero(vector_count(spec, n)?, s, k)?;
    for (sub, c) in orbit {
        acc = acc.add(&orbit_matrix(sub, n)?.map.scale(c))?;
    }
    ConcreteMap::new(spec, n, acc)
}

/// Whether `F_n(f_R)` commutes with the action of `g ∈ GL_n(F_q)` on tuples.
pub fn equivariance(r: &Relation, n: usize, g: &MatFq) -> Result<bool> {
    let spec = r.spec();
    if !g.is_invertible() || g.rows() != n {
        return Err(Error::ShapeMismatch(format!("{}x{} is not in GL_{n}", g.rows(), g.cols())));
    }
    let f = f_r_matrix(r, n)?;
    let act = |idx: u64, count: usize| -> u64 {
        let vs: Vec<Vec<FieldElement>> = decode_tuple(spec, n, count, idx)
            .into_iter()
            .map(|v| (0..n).map(|i| (0..n).fold(FieldElement::ZERO, |a, j| spec.add(a, spec.mul(g.get(i, j), v[j])))).collect())
            .collect();
        encode_tuple(spec, n, &vs)
    };
    for col in 0..f.map.ncols() {
        let moved: SparseVec = f.map.column(col).iter().map(|(&i, x)| (act(i, r.k()), x.clone())).collect();
        if f.map.column(act(col, r.s())) != &moved {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every entry is a nonnegative integer.
pub fn is_nonnegative_integral(m: &ConcreteMap) -> bool {
    m.map.entries().iter().all(|(_, _, x)| x.is_integer() && !x.is_negative())
}
