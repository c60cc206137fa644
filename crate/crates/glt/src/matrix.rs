//! Dense matrices over F_q and the subspace toolkit built on row reduction.

use std::fmt;

use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Enumeration guard: the ambient space may hold at most this many vectors.
pub const ENUMERATION_LIMIT: u64 = 1 << 20;

/// A row-major matrix over F_q. Subspaces are represented by their RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatFq {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl MatFq {
    pub fn zeros(spec: &FieldSpec, rows: usize, cols: usize) -> MatFq {
        MatFq { spec: spec.clone(), rows, cols, entries: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(spec: &FieldSpec, n: usize) -> MatFq {
        let mut m = MatFq::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Builds a matrix from row-major element codes.
    pub fn from_codes(spec: &FieldSpec, rows: usize, cols: usize, codes: &[u32]) -> Result<MatFq> {
        if codes.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", codes.len())));
        }
        let entries = codes.iter().map(|&c| spec.elem(c as u64)).collect::<Result<_>>()?;
        Ok(MatFq { spec: spec.clone(), rows, cols, entries })
    }

    /// Builds a matrix from rows of codes; `cols` fixes the width when there are no rows.
    pub fn from_rows(spec: &FieldSpec, cols: usize, rows: &[Vec<u32>]) -> Result<MatFq> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!("row of length {} in width {cols}", bad.len())));
        }
        let codes: Vec<u32> = rows.iter().flatten().copied().collect();
        MatFq::from_codes(spec, rows.len(), cols, &codes)
    }

    pub(crate) fn from_entries(spec: &FieldSpec, rows: usize, cols: usize, entries: Vec<FieldElement>) -> MatFq {
        debug_assert_eq!(entries.len(), rows * cols);
        MatFq { spec: spec.clone(), rows, cols, entries }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Rows as vectors of codes.
    pub fn to_codes(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|a| a.code()).collect()).collect()
    }

    fn check_field(&self, other: &MatFq) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch(self.spec.to_string(), other.spec.to_string()));
        }
        Ok(())
    }

    /// Reduced row echelon form with zero rows dropped, and the rank.
    pub fn rref(&self) -> (MatFq, usize) {
        let f = &self.spec;
        let (rows, cols) = (self.rows, self.cols);
        let mut m = self.entries.clone();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| !m[r * cols + col].is_zero()) else {
                continue;
            };
            if piv != rank {
                for j in 0..cols {
                    m.swap(piv * cols + j, rank * cols + j);
                }
            }
            let inv = f.inv(m[rank * cols + col]).expect("pivot is nonzero");
            for j in col..cols {
                m[rank * cols + j] = f.mul(m[rank * cols + j], inv);
            }
            for r in 0..rows {
                if r == rank {
                    continue;
                }
                let factor = m[r * cols + col];
                if factor.is_zero() {
                    continue;
                }
                for j in col..cols {
                    let sub = f.mul(factor, m[rank * cols + j]);
                    m[r * cols + j] = f.sub(m[r * cols + j], sub);
                }
            }
            rank += 1;
        }
        m.truncate(rank * cols);
        (MatFq { spec: f.clone(), rows: rank, cols, entries: m }, rank)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Pivot column of each row, assuming `self` is in RREF.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.rows).map(|i| self.row(i).iter().position(|a| !a.is_zero()).expect("RREF has no zero rows")).collect()
    }

    pub fn matmul(&self, other: &MatFq) -> Result<MatFq> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let f = &self.spec;
        let mut out = MatFq::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// RREF basis (as rows) of `{x : A x = 0}`.
    pub fn kernel(&self) -> MatFq {
        let f = &self.spec;
        let (r, _) = self.rref();
        let pivots = r.pivots();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = MatFq::zeros(f, free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            basis.set(b, fc, FieldElement::ONE);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(b, pc, f.neg(r.get(i, fc)));
            }
        }
        basis.rref().0
    }

    /// RREF basis of the orthogonal complement of the row space.
    pub fn perp(&self) -> MatFq {
        self.kernel()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<MatFq> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("inverse of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let aug = self.hstack(&MatFq::identity(&self.spec, n))?;
        let (r, rank) = aug.rref();
        if rank < n || r.pivots().iter().any(|&p| p >= n) {
            return Err(Error::Singular);
        }
        Ok(r.select_columns(&(n..2 * n).collect::<Vec<_>>()))
    }

    pub fn transpose(&self) -> MatFq {
        let mut out = MatFq::zeros(&self.spec, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &MatFq) -> Result<MatFq> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            entries.extend_from_slice(self.row(i));
            entries.extend_from_slice(other.row(i));
        }
        Ok(MatFq { spec: self.spec.clone(), rows: self.rows, cols, entries })
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &MatFq) -> Result<MatFq> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(MatFq { spec: self.spec.clone(), rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn select_columns(&self, cols: &[usize]) -> MatFq {
        let mut entries = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            entries.extend(cols.iter().map(|&c| self.get(i, c)));
        }
        MatFq { spec: self.spec.clone(), rows: self.rows, cols: cols.len(), entries }
    }

    pub fn select_rows(&self, rows: &[usize]) -> MatFq {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            entries.extend_from_slice(self.row(r));
        }
        MatFq { spec: self.spec.clone(), rows: rows.len(), cols: self.cols, entries }
    }

    /// Elementwise negation.
    pub fn neg(&self) -> MatFq {
        let entries = self.entries.iter().map(|&a| self.spec.neg(a)).collect();
        MatFq { entries, ..self.clone() }
    }

    /// Block diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &MatFq) -> Result<MatFq> {
        self.check_field(other)?;
        let mut out = MatFq::zeros(&self.spec, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    /// Row space of `self` intersected with the row space of `other`.
    pub fn intersect(&self, other: &MatFq) -> Result<MatFq> {
        Ok(self.perp().vstack(&other.perp())?.perp())
    }

    /// Whether the row space of `other` lies inside the row space of `self`.
    pub fn row_space_contains(&self, other: &MatFq) -> Result<bool> {
        Ok(self.vstack(other)?.rank() == self.rank())
    }
}

/// All subspaces of F_q^r (of dimension `d` if given), as RREF bases, ordered
/// by dimension, then pivot set, then the codes of the free entries.
pub fn enumerate_subspaces(spec: &FieldSpec, r: usize, d: Option<usize>) -> Result<Vec<MatFq>> {
    let q = spec.q() as u64;
    if (q as f64).powi(r as i32) > ENUMERATION_LIMIT as f64 {
        return Err(Error::TooLarge(format!("q^{r} subspace enumeration with q = {q}")));
    }
    let dims: Vec<usize> = match d {
        Some(d) if d > r => Vec::new(),
        Some(d) => vec![d],
        None => (0..=r).collect(),
    };
    let mut out = Vec::new();
    for dim in dims {
        for pivots in combinations(r, dim) {
            let free: Vec<(usize, usize)> = (0..dim)
                .flat_map(|i| {
                    let pivots = &pivots;
                    (pivots[i] + 1..r).filter(move |c| !pivots.contains(c)).map(move |c| (i, c))
                })
                .collect();
            let total = q.pow(free.len() as u32);
            for code in 0..total {
                let mut m = MatFq::zeros(spec, dim, r);
                for (i, &p) in pivots.iter().enumerate() {
                    m.set(i, p, FieldElement::ONE);
                }
                // the first free entry is the most significant digit
                let mut rest = code;
                for &(i, c) in free.iter().rev() {
                    m.set(i, c, FieldElement((rest % q) as u32));
                    rest /= q;
                }
                out.push(m);
            }
        }
    }
    Ok(out)
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Number of `d`-dimensional subspaces of F_q^r.
pub fn gaussian_binomial(spec: &FieldSpec, r: usize, d: usize) -> BigUint {
    if d > r {
        return BigUint::from(0u32);
    }
    let q = BigUint::from(spec.q());
    let one = BigUint::from(1u32);
    let mut num = one.clone();
    let mut den = one.clone();
    for i in 0..d {
        num *= q.pow((r - i) as u32) - &one;
        den *= q.pow((i + 1) as u32) - &one;
    }
    num / den
}

impl fmt::Debug for MatFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatFq[{}]{}x{}{:?}", self.spec, self.rows, self.cols, self.to_codes())
    }
}

impl fmt::Display for MatFq {
    /// `[[a,b],[c,d]]` with decimal codes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, a) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for MatFq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MatFq", 4)?;
        st.serialize_field("q", &self.spec)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &self.entries)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    fn mat(q: u64, cols: usize, rows: &[&[u32]]) -> MatFq {
        let rows: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
        MatFq::from_rows(&field(q), cols, &rows).unwrap()
    }

    /// Every vector of F_q^r, as codes.
    fn all_vectors(q: u32, r: usize) -> Vec<Vec<u32>> {
        let total = (q as usize).pow(r as u32);
        (0..total)
            .map(|mut c| {
                (0..r)
                    .map(|_| {
                        let d = (c % q as usize) as u32;
                        c /= q as usize;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    fn dot(f: &FieldSpec, u: &[FieldElement], v: &[u32]) -> FieldElement {
        u.iter().zip(v).fold(FieldElement::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, FieldElement(b))))
    }

    #[test]
    fn rref_examples() {
        let (r, rank) = mat(2, 2, &[&[1, 1], &[1, 1]]).rref();
        assert_eq!((r.to_codes(), rank), (vec![vec![1, 1]], 1));
        let (r, rank) = mat(3, 2, &[&[2, 1]]).rref();
        assert_eq!((r.to_codes(), rank), (vec![vec![1, 2]], 1));
        let (r, rank) = mat(2, 3, &[]).rref();
        assert_eq!((r.rows(), r.cols(), rank), (0, 3, 0));
    }

    #[test]
    fn matmul_kernel_inverse_examples() {
        let m = mat(2, 2, &[&[1, 1], &[0, 1]]);
        assert_eq!(MatFq::identity(&field(2), 2).matmul(&m).unwrap(), m);
        assert_eq!(mat(2, 2, &[&[1, 1]]).kernel().to_codes(), vec![vec![1, 1]]);
        assert_eq!(mat(3, 1, &[&[2]]).inverse().unwrap().to_codes(), vec![vec![2]]);
        assert_eq!(mat(2, 2, &[&[1, 1], &[1, 1]]).inverse(), Err(Error::Singular));
        assert!(matches!(m.matmul(&mat(2, 3, &[&[1, 1, 1]])), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn kernel_matches_brute_force() {
        let f = field(3);
        let a = mat(3, 3, &[&[1, 2, 0], &[0, 1, 1]]);
        let expected: Vec<Vec<u32>> =
            all_vectors(3, 3).into_iter().filter(|v| (0..a.rows()).all(|i| dot(&f, a.row(i), v).is_zero())).collect();
        let k = a.kernel();
        assert_eq!((k.cols() as u32, 3u32.pow(k.rows() as u32)), (3, expected.len() as u32));
        for v in &expected {
            assert!(k.row_space_contains(&MatFq::from_rows(&f, 3, std::slice::from_ref(v)).unwrap()).unwrap());
        }
    }

    #[test]
    fn perp_examples() {
        assert_eq!(mat(2, 2, &[&[1, 1]]).perp().to_codes(), vec![vec![1, 1]]);
        for q in [2, 3, 4] {
            let empty = MatFq::zeros(&field(q), 0, 3);
            assert_eq!(empty.perp(), MatFq::identity(&field(q), 3));
        }
    }

    #[test]
    fn subspace_enumeration() {
        let f2 = field(2);
        let all = enumerate_subspaces(&f2, 2, None).unwrap();
        assert_eq!(all.len(), 5);
        let codes: Vec<_> = all.iter().map(|m| m.to_codes()).collect();
        assert_eq!(codes, vec![vec![], vec![vec![1, 0]], vec![vec![1, 1]], vec![vec![0, 1]], vec![vec![1, 0], vec![0, 1]]]);
        assert_eq!(enumerate_subspaces(&f2, 2, Some(1)).unwrap().len(), 3);
        for q in [2, 3, 4] {
            assert_eq!(enumerate_subspaces(&field(q), 0, None).unwrap().len(), 1);
        }
        assert!(matches!(enumerate_subspaces(&f2, 21, None), Err(Error::TooLarge(_))));
    }

    /// Brute-force subspace count: distinct row spaces of all d-tuples of vectors.
    fn brute_count(q: u64, r: usize, d: usize) -> usize {
        let f = field(q);
        let vecs = all_vectors(q as u32, r);
        let mut seen = std::collections::HashSet::new();
        let mut idx = vec![0usize; d];
        loop {
            let rows: Vec<Vec<u32>> = idx.iter().map(|&i| vecs[i].clone()).collect();
            let (m, rank) = MatFq::from_rows(&f, r, &rows).unwrap().rref();
            if rank == d {
                seen.insert(m.to_codes());
            }
            let mut pos = 0;
            loop {
                if pos == d {
                    return seen.len().max(usize::from(d == 0));
                }
                idx[pos] += 1;
                if idx[pos] < vecs.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn gaussian_binomial_matches_enumeration() {
        assert_eq!(gaussian_binomial(&field(2), 2, 1), BigUint::from(3u32));
        assert_eq!(gaussian_binomial(&field(3), 3, 1), BigUint::from(13u32));
        assert_eq!(gaussian_binomial(&field(5), 4, 0), BigUint::from(1u32));
        for q in [2u64, 3, 4] {
            for r in 0..=3 {
                let mut total = 0usize;
                for d in 0..=r {
                    let listed = enumerate_subspaces(&field(q), r, Some(d)).unwrap();
                    assert_eq!(BigUint::from(listed.len()), gaussian_binomial(&field(q), r, d));
                    if r <= 2 {
                        assert_eq!(listed.len(), brute_count(q, r, d));
                    }
                    total += listed.len();
                }
                assert_eq!(total, enumerate_subspaces(&field(q), r, None).unwrap().len());
            }
        }
    }

    #[test]
    fn json_form() {
        let m = mat(4, 2, &[&[1, 3]]);
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"q":"2^2","rows":1,"cols":2,"entries":[1,3]}"#);
    }

    fn arb_matrix() -> impl Strategy<Value = MatFq> {
        (prop::sample::select(vec![2u64, 3, 4, 5]), 0usize..5, 0usize..5).prop_flat_map(|(q, r, c)| {
            prop::collection::vec(0..q as u32, r * c).prop_map(move |codes| MatFq::from_codes(&field(q), r, c, &codes).unwrap())
        })
    }

    fn arb_invertible(spec: FieldSpec, n: usize) -> impl Strategy<Value = MatFq> {
        prop::collection::vec(0..spec.q(), n * n)
            .prop_map(move |codes| MatFq::from_codes(&spec, n, n, &codes).unwrap())
            .prop_filter("invertible", |m| m.is_invertible())
    }

    proptest! {
        #[test]
        fn rref_is_idempotent_and_canonical(m in arb_matrix(), seed in any::<u64>()) {
            let (r, rank) = m.rref();
            prop_assert_eq!(r.rref().0, r.clone());
            prop_assert_eq!(rank, r.rows());
            // left-multiplying by an invertible matrix keeps the row space
            let n = m.rows();
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let e = crate::random::invertible(&mut rng, m.spec(), n);
            prop_assert_eq!(e.matmul(&m).unwrap().rref().0, r);
        }

        #[test]
        fn perp_dimension_and_involution(m in arb_matrix()) {
            let p = m.perp();
            prop_assert_eq!(m.rank() + p.rows(), m.cols());
            prop_assert_eq!(p.perp(), m.rref().0);
            let f = m.spec().clone();
            for i in 0..m.rows() {
                for j in 0..p.rows() {
                    let codes: Vec<u32> = p.row(j).iter().map(|a| a.code()).collect();
                    prop_assert!(dot(&f, m.row(i), &codes).is_zero());
                }
            }
        }

        #[test]
        fn inverse_round_trip(a in (prop::sample::select(vec![2u64, 3, 4]), 1usize..4)
            .prop_flat_map(|(q, n)| arb_invertible(field(q), n))) {
            let inv = a.inverse().unwrap();
            let id = MatFq::identity(a.spec(), a.rows());
            prop_assert_eq!(a.matmul(&inv).unwrap(), id.clone());
            prop_assert_eq!(inv.matmul(&a).unwrap(), id);
        }
    }
}
