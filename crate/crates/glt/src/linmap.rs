//! Sparse exact linear maps between tensor powers `W^{⊗dom} -> W^{⊗cod}` of a
//! space with a distinguished basis of size `base`.
//!
//! A basis tensor `e_{i_1} ⊗ ... ⊗ e_{i_r}` has index `Σ_j i_j · base^(j-1)`:
//! the first factor is least significant.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Column guard: at most this many basis tensors in the domain.
pub const COLUMN_LIMIT: u64 = 1 << 22;

pub type SparseVec = BTreeMap<u64, BigRational>;

/// `base^exp`, or `TooLarge` beyond `limit`.
pub fn checked_size(base: u64, exp: usize, limit: u64) -> Result<u64> {
    base.checked_pow(exp as u32).filter(|&n| n <= limit).ok_or_else(|| Error::TooLarge(format!("{base}^{exp} basis tensors")))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinMap {
    base: u64,
    dom: usize,
    cod: usize,
    cols: Vec<SparseVec>,
}

impl LinMap {
    pub fn zero(base: u64, dom: usize, cod: usize) -> Result<LinMap> {
        let ncols = checked_size(base, dom, COLUMN_LIMIT)?;
        checked_size(base, cod, u64::MAX >> 1)?;
        Ok(LinMap { base, dom, cod, cols: vec![SparseVec::new(); ncols as usize] })
    }

    pub fn identity(base: u64, k: usize) -> Result<LinMap> {
        let mut m = LinMap::zero(base, k, k)?;
        for (i, col) in m.cols.iter_mut().enumerate() {
            col.insert(i as u64, BigRational::one());
        }
        Ok(m)
    }

    /// Builds column by column; zero entries are dropped.
    pub fn from_columns(base: u64, dom: usize, cod: usize, mut col: impl FnMut(u64) -> SparseVec) -> Result<LinMap> {
        let mut m = LinMap::zero(base, dom, cod)?;
        let nrows = m.nrows();
        for (j, slot) in m.cols.iter_mut().enumerate() {
            let mut c = col(j as u64);
            c.retain(|_, v| !v.is_zero());
            if let Some((&r, _)) = c.iter().next_back() {
                if r >= nrows {
                    return Err(Error::ShapeMismatch(format!("row {r} in a map with {nrows} rows")));
                }
            }
            *slot = c;
        }
        Ok(m)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn nrows(&self) -> u64 {
        self.base.pow(self.cod as u32)
    }

    pub fn ncols(&self) -> u64 {
        self.cols.len() as u64
    }

    pub fn column(&self, j: u64) -> &SparseVec {
        &self.cols[j as usize]
    }

    pub fn get(&self, row: u64, col: u64) -> BigRational {
        self.cols[col as usize].get(&row).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Adds `v` to entry `(row, col)`.
    pub fn add_entry(&mut self, row: u64, col: u64, v: BigRational) {
        add_into(&mut self.cols[col as usize], row, v);
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    /// Nonzero entries sorted by `(row, col)`.
    pub fn entries(&self) -> Vec<(u64, u64, BigRational)> {
        let mut out: Vec<_> =
            self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |(&i, v)| (i, j as u64, v.clone()))).collect();
        out.sort_by_key(|a| (a.0, a.1));
        out
    }

    fn check_base(&self, other: &LinMap) -> Result<()> {
        if self.base != other.base {
            return Err(Error::ShapeMismatch(format!("bases {} and {}", self.base, other.base)));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> Result<LinMap> {
        self.check_base(other)?;
        if other.cod != self.dom {
            return Err(Error::ArityMismatch(format!("{}->{} after {}->{}", self.dom, self.cod, other.dom, other.cod)));
        }
        let mut out = LinMap::zero(self.base, other.dom, self.cod)?;
        for (j, col) in other.cols.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (&mid, x) in col {
                for (&row, y) in &self.cols[mid as usize] {
                    add_into(&mut acc, row, x * y);
                }
            }
            out.cols[j] = acc;
        }
        Ok(out)
    }

    /// `self ⊗ other`, with `self` on the low-order factors.
    pub fn kron(&self, other: &LinMap) -> Result<LinMap> {
        self.check_base(other)?;
        let (rs, cs) = (self.nrows(), self.ncols());
        let mut out = LinMap::zero(self.base, self.dom + other.dom, self.cod + other.cod)?;
        for (jb, colb) in other.cols.iter().enumerate() {
            for (ja, cola) in self.cols.iter().enumerate() {
                let target = &mut out.cols[ja + cs as usize * jb];
                for (&ib, y) in colb {
                    for (&ia, x) in cola {
                        target.insert(ia + rs * ib, x * y);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> LinMap {
        let mut out = self.clone();
        for col in &mut out.cols {
            if c.is_zero() {
                col.clear();
            }
            for v in col.values_mut() {
                *v = &*v * c;
            }
        }
        out
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        self.check_base(other)?;
        if (self.dom, self.cod) != (other.dom, other.cod) {
            return Err(Error::ArityMismatch(format!("{}->{} plus {}->{}", self.dom, self.cod, other.dom, other.cod)));
        }
        let mut out = self.clone();
        for (j, col) in other.cols.iter().enumerate() {
            for (&i, v) in col {
                add_into(&mut out.cols[j], i, v.clone());
            }
        }
        Ok(out)
    }

    /// First differing entry `(row, col)`, scanning columns in order.
    pub fn first_difference(&self, other: &LinMap) -> Option<(u64, u64)> {
        if (self.base, self.dom, self.cod) != (other.base, other.dom, other.cod) {
            return Some((0, 0));
        }
        for (j, (a, b)) in self.cols.iter().zip(&other.cols).enumerate() {
            if a != b {
                let row = a.keys().chain(b.keys()).copied().filter(|r| a.get(r) != b.get(r)).min().expect("columns differ");
                return Some((row, j as u64));
            }
        }
        None
    }

    /// The swap `W ⊗ W -> W ⊗ W`.
    pub fn swap(base: u64) -> Result<LinMap> {
        LinMap::from_columns(base, 2, 2, |j| {
            let (a, b) = (j % base, j / base);
            SparseVec::from([(b + base * a, BigRational::one())])
        })
    }
}

pub(crate) fn add_into(v: &mut SparseVec, key: u64, x: BigRational) {
    if x.is_zero() {
        return;
    }
    match v.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(x);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get() + x;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// Rank over Q of a list of sparse vectors.
pub fn rational_rank(vectors: &[SparseVec]) -> usize {
    let mut pivots: BTreeMap<u64, SparseVec> = BTreeMap::new();
    for v in vectors {
        let mut v = v.clone();
        v.retain(|_, x| !x.is_zero());
        loop {
            let Some((&lead, lead_val)) = v.iter().next() else { break };
            match pivots.get(&lead) {
                None => {
                    let inv = lead_val.recip();
                    for x in v.values_mut() {
                        *x = &*x * &inv;
                    }
                    pivots.insert(lead, v);
                    break;
                }
                Some(p) => {
                    let factor = lead_val.clone();
                    for (&k, x) in p {
                        add_into(&mut v, k, -(&factor * x));
                    }
                }
            }
        }
    }
    pivots.len()
}
