//! Finite fields F_q, q = p^e, with elements stored as integer codes.
//!
//! The code of an element is the little-endian base-p reading of its
//! coefficient vector in the polynomial basis 1, x, ..., x^(e-1).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest q for which addition and multiplication tables are cached.
const TABLE_LIMIT: u32 = 256;
/// Largest q accepted at all.
const MAX_Q: u64 = 1 << 24;

/// An element of F_q, identified by its code in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// The field F_q. Cheap to clone; equality is equality of `(p, e)`.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p (little-endian coefficients).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn digits(mut code: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((code % p as u64) as u32);
        code /= p as u64;
    }
    out
}

fn irreducible(m: &[u32], p: u32) -> bool {
    let e = m.len() - 1;
    for deg in 1..=e / 2 {
        let count = (p as u64).pow(deg as u32);
        for code in 0..count {
            let mut d = digits(code, p, deg);
            d.push(1);
            if poly_rem(m, &d, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible of degree `e` over F_p,
/// comparing coefficients from the highest degree down.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for code in 0..count {
        let mut m = digits(code, p, e as usize);
        m.push(1);
        if irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("every degree has an irreducible polynomial over F_p")
}

impl FieldSpec {
    /// Builds F_{p^e}.
    pub fn new(p: u64, e: u32) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !(1..=8).contains(&e) {
            return Err(Error::DegreeOutOfRange(e));
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_Q).ok_or_else(|| Error::TooLarge(format!("{p}^{e}")))?;
        let p = p as u32;
        let modulus = if e > 1 { smallest_irreducible(p, e) } else { Vec::new() };
        let mut inner = Inner { p, e, q: q as u32, modulus, tables: None };
        if inner.q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldSpec(Arc::new(inner)))
    }

    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<FieldSpec> {
        FieldSpec::new(p, 1)
    }

    /// Builds the field from its order, factoring `q` as a prime power.
    pub fn from_order(q: u64) -> Result<FieldSpec> {
        if q < 2 {
            return Err(Error::NotPrime(q));
        }
        let mut p = 2;
        while !q.is_multiple_of(p) {
            p += 1;
        }
        let mut e = 0;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            e += 1;
        }
        if r != 1 {
            return Err(Error::NotPrime(q));
        }
        FieldSpec::new(p, e)
    }

    /// Parses `"p^e"` or `"p"`.
    pub fn parse(text: &str) -> Result<FieldSpec> {
        let bad = || Error::Invalid(format!("field `{text}` is not of the form p^e"));
        let (p, e) = match text.trim().split_once('^') {
            Some((p, e)) => (p.trim(), e.trim()),
            None => (text.trim(), "1"),
        };
        let p: u64 = p.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        FieldSpec::new(p, e)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Coefficients `[c_0, ..., c_{e-1}, 1]` of the modulus; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Checked conversion from a code.
    pub fn elem(&self, code: u64) -> Result<FieldElement> {
        if code < self.q() as u64 {
            Ok(FieldElement(code as u32))
        } else {
            Err(Error::BadElement { code, q: self.q() })
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, x: i64) -> FieldElement {
        FieldElement(x.rem_euclid(self.p() as i64) as u32)
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q()).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.tables {
            Some(t) => FieldElement(t.add[(a.0 * self.q() + b.0) as usize]),
            None => FieldElement(raw_add(&self.0, a.0, b.0)),
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match &self.0.tables {
            Some(t) => FieldElement(t.neg[a.0 as usize]),
            None => FieldElement(raw_neg(&self.0, a.0)),
        }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.0.tables {
            Some(t) => FieldElement(t.mul[(a.0 * self.q() + b.0) as usize]),
            None => FieldElement(raw_mul(&self.0, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => FieldElement(t.inv[a.0 as usize]),
            None => self.pow(a, self.q() as u64 - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

fn raw_add(f: &Inner, a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    for _ in 0..f.e {
        out += ((a % f.p + b % f.p) % f.p) * place;
        a /= f.p;
        b /= f.p;
        place *= f.p;
    }
    out
}

fn raw_neg(f: &Inner, a: u32) -> u32 {
    let mut a = a;
    let mut out = 0;
    let mut place = 1;
    for _ in 0..f.e {
        out += ((f.p - a % f.p) % f.p) * place;
        a /= f.p;
        place *= f.p;
    }
    out
}

fn raw_mul(f: &Inner, a: u32, b: u32) -> u32 {
    if f.e == 1 {
        return ((a as u64 * b as u64) % f.p as u64) as u32;
    }
    let e = f.e as usize;
    let da = digits(a as u64, f.p, e);
    let db = digits(b as u64, f.p, e);
    let mut prod = vec![0u32; 2 * e - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % f.p as u64) as u32;
        }
    }
    let r = poly_rem(&prod, &f.modulus, f.p);
    r.iter().rev().fold(0, |acc, &c| acc * f.p + c)
}

fn build_tables(f: &Inner) -> Tables {
    let q = f.q;
    let mut add = Vec::with_capacity((q * q) as usize);
    let mut mul = Vec::with_capacity((q * q) as usize);
    for a in 0..q {
        for b in 0..q {
            add.push(raw_add(f, a, b));
            mul.push(raw_mul(f, a, b));
        }
    }
    let neg = (0..q).map(|a| raw_neg(f, a)).collect();
    let mut inv = vec![0; q as usize];
    for a in 1..q {
        inv[a as usize] = (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap();
    }
    Tables { add, mul, neg, inv }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.e == other.0.e
    }
}

impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.p, self.0.e).hash(state);
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p(), self.e())
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({self})")
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        FieldSpec::parse(&text).map_err(serde::de::Error::custom)
    }
}
