//! Univariate polynomials in `t` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Polynomial in `t`; `coeffs[i]` is the coefficient of `t^i`, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    coeffs: Vec<BigRational>,
}

/// Shorthand for an integer rational.
pub fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl PolyQ {
    fn trimmed(mut coeffs: Vec<BigRational>) -> PolyQ {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn zero() -> PolyQ {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> PolyQ {
        PolyQ::constant(BigRational::one())
    }

    pub fn t() -> PolyQ {
        PolyQ::monomial(BigRational::one(), 1)
    }

    pub fn constant(c: BigRational) -> PolyQ {
        PolyQ::trimmed(vec![c])
    }

    pub fn from_int(c: i64) -> PolyQ {
        PolyQ::constant(rat(c))
    }

    /// `c * t^d`.
    pub fn monomial(c: BigRational, d: usize) -> PolyQ {
        let mut coeffs = vec![BigRational::zero(); d];
        coeffs.push(c);
        PolyQ::trimmed(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> PolyQ {
        PolyQ::trimmed(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> BigRational {
        self.coeffs.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether the polynomial has degree at most 0.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    pub fn scale(&self, c: &BigRational) -> PolyQ {
        PolyQ::trimmed(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> PolyQ {
        let mut base = self.clone();
        let mut acc = PolyQ::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &PolyQ) -> (PolyQ, PolyQ) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] / lead;
            if !c.is_zero() {
                for (i, x) in divisor.coeffs.iter().enumerate() {
                    rem[top - dd + i] -= &c * x;
                }
                quot[top - dd] = c;
            }
            rem.pop();
        }
        (PolyQ::trimmed(quot), PolyQ::trimmed(rem))
    }

    /// Distinct rational roots in increasing order.
    pub fn rational_roots(&self) -> Result<Vec<BigRational>> {
        if self.is_zero() {
            return Err(Error::Invalid("the zero polynomial has every number as a root".into()));
        }
        let mut roots = Vec::new();
        let low = self.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        if low > 0 {
            roots.push(BigRational::zero());
        }
        let reduced = PolyQ::trimmed(self.coeffs[low..].to_vec());
        let denom_lcm = reduced.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = reduced.coeffs.iter().map(|c| (c * &denom_lcm).to_integer()).collect();
        let (a0, an) = (ints[0].abs(), ints.last().unwrap().abs());
        if ints.len() > 1 {
            let num_divs = divisors(&a0.to_biguint().unwrap())?;
            let den_divs = divisors(&an.to_biguint().unwrap())?;
            for u in &num_divs {
                for v in &den_divs {
                    for sign in [-1, 1] {
                        let cand = BigRational::new(BigInt::from(u.clone()) * sign, BigInt::from(v.clone()));
                        if reduced.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        Ok(roots)
    }
}

/// Divisors by trial division; refuses numbers whose square root exceeds 10^8.
fn divisors(n: &BigUint) -> Result<Vec<BigUint>> {
    let n = n.to_u128().filter(|&n| n <= 10u128.pow(16)).ok_or_else(|| Error::TooLarge(format!("root search needs divisors of {n}")))?;
    let mut out = Vec::new();
    let mut i = 1u128;
    while i * i <= n {
        if n % i == 0 {
            out.push(BigUint::from(i));
            if i * i != n {
                out.push(BigUint::from(n / i));
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Determinant by fraction-free elimination.
pub fn determinant(m: &[Vec<PolyQ>]) -> PolyQ {
    let n = m.len();
    let mut a: Vec<Vec<PolyQ>> = m.to_vec();
    let mut prev = PolyQ::one();
    let mut negate = false;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return PolyQ::zero();
        };
        if piv != k {
            a.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                let (quot, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero());
                a[i][j] = quot;
            }
        }
        prev = a[k][k].clone();
    }
    let det = if n == 0 { PolyQ::one() } else { a[n - 1][n - 1].clone() };
    if negate {
        -det
    } else {
        det
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, other: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyQ::trimmed((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, other: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(other.coeffs.len());
        PolyQ::trimmed((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, other: &PolyQ) -> PolyQ {
        if self.is_zero() || other.is_zero() {
            return PolyQ::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyQ::trimmed(out)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        -&self
    }
}

impl Add for PolyQ {
    type Output = PolyQ;
    fn add(self, other: PolyQ) -> PolyQ {
        &self + &other
    }
}

impl Sub for PolyQ {
    type Output = PolyQ;
    fn sub(self, other: PolyQ) -> PolyQ {
        &self - &other
    }
}

impl Mul for PolyQ {
    type Output = PolyQ;
    fn mul(self, other: PolyQ) -> PolyQ {
        &self * &other
    }
}

impl fmt::Display for PolyQ {
    /// Highest degree first, e.g. `3/2*t^2 - t + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (d, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match d {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyQ({self})")
    }
}

/// Parses an exact rational such as `-3/2` or `7`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::ScalarParse(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

impl FromStr for PolyQ {
    type Err = Error;

    /// Accepts sums of monomials `c*t^d`, `c*t`, `t^d`, `t`, `c`.
    fn from_str(text: &str) -> Result<PolyQ> {
        let bad = || Error::ScalarParse(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut acc = PolyQ::zero();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(term)),
            };
            let (coef, power) = match body.find('t') {
                None => (parse_rational(body)?, 0),
                Some(pos) => {
                    let coef = match &body[..pos] {
                        "" => BigRational::one(),
                        c => parse_rational(c.strip_suffix('*').ok_or_else(bad)?)?,
                    };
                    let power = match &body[pos + 1..] {
                        "" => 1,
                        p => p.strip_prefix('^').and_then(|p| p.parse().ok()).ok_or_else(bad)?,
                    };
                    (coef, power)
                }
            };
            acc = &acc + &PolyQ::monomial(coef * rat(sign), power);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(text: &str) -> PolyQ {
        text.parse().unwrap()
    }

    #[test]
    fn display_and_parse() {
        let cases = ["0", "1", "t", "-t", "3/2*t^2 - 1", "t^3 + t - 2", "-1/3*t^2 + 4*t"];
        for c in cases {
            assert_eq!(p(c).to_string(), c);
        }
        assert_eq!(PolyQ::t().to_string(), "t");
        assert_eq!(p("2*t + 3 - t").to_string(), "t + 3");
        assert!("t^".parse::<PolyQ>().is_err());
        assert!("1/0".parse::<PolyQ>().is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&p("t - 1") * &p("t + 1"), p("t^2 - 1"));
        assert_eq!(p("t^2 - 1").div_rem(&p("t - 1")), (p("t + 1"), PolyQ::zero()));
        assert_eq!(p("t^2").div_rem(&p("2*t + 2")), (p("1/2*t - 1/2"), p("1")));
        assert_eq!(p("t + 1").pow(3), p("t^3 + 3*t^2 + 3*t + 1"));
        assert_eq!(p("t^2 + 1").eval(&rat(3)), rat(10));
        assert_eq!(PolyQ::zero().degree(), None);
        assert_eq!(p("5").degree(), Some(0));
    }

    #[test]
    fn determinants() {
        let m = vec![vec![p("t"), p("1")], vec![p("1"), p("1")]];
        assert_eq!(determinant(&m), p("t - 1"));
        let swap = vec![vec![p("0"), p("1")], vec![p("1"), p("0")]];
        assert_eq!(determinant(&swap), p("-1"));
        assert_eq!(determinant(&[]), p("1"));
        let singular = vec![vec![p("t"), p("t")], vec![p("1"), p("1")]];
        assert!(determinant(&singular).is_zero());
        // Vandermonde in (t, 1, 2): (1 - t)(2 - t)(2 - 1)
        let v = vec![vec![p("1"), p("t"), p("t^2")], vec![p("1"), p("1"), p("1")], vec![p("1"), p("2"), p("4")]];
        assert_eq!(determinant(&v), p("t^2 - 3*t + 2"));
    }

    #[test]
    fn roots() {
        assert_eq!(p("t - 1").rational_roots().unwrap(), vec![rat(1)]);
        assert_eq!(p("t^3 - 3*t^2 + 2*t").rational_roots().unwrap(), vec![rat(0), rat(1), rat(2)]);
        assert_eq!(p("2*t^2 - t").rational_roots().unwrap(), vec![rat(0), BigRational::new(1.into(), 2.into())]);
        assert_eq!(p("t^2 + 1").rational_roots().unwrap(), vec![]);
        assert_eq!(p("t - 4").rational_roots().unwrap(), vec![rat(4)]);
        assert!(PolyQ::zero().rational_roots().is_err());
    }

    fn arb_poly() -> impl Strategy<Value = PolyQ> {
        prop::collection::vec((-5i64..5, 1i64..4), 0..4)
            .prop_map(|cs| PolyQ::from_coeffs(cs.into_iter().map(|(a, b)| BigRational::new(a.into(), b.into())).collect()))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            prop_assert_eq!(a.to_string().parse::<PolyQ>().unwrap(), a.clone());
            let x = rat(3);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        }

        #[test]
        fn division_identity(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (quot, rem) = a.div_rem(&b);
            prop_assert_eq!(&(&quot * &b) + &rem, a);
            prop_assert!(rem.degree() < b.degree());
        }
    }
}
