use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{Gen, Node, Term};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::MatFq;
use crate::poly::{rat, PolyQ};
use crate::relcalc::Relation;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Define,
    Sym(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let mut word = src[start..i].to_string();
            // starred generator names glue to their `*`
            if matches!(word.as_str(), "eps" | "m" | "z") && bytes.get(i) == Some(&b'*') {
                word.push('*');
                i += 1;
            }
            out.push((Tok::Ident(word), start));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(src[start..i].to_string()), start));
        } else if c == ':' && bytes.get(i + 1) == Some(&b'=') {
            out.push((Tok::Define, i));
            i += 2;
        } else if ".@+-*/^()[],;".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    spec: &'a FieldSpec,
    env: HashMap<String, Term>,
}

const RESERVED: &[&str] = &["eps", "eps*", "m", "m*", "sigma", "z", "z*", "plus", "mu", "id", "ev", "coev", "rel", "muM", "t"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.toks[(self.at + ahead).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let Tok::Num(n) = self.peek().clone() else {
            return self.err("expected a number");
        };
        let pos = self.pos();
        self.bump();
        n.parse().map_err(|_| Error::Syntax { pos, msg: "number too large".into() })
    }

    fn signed(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let n = self.number()? as i64;
        Ok(if neg { -n } else { n })
    }

    fn program(&mut self) -> Result<Term> {
        let mut last = None;
        loop {
            if *self.peek() == Tok::End {
                break;
            }
            let binding = match (self.peek().clone(), self.peek_at(1).clone()) {
                (Tok::Ident(name), Tok::Define) => Some(name),
                _ => None,
            };
            if let Some(name) = binding {
                if RESERVED.contains(&name.as_str()) {
                    return self.err(format!("cannot bind reserved name `{name}`"));
                }
                self.bump();
                self.bump();
                let value = self.expr()?;
                self.env.insert(name, value.clone());
                last = Some(value);
            } else {
                last = Some(self.expr()?);
            }
            if !self.eat(';') {
                break;
            }
        }
        if *self.peek() != Tok::End {
            return self.err("unexpected trailing input");
        }
        last.ok_or(Error::Syntax { pos: 0, msg: "empty expression".into() })
    }

    fn expr(&mut self) -> Result<Term> {
        let start = self.pos();
        let mut items = Vec::new();
        let mut plain = true;
        let mut negate = false;
        loop {
            let (scalar, term) = self.summand()?;
            if scalar.is_some() || negate {
                plain = false;
            }
            let mut c = scalar.unwrap_or_else(PolyQ::one);
            if negate {
                c = -c;
            }
            items.push((c, term));
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                break;
            }
        }
        if plain && items.len() == 1 {
            return Ok(items.pop().unwrap().1);
        }
        Term::lincomb(items).map_err(|e| match e {
            Error::ArityMismatch(m) => Error::ArityMismatch(format!("sum at {start}: {m}")),
            other => other,
        })
    }

    /// `[-] [scalar *] tensor`, or a bare scalar standing for `scalar * id(0)`.
    fn summand(&mut self) -> Result<(Option<PolyQ>, Term)> {
        let neg = self.eat('-');
        let save = self.at;
        let mut scalar = None;
        if let Ok(s) = self.scalar() {
            if self.eat('*') {
                scalar = Some(s);
            } else if matches!(self.peek(), Tok::Sym('+' | '-' | ')' | ';') | Tok::End) {
                let s = if neg { -s } else { s };
                return Ok((Some(s), Term::id(0)));
            } else {
                self.at = save;
            }
        } else {
            self.at = save;
        }
        let term = self.tensor()?;
        let scalar = match (scalar, neg) {
            (Some(s), true) => Some(-s),
            (None, true) => Some(PolyQ::from_int(-1)),
            (s, false) => s,
        };
        Ok((scalar, term))
    }

    /// Product of scalar factors; stops before a `*` that does not start another factor.
    fn scalar(&mut self) -> Result<PolyQ> {
        let mut acc = self.scalar_factor()?;
        loop {
            if *self.peek() != Tok::Sym('*') {
                return Ok(acc);
            }
            let save = self.at;
            self.bump();
            match self.scalar_factor() {
                Ok(f) => acc = &acc * &f,
                Err(_) => {
                    self.at = save;
                    return Ok(acc);
                }
            }
        }
    }

    fn scalar_factor(&mut self) -> Result<PolyQ> {
        match self.peek().clone() {
            Tok::Num(_) => {
                let num = self.number()?;
                let mut value = BigRational::from_integer(BigInt::from(num));
                if *self.peek() == Tok::Sym('/') {
                    self.bump();
                    let den = self.number()?;
                    if den == 0 {
                        return Err(Error::ScalarParse(format!("{num}/0")));
                    }
                    value /= rat(den as i64);
                }
                Ok(PolyQ::constant(value))
            }
            Tok::Ident(name) if name == "t" => {
                self.bump();
                if self.eat('^') {
                    let e = self.number()?;
                    return Ok(PolyQ::monomial(BigRational::one(), e as usize));
                }
                Ok(PolyQ::t())
            }
            Tok::Sym('(') => {
                self.bump();
                let p = self.poly()?;
                self.expect(')')?;
                Ok(p)
            }
            _ => self.err("expected a scalar"),
        }
    }

    fn poly(&mut self) -> Result<PolyQ> {
        let mut acc = PolyQ::zero();
        let mut neg = self.eat('-');
        loop {
            let term = self.scalar()?;
            acc = if neg { &acc - &term } else { &acc + &term };
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn tensor(&mut self) -> Result<Term> {
        let mut acc = self.compose()?;
        while self.eat('@') {
            acc = Term::tensor(acc, self.compose()?);
        }
        Ok(acc)
    }

    fn compose(&mut self) -> Result<Term> {
        let mut acc = self.primary()?;
        loop {
            let pos = self.pos();
            if !self.eat('.') {
                return Ok(acc);
            }
            let right = self.primary()?;
            acc = Term::compose(acc, right).map_err(|e| match e {
                Error::ArityMismatch(m) => Error::ArityMismatch(format!("composition at {pos}: {m}")),
                other => other,
            })?;
        }
    }

    fn primary(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Sym('(') => {
                self.bump();
                let t = self.expr()?;
                self.expect(')')?;
                Ok(t)
            }
            Tok::Ident(name) => {
                self.bump();
                self.atom(&name, pos)
            }
            _ => self.err("expected a generator, literal or `(`"),
        }
    }

    fn atom(&mut self, name: &str, pos: usize) -> Result<Term> {
        let g = match name {
            "eps" => Gen::Eps,
            "eps*" => Gen::EpsStar,
            "m" => Gen::M,
            "m*" => Gen::MStar,
            "sigma" => Gen::Sigma,
            "z" => Gen::Z,
            "z*" => Gen::ZStar,
            "plus" => Gen::Plus,
            "ev" => Gen::Ev,
            "coev" => Gen::Coev,
            "mu" => {
                self.expect('(')?;
                let a = self.signed()?;
                self.expect(')')?;
                let a = if a < 0 { self.spec.from_int(a) } else { self.spec.elem(a as u64)? };
                Gen::Mu(a)
            }
            "id" => {
                self.expect('(')?;
                let k = self.number()? as usize;
                self.expect(')')?;
                return Ok(Term::id(k));
            }
            "rel" => return self.rel_literal().map(Term::rel),
            "muM" => return self.mu_literal(),
            other => {
                return match self.env.get(other) {
                    Some(t) => Ok(t.clone()),
                    None => Err(Error::UnknownGenerator(format!("{other} (at {pos})"))),
                };
            }
        };
        Ok(Term::gen(g))
    }

    fn field_text(&mut self) -> Result<FieldSpec> {
        let first = self.number()?;
        if self.eat('^') {
            let e = self.number()?;
            return FieldSpec::new(first, e as u32);
        }
        FieldSpec::from_order(first)
    }

    /// `[[a,b],[c,d]]` as rows of integers (negatives taken in the prime field).
    fn rows(&mut self, spec: &FieldSpec) -> Result<Vec<Vec<u32>>> {
        self.expect('[')?;
        let mut rows = Vec::new();
        if self.eat(']') {
            return Ok(rows);
        }
        loop {
            self.expect('[')?;
            let mut row = Vec::new();
            if !self.eat(']') {
                loop {
                    let x = self.signed()?;
                    let el = if x < 0 { spec.from_int(x) } else { spec.elem(x as u64)? };
                    row.push(el.code());
                    if self.eat(']') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            rows.push(row);
            if self.eat(']') {
                return Ok(rows);
            }
            self.expect(',')?;
        }
    }

    /// `(q; s,k; rows)` after the `rel` keyword.
    fn rel_literal(&mut self) -> Result<Relation> {
        self.expect('(')?;
        let pos = self.pos();
        let spec = self.field_text()?;
        if spec != *self.spec {
            return Err(Error::FieldMismatch(spec.to_string(), self.spec.to_string()));
        }
        self.expect(';')?;
        let s = self.number()? as usize;
        self.expect(',')?;
        let k = self.number()? as usize;
        self.expect(';')?;
        let rows = self.rows(&spec)?;
        self.expect(')')?;
        Relation::from_rows(&spec, s, k, &rows).map_err(|e| Error::Syntax { pos, msg: e.to_string() })
    }

    /// `([[...]])` or `(r,d;[[...]])` after the `muM` keyword.
    fn mu_literal(&mut self) -> Result<Term> {
        self.expect('(')?;
        let pos = self.pos();
        let shape = if let Tok::Num(_) = self.peek() {
            let r = self.number()? as usize;
            self.expect(',')?;
            let d = self.number()? as usize;
            self.expect(';')?;
            Some((r, d))
        } else {
            None
        };
        let spec = self.spec.clone();
        let rows = self.rows(&spec)?;
        self.expect(')')?;
        let cols = match shape {
            Some((r, _)) if r != rows.len() => return Err(Error::Syntax { pos, msg: format!("declared {r} rows, found {}", rows.len()) }),
            Some((_, d)) => d,
            None => rows.first().map_or(0, |r| r.len()),
        };
        let m = MatFq::from_rows(&spec, cols, &rows).map_err(|e| Error::Syntax { pos, msg: e.to_string() })?;
        Ok(Term::mu_matrix(m))
    }
}

fn parser<'a>(src: &str, spec: &'a FieldSpec) -> Result<Parser<'a>> {
    Ok(Parser { toks: lex(src)?, at: 0, spec, env: HashMap::new() })
}

/// Parses one expression over the field `spec`.
pub fn parse(src: &str, spec: &FieldSpec) -> Result<Term> {
    let mut p = parser(src, spec)?;
    let t = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

/// Parses `name := expr; ...; expr`, returning the value of the last statement.
pub fn parse_program(src: &str, spec: &FieldSpec) -> Result<Term> {
    parser(src, spec)?.program()
}

/// Parses a lone `rel(q; s,k; rows)` literal, taking the field from the literal.
pub fn parse_relation(src: &str) -> Result<Relation> {
    let toks = lex(src)?;
    let field_pos = toks.iter().position(|(t, _)| *t == Tok::Sym('(')).map(|i| i + 1);
    let spec = match (toks.first(), field_pos.and_then(|i| toks.get(i))) {
        (Some((Tok::Ident(kw), _)), Some((Tok::Num(_), _))) if kw == "rel" => {
            let mut probe = Parser { toks: toks.clone(), at: field_pos.unwrap(), spec: &FieldSpec::prime(2)?, env: HashMap::new() };
            probe.field_text()?
        }
        _ => return Err(Error::Syntax { pos: 0, msg: "expected a rel(q; s,k; rows) literal".into() }),
    };
    match parse(src, &spec)?.node {
        Node::Rel(r) => Ok(r),
        _ => Err(Error::Syntax { pos: 0, msg: "expected a single relation literal".into() }),
    }
}
