//! Morphism expressions over the generators, with a printer, a parser and a
//! formal evaluator.
//!
//! Grammar, loosest binding first: `+` sums with optional `scalar *`
//! prefixes, `@` tensor, `.` composition (the right operand acts first).

pub mod build;
mod parser;

use std::fmt;

use crate::category::{self, Morphism, TMode};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::matrix::MatFq;
use crate::poly::PolyQ;
use crate::relcalc::{generator_relation, mu_relation, Relation};

pub use parser::{parse, parse_program, parse_relation};

/// Generator atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    Eps,
    EpsStar,
    M,
    MStar,
    Sigma,
    Z,
    ZStar,
    Plus,
    Mu(FieldElement),
    Ev,
    Coev,
}

impl Gen {
    /// `(dom, cod)`.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Gen::Eps | Gen::Z => (0, 1),
            Gen::EpsStar | Gen::ZStar => (1, 0),
            Gen::M | Gen::Plus => (2, 1),
            Gen::MStar => (1, 2),
            Gen::Sigma => (2, 2),
            Gen::Mu(_) => (1, 1),
            Gen::Ev => (2, 0),
            Gen::Coev => (0, 2),
        }
    }

    /// Whether the atom needs the unit of a Frobenius structure.
    pub fn needs_unit(self) -> bool {
        matches!(self, Gen::Eps | Gen::Coev)
    }

    pub fn relation(self, spec: &FieldSpec) -> Result<Relation> {
        match self {
            Gen::Mu(a) => generator_relation(spec, "mu", Some(a)),
            other => generator_relation(spec, other.name(), None),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Gen::Eps => "eps",
            Gen::EpsStar => "eps*",
            Gen::M => "m",
            Gen::MStar => "m*",
            Gen::Sigma => "sigma",
            Gen::Z => "z",
            Gen::ZStar => "z*",
            Gen::Plus => "plus",
            Gen::Mu(_) => "mu",
            Gen::Ev => "ev",
            Gen::Coev => "coev",
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Mu(a) => write!(f, "mu({a})"),
            other => write!(f, "{}", other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Gen(Gen),
    Id(usize),
    Rel(Relation),
    MuMatrix(MatFq),
    /// `Compose(a, b)` is `a . b`: apply `b`, then `a`.
    Compose(Box<Term>, Box<Term>),
    Tensor(Box<Term>, Box<Term>),
    LinComb(Vec<(PolyQ, Term)>),
}

/// An expression annotated with its arities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    node: Node,
    dom: usize,
    cod: usize,
}

impl Term {
    pub fn gen(g: Gen) -> Term {
        let (dom, cod) = g.arity();
        Term { node: Node::Gen(g), dom, cod }
    }

    pub fn id(k: usize) -> Term {
        Term { node: Node::Id(k), dom: k, cod: k }
    }

    pub fn rel(r: Relation) -> Term {
        let (dom, cod) = (r.s(), r.k());
        Term { node: Node::Rel(r), dom, cod }
    }

    /// The literal `μ_A : [cols] -> [rows]`.
    pub fn mu_matrix(a: MatFq) -> Term {
        let (dom, cod) = (a.cols(), a.rows());
        Term { node: Node::MuMatrix(a), dom, cod }
    }

    /// `a . b`.
    pub fn compose(a: Term, b: Term) -> Result<Term> {
        if b.cod != a.dom {
            return Err(Error::ArityMismatch(format!("`{a}` takes {} strands but `{b}` gives {}", a.dom, b.cod)));
        }
        let (dom, cod) = (b.dom, a.cod);
        Ok(Term { node: Node::Compose(Box::new(a), Box::new(b)), dom, cod })
    }

    pub fn tensor(a: Term, b: Term) -> Term {
        let (dom, cod) = (a.dom + b.dom, a.cod + b.cod);
        Term { node: Node::Tensor(Box::new(a), Box::new(b)), dom, cod }
    }

    /// `Σ c_i · t_i`; all summands must share arities.
    pub fn lincomb(items: Vec<(PolyQ, Term)>) -> Result<Term> {
        let Some((_, first)) = items.first() else {
            return Err(Error::Invalid("empty linear combination".into()));
        };
        let (dom, cod) = (first.dom, first.cod);
        if let Some((_, bad)) = items.iter().find(|(_, t)| (t.dom, t.cod) != (dom, cod)) {
            return Err(Error::ArityMismatch(format!("summand `{bad}` is {}->{} in a sum of {dom}->{cod}", bad.dom, bad.cod)));
        }
        Ok(Term { node: Node::LinComb(items), dom, cod })
    }

    /// Left-to-right tensor product; the empty product is `id(0)`.
    pub fn tensor_all(parts: impl IntoIterator<Item = Term>) -> Term {
        parts.into_iter().reduce(Term::tensor).unwrap_or_else(|| Term::id(0))
    }

    /// `parts[0] . parts[1] . ...`; panics on mismatched arities, for internal builders.
    pub(crate) fn chain(parts: Vec<Term>) -> Term {
        parts.into_iter().reduce(|a, b| Term::compose(a, b).expect("builder arities agree")).expect("nonempty chain")
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    /// Whether evaluating the term needs a unit: it mentions `eps` or `coev`,
    /// or a literal whose realization does.
    pub fn needs_unit(&self) -> bool {
        match &self.node {
            Node::Gen(g) => g.needs_unit(),
            Node::Id(_) | Node::MuMatrix(_) => false,
            Node::Rel(r) => !r.is_rel_infty(),
            Node::Compose(a, b) | Node::Tensor(a, b) => a.needs_unit() || b.needs_unit(),
            Node::LinComb(items) => items.iter().any(|(_, t)| t.needs_unit()),
        }
    }

    /// Whether some scalar mentions `t`.
    pub fn has_t(&self) -> bool {
        match &self.node {
            Node::Compose(a, b) | Node::Tensor(a, b) => a.has_t() || b.has_t(),
            Node::LinComb(items) => items.iter().any(|(c, t)| !c.is_constant() || t.has_t()),
            _ => false,
        }
    }

    /// Rewrites `ev`, `coev` and `z*` into `eps`, `eps*`, `m`, `m*` and `z`.
    pub fn expand_derived(&self) -> Term {
        match &self.node {
            Node::Gen(Gen::Ev) => build::ev_expanded(),
            Node::Gen(Gen::Coev) => build::coev_expanded(),
            Node::Gen(Gen::ZStar) => build::z_star_expanded(),
            Node::Compose(a, b) => Term::compose(a.expand_derived(), b.expand_derived()).unwrap(),
            Node::Tensor(a, b) => Term::tensor(a.expand_derived(), b.expand_derived()),
            Node::LinComb(items) => Term::lincomb(items.iter().map(|(c, t)| (c.clone(), t.expand_derived())).collect()).unwrap(),
            _ => self.clone(),
        }
    }

    /// Generator atoms used, each once, in order of first appearance.
    pub fn generators(&self) -> Vec<Gen> {
        let mut out = Vec::new();
        self.collect_generators(&mut out);
        out
    }

    fn collect_generators(&self, out: &mut Vec<Gen>) {
        match &self.node {
            Node::Gen(g) => {
                if !out.contains(g) {
                    out.push(*g);
                }
            }
            Node::Compose(a, b) | Node::Tensor(a, b) => {
                a.collect_generators(out);
                b.collect_generators(out);
            }
            Node::LinComb(items) => items.iter().for_each(|(_, t)| t.collect_generators(out)),
            _ => {}
        }
    }

    fn level(&self) -> u8 {
        match self.node {
            Node::LinComb(_) => 0,
            Node::Tensor(..) => 1,
            Node::Compose(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match &self.node {
            Node::Gen(g) => write!(f, "{g}"),
            Node::Id(k) => write!(f, "id({k})"),
            Node::Rel(r) => write!(f, "{r}"),
            Node::MuMatrix(a) if a.rows() == 0 => write!(f, "muM(0,{};[])", a.cols()),
            Node::MuMatrix(a) => write!(f, "muM({a})"),
            Node::Compose(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " . ")?;
                b.fmt_at(f, 3)
            }
            Node::Tensor(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " @ ")?;
                b.fmt_at(f, 2)
            }
            Node::LinComb(items) => {
                for (i, (c, t)) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if items.len() > 1 && *c == PolyQ::one() {
                        t.fmt_at(f, 1)?;
                        continue;
                    }
                    if simple_scalar(c) {
                        write!(f, "{c} * ")?;
                    } else {
                        write!(f, "({c}) * ")?;
                    }
                    t.fmt_at(f, 1)?;
                }
                Ok(())
            }
        }
    }
}

/// A single monomial with positive coefficient prints without parentheses.
fn simple_scalar(c: &PolyQ) -> bool {
    use num_traits::Signed;
    let nonzero: Vec<_> = c.coeffs().iter().filter(|x| !num_traits::Zero::is_zero(*x)).collect();
    nonzero.len() == 1 && nonzero[0].is_positive()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Interprets a term in the formal category.
pub fn eval_formal(term: &Term, spec: &FieldSpec, mode: &TMode) -> Result<Morphism> {
    match &term.node {
        Node::Gen(g) => Ok(Morphism::from_relation(g.relation(spec)?)),
        Node::Id(k) => Ok(category::identity(spec, *k)),
        Node::Rel(r) => {
            if r.spec() != spec {
                return Err(Error::FieldMismatch(r.spec().to_string(), spec.to_string()));
            }
            Ok(Morphism::from_relation(r.clone()))
        }
        Node::MuMatrix(a) => {
            if a.spec() != spec {
                return Err(Error::FieldMismatch(a.spec().to_string(), spec.to_string()));
            }
            Ok(Morphism::from_relation(mu_relation(a)))
        }
        Node::Compose(a, b) => category::compose(&eval_formal(a, spec, mode)?, &eval_formal(b, spec, mode)?, mode),
        Node::Tensor(a, b) => category::tensor(&eval_formal(a, spec, mode)?, &eval_formal(b, spec, mode)?),
        Node::LinComb(items) => {
            let mut acc = Morphism::zero(spec, term.dom, term.cod);
            for (c, t) in items {
                let c = match mode {
                    TMode::Symbolic => c.clone(),
                    TMode::Evaluated(v) => PolyQ::constant(c.eval(v)),
                };
                acc = acc.add(&eval_formal(t, spec, mode)?.scale(&c))?;
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests;
