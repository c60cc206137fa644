//! Concrete F_q-linear Frobenius and semi-Frobenius spaces: structure maps as
//! exact matrices, an interpreter for generator terms, and the axiom checker.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::concrete::{decode_vector, encode_vector, rational_json, vector_count};
use crate::dsl::{build, parse, Gen, Node, Term};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::linmap::{checked_size, LinMap, SparseVec, COLUMN_LIMIT};
use crate::matrix::MatFq;
use crate::poly::parse_rational;
use crate::relcalc::Relation;

/// Structure maps of a candidate (semi-)Frobenius space of dimension `dim`.
/// `mu[c]` is `μ_a` for the element with code `c`; no `eps` means semi mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusData {
    pub spec: FieldSpec,
    pub dim: u64,
    pub m: LinMap,
    pub m_star: LinMap,
    pub eps_star: LinMap,
    pub plus: LinMap,
    pub z: LinMap,
    pub mu: Vec<LinMap>,
    pub eps: Option<LinMap>,
}

impl FrobeniusData {
    /// Checks every map's basis size and arities.
    pub fn validate(&self) -> Result<()> {
        let want = |name: &str, m: &LinMap, dom: usize, cod: usize| -> Result<()> {
            if m.base() != self.dim || m.dom() != dom || m.cod() != cod {
                return Err(Error::ShapeMismatch(format!(
                    "{name} is {}->{} over dimension {}, expected {dom}->{cod} over {}",
                    m.dom(),
                    m.cod(),
                    m.base(),
                    self.dim
                )));
            }
            Ok(())
        };
        want("m", &self.m, 2, 1)?;
        want("m_star", &self.m_star, 1, 2)?;
        want("eps_star", &self.eps_star, 1, 0)?;
        want("plus", &self.plus, 2, 1)?;
        want("z", &self.z, 0, 1)?;
        if self.mu.len() != self.spec.q() as usize {
            return Err(Error::ShapeMismatch(format!("{} maps mu for a field of order {}", self.mu.len(), self.spec.q())));
        }
        for (a, m) in self.mu.iter().enumerate() {
            want(&format!("mu[{a}]"), m, 1, 1)?;
        }
        if let Some(e) = &self.eps {
            want("eps", e, 0, 1)?;
        }
        Ok(())
    }

    pub fn is_semi(&self) -> bool {
        self.eps.is_none()
    }

    /// The same data with the unit dropped.
    pub fn without_unit(&self) -> FrobeniusData {
        FrobeniusData { eps: None, ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("q".into(), Value::String(self.spec.to_string()));
        obj.insert("dim".into(), self.dim.into());
        for (name, m) in [("m", &self.m), ("m_star", &self.m_star), ("eps_star", &self.eps_star), ("plus", &self.plus), ("z", &self.z)] {
            obj.insert(name.into(), map_json(m));
        }
        obj.insert("mu".into(), Value::Array(self.mu.iter().map(map_json).collect()));
        obj.insert("eps".into(), self.eps.as_ref().map(map_json).unwrap_or(Value::Null));
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<FrobeniusData> {
        let raw: RawData = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let spec = FieldSpec::parse(&raw.q)?;
        let dim = raw.dim;
        let data = FrobeniusData {
            m: raw.m.build(dim)?,
            m_star: raw.m_star.build(dim)?,
            eps_star: raw.eps_star.build(dim)?,
            plus: raw.plus.build(dim)?,
            z: raw.z.build(dim)?,
            mu: raw.mu.iter().map(|m| m.build(dim)).collect::<Result<_>>()?,
            eps: raw.eps.map(|m| m.build(dim)).transpose()?,
            spec,
            dim,
        };
        data.validate()?;
        Ok(data)
    }
}

fn map_json(m: &LinMap) -> Value {
    let entries: Vec<Value> = m.entries().into_iter().map(|(i, j, v)| serde_json::json!([i, j, rational_json(&v)])).collect();
    serde_json::json!({"dom": m.dom(), "cod": m.cod(), "entries": entries})
}

#[derive(Deserialize)]
struct RawMap {
    dom: usize,
    cod: usize,
    entries: Vec<(u64, u64, Value)>,
}

impl RawMap {
    fn build(&self, dim: u64) -> Result<LinMap> {
        let mut m = LinMap::zero(dim, self.dom, self.cod)?;
        for (i, j, v) in &self.entries {
            let x = match v {
                Value::Number(n) => parse_rational(&n.to_string())?,
                Value::String(s) => parse_rational(s)?,
                other => return Err(Error::Invalid(format!("matrix entry {other}"))),
            };
            if *i >= m.nrows() || *j >= m.ncols() {
                return Err(Error::ShapeMismatch(format!("entry ({i},{j}) outside a {}x{} matrix", m.nrows(), m.ncols())));
            }
            m.add_entry(*i, *j, x);
        }
        Ok(m)
    }
}

#[derive(Deserialize)]
struct RawData {
    q: String,
    dim: u64,
    m: RawMap,
    m_star: RawMap,
    eps_star: RawMap,
    plus: RawMap,
    z: RawMap,
    mu: Vec<RawMap>,
    eps: Option<RawMap>,
}

fn unit(x: u64) -> SparseVec {
    SparseVec::from([(x, BigRational::one())])
}

/// The structure on `C[F_q^n]`: `m(v⊗w) = δ_{v,w} v`, `ε = Σ_v v`,
/// `+̇(v⊗w) = v+w`, `z = 0̇`, `μ_a(v) = av`.
pub fn standard_target(spec: &FieldSpec, n: usize) -> Result<FrobeniusData> {
    let d = vector_count(spec, n)?;
    if d > 1 << 12 {
        return Err(Error::TooLarge(format!("{d} basis vectors")));
    }
    let vec_op = |f: &dyn Fn(FieldElement, FieldElement) -> FieldElement, a: u64, b: u64| -> u64 {
        let (x, y) = (decode_vector(spec, n, a), decode_vector(spec, n, b));
        encode_vector(spec, &x.iter().zip(&y).map(|(&p, &q)| f(p, q)).collect::<Vec<_>>())
    };
    let m = LinMap::from_columns(d, 2, 1, |j| if j % d == j / d { unit(j % d) } else { SparseVec::new() })?;
    let m_star = LinMap::from_columns(d, 1, 2, |j| unit(j + d * j))?;
    let eps_star = LinMap::from_columns(d, 1, 0, |_| unit(0))?;
    let eps = LinMap::from_columns(d, 0, 1, |_| (0..d).map(|v| (v, BigRational::one())).collect())?;
    let plus = LinMap::from_columns(d, 2, 1, |j| unit(vec_op(&|a, b| spec.add(a, b), j % d, j / d)))?;
    let z = LinMap::from_columns(d, 0, 1, |_| unit(0))?;
    let mu =
        spec.elements().map(|a| LinMap::from_columns(d, 1, 1, |j| unit(vec_op(&|x, _| spec.mul(a, x), j, 0)))).collect::<Result<_>>()?;
    Ok(FrobeniusData { spec: spec.clone(), dim: d, m, m_star, eps_star, plus, z, mu, eps: Some(eps) })
}

type Column = Rc<BTreeMap<u128, BigRational>>;

struct Evaluator<'a> {
    data: &'a FrobeniusData,
    t: Option<&'a BigRational>,
    z_star: LinMap,
    ev: LinMap,
    coev: Option<LinMap>,
    literals: HashMap<*const Term, LinMap>,
    memo: HashMap<(*const Term, u128), Column>,
}

fn add_to(acc: &mut BTreeMap<u128, BigRational>, key: u128, x: BigRational) {
    if x.is_zero() {
        return;
    }
    let slot = acc.entry(key).or_insert_with(BigRational::zero);
    *slot += x;
    if slot.is_zero() {
        acc.remove(&key);
    }
}

fn width(t: &Term) -> usize {
    let own = t.dom().max(t.cod());
    match t.node() {
        Node::Compose(a, b) | Node::Tensor(a, b) => own.max(width(a)).max(width(b)),
        Node::LinComb(items) => items.iter().map(|(_, x)| width(x)).fold(own, usize::max),
        _ => own,
    }
}

impl<'a> Evaluator<'a> {
    fn new(data: &'a FrobeniusData, t: Option<&'a BigRational>) -> Result<Evaluator<'a>> {
        let d = data.dim;
        let ev = data.eps_star.compose(&data.m)?;
        let z_star = ev.compose(&LinMap::identity(d, 1)?.kron(&data.z)?)?;
        let coev = data.eps.as_ref().map(|e| data.m_star.compose(e)).transpose()?;
        Ok(Evaluator { data, t, z_star, ev, coev, literals: HashMap::new(), memo: HashMap::new() })
    }

    fn generator(&self, g: Gen) -> Result<&LinMap> {
        let d = self.data;
        Ok(match g {
            Gen::Eps => d.eps.as_ref().ok_or(Error::MissingUnit)?,
            Gen::Coev => self.coev.as_ref().ok_or(Error::MissingUnit)?,
            Gen::EpsStar => &d.eps_star,
            Gen::M => &d.m,
            Gen::MStar => &d.m_star,
            Gen::Z => &d.z,
            Gen::ZStar => &self.z_star,
            Gen::Plus => &d.plus,
            Gen::Ev => &self.ev,
            Gen::Mu(a) => &d.mu[a.code() as usize],
            Gen::Sigma => unreachable!("the swap is ambient"),
        })
    }

    /// Literals are realized through generator terms, evaluated once.
    fn literal(&mut self, term: &Term) -> Result<&LinMap> {
        let key = term as *const Term;
        if !self.literals.contains_key(&key) {
            let expanded = match term.node() {
                Node::Rel(r) => {
                    self.check_spec(r.spec())?;
                    realize_relation(r, !self.data.is_semi())?
                }
                Node::MuMatrix(a) => {
                    self.check_spec(a.spec())?;
                    build::mu(a)
                }
                _ => unreachable!("only literals are cached"),
            };
            let map = term_eval(self.data, &expanded, self.t)?;
            self.literals.insert(key, map);
        }
        Ok(&self.literals[&key])
    }

    fn check_spec(&self, spec: &FieldSpec) -> Result<()> {
        if spec != &self.data.spec {
            return Err(Error::FieldMismatch(spec.to_string(), self.data.spec.to_string()));
        }
        Ok(())
    }

    fn scalar(&self, c: &crate::poly::PolyQ) -> Result<BigRational> {
        if c.is_constant() {
            return Ok(c.coeff(0));
        }
        self.t.map(|t| c.eval(t)).ok_or(Error::RequiresEvaluation)
    }

    fn apply(&mut self, term: &Term, idx: u128) -> Result<Column> {
        let d = self.data.dim as u128;
        let lift = |m: &LinMap| -> Column { Rc::new(m.column(idx as u64).iter().map(|(&i, x)| (i as u128, x.clone())).collect()) };
        match term.node() {
            Node::Id(_) => return Ok(Rc::new(BTreeMap::from([(idx, BigRational::one())]))),
            Node::Gen(Gen::Sigma) => {
                let (a, b) = (idx % d, idx / d);
                return Ok(Rc::new(BTreeMap::from([(b + d * a, BigRational::one())])));
            }
            Node::Gen(g) => return Ok(lift(self.generator(*g)?)),
            Node::Rel(_) | Node::MuMatrix(_) => return Ok(lift(self.literal(term)?)),
            _ => {}
        }
        let key = (term as *const Term, idx);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let mut acc = BTreeMap::new();
        match term.node() {
            Node::Compose(a, b) => {
                for (mid, x) in self.apply(b, idx)?.iter() {
                    for (row, y) in self.apply(a, *mid)?.iter() {
                        add_to(&mut acc, *row, x * y);
                    }
                }
            }
            Node::Tensor(a, b) => {
                let split = d.pow(a.dom() as u32);
                let shift = d.pow(a.cod() as u32);
                let lo = self.apply(a, idx % split)?;
                let hi = self.apply(b, idx / split)?;
                for (j, y) in hi.iter() {
                    for (i, x) in lo.iter() {
                        add_to(&mut acc, i + shift * j, x * y);
                    }
                }
            }
            Node::LinComb(items) => {
                for (c, t) in items {
                    let c = self.scalar(c)?;
                    for (row, x) in self.apply(t, idx)?.iter() {
                        add_to(&mut acc, *row, &c * x);
                    }
                }
            }
            _ => unreachable!("handled above"),
        }
        let out = Rc::new(acc);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// A generator term for `f_R`: the full decomposition when a unit is
/// available, otherwise `f̂_R` for `R ∈ Rel^∞`.
fn realize_relation(r: &Relation, has_unit: bool) -> Result<Term> {
    if has_unit {
        Ok(build::decompose(r))
    } else if r.is_rel_infty() {
        build::hat_f(r)
    } else {
        Err(Error::MissingUnit)
    }
}

/// Evaluates a term in a concrete target. `t` substitutes for the formal
/// parameter in scalars; without it, a `t`-bearing scalar is an error.
pub fn term_eval(data: &FrobeniusData, term: &Term, t: Option<&BigRational>) -> Result<LinMap> {
    if term.needs_unit() && data.is_semi() {
        return Err(Error::MissingUnit);
    }
    let d = data.dim;
    let w = width(term) as u32;
    (d as u128).checked_pow(w).ok_or_else(|| Error::TooLarge(format!("{d}^{w} intermediate basis tensors")))?;
    let ncols = checked_size(d, term.dom(), COLUMN_LIMIT)?;
    let mut ev = Evaluator::new(data, t)?;
    let mut out = LinMap::zero(d, term.dom(), term.cod())?;
    for j in 0..ncols {
        for (i, x) in ev.apply(term, j as u128)?.iter() {
            out.add_entry(*i as u64, j, x.clone());
        }
    }
    Ok(out)
}

/// `μ_A` assembled from the structure maps.
pub fn mu_a_eval(data: &FrobeniusData, a: &MatFq) -> Result<LinMap> {
    term_eval(data, &build::mu(a), None)
}

/// `f̂_R = (Id ⊗ (z*)^{⊗d}) ∘ μ_{[A;A']}` for `R ∈ Rel^∞`.
pub fn hat_f(data: &FrobeniusData, r: &Relation) -> Result<LinMap> {
    term_eval(data, &build::hat_f(r)?, None)
}

/// A named equation between two terms.
#[derive(Clone, Debug)]
pub struct Identity {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Identity {
        assert_eq!((lhs.dom(), lhs.cod()), (rhs.dom(), rhs.cod()), "sides of an identity share arities");
        Identity { name: name.into(), lhs, rhs }
    }

    pub fn needs_unit(&self) -> bool {
        self.lhs.needs_unit() || self.rhs.needs_unit()
    }

    /// Exact equality of both sides in the formal category, symbolic `t`.
    pub fn holds_formally(&self, spec: &FieldSpec) -> Result<bool> {
        let mode = crate::category::TMode::Symbolic;
        Ok(crate::dsl::eval_formal(&self.lhs, spec, &mode)? == crate::dsl::eval_formal(&self.rhs, spec, &mode)?)
    }

    /// First differing entry `(row, col)` in a concrete target, if any.
    pub fn counterexample(&self, data: &FrobeniusData) -> Result<Option<(u64, u64)>> {
        let t = BigRational::from_integer(BigInt::from(data.dim));
        Ok(term_eval(data, &self.lhs, Some(&t))?.first_difference(&term_eval(data, &self.rhs, Some(&t))?))
    }
}

fn p(spec: &FieldSpec, src: &str) -> Term {
    parse(src, spec).unwrap_or_else(|e| panic!("built-in term `{src}`: {e}"))
}

/// Every defining relation of an F_q-linear Frobenius space on `[1]`, plus
/// the self-duality snakes and the definition of `z*`.
pub fn frobenius_axioms(spec: &FieldSpec) -> Vec<Identity> {
    let mut out = Vec::new();
    let mut eq = |name: &str, l: &str, r: &str| out.push(Identity::new(name, p(spec, l), p(spec, r)));
    eq("(Fr1) m∘(m⊗Id)=m∘(Id⊗m)", "m . (m @ id(1))", "m . (id(1) @ m)");
    eq("(Fr1) m∘σ=m", "m . sigma", "m");
    eq("(Fr1) m∘(ε⊗Id)=Id", "m . (eps @ id(1))", "id(1)");
    eq("(Fr1) m∘(Id⊗ε)=Id", "m . (id(1) @ eps)", "id(1)");
    eq("(Fr1) (m*⊗Id)∘m*=(Id⊗m*)∘m*", "(m* @ id(1)) . m*", "(id(1) @ m*) . m*");
    eq("(Fr1) σ∘m*=m*", "sigma . m*", "m*");
    eq("(Fr1) (ε*⊗Id)∘m*=Id", "(eps* @ id(1)) . m*", "id(1)");
    eq("(Fr1) (Id⊗ε*)∘m*=Id", "(id(1) @ eps*) . m*", "id(1)");
    eq("(Fr2) m*∘m=(Id⊗m)∘(m*⊗Id)", "m* . m", "(id(1) @ m) . (m* @ id(1))");
    eq("(Fr2) m*∘m=(m⊗Id)∘(Id⊗m*)", "m* . m", "(m @ id(1)) . (id(1) @ m*)");
    eq("(Fr2) m∘m*=Id", "m . m*", "id(1)");
    eq("(Lin1) +̇∘(+̇⊗Id)=+̇∘(Id⊗+̇)", "plus . (plus @ id(1))", "plus . (id(1) @ plus)");
    eq("(Lin1) +̇∘σ=+̇", "plus . sigma", "plus");
    eq("(Lin2) +̇∘(z⊗Id)=Id", "plus . (z @ id(1))", "id(1)");
    eq("(Lin2) +̇∘(Id⊗z)=Id", "plus . (id(1) @ z)", "id(1)");
    let elems: Vec<FieldElement> = spec.elements().collect();
    for &a in &elems {
        for &b in &elems {
            let ab = spec.mul(a, b);
            eq(&format!("(Lin3) μ_a∘μ_b=μ_ab a={a} b={b}"), &format!("mu({}) . mu({})", a.code(), b.code()), &format!("mu({})", ab.code()));
        }
    }
    eq("(Lin3) μ_1=Id", "mu(1)", "id(1)");
    eq("(Lin3) μ_0=z∘ε*", "mu(0)", "z . eps*");
    for &a in &elems {
        for &b in &elems {
            eq(
                &format!("(Lin4) μ_(a+b)=+̇∘(μ_a⊗μ_b)∘m* a={a} b={b}"),
                &format!("mu({})", spec.add(a, b).code()),
                &format!("plus . (mu({}) @ mu({})) . m*", a.code(), b.code()),
            );
        }
    }
    for &a in &elems {
        let a = a.code();
        eq(&format!("(Lin4) μ_a∘+̇=+̇∘(μ_a⊗μ_a) a={a}"), &format!("mu({a}) . plus"), &format!("plus . (mu({a}) @ mu({a}))"));
    }
    for &a in elems.iter().filter(|a| !a.is_zero()) {
        let a = a.code();
        eq(&format!("(Rel1) (μ_a⊗μ_a)∘m*=m*∘μ_a a={a}"), &format!("(mu({a}) @ mu({a})) . m*"), &format!("m* . mu({a})"));
        eq(&format!("(Rel1) ε*∘μ_a=ε* a={a}"), &format!("eps* . mu({a})"), "eps*");
        eq(&format!("(Rel1) m∘(μ_a⊗μ_a)=μ_a∘m a={a}"), &format!("m . (mu({a}) @ mu({a}))"), &format!("mu({a}) . m"));
    }
    eq("(Rel2) m*∘z=z⊗z", "m* . z", "z @ z");
    eq("(Rel2) ε*∘z=1", "eps* . z", "id(0)");
    eq("(Rel2) m∘(z⊗z)=z", "m . (z @ z)", "z");
    eq("(Rel3) m*∘+̇=(+̇⊗+̇)∘(Id⊗σ⊗Id)∘(m*⊗m*)", "m* . plus", "(plus @ plus) . (id(1) @ sigma @ id(1)) . (m* @ m*)");
    eq("(Rel3) ε*∘+̇=ε*⊗ε*", "eps* . plus", "eps* @ eps*");
    eq("(Rel4) m∘(+̇⊗+̇)∘(Id⊗m*⊗Id)=+̇∘(Id⊗m)∘(σ⊗Id)", "m . (plus @ plus) . (id(1) @ m* @ id(1))", "plus . (id(1) @ m) . (sigma @ id(1))");
    eq("(snake) (ev⊗Id)∘(Id⊗coev)=Id", "(ev @ id(1)) . (id(1) @ coev)", "id(1)");
    eq("(snake) (Id⊗ev)∘(coev⊗Id)=Id", "(id(1) @ ev) . (coev @ id(1))", "id(1)");
    eq("(def) z*=ev∘(Id⊗z)", "z*", "ev . (id(1) @ z)");
    out
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<CheckOutcome>,
    /// `ε* ∘ ε`, when a unit is present.
    pub dim: Option<BigRational>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Evaluates every axiom as a matrix identity. Without a unit only the
/// checks that never mention `ε` or `coev` run.
pub fn check_axioms(data: &FrobeniusData) -> Result<AxiomReport> {
    data.validate()?;
    let mut checks = Vec::new();
    for id in frobenius_axioms(&data.spec) {
        if data.is_semi() && id.needs_unit() {
            continue;
        }
        let counterexample = id.counterexample(data)?;
        checks.push(CheckOutcome { name: id.name, pass: counterexample.is_none(), counterexample });
    }
    let dim = match &data.eps {
        Some(e) => Some(data.eps_star.compose(e)?.get(0, 0)),
        None => None,
    };
    Ok(AxiomReport { checks, dim })
}

/// The diagram lemmas of the μ-calculus, instantiated with matrices drawn
/// from `rng`. Sizes stay small enough for matrix evaluation at `n = 1`.
pub fn lemma_suite<R: rand::Rng + ?Sized>(spec: &FieldSpec, rng: &mut R) -> Vec<Identity> {
    use crate::random::{invertible, matrix, nonzero_element};
    use build::{comult_iter, ev_bar, mu, plus_iter, power, regroup};

    let g = |x: Gen| Term::gen(x);
    let id = Term::id;
    let tens = |a: Term, b: Term| Term::tensor(a, b);
    let chain = |parts: Vec<Term>| parts.into_iter().reduce(|a, b| Term::compose(a, b).expect("lemma arities")).unwrap();
    let stack = |blocks: &[&MatFq]| blocks.iter().skip(1).fold(blocks[0].clone(), |acc, b| acc.vstack(b).unwrap());
    let mut out = Vec::new();

    // composition and tensor product of μ's
    let a = matrix(rng, spec, 2, 2);
    let b = matrix(rng, spec, 1, 2);
    out.push(Identity::new("μ_B∘μ_A=μ_BA", chain(vec![mu(&b), mu(&a)]), mu(&b.matmul(&a).unwrap())));
    let c = matrix(rng, spec, 1, 1);
    out.push(Identity::new("μ_A⊗μ_B=μ_diag(A,B)", tens(mu(&b), mu(&c)), mu(&b.block_diag(&c).unwrap())));

    // invertible matrices
    let inv = invertible(rng, spec, 2);
    out.push(Identity::new("ev̄∘(μ_A⊗μ_A)=ev̄ for invertible A", chain(vec![ev_bar(2), tens(mu(&inv), mu(&inv))]), ev_bar(2)));
    out.push(Identity::new("(μ_A)*=μ_(A^-1)", build::dual(mu(&inv)), mu(&inv.inverse().unwrap())));
    out.push(Identity::new(
        "(z*)^k∘μ_A=(z*)^k for invertible A",
        chain(vec![power(&g(Gen::ZStar), 2), mu(&inv)]),
        power(&g(Gen::ZStar), 2),
    ));

    // scalar, sum and zero lemmas
    let nz = nonzero_element(rng, spec);
    out.push(Identity::new(format!("ev∘(μ_a⊗μ_a)=ev a={nz}"), chain(vec![g(Gen::Ev), tens(g(Gen::Mu(nz)), g(Gen::Mu(nz)))]), g(Gen::Ev)));
    let minus_one = spec.neg(FieldElement::ONE);
    out.push(Identity::new(
        "ev∘(+̇⊗Id)=ev∘(Id⊗+̇)∘(Id⊗μ_-1⊗Id)",
        chain(vec![g(Gen::Ev), tens(g(Gen::Plus), id(1))]),
        chain(vec![g(Gen::Ev), tens(id(1), g(Gen::Plus)), Term::tensor_all([id(1), g(Gen::Mu(minus_one)), id(1)])]),
    ));
    out.push(Identity::new(
        "ev∘(+̇⊗+̇)∘(Id⊗m*⊗Id)=ev∘(Id⊗ε*⊗Id)",
        p(spec, "ev . (plus @ plus) . (id(1) @ m* @ id(1))"),
        p(spec, "ev . (id(1) @ eps* @ id(1))"),
    ));
    out.push(Identity::new("(Id⊗z*)∘m*=m∘(Id⊗z)", p(spec, "(id(1) @ z*) . m*"), p(spec, "m . (id(1) @ z)")));
    out.push(Identity::new("m∘(Id⊗z)=z∘z*", p(spec, "m . (id(1) @ z)"), p(spec, "z . z*")));
    out.push(Identity::new(format!("μ_a∘ε=ε a={nz}"), chain(vec![g(Gen::Mu(nz)), g(Gen::Eps)]), g(Gen::Eps)));

    // z*∘μ_[a_1..a_k]∘(ε in slot i) with a_i ≠ 0
    let mut row = matrix(rng, spec, 1, 3);
    let slot = rng.gen_range(0..3);
    row.set(0, slot, nz);
    let inserted = Term::tensor_all((0..3).map(|j| if j == slot { g(Gen::Eps) } else { id(1) }));
    out.push(Identity::new(
        "z*∘μ_row∘(ε in a nonzero slot)=(ε*)^(k-1)",
        chain(vec![g(Gen::ZStar), mu(&row), inserted]),
        power(&g(Gen::EpsStar), 2),
    ));

    // stacking
    let (k, l) = (2, 2);
    let i_l = MatFq::identity(spec, l);
    let copies = stack(&vec![&i_l; k]);
    out.push(Identity::new("μ_[I;..;I]=w∘((m*)^it)^⊗l", mu(&copies), chain(vec![regroup(l, k), power(&comult_iter(k), l)])));
    out.push(Identity::new("μ_I=Id", mu(&i_l), id(l)));
    let top = matrix(rng, spec, 1, 2);
    let bottom = matrix(rng, spec, 2, 2);
    out.push(Identity::new(
        "μ_[A;A']=(μ_A⊗μ_A')∘μ_[I;I]",
        mu(&stack(&[&top, &bottom])),
        chain(vec![tens(mu(&top), mu(&bottom)), mu(&stack(&[&i_l, &i_l]))]),
    ));
    let left = matrix(rng, spec, 2, 1);
    let right = matrix(rng, spec, 2, 2);
    let i_d = MatFq::identity(spec, 2);
    out.push(Identity::new(
        "μ_[A B]=μ_[I I]∘(μ_A⊗μ_B)",
        mu(&left.hstack(&right).unwrap()),
        chain(vec![mu(&i_d.hstack(&i_d).unwrap()), tens(mu(&left), mu(&right))]),
    ));
    let zeros = MatFq::zeros(spec, 2, 1);
    out.push(Identity::new("μ_[A 0]=μ_A⊗(ε*)^r", mu(&right.hstack(&zeros).unwrap()), tens(mu(&right), g(Gen::EpsStar))));
    out.push(Identity::new("μ_[0 A]=(ε*)^r⊗μ_A", mu(&zeros.hstack(&right).unwrap()), tens(g(Gen::EpsStar), mu(&right))));
    let a21 = matrix(rng, spec, 2, 1);
    let i2 = MatFq::identity(spec, 2);
    let i1 = MatFq::identity(spec, 1);
    out.push(Identity::new("μ_[I;I]∘μ_A=μ_[A;A]", chain(vec![mu(&stack(&[&i2, &i2])), mu(&a21)]), mu(&stack(&[&a21, &a21]))));
    out.push(Identity::new(
        "μ_[A;A]=(μ_A)^⊗r∘μ_[I;I]",
        mu(&stack(&[&a21, &a21])),
        chain(vec![power(&mu(&a21), 2), mu(&stack(&[&i1, &i1]))]),
    ));

    // interchanging sums and scalings with copying
    out.push(Identity::new(
        "(m*)^it∘(+̇)^it=((+̇)^it)^⊗k∘w∘((m*)^it)^⊗l",
        chain(vec![comult_iter(k), plus_iter(l)]),
        chain(vec![power(&plus_iter(l), k), regroup(l, k), power(&comult_iter(k), l)]),
    ));
    let row2 = matrix(rng, spec, 1, l);
    out.push(Identity::new(
        "(m*)^it∘μ_A=(μ_A)^⊗k∘w∘((m*)^it)^⊗l",
        chain(vec![comult_iter(k), mu(&row2)]),
        chain(vec![power(&mu(&row2), k), regroup(l, k), power(&comult_iter(k), l)]),
    ));
    out
}

#[cfg(test)]
mod tests;
