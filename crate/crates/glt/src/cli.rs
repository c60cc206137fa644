//! The `glt` command line: evaluation, specialization, verification suites,
//! Gram matrices, relation counts and Knop-convention conversion.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::axioms::{self, check_axioms, frobenius_axioms, lemma_suite, standard_target};
use crate::category::{self, Morphism, TMode};
use crate::concrete::{self, f_r_matrix, ConcreteMap};
use crate::dsl::{eval_formal, parse_program, parse_relation};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linmap::LinMap;
use crate::poly::{determinant, parse_rational, rat};
use crate::random;
use crate::relcalc::{knop_diamond, product, star, Relation};

/// Largest `|Rel_{s,k}|` for which `gram` computes a determinant.
const GRAM_LIMIT: u64 = 40;
/// Random sweeps keep `q^{n(s+k+l)}` at or below this.
const SWEEP_LIMIT: u64 = 1 << 14;

#[derive(Debug, Parser)]
#[command(name = "glt", version, about = "Exact calculus for the interpolation category T(GL_t(F_q))")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Field order as `p^e` (or `p`).
    #[arg(long, global = true, default_value = "2")]
    pub q: String,
    /// Rank n of the specialization `t = q^n`.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// `sym` or an exact rational value for t.
    #[arg(long, global = true)]
    pub t: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    #[arg(long = "max-arity", global = true, default_value_t = 3)]
    pub max_arity: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Axioms,
    Lemmas,
    Functor,
    Relinfty,
    Knop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    ToKnop,
    FromKnop,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a term (or `name := expr;` program) in the formal category.
    Eval(Source),
    /// Specialize a term to its matrix at `t = q^n`.
    Specialize(Source),
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Gram matrix of the trace pairing on `Hom([s],[k])`.
    Gram {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
    },
    /// Number of relations `[s] -> [k]`.
    Count {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        k: usize,
    },
    /// Convert a relation literal between this indexing and Knop's (`R <-> R^perp`).
    KnopConvert {
        literal: String,
        #[arg(long, value_enum, default_value_t = Direction::ToKnop)]
        direction: Direction,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Inline expression.
    pub expr: Option<String>,
    /// Read the expression from a file.
    #[arg(long, conflicts_with = "expr")]
    pub file: Option<PathBuf>,
}

/// The value of `--t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TSetting {
    Sym,
    Value(BigRational),
}

/// Validated run options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: FieldSpec,
    pub n: Option<usize>,
    pub t: Option<TSetting>,
    pub seed: u64,
    pub trials: usize,
    pub max_arity: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<RunConfig> {
        let t = match args.t.as_deref().map(str::trim) {
            None => None,
            Some("sym") => Some(TSetting::Sym),
            Some(v) => Some(TSetting::Value(parse_rational(v)?)),
        };
        Ok(RunConfig {
            spec: FieldSpec::parse(&args.q)?,
            n: args.n,
            t,
            seed: args.seed,
            trials: args.trials,
            max_arity: args.max_arity,
            output: args.output.clone(),
            format: args.format,
        })
    }

    fn q_pow_n(&self, n: usize) -> BigRational {
        num_traits::pow(rat(self.spec.q() as i64), n)
    }
}

/// What a command produced: the rendered output and whether checks passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub success: bool,
}

impl Outcome {
    fn ok(output: String) -> Outcome {
        Outcome { output, success: true }
    }
}

/// Process exit status for a library error: 3 for the feasibility guard, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge(_) => 3,
        _ => 2,
    }
}

/// Parses `args`, runs the command, writes its output and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = RunConfig::from_args(&cli.config).and_then(|cfg| execute(&cli.command, &cfg).map(|o| (o, cfg)));
    match result {
        Ok((outcome, cfg)) => {
            let mut text = outcome.output;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            let written = match &cfg.output {
                Some(path) => std::fs::write(path, text),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(text.as_bytes())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return 2;
            }
            if outcome.success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Eval(src) => cmd_eval(&read_source(src)?, cfg).map(Outcome::ok),
        Command::Specialize(src) => cmd_specialize(&read_source(src)?, cfg).map(Outcome::ok),
        Command::Verify { suite } => {
            let report = cmd_verify(*suite, cfg)?;
            Ok(Outcome { output: report.render(cfg.format), success: report.all_pass() })
        }
        Command::Gram { s, k } => cmd_gram(*s, *k, cfg).map(Outcome::ok),
        Command::Count { s, k } => Ok(Outcome::ok(cmd_count(*s, *k, cfg))),
        Command::KnopConvert { literal, direction } => cmd_knop_convert(literal, *direction, cfg).map(Outcome::ok),
    }
}

fn read_source(src: &Source) -> Result<String> {
    match (&src.expr, &src.file) {
        (Some(e), _) => Ok(e.clone()),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display()))),
        (None, None) => Err(Error::Invalid("no expression given".into())),
    }
}

fn render_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values are plain JSON")
}

/// `eval`: the canonical linear combination of relations.
pub fn cmd_eval(src: &str, cfg: &RunConfig) -> Result<String> {
    let term = parse_program(src, &cfg.spec)?;
    let mode = match (&cfg.t, cfg.n) {
        (Some(TSetting::Value(v)), _) => TMode::Evaluated(v.clone()),
        (None, Some(n)) => TMode::Evaluated(cfg.q_pow_n(n)),
        _ => TMode::Symbolic,
    };
    let f = eval_formal(&term, &cfg.spec, &mode)?;
    Ok(match cfg.format {
        Format::Text => f.to_string(),
        Format::Json => render_json(&serde_json::to_value(&f).expect("morphisms serialize")),
    })
}

/// `specialize`: the matrix of `F_n` applied to a term.
pub fn cmd_specialize(src: &str, cfg: &RunConfig) -> Result<String> {
    let n = cfg.n.ok_or_else(|| Error::Invalid("specialize needs --n".into()))?;
    let term = parse_program(src, &cfg.spec)?;
    let f = eval_formal(&term, &cfg.spec, &TMode::Symbolic)?;
    match &cfg.t {
        Some(TSetting::Sym) if f.has_t() => return Err(Error::RequiresEvaluation),
        Some(TSetting::Value(v)) if *v != cfg.q_pow_n(n) => {
            return Err(Error::Invalid(format!("F_{n} is defined at t = {}, not t = {v}", cfg.q_pow_n(n))))
        }
        _ => {}
    }
    let m = concrete::specialize(&f, n)?;
    Ok(match cfg.format {
        Format::Json => render_json(&m.to_json()),
        Format::Text => render_matrix(&m),
    })
}

fn render_matrix(m: &ConcreteMap) -> String {
    let lm = m.map();
    let mut out = format!("# F_{}: [{}] -> [{}], {} x {}\n", m.n(), m.s(), m.k(), lm.nrows(), lm.ncols());
    if lm.nrows().saturating_mul(lm.ncols()) <= 1 << 12 {
        for i in 0..lm.nrows() {
            let row: Vec<String> = (0..lm.ncols()).map(|j| lm.get(i, j).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    } else {
        for (i, j, v) in lm.entries() {
            let _ = writeln!(out, "{i} {j} {v}");
        }
    }
    out
}

/// `count`: `|Rel_{s,k}|`.
pub fn cmd_count(s: usize, k: usize, cfg: &RunConfig) -> String {
    let c = category::count_relations(&cfg.spec, s, k);
    match cfg.format {
        Format::Text => c.to_string(),
        Format::Json => render_json(&json!({ "q": cfg.spec.q(), "s": s, "k": k, "count": c.to_string() })),
    }
}

/// `knop-convert`: `R -> R^perp`, which is its own inverse.
pub fn cmd_knop_convert(literal: &str, direction: Direction, cfg: &RunConfig) -> Result<String> {
    let r = parse_relation(literal)?;
    let out = r.perp();
    Ok(match cfg.format {
        Format::Text => out.to_string(),
        Format::Json => render_json(&json!({
            "input": r.to_string(),
            "output": out.to_string(),
            "direction": match direction { Direction::ToKnop => "to-knop", Direction::FromKnop => "from-knop" },
        })),
    })
}

/// Gram matrix, its determinant and the determinant's rational roots.
#[derive(Debug, Clone)]
pub struct GramReport {
    pub basis: Vec<Relation>,
    pub matrix: Vec<Vec<crate::poly::PolyQ>>,
    pub det: crate::poly::PolyQ,
    pub roots: Vec<BigRational>,
}

pub fn gram_report(spec: &FieldSpec, s: usize, k: usize) -> Result<GramReport> {
    let size = category::count_relations(spec, s, k);
    if size > GRAM_LIMIT.into() {
        return Err(Error::TooLarge(format!("gram of size {size} exceeds {GRAM_LIMIT}")));
    }
    let (basis, matrix) = category::gram(spec, s, k, &TMode::Symbolic)?;
    let det = determinant(&matrix);
    let roots = det.rational_roots()?;
    Ok(GramReport { basis, matrix, det, roots })
}

pub fn cmd_gram(s: usize, k: usize, cfg: &RunConfig) -> Result<String> {
    let g = gram_report(&cfg.spec, s, k)?;
    let cells = |row: &Vec<crate::poly::PolyQ>| row.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    Ok(match cfg.format {
        Format::Json => render_json(&json!({
            "basis": g.basis.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "matrix": g.matrix.iter().map(cells).collect::<Vec<_>>(),
            "det": g.det.to_string(),
            "roots": g.roots.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = String::from("basis:\n");
            for r in &g.basis {
                let _ = writeln!(out, "  {r}");
            }
            out.push_str("gram:\n");
            for row in &g.matrix {
                let _ = writeln!(out, "  [{}]", cells(row).join(", "));
            }
            let _ = writeln!(out, "det: {}", g.det);
            let roots: Vec<String> = g.roots.iter().map(|r| r.to_string()).collect();
            let _ = write!(out, "roots: {}", if roots.is_empty() { "none".to_string() } else { roots.join(", ") });
            out
        }
    })
}

/// One named property tallied over the trials of a suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl SuiteCheck {
    pub fn pass(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub q: u32,
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(SuiteCheck::pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut v = serde_json::to_value(self).expect("reports serialize");
                v["pass"] = json!(self.all_pass());
                render_json(&v)
            }
            Format::Text => {
                let mut out = String::new();
                for c in &self.checks {
                    let status = if c.pass() { "PASS" } else { "FAIL" };
                    let _ = write!(out, "{status} {} ({}/{})", c.name, c.passed, c.total);
                    if let Some(f) = &c.first_failure {
                        let _ = write!(out, " first failure: {f}");
                    }
                    out.push('\n');
                }
                let suite = serde_json::to_value(self.suite).expect("suite names serialize");
                let verdict = if self.all_pass() { "PASS" } else { "FAIL" };
                let _ = write!(out, "verify {} q={} n={} seed={}: {verdict}", suite.as_str().unwrap_or("?"), self.q, self.n, self.seed);
                out
            }
        }
    }
}

/// Ordered tally of named checks.
#[derive(Default)]
struct Tally(Vec<SuiteCheck>);

impl Tally {
    fn record(&mut self, name: &str, ok: bool, failure: impl FnOnce() -> String) {
        let idx = match self.0.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.0.push(SuiteCheck { name: name.to_string(), passed: 0, total: 0, first_failure: None });
                self.0.len() - 1
            }
        };
        let c = &mut self.0[idx];
        c.total += 1;
        if ok {
            c.passed += 1;
        } else if c.first_failure.is_none() {
            c.first_failure = Some(failure());
        }
    }
}

pub fn cmd_verify(suite: Suite, cfg: &RunConfig) -> Result<SuiteReport> {
    let n = cfg.n.unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally::default();
    match suite {
        Suite::Axioms => verify_axioms(&cfg.spec, n, &mut tally)?,
        Suite::Lemmas => verify_lemmas(&cfg.spec, n, cfg.trials, &mut rng, &mut tally)?,
        Suite::Functor => verify_functor(&cfg.spec, n, cfg, &mut rng, &mut tally)?,
        Suite::Relinfty => verify_relinfty(&cfg.spec, n, cfg, &mut rng, &mut tally)?,
        Suite::Knop => verify_knop(&cfg.spec, cfg, &mut rng, &mut tally)?,
    }
    Ok(SuiteReport { suite, q: cfg.spec.q(), n, seed: cfg.seed, checks: tally.0 })
}

fn verify_axioms(spec: &FieldSpec, n: usize, tally: &mut Tally) -> Result<()> {
    for id in frobenius_axioms(spec) {
        let ok = id.holds_formally(spec)?;
        tally.record(&format!("formal {}", id.name), ok, || "formal sides differ".into());
    }
    let data = standard_target(spec, n)?;
    for c in check_axioms(&data)?.checks {
        let at = c.counterexample;
        tally.record(&format!("F_{n} {}", c.name), c.pass, || match at {
            Some((i, j)) => format!("entry ({i}, {j})"),
            None => "differs".into(),
        });
    }
    Ok(())
}

fn verify_lemmas(spec: &FieldSpec, n: usize, trials: usize, rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    let data = standard_target(spec, n)?;
    let t = num_traits::pow(rat(spec.q() as i64), n);
    for _ in 0..trials {
        for id in lemma_suite(spec, rng) {
            let formal = id.holds_formally(spec)?;
            tally.record(&format!("formal {}", id.name), formal, || format!("{} vs {}", id.lhs, id.rhs));
            let lhs = axioms::term_eval(&data, &id.lhs, Some(&t))?;
            let rhs = axioms::term_eval(&data, &id.rhs, Some(&t))?;
            let diff = lhs.first_difference(&rhs);
            tally.record(&format!("F_{n} {}", id.name), diff.is_none(), || match diff {
                Some((i, j)) => format!("entry ({i}, {j}) of {}", id.lhs),
                None => String::new(),
            });
        }
    }
    Ok(())
}

/// Whether `q^{n w}` is within the sweep limit.
fn fits(spec: &FieldSpec, n: usize, w: usize) -> bool {
    (spec.q() as u64).checked_pow((n * w) as u32).is_some_and(|v| v <= SWEEP_LIMIT)
}

/// Arities `(s, k, l)` up to `max` with `q^{n(s+k+l)}` within the sweep limit.
fn sweep_arities(rng: &mut ChaCha8Rng, spec: &FieldSpec, n: usize, max: usize) -> (usize, usize, usize) {
    loop {
        let (s, k, l) = (rng.gen_range(0..=max), rng.gen_range(0..=max), rng.gen_range(0..=max));
        if fits(spec, n, s + k + l) {
            return (s, k, l);
        }
    }
}

fn scaled(m: &ConcreteMap, c: &BigRational) -> LinMap {
    m.map().scale(c)
}

fn verify_functor(spec: &FieldSpec, n: usize, cfg: &RunConfig, rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    let qn = num_traits::pow(rat(spec.q() as i64), n);
    for _ in 0..cfg.trials {
        let (s, k, l) = sweep_arities(rng, spec, n, cfg.max_arity);
        let r = random::relation(rng, spec, s, k);
        let sr = random::relation(rng, spec, k, l);
        let (composite, d) = star(&r, &sr)?;
        let (fr, fs) = (f_r_matrix(&r, n)?, f_r_matrix(&sr, n)?);
        let lhs = concrete::concrete_compose(&fs, &fr)?;
        let rhs = scaled(&f_r_matrix(&composite, n)?, &num_traits::pow(qn.clone(), d));
        tally.record("F_n(f_S) F_n(f_R) = q^{n d} F_n(f_{S*R})", *lhs.map() == rhs, || format!("R = {r}, S = {sr}"));
        let formal = category::compose(&Morphism::from_relation(sr.clone()), &Morphism::from_relation(r.clone()), &TMode::Symbolic)?;
        tally.record("F_n respects formal composition", concrete::specialize(&formal, n)? == lhs, || format!("R = {r}, S = {sr}"));
        let (s2, k2) = loop {
            let (a, b) = (rng.gen_range(0..=cfg.max_arity), rng.gen_range(0..=cfg.max_arity));
            if fits(spec, n, s + k + a + b) {
                break (a, b);
            }
        };
        let r2 = random::relation(rng, spec, s2, k2);
        let kron = fr.map().kron(f_r_matrix(&r2, n)?.map())?;
        let prod = f_r_matrix(&product(&r, &r2)?, n)?;
        tally.record("F_n(f_R x f_R') = F_n(f_R) (x) F_n(f_R')", *prod.map() == kron, || format!("R = {r}, R' = {r2}"));
    }
    Ok(())
}

fn verify_relinfty(spec: &FieldSpec, n: usize, cfg: &RunConfig, rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    let data = standard_target(spec, n)?.without_unit();
    for _ in 0..cfg.trials {
        let (s, k, l) = sweep_arities(rng, spec, n, cfg.max_arity);
        let r = random::rel_infty(rng, spec, s, k);
        let sr = random::rel_infty(rng, spec, k, l);
        let (composite, d) = star(&r, &sr)?;
        let pair = || format!("R = {r}, S = {sr}");
        tally.record("d(R,S) = 0", d == 0, pair);
        tally.record("S*R in Rel^inf", composite.is_rel_infty(), pair);
        let (hr, hs) = (axioms::hat_f(&data, &r)?, axioms::hat_f(&data, &sr)?);
        tally.record("hat_f(S) hat_f(R) = hat_f(S*R)", hs.compose(&hr)? == axioms::hat_f(&data, &composite)?, pair);
        if fits(spec, n, s + 2 * k + l) {
            let joint = axioms::hat_f(&data, &product(&r, &sr)?)?;
            tally.record("hat_f(R x S) = hat_f(R) (x) hat_f(S)", joint == hr.kron(&hs)?, pair);
        }
        tally.record("hat_f(R) = F_n(f_R)", hr == f_r_matrix(&r, n)?.into_map(), pair);
        tally.record("stable under F^n -> F^{n+1}", concrete::rel_infty_stability(&r, n)?, pair);
    }
    Ok(())
}

fn verify_knop(spec: &FieldSpec, cfg: &RunConfig, rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    for _ in 0..cfg.trials {
        let (s, k, l) = sweep_arities(rng, spec, 1, cfg.max_arity);
        let r = random::relation(rng, spec, s, k);
        let sr = random::relation(rng, spec, k, l);
        let (composite, d) = star(&r, &sr)?;
        let (diamond, e) = knop_diamond(&r.perp(), &sr.perp())?;
        let pair = || format!("R = {r}, S = {sr}");
        tally.record("(S*R)^perp = S^perp <> R^perp", diamond == composite.perp(), pair);
        tally.record("e = d", e == d, pair);
        tally.record("perp is an involution", r.perp().perp() == r, pair);
    }
    Ok(())
}
