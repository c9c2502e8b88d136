//! Golden-data files: expected formulas written in generator notation, parsed and
//! instantiated over index ranges, then compared against computed values.
//!
//! Line format (fields separated by `|`, `#` starts a comment):
//!
//! ```text
//! KIND | ID | BINDERS | LHS | RHS
//! cop  | ex | l=1..m; l!=i | t[i,l]^p | sum{s=1..m}(t[i,s]^p ⊗ t[s,l]^p)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::Scalar;
use crate::poly::{Localized, Poly, Ring};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GoldenError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("evaluation error: {0}")]
    Eval(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

const SYMBOLS: [&str; 20] = [
    "..", "!=", "<=", ">=", "==", "+", "-", "*", "^", "(", ")", "[", "]", "{", "}", ",", ";", "=",
    "<", ">",
];

pub fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut k = 0;
    'outer: while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c == '⊗' {
            out.push(Tok::Sym("⊗"));
            k += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().collect();
            out.push(Tok::Int(
                text.parse().map_err(|_| format!("bad integer {text}"))?,
            ));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len()
                && (chars[k].is_alphanumeric() || chars[k] == '_' || chars[k] == '\'')
            {
                k += 1;
            }
            out.push(Tok::Ident(chars[start..k].iter().collect()));
            continue;
        }
        for sym in SYMBOLS {
            let sc: Vec<char> = sym.chars().collect();
            if chars[k..].starts_with(&sc) {
                out.push(Tok::Sym(sym));
                k += sc.len();
                continue 'outer;
            }
        }
        return Err(format!("unexpected character {c:?}"));
    }
    Ok(out)
}

/// Integer arithmetic over bound index variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arith {
    Int(i64),
    Var(String),
    Add(Box<Arith>, Box<Arith>),
    Sub(Box<Arith>, Box<Arith>),
    Mul(Box<Arith>, Box<Arith>),
    Neg(Box<Arith>),
    Call(String, Vec<Arith>),
}

pub type Env = BTreeMap<String, i64>;

impl Arith {
    pub fn eval(&self, env: &Env) -> Result<i64, GoldenError> {
        Ok(match self {
            Arith::Int(v) => *v,
            Arith::Var(v) => *env
                .get(v)
                .ok_or_else(|| GoldenError::UnknownVariable(v.clone()))?,
            Arith::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Arith::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Arith::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Arith::Neg(a) => -a.eval(env)?,
            Arith::Call(f, args) => {
                let v: Vec<i64> = args.iter().map(|a| a.eval(env)).collect::<Result<_, _>>()?;
                match (f.as_str(), v.as_slice()) {
                    // nth(a, lo, hi, excluded...): the a-th element of lo..=hi minus the excluded values.
                    ("nth", [a, lo, hi, ex @ ..]) => (*lo..=*hi)
                        .filter(|t| !ex.contains(t))
                        .nth((*a - 1).max(0) as usize)
                        .filter(|_| *a >= 1)
                        .ok_or_else(|| GoldenError::Eval(format!("nth index {a} out of range")))?,
                    // par(k): parity of the basis index k, i.e. 1 when k > m.
                    ("par", [k]) => i64::from(
                        *k > *env
                            .get("m")
                            .ok_or_else(|| GoldenError::UnknownVariable("m".into()))?,
                    ),
                    ("delta", [a, b]) => i64::from(a == b),
                    _ => {
                        return Err(GoldenError::Eval(format!(
                            "unknown function {f}/{}",
                            v.len()
                        )))
                    }
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Range {
        var: String,
        lo: Arith,
        hi: Arith,
    },
    Cmp {
        op: &'static str,
        a: Arith,
        b: Arith,
    },
}

/// `l=1..m; l!=i` style binders: ranges introduce variables, comparisons filter.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binders(pub Vec<Cond>);

impl Binders {
    /// All environments extending `env` that satisfy the binders, in lexicographic order.
    pub fn instances(&self, env: &Env) -> Result<Vec<Env>, GoldenError> {
        let mut envs = vec![env.clone()];
        for c in &self.0 {
            let mut next = Vec::new();
            for e in envs {
                match c {
                    Cond::Range { var, lo, hi } => {
                        for v in lo.eval(&e)?..=hi.eval(&e)? {
                            let mut e2 = e.clone();
                            e2.insert(var.clone(), v);
                            next.push(e2);
                        }
                    }
                    Cond::Cmp { op, a, b } => {
                        let (x, y) = (a.eval(&e)?, b.eval(&e)?);
                        let keep = match *op {
                            "!=" => x != y,
                            "==" | "=" => x == y,
                            "<" => x < y,
                            "<=" => x <= y,
                            ">" => x > y,
                            ">=" => x >= y,
                            _ => unreachable!(),
                        };
                        if keep {
                            next.push(e);
                        }
                    }
                }
            }
            envs = next;
        }
        Ok(envs)
    }

    pub fn variables(&self) -> Vec<String> {
        self.0
            .iter()
            .filter_map(|c| match c {
                Cond::Range { var, .. } => Some(var.clone()),
                Cond::Cmp { .. } => None,
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    /// Generator or alias `name[idx, ...]` (a bare name has no indices).
    Name(String, Vec<Arith>),
    Delta(Arith, Arith),
    Sum(Binders, Box<Expr>),
    Det {
        row: String,
        col: String,
        binders: Binders,
        body: Box<Expr>,
    },
    Antipode(Box<Expr>),
    Pow(Box<Expr>, Arith),
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    /// Factors with the leg advance flag: `true` means a `⊗` precedes the factor.
    Product(Vec<(bool, Expr)>),
}

/// A possibly indexed list of linear expressions, as used for spanning sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ListItem {
    Single(Expr),
    Each(Binders, Expr),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn new(s: &str) -> Result<Self, String> {
        Ok(Parser {
            toks: tokenize(s)?,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.peek_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), String> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(format!(
                "expected {s:?} at token {}, found {:?}",
                self.pos,
                self.peek()
            ))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            t => Err(format!("expected identifier, found {t:?}")),
        }
    }

    fn done(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("trailing input at {t:?}")),
        }
    }

    fn arith(&mut self) -> Result<Arith, String> {
        let mut a = self.aterm()?;
        loop {
            if self.eat_sym("+") {
                a = Arith::Add(Box::new(a), Box::new(self.aterm()?));
            } else if self.eat_sym("-") {
                a = Arith::Sub(Box::new(a), Box::new(self.aterm()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn aterm(&mut self) -> Result<Arith, String> {
        let mut a = self.afactor()?;
        while self.eat_sym("*") {
            a = Arith::Mul(Box::new(a), Box::new(self.afactor()?));
        }
        Ok(a)
    }

    fn afactor(&mut self) -> Result<Arith, String> {
        if self.eat_sym("-") {
            return Ok(Arith::Neg(Box::new(self.afactor()?)));
        }
        if self.eat_sym("(") {
            let a = self.arith()?;
            self.expect_sym(")")?;
            return Ok(a);
        }
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Arith::Int(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat_sym("(") {
                    let mut args = vec![self.arith()?];
                    while self.eat_sym(",") {
                        args.push(self.arith()?);
                    }
                    self.expect_sym(")")?;
                    Ok(Arith::Call(name, args))
                } else {
                    Ok(Arith::Var(name))
                }
            }
            t => Err(format!("expected integer expression, found {t:?}")),
        }
    }

    fn binders_until(&mut self, close: Option<&str>) -> Result<Binders, String> {
        let mut out = Vec::new();
        loop {
            if self.peek().is_none() || close.is_some_and(|c| self.peek_sym(c)) {
                return Ok(Binders(out));
            }
            let save = self.pos;
            let is_range = matches!(self.peek(), Some(Tok::Ident(_)))
                && matches!(self.toks.get(self.pos + 1), Some(Tok::Sym("=")));
            if is_range {
                let var = self.ident()?;
                self.expect_sym("=")?;
                let lo = self.arith()?;
                self.expect_sym("..")?;
                let hi = self.arith()?;
                out.push(Cond::Range { var, lo, hi });
            } else {
                self.pos = save;
                let a = self.arith()?;
                let op = match self.peek() {
                    Some(Tok::Sym(s)) if ["!=", "==", "<", "<=", ">", ">="].contains(s) => *s,
                    t => return Err(format!("expected comparison, found {t:?}")),
                };
                self.pos += 1;
                let b = self.arith()?;
                out.push(Cond::Cmp { op, a, b });
            }
            if !self.eat_sym(";") {
                return Ok(Binders(out));
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut terms = Vec::new();
        let neg = if self.eat_sym("-") {
            true
        } else {
            self.eat_sym("+");
            false
        };
        let first = self.term()?;
        terms.push(if neg {
            Expr::Neg(Box::new(first))
        } else {
            first
        });
        loop {
            if self.eat_sym("+") {
                terms.push(self.term()?);
            } else if self.eat_sym("-") {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut factors = vec![(false, self.factor()?)];
        loop {
            if self.eat_sym("*") {
                factors.push((false, self.factor()?));
            } else if self.eat_sym("⊗") {
                factors.push((true, self.factor()?));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor").1
        } else {
            Expr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, String> {
        let base = self.atom()?;
        if self.eat_sym("^") {
            let e = if self.eat_sym("(") {
                let a = self.arith()?;
                self.expect_sym(")")?;
                a
            } else {
                match self.peek().cloned() {
                    Some(Tok::Int(v)) => {
                        self.pos += 1;
                        Arith::Int(v)
                    }
                    Some(Tok::Ident(v)) => {
                        self.pos += 1;
                        Arith::Var(v)
                    }
                    t => return Err(format!("expected exponent, found {t:?}")),
                }
            };
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, String> {
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "sum" => {
                        self.expect_sym("{")?;
                        let b = self.binders_until(Some("}"))?;
                        self.expect_sym("}")?;
                        self.expect_sym("(")?;
                        let e = self.expr()?;
                        self.expect_sym(")")?;
                        Ok(Expr::Sum(b, Box::new(e)))
                    }
                    "det" => {
                        self.expect_sym("[")?;
                        let row = self.ident()?;
                        self.expect_sym(",")?;
                        let col = self.ident()?;
                        self.expect_sym("]")?;
                        self.expect_sym("{")?;
                        let b = self.binders_until(Some("}"))?;
                        self.expect_sym("}")?;
                        self.expect_sym("(")?;
                        let e = self.expr()?;
                        self.expect_sym(")")?;
                        Ok(Expr::Det {
                            row,
                            col,
                            binders: b,
                            body: Box::new(e),
                        })
                    }
                    "delta" => {
                        self.expect_sym("(")?;
                        let a = self.arith()?;
                        self.expect_sym(",")?;
                        let b = self.arith()?;
                        self.expect_sym(")")?;
                        Ok(Expr::Delta(a, b))
                    }
                    "S" => {
                        self.expect_sym("(")?;
                        let e = self.expr()?;
                        self.expect_sym(")")?;
                        Ok(Expr::Antipode(Box::new(e)))
                    }
                    _ => {
                        let mut idx = Vec::new();
                        if self.eat_sym("[") {
                            idx.push(self.arith()?);
                            while self.eat_sym(",") {
                                idx.push(self.arith()?);
                            }
                            self.expect_sym("]")?;
                        }
                        Ok(Expr::Name(name, idx))
                    }
                }
            }
            t => Err(format!("expected expression, found {t:?}")),
        }
    }

    fn list(&mut self) -> Result<Vec<ListItem>, String> {
        let mut out = Vec::new();
        loop {
            if matches!(self.peek(), Some(Tok::Ident(s)) if s == "each") {
                self.pos += 1;
                self.expect_sym("{")?;
                let b = self.binders_until(Some("}"))?;
                self.expect_sym("}")?;
                self.expect_sym("(")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                out.push(ListItem::Each(b, e));
            } else {
                out.push(ListItem::Single(self.expr()?));
            }
            if !self.eat_sym(";") {
                return Ok(out);
            }
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr, String> {
    let mut p = Parser::new(s)?;
    let e = p.expr()?;
    p.done()?;
    Ok(e)
}

pub fn parse_list(s: &str) -> Result<Vec<ListItem>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut p = Parser::new(s)?;
    let l = p.list()?;
    p.done()?;
    Ok(l)
}

pub fn parse_binders(s: &str) -> Result<Binders, String> {
    let mut p = Parser::new(s)?;
    let b = p.binders_until(None)?;
    p.done()?;
    Ok(b)
}

/// What a golden line asserts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// `x·LHS = RHS` exactly.
    Conj,
    /// The named computed subspace is spanned by the listed linear forms.
    Span(String),
    /// `LHS ≡ RHS` modulo the image of `x`.
    Class,
    /// Class of `Δ(LHS)` equals the class of `RHS`, optionally after a named quotient.
    Coproduct(Option<String>),
    /// Alias definition `name[params] := RHS`.
    Alias,
    /// Class of the coaction of the module element `LHS` equals the class of `RHS`.
    Coaction(String),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Conj => write!(f, "conj"),
            Kind::Span(s) => write!(f, "span:{s}"),
            Kind::Class => write!(f, "class"),
            Kind::Coproduct(None) => write!(f, "cop"),
            Kind::Coproduct(Some(q)) => write!(f, "cop/{q}"),
            Kind::Alias => write!(f, "alias"),
            Kind::Coaction(m) => write!(f, "coact:{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Pair(Expr, Expr),
    List(Vec<ListItem>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenLine {
    pub line: usize,
    pub kind: Kind,
    pub id: String,
    pub binders: Binders,
    pub lhs_text: String,
    pub rhs_text: String,
    pub body: Body,
    /// Known discrepancy: the computed class equals `RHS + differs_by`.
    pub differs_by: Option<Expr>,
}

fn parse_kind(s: &str) -> Option<Kind> {
    Some(match s.split_once(['/', ':']) {
        None => match s {
            "conj" => Kind::Conj,
            "class" => Kind::Class,
            "cop" => Kind::Coproduct(None),
            "alias" => Kind::Alias,
            _ => return None,
        },
        Some(("span", t)) => Kind::Span(t.into()),
        Some(("cop", q)) => Kind::Coproduct(Some(q.into())),
        Some(("coact", m)) => Kind::Coaction(m.into()),
        _ => return None,
    })
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenLine>, GoldenError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| GoldenError::Syntax { line, msg };
        let fields: Vec<&str> = content.split('|').map(str::trim).collect();
        if fields.len() != 5 && fields.len() != 6 {
            return Err(err(format!(
                "expected 5 or 6 fields, found {}",
                fields.len()
            )));
        }
        let differs_by = match fields.get(5) {
            None => None,
            Some(f) => {
                let rest = f
                    .strip_prefix("differs-by:")
                    .ok_or_else(|| err(format!("unknown option {f}")))?;
                Some(parse_expr(rest).map_err(&err)?)
            }
        };
        let kind =
            parse_kind(fields[0]).ok_or_else(|| err(format!("unknown kind {}", fields[0])))?;
        let binders = parse_binders(fields[2]).map_err(&err)?;
        let body = match kind {
            Kind::Span(_) => Body::List(parse_list(fields[4]).map_err(&err)?),
            _ => Body::Pair(
                parse_expr(fields[3]).map_err(&err)?,
                parse_expr(fields[4]).map_err(&err)?,
            ),
        };
        out.push(GoldenLine {
            line,
            kind,
            id: fields[1].into(),
            binders,
            lhs_text: fields[3].into(),
            rhs_text: fields[4].into(),
            body,
            differs_by,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of one instantiated golden line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub kind: String,
    pub instance: String,
    pub expected: String,
    pub computed: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `num / ∏ units[u]^dens[u]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Val<F> {
    pub num: Poly<F>,
    pub dens: Vec<u32>,
}

/// One tensor leg: a ring and the generator names it understands.
pub struct Leg {
    pub ring: Arc<Ring>,
    pub resolve: Box<dyn Fn(&str, &[i64]) -> Option<usize> + Send + Sync>,
}

/// Antipode values on the generators of one ring, all over `units[unit]^power` after embedding.
#[derive(Clone, Debug)]
pub struct AntipodeData<F> {
    pub ring: Arc<Ring>,
    pub values: Vec<Localized<F>>,
    /// For each leg: the unit index of the embedded denominator, if the antipode applies there.
    pub unit_in_leg: Vec<Option<usize>>,
}

pub type Aliases = BTreeMap<String, (Vec<String>, Expr)>;

/// Evaluates expressions into the concatenation of its legs' rings.
pub struct Evaluator<F> {
    pub legs: Vec<Leg>,
    pub combined: Arc<Ring>,
    offsets: Vec<usize>,
    pub units: Vec<Poly<F>>,
    pub antipode: Option<AntipodeData<F>>,
}

fn eval_err(msg: impl Into<String>) -> GoldenError {
    GoldenError::Eval(msg.into())
}

/// `end` is `None` for a zero that came from an empty sum and fits any leg.
type Evaluated<F> = (Val<F>, Option<usize>);

impl<F: Scalar> Evaluator<F> {
    pub fn new(legs: Vec<Leg>, units: Vec<Poly<F>>, antipode: Option<AntipodeData<F>>) -> Self {
        let mut names = Vec::new();
        let mut parity = Vec::new();
        let mut offsets = Vec::new();
        let distinct = {
            let mut all: Vec<&str> = legs
                .iter()
                .flat_map(|l| l.ring.names().iter().map(String::as_str))
                .collect();
            let total = all.len();
            all.sort_unstable();
            all.dedup();
            all.len() == total
        };
        for (k, leg) in legs.iter().enumerate() {
            offsets.push(names.len());
            for g in 0..leg.ring.nvars() {
                names.push(if distinct {
                    leg.ring.name(g).to_string()
                } else {
                    format!("{}#{k}", leg.ring.name(g))
                });
                parity.push(leg.ring.parity(g));
            }
        }
        Evaluator {
            combined: Ring::new(names, parity),
            legs,
            offsets,
            units,
            antipode,
        }
    }

    pub fn nlegs(&self) -> usize {
        self.legs.len()
    }

    /// Embed a polynomial of leg `leg`'s ring into the combined ring.
    pub fn embed(&self, f: &Poly<F>, leg: usize) -> Poly<F> {
        let map: Vec<usize> = (0..self.legs[leg].ring.nvars())
            .map(|g| self.offsets[leg] + g)
            .collect();
        f.relabel(self.combined.nvars(), &map)
    }

    pub fn plain(&self, num: Poly<F>) -> Val<F> {
        Val {
            num,
            dens: vec![0; self.units.len()],
        }
    }

    fn constant(&self, c: F) -> Val<F> {
        self.plain(self.combined.constant(c))
    }

    fn lift(&self, v: &Val<F>, dens: &[u32]) -> Poly<F> {
        let mut num = v.num.clone();
        for (u, (&have, &want)) in v.dens.iter().zip(dens).enumerate() {
            if want > have {
                num = self
                    .combined
                    .mul(&num, &self.combined.pow(&self.units[u], want - have));
            }
        }
        num
    }

    pub fn add(&self, a: &Val<F>, b: &Val<F>) -> Val<F> {
        let dens: Vec<u32> = a.dens.iter().zip(&b.dens).map(|(x, y)| *x.max(y)).collect();
        Val {
            num: self.lift(a, &dens).add(&self.lift(b, &dens)),
            dens,
        }
    }

    pub fn mul(&self, a: &Val<F>, b: &Val<F>) -> Val<F> {
        Val {
            num: self.combined.mul(&a.num, &b.num),
            dens: a.dens.iter().zip(&b.dens).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn neg(&self, a: &Val<F>) -> Val<F> {
        Val {
            num: a.num.neg(),
            dens: a.dens.clone(),
        }
    }

    /// Rewrite over `∏ units[u]^dens[u]` with each power at least the current one.
    pub fn over(&self, v: &Val<F>, dens: &[u32]) -> Poly<F> {
        self.lift(v, dens)
    }

    fn pow(&self, a: &Val<F>, e: i64) -> Result<Val<F>, GoldenError> {
        if e >= 0 {
            let mut acc = self.constant(F::one());
            for _ in 0..e {
                acc = self.mul(&acc, a);
            }
            return Ok(acc);
        }
        let u = self
            .units
            .iter()
            .position(|u| *u == a.num && a.dens.iter().all(|&d| d == 0))
            .ok_or_else(|| {
                eval_err(format!(
                    "negative power of a non-unit {}",
                    self.combined.render(&a.num)
                ))
            })?;
        let mut v = self.constant(F::one());
        v.dens[u] = (-e) as u32;
        Ok(v)
    }

    pub fn eval(&self, e: &Expr, env: &Env, aliases: &Aliases) -> Result<Val<F>, GoldenError> {
        let (v, end) = self.eval_at(e, env, aliases, 0)?;
        match end {
            Some(l) if l + 1 != self.nlegs() => Err(eval_err(format!(
                "expression spans {} legs, expected {}",
                l + 1,
                self.nlegs()
            ))),
            _ => Ok(v),
        }
    }

    fn eval_at(
        &self,
        e: &Expr,
        env: &Env,
        aliases: &Aliases,
        leg: usize,
    ) -> Result<Evaluated<F>, GoldenError> {
        if leg >= self.nlegs() {
            return Err(eval_err("too many tensor legs"));
        }
        Ok(match e {
            Expr::Int(v) => (self.constant(F::from_int(*v)), Some(leg)),
            Expr::Delta(a, b) => (
                self.constant(F::from_int(i64::from(a.eval(env)? == b.eval(env)?))),
                Some(leg),
            ),
            Expr::Name(name, idx) => {
                let iv: Vec<i64> = idx.iter().map(|a| a.eval(env)).collect::<Result<_, _>>()?;
                if let Some((params, body)) = aliases.get(name) {
                    if params.len() != iv.len() {
                        return Err(eval_err(format!(
                            "alias {name} takes {} indices",
                            params.len()
                        )));
                    }
                    let mut env2 = env.clone();
                    for (p, v) in params.iter().zip(&iv) {
                        env2.insert(p.clone(), *v);
                    }
                    return self.eval_at(body, &env2, aliases, leg);
                }
                let g = (self.legs[leg].resolve)(name, &iv).ok_or_else(|| {
                    GoldenError::UnknownGenerator(format!("{name}{iv:?} in leg {leg}"))
                })?;
                (
                    self.plain(self.combined.gen(self.offsets[leg] + g)),
                    Some(leg),
                )
            }
            Expr::Neg(a) => {
                let (v, end) = self.eval_at(a, env, aliases, leg)?;
                (self.neg(&v), end)
            }
            Expr::Pow(a, ex) => {
                let (v, end) = self.eval_at(a, env, aliases, leg)?;
                (self.pow(&v, ex.eval(env)?)?, end)
            }
            Expr::Add(terms) => {
                let mut acc = self.plain(self.combined.zero());
                let mut end = None;
                for t in terms {
                    let (v, te) = self.eval_at(t, env, aliases, leg)?;
                    end = merge_end(end, te)?;
                    acc = self.add(&acc, &v);
                }
                (acc, end)
            }
            Expr::Sum(b, body) => {
                let mut acc = self.plain(self.combined.zero());
                let mut end = None;
                for env2 in b.instances(env)? {
                    let (v, te) = self.eval_at(body, &env2, aliases, leg)?;
                    end = merge_end(end, te)?;
                    acc = self.add(&acc, &v);
                }
                (acc, end)
            }
            Expr::Product(factors) => {
                let mut acc = self.constant(F::one());
                let mut cur = leg;
                for (advance, f) in factors {
                    if *advance {
                        cur += 1;
                    }
                    let (v, fe) = self.eval_at(f, env, aliases, cur)?;
                    match fe {
                        Some(l) => cur = l,
                        None => return Ok((self.plain(self.combined.zero()), None)),
                    }
                    acc = self.mul(&acc, &v);
                }
                (acc, Some(cur))
            }
            Expr::Det {
                row,
                col,
                binders,
                body,
            } => {
                let set: Vec<i64> = binders
                    .instances(env)?
                    .iter()
                    .map(|e| {
                        e.get(row)
                            .copied()
                            .ok_or_else(|| GoldenError::UnknownVariable(row.clone()))
                    })
                    .collect::<Result<_, _>>()?;
                let mut mat = Vec::new();
                for &r in &set {
                    let mut rowv = Vec::new();
                    for &c in &set {
                        let mut env2 = env.clone();
                        env2.insert(row.clone(), r);
                        env2.insert(col.clone(), c);
                        rowv.push(self.eval_at(body, &env2, aliases, leg)?.0);
                    }
                    mat.push(rowv);
                }
                (self.det(&mat), Some(leg))
            }
            Expr::Antipode(a) => {
                let (v, end) = self.eval_at(a, env, aliases, leg)?;
                if end.is_some_and(|l| l != leg) {
                    return Err(eval_err("antipode of a multi-leg expression"));
                }
                (self.antipode_at(&v, leg)?, Some(leg))
            }
        })
    }

    fn det(&self, mat: &[Vec<Val<F>>]) -> Val<F> {
        match mat.len() {
            0 => self.constant(F::one()),
            1 => mat[0][0].clone(),
            n => {
                let mut acc = self.plain(self.combined.zero());
                for c in 0..n {
                    let minor: Vec<Vec<Val<F>>> = mat[1..]
                        .iter()
                        .map(|r| {
                            r.iter()
                                .enumerate()
                                .filter(|&(k, _)| k != c)
                                .map(|(_, v)| v.clone())
                                .collect()
                        })
                        .collect();
                    let t = self.mul(&mat[0][c], &self.det(&minor));
                    acc = self.add(&acc, &if c % 2 == 0 { t } else { self.neg(&t) });
                }
                acc
            }
        }
    }

    fn antipode_at(&self, v: &Val<F>, leg: usize) -> Result<Val<F>, GoldenError> {
        let s = self
            .antipode
            .as_ref()
            .ok_or_else(|| eval_err("no antipode available"))?;
        let unit = s
            .unit_in_leg
            .get(leg)
            .copied()
            .flatten()
            .ok_or_else(|| eval_err(format!("no antipode in leg {leg}")))?;
        if v.dens.iter().any(|&d| d != 0) {
            return Err(eval_err("antipode of a fraction"));
        }
        let off = self.offsets[leg];
        let n = s.ring.nvars();
        let mut acc = self.plain(self.combined.zero());
        for (m, &c) in v.num.terms() {
            let e = m.exponents();
            if e[..off].iter().chain(&e[off + n..]).any(|&k| k > 0) {
                return Err(eval_err("antipode argument leaves its leg"));
            }
            let mut term = self.constant(c);
            for (g, &k) in e[off..off + n].iter().enumerate() {
                for _ in 0..k {
                    let mut img = self.plain(self.embed(&s.values[g].num, leg));
                    img.dens[unit] = s.values[g].power;
                    term = self.mul(&term, &img);
                }
            }
            acc = self.add(&acc, &term);
        }
        Ok(acc)
    }
}

fn merge_end(a: Option<usize>, b: Option<usize>) -> Result<Option<usize>, GoldenError> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(eval_err("summands span different numbers of legs")),
        (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
        _ => Ok(None),
    }
}
