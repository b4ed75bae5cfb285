//! HyperLTL over finite teams, and the translations between single-universal
//! HyperLTL and team LTL under asynchronous semantics.
//!
//! Concrete syntax: `E pi1. A pi2. body`, with atoms `p@pi1`, classical
//! negation `!`, `|`, `&`, `X`, `F`, `G`, `U`, `R`.

use std::fmt;

use crate::classical::{release_vec, until_vec};
use crate::error::{Error, Result};
use crate::formula::parse::{lex, Spanned, Tok};
use crate::formula::{Formula, Prop};
use crate::traces::{gcd, Team, UpTrace, DEFAULT_MAX_LCM};

/// Default cap on the quantifier prefix length accepted by `check_hyper`.
pub const DEFAULT_MAX_QUANTIFIERS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HyperQuant {
    Exists,
    Forall,
}

/// Quantifier-free body. `And`, `F`, `G` and `R` are kept as nodes so that
/// sentences print back the way they were written.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HyperBody {
    Atom { prop: Prop, var: String },
    Not(Box<HyperBody>),
    Or(Box<HyperBody>, Box<HyperBody>),
    And(Box<HyperBody>, Box<HyperBody>),
    Next(Box<HyperBody>),
    Eventually(Box<HyperBody>),
    Globally(Box<HyperBody>),
    Until(Box<HyperBody>, Box<HyperBody>),
    Release(Box<HyperBody>, Box<HyperBody>),
}

impl HyperBody {
    pub fn atom(prop: Prop, var: impl Into<String>) -> Self {
        HyperBody::Atom { prop, var: var.into() }
    }

    fn visit_vars(&self, out: &mut Vec<String>) {
        use HyperBody::*;
        match self {
            Atom { var, .. } => out.push(var.clone()),
            Not(a) | Next(a) | Eventually(a) | Globally(a) => a.visit_vars(out),
            Or(a, b) | And(a, b) | Until(a, b) | Release(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
        }
    }
}

/// A closed HyperLTL formula: every variable of the body is bound once.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperSentence {
    prefix: Vec<(HyperQuant, String)>,
    body: HyperBody,
}

impl HyperSentence {
    pub fn new(prefix: Vec<(HyperQuant, String)>, body: HyperBody) -> Result<Self> {
        for (i, (_, v)) in prefix.iter().enumerate() {
            if prefix[..i].iter().any(|(_, w)| w == v) {
                return Err(Error::InvalidInstance(format!("trace variable `{v}` is bound twice")));
            }
        }
        let mut used = Vec::new();
        body.visit_vars(&mut used);
        if let Some(v) = used.iter().find(|v| !prefix.iter().any(|(_, w)| w == *v)) {
            return Err(Error::InvalidInstance(format!("trace variable `{v}` is not bound")));
        }
        Ok(HyperSentence { prefix, body })
    }

    pub fn prefix(&self) -> &[(HyperQuant, String)] {
        &self.prefix
    }

    pub fn body(&self) -> &HyperBody {
        &self.body
    }
}

impl fmt::Display for HyperSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            let q = match q {
                HyperQuant::Exists => "E",
                HyperQuant::Forall => "A",
            };
            write!(f, "{q} {v}. ")?;
        }
        write!(f, "{}", render(&self.body, 0))
    }
}

impl std::str::FromStr for HyperSentence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_hyper(s)
    }
}

const OR: u8 = 0;
const AND: u8 = 1;
const TEMPORAL_BINARY: u8 = 2;

fn render(b: &HyperBody, min: u8) -> String {
    use HyperBody::*;
    let (prec, s) = match b {
        Atom { prop, var } => return format!("{prop}@{var}"),
        Not(a) => return format!("!{}", render(a, 3)),
        Next(a) => return format!("X {}", render(a, 3)),
        Eventually(a) => return format!("F {}", render(a, 3)),
        Globally(a) => return format!("G {}", render(a, 3)),
        Or(a, c) => (OR, format!("{} | {}", render(a, OR), render(c, AND))),
        And(a, c) => (AND, format!("{} & {}", render(a, AND), render(c, TEMPORAL_BINARY))),
        Until(a, c) | Release(a, c) => {
            let op = if matches!(b, Until(..)) { "U" } else { "R" };
            // Right operand may chain the same operator without parentheses.
            let same = matches!((b, &**c), (Until(..), Until(..)) | (Release(..), Release(..)));
            let rhs = if same { render(c, TEMPORAL_BINARY) } else { render(c, 3) };
            (TEMPORAL_BINARY, format!("{} {op} {rhs}", render(a, 3)))
        }
    };
    if prec < min {
        format!("({s})")
    } else {
        s
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::syntax(s.line, s.col, msg)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !["X", "F", "G", "U", "R"].contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn or(&mut self) -> Result<HyperBody> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = HyperBody::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<HyperBody> {
        let mut lhs = self.untilrel()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = HyperBody::And(Box::new(lhs), Box::new(self.untilrel()?));
        }
        Ok(lhs)
    }

    fn untilrel(&mut self) -> Result<HyperBody> {
        let mut operands = vec![self.unary()?];
        let mut op: Option<bool> = None;
        loop {
            let until = if self.is_kw("U") {
                true
            } else if self.is_kw("R") {
                false
            } else {
                break;
            };
            if op.is_some_and(|o| o != until) {
                return Err(self.err("U and R cannot be mixed without parentheses"));
            }
            op = Some(until);
            self.bump();
            operands.push(self.unary()?);
        }
        let mut acc = operands.pop().expect("at least one operand");
        while let Some(lhs) = operands.pop() {
            acc = if op == Some(true) {
                HyperBody::Until(Box::new(lhs), Box::new(acc))
            } else {
                HyperBody::Release(Box::new(lhs), Box::new(acc))
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<HyperBody> {
        let wrap: fn(Box<HyperBody>) -> HyperBody = match self.peek() {
            Tok::Ident(s) if s == "X" => HyperBody::Next,
            Tok::Ident(s) if s == "F" => HyperBody::Eventually,
            Tok::Ident(s) if s == "G" => HyperBody::Globally,
            Tok::Bang => HyperBody::Not,
            _ => return self.atom(),
        };
        self.bump();
        Ok(wrap(Box::new(self.unary()?)))
    }

    fn atom(&mut self) -> Result<HyperBody> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let b = self.or()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(b)
            }
            Tok::End => Err(self.err("unexpected end of formula")),
            Tok::Ident(_) => {
                let p = self.ident("a proposition")?;
                if *self.peek() != Tok::At {
                    return Err(self.err("expected `@` and a trace variable after the proposition"));
                }
                self.bump();
                let v = self.ident("a trace variable")?;
                Ok(HyperBody::atom(Prop::raw(p), v))
            }
            other => Err(self.err(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_hyper(text: &str) -> Result<HyperSentence> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut prefix: Vec<(HyperQuant, String)> = Vec::new();
    loop {
        let q = if p.is_kw("E") {
            HyperQuant::Exists
        } else if p.is_kw("A") {
            HyperQuant::Forall
        } else {
            break;
        };
        // `E` or `A` followed by `@` is a proposition, not a quantifier.
        if p.toks.get(p.pos + 1).is_some_and(|t| t.tok == Tok::At) {
            break;
        }
        p.bump();
        let v = p.ident("a trace variable")?;
        if prefix.iter().any(|(_, w)| *w == v) {
            return Err(p.err(format!("trace variable `{v}` is bound twice")));
        }
        if *p.peek() != Tok::Dot {
            return Err(p.err("expected `.` after the quantified variable"));
        }
        p.bump();
        prefix.push((q, v));
    }
    let start = p.pos;
    let body = p.or()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    let mut used = Vec::new();
    body.visit_vars(&mut used);
    if let Some(v) = used.iter().find(|v| !prefix.iter().any(|(_, w)| w == *v)) {
        let s = &p.toks[start];
        return Err(Error::syntax(s.line, s.col, format!("trace variable `{v}` is not bound")));
    }
    Ok(HyperSentence { prefix, body })
}

pub fn check_hyper(team: &Team, s: &HyperSentence) -> Result<bool> {
    check_hyper_with(team, s, DEFAULT_MAX_QUANTIFIERS, DEFAULT_MAX_LCM)
}

/// Quantifiers range over the members of `team`; the body is evaluated on
/// the joint lasso of the assigned traces, shifting all of them together.
pub fn check_hyper_with(team: &Team, s: &HyperSentence, max_quantifiers: usize, max_lcm: u64) -> Result<bool> {
    if s.prefix.len() > max_quantifiers {
        return Err(Error::bound("quantifiers in a hyper sentence", max_quantifiers as u64));
    }
    let mut assigned: Vec<&UpTrace> = Vec::with_capacity(s.prefix.len());
    quantify(team, s, &mut assigned, max_lcm)
}

fn quantify<'a>(team: &'a Team, s: &HyperSentence, assigned: &mut Vec<&'a UpTrace>, max_lcm: u64) -> Result<bool> {
    let Some((q, _)) = s.prefix.get(assigned.len()) else {
        return eval_joint(s, assigned, max_lcm);
    };
    let want = *q == HyperQuant::Exists;
    for t in team.traces() {
        assigned.push(t);
        let r = quantify(team, s, assigned, max_lcm);
        assigned.pop();
        if r? == want {
            return Ok(want);
        }
    }
    Ok(!want)
}

fn eval_joint(s: &HyperSentence, assigned: &[&UpTrace], max_lcm: u64) -> Result<bool> {
    let stem = assigned.iter().map(|t| t.prefix().len()).max().unwrap_or(0);
    let mut period: u64 = 1;
    for t in assigned {
        let l = t.cycle().len() as u64;
        period = period / gcd(period, l) * l;
        if period > max_lcm {
            return Err(Error::bound("lcm of the assigned loop lengths", max_lcm));
        }
    }
    let n = stem + period as usize;
    let next: Vec<usize> = (0..n).map(|i| if i + 1 < n { i + 1 } else { stem }).collect();
    let v = eval_body(&s.body, s, assigned, n, &next);
    Ok(v[0])
}

fn eval_body(b: &HyperBody, s: &HyperSentence, assigned: &[&UpTrace], n: usize, next: &[usize]) -> Vec<bool> {
    use HyperBody::*;
    let rec = |c: &HyperBody| eval_body(c, s, assigned, n, next);
    match b {
        Atom { prop, var } => {
            let k = s.prefix.iter().position(|(_, w)| w == var).expect("closed sentence");
            let t = assigned[k];
            (0..n).map(|i| t.value_at(i).contains(prop)).collect()
        }
        Not(a) => rec(a).into_iter().map(|x| !x).collect(),
        Or(a, c) => rec(a).into_iter().zip(rec(c)).map(|(x, y)| x || y).collect(),
        And(a, c) => rec(a).into_iter().zip(rec(c)).map(|(x, y)| x && y).collect(),
        Next(a) => {
            let v = rec(a);
            next.iter().map(|&j| v[j]).collect()
        }
        Eventually(a) => until_vec(next, &vec![true; n], &rec(a)),
        Globally(a) => release_vec(next, &vec![false; n], &rec(a)),
        Until(a, c) => until_vec(next, &rec(a), &rec(c)),
        Release(a, c) => release_vec(next, &rec(a), &rec(c)),
    }
}

/// Variable name used by `ltl_to_forall_hyper`.
pub const FORALL_VAR: &str = "pi";

/// `forall pi. f'` with every proposition `p` of `f` read as `p@pi`.
pub fn ltl_to_forall_hyper(f: &Formula) -> Result<HyperSentence> {
    if !f.is_pure_ltl() {
        return Err(Error::unsupported(
            "only pure LTL formulas translate to single-universal hyper sentences",
        ));
    }
    Ok(HyperSentence {
        prefix: vec![(HyperQuant::Forall, FORALL_VAR.to_string())],
        body: to_body(f),
    })
}

fn to_body(f: &Formula) -> HyperBody {
    let b = |g: &Formula| Box::new(to_body(g));
    match f {
        Formula::Lit(p) => HyperBody::atom(p.clone(), FORALL_VAR),
        Formula::NegLit(p) => HyperBody::Not(Box::new(HyperBody::atom(p.clone(), FORALL_VAR))),
        Formula::And(l, r) => HyperBody::And(b(l), b(r)),
        Formula::Split(l, r) => HyperBody::Or(b(l), b(r)),
        Formula::Next(a) => HyperBody::Next(b(a)),
        Formula::Eventually(a) => HyperBody::Eventually(b(a)),
        Formula::Globally(a) => HyperBody::Globally(b(a)),
        Formula::Until(l, r) => HyperBody::Until(b(l), b(r)),
        Formula::Release(l, r) => HyperBody::Release(b(l), b(r)),
        Formula::Not(_) | Formula::Dep { .. } | Formula::Gen { .. } => {
            unreachable!("checked to be pure LTL")
        }
    }
}

/// The body of `forall pi. psi` as a team LTL formula in negation normal
/// form. Any other prefix is rejected.
pub fn forall_hyper_to_ltl(s: &HyperSentence) -> Result<Formula> {
    match s.prefix.as_slice() {
        [(HyperQuant::Forall, _)] => Ok(nnf(&s.body, true)),
        _ => Err(Error::NotForallFragment),
    }
}

fn nnf(b: &HyperBody, positive: bool) -> Formula {
    use HyperBody::*;
    let same = |c: &HyperBody| nnf(c, positive);
    match (b, positive) {
        (Atom { prop, .. }, true) => Formula::Lit(prop.clone()),
        (Atom { prop, .. }, false) => Formula::NegLit(prop.clone()),
        (Not(a), _) => nnf(a, !positive),
        (Or(a, c), true) | (And(a, c), false) => Formula::split(same(a), same(c)),
        (And(a, c), true) | (Or(a, c), false) => Formula::and(same(a), same(c)),
        (Next(a), _) => Formula::next(same(a)),
        (Eventually(a), true) | (Globally(a), false) => Formula::eventually(same(a)),
        (Globally(a), true) | (Eventually(a), false) => Formula::globally(same(a)),
        (Until(a, c), true) | (Release(a, c), false) => Formula::until(same(a), same(c)),
        (Release(a, c), true) | (Until(a, c), false) => Formula::release(same(a), same(c)),
    }
}
