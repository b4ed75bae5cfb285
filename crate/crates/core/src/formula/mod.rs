//! Team-LTL formulas: syntax tree, concrete syntax, and the structural
//! transformations used by the evaluators.
//!
//! Classical connectives are kept in negation normal form: `!` only occurs
//! on propositions. The contradictory negation `~` may wrap anything.

pub(crate) mod parse;
mod transform;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::teamcheck::GenAtomRegistry;

pub use parse::{parse_formula, render_formula};
pub use transform::{bar_name, bar_transform, dualize};

/// An atomic proposition. Always a valid identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prop(String);

impl Prop {
    pub fn new(name: &str) -> Result<Self> {
        if is_identifier(name) {
            Ok(Prop(name.to_string()))
        } else {
            Err(Error::syntax(
                1,
                1,
                format!("`{name}` is not a valid proposition name"),
            ))
        }
    }

    /// For names built from already-valid identifiers.
    pub(crate) fn raw(name: String) -> Self {
        debug_assert!(is_identifier(&name), "invalid proposition {name}");
        Prop(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A team-LTL formula.
///
/// `Release(l, r)` is `l R r`: `r` has to hold up to and including the first
/// position where `l` holds (or forever). For instance `q R p` holds on
/// `{p} {p,q} {} ...` but not on `{p} {q} ...`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Lit(Prop),
    NegLit(Prop),
    And(Box<Formula>, Box<Formula>),
    /// Splitjunction: the team is divided into two parts.
    Split(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Eventually(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    /// Contradictory negation `~`.
    Not(Box<Formula>),
    Dep {
        determinants: Vec<Prop>,
        determined: Vec<Prop>,
    },
    Gen {
        name: String,
        args: Vec<Prop>,
    },
}

impl Formula {
    pub fn lit(name: &str) -> Self {
        Formula::Lit(Prop::new(name).expect("valid proposition"))
    }

    pub fn neg_lit(name: &str) -> Self {
        Formula::NegLit(Prop::new(name).expect("valid proposition"))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn split(l: Formula, r: Formula) -> Self {
        Formula::Split(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::Globally(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn release(l: Formula, r: Formula) -> Self {
        Formula::Release(Box::new(l), Box::new(r))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn dep(determinants: Vec<Prop>, determined: Vec<Prop>) -> Self {
        assert!(!determined.is_empty(), "dep atom needs a determined proposition");
        Formula::Dep {
            determinants,
            determined,
        }
    }

    /// Left-nested splitjunction of all parts, the shape the parser produces.
    pub fn split_all(parts: impl IntoIterator<Item = Formula>) -> Option<Self> {
        parts.into_iter().reduce(Formula::split)
    }

    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Option<Self> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Lit(_) | NegLit(_) | Dep { .. } | Gen { .. } => vec![],
            Next(a) | Eventually(a) | Globally(a) | Not(a) => vec![a],
            And(a, b) | Split(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Pre-order walk.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn any(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    /// All propositions mentioned anywhere, including atom arguments.
    pub fn props(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| match g {
            Formula::Lit(p) | Formula::NegLit(p) => {
                out.insert(p.clone());
            }
            Formula::Dep {
                determinants,
                determined,
            } => {
                out.extend(determinants.iter().cloned());
                out.extend(determined.iter().cloned());
            }
            Formula::Gen { args, .. } => out.extend(args.iter().cloned()),
            _ => {}
        });
        out
    }

    /// No `~`, dependence or generalised atoms.
    pub fn is_pure_ltl(&self) -> bool {
        !self.any(&|g| {
            matches!(
                g,
                Formula::Not(_) | Formula::Dep { .. } | Formula::Gen { .. }
            )
        })
    }

    pub fn is_splitjunction_free(&self) -> bool {
        !self.any(&|g| matches!(g, Formula::Split(..)))
    }

    pub fn is_temporal_free(&self) -> bool {
        !self.any(&|g| {
            matches!(
                g,
                Formula::Next(_)
                    | Formula::Eventually(_)
                    | Formula::Globally(_)
                    | Formula::Until(..)
                    | Formula::Release(..)
            )
        })
    }

    pub fn has_dep_or_gen(&self) -> bool {
        self.any(&|g| matches!(g, Formula::Dep { .. } | Formula::Gen { .. }))
    }

    pub fn has_contradictory_neg(&self) -> bool {
        self.any(&|g| matches!(g, Formula::Not(_)))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

/// Number of Boolean and temporal connectives; atoms count zero and equal
/// subtrees are counted separately.
pub fn formula_length(f: &Formula) -> usize {
    let own = match f {
        Formula::Lit(_) | Formula::NegLit(_) | Formula::Dep { .. } | Formula::Gen { .. } => 0,
        _ => 1,
    };
    own + f.children().into_iter().map(formula_length).sum::<usize>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FragmentInfo {
    pub pure_ltl: bool,
    pub has_dep: bool,
    pub has_contradictory_neg: bool,
    pub has_gen_atom: bool,
    pub splitjunction_free: bool,
    /// No `~` and every generalised atom is registered as downward closed.
    pub downward_closed_syntactic: bool,
}

pub fn fragment_info(f: &Formula, registry: &GenAtomRegistry) -> Result<FragmentInfo> {
    let mut has_dep = false;
    let mut has_neg = false;
    let mut has_gen = false;
    let mut has_split = false;
    let mut gen_dc = true;
    let mut unknown = None;
    f.visit(&mut |g| match g {
        Formula::Dep { .. } => has_dep = true,
        Formula::Not(_) => has_neg = true,
        Formula::Split(..) => has_split = true,
        Formula::Gen { name, .. } => {
            has_gen = true;
            match registry.get(name) {
                Some(def) => gen_dc &= def.downward_closed,
                None => {
                    unknown.get_or_insert_with(|| name.clone());
                }
            }
        }
        _ => {}
    });
    if let Some(name) = unknown {
        return Err(Error::UnknownAtom(name));
    }
    Ok(FragmentInfo {
        pure_ltl: !has_dep && !has_neg && !has_gen,
        has_dep,
        has_contradictory_neg: has_neg,
        has_gen_atom: has_gen,
        splitjunction_free: !has_split,
        downward_closed_syntactic: !has_neg && gen_dc,
    })
}
