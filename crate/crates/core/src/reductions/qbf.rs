//! Prenex 3CNF QBF instances, a brute-force evaluator, and the two
//! reductions from QBF validity to team path checking.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{bar_name, Formula, Prop};
use crate::traces::{PropSet, Team, UpTrace};

/// Largest instance `qbf_brute_force` accepts.
pub const MAX_BRUTE_FORCE_VARS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("-")?;
        }
        f.write_str(&self.var)
    }
}

/// `Q1 x1 ... Qn xn. ⋀_j (l_j1 ∨ l_j2 ∨ l_j3)` where the prefix binds
/// exactly the variables of the matrix, each once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfInstance {
    prefix: Vec<(Quantifier, String)>,
    clauses: Vec<[Literal; 3]>,
}

impl QbfInstance {
    pub fn new(prefix: Vec<(Quantifier, String)>, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        let mut bound = BTreeSet::new();
        for (_, v) in &prefix {
            if !crate::formula::is_identifier(v) {
                return Err(Error::InvalidInstance(format!("`{v}` is not a valid variable name")));
            }
            if !bound.insert(v.as_str()) {
                return Err(Error::InvalidInstance(format!("variable `{v}` is quantified twice")));
            }
        }
        let used: BTreeSet<&str> = clauses.iter().flatten().map(|l| l.var.as_str()).collect();
        if let Some(v) = used.difference(&bound).next() {
            return Err(Error::InvalidInstance(format!("variable `{v}` is not quantified")));
        }
        if let Some(v) = bound.difference(&used).next() {
            return Err(Error::InvalidInstance(format!("variable `{v}` does not occur in any clause")));
        }
        Ok(QbfInstance { prefix, clauses })
    }

    pub fn prefix(&self) -> &[(Quantifier, String)] {
        &self.prefix
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    pub fn num_vars(&self) -> usize {
        self.prefix.len()
    }

    pub fn num_universal(&self) -> usize {
        self.prefix.iter().filter(|(q, _)| *q == Quantifier::Forall).count()
    }

    /// 1-based position of `var` in the prefix.
    fn index(&self) -> HashMap<&str, usize> {
        self.prefix.iter().enumerate().map(|(i, (_, v))| (v.as_str(), i + 1)).collect()
    }
}

impl fmt::Display for QbfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("prefix:")?;
        for (q, v) in &self.prefix {
            let q = match q {
                Quantifier::Exists => "E",
                Quantifier::Forall => "A",
            };
            write!(f, " {q} {v}")?;
        }
        writeln!(f)?;
        for c in &self.clauses {
            writeln!(f, "clause: {} {} {}", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

/// Parses `prefix: E x1 A x2` followed by `clause: x1 -x2 x3` lines.
pub fn parse_qbf(text: &str) -> Result<QbfInstance> {
    let mut prefix: Option<Vec<(Quantifier, String)>> = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let col = raw.len() - raw.trim_start().len() + 1;
        let (head, rest) = trimmed
            .split_once(':')
            .ok_or_else(|| Error::syntax(line, col, "expected `prefix:` or `clause:`"))?;
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        match head.trim() {
            "prefix" => {
                if prefix.is_some() {
                    return Err(Error::syntax(line, col, "duplicate prefix line"));
                }
                if tokens.is_empty() || tokens.len() % 2 != 0 {
                    return Err(Error::syntax(line, col, "prefix needs quantifier/variable pairs"));
                }
                let mut p = Vec::new();
                for pair in tokens.chunks(2) {
                    let q = match pair[0] {
                        "E" => Quantifier::Exists,
                        "A" => Quantifier::Forall,
                        other => {
                            return Err(Error::syntax(line, col, format!("expected `E` or `A`, found `{other}`")))
                        }
                    };
                    p.push((q, pair[1].to_string()));
                }
                prefix = Some(p);
            }
            "clause" => {
                if tokens.len() != 3 {
                    return Err(Error::syntax(
                        line,
                        col,
                        format!("a clause has exactly three literals, found {}", tokens.len()),
                    ));
                }
                let lits: Vec<Literal> = tokens
                    .iter()
                    .map(|t| {
                        let (positive, var) = match t.strip_prefix('-') {
                            Some(v) => (false, v),
                            None => (true, *t),
                        };
                        if !crate::formula::is_identifier(var) {
                            return Err(Error::syntax(line, col, format!("bad literal `{t}`")));
                        }
                        Ok(Literal {
                            var: var.to_string(),
                            positive,
                        })
                    })
                    .collect::<Result<_>>()?;
                clauses.push([lits[0].clone(), lits[1].clone(), lits[2].clone()]);
            }
            other => return Err(Error::syntax(line, col, format!("unknown directive `{other}`"))),
        }
    }
    let prefix = prefix.ok_or_else(|| Error::syntax(1, 1, "missing prefix line"))?;
    QbfInstance::new(prefix, clauses)
}

/// Validity by expanding every quantifier.
pub fn qbf_brute_force(q: &QbfInstance) -> Result<bool> {
    if q.num_vars() > MAX_BRUTE_FORCE_VARS {
        return Err(Error::bound("QBF variables for brute force", MAX_BRUTE_FORCE_VARS as u64));
    }
    let idx = q.index();
    let clauses: Vec<[(usize, bool); 3]> = q
        .clauses
        .iter()
        .map(|c| c.clone().map(|l| (idx[l.var.as_str()] - 1, l.positive)))
        .collect();
    fn go(q: &QbfInstance, clauses: &[[(usize, bool); 3]], i: usize, assignment: u32) -> bool {
        if i == q.prefix.len() {
            return clauses
                .iter()
                .all(|c| c.iter().any(|&(v, pos)| (assignment >> v & 1 == 1) == pos));
        }
        let branch = |b: u32| go(q, clauses, i + 1, assignment | b << i);
        match q.prefix[i].0 {
            Quantifier::Exists => branch(0) || branch(1),
            Quantifier::Forall => branch(0) && branch(1),
        }
    }
    Ok(go(q, &clauses, 0, 0))
}

/// Propositions used by the synchronous reduction. `$` and `#` of the
/// construction become `dollar` and `hash`.
fn xp(i: usize) -> Prop {
    Prop::raw(format!("x{i}"))
}

fn qp(i: usize) -> Prop {
    Prop::raw(format!("q{i}"))
}

fn cp(j: usize) -> Prop {
    Prop::raw(format!("c{j}"))
}

fn dollar() -> Prop {
    Prop::raw("dollar".into())
}

fn hash() -> Prop {
    Prop::raw("hash".into())
}

fn letter(props: &[&Prop]) -> PropSet {
    props.iter().map(|&p| p.clone()).collect()
}

fn cycle(letters: Vec<PropSet>) -> UpTrace {
    UpTrace::new(Vec::new(), letters).expect("non-empty loop").canonicalize()
}

/// `U(i)`: `∅ {q,$} {$} ∅ {$} {q,$,#}` repeated.
pub fn gadget_universal(i: usize) -> UpTrace {
    let (q, d, h) = (qp(i), dollar(), hash());
    cycle(vec![
        letter(&[]),
        letter(&[&q, &d]),
        letter(&[&d]),
        letter(&[]),
        letter(&[&d]),
        letter(&[&q, &d, &h]),
    ])
}

/// `T(i,1)`: `∅ {x,q,$} {$,#}`; `T(i,0)`: `∅ {$} {x,q,$,#}`, both repeated.
pub fn gadget_value(i: usize, value: bool) -> UpTrace {
    let (x, q, d, h) = (xp(i), qp(i), dollar(), hash());
    if value {
        cycle(vec![letter(&[]), letter(&[&x, &q, &d]), letter(&[&d, &h])])
    } else {
        cycle(vec![letter(&[]), letter(&[&d]), letter(&[&x, &q, &d, &h])])
    }
}

/// `L(j,k)` for literal `l_jk` on variable index `i`; `k` is 1-based and
/// `c_j` is placed at the two loop offsets other than `k - 1`.
pub fn gadget_literal(j: usize, k: usize, i: usize, positive: bool) -> UpTrace {
    let (x, d, h) = (xp(i), dollar(), hash());
    let mut letters = if positive {
        vec![letter(&[]), letter(&[&x, &d]), letter(&[&d, &h])]
    } else {
        vec![letter(&[]), letter(&[&d]), letter(&[&x, &d, &h])]
    };
    for (offset, l) in letters.iter_mut().enumerate() {
        if offset != k - 1 {
            l.insert(cp(j));
        }
    }
    cycle(letters)
}

/// QBF validity to synchronous path checking: the instance is valid iff the
/// team satisfies the formula under synchronous semantics.
///
/// The team has `3m + 2n + u` traces for `m` clauses, `n` variables and `u`
/// universal quantifiers. Variables are renamed `x1..xn` in prefix order.
pub fn reduce_qbf_sync(q: &QbfInstance) -> (Team, Formula) {
    let idx = q.index();
    let n = q.num_vars();
    let mut traces = Vec::new();
    for (j, clause) in q.clauses.iter().enumerate() {
        for (k, l) in clause.iter().enumerate() {
            traces.push(gadget_literal(j + 1, k + 1, idx[l.var.as_str()], l.positive));
        }
    }
    for (i, (quant, _)) in q.prefix.iter().enumerate() {
        traces.push(gadget_value(i + 1, true));
        traces.push(gadget_value(i + 1, false));
        if *quant == Quantifier::Forall {
            traces.push(gadget_universal(i + 1));
        }
    }
    let matrix = Formula::split_all(
        (1..=n)
            .map(|i| Formula::eventually(Formula::Lit(xp(i))))
            .chain((1..=q.clauses.len()).map(|j| Formula::eventually(Formula::Lit(cp(j))))),
    )
    .expect("at least one variable");
    let f = q.prefix.iter().enumerate().rev().fold(matrix, |inner, (i, (quant, _))| {
        let i = i + 1;
        match quant {
            Quantifier::Exists => Formula::split(Formula::eventually(Formula::Lit(qp(i))), inner),
            Quantifier::Forall => {
                let choose = Formula::split_all([
                    Formula::Lit(dollar()),
                    Formula::until(Formula::NegLit(qp(i)), Formula::Lit(qp(i))),
                    Formula::eventually(Formula::and(Formula::Lit(hash()), Formula::next(inner))),
                ])
                .expect("three parts");
                Formula::until(choose, Formula::Lit(hash()))
            }
        }
    });
    (Team::new(traces), f)
}

fn pp(i: usize) -> Prop {
    Prop::raw(format!("p{i}"))
}

fn rp(i: usize) -> Prop {
    Prop::raw(format!("r{i}"))
}

fn sp(i: usize) -> Prop {
    Prop::raw(format!("s{i}"))
}

/// The two traces for variable `i` of `n`: the constant `{p,q,r,s}` trace
/// and the alternating `{q,r,p_bar} {q,s,p_bar}` trace, both carrying every
/// other variable's `p_j` and `p_j_bar` at every position.
pub fn gadget_dep(i: usize, n: usize) -> [UpTrace; 2] {
    let others: PropSet = (1..=n)
        .filter(|&j| j != i)
        .flat_map(|j| [pp(j), bar_name(&pp(j))])
        .collect();
    let with = |props: &[Prop]| -> PropSet { others.iter().cloned().chain(props.iter().cloned()).collect() };
    let (p, q, r, s, pb) = (pp(i), qp(i), rp(i), sp(i), bar_name(&pp(i)));
    [
        cycle(vec![with(&[p, q.clone(), r.clone(), s.clone()])]),
        cycle(vec![with(&[q.clone(), r, pb.clone()]), with(&[q, s, pb])]),
    ]
}

/// QBF validity to asynchronous path checking with dependence atoms, built
/// as the construction prescribes: two traces per variable, matrix literals
/// `p_i` / `p_i_bar`, `(q_i ∧ dep(;p_i)) ∨ f(ψ)` for `∃` and
/// `G((dep(;p_i) ∧ q_i ∧ r_i) ∨ (s_i ∧ f(ψ)))` for `∀`.
pub fn reduce_qbf_async_dep(q: &QbfInstance) -> (Team, Formula) {
    let idx = q.index();
    let n = q.num_vars();
    let traces: Vec<UpTrace> = (1..=n).flat_map(|i| gadget_dep(i, n)).collect();
    let literal = |l: &Literal| {
        let p = pp(idx[l.var.as_str()]);
        Formula::Lit(if l.positive { p } else { bar_name(&p) })
    };
    let matrix = Formula::and_all(
        q.clauses
            .iter()
            .map(|c| Formula::split_all(c.iter().map(literal)).expect("three literals")),
    )
    .unwrap_or_else(|| Formula::split(Formula::Lit(pp(1)), Formula::NegLit(pp(1))));
    let f = q.prefix.iter().enumerate().rev().fold(matrix, |inner, (i, (quant, _))| {
        let i = i + 1;
        let constant = Formula::dep(vec![], vec![pp(i)]);
        match quant {
            Quantifier::Exists => Formula::split(Formula::and(Formula::Lit(qp(i)), constant), inner),
            Quantifier::Forall => Formula::globally(Formula::split(
                Formula::and_all([constant, Formula::Lit(qp(i)), Formula::Lit(rp(i))]).expect("three parts"),
                Formula::and(Formula::Lit(sp(i)), inner),
            )),
        }
    });
    (Team::new(traces), f)
}
