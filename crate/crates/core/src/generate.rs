//! Seeded random instances for differential testing and benchmarking.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{Formula, Prop};
use crate::modelcheck::Kripke;
use crate::reductions::{Literal, QbfInstance, Quantifier};
use crate::traces::{PropSet, Team, UpTrace};

/// Which constructs a random formula may use.
#[derive(Clone, Debug)]
pub struct FormulaConfig {
    pub props: Vec<Prop>,
    /// Exact number of connectives, as counted by `formula_length`.
    pub length: usize,
    pub temporal: bool,
    pub split: bool,
    pub contradictory_neg: bool,
    pub dep: bool,
}

impl FormulaConfig {
    pub fn pure_ltl(props: &[&str], length: usize) -> Self {
        FormulaConfig {
            props: props.iter().map(|p| Prop::new(p).expect("identifier")).collect(),
            length,
            temporal: true,
            split: true,
            contradictory_neg: false,
            dep: false,
        }
    }
}

#[derive(Clone, Copy)]
enum Op {
    And,
    Split,
    Next,
    Eventually,
    Globally,
    Until,
    Release,
    Not,
}

pub fn random_formula(rng: &mut impl Rng, cfg: &FormulaConfig) -> Formula {
    let mut ops = vec![Op::And];
    if cfg.split {
        ops.push(Op::Split);
    }
    if cfg.temporal {
        ops.extend([Op::Next, Op::Eventually, Op::Globally, Op::Until, Op::Release]);
    }
    if cfg.contradictory_neg {
        ops.push(Op::Not);
    }
    build(rng, cfg, &ops, cfg.length)
}

fn build<R: Rng>(rng: &mut R, cfg: &FormulaConfig, ops: &[Op], budget: usize) -> Formula {
    if budget == 0 {
        return random_atom(rng, cfg);
    }
    let op = *ops.choose(rng).expect("at least one operator");
    let rest = budget - 1;
    let pair = |rng: &mut R| {
        let left = rng.gen_range(0..=rest);
        (build(rng, cfg, ops, left), build(rng, cfg, ops, rest - left))
    };
    match op {
        Op::And => {
            let (a, b) = pair(rng);
            Formula::and(a, b)
        }
        Op::Split => {
            let (a, b) = pair(rng);
            Formula::split(a, b)
        }
        Op::Until => {
            let (a, b) = pair(rng);
            Formula::until(a, b)
        }
        Op::Release => {
            let (a, b) = pair(rng);
            Formula::release(a, b)
        }
        Op::Next => Formula::next(build(rng, cfg, ops, rest)),
        Op::Eventually => Formula::eventually(build(rng, cfg, ops, rest)),
        Op::Globally => Formula::globally(build(rng, cfg, ops, rest)),
        Op::Not => Formula::not(build(rng, cfg, ops, rest)),
    }
}

fn random_atom(rng: &mut impl Rng, cfg: &FormulaConfig) -> Formula {
    let p = cfg.props.choose(rng).expect("at least one proposition").clone();
    if cfg.dep && rng.gen_bool(0.25) {
        let det: Vec<Prop> = cfg.props.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        return Formula::dep(det, vec![p]);
    }
    if rng.gen_bool(0.5) {
        Formula::Lit(p)
    } else {
        Formula::NegLit(p)
    }
}

pub fn random_letter(rng: &mut impl Rng, props: &[Prop]) -> PropSet {
    props.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// A trace with prefix length `< max_prefix + 1` and loop length in `1..=max_loop`.
pub fn random_trace(rng: &mut impl Rng, props: &[Prop], max_prefix: usize, max_loop: usize) -> UpTrace {
    let prefix = (0..rng.gen_range(0..=max_prefix)).map(|_| random_letter(rng, props)).collect();
    let cycle = (0..rng.gen_range(1..=max_loop)).map(|_| random_letter(rng, props)).collect();
    UpTrace::new(prefix, cycle).expect("non-empty loop")
}

/// A team of at most `max_traces` distinct traces (possibly empty).
pub fn random_team(
    rng: &mut impl Rng,
    props: &[Prop],
    max_traces: usize,
    max_prefix: usize,
    max_loop: usize,
) -> Team {
    let n = rng.gen_range(0..=max_traces);
    Team::new((0..n).map(|_| random_trace(rng, props, max_prefix, max_loop)))
}

/// A Kripke structure on `1..=max_worlds` worlds rooted at world 0.
///
/// With `finite_team`, branching happens only on an acyclic part of the
/// structure: worlds below the cut have successors with larger indices, and
/// worlds at or above the cut form a functional graph among themselves.
pub fn random_kripke(rng: &mut impl Rng, props: &[Prop], max_worlds: usize, finite_team: bool) -> Kripke {
    let n = rng.gen_range(1..=max_worlds);
    let labels: Vec<PropSet> = (0..n).map(|_| random_letter(rng, props)).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    if finite_team {
        let cut = rng.gen_range(0..n);
        for (w, s) in succ.iter_mut().enumerate() {
            if w < cut {
                let degree = rng.gen_range(1..=3.min(n - w - 1));
                for _ in 0..degree {
                    s.push(rng.gen_range(w + 1..n));
                }
            } else {
                s.push(rng.gen_range(cut..n));
            }
        }
    } else {
        for s in succ.iter_mut() {
            for _ in 0..rng.gen_range(1..=3) {
                s.push(rng.gen_range(0..n));
            }
        }
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
        s.dedup();
    }
    Kripke {
        names: (0..n).map(|i| format!("w{i}")).collect(),
        labels,
        succ,
        init: 0,
    }
}

/// A prenex 3CNF instance over `x1..xn` in which every variable occurs.
pub fn random_qbf(rng: &mut impl Rng, n: usize, m: usize) -> QbfInstance {
    assert!(n >= 1 && 3 * m >= n, "every variable must fit in some clause");
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let prefix: Vec<(Quantifier, String)> = vars
        .iter()
        .map(|v| {
            let q = if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall };
            (q, v.clone())
        })
        .collect();
    loop {
        let clauses: Vec<[Literal; 3]> = (0..m)
            .map(|_| {
                [(); 3].map(|_| Literal {
                    var: vars.choose(rng).expect("non-empty").clone(),
                    positive: rng.gen_bool(0.5),
                })
            })
            .collect();
        if let Ok(q) = QbfInstance::new(prefix.clone(), clauses) {
            return q;
        }
    }
}
