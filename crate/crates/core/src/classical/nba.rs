//! Tableau translation from pure LTL to a Büchi automaton.
//!
//! A state is a set of obligations for the current position plus a
//! degeneralisation counter. Expanding the obligations yields covers: the
//! literals the current letter must satisfy, the obligations for the next
//! position, and the eventualities whose fulfilment was postponed. A
//! transition belongs to the acceptance set of eventuality `u` iff `u` was not
//! postponed on it; the counter turns the family of acceptance sets into a
//! single accepting set.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::emptiness::{find_accepting_lasso, Lasso, LassoGraph};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::traces::{PropSet, UpTrace};

/// Letters satisfying a transition: all of `pos`, none of `neg`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub pos: PropSet,
    pub neg: PropSet,
}

impl Guard {
    pub fn admits(&self, letter: &PropSet) -> bool {
        self.pos.is_subset(letter) && self.neg.is_disjoint(letter)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub guard: Guard,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct Nba {
    pub initial: usize,
    pub transitions: Vec<Vec<Transition>>,
    pub accepting: Vec<bool>,
    pub props: PropSet,
}

impl Nba {
    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    /// Successor states of `q` on `letter`.
    pub fn step<'a>(&'a self, q: usize, letter: &'a PropSet) -> impl Iterator<Item = usize> + 'a {
        self.transitions[q]
            .iter()
            .filter(move |t| t.guard.admits(letter))
            .map(|t| t.target)
    }

    /// Whether the automaton accepts the trace `e`, via a lasso search in the
    /// product with the trace's positions.
    pub fn accepts(&self, e: &UpTrace) -> bool {
        struct Product<'a> {
            nba: &'a Nba,
            trace: &'a UpTrace,
        }
        impl LassoGraph for Product<'_> {
            type Node = (usize, usize);
            type Label = ();
            fn initial(&self) -> Vec<(usize, usize)> {
                vec![(0, self.nba.initial)]
            }
            fn successors(&self, &(i, q): &(usize, usize)) -> Vec<((), (usize, usize))> {
                let j = self.trace.next_pos(i);
                self.nba
                    .step(q, self.trace.value_at(i))
                    .map(|r| ((), (j, r)))
                    .collect()
            }
            fn accepting(&self, &(_, q): &(usize, usize)) -> bool {
                self.nba.accepting[q]
            }
        }
        find_accepting_lasso(&Product { nba: self, trace: e }).is_some()
    }
}

/// Interned subformulas.
struct Closure {
    nodes: Vec<Formula>,
    ids: HashMap<Formula, usize>,
    /// Index among the eventualities (F and U), if the node is one.
    eventuality: Vec<Option<usize>>,
    num_eventualities: usize,
}

impl Closure {
    fn intern(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.ids.get(f) {
            return i;
        }
        for c in f.children() {
            self.intern(c);
        }
        let i = self.nodes.len();
        let ev = matches!(f, Formula::Eventually(_) | Formula::Until(..)).then(|| {
            self.num_eventualities += 1;
            self.num_eventualities - 1
        });
        self.nodes.push(f.clone());
        self.ids.insert(f.clone(), i);
        self.eventuality.push(ev);
        i
    }

    fn id(&self, f: &Formula) -> usize {
        self.ids[f]
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cover {
    pos: PropSet,
    neg: PropSet,
    next: BTreeSet<usize>,
    postponed: BTreeSet<usize>,
}

fn expand(cl: &Closure, todo: Vec<usize>, done: BTreeSet<usize>, cover: Cover, out: &mut BTreeSet<Cover>) {
    let mut todo = todo;
    let mut done = done;
    let mut cover = cover;
    while let Some(g) = todo.pop() {
        if !done.insert(g) {
            continue;
        }
        match &cl.nodes[g] {
            Formula::Lit(p) => {
                if cover.neg.contains(p) {
                    return;
                }
                cover.pos.insert(p.clone());
            }
            Formula::NegLit(p) => {
                if cover.pos.contains(p) {
                    return;
                }
                cover.neg.insert(p.clone());
            }
            Formula::And(a, b) => {
                todo.push(cl.id(a));
                todo.push(cl.id(b));
            }
            Formula::Split(a, b) => {
                let mut t = todo.clone();
                t.push(cl.id(a));
                expand(cl, t, done.clone(), cover.clone(), out);
                todo.push(cl.id(b));
            }
            Formula::Next(a) => {
                cover.next.insert(cl.id(a));
            }
            Formula::Eventually(a) => {
                let mut t = todo.clone();
                t.push(cl.id(a));
                expand(cl, t, done.clone(), cover.clone(), out);
                cover.next.insert(g);
                cover.postponed.insert(cl.eventuality[g].expect("eventuality"));
            }
            Formula::Globally(a) => {
                todo.push(cl.id(a));
                cover.next.insert(g);
            }
            Formula::Until(a, b) => {
                let mut t = todo.clone();
                t.push(cl.id(b));
                expand(cl, t, done.clone(), cover.clone(), out);
                todo.push(cl.id(a));
                cover.next.insert(g);
                cover.postponed.insert(cl.eventuality[g].expect("eventuality"));
            }
            Formula::Release(a, b) => {
                todo.push(cl.id(b));
                let mut t = todo.clone();
                t.push(cl.id(a));
                expand(cl, t, done.clone(), cover.clone(), out);
                cover.next.insert(g);
            }
            Formula::Not(_) | Formula::Dep { .. } | Formula::Gen { .. } => {
                unreachable!("rejected before expansion")
            }
        }
    }
    out.insert(cover);
}

pub fn ltl_to_nba(f: &Formula) -> Result<Nba> {
    if !f.is_pure_ltl() {
        return Err(Error::unsupported(
            "automata are only built for pure LTL formulas",
        ));
    }
    let mut cl = Closure {
        nodes: Vec::new(),
        ids: HashMap::new(),
        eventuality: Vec::new(),
        num_eventualities: 0,
    };
    let root = cl.intern(f);
    let k = cl.num_eventualities;

    let mut covers: HashMap<BTreeSet<usize>, Vec<Cover>> = HashMap::new();
    let mut state_ids: HashMap<(BTreeSet<usize>, usize), usize> = HashMap::new();
    let mut states: Vec<(BTreeSet<usize>, usize)> = Vec::new();
    let mut transitions: Vec<Vec<Transition>> = Vec::new();
    let mut queue = VecDeque::new();

    let start = (BTreeSet::from([root]), 0);
    state_ids.insert(start.clone(), 0);
    states.push(start);
    transitions.push(Vec::new());
    queue.push_back(0);

    while let Some(s) = queue.pop_front() {
        let (obl, j) = states[s].clone();
        let cs = covers
            .entry(obl.clone())
            .or_insert_with(|| {
                let mut out = BTreeSet::new();
                expand(&cl, obl.iter().copied().collect(), BTreeSet::new(), Cover::default(), &mut out);
                out.into_iter().collect()
            })
            .clone();
        for c in cs {
            let mut j2 = if j == k { 0 } else { j };
            while j2 < k && !c.postponed.contains(&j2) {
                j2 += 1;
            }
            let key = (c.next.clone(), j2);
            let target = match state_ids.get(&key) {
                Some(&t) => t,
                None => {
                    let t = states.len();
                    state_ids.insert(key.clone(), t);
                    states.push(key);
                    transitions.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            transitions[s].push(Transition {
                guard: Guard {
                    pos: c.pos,
                    neg: c.neg,
                },
                target,
            });
        }
    }
    let accepting = states.iter().map(|(_, j)| *j == k).collect();
    Ok(Nba {
        initial: 0,
        transitions,
        accepting,
        props: f.props(),
    })
}

struct Automaton<'a>(&'a Nba);

impl LassoGraph for Automaton<'_> {
    type Node = usize;
    type Label = PropSet;

    fn initial(&self) -> Vec<usize> {
        vec![self.0.initial]
    }

    fn successors(&self, &q: &usize) -> Vec<(PropSet, usize)> {
        self.0.transitions[q]
            .iter()
            .map(|t| (t.guard.pos.clone(), t.target))
            .collect()
    }

    fn accepting(&self, &q: &usize) -> bool {
        self.0.accepting[q]
    }
}

/// An accepted word, or `None` if the language is empty.
pub fn nba_nonempty(a: &Nba) -> Option<Lasso<PropSet>> {
    find_accepting_lasso(&Automaton(a))
}

pub(crate) fn lasso_to_trace(l: Lasso<PropSet>) -> UpTrace {
    UpTrace::new(l.stem, l.cycle)
        .expect("lasso cycles are non-empty")
        .canonicalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::check_trace;
    use crate::formula::parse_formula;

    fn nba(s: &str) -> Nba {
        ltl_to_nba(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn eventually() {
        let a = nba("F p");
        assert!(a.accepts(&UpTrace::from_names(&[&["p"]], &[&[]])));
        assert!(!a.accepts(&UpTrace::from_names(&[], &[&[]])));
    }

    #[test]
    fn contradiction_is_empty() {
        assert!(nba_nonempty(&nba("p & !p")).is_none());
        assert!(nba_nonempty(&nba("G F p & F G !p")).is_none());
        assert!(nba_nonempty(&nba("a U b & G !b")).is_none());
    }

    #[test]
    fn witnesses_satisfy_formula() {
        for s in ["G p", "F p & G !q", "X X p", "G F p & G F !p", "a U (b R c)", "(F G a) & (G F b)"] {
            let f = parse_formula(s).unwrap();
            let w = lasso_to_trace(nba_nonempty(&nba(s)).unwrap());
            assert!(check_trace(&w, &f).unwrap(), "{s}: {w}");
        }
    }

    #[test]
    fn rejects_team_operators() {
        assert!(ltl_to_nba(&parse_formula("~p").unwrap()).is_err());
    }
}
