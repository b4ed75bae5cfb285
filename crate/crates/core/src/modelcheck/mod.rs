//! Team model checking over Kripke structures.
//!
//! Asynchronously, a structure's team satisfies a pure LTL formula iff every
//! trace does, so classical model checking applies. Synchronously and without
//! splitjunctions, the team behaves like the single trace of world-subsets
//! `S_0 = {w_I}`, `S_{i+1} = post(S_i)`, where `p` holds at `i` iff it holds in
//! every world of `S_i` and `p_bar` iff it holds in none.

mod kripke;

use std::collections::HashMap;

use crate::classical::{self, check_trace, find_accepting_lasso, ltl_to_nba, LassoGraph, Nba};
use crate::error::{Error, Result};
use crate::formula::{bar_name, bar_transform, dualize, Formula};
use crate::traces::{Characteristic, PropSet, Team, UpTrace};

pub use kripke::{parse_kripke, serialize_kripke, Kripke};

/// Default cap on `|W|` for materialising the subset sequence.
pub const DEFAULT_MAX_WORLDS: usize = 20;

/// World sets as bitmasks; the on-the-fly search is limited by this width.
const MASK_WORLDS: usize = 64;

/// The lasso `S_0 .. S_{s+p-1}` of successor images, as world bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSequence {
    pub sets: Vec<u64>,
    pub characteristic: Characteristic,
}

impl SubsetSequence {
    pub fn worlds(&self, i: usize) -> Vec<usize> {
        mask_worlds(self.sets[i])
    }
}

pub(crate) fn mask_worlds(m: u64) -> Vec<usize> {
    (0..64).filter(|w| m >> w & 1 == 1).collect()
}

fn post(k: &Kripke, m: u64) -> u64 {
    let mut out = 0;
    for w in mask_worlds(m) {
        for &v in &k.succ[w] {
            out |= 1 << v;
        }
    }
    out
}

pub fn subset_sequence(k: &Kripke) -> Result<SubsetSequence> {
    subset_sequence_capped(k, DEFAULT_MAX_WORLDS)
}

pub fn subset_sequence_capped(k: &Kripke, max_worlds: usize) -> Result<SubsetSequence> {
    k.validate()?;
    if k.len() > max_worlds.min(MASK_WORLDS) {
        return Err(Error::bound("number of worlds", max_worlds.min(MASK_WORLDS) as u64));
    }
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut sets = Vec::new();
    let mut cur = 1u64 << k.init;
    loop {
        if let Some(&s) = seen.get(&cur) {
            let p = sets.len() - s;
            return Ok(SubsetSequence {
                sets,
                characteristic: Characteristic { s, p },
            });
        }
        seen.insert(cur, sets.len());
        sets.push(cur);
        cur = post(k, cur);
    }
}

/// The propositions the barred trace is built over: labels plus `extra`.
fn alphabet(k: &Kripke, extra: &PropSet) -> Result<PropSet> {
    let ap: PropSet = k.props().into_iter().chain(extra.iter().cloned()).collect();
    for p in &ap {
        let bar = bar_name(p);
        if ap.contains(&bar) {
            return Err(Error::NameCollision(bar.as_str().to_string()));
        }
    }
    Ok(ap)
}

fn subset_letter(k: &Kripke, ap: &PropSet, m: u64) -> PropSet {
    let worlds = mask_worlds(m);
    let mut letter = PropSet::new();
    for p in ap {
        let inside = worlds.iter().filter(|&&w| k.labels[w].contains(p)).count();
        if inside == worlds.len() {
            letter.insert(p.clone());
        } else if inside == 0 {
            letter.insert(bar_name(p));
        }
    }
    letter
}

/// The single trace standing for the team of `k` under synchronous
/// semantics, over the labels of `k` plus `extra`.
pub fn team_trace_over(k: &Kripke, extra: &PropSet, max_worlds: usize) -> Result<UpTrace> {
    let ap = alphabet(k, extra)?;
    let seq = subset_sequence_capped(k, max_worlds)?;
    let letters: Vec<PropSet> = seq.sets.iter().map(|&m| subset_letter(k, &ap, m)).collect();
    let (s, _) = (seq.characteristic.s, seq.characteristic.p);
    Ok(UpTrace::new(letters[..s].to_vec(), letters[s..].to_vec())?.canonicalize())
}

pub fn team_trace(k: &Kripke) -> Result<UpTrace> {
    team_trace_over(k, &PropSet::new(), DEFAULT_MAX_WORLDS)
}

fn splitfree_guard(f: &Formula) -> Result<()> {
    if !f.is_splitjunction_free() {
        return Err(Error::UnsupportedOpenProblem(
            "synchronous team model checking with splitjunctions: the complexity of the general \
             problem is left open"
                .into(),
        ));
    }
    if f.has_dep_or_gen() {
        return Err(Error::unsupported(
            "synchronous team model checking does not cover dependence or generalised atoms",
        ));
    }
    Ok(())
}

/// Synchronous team model checking for splitjunction-free formulas, by
/// classical checking of the barred formula on the subset trace.
pub fn tmc_sync_splitfree(k: &Kripke, f: &Formula) -> Result<bool> {
    tmc_sync_splitfree_capped(k, f, DEFAULT_MAX_WORLDS)
}

pub fn tmc_sync_splitfree_capped(k: &Kripke, f: &Formula, max_worlds: usize) -> Result<bool> {
    splitfree_guard(f)?;
    let g = bar_transform(f)?;
    let t = team_trace_over(k, &f.props(), max_worlds)?;
    check_trace(&t, &g)
}

struct SubsetProduct<'a> {
    k: &'a Kripke,
    ap: PropSet,
    nba: &'a Nba,
}

impl LassoGraph for SubsetProduct<'_> {
    type Node = (u64, usize);
    type Label = ();

    fn initial(&self) -> Vec<(u64, usize)> {
        vec![(1 << self.k.init, self.nba.initial)]
    }

    fn successors(&self, &(m, q): &(u64, usize)) -> Vec<((), (u64, usize))> {
        let letter = subset_letter(self.k, &self.ap, m);
        let m2 = post(self.k, m);
        self.nba.step(q, &letter).map(|q2| ((), (m2, q2))).collect()
    }

    fn accepting(&self, &(_, q): &(u64, usize)) -> bool {
        self.nba.accepting[q]
    }
}

/// Same question as [`tmc_sync_splitfree`], decided without materialising
/// the subset sequence: a violation is an accepting lasso in the product of
/// the subset successor function with the automaton of the negated formula.
pub fn tmc_sync_splitfree_onthefly(k: &Kripke, f: &Formula) -> Result<bool> {
    splitfree_guard(f)?;
    if f.has_contradictory_neg() {
        return Err(Error::unsupported(
            "the on-the-fly engine handles `~`-free formulas only",
        ));
    }
    k.validate()?;
    if k.len() > MASK_WORLDS {
        return Err(Error::bound("number of worlds", MASK_WORLDS as u64));
    }
    let g = bar_transform(f)?;
    let ap = alphabet(k, &f.props())?;
    let nba = ltl_to_nba(&dualize(&g)?)?;
    Ok(find_accepting_lasso(&SubsetProduct { k, ap, nba: &nba }).is_none())
}

/// Asynchronous team model checking of pure LTL, by flatness.
pub fn tmc_async(k: &Kripke, f: &Formula) -> Result<bool> {
    if !f.is_pure_ltl() {
        return Err(Error::unsupported(
            "asynchronous team model checking covers pure LTL only",
        ));
    }
    Ok(classical::classical_mc(k, f)?.holds)
}

/// The explicit team of all traces of `k`, when it is finite: no world with
/// two or more successors lies on a reachable cycle.
pub fn traces_team_finite(k: &Kripke) -> Option<Team> {
    k.validate().ok()?;
    let reach = k.reachable();
    for w in 0..k.len() {
        if reach[w] && k.succ[w].len() >= 2 && on_cycle(k, w) {
            return None;
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    enumerate_paths(k, k.init, &mut path, &mut out);
    Some(Team::new(out))
}

fn on_cycle(k: &Kripke, w: usize) -> bool {
    let mut seen = vec![false; k.len()];
    let mut stack: Vec<usize> = k.succ[w].clone();
    while let Some(v) = stack.pop() {
        if v == w {
            return true;
        }
        if !seen[v] {
            seen[v] = true;
            stack.extend(&k.succ[v]);
        }
    }
    false
}

fn enumerate_paths(k: &Kripke, w: usize, path: &mut Vec<usize>, out: &mut Vec<UpTrace>) {
    if let Some(i) = path.iter().position(|&v| v == w) {
        let letters: Vec<PropSet> = path.iter().map(|&v| k.labels[v].clone()).collect();
        let t = UpTrace::new(letters[..i].to_vec(), letters[i..].to_vec())
            .expect("a revisit closes a non-empty cycle");
        out.push(t);
        return;
    }
    path.push(w);
    for &v in &k.succ[w] {
        enumerate_paths(k, v, path, out);
    }
    path.pop();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, Prop};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn branch() -> Kripke {
        parse_kripke("world r {}\nworld a { p }\nworld b {}\nedge r a\nedge r b\nedge a a\nedge b b\ninit r")
            .unwrap()
    }

    fn all_p() -> Kripke {
        parse_kripke("world a { p }\nworld b { p }\nedge a b\nedge b a\ninit a").unwrap()
    }

    #[test]
    fn subset_sequences() {
        let seq = subset_sequence(&all_p()).unwrap();
        assert_eq!(seq.sets, vec![0b01, 0b10]);
        assert_eq!(seq.characteristic, Characteristic { s: 0, p: 2 });
        let seq = subset_sequence(&branch()).unwrap();
        assert_eq!(seq.worlds(1), vec![1, 2]);
        assert_eq!(seq.characteristic, Characteristic { s: 1, p: 1 });
    }

    #[test]
    fn barred_trace() {
        let t = team_trace(&branch()).unwrap();
        let p = Prop::new("p").unwrap();
        assert!(t.value_at(0).contains(&bar_name(&p)));
        assert!(t.value_at(1).is_empty());
        let t = team_trace_over(&all_p(), &[Prop::new("q").unwrap()].into(), 20).unwrap();
        assert_eq!(t, UpTrace::from_names(&[], &[&["p", "q_bar"]]));
    }

    #[test]
    fn sync_model_checking() {
        for check in [tmc_sync_splitfree, tmc_sync_splitfree_onthefly] {
            assert!(check(&all_p(), &f("G p")).unwrap());
            assert!(!check(&branch(), &f("X p")).unwrap());
            assert!(!check(&branch(), &f("F p")).unwrap());
            assert!(check(&branch(), &f("X (p | !p)")).is_err());
            assert!(check(&branch(), &f("G !q")).unwrap());
        }
        assert!(tmc_sync_splitfree(&branch(), &f("X ~p")).unwrap());
        assert!(matches!(
            tmc_sync_splitfree(&branch(), &f("F p | F p")),
            Err(Error::UnsupportedOpenProblem(_))
        ));
        assert!(matches!(
            tmc_sync_splitfree(&branch(), &f("dep(;p)")),
            Err(Error::UnsupportedFragment(_))
        ));
    }

    #[test]
    fn async_model_checking() {
        assert!(tmc_async(&all_p(), &f("G p")).unwrap());
        assert!(!tmc_async(&branch(), &f("X p")).unwrap());
        assert!(tmc_async(&branch(), &f("X G p | X G !p")).unwrap());
        assert!(tmc_async(&branch(), &f("dep(;p)")).is_err());
    }

    #[test]
    fn finite_teams() {
        assert_eq!(traces_team_finite(&all_p()).unwrap().len(), 1);
        let team = traces_team_finite(&branch()).unwrap();
        assert_eq!(team.len(), 2);
        let loopy = parse_kripke("world a { p }\nworld b {}\nedge a a\nedge a b\nedge b b\ninit a").unwrap();
        assert!(traces_team_finite(&loopy).is_none());
    }
}
