//! Single-trace LTL: lasso path checking, automata, satisfiability and
//! model checking.

mod check;
pub mod emptiness;
mod nba;

use crate::error::{Error, Result};
use crate::formula::{dualize, Formula, Prop};
use crate::modelcheck::Kripke;
use crate::teamcheck::GenAtomRegistry;
use crate::traces::{PropSet, UpTrace};
use crate::Semantics;

pub use check::check_trace;
pub(crate) use check::{release_vec, until_vec};
pub use emptiness::{find_accepting_lasso, Lasso, LassoGraph};
pub use nba::{ltl_to_nba, nba_nonempty, Guard, Nba, Transition};

pub type LassoWitness = Lasso<PropSet>;

/// A trace satisfying the pure LTL formula `f`, if there is one.
pub fn classical_sat(f: &Formula) -> Result<Option<UpTrace>> {
    let a = ltl_to_nba(f)?;
    Ok(nba_nonempty(&a).map(nba::lasso_to_trace))
}

/// Team satisfiability. Atoms that hold on every singleton team are replaced
/// by a tautology, after which satisfiability by a non-empty team coincides
/// with classical satisfiability. The witness is a single trace `w` with
/// `{w} ⊨ f` under either semantics.
pub fn tsat(f: &Formula, _semantics: Semantics, registry: &GenAtomRegistry) -> Result<Option<UpTrace>> {
    if f.has_contradictory_neg() {
        return Err(Error::unsupported(
            "satisfiability with contradictory negation is not supported",
        ));
    }
    let props = f.props();
    let mut fresh: Vec<Prop> = Vec::new();
    let g = replace_atoms(f, registry, &props, &mut fresh)?;
    let Some(w) = classical_sat(&g)? else {
        return Ok(None);
    };
    let strip = |l: &[PropSet]| -> Vec<PropSet> {
        l.iter()
            .map(|s| s.iter().filter(|p| !fresh.contains(p)).cloned().collect())
            .collect()
    };
    let w = UpTrace::new(strip(w.prefix()), strip(w.cycle()))?.canonicalize();
    Ok(Some(w))
}

fn tautology(props: &PropSet, fresh: &mut Vec<Prop>) -> Formula {
    let mut i = fresh.len();
    let z = loop {
        let name = Prop::raw(format!("z{i}"));
        if !props.contains(&name) && !fresh.contains(&name) {
            break name;
        }
        i += 1;
    };
    fresh.push(z.clone());
    Formula::split(Formula::Lit(z.clone()), Formula::NegLit(z))
}

fn replace_atoms(
    f: &Formula,
    registry: &GenAtomRegistry,
    props: &PropSet,
    fresh: &mut Vec<Prop>,
) -> Result<Formula> {
    use Formula::*;
    let mut rec = |g: &Formula| replace_atoms(g, registry, props, fresh);
    Ok(match f {
        Lit(_) | NegLit(_) => f.clone(),
        Dep { .. } => tautology(props, fresh),
        Gen { name, args } => {
            let def = registry
                .get(name)
                .ok_or_else(|| Error::UnknownAtom(name.clone()))?;
            def.check_arity(args.len())?;
            if !(def.downward_closed && def.holds_on_all_singletons(args)) {
                return Err(Error::unsupported(format!(
                    "satisfiability needs `@{name}` to be downward closed and true on singletons"
                )));
            }
            tautology(props, fresh)
        }
        And(a, b) => Formula::and(rec(a)?, rec(b)?),
        Split(a, b) => Formula::split(rec(a)?, rec(b)?),
        Next(a) => Formula::next(rec(a)?),
        Eventually(a) => Formula::eventually(rec(a)?),
        Globally(a) => Formula::globally(rec(a)?),
        Until(a, b) => Formula::until(rec(a)?, rec(b)?),
        Release(a, b) => Formula::release(rec(a)?, rec(b)?),
        Not(_) => unreachable!("checked by caller"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McResult {
    pub holds: bool,
    /// A trace of the structure violating the formula.
    pub counterexample: Option<LassoWitness>,
}

struct McProduct<'a> {
    k: &'a Kripke,
    nba: &'a Nba,
}

impl LassoGraph for McProduct<'_> {
    type Node = (usize, usize);
    type Label = PropSet;

    fn initial(&self) -> Vec<(usize, usize)> {
        vec![(self.k.init, self.nba.initial)]
    }

    fn successors(&self, &(w, q): &(usize, usize)) -> Vec<(PropSet, (usize, usize))> {
        let letter = &self.k.labels[w];
        let qs: Vec<usize> = self.nba.step(q, letter).collect();
        let mut out = Vec::new();
        for &w2 in &self.k.succ[w] {
            for &q2 in &qs {
                out.push((letter.clone(), (w2, q2)));
            }
        }
        out
    }

    fn accepting(&self, &(_, q): &(usize, usize)) -> bool {
        self.nba.accepting[q]
    }
}

/// Whether every trace of `k` satisfies the pure LTL formula `f`.
pub fn classical_mc(k: &Kripke, f: &Formula) -> Result<McResult> {
    k.validate()?;
    let neg = dualize(f)?;
    let a = ltl_to_nba(&neg)?;
    let cex = find_accepting_lasso(&McProduct { k, nba: &a });
    Ok(McResult {
        holds: cex.is_none(),
        counterexample: cex,
    })
}
