//! Path checking of finite teams under synchronous and asynchronous team
//! semantics, including dependence atoms, generalised atoms and `~`.
//!
//! Two evaluation strategies exist for splitjunctions. Enumeration tries
//! subteam pairs directly. For downward-closed formulas a subteam can always
//! be shrunk, so a splitjunction holds iff the team is covered by maximal
//! satisfying subteams of its parts; those maxima are computed as antichains
//! of bitmasks, which keeps teams of a few dozen traces tractable.

mod async_engine;
mod atoms;
mod bits;
mod sync_engine;

use std::collections::HashMap;
use std::sync::Arc;

use crate::classical::check_trace;
use crate::error::{Error, Result};
use crate::formula::{fragment_info, Formula, Prop};
use crate::traces::{Team, DEFAULT_MAX_LCM};

pub use atoms::{eval_dep_atom, register_gen_atom, Arity, AtomPredicate, GenAtomDef, GenAtomRegistry};

/// Which pairs of subteams a splitjunction ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    /// Partitions `T1 ⊎ T2 = T`; enough for downward-closed formulas.
    DisjointOnly,
    /// Every cover `T1 ∪ T2 = T`.
    AllCovers,
}

/// How synchronous splitjunctions are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyncStrategy {
    /// Antichains for downward-closed formulas, all covers otherwise.
    Auto,
    Enumerate(SplitMode),
    /// Antichains of maximal satisfying subteams; downward-closed formulas only.
    Antichain,
}

/// Resource caps; exceeding one is an error, never a wrong verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_lcm: u64,
    /// Largest team whose covers are enumerated (`3^n` pairs).
    pub max_team: usize,
    /// Largest team whose partitions are enumerated (`2^n` pairs).
    pub max_partition_team: usize,
    /// Largest number of shift vectors enumerated for one temporal operator.
    pub max_grid: u64,
    pub max_antichain: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_lcm: DEFAULT_MAX_LCM,
            max_team: 12,
            max_partition_team: 20,
            max_grid: 10_000_000,
            max_antichain: 100_000,
        }
    }
}

/// Formula DAG with shared subterms and resolved atoms.
#[derive(Clone, Debug)]
pub(crate) enum Node {
    Lit(Prop),
    NegLit(Prop),
    And(usize, usize),
    Split(usize, usize),
    Next(usize),
    Eventually(usize),
    Globally(usize),
    Until(usize, usize),
    Release(usize, usize),
    Not(usize),
    Dep(Vec<Prop>, Vec<Prop>),
    Gen(Arc<GenAtomDef>, Vec<Prop>),
}

#[derive(Debug)]
pub(crate) struct Compiled {
    pub nodes: Vec<Node>,
    pub root: usize,
    /// Operands of maximal splitjunction chains rooted at each node.
    pub split_parts: Vec<Vec<usize>>,
    /// Number of splitjunctions in the subterm.
    pub splits: Vec<usize>,
    /// Whether the subterm has a temporal operator.
    pub temporal: Vec<bool>,
    pub downward_closed: bool,
}

impl Compiled {
    pub fn new(f: &Formula, registry: &GenAtomRegistry) -> Result<Self> {
        let info = fragment_info(f, registry)?;
        let mut c = Compiled {
            nodes: Vec::new(),
            root: 0,
            split_parts: Vec::new(),
            splits: Vec::new(),
            temporal: Vec::new(),
            downward_closed: info.downward_closed_syntactic,
        };
        let mut ids = HashMap::new();
        c.root = c.intern(f, registry, &mut ids)?;
        Ok(c)
    }

    fn intern(
        &mut self,
        f: &Formula,
        registry: &GenAtomRegistry,
        ids: &mut HashMap<Formula, usize>,
    ) -> Result<usize> {
        if let Some(&i) = ids.get(f) {
            return Ok(i);
        }
        let mut rec = |g: &Formula, c: &mut Self| c.intern(g, registry, ids);
        let node = match f {
            Formula::Lit(p) => Node::Lit(p.clone()),
            Formula::NegLit(p) => Node::NegLit(p.clone()),
            Formula::And(a, b) => Node::And(rec(a, self)?, rec(b, self)?),
            Formula::Split(a, b) => Node::Split(rec(a, self)?, rec(b, self)?),
            Formula::Next(a) => Node::Next(rec(a, self)?),
            Formula::Eventually(a) => Node::Eventually(rec(a, self)?),
            Formula::Globally(a) => Node::Globally(rec(a, self)?),
            Formula::Until(a, b) => Node::Until(rec(a, self)?, rec(b, self)?),
            Formula::Release(a, b) => Node::Release(rec(a, self)?, rec(b, self)?),
            Formula::Not(a) => Node::Not(rec(a, self)?),
            Formula::Dep {
                determinants,
                determined,
            } => Node::Dep(determinants.clone(), determined.clone()),
            Formula::Gen { name, args } => {
                let def = registry
                    .get(name)
                    .ok_or_else(|| Error::UnknownAtom(name.clone()))?;
                def.check_arity(args.len())?;
                Node::Gen(Arc::new(def.clone()), args.clone())
            }
        };
        let kids: Vec<usize> = match &node {
            Node::And(a, b) | Node::Split(a, b) | Node::Until(a, b) | Node::Release(a, b) => vec![*a, *b],
            Node::Next(a) | Node::Eventually(a) | Node::Globally(a) | Node::Not(a) => vec![*a],
            _ => vec![],
        };
        let splits = kids.iter().map(|&k| self.splits[k]).sum::<usize>()
            + usize::from(matches!(node, Node::Split(..)));
        let temporal = kids.iter().any(|&k| self.temporal[k])
            || matches!(
                node,
                Node::Next(_) | Node::Eventually(_) | Node::Globally(_) | Node::Until(..) | Node::Release(..)
            );
        let parts = match &node {
            Node::Split(a, b) => {
                let mut v = Vec::new();
                for k in [*a, *b] {
                    if matches!(self.nodes[k], Node::Split(..)) {
                        v.extend(self.split_parts[k].iter().copied());
                    } else {
                        v.push(k);
                    }
                }
                v
            }
            _ => Vec::new(),
        };
        let i = self.nodes.len();
        self.nodes.push(node);
        self.split_parts.push(parts);
        self.splits.push(splits);
        self.temporal.push(temporal);
        ids.insert(f.clone(), i);
        Ok(i)
    }
}

fn check_members(team: &Team) -> Result<()> {
    if team.len() > bits::MAX_MEMBERS {
        return Err(Error::bound("team size", bits::MAX_MEMBERS as u64));
    }
    Ok(())
}

/// `team ⊨ˢ f` with default budget and strategy.
pub fn check_sync(team: &Team, f: &Formula, registry: &GenAtomRegistry) -> Result<bool> {
    check_sync_with(team, f, registry, &Budget::default(), SyncStrategy::Auto)
}

/// `team ⊨ˢ f`. Temporal operators range over the first `prfx + lcm`
/// positions, after which the team's suffixes repeat.
pub fn check_sync_with(
    team: &Team,
    f: &Formula,
    registry: &GenAtomRegistry,
    budget: &Budget,
    strategy: SyncStrategy,
) -> Result<bool> {
    let c = Compiled::new(f, registry)?;
    check_members(team)?;
    let policy = match strategy {
        SyncStrategy::Auto if c.downward_closed => sync_engine::Policy::Antichain,
        SyncStrategy::Auto => sync_engine::Policy::Enumerate(SplitMode::AllCovers),
        SyncStrategy::Enumerate(m) => sync_engine::Policy::Enumerate(m),
        SyncStrategy::Antichain if c.downward_closed => sync_engine::Policy::Antichain,
        SyncStrategy::Antichain => {
            return Err(Error::unsupported(
                "antichain evaluation needs a downward-closed formula",
            ))
        }
    };
    sync_engine::SyncEngine::new(&c, team, budget, policy)?.check()
}

/// `team ⊨ᵃ f` with the default budget. Pure LTL goes through flatness: the
/// team satisfies `f` iff each of its traces does.
pub fn check_async(team: &Team, f: &Formula, registry: &GenAtomRegistry) -> Result<bool> {
    if f.is_pure_ltl() {
        for t in team.traces() {
            if !check_trace(t, f)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    check_async_general(team, f, registry, &Budget::default())
}

/// `team ⊨ᵃ f` by enumerating per-trace shift vectors.
///
/// Each trace `t` is shifted by some `k_t < |prefix_t| + |loop_t|`; larger
/// shifts only repeat a suffix already reached. For `ψ U φ` a vector `k`
/// witnesses the formula when the shifted team satisfies `φ` and, writing `D`
/// for the traces with `k_t > 0`, every vector `k' < k` on `D` shifts `D` into
/// a team satisfying `ψ`. Traces that satisfy `φ` right away carry no
/// obligation, which keeps pure LTL flat. `ψ R φ` is the dual: for every `k`
/// either the shifted team satisfies `φ`, or some non-empty part `D` of the
/// shifted traces has an earlier vector satisfying `ψ` while the rest
/// satisfies `φ` at `k`.
pub fn check_async_general(
    team: &Team,
    f: &Formula,
    registry: &GenAtomRegistry,
    budget: &Budget,
) -> Result<bool> {
    let c = Compiled::new(f, registry)?;
    check_members(team)?;
    async_engine::AsyncEngine::new(&c, team, budget)?.check()
}

#[cfg(test)]
mod tests;
