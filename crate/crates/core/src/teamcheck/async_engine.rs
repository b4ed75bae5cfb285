//! Asynchronous evaluation by per-trace shift vectors.
//!
//! Every team met during evaluation consists of suffixes of the original
//! traces, so teams are masks over the interned suffixes.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::bits::{self, ones, submasks, sum, meet, Mask};
use super::sync_engine::cover;
use super::{Budget, Compiled, Node, SplitMode};
use crate::error::{Error, Result};
use crate::traces::{PropSet, Team, UpTrace};

pub(crate) struct AsyncEngine<'a> {
    c: &'a Compiled,
    budget: &'a Budget,
    letters: Vec<PropSet>,
    succ: Vec<usize>,
    /// Suffixes reachable from each suffix, indexed by shift.
    reach: Vec<Vec<usize>>,
    root_team: Mask,
    memo: HashMap<(usize, Mask), bool>,
    anti_memo: HashMap<(usize, Mask), Rc<Vec<Mask>>>,
}

impl<'a> AsyncEngine<'a> {
    pub fn new(c: &'a Compiled, team: &Team, budget: &'a Budget) -> Result<Self> {
        let mut ids: HashMap<UpTrace, usize> = HashMap::new();
        let mut encs: Vec<UpTrace> = Vec::new();
        let mut root_team = 0;
        for t in team.traces() {
            for j in 0..t.len() {
                let s = t.suffix(j);
                if !ids.contains_key(&s) {
                    if encs.len() == bits::MAX_MEMBERS {
                        return Err(Error::bound("distinct suffixes of the team", bits::MAX_MEMBERS as u64));
                    }
                    ids.insert(s.clone(), encs.len());
                    encs.push(s);
                }
            }
            root_team |= 1 << ids[t];
        }
        let succ: Vec<usize> = encs.iter().map(|e| ids[&e.suffix(1)]).collect();
        let reach = encs
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut v = vec![i];
                for _ in 1..e.len() {
                    v.push(succ[*v.last().expect("non-empty")]);
                }
                v
            })
            .collect();
        Ok(AsyncEngine {
            c,
            budget,
            letters: encs.iter().map(|e| e.value_at(0).clone()).collect(),
            succ,
            reach,
            root_team,
            memo: HashMap::new(),
            anti_memo: HashMap::new(),
        })
    }

    pub fn check(&mut self) -> Result<bool> {
        self.query(self.c.root, self.root_team)
    }

    fn shift_all(&self, s: Mask) -> Mask {
        ones(s).fold(0, |m, i| m | 1 << self.succ[i])
    }

    fn grid(&self, radices: &[usize]) -> Result<()> {
        let size = radices.iter().map(|&r| r as u128).product::<u128>();
        if size > self.budget.max_grid as u128 {
            return Err(Error::VectorSpaceExceeded {
                size,
                limit: self.budget.max_grid,
            });
        }
        Ok(())
    }

    /// Calls `f` with the team reached by every shift vector `k` with
    /// `k_t < bound[t]`, stopping early when `f` returns `Some`.
    fn vectors<T>(
        &mut self,
        members: &[usize],
        bounds: &[usize],
        mut f: impl FnMut(&mut Self, &[usize], Mask) -> Result<Option<T>>,
    ) -> Result<Option<T>> {
        self.grid(bounds)?;
        if bounds.contains(&0) {
            return Ok(None);
        }
        let mut k = vec![0; members.len()];
        loop {
            let team = members
                .iter()
                .zip(&k)
                .fold(0, |m, (&t, &j)| m | 1 << self.reach[t][j]);
            if let Some(v) = f(self, &k, team)? {
                return Ok(Some(v));
            }
            let mut d = 0;
            loop {
                if d == k.len() {
                    return Ok(None);
                }
                k[d] += 1;
                if k[d] < bounds[d] {
                    break;
                }
                k[d] = 0;
                d += 1;
            }
        }
    }

    fn query(&mut self, node: usize, s: Mask) -> Result<bool> {
        if let Some(&v) = self.memo.get(&(node, s)) {
            return Ok(v);
        }
        let v = self.query_uncached(node, s)?;
        self.memo.insert((node, s), v);
        Ok(v)
    }

    fn query_uncached(&mut self, node: usize, s: Mask) -> Result<bool> {
        let c = self.c;
        let members: Vec<usize> = ones(s).collect();
        let full: Vec<usize> = members.iter().map(|&t| self.reach[t].len()).collect();
        Ok(match &c.nodes[node] {
            Node::Lit(p) => members.iter().all(|&i| self.letters[i].contains(p)),
            Node::NegLit(p) => members.iter().all(|&i| !self.letters[i].contains(p)),
            Node::And(a, b) => self.query(*a, s)? && self.query(*b, s)?,
            Node::Not(a) => !self.query(*a, s)?,
            Node::Dep(det, dtd) => super::eval_dep_atom(members.iter().map(|&i| &self.letters[i]), det, dtd),
            Node::Gen(def, args) => def.eval(args, members.iter().map(|&i| &self.letters[i])),
            Node::Next(a) => {
                let t = self.shift_all(s);
                self.query(*a, t)?
            }
            Node::Eventually(a) => {
                let a = *a;
                self.vectors(&members, &full, |e, _, team| Ok(e.query(a, team)?.then_some(())))?
                    .is_some()
            }
            Node::Globally(a) => {
                let a = *a;
                self.vectors(&members, &full, |e, _, team| Ok((!e.query(a, team)?).then_some(())))?
                    .is_none()
            }
            Node::Until(a, b) => {
                let (a, b) = (*a, *b);
                let ms = members.clone();
                self.vectors(&members, &full, |e, k, team| {
                    if !e.query(b, team)? {
                        return Ok(None);
                    }
                    let (d, dk) = earlier(&ms, k);
                    if d.is_empty() {
                        return Ok(Some(()));
                    }
                    let broken = e.vectors(&d, &dk, |e2, _, t2| Ok((!e2.query(a, t2)?).then_some(())))?;
                    Ok(broken.is_none().then_some(()))
                })?
                .is_some()
            }
            Node::Release(a, b) => {
                let (a, b) = (*a, *b);
                let ms = members.clone();
                let violated = self.vectors(&members, &full, |e, k, team| {
                    if e.query(b, team)? {
                        return Ok(None);
                    }
                    let positive: Vec<usize> = (0..ms.len()).filter(|&i| k[i] > 0).collect();
                    // Some non-empty part of the shifted traces is released earlier.
                    for sel in 1u64..1 << positive.len() {
                        let chosen: Vec<usize> = (0..positive.len())
                            .filter(|&j| sel >> j & 1 == 1)
                            .map(|j| positive[j])
                            .collect();
                        let rest = (0..ms.len())
                            .filter(|i| !chosen.contains(i))
                            .fold(0, |m, i| m | 1 << e.reach[ms[i]][k[i]]);
                        if !e.query(b, rest)? {
                            continue;
                        }
                        let d: Vec<usize> = chosen.iter().map(|&i| ms[i]).collect();
                        let dk: Vec<usize> = chosen.iter().map(|&i| k[i]).collect();
                        let released = e.vectors(&d, &dk, |e2, _, t2| Ok(e2.query(a, t2)?.then_some(())))?;
                        if released.is_some() {
                            return Ok(None);
                        }
                    }
                    Ok(Some(()))
                })?;
                violated.is_none()
            }
            Node::Split(a, b) => {
                if c.downward_closed {
                    self.split_downward_closed(node, *a, *b, s)?
                } else {
                    self.enumerate_split(*a, *b, s, SplitMode::AllCovers)?
                }
            }
        })
    }

    fn enumerate_split(&mut self, a: usize, b: usize, s: Mask, mode: SplitMode) -> Result<bool> {
        let n = s.count_ones() as usize;
        let (limit, what) = match mode {
            SplitMode::DisjointOnly => (self.budget.max_partition_team, "team size for partition enumeration"),
            SplitMode::AllCovers => (self.budget.max_team, "team size for cover enumeration"),
        };
        if n > limit {
            return Err(Error::bound(what, limit as u64));
        }
        for t1 in submasks(s) {
            if !self.query(a, t1)? {
                continue;
            }
            match mode {
                SplitMode::DisjointOnly => {
                    if self.query(b, s & !t1)? {
                        return Ok(true);
                    }
                }
                SplitMode::AllCovers => {
                    for extra in submasks(t1) {
                        if self.query(b, (s & !t1) | extra)? {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// Temporal-free operands are represented by their maximal satisfying
    /// subteams; at most one temporal operand is queried on the remainder.
    fn split_downward_closed(&mut self, node: usize, a: usize, b: usize, s: Mask) -> Result<bool> {
        let c = self.c;
        let parts = &c.split_parts[node];
        let temporal: Vec<usize> = (0..parts.len()).filter(|&i| c.temporal[parts[i]]).collect();
        if temporal.len() > 1 {
            return self.enumerate_split(a, b, s, SplitMode::DisjointOnly);
        }
        let mut lists = Vec::new();
        for (i, &k) in parts.iter().enumerate() {
            if !temporal.contains(&i) {
                lists.push(self.antichain(k, s)?);
            }
        }
        match temporal.first() {
            None => Ok(cover(&lists, s, 0, 0, &mut HashSet::new())),
            Some(&q) => self.search(&lists, parts[q], s, 0, 0, &mut HashSet::new()),
        }
    }

    fn search(
        &mut self,
        lists: &[Rc<Vec<Mask>>],
        q: usize,
        s: Mask,
        i: usize,
        covered: Mask,
        failed: &mut HashSet<(usize, Mask)>,
    ) -> Result<bool> {
        if self.query(q, s & !covered)? {
            return Ok(true);
        }
        if i == lists.len() || failed.contains(&(i, covered)) {
            return Ok(false);
        }
        let mut tried = HashSet::new();
        for &m in lists[i].iter() {
            let c2 = covered | m;
            if tried.insert(c2) && self.search(lists, q, s, i + 1, c2, failed)? {
                return Ok(true);
            }
        }
        failed.insert((i, covered));
        Ok(false)
    }

    fn antichain(&mut self, node: usize, u: Mask) -> Result<Rc<Vec<Mask>>> {
        if let Some(v) = self.anti_memo.get(&(node, u)) {
            return Ok(v.clone());
        }
        let cap = self.budget.max_antichain;
        let c = self.c;
        let v = {
            let letters = &self.letters;
            let letter = |i: usize| &letters[i];
            match &c.nodes[node] {
                Node::Lit(p) => vec![bits::lit_mask(u, letter, p, true)],
                Node::NegLit(p) => vec![bits::lit_mask(u, letter, p, false)],
                Node::Dep(det, dtd) => bits::dep_antichain(u, letter, det, dtd, cap)?,
                Node::Gen(def, args) => bits::gen_antichain(u, letter, def, args, cap)?,
                Node::And(a, b) => {
                    let (a, b) = (*a, *b);
                    let x = self.antichain(a, u)?;
                    let y = self.antichain(b, u)?;
                    meet(&x, &y, cap)?
                }
                Node::Split(a, b) => {
                    let (a, b) = (*a, *b);
                    let x = self.antichain(a, u)?;
                    let y = self.antichain(b, u)?;
                    sum(&x, &y, cap)?
                }
                _ => unreachable!("antichains are only built for temporal-free, downward-closed operands"),
            }
        };
        let v = Rc::new(v);
        self.anti_memo.insert((node, u), v.clone());
        Ok(v)
    }
}

/// The traces with a positive shift and their shifts.
fn earlier(members: &[usize], k: &[usize]) -> (Vec<usize>, Vec<usize>) {
    members
        .iter()
        .zip(k)
        .filter(|(_, &j)| j > 0)
        .map(|(&t, &j)| (t, j))
        .unzip()
}
