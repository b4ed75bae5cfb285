//! Synchronous evaluation on a fixed team.
//!
//! A subteam at time `pos` is a mask of trace indices of the original team;
//! position `pos` ranges over `0..prfx + lcm` and wraps to `prfx`. Masks are
//! normalised by keeping one index per class of traces whose suffixes at
//! `pos` coincide, so memo entries are per actual team.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::bits::{self, is_subset, join, meet, ones, submasks, sum, Mask};
use super::{Budget, Compiled, Node, SplitMode};
use crate::error::{Error, Result};
use crate::traces::{PropSet, Team, UpTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Policy {
    Enumerate(SplitMode),
    Antichain,
}

pub(crate) struct SyncEngine<'a> {
    c: &'a Compiled,
    traces: &'a [UpTrace],
    budget: &'a Budget,
    policy: Policy,
    prefix: usize,
    npos: usize,
    /// `suffix_ids[i][j]`: interned suffix of trace `i` at its position `j`.
    suffix_ids: Vec<Vec<usize>>,
    reps: HashMap<usize, Rc<Vec<usize>>>,
    query_memo: HashMap<(usize, usize, Mask), bool>,
    anti_memo: HashMap<(usize, usize, Mask), Rc<Vec<Mask>>>,
}

impl<'a> SyncEngine<'a> {
    pub fn new(c: &'a Compiled, team: &'a Team, budget: &'a Budget, policy: Policy) -> Result<Self> {
        let lcm = team.lcm(budget.max_lcm)? as usize;
        let traces = team.traces();
        let mut interned: HashMap<UpTrace, usize> = HashMap::new();
        let suffix_ids = traces
            .iter()
            .map(|t| {
                (0..t.len())
                    .map(|j| {
                        let n = interned.len();
                        *interned.entry(t.suffix(j)).or_insert(n)
                    })
                    .collect()
            })
            .collect();
        Ok(SyncEngine {
            c,
            traces,
            budget,
            policy,
            prefix: team.prfx(),
            npos: team.prfx() + lcm,
            suffix_ids,
            reps: HashMap::new(),
            query_memo: HashMap::new(),
            anti_memo: HashMap::new(),
        })
    }

    pub fn check(&mut self) -> Result<bool> {
        let all = bits::full(self.traces.len());
        self.query(self.c.root, 0, all)
    }

    fn next(&self, pos: usize) -> usize {
        if pos + 1 < self.npos {
            pos + 1
        } else {
            self.prefix
        }
    }

    fn letter(&self, i: usize, pos: usize) -> &'a PropSet {
        self.traces[i].value_at(pos)
    }

    fn reps(&mut self, pos: usize) -> Rc<Vec<usize>> {
        if let Some(r) = self.reps.get(&pos) {
            return r.clone();
        }
        let mut first: HashMap<usize, usize> = HashMap::new();
        let r: Vec<usize> = (0..self.traces.len())
            .map(|i| {
                let id = self.suffix_ids[i][self.traces[i].fold_pos(pos)];
                *first.entry(id).or_insert(i)
            })
            .collect();
        let r = Rc::new(r);
        self.reps.insert(pos, r.clone());
        r
    }

    fn norm(&mut self, pos: usize, s: Mask) -> Mask {
        let reps = self.reps(pos);
        ones(s).fold(0, |m, i| m | 1 << reps[i])
    }

    /// The members of `u` whose class at `pos` is represented in `r`.
    fn lift(&mut self, r: Mask, pos: usize, u: Mask) -> Mask {
        let reps = self.reps(pos);
        ones(u).filter(|&i| r >> reps[i] & 1 == 1).fold(0, |m, i| m | 1 << i)
    }

    /// Positions visited from `pos` before the sequence repeats.
    fn horizon(&self, pos: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut p = pos;
        for _ in 0..self.npos {
            out.push(p);
            p = self.next(p);
            if p == pos || (pos < self.prefix && p == self.prefix && out.contains(&p)) {
                break;
            }
        }
        out
    }

    fn query(&mut self, node: usize, pos: usize, s: Mask) -> Result<bool> {
        let s = self.norm(pos, s);
        if let Some(&v) = self.query_memo.get(&(node, pos, s)) {
            return Ok(v);
        }
        let v = self.query_uncached(node, pos, s)?;
        self.query_memo.insert((node, pos, s), v);
        Ok(v)
    }

    fn query_uncached(&mut self, node: usize, pos: usize, s: Mask) -> Result<bool> {
        let c = self.c;
        Ok(match &c.nodes[node] {
            Node::Lit(p) => ones(s).all(|i| self.letter(i, pos).contains(p)),
            Node::NegLit(p) => ones(s).all(|i| !self.letter(i, pos).contains(p)),
            Node::And(a, b) => self.query(*a, pos, s)? && self.query(*b, pos, s)?,
            Node::Not(a) => !self.query(*a, pos, s)?,
            Node::Dep(det, dtd) => {
                super::eval_dep_atom(ones(s).map(|i| self.letter(i, pos)), det, dtd)
            }
            Node::Gen(def, args) => def.eval(args, ones(s).map(|i| self.letter(i, pos))),
            Node::Next(a) => self.query(*a, self.next(pos), s)?,
            Node::Eventually(a) => {
                for p in self.horizon(pos) {
                    if self.query(*a, p, s)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::Globally(a) => {
                for p in self.horizon(pos) {
                    if !self.query(*a, p, s)? {
                        return Ok(false);
                    }
                }
                true
            }
            Node::Until(a, b) => {
                for p in self.horizon(pos) {
                    if self.query(*b, p, s)? {
                        return Ok(true);
                    }
                    if !self.query(*a, p, s)? {
                        return Ok(false);
                    }
                }
                false
            }
            Node::Release(a, b) => {
                for p in self.horizon(pos) {
                    if !self.query(*b, p, s)? {
                        return Ok(false);
                    }
                    if self.query(*a, p, s)? {
                        return Ok(true);
                    }
                }
                true
            }
            Node::Split(a, b) => match self.policy {
                Policy::Enumerate(mode) => self.enumerate_split(*a, *b, pos, s, mode)?,
                Policy::Antichain => self.split_by_antichains(node, pos, s)?,
            },
        })
    }

    fn enumerate_split(&mut self, a: usize, b: usize, pos: usize, s: Mask, mode: SplitMode) -> Result<bool> {
        let n = s.count_ones() as usize;
        match mode {
            SplitMode::DisjointOnly => {
                if n > self.budget.max_partition_team {
                    return Err(Error::bound("team size for partition enumeration", self.budget.max_partition_team as u64));
                }
                for t1 in submasks(s) {
                    if self.query(a, pos, t1)? && self.query(b, pos, s & !t1)? {
                        return Ok(true);
                    }
                }
            }
            SplitMode::AllCovers => {
                if n > self.budget.max_team {
                    return Err(Error::bound("team size for cover enumeration", self.budget.max_team as u64));
                }
                for t1 in submasks(s) {
                    if !self.query(a, pos, t1)? {
                        continue;
                    }
                    for extra in submasks(t1) {
                        if self.query(b, pos, (s & !t1) | extra)? {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// `s` splits into parts satisfying each operand of the chain iff some
    /// choice of maximal satisfying subteams covers it. One operand, the one
    /// with the most nested splitjunctions, is only ever queried on what the
    /// others leave uncovered.
    fn split_by_antichains(&mut self, node: usize, pos: usize, s: Mask) -> Result<bool> {
        let parts = self.c.split_parts[node].clone();
        if parts.iter().all(|&k| self.c.splits[k] == 0) {
            let mut lists = Vec::with_capacity(parts.len());
            for &k in &parts {
                lists.push(self.antichain(k, pos, s)?);
            }
            let mut failed = HashSet::new();
            return Ok(cover(&lists, s, 0, 0, &mut failed));
        }
        let q = (0..parts.len())
            .rev()
            .max_by_key(|&i| (self.c.splits[parts[i]], i))
            .expect("non-empty chain");
        let mut lists = Vec::with_capacity(parts.len() - 1);
        for (i, &k) in parts.iter().enumerate() {
            if i != q {
                lists.push(self.antichain(k, pos, s)?);
            }
        }
        let mut failed = HashSet::new();
        self.search(&lists, parts[q], pos, s, 0, 0, &mut failed)
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &mut self,
        lists: &[Rc<Vec<Mask>>],
        q: usize,
        pos: usize,
        s: Mask,
        i: usize,
        covered: Mask,
        failed: &mut HashSet<(usize, Mask)>,
    ) -> Result<bool> {
        if self.query(q, pos, s & !covered)? {
            return Ok(true);
        }
        if i == lists.len() || failed.contains(&(i, covered)) {
            return Ok(false);
        }
        let mut tried = HashSet::new();
        for &a in lists[i].iter() {
            let c2 = covered | a;
            if tried.insert(c2) && self.search(lists, q, pos, s, i + 1, c2, failed)? {
                return Ok(true);
            }
        }
        failed.insert((i, covered));
        Ok(false)
    }

    /// Maximal subteams of `u` (normalised at `pos`) satisfying `node`.
    fn antichain(&mut self, node: usize, pos: usize, u: Mask) -> Result<Rc<Vec<Mask>>> {
        let u = self.norm(pos, u);
        if let Some(v) = self.anti_memo.get(&(node, pos, u)) {
            return Ok(v.clone());
        }
        let v = Rc::new(self.antichain_uncached(node, pos, u)?);
        self.anti_memo.insert((node, pos, u), v.clone());
        Ok(v)
    }

    /// Antichain of `node` at `pos`, expressed over the members of `u`.
    fn lifted(&mut self, node: usize, pos: usize, u: Mask) -> Result<Vec<Mask>> {
        let inner = self.antichain(node, pos, u)?;
        let mut out = Vec::with_capacity(inner.len());
        for &r in inner.iter() {
            out.push(self.lift(r, pos, u));
        }
        Ok(out)
    }

    fn antichain_uncached(&mut self, node: usize, pos: usize, u: Mask) -> Result<Vec<Mask>> {
        let cap = self.budget.max_antichain;
        let c = self.c;
        let traces = self.traces;
        let letter = move |i: usize| traces[i].value_at(pos);
        Ok(match &c.nodes[node] {
            Node::Lit(p) => vec![bits::lit_mask(u, letter, p, true)],
            Node::NegLit(p) => vec![bits::lit_mask(u, letter, p, false)],
            Node::Dep(det, dtd) => bits::dep_antichain(u, letter, det, dtd, cap)?,
            Node::Gen(def, args) => bits::gen_antichain(u, letter, def, args, cap)?,
            Node::And(a, b) => {
                let (x, y) = (self.antichain(*a, pos, u)?, self.antichain(*b, pos, u)?);
                meet(&x, &y, cap)?
            }
            Node::Split(a, b) => {
                let (x, y) = (self.antichain(*a, pos, u)?, self.antichain(*b, pos, u)?);
                sum(&x, &y, cap)?
            }
            Node::Next(a) => self.lifted(*a, self.next(pos), u)?,
            Node::Eventually(a) => {
                let mut acc: Vec<Mask> = Vec::new();
                for p in self.horizon(pos) {
                    let x = self.lifted(*a, p, u)?;
                    acc = join(&acc, &x, cap)?;
                    if acc == [u] {
                        break;
                    }
                }
                acc
            }
            Node::Globally(a) => {
                let mut acc = vec![u];
                for p in self.horizon(pos) {
                    let x = self.lifted(*a, p, u)?;
                    acc = meet(&acc, &x, cap)?;
                    if acc == [0] {
                        break;
                    }
                }
                acc
            }
            Node::Until(a, b) => {
                let mut res: Vec<Mask> = Vec::new();
                let mut acc = vec![u];
                for p in self.horizon(pos) {
                    let xb = self.lifted(*b, p, u)?;
                    res = join(&res, &meet(&acc, &xb, cap)?, cap)?;
                    let xa = self.lifted(*a, p, u)?;
                    acc = meet(&acc, &xa, cap)?;
                    if res == [u] || acc.iter().all(|&m| res.iter().any(|&r| is_subset(m, r))) {
                        break;
                    }
                }
                res
            }
            Node::Release(a, b) => {
                let mut res = vec![u];
                let mut acc_a: Vec<Mask> = Vec::new();
                for p in self.horizon(pos) {
                    let xb = self.lifted(*b, p, u)?;
                    res = meet(&res, &join(&xb, &acc_a, cap)?, cap)?;
                    let xa = self.lifted(*a, p, u)?;
                    acc_a = join(&acc_a, &xa, cap)?;
                    if res.iter().all(|&m| acc_a.iter().any(|&r| is_subset(m, r))) {
                        break;
                    }
                }
                res
            }
            Node::Not(_) => unreachable!("antichains are only built for downward-closed formulas"),
        })
    }
}

/// Whether `s` is covered by one set from each of some of the lists. Branches
/// on the uncovered member with the fewest candidate sets.
pub(crate) fn cover(lists: &[Rc<Vec<Mask>>], s: Mask, used: u64, covered: Mask, failed: &mut HashSet<(u64, Mask)>) -> bool {
    let rest = s & !covered;
    if rest == 0 {
        return true;
    }
    if failed.contains(&(used, covered)) {
        return false;
    }
    let mut best: Option<(usize, usize)> = None;
    for x in ones(rest) {
        let n = lists
            .iter()
            .enumerate()
            .filter(|(k, _)| used >> k & 1 == 0)
            .map(|(_, l)| l.iter().filter(|&&m| m >> x & 1 == 1).count())
            .sum::<usize>();
        if best.is_none_or(|(_, bn)| n < bn) {
            best = Some((x, n));
        }
    }
    let (x, _) = best.expect("rest is non-empty");
    for (k, l) in lists.iter().enumerate() {
        if used >> k & 1 == 1 {
            continue;
        }
        for &m in l.iter() {
            if m >> x & 1 == 1 && cover(lists, s, used | 1 << k, covered | m, failed) {
                return true;
            }
        }
    }
    failed.insert((used, covered));
    false
}
