//! Subteams as bitmasks over at most 128 members, and antichains of them.

use std::collections::BTreeMap;

use super::GenAtomDef;
use crate::error::{Error, Result};
use crate::formula::Prop;
use crate::traces::PropSet;

pub(crate) type Mask = u128;

pub(crate) const MAX_MEMBERS: usize = 128;

pub(crate) fn ones(m: Mask) -> impl Iterator<Item = usize> {
    let mut rest = m;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

pub(crate) fn full(n: usize) -> Mask {
    if n >= 128 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

/// All submasks of `m`, including `0` and `m`.
pub(crate) fn submasks(m: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

pub(crate) fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// Keeps the inclusion-maximal sets, largest first.
pub(crate) fn maximalize(mut sets: Vec<Mask>, cap: usize) -> Result<Vec<Mask>> {
    sets.sort_unstable_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(b.cmp(a)));
    sets.dedup();
    let mut out: Vec<Mask> = Vec::new();
    for s in sets {
        if !out.iter().any(|&o| is_subset(s, o)) {
            out.push(s);
            if out.len() > cap {
                return Err(Error::bound("antichain of maximal satisfying subteams", cap as u64));
            }
        }
    }
    Ok(out)
}

/// Maximal sets of the intersection of two downsets.
pub(crate) fn meet(a: &[Mask], b: &[Mask], cap: usize) -> Result<Vec<Mask>> {
    let mut v = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            v.push(x & y);
        }
    }
    maximalize(v, cap)
}

/// Maximal sets of the union of two downsets.
pub(crate) fn join(a: &[Mask], b: &[Mask], cap: usize) -> Result<Vec<Mask>> {
    maximalize(a.iter().chain(b).copied().collect(), cap)
}

/// Maximal sets of `{x ∪ y}`: the downset of splits into the two parts.
pub(crate) fn sum(a: &[Mask], b: &[Mask], cap: usize) -> Result<Vec<Mask>> {
    let mut v = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            v.push(x | y);
        }
    }
    maximalize(v, cap)
}

/// Members of `u` whose letter contains `p` (or lacks it, if `!positive`).
pub(crate) fn lit_mask<'a>(u: Mask, letter: impl Fn(usize) -> &'a PropSet, p: &Prop, positive: bool) -> Mask {
    ones(u)
        .filter(|&i| letter(i).contains(p) == positive)
        .fold(0, |m, i| m | 1 << i)
}

/// Maximal subteams of `u` satisfying `dep(det; dtd)`: per class of
/// determinant values, one class of determined values.
pub(crate) fn dep_antichain<'a>(
    u: Mask,
    letter: impl Fn(usize) -> &'a PropSet,
    det: &[Prop],
    dtd: &[Prop],
    cap: usize,
) -> Result<Vec<Mask>> {
    let mut groups: BTreeMap<Vec<bool>, BTreeMap<Vec<bool>, Mask>> = BTreeMap::new();
    for i in ones(u) {
        let l = letter(i);
        let key: Vec<bool> = det.iter().map(|p| l.contains(p)).collect();
        let val: Vec<bool> = dtd.iter().map(|p| l.contains(p)).collect();
        *groups.entry(key).or_default().entry(val).or_default() |= 1 << i;
    }
    let mut out: Vec<Mask> = vec![0];
    for classes in groups.values() {
        let mut next = Vec::with_capacity(out.len() * classes.len());
        for &o in &out {
            for &c in classes.values() {
                next.push(o | c);
            }
        }
        if next.len() > cap {
            return Err(Error::bound("antichain of maximal satisfying subteams", cap as u64));
        }
        out = next;
    }
    Ok(out)
}

/// Maximal subteams of `u` satisfying a downward-closed generalised atom.
pub(crate) fn gen_antichain<'a>(
    u: Mask,
    letter: impl Fn(usize) -> &'a PropSet,
    def: &GenAtomDef,
    args: &[Prop],
    cap: usize,
) -> Result<Vec<Mask>> {
    if u.count_ones() > 16 {
        return Err(Error::bound("subteams enumerated for a generalised atom", 1 << 16));
    }
    let mut sat = Vec::new();
    for s in submasks(u) {
        if sat.iter().any(|&m| is_subset(s, m)) {
            continue;
        }
        if def.eval(args, ones(s).map(&letter)) {
            sat.push(s);
        }
    }
    maximalize(sat, cap)
}
