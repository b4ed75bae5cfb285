use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::traces::UpTrace;

/// Least fixpoint of `v[i] = b[i] || (a[i] && v[next[i]])` over a lasso.
pub(crate) fn until_vec(next: &[usize], a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut v = b.to_vec();
    loop {
        let mut changed = false;
        for i in (0..v.len()).rev() {
            if !v[i] && a[i] && v[next[i]] {
                v[i] = true;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Greatest fixpoint of `v[i] = b[i] && (a[i] || v[next[i]])`, i.e. `a R b`.
pub(crate) fn release_vec(next: &[usize], a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut v = b.to_vec();
    loop {
        let mut changed = false;
        for i in (0..v.len()).rev() {
            if v[i] && !a[i] && !v[next[i]] {
                v[i] = false;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Truth value of `f` at every position of the lasso `e`.
///
/// `~` is read as classical negation, which is what it means on a single trace.
pub(crate) fn label_positions(e: &UpTrace, f: &Formula) -> Result<Vec<bool>> {
    let n = e.len();
    let next: Vec<usize> = (0..n).map(|i| e.next_pos(i)).collect();
    label(f, n, &next, &|p, i| e.value_at(i).contains(p))
}

pub(crate) fn label(
    f: &Formula,
    n: usize,
    next: &[usize],
    holds: &dyn Fn(&crate::formula::Prop, usize) -> bool,
) -> Result<Vec<bool>> {
    use Formula::*;
    let rec = |g: &Formula| label(g, n, next, holds);
    Ok(match f {
        Lit(p) => (0..n).map(|i| holds(p, i)).collect(),
        NegLit(p) => (0..n).map(|i| !holds(p, i)).collect(),
        And(a, b) => zip(&rec(a)?, &rec(b)?, |x, y| x && y),
        Split(a, b) => zip(&rec(a)?, &rec(b)?, |x, y| x || y),
        Next(a) => {
            let va = rec(a)?;
            (0..n).map(|i| va[next[i]]).collect()
        }
        Eventually(a) => until_vec(next, &vec![true; n], &rec(a)?),
        Globally(a) => release_vec(next, &vec![false; n], &rec(a)?),
        Until(a, b) => until_vec(next, &rec(a)?, &rec(b)?),
        Release(a, b) => release_vec(next, &rec(a)?, &rec(b)?),
        Not(a) => rec(a)?.into_iter().map(|x| !x).collect(),
        Dep { .. } | Gen { .. } => {
            return Err(Error::unsupported(
                "team atoms have no meaning on a single trace",
            ))
        }
    })
}

fn zip(a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

/// Classical satisfaction `e ⊨ f`.
pub fn check_trace(e: &UpTrace, f: &Formula) -> Result<bool> {
    Ok(label_positions(e, f)?[0])
}
