use super::{Formula, Prop};
use crate::error::{Error, Result};

/// Classical negation inside negation normal form. On every single trace
/// exactly one of `f` and `dualize(f)` holds.
pub fn dualize(f: &Formula) -> Result<Formula> {
    use Formula::*;
    Ok(match f {
        Lit(p) => NegLit(p.clone()),
        NegLit(p) => Lit(p.clone()),
        And(a, b) => Formula::split(dualize(a)?, dualize(b)?),
        Split(a, b) => Formula::and(dualize(a)?, dualize(b)?),
        Next(a) => Formula::next(dualize(a)?),
        Eventually(a) => Formula::globally(dualize(a)?),
        Globally(a) => Formula::eventually(dualize(a)?),
        Until(a, b) => Formula::release(dualize(a)?, dualize(b)?),
        Release(a, b) => Formula::until(dualize(a)?, dualize(b)?),
        Not(_) | Dep { .. } | Gen { .. } => {
            return Err(Error::unsupported(
                "classical negation is only defined for pure LTL formulas",
            ))
        }
    })
}

/// The proposition standing for "false on every trace of the team".
pub fn bar_name(p: &Prop) -> Prop {
    Prop::raw(format!("{}_bar", p.as_str()))
}

/// Replaces every `!p` by the positive proposition `p_bar`.
pub fn bar_transform(f: &Formula) -> Result<Formula> {
    if f.any(&|g| matches!(g, Formula::Split(..))) {
        return Err(Error::unsupported(
            "the barred translation needs a splitjunction-free formula",
        ));
    }
    if f.has_dep_or_gen() {
        return Err(Error::unsupported(
            "the barred translation does not cover dependence or generalised atoms",
        ));
    }
    let props = f.props();
    let mut negated = Vec::new();
    f.visit(&mut |g| {
        if let Formula::NegLit(p) = g {
            negated.push(p.clone());
        }
    });
    for p in &negated {
        let bar = bar_name(p);
        if props.contains(&bar) {
            return Err(Error::NameCollision(bar.as_str().to_string()));
        }
    }
    Ok(rename(f))
}

fn rename(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        NegLit(p) => Lit(bar_name(p)),
        Lit(_) | Dep { .. } | Gen { .. } => f.clone(),
        And(a, b) => Formula::and(rename(a), rename(b)),
        Split(a, b) => Formula::split(rename(a), rename(b)),
        Next(a) => Formula::next(rename(a)),
        Eventually(a) => Formula::eventually(rename(a)),
        Globally(a) => Formula::globally(rename(a)),
        Until(a, b) => Formula::until(rename(a), rename(b)),
        Release(a, b) => Formula::release(rename(a), rename(b)),
        Not(a) => Formula::not(rename(a)),
    }
}
