//! Propositional team logic to team model checking, through the layered
//! structure `K_P` whose traces are exactly the assignments to `P`.
//!
//! `K_P` has a root `r` and, for each variable `p_i`, a layer of two worlds
//! `a_i` (labelled `p_i`) and `b_i` (labelled `p_i_bar`); every world of a
//! layer points to both worlds of the next, and the last layer loops. The
//! value of `p_i` is therefore read at time `i`.

use crate::error::{Error, Result};
use crate::formula::{bar_name, Formula, Prop};
use crate::modelcheck::Kripke;
use crate::teamcheck::{check_sync, GenAtomRegistry};
use crate::traces::{PropSet, Team, UpTrace};

/// Largest variable count `pl_team_brute_force` accepts.
pub const MAX_PL_VARS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlMode {
    /// Some non-empty team of assignments satisfies the formula.
    Sat,
    /// The team of all assignments satisfies the formula.
    Val,
}

/// The variables of a temporal-free formula, sorted.
pub fn pl_variables(phi: &Formula) -> Result<Vec<Prop>> {
    if !phi.is_temporal_free() {
        return Err(Error::NonPropositional(phi.to_string()));
    }
    if phi.any(&|g| matches!(g, Formula::Gen { .. })) {
        return Err(Error::unsupported("generalised atoms in propositional reductions"));
    }
    let vars: Vec<Prop> = phi.props().into_iter().collect();
    for p in &vars {
        let bar = bar_name(p);
        if vars.contains(&bar) {
            return Err(Error::NameCollision(bar.to_string()));
        }
    }
    Ok(vars)
}

/// `K_P` for the variables in order; world names are `r`, `a1`, `b1`, ...
pub fn layered_structure(vars: &[Prop]) -> Kripke {
    let n = vars.len();
    let mut names = vec!["r".to_string()];
    let mut labels = vec![PropSet::new()];
    for (i, p) in vars.iter().enumerate() {
        names.push(format!("a{}", i + 1));
        labels.push([p.clone()].into());
        names.push(format!("b{}", i + 1));
        labels.push([bar_name(p)].into());
    }
    // Layer i (1-based) occupies worlds 2i-1 and 2i.
    let layer = |i: usize| [2 * i - 1, 2 * i];
    let mut succ = vec![Vec::new(); 2 * n + 1];
    succ[0] = if n == 0 { vec![0] } else { layer(1).to_vec() };
    for i in 1..=n {
        let next = if i == n { None } else { Some(layer(i + 1).to_vec()) };
        for w in layer(i) {
            succ[w] = next.clone().unwrap_or_else(|| vec![w]);
        }
    }
    Kripke {
        names,
        labels,
        succ,
        init: 0,
    }
}

/// `phi*`: `p_i` becomes `F p_i`, `!p_i` becomes `F p_i_bar`, and
/// `dep(D;E)` becomes the split, over the assignments `s` to `D`, of
/// "`D` takes `s`" conjoined with `X^i dep(;e)` for every `e = p_i` in `E`.
pub fn star(phi: &Formula, vars: &[Prop]) -> Result<Formula> {
    let index = |p: &Prop| vars.iter().position(|v| v == p).map(|i| i + 1);
    let lit = |p: &Prop, positive: bool| {
        let target = if positive { p.clone() } else { bar_name(p) };
        Formula::eventually(Formula::Lit(target))
    };
    Ok(match phi {
        Formula::Lit(p) => lit(p, true),
        Formula::NegLit(p) => lit(p, false),
        Formula::And(a, b) => Formula::and(star(a, vars)?, star(b, vars)?),
        Formula::Split(a, b) => Formula::split(star(a, vars)?, star(b, vars)?),
        Formula::Not(a) => Formula::not(star(a, vars)?),
        Formula::Dep {
            determinants,
            determined,
        } => {
            let constant = Formula::and_all(determined.iter().map(|e| {
                let i = index(e).expect("variable of the formula");
                (0..i).fold(Formula::dep(vec![], vec![e.clone()]), |g, _| Formula::next(g))
            }))
            .expect("non-empty determined list");
            let parts = (0u32..1 << determinants.len()).map(|s| {
                let cond = determinants
                    .iter()
                    .enumerate()
                    .map(|(j, d)| lit(d, s >> j & 1 == 1));
                match Formula::and_all(cond) {
                    Some(c) => Formula::and(c, constant.clone()),
                    None => constant.clone(),
                }
            });
            Formula::split_all(parts).expect("at least one assignment")
        }
        Formula::Gen { .. } => return Err(Error::unsupported("generalised atoms in propositional reductions")),
        _ => return Err(Error::NonPropositional(phi.to_string())),
    })
}

/// `PL(~)` satisfiability to team model checking: `phi` is satisfiable iff
/// the team of `K_P` satisfies `(p | !p) | (~(p & !p) & phi*)` with `p` the
/// first variable.
pub fn reduce_plneg_sat_to_tmc(phi: &Formula) -> Result<(Kripke, Formula)> {
    let vars = pl_variables(phi)?;
    let p = vars[0].clone();
    let top = Formula::split(Formula::Lit(p.clone()), Formula::NegLit(p.clone()));
    let bottom = Formula::and(Formula::Lit(p.clone()), Formula::NegLit(p));
    let f = Formula::split(top, Formula::and(Formula::not(bottom), star(phi, &vars)?));
    Ok((layered_structure(&vars), f))
}

/// `PL(dep)` validity to team model checking: `phi` is valid iff the team
/// of `K_P` satisfies `phi*`.
pub fn reduce_pldep_val_to_tmc(phi: &Formula) -> Result<(Kripke, Formula)> {
    if phi.has_contradictory_neg() {
        return Err(Error::unsupported("validity reduction takes formulas without `~`"));
    }
    let vars = pl_variables(phi)?;
    let f = star(phi, &vars)?;
    Ok((layered_structure(&vars), f))
}

/// The constant trace of each assignment to `vars`, indexed by bitmask.
pub fn assignment_traces(vars: &[Prop]) -> Vec<UpTrace> {
    (0u32..1 << vars.len())
        .map(|s| {
            let letter: PropSet = vars
                .iter()
                .enumerate()
                .filter(|(j, _)| s >> j & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect();
            UpTrace::new(Vec::new(), vec![letter]).expect("non-empty loop")
        })
        .collect()
}

/// Decides propositional team satisfiability or validity by enumerating
/// teams of assignments.
pub fn pl_team_brute_force(phi: &Formula, mode: PlMode) -> Result<bool> {
    let vars = pl_variables(phi)?;
    if vars.len() > MAX_PL_VARS {
        return Err(Error::bound("variables for propositional brute force", MAX_PL_VARS as u64));
    }
    let all = assignment_traces(&vars);
    let reg = GenAtomRegistry::new();
    match mode {
        PlMode::Val => check_sync(&Team::new(all), phi, &reg),
        PlMode::Sat => {
            for mask in 1u32..1 << all.len() {
                let team = Team::new(
                    all.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, t)| t.clone()),
                );
                if check_sync(&team, phi, &reg)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::modelcheck::traces_team_finite;

    fn via_structure(k: &Kripke, f: &Formula) -> bool {
        let team = traces_team_finite(k).expect("finite team");
        check_sync(&team, f, &GenAtomRegistry::new()).unwrap()
    }

    #[test]
    fn structure_shape() {
        let vars = pl_variables(&parse_formula("p1 & p2").unwrap()).unwrap();
        let k = layered_structure(&vars);
        k.validate().unwrap();
        assert_eq!(k.names, ["r", "a1", "b1", "a2", "b2"]);
        assert_eq!(traces_team_finite(&k).unwrap().len(), 4);
        let one = layered_structure(&vars[..1]);
        assert_eq!(one.len(), 3);
    }

    #[test]
    fn brute_force_cases() {
        let f = |s: &str| parse_formula(s).unwrap();
        assert!(pl_team_brute_force(&f("p1 | !p1"), PlMode::Val).unwrap());
        assert!(pl_team_brute_force(&f("~(p1 & !p1)"), PlMode::Sat).unwrap());
        assert!(!pl_team_brute_force(&f("dep(;p1)"), PlMode::Val).unwrap());
        assert!(!pl_team_brute_force(&f("p1 & !p1"), PlMode::Sat).unwrap());
        assert!(matches!(pl_team_brute_force(&f("F p1"), PlMode::Sat), Err(Error::NonPropositional(_))));
    }

    #[test]
    fn pipelines_on_small_formulas() {
        for s in ["p1", "p1 & !p1", "~p1 & ~!p1", "~(p1 | p2)", "p1 | ~p2", "~dep(;p1)"] {
            let phi = parse_formula(s).unwrap();
            let (k, f) = reduce_plneg_sat_to_tmc(&phi).unwrap();
            assert_eq!(via_structure(&k, &f), pl_team_brute_force(&phi, PlMode::Sat).unwrap(), "{s}");
        }
        for s in ["dep(;p1)", "p1 | !p1", "dep(p1;p2) | p1", "dep(p1;p2)", "dep(p1;p2) & dep(p2;p1)", "dep(;p1) | dep(;p1)"] {
            let phi = parse_formula(s).unwrap();
            let (k, f) = reduce_pldep_val_to_tmc(&phi).unwrap();
            assert_eq!(via_structure(&k, &f), pl_team_brute_force(&phi, PlMode::Val).unwrap(), "{s}");
        }
    }
}
