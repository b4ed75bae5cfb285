use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::formula::parse_formula;
use crate::generate::{random_formula, random_team, FormulaConfig};
use crate::traces::UpTrace;

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn example_team() -> Team {
    Team::new([
        UpTrace::from_names(&[&["p"]], &[&[]]),
        UpTrace::from_names(&[&[], &["p"]], &[&[]]),
    ])
}

fn reg() -> GenAtomRegistry {
    GenAtomRegistry::new()
}

/// Literal synchronous semantics on explicit teams, splits over all covers,
/// temporal operators over `0..=prfx + lcm`.
fn naive_sync(team: &Team, g: &Formula, reg: &GenAtomRegistry) -> bool {
    let first = |t: &Team| t.traces().iter().map(|e| e.value_at(0).clone()).collect::<Vec<_>>();
    let range = team.prfx() + team.lcm(u64::MAX).unwrap() as usize;
    let at = |k: usize, h: &Formula| naive_sync(&team.suffix(k), h, reg);
    match g {
        Formula::Lit(p) => first(team).iter().all(|l| l.contains(p)),
        Formula::NegLit(p) => first(team).iter().all(|l| !l.contains(p)),
        Formula::And(a, b) => naive_sync(team, a, reg) && naive_sync(team, b, reg),
        Formula::Not(a) => !naive_sync(team, a, reg),
        Formula::Dep {
            determinants,
            determined,
        } => eval_dep_atom(&first(team), determinants, determined),
        Formula::Gen { name, args } => reg.get(name).unwrap().eval(args, &first(team)),
        Formula::Split(a, b) => {
            let n = team.len();
            (0u128..1 << n).any(|m1| {
                (0u128..1 << n).any(|m2| {
                    m1 | m2 == (1 << n) - 1
                        && naive_sync(&team.select(m1), a, reg)
                        && naive_sync(&team.select(m2), b, reg)
                })
            })
        }
        Formula::Next(a) => at(1, a),
        Formula::Eventually(a) => (0..=range).any(|k| at(k, a)),
        Formula::Globally(a) => (0..=range).all(|k| at(k, a)),
        Formula::Until(a, b) => (0..=range).any(|k| at(k, b) && (0..k).all(|j| at(j, a))),
        Formula::Release(a, b) => (0..=range).all(|k| at(k, b) || (0..k).any(|j| at(j, a))),
    }
}

/// Every vector `k` with `k[i] < bounds[i]`.
fn grid(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn shifted(traces: &[UpTrace], k: &[usize]) -> Team {
    Team::new(traces.iter().zip(k).map(|(t, &j)| t.suffix(j)))
}

/// Asynchronous semantics on explicit teams, with shifts up to twice the
/// encoding length so the engine's tighter grid is checked as well.
fn naive_async(team: &Team, g: &Formula, reg: &GenAtomRegistry) -> bool {
    let ts = team.traces();
    let bounds: Vec<usize> = ts.iter().map(|t| 2 * t.len()).collect();
    let sat = |t: &Team, h: &Formula| naive_async(t, h, reg);
    match g {
        Formula::Eventually(a) => grid(&bounds).iter().any(|k| sat(&shifted(ts, k), a)),
        Formula::Globally(a) => grid(&bounds).iter().all(|k| sat(&shifted(ts, k), a)),
        Formula::Until(a, b) => grid(&bounds).iter().any(|k| {
            let d: Vec<usize> = (0..ts.len()).filter(|&i| k[i] > 0).collect();
            let dt: Vec<UpTrace> = d.iter().map(|&i| ts[i].clone()).collect();
            let dk: Vec<usize> = d.iter().map(|&i| k[i]).collect();
            sat(&shifted(ts, k), b) && grid(&dk).iter().all(|k2| sat(&shifted(&dt, k2), a))
        }),
        Formula::Release(a, b) => grid(&bounds).iter().all(|k| {
            if sat(&shifted(ts, k), b) {
                return true;
            }
            let pos: Vec<usize> = (0..ts.len()).filter(|&i| k[i] > 0).collect();
            (1u32..1 << pos.len()).any(|sel| {
                let d: Vec<usize> = (0..pos.len()).filter(|j| sel >> j & 1 == 1).map(|j| pos[j]).collect();
                let rest: Vec<usize> = (0..ts.len()).filter(|i| !d.contains(i)).collect();
                let rest_team = Team::new(rest.iter().map(|&i| ts[i].suffix(k[i])));
                let dt: Vec<UpTrace> = d.iter().map(|&i| ts[i].clone()).collect();
                let dk: Vec<usize> = d.iter().map(|&i| k[i]).collect();
                sat(&rest_team, b) && grid(&dk).iter().any(|k2| sat(&shifted(&dt, k2), a))
            })
        }),
        Formula::Next(a) => sat(&team.suffix(1), a),
        Formula::And(a, b) => sat(team, a) && sat(team, b),
        Formula::Not(a) => !sat(team, a),
        Formula::Split(a, b) => {
            let n = team.len();
            (0u128..1 << n).any(|m1| {
                (0u128..1 << n).any(|m2| m1 | m2 == (1 << n) - 1 && sat(&team.select(m1), a) && sat(&team.select(m2), b))
            })
        }
        atom => naive_sync(team, atom, reg),
    }
}

#[test]
fn example_one() {
    let t = example_team();
    let r = reg();
    assert!(!check_sync(&t, &f("F p"), &r).unwrap());
    assert!(check_sync(&t, &f("F p | F p"), &r).unwrap());
    assert!(check_async(&t, &f("F p"), &r).unwrap());
    assert!(check_async(&t, &f("F p | F p"), &r).unwrap());
    assert!(check_async_general(&t, &f("F p"), &r, &Budget::default()).unwrap());
    assert!(!check_async(&t, &f("dep(;p)"), &r).unwrap());
}

#[test]
fn empty_team() {
    let r = reg();
    for s in ["p & !p", "F p", "G (p & !p)", "dep(;p)", "X p U q", "p | q"] {
        assert!(check_sync(&Team::empty(), &f(s), &r).unwrap(), "{s}");
        assert!(check_async(&Team::empty(), &f(s), &r).unwrap(), "{s}");
    }
    assert!(!check_sync(&Team::empty(), &f("~(p & !p)"), &r).unwrap());
    assert!(!check_async(&Team::empty(), &f("~(p & !p)"), &r).unwrap());
}

#[test]
fn sync_is_not_union_closed() {
    let r = reg();
    let a = Team::new([UpTrace::from_names(&[&["p"]], &[&[]])]);
    let b = Team::new([UpTrace::from_names(&[&[], &["p"]], &[&[]])]);
    assert!(check_sync(&a, &f("F p"), &r).unwrap());
    assert!(check_sync(&b, &f("F p"), &r).unwrap());
    assert!(!check_sync(&a.union(&b), &f("F p"), &r).unwrap());
}

#[test]
fn overlapping_splits_matter_under_negation() {
    let r = reg();
    let single = Team::new([UpTrace::from_names(&[], &[&["p"]])]);
    let g = f("~(p & !p) | ~(p & !p)");
    let all = check_sync_with(&single, &g, &r, &Budget::default(), SyncStrategy::Enumerate(SplitMode::AllCovers));
    let disjoint = check_sync_with(&single, &g, &r, &Budget::default(), SyncStrategy::Enumerate(SplitMode::DisjointOnly));
    assert!(all.unwrap());
    assert!(!disjoint.unwrap());
    assert!(check_sync(&single, &g, &r).unwrap());
    assert!(matches!(
        check_sync_with(&single, &g, &r, &Budget::default(), SyncStrategy::Antichain),
        Err(Error::UnsupportedFragment(_))
    ));
}

#[test]
fn generalised_atoms() {
    let mut r = reg();
    register_gen_atom(
        &mut r,
        GenAtomDef::new("constant", Arity::Exact(1), true, |_, ls| ls.windows(2).all(|w| w[0] == w[1])),
    )
    .unwrap();
    assert!(matches!(check_sync(&example_team(), &f("@foo(p)"), &r), Err(Error::UnknownAtom(_))));
    assert!(matches!(check_sync(&example_team(), &f("@constant(p, q)"), &r), Err(Error::AtomArity { .. })));
    let mut rng = StdRng::seed_from_u64(7);
    let props = [Prop::new("p").unwrap(), Prop::new("q").unwrap()];
    for _ in 0..100 {
        let team = random_team(&mut rng, &props, 4, 2, 2);
        for (atom, dep) in [("@constant(p)", "dep(;p)"), ("X @constant(q) | F @constant(p)", "X dep(;q) | F dep(;p)")] {
            let want = check_sync(&team, &f(dep), &r).unwrap();
            assert_eq!(check_sync(&team, &f(atom), &r).unwrap(), want, "{atom} on {team:?}");
            assert_eq!(naive_sync(&team, &f(atom), &r), want);
            let want = check_async(&team, &f(dep), &r).unwrap();
            assert_eq!(check_async(&team, &f(atom), &r).unwrap(), want, "{atom} on {team:?}");
        }
    }
}

#[test]
fn non_downward_closed_atom_uses_all_covers() {
    let mut r = reg();
    // At least two distinct first letters: not downward closed.
    r.register(GenAtomDef::new("varied", Arity::Variadic, false, |_, ls| {
        ls.iter().any(|l| *l != ls[0])
    }))
    .unwrap();
    let team = Team::new([
        UpTrace::from_names(&[], &[&["p"]]),
        UpTrace::from_names(&[], &[&[]]),
        UpTrace::from_names(&[&["q"]], &[&["p"]]),
    ]);
    let g = f("@varied(p) | @varied(p)");
    assert_eq!(check_sync(&team, &g, &r).unwrap(), naive_sync(&team, &g, &r));
    assert!(check_sync(&team, &g, &r).unwrap());
}

#[test]
fn budgets_are_errors() {
    let r = reg();
    let team = Team::new([UpTrace::from_names(&[], &[&["p"], &[], &[]]), UpTrace::from_names(&[], &[&["p"], &[]])]);
    let tight = Budget {
        max_lcm: 5,
        ..Budget::default()
    };
    assert!(matches!(
        check_sync_with(&team, &f("F p"), &r, &tight, SyncStrategy::Auto),
        Err(Error::BoundExceeded { .. })
    ));
    let tiny_grid = Budget {
        max_grid: 3,
        ..Budget::default()
    };
    assert!(matches!(
        check_async_general(&team, &f("F dep(;p)"), &r, &tiny_grid),
        Err(Error::VectorSpaceExceeded { .. })
    ));
}

fn random_case(rng: &mut StdRng, neg: bool, dep: bool, max_len: usize) -> Formula {
    let mut cfg = FormulaConfig::pure_ltl(&["p", "q"], rng.gen_range(0..=max_len));
    cfg.contradictory_neg = neg;
    cfg.dep = dep;
    random_formula(rng, &cfg)
}

#[test]
fn sync_strategies_match_literal_semantics() {
    let r = reg();
    let mut rng = StdRng::seed_from_u64(11);
    let props = [Prop::new("p").unwrap(), Prop::new("q").unwrap()];
    for i in 0..400 {
        let team = random_team(&mut rng, &props, 3, 2, 3);
        let g = random_case(&mut rng, i % 3 == 0, i % 2 == 0, 5);
        let want = naive_sync(&team, &g, &r);
        let b = Budget::default();
        let dc = fragment_info(&g, &r).unwrap().downward_closed_syntactic;
        let mut strategies = vec![SyncStrategy::Auto, SyncStrategy::Enumerate(SplitMode::AllCovers)];
        if dc {
            strategies.extend([SyncStrategy::Antichain, SyncStrategy::Enumerate(SplitMode::DisjointOnly)]);
        }
        for s in strategies {
            assert_eq!(check_sync_with(&team, &g, &r, &b, s).unwrap(), want, "{g} on {team:?} with {s:?}");
        }
    }
}

#[test]
fn async_engine_matches_literal_semantics() {
    let r = reg();
    let mut rng = StdRng::seed_from_u64(12);
    let props = [Prop::new("p").unwrap(), Prop::new("q").unwrap()];
    for i in 0..300 {
        let team = random_team(&mut rng, &props, 3, 1, 2);
        let g = random_case(&mut rng, i % 3 == 0, i % 2 == 0, 4);
        let want = naive_async(&team, &g, &r);
        let got = check_async_general(&team, &g, &r, &Budget::default()).unwrap();
        assert_eq!(got, want, "{g} on {team:?}");
        if g.is_pure_ltl() {
            assert_eq!(check_async(&team, &g, &r).unwrap(), want, "flatness: {g} on {team:?}");
        }
    }
}

#[test]
fn antichains_scale_to_wide_teams() {
    let r = reg();
    // 40 constant traces, each split into its own part by value of p0..p5.
    let props: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
    let traces = (0u32..40).map(|m| {
        let letter: Vec<&str> = (0..6).filter(|j| m >> j & 1 == 1).map(|j| props[j].as_str()).collect();
        UpTrace::from_names(&[], &[&letter])
    });
    let team = Team::new(traces);
    let g = f("dep(p0, p1, p2; p3) | dep(p0, p1, p2; p3) | F dep(p0, p1, p2, p4; p5)");
    assert!(check_sync(&team, &g, &r).unwrap());
    let g = f("(p0 & p1) | (!p0 & p2) | G dep(;p5)");
    assert!(!check_sync(&team, &g, &r).unwrap());
}

#[test]
fn dependence_qbf_reduction_rejects_a_valid_forall_exists_instance() {
    use crate::reductions::{parse_qbf, qbf_brute_force, reduce_qbf_async_dep};
    // Valid, yet the x2 gadget traces carry neither q1 nor s1, so no split
    // of the team satisfies the body of the G for x1 at shift 0.
    let q = parse_qbf("prefix: A x1 E x2\nclause: x2 -x1 x1\n").unwrap();
    assert!(qbf_brute_force(&q).unwrap());
    let (team, g) = reduce_qbf_async_dep(&q);
    let r = reg();
    assert!(!check_async(&team, &g, &r).unwrap());
    assert!(!naive_async(&team, &g, &r));
}
