//! Property tests across modules. Oracles are either a second engine or a
//! direct reading of the definitions.

use proptest::prelude::*;

use teamltl::classical::{check_trace, classical_mc, classical_sat};
use teamltl::formula::{dualize, formula_length, parse_formula, Formula, Prop};
use teamltl::hyper::{check_hyper, forall_hyper_to_ltl, ltl_to_forall_hyper, parse_hyper};
use teamltl::modelcheck::{
    parse_kripke, serialize_kripke, tmc_sync_splitfree, tmc_sync_splitfree_onthefly, traces_team_finite, Kripke,
};
use teamltl::reductions::{parse_qbf, Literal, QbfInstance, Quantifier};
use teamltl::teamcheck::{check_async, check_async_general, check_sync, Budget, GenAtomRegistry};
use teamltl::traces::{parse_team, serialize_team, PropSet, Team, UpTrace};

fn prop_name() -> impl Strategy<Value = Prop> {
    prop_oneof![Just("p"), Just("q"), Just("r")].prop_map(|s| Prop::new(s).unwrap())
}

fn letter() -> impl Strategy<Value = PropSet> {
    prop::collection::btree_set(prop_name(), 0..3)
}

fn trace() -> impl Strategy<Value = UpTrace> {
    (prop::collection::vec(letter(), 0..3), prop::collection::vec(letter(), 1..4))
        .prop_map(|(p, c)| UpTrace::new(p, c).unwrap())
}

fn team(max: usize) -> impl Strategy<Value = Team> {
    prop::collection::vec(trace(), 0..=max).prop_map(Team::new)
}

#[derive(Clone, Copy)]
struct Fragment {
    split: bool,
    tilde: bool,
    dep: bool,
}

const PURE: Fragment = Fragment {
    split: true,
    tilde: false,
    dep: false,
};

fn formula(frag: Fragment) -> impl Strategy<Value = Formula> {
    let lit = prop_oneof![
        prop_name().prop_map(Formula::Lit),
        prop_name().prop_map(Formula::NegLit),
    ];
    let leaf = if frag.dep {
        prop_oneof![
            3 => lit,
            1 => (prop::collection::vec(prop_name(), 0..2), prop_name())
                .prop_map(|(d, e)| Formula::dep(d, vec![e])),
        ]
        .boxed()
    } else {
        lit.boxed()
    };
    leaf.prop_recursive(4, 16, 2, move |inner| {
        let mut arms = vec![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
            inner.clone().prop_map(Formula::next).boxed(),
            inner.clone().prop_map(Formula::eventually).boxed(),
            inner.clone().prop_map(Formula::globally).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::release(a, b)).boxed(),
        ];
        if frag.split {
            arms.push((inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::split(a, b)).boxed());
        }
        if frag.tilde {
            arms.push(inner.clone().prop_map(Formula::not).boxed());
        }
        prop::strategy::Union::new(arms)
    })
}

/// A structure whose team of traces is finite: branching only below `cut`,
/// towards larger indices.
fn finite_kripke() -> impl Strategy<Value = Kripke> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                Just(n),
                0..n,
                prop::collection::vec(letter(), n),
                prop::collection::vec(prop::collection::vec(any::<prop::sample::Index>(), 1..3), n),
            )
        })
        .prop_map(|(n, cut, labels, picks)| {
            let succ = picks
                .iter()
                .enumerate()
                .map(|(w, ix)| {
                    let mut s: Vec<usize> = if w < cut {
                        ix.iter().map(|i| w + 1 + i.index(n - w - 1)).collect()
                    } else {
                        vec![cut + ix[0].index(n - cut)]
                    };
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect();
            Kripke {
                names: (0..n).map(|i| format!("w{i}")).collect(),
                labels,
                succ,
                init: 0,
            }
        })
}

fn word(t: &UpTrace, n: usize) -> Vec<PropSet> {
    (0..n).map(|i| t.value_at(i).clone()).collect()
}

fn subsets(t: &Team) -> impl Iterator<Item = Team> + '_ {
    (0u128..1 << t.len()).map(|m| t.select(m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn formulas_print_and_parse_back(f in formula(Fragment { split: true, tilde: true, dep: true })) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn dualize_is_classical_negation(f in formula(PURE), t in trace()) {
        let g = dualize(&f).unwrap();
        prop_assert_eq!(dualize(&g).unwrap(), f.clone());
        prop_assert_eq!(formula_length(&g), formula_length(&f));
        prop_assert_ne!(check_trace(&t, &f).unwrap(), check_trace(&t, &g).unwrap());
    }

    #[test]
    fn canonical_form_keeps_the_word(t in trace()) {
        let c = t.canonicalize();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert!(c.len() <= t.len());
        prop_assert_eq!(word(&c, 24), word(&t, 24));
    }

    #[test]
    fn suffixes_shift_the_word(t in trace(), i in 0usize..8, j in 0usize..8) {
        let s = t.suffix(i);
        prop_assert_eq!(word(&s, 12), (i..i + 12).map(|k| t.value_at(k).clone()).collect::<Vec<_>>());
        prop_assert_eq!(s.suffix(j).canonicalize(), t.suffix(i + j).canonicalize());
    }

    #[test]
    fn team_files_round_trip(t in team(5)) {
        prop_assert_eq!(parse_team(&serialize_team(&t)).unwrap(), t);
    }

    #[test]
    fn team_suffixes_repeat_after_the_prefix(t in team(4), extra in 0usize..4) {
        let lcm = t.lcm(1000).unwrap() as usize;
        let i = t.prfx() + extra;
        prop_assert_eq!(t.suffix(i), t.suffix(i + lcm));
    }

    #[test]
    fn sat_witnesses_satisfy_and_unsat_has_no_model(f in formula(PURE), ts in prop::collection::vec(trace(), 8)) {
        match classical_sat(&f).unwrap() {
            Some(w) => prop_assert!(check_trace(&w, &f).unwrap()),
            None => {
                for t in &ts {
                    prop_assert!(!check_trace(t, &f).unwrap());
                }
            }
        }
    }

    #[test]
    fn model_checking_matches_trace_enumeration(k in finite_kripke(), f in formula(PURE)) {
        let team = traces_team_finite(&k).expect("finite by construction");
        let all = team.traces().iter().all(|t| check_trace(t, &f).unwrap());
        let r = classical_mc(&k, &f).unwrap();
        prop_assert_eq!(r.holds, all);
        if let Some(cx) = r.counterexample {
            let t = UpTrace::new(cx.stem, cx.cycle).unwrap();
            prop_assert!(!check_trace(&t, &f).unwrap());
            prop_assert!(team.traces().contains(&t.canonicalize()));
        }
    }

    #[test]
    fn sync_model_checking_engines_agree(k in finite_kripke(), f in formula(Fragment { split: false, tilde: false, dep: false })) {
        let team = traces_team_finite(&k).expect("finite by construction");
        let reg = GenAtomRegistry::new();
        let expected = check_sync(&team, &f, &reg).unwrap();
        prop_assert_eq!(tmc_sync_splitfree(&k, &f).unwrap(), expected);
        prop_assert_eq!(tmc_sync_splitfree_onthefly(&k, &f).unwrap(), expected);
    }

    #[test]
    fn kripke_files_round_trip(k in finite_kripke()) {
        let back = parse_kripke(&serialize_kripke(&k)).unwrap();
        prop_assert_eq!(serialize_kripke(&back), serialize_kripke(&k));
        prop_assert_eq!(traces_team_finite(&back), traces_team_finite(&k));
    }

    #[test]
    fn downward_closure_with_dependence(f in formula(Fragment { split: true, tilde: false, dep: true }), t in team(3)) {
        let reg = GenAtomRegistry::new();
        if check_sync(&t, &f, &reg).unwrap() {
            for s in subsets(&t) {
                prop_assert!(check_sync(&s, &f, &reg).unwrap(), "sync {} on {:?}", f, s);
            }
        }
        let budget = Budget::default();
        if check_async_general(&t, &f, &reg, &budget).unwrap() {
            for s in subsets(&t) {
                prop_assert!(check_async_general(&s, &f, &reg, &budget).unwrap(), "async {} on {:?}", f, s);
            }
        }
    }

    #[test]
    fn hyper_translation_round_trips(f in formula(PURE), t in team(4)) {
        let h = ltl_to_forall_hyper(&f).unwrap();
        prop_assert_eq!(parse_hyper(&h.to_string()).unwrap(), h.clone());
        prop_assert_eq!(forall_hyper_to_ltl(&h).unwrap(), f.clone());
        prop_assert_eq!(check_hyper(&t, &h).unwrap(), check_async(&t, &f, &GenAtomRegistry::new()).unwrap());
    }

    #[test]
    fn qbf_files_round_trip(
        prefix in prop::collection::vec(any::<bool>(), 1..5),
        raw in prop::collection::vec(prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 3), 2..5),
    ) {
        let n = prefix.len();
        let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let prefix: Vec<(Quantifier, String)> = prefix
            .iter()
            .zip(&vars)
            .map(|(&e, v)| (if e { Quantifier::Exists } else { Quantifier::Forall }, v.clone()))
            .collect();
        let clauses: Vec<[Literal; 3]> = raw
            .iter()
            .map(|c| {
                [0, 1, 2].map(|k| Literal { var: vars[c[k].0.index(n)].clone(), positive: c[k].1 })
            })
            .collect();
        if let Ok(q) = QbfInstance::new(prefix, clauses) {
            prop_assert_eq!(parse_qbf(&q.to_string()).unwrap(), q);
        }
    }
}
