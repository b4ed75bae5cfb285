use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::Prop;
use crate::traces::PropSet;

pub type AtomPredicate = dyn Fn(&[Prop], &[PropSet]) -> bool + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Exact(usize),
    Variadic,
}

/// A team atom evaluated on the first letters of the team's traces.
///
/// The predicate receives the atom's arguments and one letter per trace,
/// restricted to the arguments. `downward_closed` is the registrant's promise
/// that every subteam of a satisfying team satisfies the atom too.
#[derive(Clone)]
pub struct GenAtomDef {
    pub name: String,
    pub arity: Arity,
    pub predicate: Arc<AtomPredicate>,
    pub downward_closed: bool,
}

impl fmt::Debug for GenAtomDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenAtomDef")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("downward_closed", &self.downward_closed)
            .finish_non_exhaustive()
    }
}

impl GenAtomDef {
    pub fn new(
        name: &str,
        arity: Arity,
        downward_closed: bool,
        predicate: impl Fn(&[Prop], &[PropSet]) -> bool + Send + Sync + 'static,
    ) -> Self {
        GenAtomDef {
            name: name.to_string(),
            arity,
            predicate: Arc::new(predicate),
            downward_closed,
        }
    }

    pub fn check_arity(&self, got: usize) -> Result<()> {
        match self.arity {
            Arity::Exact(n) if n != got => Err(Error::AtomArity {
                name: self.name.clone(),
                expected: n,
                got,
            }),
            _ => Ok(()),
        }
    }

    pub fn eval<'a>(&self, args: &[Prop], letters: impl IntoIterator<Item = &'a PropSet>) -> bool {
        let restricted: Vec<PropSet> = letters
            .into_iter()
            .map(|l| args.iter().filter(|p| l.contains(*p)).cloned().collect())
            .collect();
        (self.predicate)(args, &restricted)
    }

    /// Whether every one-trace team satisfies the atom.
    pub fn holds_on_all_singletons(&self, args: &[Prop]) -> bool {
        let distinct: Vec<&Prop> = {
            let mut v: Vec<&Prop> = args.iter().collect();
            v.sort();
            v.dedup();
            v
        };
        if distinct.len() > 16 {
            return false;
        }
        (0u32..1 << distinct.len()).all(|bits| {
            let letter: PropSet = distinct
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, p)| (*p).clone())
                .collect();
            self.eval(args, [&letter])
        })
    }
}

/// Named generalised atoms, immutable once evaluation starts.
#[derive(Clone, Debug, Default)]
pub struct GenAtomRegistry {
    defs: BTreeMap<String, GenAtomDef>,
}

impl GenAtomRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, def: GenAtomDef) -> Result<()> {
        if self.defs.contains_key(&def.name) {
            return Err(Error::DuplicateName(def.name));
        }
        self.defs.insert(def.name.clone(), def);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&GenAtomDef> {
        self.defs.get(name)
    }
}

pub fn register_gen_atom(registry: &mut GenAtomRegistry, def: GenAtomDef) -> Result<()> {
    registry.register(def)
}

/// `dep(determinants; determined)`: letters agreeing on every determinant
/// agree on every determined proposition.
pub fn eval_dep_atom<'a>(
    first_letters: impl IntoIterator<Item = &'a PropSet>,
    determinants: &[Prop],
    determined: &[Prop],
) -> bool {
    let mut seen: HashMap<Vec<bool>, Vec<bool>> = HashMap::new();
    for l in first_letters {
        let key: Vec<bool> = determinants.iter().map(|p| l.contains(p)).collect();
        let val: Vec<bool> = determined.iter().map(|p| l.contains(p)).collect();
        match seen.get(&key) {
            Some(v) if *v != val => return false,
            Some(_) => {}
            None => {
                seen.insert(key, val);
            }
        }
    }
    true
}
