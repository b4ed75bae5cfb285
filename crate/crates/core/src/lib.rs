//! LTL under team semantics.
//!
//! A team is a set of traces and a formula is evaluated on the whole set.
//! Synchronous semantics advance one index across every trace; asynchronous
//! semantics advance each trace independently. The crate covers path
//! checking of finite teams of ultimately periodic traces, model checking of
//! Kripke structures, satisfiability with lasso witnesses, dependence atoms,
//! generalised atoms, contradictory negation, HyperLTL translations, and
//! reductions from QBF and propositional team logics.

pub mod classical;
pub mod cli;
pub mod error;
pub mod formula;
pub mod generate;
pub mod hyper;
pub mod modelcheck;
pub mod reductions;
pub mod teamcheck;
pub mod traces;

pub use error::{Error, Result};
pub use formula::{parse_formula, render_formula, Formula, Prop};
pub use traces::{parse_team, serialize_team, Team, UpTrace};

/// Which team semantics interprets the temporal operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semantics {
    Sync,
    Async,
}
