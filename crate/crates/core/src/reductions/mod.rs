//! Hardness reductions as instance generators, with brute-force oracles
//! for the source problems.

mod pl;
mod qbf;

pub use pl::{
    assignment_traces, layered_structure, pl_team_brute_force, pl_variables, reduce_pldep_val_to_tmc,
    reduce_plneg_sat_to_tmc, star, PlMode, MAX_PL_VARS,
};
pub use qbf::{
    gadget_dep, gadget_literal, gadget_universal, gadget_value, parse_qbf, qbf_brute_force, reduce_qbf_async_dep,
    reduce_qbf_sync, Literal, QbfInstance, Quantifier, MAX_BRUTE_FORCE_VARS,
};
