//! Core stability, committee monotonicity, and benchmark-ratio reports.

mod core;
mod monotone;
mod report;
mod suites;

pub use self::core::{core_blocking, min_core_alpha, supporter_weights, verify_core_score_bound, Blocking, CoreReport};
pub use monotone::{
    check_monotone_chain, eval_monotonicity_bound, find_banzhaf_witness, Branch, MonotoneChain, Witness,
};
pub use report::{report, run_rule, Outcome, Rule, RuleRow, RunOptions, RunReport};
pub use suites::{run_suite, Check, Suite, SuiteReport};
