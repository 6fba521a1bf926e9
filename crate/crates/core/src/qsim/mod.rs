//! Amplitude-level simulation of quantum search, restricted to the
//! two-dimensional subspace spanned by the uniform superpositions over
//! marked and unmarked items.

mod amplify;
mod grover;
mod recursion;

pub use amplify::{amplify_bound, amplify_exact, max_bound_rounds, AmplifySchedule};
pub use grover::{
    bbht_search, exact_grover, grover_success_prob, BbhtRun, GroverPlan, GroverRun,
    SearchPredicate, BBHT_CUTOFF, BBHT_GROWTH,
};
pub use recursion::{
    recursive_amplified_run, Divider, Executions, IntervalDivider, IntervalVerifier, LevelRecord,
    OuterWrap, RecursionCostModel, RecursionParams, RunOptions, RunOutcome, Verifier,
};
