//! Election control under Bucklin and fallback voting: winner rules,
//! control problems, a pruned depth-first solver, a brute-force oracle,
//! random instance generators and an experiment harness.

pub mod control;
pub mod election;
pub mod error;
pub mod experiment;
pub mod format;
pub mod generate;
pub mod oracle;
pub mod solver;

pub use control::{
    final_winners, goal_satisfied, ControlAction, ControlInstance, ControlType, Direction, Family, Outcome, TieRule,
    Verdict,
};
pub use election::{majority_threshold, Ballot, CandidateId, CandidateSet, Election, Rule, WinnerSet};
pub use error::{Error, Result};
pub use generate::{gen_election, gen_instance, gen_instance_with, CandidatePick, DistModel, TrialSeed};
pub use oracle::{brute_force, OracleVerdict};
pub use solver::{solve, solve_with, Deadline, SolverOptions};
