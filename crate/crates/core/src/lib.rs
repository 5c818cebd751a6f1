//! Airport gate assignment.
//!
//! Flights are assigned to gates so that no two flights sharing a gate have
//! intersecting buffer-locked occupation windows. Among conflict-free
//! assignments the engines minimize an expected-conflict objective over
//! consecutive same-gate pairs.
//!
//! - [`schedule`]: flights, timetable CSV, synthetic generation, sweep-line
//!   gate lower bound.
//! - [`objective`]: feasibility checks and cost evaluation.
//! - [`solver`]: brute-force, branch-and-bound, greedy and local-search
//!   engines plus the gate-count sweep.
//! - [`cli`]: the `gateassign` command-line front end.

pub mod cli;
pub mod objective;
pub mod schedule;
pub mod solver;

pub use objective::{
    conflict_count, evaluate, expected_conflict_probability, is_feasible, same_gate_pairs,
    total_cost, Assignment, CostReport, CostTerm, Feasibility, ObjectiveError, ObjectiveMode,
    Violation,
};
pub use schedule::{
    generate_schedule, locked_interval, min_gates_required, overlaps, parse_schedule,
    scatter_export, Flight, LockedInterval, Minutes, Schedule, ScheduleError,
};
pub use solver::{
    improve_local_search, solve, solve_bruteforce, solve_exact, solve_greedy, sweep_gates, Engine,
    SolveConfig, SolveError, SolveOutcome, SolveStatus, SweepRow,
};
