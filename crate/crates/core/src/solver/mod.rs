//! Optimization engines for the gate assignment model.
//!
//! All engines work on flights in chronological order (arrival, departure,
//! id). On a feasible gate the flights are pairwise disjoint, so a new flight
//! only needs checking against the latest flight already on that gate.

mod bruteforce;
mod exact;
mod greedy;
mod local;
mod matching;
mod sweep;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::objective::{Assignment, CostReport, ObjectiveError, ObjectiveMode, Violation};
use crate::schedule::{Flight, Minutes, Schedule};

pub use bruteforce::{solve_bruteforce, BRUTEFORCE_MAX_FLIGHTS};
pub use exact::solve_exact;
pub use greedy::solve_greedy;
pub use local::improve_local_search;
pub use sweep::{sweep_gates, sweep_to_csv, SweepRow};

/// Default buffer in minutes.
pub const DEFAULT_BUFFER: Minutes = 15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("instance too large for enumeration: {flights} flights (limit {limit})")]
    TooLarge { flights: usize, limit: usize },
    #[error("start assignment is infeasible: {0}")]
    InfeasibleStart(Violation),
    #[error("start assignment violates gate preferences for flight {0}")]
    PreferenceViolated(String),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub gate_count: usize,
    pub buffer: Minutes,
    pub mode: ObjectiveMode,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// Flight id -> gate the flight must use.
    pub preassigned: BTreeMap<String, usize>,
    /// Flight id -> gates the flight may not use.
    pub forbidden: BTreeMap<String, BTreeSet<usize>>,
}

impl SolveConfig {
    pub fn new(gate_count: usize) -> Self {
        Self {
            gate_count,
            buffer: DEFAULT_BUFFER,
            mode: ObjectiveMode::AdjacentExpected,
            time_limit: None,
            seed: 0,
            preassigned: BTreeMap::new(),
            forbidden: BTreeMap::new(),
        }
    }

    pub fn with_buffer(mut self, buffer: Minutes) -> Self {
        self.buffer = buffer;
        self
    }

    pub fn with_mode(mut self, mode: ObjectiveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn require_gate(mut self, flight: impl Into<String>, gate: usize) -> Self {
        self.preassigned.insert(flight.into(), gate);
        self
    }

    pub fn forbid_gate(mut self, flight: impl Into<String>, gate: usize) -> Self {
        self.forbidden
            .entry(flight.into())
            .or_default()
            .insert(gate);
        self
    }

    fn has_preferences(&self) -> bool {
        !self.preassigned.is_empty() || self.forbidden.values().any(|s| !s.is_empty())
    }

    /// Checks the config on its own and against `schedule`.
    pub fn validate(&self, schedule: &Schedule) -> Result<(), SolveError> {
        let invalid = |m: String| Err(SolveError::InvalidConfig(m));
        if self.gate_count == 0 {
            return invalid("gate count must be positive".into());
        }
        if self.buffer < 0 {
            return invalid(format!("buffer must be non-negative, got {}", self.buffer));
        }
        for (id, &gate) in &self.preassigned {
            if schedule.index_of(id).is_none() {
                return invalid(format!("preassigned flight {id} is not in the schedule"));
            }
            if gate >= self.gate_count {
                return invalid(format!("preassigned gate {gate} for {id} out of range"));
            }
            if self.forbidden.get(id).is_some_and(|s| s.contains(&gate)) {
                return invalid(format!(
                    "flight {id} both required on and forbidden from gate {gate}"
                ));
            }
        }
        for (id, gates) in &self.forbidden {
            if schedule.index_of(id).is_none() {
                return invalid(format!("forbidden-gate flight {id} is not in the schedule"));
            }
            if let Some(&g) = gates.iter().find(|&&g| g >= self.gate_count) {
                return invalid(format!("forbidden gate {g} for {id} out of range"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolveStatus {
    /// Proven optimal.
    Optimal,
    /// Feasible, no optimality claim (heuristic or time-limited).
    Feasible,
    /// No feasible assignment exists, or the heuristic found none.
    Infeasible,
    /// Time limit reached before any feasible assignment was found.
    Unknown,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Feasible => "FEASIBLE",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unknown => "UNKNOWN",
        }
    }

    #[inline]
    pub fn has_solution(&self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub assignment: Option<Assignment>,
    pub report: Option<CostReport>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
    pub gate_count: usize,
    pub buffer: Minutes,
}

#[derive(Serialize)]
struct OutcomeJson<'a> {
    status: SolveStatus,
    gates: usize,
    buffer: Minutes,
    objective: Option<f64>,
    assignment: Vec<AssignmentEntry<'a>>,
    nodes: u64,
    elapsed_s: f64,
}

#[derive(Serialize)]
struct AssignmentEntry<'a> {
    flight: &'a str,
    gate: usize,
}

impl SolveOutcome {
    pub fn objective(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.total)
    }

    /// JSON rendering. `elapsed_s` is rounded to milliseconds, or zeroed
    /// when `timing` is false so repeated runs are byte-identical.
    pub fn to_json(&self, schedule: &Schedule, timing: bool) -> String {
        let assignment = self
            .assignment
            .as_ref()
            .map(|a| {
                schedule
                    .flights()
                    .iter()
                    .zip(a.gates())
                    .map(|(f, &gate)| AssignmentEntry {
                        flight: f.id(),
                        gate,
                    })
                    .collect()
            })
            .unwrap_or_default();
        let doc = OutcomeJson {
            status: self.status,
            gates: self.gate_count,
            buffer: self.buffer,
            objective: self.objective(),
            assignment,
            nodes: self.nodes_explored,
            elapsed_s: if timing { round_ms(self.elapsed) } else { 0.0 },
        };
        serde_json::to_string_pretty(&doc).expect("outcome serializes")
    }

    fn without_solution(
        status: SolveStatus,
        cfg: &SolveConfig,
        nodes: u64,
        started: Instant,
    ) -> Self {
        Self {
            status,
            assignment: None,
            report: None,
            nodes_explored: nodes,
            elapsed: started.elapsed(),
            gate_count: cfg.gate_count,
            buffer: cfg.buffer,
        }
    }

    fn with_solution(
        status: SolveStatus,
        schedule: &Schedule,
        cfg: &SolveConfig,
        assignment: Assignment,
        nodes: u64,
        started: Instant,
    ) -> Result<Self, SolveError> {
        let report = crate::objective::total_cost(schedule, &assignment, cfg.buffer, cfg.mode)?;
        Ok(Self {
            status,
            assignment: Some(assignment),
            report: Some(report),
            nodes_explored: nodes,
            elapsed: started.elapsed(),
            gate_count: cfg.gate_count,
            buffer: cfg.buffer,
        })
    }
}

pub(crate) fn round_ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1000.0).round() / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    #[default]
    Exact,
    Greedy,
    GreedyLocal,
    Brute,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Exact => "exact",
            Engine::Greedy => "greedy",
            Engine::GreedyLocal => "greedy+local",
            Engine::Brute => "brute",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Engine::Exact),
            "greedy" => Ok(Engine::Greedy),
            "greedy+local" => Ok(Engine::GreedyLocal),
            "brute" => Ok(Engine::Brute),
            other => Err(format!("unknown engine {other:?}")),
        }
    }
}

/// Runs `engine` on `schedule`.
pub fn solve(
    schedule: &Schedule,
    cfg: &SolveConfig,
    engine: Engine,
) -> Result<SolveOutcome, SolveError> {
    match engine {
        Engine::Exact => solve_exact(schedule, cfg),
        Engine::Brute => solve_bruteforce(schedule, cfg),
        Engine::Greedy => solve_greedy(schedule, cfg),
        Engine::GreedyLocal => {
            let started = Instant::now();
            let greedy = solve_greedy(schedule, cfg)?;
            match greedy.assignment {
                Some(start) => {
                    let mut out = improve_local_search(schedule, &start, cfg)?;
                    out.nodes_explored += greedy.nodes_explored;
                    out.elapsed = started.elapsed();
                    Ok(out)
                }
                None => Ok(greedy),
            }
        }
    }
}

/// Chronologically ordered view of a schedule with per-flight gate
/// permissions resolved from the config.
pub(crate) struct Prepared<'a> {
    /// `order[p]` is the schedule index of the `p`-th flight in time.
    pub order: Vec<usize>,
    pub flights: Vec<&'a Flight>,
    pub gate_count: usize,
    pub buffer: Minutes,
    pub mode: ObjectiveMode,
    /// `allowed[p][g]`: flight `p` may use gate `g`.
    pub allowed: Vec<Vec<bool>>,
    /// Gates named by some preference. The remaining gates are
    /// interchangeable and are opened in ascending label order.
    pub distinguished: Vec<bool>,
}

impl<'a> Prepared<'a> {
    pub fn new(schedule: &'a Schedule, cfg: &SolveConfig) -> Self {
        let order = schedule.chronological_order();
        let flights: Vec<&Flight> = order.iter().map(|&i| &schedule.flights()[i]).collect();
        let c = cfg.gate_count;
        let mut distinguished = vec![false; c];
        let allowed = flights
            .iter()
            .map(|f| {
                let mut row = vec![true; c];
                if let Some(&g) = cfg.preassigned.get(f.id()) {
                    row.iter_mut().enumerate().for_each(|(k, x)| *x = k == g);
                    distinguished[g] = true;
                }
                if let Some(gates) = cfg.forbidden.get(f.id()) {
                    for &g in gates {
                        row[g] = false;
                        distinguished[g] = true;
                    }
                }
                row
            })
            .collect();
        debug_assert!(cfg.has_preferences() == distinguished.iter().any(|&d| d));
        Self {
            order,
            flights,
            gate_count: c,
            buffer: cfg.buffer,
            mode: cfg.mode,
            allowed,
            distinguished,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.flights.len()
    }

    /// True when flight `later` may follow flight `earlier` on one gate.
    #[inline]
    pub fn compatible(&self, earlier: usize, later: usize) -> bool {
        self.flights[later].arrival() - self.flights[earlier].departure() > 2 * self.buffer
    }

    /// Adjacent-pair contribution, or the buffer-free `1/gap` in legacy mode.
    #[inline]
    pub fn link_cost(&self, earlier: usize, later: usize) -> f64 {
        let gap = self.flights[later].arrival() - self.flights[earlier].departure();
        match self.mode {
            ObjectiveMode::AdjacentExpected => 1.0 / (gap + 2 * self.buffer) as f64,
            ObjectiveMode::AllPairsLegacy => 1.0 / gap as f64,
        }
    }

    /// Cost of appending `later` to a gate currently hosting `members`
    /// (chronological positions, all earlier than `later`).
    pub fn append_cost(&self, members: &[usize], later: usize) -> f64 {
        match self.mode {
            ObjectiveMode::AdjacentExpected => members
                .last()
                .map_or(0.0, |&last| self.link_cost(last, later)),
            ObjectiveMode::AllPairsLegacy => {
                members.iter().map(|&m| self.link_cost(m, later)).sum()
            }
        }
    }

    /// Gate choices for the next flight under first-use symmetry breaking:
    /// every distinguished gate, the interchangeable gates already opened,
    /// and the lowest unopened interchangeable gate. Ascending label order.
    pub fn branch_gates(&self, opened: &[bool]) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.gate_count);
        let mut fresh_taken = false;
        for (g, (&named, &open)) in self.distinguished.iter().zip(opened).enumerate() {
            if named || open {
                out.push(g);
            } else if !fresh_taken {
                out.push(g);
                fresh_taken = true;
            }
        }
        out
    }

    /// Converts a chronological gate vector into a schedule-order assignment.
    pub fn to_assignment(&self, chrono_gates: &[usize]) -> Assignment {
        let mut gates = vec![0; self.len()];
        for (p, &g) in chrono_gates.iter().enumerate() {
            gates[self.order[p]] = g;
        }
        Assignment::new(gates, self.gate_count).expect("gates within range")
    }

    /// Chronological gate vector of a schedule-order assignment.
    pub fn chrono_gates(&self, assignment: &Assignment) -> Vec<usize> {
        self.order.iter().map(|&i| assignment.gate_of(i)).collect()
    }
}

/// Relative tolerance used when comparing objective values.
#[inline]
pub(crate) fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent - 1e-12 * incumbent.abs().max(1.0)
}

pub(crate) struct Deadline {
    started: Instant,
    limit: Option<Duration>,
}

impl Deadline {
    pub fn new(started: Instant, limit: Option<Duration>) -> Self {
        Self { started, limit }
    }

    #[inline]
    pub fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.started.elapsed() >= l)
    }
}
