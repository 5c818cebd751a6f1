//! Assignment feasibility and the expected-conflict objective.
//!
//! Two objective modes are supported. [`ObjectiveMode::AdjacentExpected`]
//! charges `1 / (gap + 2b)` for every pair of flights that occupy a gate
//! consecutively, where `gap` is the later arrival minus the earlier
//! departure. [`ObjectiveMode::AllPairsLegacy`] charges `1 / gap` for every
//! ordered same-gate pair with a positive gap, with no buffer term.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::{Flight, Minutes, Schedule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("gap {gap} with buffer {buffer} gives a non-positive denominator")]
    Domain { gap: Minutes, buffer: Minutes },
    #[error("assignment covers {assigned} flights but the schedule has {flights}")]
    Coverage { assigned: usize, flights: usize },
    #[error("flight {0} is not assigned to any gate")]
    MissingFlight(String),
    #[error("flight {0} is not in the schedule")]
    UnknownFlight(String),
    #[error("flight {0} is assigned more than once")]
    DuplicateFlight(String),
    #[error("gate {gate} out of range for {gate_count} gates")]
    GateOutOfRange { gate: usize, gate_count: usize },
    #[error("gate count must be positive")]
    NoGates,
    #[error("assignment is infeasible: {0}")]
    Infeasible(Violation),
}

/// Flight-to-gate map. `gates[i]` is the gate of the schedule's `i`-th flight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    gates: Vec<usize>,
    gate_count: usize,
}

impl Assignment {
    pub fn new(gates: Vec<usize>, gate_count: usize) -> Result<Self, ObjectiveError> {
        if gate_count == 0 {
            return Err(ObjectiveError::NoGates);
        }
        if let Some(&gate) = gates.iter().find(|&&g| g >= gate_count) {
            return Err(ObjectiveError::GateOutOfRange { gate, gate_count });
        }
        Ok(Self { gates, gate_count })
    }

    /// Builds an assignment from `(flight id, gate)` pairs. Every flight of
    /// `schedule` must appear exactly once.
    pub fn from_pairs<'a, I>(
        schedule: &Schedule,
        pairs: I,
        gate_count: usize,
    ) -> Result<Self, ObjectiveError>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let index: HashMap<&str, usize> = schedule
            .flights()
            .iter()
            .enumerate()
            .map(|(i, f)| (f.id(), i))
            .collect();
        let mut gates: Vec<Option<usize>> = vec![None; schedule.len()];
        for (id, gate) in pairs {
            let &i = index
                .get(id)
                .ok_or_else(|| ObjectiveError::UnknownFlight(id.to_string()))?;
            if gates[i].replace(gate).is_some() {
                return Err(ObjectiveError::DuplicateFlight(id.to_string()));
            }
        }
        let gates = gates
            .into_iter()
            .enumerate()
            .map(|(i, g)| {
                g.ok_or_else(|| {
                    ObjectiveError::MissingFlight(schedule.flights()[i].id().to_string())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(gates, gate_count)
    }

    #[inline]
    pub fn gates(&self) -> &[usize] {
        &self.gates
    }

    #[inline]
    pub fn gate_count(&self) -> usize {
        self.gate_count
    }

    #[inline]
    pub fn gate_of(&self, flight: usize) -> usize {
        self.gates[flight]
    }

    /// Same assignment with gate labels mapped through `perm`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self, ObjectiveError> {
        Self::new(
            self.gates.iter().map(|&g| perm[g]).collect(),
            self.gate_count,
        )
    }

    fn check_covers(&self, schedule: &Schedule) -> Result<(), ObjectiveError> {
        if self.gates.len() != schedule.len() {
            return Err(ObjectiveError::Coverage {
                assigned: self.gates.len(),
                flights: schedule.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ObjectiveMode {
    #[default]
    #[serde(rename = "ADJACENT_EXPECTED")]
    AdjacentExpected,
    #[serde(rename = "ALL_PAIRS_LEGACY")]
    AllPairsLegacy,
}

impl ObjectiveMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveMode::AdjacentExpected => "ADJACENT_EXPECTED",
            ObjectiveMode::AllPairsLegacy => "ALL_PAIRS_LEGACY",
        }
    }
}

impl fmt::Display for ObjectiveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adjacent" | "ADJACENT_EXPECTED" => Ok(ObjectiveMode::AdjacentExpected),
            "legacy" | "ALL_PAIRS_LEGACY" => Ok(ObjectiveMode::AllPairsLegacy),
            other => Err(format!("unknown objective mode {other:?}")),
        }
    }
}

/// Two flights on the same gate whose locked intervals intersect.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    pub first: String,
    pub second: String,
    pub gate: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "flights {} and {} overlap on gate {}",
            self.first, self.second, self.gate
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible(Violation),
}

impl Feasibility {
    #[inline]
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Feasibility::Feasible => None,
            Feasibility::Infeasible(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostTerm {
    pub earlier: String,
    pub later: String,
    pub gate: usize,
    pub gap: Minutes,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub mode: ObjectiveMode,
    pub buffer: Minutes,
    pub feasible: bool,
    #[serde(rename = "conflicts")]
    pub conflict_count: usize,
    pub total: f64,
    pub terms: Vec<CostTerm>,
    pub violations: Vec<Violation>,
}

impl CostReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cost report serializes")
    }
}

/// Uniform-distribution conflict expectation `1 / (gap + 2b)`, where `gap`
/// is the later arrival minus the earlier departure.
///
/// Only the denominator is checked here. Whether the pair may share a gate
/// at all (`gap > 2b`) is decided by the feasibility check.
pub fn expected_conflict_probability(
    d_earlier: Minutes,
    a_later: Minutes,
    buffer: Minutes,
) -> Result<f64, ObjectiveError> {
    let gap = a_later - d_earlier;
    if gap + 2 * buffer <= 0 {
        return Err(ObjectiveError::Domain { gap, buffer });
    }
    Ok(1.0 / (gap + 2 * buffer) as f64)
}

/// Flight indices hosted by each gate, in chronological order.
pub fn gate_sequences(schedule: &Schedule, assignment: &Assignment) -> Vec<Vec<usize>> {
    let mut seqs = vec![Vec::new(); assignment.gate_count()];
    for i in schedule.chronological_order() {
        seqs[assignment.gate_of(i)].push(i);
    }
    seqs
}

/// Unordered same-gate pairs `(i, j)` of schedule indices with `i < j`.
pub fn same_gate_pairs(
    schedule: &Schedule,
    assignment: &Assignment,
) -> Result<Vec<(usize, usize)>, ObjectiveError> {
    assignment.check_covers(schedule)?;
    let n = schedule.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if assignment.gate_of(i) == assignment.gate_of(j) {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

fn violation(flights: &[Flight], earlier: usize, later: usize, gate: usize) -> Violation {
    Violation {
        first: flights[earlier].id().to_string(),
        second: flights[later].id().to_string(),
        gate,
    }
}

/// Visits every overlapping same-gate pair, gate by gate in chronological
/// order. Relies on the sequences being sorted by arrival: once a later
/// flight's locked start passes the current end, no further flight overlaps.
fn for_each_conflict(
    schedule: &Schedule,
    seqs: &[Vec<usize>],
    buffer: Minutes,
    mut visit: impl FnMut(usize, usize, usize) -> bool,
) {
    let flights = schedule.flights();
    for (gate, seq) in seqs.iter().enumerate() {
        for (p, &i) in seq.iter().enumerate() {
            let end = flights[i].locked_interval(buffer).end;
            for &j in &seq[p + 1..] {
                if flights[j].locked_interval(buffer).start > end {
                    break;
                }
                if !visit(gate, i, j) {
                    return;
                }
            }
        }
    }
}

/// Checks that no two flights sharing a gate have intersecting locked
/// intervals; reports the first violation found otherwise.
pub fn is_feasible(
    schedule: &Schedule,
    assignment: &Assignment,
    buffer: Minutes,
) -> Result<Feasibility, ObjectiveError> {
    assignment.check_covers(schedule)?;
    let seqs = gate_sequences(schedule, assignment);
    let mut found = None;
    for_each_conflict(schedule, &seqs, buffer, |gate, i, j| {
        found = Some(violation(schedule.flights(), i, j, gate));
        false
    });
    Ok(match found {
        None => Feasibility::Feasible,
        Some(v) => Feasibility::Infeasible(v),
    })
}

/// Number of unordered same-gate pairs with intersecting locked intervals.
pub fn conflict_count(
    schedule: &Schedule,
    assignment: &Assignment,
    buffer: Minutes,
) -> Result<usize, ObjectiveError> {
    assignment.check_covers(schedule)?;
    let seqs = gate_sequences(schedule, assignment);
    let mut count = 0;
    for_each_conflict(schedule, &seqs, buffer, |_, _, _| {
        count += 1;
        true
    });
    Ok(count)
}

/// Cost contribution of ordered pair `(earlier, later)` on one gate, or
/// `None` when the mode admits no term for it.
#[inline]
pub(crate) fn pair_term(
    earlier: &Flight,
    later: &Flight,
    buffer: Minutes,
    mode: ObjectiveMode,
) -> Option<f64> {
    let gap = later.arrival() - earlier.departure();
    match mode {
        ObjectiveMode::AdjacentExpected => {
            (gap > 2 * buffer).then(|| 1.0 / (gap + 2 * buffer) as f64)
        }
        ObjectiveMode::AllPairsLegacy => (gap > 0).then(|| 1.0 / gap as f64),
    }
}

/// Evaluates the objective without requiring feasibility. In
/// [`ObjectiveMode::AdjacentExpected`] overlapping consecutive pairs carry no
/// term and are listed as violations instead.
pub fn evaluate(
    schedule: &Schedule,
    assignment: &Assignment,
    buffer: Minutes,
    mode: ObjectiveMode,
) -> Result<CostReport, ObjectiveError> {
    assignment.check_covers(schedule)?;
    let flights = schedule.flights();
    let seqs = gate_sequences(schedule, assignment);

    let mut violations = Vec::new();
    for_each_conflict(schedule, &seqs, buffer, |gate, i, j| {
        violations.push(violation(flights, i, j, gate));
        true
    });

    let mut terms = Vec::new();
    let mut push_term = |gate: usize, e: usize, l: usize| {
        if let Some(value) = pair_term(&flights[e], &flights[l], buffer, mode) {
            terms.push(CostTerm {
                earlier: flights[e].id().to_string(),
                later: flights[l].id().to_string(),
                gate,
                gap: flights[l].arrival() - flights[e].departure(),
                value,
            });
        }
    };
    for (gate, seq) in seqs.iter().enumerate() {
        match mode {
            ObjectiveMode::AdjacentExpected => {
                for w in seq.windows(2) {
                    push_term(gate, w[0], w[1]);
                }
            }
            ObjectiveMode::AllPairsLegacy => {
                for &i in seq {
                    for &j in seq {
                        if i != j {
                            push_term(gate, i, j);
                        }
                    }
                }
            }
        }
    }

    let total = terms.iter().fold(0.0, |acc, t| acc + t.value);
    Ok(CostReport {
        mode,
        buffer,
        feasible: violations.is_empty(),
        conflict_count: violations.len(),
        total,
        terms,
        violations,
    })
}

/// Objective value of a feasible assignment. In canonical mode an
/// infeasible assignment is an error; legacy mode tolerates overlaps.
pub fn total_cost(
    schedule: &Schedule,
    assignment: &Assignment,
    buffer: Minutes,
    mode: ObjectiveMode,
) -> Result<CostReport, ObjectiveError> {
    let report = evaluate(schedule, assignment, buffer, mode)?;
    if mode == ObjectiveMode::AdjacentExpected {
        if let Some(v) = report.violations.first() {
            return Err(ObjectiveError::Infeasible(v.clone()));
        }
    }
    Ok(report)
}

/// Brute-force O(n²) conflict scan over all pairs.
#[cfg(test)]
pub(crate) fn conflict_count_naive(
    schedule: &Schedule,
    assignment: &Assignment,
    buffer: Minutes,
) -> usize {
    use crate::schedule::overlaps;
    let f = schedule.flights();
    let mut count = 0;
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            if assignment.gate_of(i) == assignment.gate_of(j) && overlaps(&f[i], &f[j], buffer) {
                count += 1;
            }
        }
    }
    count
}
