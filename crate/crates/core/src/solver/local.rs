use std::time::Instant;

use super::{Deadline, Prepared, SolveConfig, SolveError, SolveOutcome, SolveStatus};
use crate::objective::{is_feasible, Assignment, ObjectiveMode};
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq)]
enum MoveKind {
    Relocate { flight: usize, to: usize },
    Swap { a: usize, b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Move {
    delta: f64,
    kind: MoveKind,
}

/// Steepest-descent refinement over relocate and swap moves.
///
/// Every iteration applies the single move with the largest strict cost
/// reduction among all feasible relocations of one flight to another gate
/// and all feasible gate swaps of two flights. The best move of each gate
/// pair is cached and only pairs touching a changed gate are re-evaluated.
pub fn improve_local_search(
    schedule: &Schedule,
    start: &Assignment,
    cfg: &SolveConfig,
) -> Result<SolveOutcome, SolveError> {
    cfg.validate(schedule)?;
    if start.gate_count() != cfg.gate_count {
        return Err(SolveError::InvalidConfig(format!(
            "start uses {} gates but the config has {}",
            start.gate_count(),
            cfg.gate_count
        )));
    }
    if let Some(v) = is_feasible(schedule, start, cfg.buffer)?.violation() {
        return Err(SolveError::InfeasibleStart(v.clone()));
    }
    let started = Instant::now();
    let prep = Prepared::new(schedule, cfg);
    let chrono = prep.chrono_gates(start);
    if let Some(p) = (0..prep.len()).find(|&p| !prep.allowed[p][chrono[p]]) {
        return Err(SolveError::PreferenceViolated(
            prep.flights[p].id().to_string(),
        ));
    }

    let mut state = LocalState::new(&prep, &chrono);
    let deadline = Deadline::new(started, cfg.time_limit);
    let c = cfg.gate_count;
    let pair_index = |g: usize, h: usize| g * c + h;
    let mut cache: Vec<Option<Move>> = vec![None; c * c];
    for g in 0..c {
        for h in (g + 1)..c {
            cache[pair_index(g, h)] = state.best_move_between(g, h);
        }
    }

    while !deadline.expired() {
        let mut best: Option<Move> = None;
        for g in 0..c {
            for h in (g + 1)..c {
                if let Some(m) = cache[pair_index(g, h)] {
                    if best.is_none_or(|b| m.delta < b.delta) {
                        best = Some(m);
                    }
                }
            }
        }
        let Some(m) = best else { break };
        if m.delta >= -1e-12 * state.cost.abs().max(1.0) {
            break;
        }
        let (g, h) = state.apply(m);
        for other in 0..c {
            for changed in [g, h] {
                if other != changed {
                    let (lo, hi) = (other.min(changed), other.max(changed));
                    cache[pair_index(lo, hi)] = state.best_move_between(lo, hi);
                }
            }
        }
    }

    let assignment = prep.to_assignment(&state.gate_of);
    SolveOutcome::with_solution(
        SolveStatus::Feasible,
        schedule,
        cfg,
        assignment,
        state.evaluations,
        started,
    )
}

struct LocalState<'p, 'a> {
    prep: &'p Prepared<'a>,
    /// Chronological positions hosted by each gate, ascending.
    gates: Vec<Vec<usize>>,
    gate_of: Vec<usize>,
    cost: f64,
    evaluations: u64,
}

impl<'p, 'a> LocalState<'p, 'a> {
    fn new(prep: &'p Prepared<'a>, chrono: &[usize]) -> Self {
        let mut gates = vec![Vec::new(); prep.gate_count];
        for (p, &g) in chrono.iter().enumerate() {
            gates[g].push(p);
        }
        let cost = gates
            .iter()
            .map(|seq| (0..seq.len()).fold(0.0, |acc, k| acc + prep.append_cost(&seq[..k], seq[k])))
            .fold(0.0, |acc, v| acc + v);
        Self {
            prep,
            gates,
            gate_of: chrono.to_vec(),
            cost,
            evaluations: 0,
        }
    }

    /// Neighbours `flight` would have in gate `g`, ignoring `skip`.
    fn neighbours(
        &self,
        g: usize,
        skip: Option<usize>,
        flight: usize,
    ) -> (Option<usize>, Option<usize>) {
        let seq = &self.gates[g];
        let at = seq.partition_point(|&x| x < flight);
        let prev = seq[..at]
            .iter()
            .rev()
            .copied()
            .find(|&x| Some(x) != skip && x != flight);
        let next = seq[at..]
            .iter()
            .copied()
            .find(|&x| Some(x) != skip && x != flight);
        (prev, next)
    }

    #[inline]
    fn link(&self, a: Option<usize>, b: Option<usize>) -> f64 {
        match (a, b) {
            (Some(a), Some(b)) => self.prep.link_cost(a, b),
            _ => 0.0,
        }
    }

    #[inline]
    fn ordered_link(&self, x: usize, y: usize) -> f64 {
        if x < y {
            self.prep.link_cost(x, y)
        } else {
            self.prep.link_cost(y, x)
        }
    }

    /// Cost change from taking `flight` off its current gate.
    fn remove_delta(&self, flight: usize) -> f64 {
        let g = self.gate_of[flight];
        match self.prep.mode {
            ObjectiveMode::AdjacentExpected => {
                let (prev, next) = self.neighbours(g, None, flight);
                self.link(prev, next)
                    - self.link(prev, Some(flight))
                    - self.link(Some(flight), next)
            }
            ObjectiveMode::AllPairsLegacy => -self.gates[g]
                .iter()
                .filter(|&&m| m != flight)
                .map(|&m| self.ordered_link(m, flight))
                .sum::<f64>(),
        }
    }

    /// Cost change from putting `flight` on gate `g` (with `skip` removed
    /// from it), or `None` when it would conflict there.
    fn insert_delta(&self, g: usize, skip: Option<usize>, flight: usize) -> Option<f64> {
        if !self.prep.allowed[flight][g] {
            return None;
        }
        let (prev, next) = self.neighbours(g, skip, flight);
        if prev.is_some_and(|p| !self.prep.compatible(p, flight))
            || next.is_some_and(|q| !self.prep.compatible(flight, q))
        {
            return None;
        }
        Some(match self.prep.mode {
            ObjectiveMode::AdjacentExpected => {
                self.link(prev, Some(flight)) + self.link(Some(flight), next)
                    - self.link(prev, next)
            }
            ObjectiveMode::AllPairsLegacy => self.gates[g]
                .iter()
                .filter(|&&m| Some(m) != skip)
                .map(|&m| self.ordered_link(m, flight))
                .sum(),
        })
    }

    fn best_move_between(&mut self, g: usize, h: usize) -> Option<Move> {
        let mut best: Option<Move> = None;
        let mut consider = |m: Move| {
            if best.is_none_or(|b| m.delta < b.delta) {
                best = Some(m);
            }
        };
        let removal_g: Vec<f64> = self.gates[g]
            .iter()
            .map(|&f| self.remove_delta(f))
            .collect();
        let removal_h: Vec<f64> = self.gates[h]
            .iter()
            .map(|&f| self.remove_delta(f))
            .collect();
        let mut evaluations = 0u64;

        for (from, to, removal) in [(g, h, &removal_g), (h, g, &removal_h)] {
            for (k, &f) in self.gates[from].iter().enumerate() {
                evaluations += 1;
                if let Some(ins) = self.insert_delta(to, None, f) {
                    consider(Move {
                        delta: removal[k] + ins,
                        kind: MoveKind::Relocate { flight: f, to },
                    });
                }
            }
        }
        for (i, &a) in self.gates[g].iter().enumerate() {
            for (j, &b) in self.gates[h].iter().enumerate() {
                evaluations += 1;
                let Some(b_into_g) = self.insert_delta(g, Some(a), b) else {
                    continue;
                };
                let Some(a_into_h) = self.insert_delta(h, Some(b), a) else {
                    continue;
                };
                consider(Move {
                    delta: removal_g[i] + b_into_g + removal_h[j] + a_into_h,
                    kind: MoveKind::Swap { a, b },
                });
            }
        }
        self.evaluations += evaluations;
        best
    }

    fn place(&mut self, flight: usize, g: usize) {
        let old = self.gate_of[flight];
        let seq = &mut self.gates[old];
        let at = seq.binary_search(&flight).expect("flight on its gate");
        seq.remove(at);
        let seq = &mut self.gates[g];
        let at = seq.partition_point(|&x| x < flight);
        seq.insert(at, flight);
        self.gate_of[flight] = g;
    }

    /// Applies `m` and returns the two gates it touched.
    fn apply(&mut self, m: Move) -> (usize, usize) {
        self.cost += m.delta;
        match m.kind {
            MoveKind::Relocate { flight, to } => {
                let from = self.gate_of[flight];
                self.place(flight, to);
                (from, to)
            }
            MoveKind::Swap { a, b } => {
                let (ga, gb) = (self.gate_of[a], self.gate_of[b]);
                self.place(a, gb);
                self.place(b, ga);
                (ga, gb)
            }
        }
    }
}
