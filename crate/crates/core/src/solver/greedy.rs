use std::time::Instant;

use super::{Prepared, SolveConfig, SolveError, SolveOutcome, SolveStatus};
use crate::schedule::Schedule;

/// Chronological construction: each flight goes to the allowed,
/// conflict-free gate with the smallest marginal cost (an empty gate costs
/// nothing), ties to the lowest gate index. Reports `Infeasible` when some
/// flight has no usable gate. No optimality claim.
pub fn solve_greedy(schedule: &Schedule, cfg: &SolveConfig) -> Result<SolveOutcome, SolveError> {
    cfg.validate(schedule)?;
    let started = Instant::now();
    let prep = Prepared::new(schedule, cfg);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cfg.gate_count];
    let mut chrono = Vec::with_capacity(prep.len());
    for pos in 0..prep.len() {
        let mut choice: Option<(f64, usize)> = None;
        for (g, gate) in members.iter().enumerate() {
            if !prep.allowed[pos][g] {
                continue;
            }
            if gate.last().is_some_and(|&last| !prep.compatible(last, pos)) {
                continue;
            }
            let inc = prep.append_cost(gate, pos);
            if choice.is_none_or(|(best, _)| inc < best) {
                choice = Some((inc, g));
            }
        }
        match choice {
            Some((_, g)) => {
                members[g].push(pos);
                chrono.push(g);
            }
            None => {
                return Ok(SolveOutcome::without_solution(
                    SolveStatus::Infeasible,
                    cfg,
                    pos as u64 + 1,
                    started,
                ))
            }
        }
    }
    let assignment = prep.to_assignment(&chrono);
    SolveOutcome::with_solution(
        SolveStatus::Feasible,
        schedule,
        cfg,
        assignment,
        prep.len() as u64,
        started,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{Flight, Minutes};

    fn sched(times: &[(Minutes, Minutes)]) -> Schedule {
        Schedule::new(
            times
                .iter()
                .enumerate()
                .map(|(i, &(a, d))| Flight::new(format!("F{}", i + 1), a, d).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn disjoint_flights_one_gate() {
        let s = sched(&[(0, 60), (120, 180), (240, 300)]);
        let out = solve_greedy(&s, &SolveConfig::new(1)).unwrap();
        assert_eq!(out.status, SolveStatus::Feasible);
        assert_eq!(out.assignment.unwrap().gates(), &[0, 0, 0]);
    }

    #[test]
    fn overlapping_pair_single_gate() {
        let s = sched(&[(0, 60), (10, 70)]);
        let out = solve_greedy(&s, &SolveConfig::new(1)).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }

    #[test]
    fn prefers_empty_then_cheapest_gate() {
        // F3 can follow either F1 (gap 140) or F2 (gap 40); F1 is cheaper
        let s = sched(&[(0, 60), (100, 160), (200, 260)]);
        let out = solve_greedy(&s, &SolveConfig::new(2)).unwrap();
        assert_eq!(out.assignment.unwrap().gates(), &[0, 1, 0]);
    }

    #[test]
    fn respects_required_gate() {
        let s = sched(&[(0, 60), (120, 180)]);
        let cfg = SolveConfig::new(3)
            .require_gate("F1", 2)
            .forbid_gate("F2", 0);
        let a = solve_greedy(&s, &cfg).unwrap().assignment.unwrap();
        assert_eq!(a.gates(), &[2, 1]);
    }
}
