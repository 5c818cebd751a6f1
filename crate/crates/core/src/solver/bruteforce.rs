use std::time::Instant;

use super::{improves, Prepared, SolveConfig, SolveError, SolveOutcome, SolveStatus};
use crate::objective::{is_feasible, total_cost, Assignment};
use crate::schedule::Schedule;

/// Largest instance the enumerator accepts.
pub const BRUTEFORCE_MAX_FLIGHTS: usize = 16;

/// Exhaustive reference solver.
///
/// Enumerates every assignment up to relabeling of interchangeable gates,
/// keeps those that respect gate preferences and are conflict-free, and
/// scores each one with the objective module. Nothing is pruned, so the
/// result does not depend on the incremental bookkeeping the other engines
/// use.
pub fn solve_bruteforce(
    schedule: &Schedule,
    cfg: &SolveConfig,
) -> Result<SolveOutcome, SolveError> {
    cfg.validate(schedule)?;
    if schedule.len() > BRUTEFORCE_MAX_FLIGHTS {
        return Err(SolveError::TooLarge {
            flights: schedule.len(),
            limit: BRUTEFORCE_MAX_FLIGHTS,
        });
    }
    let started = Instant::now();
    let prep = Prepared::new(schedule, cfg);

    let mut chrono = Vec::with_capacity(prep.len());
    let mut opened = vec![false; cfg.gate_count];
    let mut best: Option<(f64, Assignment)> = None;
    let mut leaves = 0u64;
    enumerate(&prep, &mut chrono, &mut opened, &mut |gates| {
        leaves += 1;
        let respects = gates.iter().enumerate().all(|(p, &g)| prep.allowed[p][g]);
        if !respects {
            return;
        }
        let assignment = prep.to_assignment(gates);
        if !is_feasible(schedule, &assignment, cfg.buffer)
            .expect("assignment covers schedule")
            .is_feasible()
        {
            return;
        }
        let cost = total_cost(schedule, &assignment, cfg.buffer, cfg.mode)
            .expect("feasible assignment has a cost")
            .total;
        // enumeration runs in lexicographic order, so only strict
        // improvements replace the incumbent
        if best.as_ref().is_none_or(|(b, _)| improves(cost, *b)) {
            best = Some((cost, assignment));
        }
    });

    match best {
        Some((_, assignment)) => SolveOutcome::with_solution(
            SolveStatus::Optimal,
            schedule,
            cfg,
            assignment,
            leaves,
            started,
        ),
        None => Ok(SolveOutcome::without_solution(
            SolveStatus::Infeasible,
            cfg,
            leaves,
            started,
        )),
    }
}

fn enumerate(
    prep: &Prepared<'_>,
    chrono: &mut Vec<usize>,
    opened: &mut [bool],
    visit: &mut dyn FnMut(&[usize]),
) {
    if chrono.len() == prep.len() {
        visit(chrono);
        return;
    }
    for g in prep.branch_gates(opened) {
        let was_open = opened[g];
        opened[g] = true;
        chrono.push(g);
        enumerate(prep, chrono, opened, visit);
        chrono.pop();
        opened[g] = was_open;
    }
}
