use std::time::Instant;

use super::matching::min_cost_assignment;
use super::{
    improve_local_search, improves, solve_greedy, Deadline, Prepared, SolveConfig, SolveError,
    SolveOutcome, SolveStatus,
};
use crate::objective::Assignment;
use crate::schedule::{min_gates_required, Schedule};

/// Depth-first branch-and-bound over flights in chronological order.
///
/// Each node assigns the next flight to one of the gates offered by
/// first-use symmetry breaking, subject to the conflict check against that
/// gate's latest flight and to gate preferences. Children are visited in
/// ascending gate order, so among equal-cost optima the lexicographically
/// least chronological gate vector is returned.
///
/// The node bound is the committed cost plus a min-cost assignment
/// relaxation over the unassigned flights: every remaining flight either
/// opens an empty gate for free or follows a distinct predecessor (a gate's
/// current last flight or an earlier unassigned flight) at that link's cost.
/// With no gate preferences and the canonical objective the relaxation is
/// exact.
pub fn solve_exact(schedule: &Schedule, cfg: &SolveConfig) -> Result<SolveOutcome, SolveError> {
    cfg.validate(schedule)?;
    let started = Instant::now();
    if cfg.gate_count < min_gates_required(schedule, cfg.buffer) {
        return Ok(SolveOutcome::without_solution(
            SolveStatus::Infeasible,
            cfg,
            0,
            started,
        ));
    }

    // heuristic incumbent: a pruning cutoff and the fallback answer on timeout
    let mut heuristic_nodes = 0;
    let heuristic = match solve_greedy(schedule, cfg)? {
        out if out.assignment.is_some() => {
            heuristic_nodes += out.nodes_explored;
            let start = out.assignment.expect("checked");
            let improved = improve_local_search(schedule, &start, cfg)?;
            heuristic_nodes += improved.nodes_explored;
            improved.assignment.zip(improved.report.map(|r| r.total))
        }
        _ => None,
    };

    let prep = Prepared::new(schedule, cfg);
    let mut search = Search {
        prep: &prep,
        deadline: Deadline::new(started, cfg.time_limit),
        chrono: Vec::with_capacity(prep.len()),
        members: vec![Vec::new(); cfg.gate_count],
        opened: vec![false; cfg.gate_count],
        best: None,
        cutoff: heuristic.as_ref().map(|(_, cost)| *cost),
        nodes: 0,
        timed_out: false,
    };
    if let Some(bound) = search.lower_bound(0, 0.0) {
        if !search.pruned(bound) {
            search.dfs(0, 0.0);
        }
    }

    let nodes = search.nodes + heuristic_nodes;
    let timed_out = search.timed_out;
    let best = search
        .best
        .take()
        .map(|(_, chrono)| prep.to_assignment(&chrono));
    let (status, assignment): (SolveStatus, Option<Assignment>) = match (best, timed_out) {
        (Some(a), false) => (SolveStatus::Optimal, Some(a)),
        (Some(a), true) => (SolveStatus::Feasible, Some(a)),
        (None, true) => match heuristic {
            Some((a, _)) => (SolveStatus::Feasible, Some(a)),
            None => (SolveStatus::Unknown, None),
        },
        (None, false) => {
            debug_assert!(heuristic.is_none(), "search missed the heuristic incumbent");
            match heuristic {
                Some((a, _)) => (SolveStatus::Feasible, Some(a)),
                None => (SolveStatus::Infeasible, None),
            }
        }
    };
    match assignment {
        Some(a) => SolveOutcome::with_solution(status, schedule, cfg, a, nodes, started),
        None => Ok(SolveOutcome::without_solution(status, cfg, nodes, started)),
    }
}

struct Search<'p, 'a> {
    prep: &'p Prepared<'a>,
    deadline: Deadline,
    chrono: Vec<usize>,
    members: Vec<Vec<usize>>,
    opened: Vec<bool>,
    best: Option<(f64, Vec<usize>)>,
    cutoff: Option<f64>,
    nodes: u64,
    timed_out: bool,
}

impl Search<'_, '_> {
    fn pruned(&self, bound: f64) -> bool {
        match (&self.best, self.cutoff) {
            (Some((best, _)), _) => !improves(bound, *best),
            (None, Some(ub)) => improves(ub, bound),
            (None, None) => false,
        }
    }

    fn dfs(&mut self, pos: usize, cost: f64) {
        self.nodes += 1;
        if self.deadline.expired() {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if pos == self.prep.len() {
            if self.best.as_ref().is_none_or(|(b, _)| improves(cost, *b)) {
                self.best = Some((cost, self.chrono.clone()));
            }
            return;
        }

        for g in self.prep.branch_gates(&self.opened) {
            if !self.prep.allowed[pos][g] {
                continue;
            }
            if let Some(&last) = self.members[g].last() {
                if !self.prep.compatible(last, pos) {
                    continue;
                }
            }
            let child = cost + self.prep.append_cost(&self.members[g], pos);

            let was_open = self.opened[g];
            self.opened[g] = true;
            self.members[g].push(pos);
            self.chrono.push(g);

            if let Some(bound) = self.lower_bound(pos + 1, child) {
                if !self.pruned(bound) {
                    self.dfs(pos + 1, child);
                }
            }

            self.chrono.pop();
            self.members[g].pop();
            self.opened[g] = was_open;
            if self.timed_out {
                return;
            }
        }
    }

    /// Committed cost plus the predecessor-assignment relaxation over
    /// flights `next..n`; `None` when the relaxation has no finite solution.
    fn lower_bound(&self, next: usize, committed: f64) -> Option<f64> {
        let prep = self.prep;
        let n = prep.len();
        if next == n {
            return Some(committed);
        }
        let rows = n - next;

        let lasts: Vec<usize> = (0..prep.gate_count)
            .filter(|&g| !self.members[g].is_empty())
            .collect();
        let mut empty: Vec<usize> = Vec::new();
        let mut interchangeable_empty = 0;
        for g in 0..prep.gate_count {
            if !self.members[g].is_empty() {
                continue;
            }
            if prep.distinguished[g] {
                empty.push(g);
            } else if interchangeable_empty < rows {
                empty.push(g);
                interchangeable_empty += 1;
            }
        }

        let cols = lasts.len() + rows + empty.len();
        if cols < rows {
            return None;
        }
        // finite entries never exceed n, so one `big` entry outweighs any
        // all-finite choice
        let big = 2.0 * (rows as f64 + 1.0) * (n as f64 + 1.0);
        let mut cost = vec![big; rows * cols];
        for r in 0..rows {
            let flight = next + r;
            let row = &mut cost[r * cols..(r + 1) * cols];
            for (k, &g) in lasts.iter().enumerate() {
                let last = *self.members[g].last().expect("non-empty gate");
                if prep.allowed[flight][g] && prep.compatible(last, flight) {
                    row[k] = prep.append_cost(&self.members[g], flight);
                }
            }
            for p in 0..r {
                let pred = next + p;
                if prep.compatible(pred, flight) {
                    row[lasts.len() + p] = prep.link_cost(pred, flight);
                }
            }
            for (k, &g) in empty.iter().enumerate() {
                if prep.allowed[flight][g] {
                    row[lasts.len() + rows + k] = 0.0;
                }
            }
        }

        let chosen = min_cost_assignment(&cost, rows, cols);
        let mut total = committed;
        for (r, &c) in chosen.iter().enumerate() {
            let v = cost[r * cols + c];
            if v >= big {
                return None;
            }
            total += v;
        }
        Some(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::ObjectiveMode;
    use crate::schedule::{Flight, Minutes};
    use crate::solver::solve_bruteforce;
    use std::time::Duration;

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
    fn enough_gates_gives_zero() {
        let s = sched(&[(0, 60), (10, 70), (200, 260), (400, 460)]);
        let out = solve_exact(&s, &SolveConfig::new(4)).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective(), Some(0.0));
        assert_eq!(out.assignment.unwrap().gates(), &[0, 1, 2, 3]);
    }

    #[test]
    fn overlapping_pair_single_gate() {
        let s = sched(&[(0, 60), (10, 70)]);
        let out = solve_exact(&s, &SolveConfig::new(1)).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }

    #[test]
    fn picks_widest_gaps() {
        // two gates: optimum pairs F1->F3 and F2->F4
        let s = sched(&[(0, 60), (100, 160), (200, 260), (300, 360)]);
        let out = solve_exact(&s, &SolveConfig::new(2)).unwrap();
        let expect = 1.0 / (140.0 + 30.0) + 1.0 / (140.0 + 30.0);
        assert!((out.objective().unwrap() - expect).abs() < 1e-12);
        assert_eq!(out.assignment.unwrap().gates(), &[0, 1, 0, 1]);
    }

    #[test]
    fn legacy_matches_bruteforce() {
        let s = sched(&[
            (0, 60),
            (100, 160),
            (200, 260),
            (300, 360),
            (340, 400),
            (500, 560),
        ]);
        for c in 1..=3 {
            let cfg = SolveConfig::new(c).with_mode(ObjectiveMode::AllPairsLegacy);
            let a = solve_exact(&s, &cfg).unwrap();
            let b = solve_bruteforce(&s, &cfg).unwrap();
            assert_eq!(a.status, b.status);
            if let (Some(x), Some(y)) = (a.objective(), b.objective()) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn preferences_match_bruteforce() {
        let s = sched(&[(0, 60), (100, 160), (200, 260), (300, 360), (340, 400)]);
        let cfg = SolveConfig::new(3)
            .require_gate("F3", 2)
            .forbid_gate("F1", 0)
            .forbid_gate("F5", 1);
        let a = solve_exact(&s, &cfg).unwrap();
        let b = solve_bruteforce(&s, &cfg).unwrap();
        assert_eq!(a.status, SolveStatus::Optimal);
        assert!((a.objective().unwrap() - b.objective().unwrap()).abs() < 1e-9);
        assert_eq!(a.assignment, b.assignment);
    }

    #[test]
    fn zero_time_limit_falls_back_to_incumbent() {
        let times: Vec<_> = (0..30).map(|i| (i * 37 % 900, i * 37 % 900 + 60)).collect();
        let s = sched(&times);
        let gates = min_gates_required(&s, 15);
        let cfg = SolveConfig::new(gates).with_time_limit(Duration::ZERO);
        let out = solve_exact(&s, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::Feasible);
        assert!(out.report.unwrap().feasible);
    }
}
