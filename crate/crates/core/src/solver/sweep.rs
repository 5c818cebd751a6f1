use std::time::{Duration, Instant};

use super::{round_ms, solve, Engine, SolveConfig, SolveError, SolveStatus};
use crate::schedule::{min_gates_required, Schedule};

/// One gate count of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gates: usize,
    pub status: SolveStatus,
    /// `None` when no feasible assignment was produced.
    pub objective: Option<f64>,
    pub runtime: Duration,
}

/// Solves `schedule` for every gate count in `gates_from..=gates_to`.
/// Counts below the interval-overlap lower bound are reported infeasible
/// without running the engine.
pub fn sweep_gates(
    schedule: &Schedule,
    gates_from: usize,
    gates_to: usize,
    cfg: &SolveConfig,
    engine: Engine,
) -> Result<Vec<SweepRow>, SolveError> {
    if gates_from == 0 || gates_from > gates_to {
        return Err(SolveError::InvalidConfig(format!(
            "gate range {gates_from}..={gates_to} must satisfy 1 <= from <= to"
        )));
    }
    let floor = min_gates_required(schedule, cfg.buffer);
    let mut rows = Vec::with_capacity(gates_to - gates_from + 1);
    for gates in gates_from..=gates_to {
        let started = Instant::now();
        let row_cfg = SolveConfig {
            gate_count: gates,
            ..cfg.clone()
        };
        row_cfg.validate(schedule)?;
        if gates < floor {
            rows.push(SweepRow {
                gates,
                status: SolveStatus::Infeasible,
                objective: None,
                runtime: started.elapsed(),
            });
            continue;
        }
        let out = solve(schedule, &row_cfg, engine)?;
        rows.push(SweepRow {
            gates,
            status: out.status,
            objective: out.objective(),
            runtime: started.elapsed(),
        });
    }
    Ok(rows)
}

/// `gates,status,objective,runtime_s` CSV. Infeasible rows leave the
/// objective empty; `timing = false` writes a zero runtime.
pub fn sweep_to_csv(rows: &[SweepRow], timing: bool) -> String {
    let mut out = String::from("gates,status,objective,runtime_s\n");
    for r in rows {
        let objective = r.objective.map(|v| format!("{v:.9}")).unwrap_or_default();
        let runtime = if timing { round_ms(r.runtime) } else { 0.0 };
        out.push_str(&format!(
            "{},{},{},{:.3}\n",
            r.gates, r.status, objective, runtime
        ));
    }
    out
}
