//! `gateassign` command-line front end.
//!
//! Exit status: 0 on success, 2 when the answer is "no feasible
//! assignment" (or, for `eval`, when the given assignment has conflicts),
//! 1 on usage or data errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::objective::{evaluate, Assignment, CostReport, ObjectiveError, ObjectiveMode};
use crate::schedule::{
    generate_schedule, min_gates_required, parse_schedule, scatter_export, Minutes, Schedule,
    ScheduleError,
};
use crate::solver::{
    solve, sweep_gates, sweep_to_csv, Engine, SolveConfig, SolveError, SolveOutcome, SweepRow,
    DEFAULT_BUFFER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Schedule(#[from] ScheduleError),
    #[error("{0}")]
    Objective(#[from] ObjectiveError),
    #[error("{0}")]
    Solve(#[from] SolveError),
    #[error("assignment file, line {line}: {message}")]
    AssignmentFormat { line: usize, message: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "gateassign",
    version,
    about = "Airport gate assignment toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize a gate assignment for a schedule
    Solve(SolveArgs),
    /// Evaluate a given assignment
    Eval(EvalArgs),
    /// Solve across a range of gate counts
    Sweep(SweepArgs),
    /// Print the minimum gate count admitting a conflict-free assignment
    Mingates(MinGatesArgs),
    /// Generate a synthetic schedule
    Gen(GenArgs),
    /// Export `index,arrival` rows for scatter plots
    Scatter(InputArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Schedule CSV path, or `-` for standard input
    #[arg(default_value = "-")]
    input: String,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Buffer minutes locked before arrival and after departure
    #[arg(long, default_value_t = DEFAULT_BUFFER)]
    buffer: Minutes,
    #[arg(long, default_value = "adjacent", value_parser = parse_mode)]
    objective: ObjectiveMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    gates: usize,
    #[arg(long, default_value = "exact", value_parser = parse_engine)]
    engine: Engine,
    /// Wall-clock limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `json`, `table`, or `csv` (assignment as `flight_id,gate`)
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Require a flight on a gate, as FLIGHT=GATE (repeatable)
    #[arg(long = "require", value_parser = parse_flight_gate)]
    require: Vec<(String, usize)>,
    /// Forbid a flight from a gate, as FLIGHT=GATE (repeatable)
    #[arg(long = "forbid", value_parser = parse_flight_gate)]
    forbid: Vec<(String, usize)>,
    /// Report zero elapsed time so output is reproducible byte for byte
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Assignment CSV (`flight_id,gate`), or `-` for standard input
    #[arg(long)]
    assignment: String,
    /// Gate count; defaults to one more than the highest gate used
    #[arg(long)]
    gates: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    gates_from: usize,
    #[arg(long)]
    gates_to: usize,
    #[arg(long, default_value = "exact", value_parser = parse_engine)]
    engine: Engine,
    /// Wall-clock limit per gate count, in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct MinGatesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_BUFFER)]
    buffer: Minutes,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    count: usize,
    /// First possible arrival, minutes since midnight
    #[arg(long, default_value_t = 360)]
    start: Minutes,
    /// Last possible arrival, minutes since midnight
    #[arg(long, default_value_t = 1439)]
    end: Minutes,
    /// Minutes each flight stays at the gate
    #[arg(long, default_value_t = 60)]
    stay: Minutes,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_mode(s: &str) -> Result<ObjectiveMode, String> {
    s.parse()
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

fn parse_flight_gate(s: &str) -> Result<(String, usize), String> {
    let (flight, gate) = s
        .split_once('=')
        .ok_or_else(|| format!("expected FLIGHT=GATE, got {s:?}"))?;
    let gate = gate.parse().map_err(|_| format!("bad gate in {s:?}"))?;
    Ok((flight.to_string(), gate))
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_ERROR
                }
            };
        }
    };

    let mut ctx = Context {
        stdin,
        stdin_used: false,
    };
    let result = match cli.command {
        Command::Solve(a) => run_solve(&mut ctx, a),
        Command::Eval(a) => run_eval(&mut ctx, a),
        Command::Sweep(a) => run_sweep(&mut ctx, a),
        Command::Mingates(a) => run_mingates(&mut ctx, a),
        Command::Gen(a) => run_gen(a),
        Command::Scatter(a) => run_scatter(&mut ctx, a),
    };
    match result {
        Ok((code, text)) => match stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
        {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_ERROR
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

struct Context<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Context<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            if self.stdin_used {
                return Err(CliError::Usage(
                    "standard input can only be read once".into(),
                ));
            }
            self.stdin_used = true;
            let mut text = String::new();
            self.stdin
                .read_to_string(&mut text)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
            Ok(text)
        } else {
            fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.into(),
                source,
            })
        }
    }

    fn schedule(&mut self, path: &str) -> Result<Schedule, CliError> {
        Ok(parse_schedule(&self.read(path)?)?)
    }
}

type Output = (i32, String);

fn time_limit(secs: Option<f64>) -> Result<Option<Duration>, CliError> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s)
            .map_err(|_| CliError::Usage(format!("invalid --time-limit {s}")))
    })
    .transpose()
}

fn run_solve(ctx: &mut Context<'_>, a: SolveArgs) -> Result<Output, CliError> {
    let schedule = ctx.schedule(&a.input.input)?;
    let mut cfg = SolveConfig::new(a.gates)
        .with_buffer(a.model.buffer)
        .with_mode(a.model.objective)
        .with_seed(a.seed);
    cfg.time_limit = time_limit(a.time_limit)?;
    for (flight, gate) in a.require {
        cfg = cfg.require_gate(flight, gate);
    }
    for (flight, gate) in a.forbid {
        cfg = cfg.forbid_gate(flight, gate);
    }
    let out = solve(&schedule, &cfg, a.engine)?;
    let code = if out.status.has_solution() {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    let text = match a.format {
        Format::Json => out.to_json(&schedule, !a.no_timing) + "\n",
        Format::Table => solve_table(&schedule, &out, !a.no_timing),
        Format::Csv => match &out.assignment {
            Some(asg) => assignment_csv(&schedule, asg),
            None => "flight_id,gate\n".to_string(),
        },
    };
    Ok((code, text))
}

fn solve_table(schedule: &Schedule, out: &SolveOutcome, timing: bool) -> String {
    let mut s = String::new();
    let objective = out
        .objective()
        .map_or_else(|| "-".to_string(), |v| format!("{v:.9}"));
    let elapsed = if timing {
        out.elapsed.as_secs_f64()
    } else {
        0.0
    };
    let _ = writeln!(s, "status     {}", out.status);
    let _ = writeln!(s, "gates      {}", out.gate_count);
    let _ = writeln!(s, "buffer     {}", out.buffer);
    let _ = writeln!(s, "objective  {objective}");
    let _ = writeln!(s, "nodes      {}", out.nodes_explored);
    let _ = writeln!(s, "elapsed_s  {elapsed:.3}");
    if let Some(asg) = &out.assignment {
        let _ = writeln!(
            s,
            "\n{:<12} {:>7} {:>9} {:>5}",
            "flight", "arrival", "departure", "gate"
        );
        for (f, &g) in schedule.flights().iter().zip(asg.gates()) {
            let _ = writeln!(
                s,
                "{:<12} {:>7} {:>9} {:>5}",
                f.id(),
                f.arrival(),
                f.departure(),
                g
            );
        }
    }
    s
}

/// `flight_id,gate` rows in schedule order.
pub fn assignment_csv(schedule: &Schedule, assignment: &Assignment) -> String {
    let mut s = String::from("flight_id,gate\n");
    for (f, g) in schedule.flights().iter().zip(assignment.gates()) {
        let _ = writeln!(s, "{},{}", f.id(), g);
    }
    s
}

/// Parses `flight_id,gate` rows (optional header, `#` comments). Without
/// `gate_count` the count is one more than the highest gate seen.
pub fn parse_assignment(
    text: &str,
    schedule: &Schedule,
    gate_count: Option<usize>,
) -> Result<Assignment, CliError> {
    let mut pairs: Vec<(String, usize)> = Vec::new();
    let mut header_allowed = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if header_allowed && fields.first() == Some(&"flight_id") {
            header_allowed = false;
            continue;
        }
        header_allowed = false;
        let bad = |message: String| CliError::AssignmentFormat {
            line: idx + 1,
            message,
        };
        if fields.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", fields.len())));
        }
        let gate = fields[1]
            .parse()
            .map_err(|_| bad(format!("malformed gate {:?}", fields[1])))?;
        pairs.push((fields[0].to_string(), gate));
    }
    let count = gate_count.unwrap_or_else(|| pairs.iter().map(|p| p.1 + 1).max().unwrap_or(1));
    Ok(Assignment::from_pairs(
        schedule,
        pairs.iter().map(|(f, g)| (f.as_str(), *g)),
        count,
    )?)
}

fn run_eval(ctx: &mut Context<'_>, a: EvalArgs) -> Result<Output, CliError> {
    let schedule = ctx.schedule(&a.input.input)?;
    let assignment = parse_assignment(&ctx.read(&a.assignment)?, &schedule, a.gates)?;
    if a.model.buffer < 0 {
        return Err(CliError::Usage("--buffer must be non-negative".into()));
    }
    let report = evaluate(&schedule, &assignment, a.model.buffer, a.model.objective)?;
    let code = if report.feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    let text = match a.format {
        Format::Json => report.to_json() + "\n",
        Format::Table | Format::Csv => eval_table(&report),
    };
    Ok((code, text))
}

fn eval_table(r: &CostReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mode       {}", r.mode);
    let _ = writeln!(s, "buffer     {}", r.buffer);
    let _ = writeln!(s, "feasible   {}", r.feasible);
    let _ = writeln!(s, "conflicts  {}", r.conflict_count);
    let _ = writeln!(s, "total      {:.9}", r.total);
    if !r.terms.is_empty() {
        let _ = writeln!(
            s,
            "\n{:<12} {:<12} {:>5} {:>6} {:>12}",
            "earlier", "later", "gate", "gap", "value"
        );
        for t in &r.terms {
            let _ = writeln!(
                s,
                "{:<12} {:<12} {:>5} {:>6} {:>12.9}",
                t.earlier, t.later, t.gate, t.gap, t.value
            );
        }
    }
    for v in &r.violations {
        let _ = writeln!(s, "conflict: {v}");
    }
    s
}

fn run_sweep(ctx: &mut Context<'_>, a: SweepArgs) -> Result<Output, CliError> {
    if a.gates_from == 0 || a.gates_from > a.gates_to {
        return Err(CliError::Usage(format!(
            "--gates-from {} --gates-to {}: need 1 <= from <= to",
            a.gates_from, a.gates_to
        )));
    }
    let schedule = ctx.schedule(&a.input.input)?;
    let mut cfg = SolveConfig::new(a.gates_from)
        .with_buffer(a.model.buffer)
        .with_mode(a.model.objective)
        .with_seed(a.seed);
    cfg.time_limit = time_limit(a.time_limit)?;
    let rows = sweep_gates(&schedule, a.gates_from, a.gates_to, &cfg, a.engine)?;
    let timing = !a.no_timing;
    let text = match a.format {
        Format::Csv => sweep_to_csv(&rows, timing),
        Format::Table => sweep_table(&rows, timing),
        Format::Json => sweep_json(&rows, timing),
    };
    Ok((EXIT_OK, text))
}

fn sweep_table(rows: &[SweepRow], timing: bool) -> String {
    let mut s = format!(
        "{:>5}  {:<10}  {:>14}  {:>9}\n",
        "gates", "status", "objective", "runtime_s"
    );
    for r in rows {
        let obj = r
            .objective
            .map_or_else(|| "-".into(), |v| format!("{v:.4}"));
        let rt = if timing { r.runtime.as_secs_f64() } else { 0.0 };
        let _ = writeln!(
            s,
            "{:>5}  {:<10}  {:>14}  {:>9.3}",
            r.gates, r.status, obj, rt
        );
    }
    s
}

fn sweep_json(rows: &[SweepRow], timing: bool) -> String {
    let doc: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "gates": r.gates,
                "status": r.status,
                "objective": r.objective,
                "runtime_s": if timing { crate::solver::round_ms(r.runtime) } else { 0.0 },
            })
        })
        .collect();
    serde_json::to_string_pretty(&doc).expect("sweep serializes") + "\n"
}

fn run_mingates(ctx: &mut Context<'_>, a: MinGatesArgs) -> Result<Output, CliError> {
    if a.buffer < 0 {
        return Err(CliError::Usage("--buffer must be non-negative".into()));
    }
    let schedule = ctx.schedule(&a.input.input)?;
    Ok((
        EXIT_OK,
        format!("{}\n", min_gates_required(&schedule, a.buffer)),
    ))
}

fn run_gen(a: GenArgs) -> Result<Output, CliError> {
    let schedule = generate_schedule(a.count, a.start, a.end, a.stay, a.seed)?;
    Ok((EXIT_OK, schedule.to_csv()))
}

fn run_scatter(ctx: &mut Context<'_>, a: InputArgs) -> Result<Output, CliError> {
    let schedule = ctx.schedule(&a.input)?;
    Ok((EXIT_OK, scatter_export(&schedule)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut stdin = input.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["gateassign"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut stdin, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    const OVERLAP: &str = "F1,06:00,07:00\nF2,06:10,07:10\n";

    #[test]
    fn solve_exit_codes() {
        let (code, out, _) = call(&["solve", "--gates", "2", "--buffer", "15"], OVERLAP);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["objective"].as_f64(), Some(0.0));

        let (code, out, _) = call(&["solve", "--gates", "1"], OVERLAP);
        assert_eq!(code, 2);
        assert!(out.contains("\"INFEASIBLE\""));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["solve"], OVERLAP).0, 1);
        assert_eq!(
            call(&["solve", "--gates", "2", "--engine", "tabu"], OVERLAP).0,
            1
        );
        assert_eq!(call(&["frobnicate"], "").0, 1);
        assert_eq!(call(&["solve", "--gates", "2"], "F1,07:00,06:00\n").0, 1);
        assert_eq!(call(&["solve", "--gates", "0"], OVERLAP).0, 1);
        assert_eq!(call(&["solve", "--gates", "2", "/no/such/file"], "").0, 1);
        assert_eq!(
            call(&["sweep", "--gates-from", "3", "--gates-to", "2"], OVERLAP).0,
            1
        );
        assert_eq!(call(&["gen", "--count", "3", "--stay", "0"], "").0, 1);
        assert_eq!(
            call(&["solve", "--gates", "2", "--time-limit", "-1"], OVERLAP).0,
            1
        );
        assert_eq!(call(&["--help"], "").0, 0);
    }

    #[test]
    fn mingates_prints_integer() {
        let three = "A,0,60\nB,10,70\nC,20,80\n";
        assert_eq!(
            call(&["mingates", "--buffer", "15"], three),
            (0, "3\n".into(), String::new())
        );
    }

    #[test]
    fn assignment_parsing() {
        let s = parse_schedule("A,0,60\nB,120,180\n").unwrap();
        let a = parse_assignment("flight_id,gate\n# x\nB,1\nA,0\n", &s, None).unwrap();
        assert_eq!((a.gates(), a.gate_count()), (&[0, 1][..], 2));
        assert!(matches!(
            parse_assignment("A,0\n", &s, None),
            Err(CliError::Objective(ObjectiveError::MissingFlight(_)))
        ));
        assert!(matches!(
            parse_assignment("A,x\nB,0\n", &s, None),
            Err(CliError::AssignmentFormat { line: 1, .. })
        ));
    }

    #[test]
    fn solve_csv_feeds_eval() {
        let sched = "A,0,60\nB,120,180\nC,240,300\n";
        let (code, csv, _) = call(&["solve", "--gates", "1", "--format", "csv"], sched);
        assert_eq!(code, 0);
        assert_eq!(csv, "flight_id,gate\nA,0\nB,0\nC,0\n");
        let dir = std::env::temp_dir().join(format!("gateassign-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("asg.csv");
        fs::write(&path, csv).unwrap();
        let (code, out, _) = call(&["eval", "--assignment", path.to_str().unwrap()], sched);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["total"].as_f64().unwrap() - 2.0 / 90.0).abs() < 1e-12);
        fs::remove_dir_all(&dir).unwrap();
    }
}
