use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gateassign"))
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const OVERLAPPING: &str = "flight_id,arrival,departure\nF1,0,60\nF2,10,70\n";
const CHAIN: &str = "F1,0,60\nF2,120,180\nF3,240,300\n";

fn gen(count: &str, seed: &str) -> String {
    let o = run(&["gen", "--count", count, "--seed", seed], "");
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
}

#[test]
fn solve_two_overlapping_flights() {
    let o = run(
        &["solve", "-", "--gates", "2", "--buffer", "15"],
        OVERLAPPING,
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "OPTIMAL");
    assert_eq!(v["objective"], 0.0);

    let o = run(&["solve", "-", "--gates", "1"], OVERLAPPING);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["status"], "INFEASIBLE");
    assert!(v["objective"].is_null());
}

#[test]
fn solve_is_reproducible() {
    let input = gen("40", "7");
    let args = [
        "solve", "-", "--gates", "3", "--engine", "greedy", "--seed", "7",
    ];
    let first = run(&args, &input);
    let second = run(&args, &input);
    assert_eq!(first.status.code(), second.status.code());
    let strip = |o: &Output| {
        let mut v = json(o);
        v["elapsed_s"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&first), strip(&second));

    let mut pinned = args.to_vec();
    pinned.push("--no-timing");
    assert_eq!(run(&pinned, &input).stdout, run(&pinned, &input).stdout);
}

#[test]
fn eval_reports_cost_and_conflicts() {
    let dir = std::env::temp_dir().join(format!("gateassign-eval-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let asg = dir.join("chain.csv");
    std::fs::write(&asg, "flight_id,gate\nF1,0\nF2,0\nF3,0\n").unwrap();
    let o = run(&["eval", "-", "--assignment", asg.to_str().unwrap()], CHAIN);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["conflicts"], 0);
    assert!((v["total"].as_f64().unwrap() - 2.0 / 90.0).abs() < 1e-12);

    let bad = dir.join("bad.csv");
    std::fs::write(&bad, "F1,0\nF2,0\n").unwrap();
    let o = run(
        &["eval", "-", "--assignment", bad.to_str().unwrap()],
        OVERLAPPING,
    );
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["conflicts"], 1);
    assert_eq!(v["violations"][0]["first"], "F1");
    assert_eq!(v["violations"][0]["second"], "F2");

    let missing = dir.join("missing.csv");
    std::fs::write(&missing, "F1,0\n").unwrap();
    let o = run(
        &["eval", "-", "--assignment", missing.to_str().unwrap()],
        OVERLAPPING,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_rows_and_errors() {
    let input = gen("33", "7");
    let o = run(
        &[
            "sweep",
            "-",
            "--gates-from",
            "1",
            "--gates-to",
            "10",
            "--engine",
            "greedy+local",
        ],
        &input,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gates,status,objective,runtime_s"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 10);
    let objectives: Vec<f64> = rows.iter().filter_map(|r| r[2].parse().ok()).collect();
    assert!(!objectives.is_empty());
    assert!(objectives.windows(2).all(|w| w[1] <= w[0] + 1e-12));

    let o = run(
        &["sweep", "-", "--gates-from", "5", "--gates-to", "5"],
        &input,
    );
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = run(
        &["sweep", "-", "--gates-from", "6", "--gates-to", "5"],
        &input,
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mingates_gen_scatter() {
    let three = "A,0,60\nB,10,70\nC,20,80\n";
    let o = run(&["mingates", "-", "--buffer", "15"], three);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");

    let o = run(
        &[
            "gen", "--count", "996", "--start", "360", "--end", "1439", "--stay", "60", "--seed",
            "7",
        ],
        "",
    );
    assert_eq!(o.status.code(), Some(0));
    let schedule = stdout(&o);
    let rows: Vec<&str> = schedule.lines().skip(1).collect();
    assert_eq!(rows.len(), 996);
    for row in &rows {
        let f: Vec<i64> = row.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[1] - f[0], 60);
    }

    let o = run(&["scatter", "-"], &schedule);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 997);

    let o = run(&["gen", "--count", "5", "--stay", "0"], "");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solve_with_one_gate_per_flight_is_free() {
    for seed in ["1", "2", "3"] {
        let input = gen("25", seed);
        for engine in ["exact", "greedy", "greedy+local"] {
            let o = run(&["solve", "-", "--gates", "25", "--engine", engine], &input);
            assert_eq!(o.status.code(), Some(0));
            assert_eq!(json(&o)["objective"], 0.0);
            assert!(stdout(&o).contains("\"objective\": 0.0"));
        }
    }
}

#[test]
fn exit_status_is_total() {
    let cases: &[(&[&str], &str, i32)] = &[
        (&["solve", "-", "--gates", "0"], OVERLAPPING, 1),
        (&["solve", "/nonexistent/file.csv", "--gates", "1"], "", 1),
        (&["solve", "-", "--gates", "1"], "F1,07:30,06:30\n", 1),
        (
            &["solve", "-", "--gates", "2", "--objective", "bogus"],
            OVERLAPPING,
            1,
        ),
        (&["nosuch"], "", 1),
        (&["--help"], "", 0),
        (
            &["solve", "-", "--gates", "2", "--format", "table"],
            OVERLAPPING,
            0,
        ),
        (
            &["solve", "-", "--gates", "2", "--format", "csv"],
            OVERLAPPING,
            0,
        ),
    ];
    for (args, input, code) in cases {
        let o = run(args, input);
        assert_eq!(o.status.code(), Some(*code), "{args:?}");
    }
    let o = run(&["solve", "-", "--gates", "1"], "F1,07:30,06:30\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("departure before arrival, line 1"));
}
