use std::path::Path;
use std::process::{Command, Output};

use graph_purify_cli::scenario::{GraphSpec, Range, Scenario, SizeRange, StopSpec};
use proptest::prelude::*;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graph-purify")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// CSV body without the version line.
fn body(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn ghz_restricted_threshold_row() {
    let o = run(&["threshold", "--graph", "ghz", "--n", "5", "--family", "restricted-bitflip", "--quantity", "pmin"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.starts_with("# graph-purify "));
    assert!(csv.contains("graph_kind,N,family,p,quantity,value,tolerance,rounds_used"));
    let rows = body(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..5], ["ghz", "5", "RESTRICTED_BITFLIP", "", "p_min"]);
    let value: f64 = rows[0][5].parse().unwrap();
    assert!((value - 0.840896).abs() < 1e-3, "{value}");
}

#[test]
fn pure_input_needs_no_rounds() {
    let o = run(&["purify", "--graph", "path", "--n", "4", "--family", "rho-a", "--param", "1.0", "--p", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("verdict=CONVERGED rounds=0"), "{}", stderr(&o));
    assert!(body(&stdout(&o)).is_empty());
}

#[test]
fn purify_trace_columns() {
    let o = run(&["purify", "--graph", "ghz", "--n", "3", "--family", "rho-q", "--param", "0.8", "--p", "0.97"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert!(csv.contains("round,protocol,F_before,F_after,p_succ,cumulative_expected_cost"));
    let rows = body(&csv);
    assert!(rows.len() > 2);
    assert_eq!(rows[0][1], "P1");
    assert_eq!(rows[1][1], "P2");
    // 17 significant digits
    assert_eq!(rows[0][2].split('e').next().unwrap().len(), 18);
}

#[test]
fn bepp_comparison_favors_multiparty_protocol() {
    let o = run(&["compare-bepp", "--graph", "path", "--n", "4", "--p-grid", "0.94:1.0:0.005"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = body(&stdout(&o));
    assert_eq!(rows.len(), 13);
    for r in rows {
        let (mepp, bepp): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(mepp >= bepp, "{r:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let o = run(&["threshold", "--graph", "ghz", "--n", "3", "--quantity", "pmin", "--p", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--p"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["threshold", "--graph", "ghz", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn odd_cycle_file_is_reported_with_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("triangle.txt");
    std::fs::write(&path, "3 3\n0 1\n1 2\n2 0\n").unwrap();
    let o = run(&["threshold", "--graph-file", path.to_str().unwrap(), "--quantity", "qmin"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("triangle.txt") && err.contains("odd cycle"), "{err}");
}

#[test]
fn numerical_failure_exits_3_naming_the_cell() {
    let o = run(&["threshold", "--graph", "ring", "--n", "6", "--family", "rho-x", "--quantity", "fmin", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("graph=ring N=6 family=RHO_X p=0.5"), "{err}");
}

#[test]
fn oracle_check_passes() {
    let o = run(&["oracle-check", "--states", "3", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(body(&stdout(&o)).len(), 4);
}

#[test]
fn scan_is_deterministic_and_ordered() {
    let args = ["scan", "--graph", "path", "--n", "2:5", "--quantity", "fmax", "--p", "0.9:1.0:0.02"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    let (a, b) = (body(&stdout(&a)), body(&stdout(&b)));
    assert_eq!(a, b);
    assert_eq!(a.len(), 4 * 6);
    let keys: Vec<(usize, f64)> = a.iter().map(|r| (r[1].parse().unwrap(), r[3].parse().unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn scan_leaves_cells_without_fixed_point_empty() {
    // GHZ-3 stops purifying near p = 0.947
    let o = run(&["scan", "--graph", "ghz", "--n", "3", "--quantity", "fmax", "--p", "0.5:0.98:0.48"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = body(&stdout(&o));
    assert_eq!(rows[0][5], "");
    assert!(!rows[1][5].is_empty());
}

#[test]
fn flags_override_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.toml");
    let saved = dir.path().join("merged.toml");
    let out = dir.path().join("out.csv");
    let s = Scenario {
        graph: GraphSpec { kind: Some("ghz".into()), n: Some(SizeRange { lo: 4, hi: 4 }), ..GraphSpec::default() },
        quantity: Some("fmax".into()),
        p: Range::single(0.9),
        ..Scenario::default()
    };
    std::fs::write(&file, s.to_toml()).unwrap();
    let o = run(&[
        "threshold",
        "--scenario",
        file.to_str().unwrap(),
        "--p",
        "0.97",
        "--save-scenario",
        saved.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let merged = Scenario::load(Path::new(&saved)).unwrap();
    assert_eq!(merged.p, Range::single(0.97));
    assert_eq!(merged.graph, s.graph);
    let rows = body(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows[0][0], "ghz");
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 0.97);
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (
        prop::sample::select(vec!["ghz", "path", "ring", "grid"]),
        1usize..30,
        0usize..5,
        prop::option::of(prop::sample::select(vec!["rho-q", "RHO_X", "rho_a", "restricted"])),
        prop::option::of((0.0f64..1.0, 0.0f64..1.0)),
        (0.01f64..1.0, prop::option::of(1e-4f64..0.1)),
        0.0f64..0.5,
        prop::collection::vec(prop::sample::select(vec!["P1", "P2"]), 1..4),
        (0.0f64..1e-3, 0.0f64..1e-6, 1usize..10_000),
        prop::option::of(prop::sample::select(vec!["fmin", "fmax", "qmin", "pmin"])),
        (prop::option::of(1e-9f64..1e-2), 0..=i64::MAX as u64),
    )
        .prop_map(|(kind, n, extra, family, param, (p, step), f_m, schedule, stop, quantity, (tolerance, seed))| Scenario {
            graph: GraphSpec { kind: Some(kind.into()), n: Some(SizeRange { lo: n, hi: n + extra }), ..GraphSpec::default() },
            family: family.map(String::from),
            param: param.map(|(a, b)| Range { lo: a.min(b), hi: a.max(b), step: None }),
            p: Range { lo: p, hi: 1.0, step },
            f_m,
            schedule: schedule.into_iter().map(String::from).collect(),
            stop: StopSpec { epsilon: stop.0, tol: stop.1, max_rounds: stop.2 },
            quantity: quantity.map(String::from),
            tolerance,
            seed,
            out: None,
        })
}

proptest! {
    #[test]
    fn scenario_round_trips_through_toml(s in scenario()) {
        prop_assert!(s.validate().is_ok());
        let back = Scenario::from_toml(&s.to_toml()).unwrap();
        prop_assert_eq!(back, s);
    }
}
