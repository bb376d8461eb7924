use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn chainbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainbell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn manifest(data: &Path) -> Value {
    let mut name = data.as_os_str().to_owned();
    name.push(".manifest.json");
    serde_json::from_str(&fs::read_to_string(PathBuf::from(name)).unwrap()).unwrap()
}

/// Data rows of a CSV file (comment and header skipped), split into fields.
fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# chainbell-"));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn curve_starts_at_maximal_violation() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "curve.csv");
    let run = chainbell(&[
        "curve",
        "--n-sites",
        "3",
        "--t-max",
        "20",
        "--t-steps",
        "2000",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let (header, rows) = csv_rows(&out);
    assert_eq!(
        header,
        [
            "t",
            "tJ",
            "tJ_over_N",
            "i_ch",
            "gnn_abs2",
            "g1n_abs2",
            "re_gnn",
            "violation_flag"
        ]
    );
    assert_eq!(rows.len(), 2001);
    let first: f64 = rows[0][3].parse().unwrap();
    assert!((first - 1.2071068).abs() < 1e-7);
    assert_eq!(rows[0][7], "1");

    let m = manifest(&out);
    assert_eq!(m["convention_used"], "plain");
    assert_eq!(m["convention_probe"]["selected"], "plain");
    assert_eq!(m["config"]["t_steps"], 2000);
    assert!(m["summary"]["t_star_numeric"].as_f64().unwrap() > 0.0);
}

#[test]
fn long_chain_flattens_without_violations() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "long.csv");
    let run = chainbell(&[
        "curve",
        "--n-sites",
        "128",
        "--t-max",
        "200",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let (_, rows) = csv_rows(&out);
    let late: Vec<&Vec<String>> = rows
        .iter()
        .filter(|r| r[1].parse::<f64>().unwrap() >= 50.0)
        .collect();
    assert!(!late.is_empty());
    assert!(late.iter().all(|r| r[7] == "0"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&chainbell(&["curve", "--t-steps", "0"])), 1);
    assert_eq!(code(&chainbell(&["curve", "--no-such-flag"])), 1);
    assert_eq!(code(&chainbell(&["curve", "--n-sites", "3,4"])), 1);
    assert_eq!(code(&chainbell(&["verify", "--n-sites", "11"])), 1);
    assert_eq!(code(&chainbell(&["conjecture", "--t-steps", "0"])), 1);
    assert_eq!(code(&chainbell(&["--help"])), 0);
}

#[test]
fn verify_passes_with_auto_convention() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "verify.csv");
    let run = chainbell(&[
        "verify",
        "--n-sites",
        "2,3,4,5",
        "--instances",
        "10",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let m = manifest(&out);
    assert_eq!(m["all_checks_pass"], true);
    let names: Vec<&str> = m["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in [
        "oracle_equivalence",
        "vacuum_branch_constant",
        "propagator_free_fermion",
    ] {
        assert!(names.contains(&expected), "{names:?}");
    }
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 4 * 3);
}

#[test]
fn verify_with_wrong_convention_exits_two() {
    let run = chainbell(&[
        "verify",
        "--convention",
        "alternating",
        "--n-sites",
        "2,3,4",
        "--mu-over-j=-1",
        "--instances",
        "5",
    ]);
    assert_eq!(code(&run), 2);
    assert!(
        stderr(&run).contains("FAIL propagator_free_fermion"),
        "{}",
        stderr(&run)
    );
}

#[test]
fn conjecture_table_covers_requested_chains() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "conj.csv");
    let run = chainbell(&["conjecture", "--n-sites", "2,3,4,5,6", "--output", s(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert!(r[2].parse::<f64>().unwrap() <= 1e-9);
        assert_eq!(r[4], "1");
    }
    assert!(stderr(&run).contains("MiB"));
}

#[test]
fn sweep_is_deterministic_and_sorted() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.csv");
    let b = path(&dir, "b.csv");
    let common = ["sweep", "--t-max", "2", "--t-steps", "2000"];
    let run_a = chainbell(
        &[
            &common[..],
            &[
                "--n-sites",
                "16,8",
                "--mu-over-j=-1,-10",
                "--threads",
                "4",
                "--output",
                s(&a),
            ],
        ]
        .concat(),
    );
    let run_b = chainbell(
        &[
            &common[..],
            &[
                "--n-sites",
                "8,16",
                "--mu-over-j=-10,-1",
                "--threads",
                "1",
                "--output",
                s(&b),
            ],
        ]
        .concat(),
    );
    assert_eq!(code(&run_a), 0, "{}", stderr(&run_a));
    assert_eq!(code(&run_b), 0, "{}", stderr(&run_b));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let (_, rows) = csv_rows(&a);
    assert_eq!(rows.len(), 4 * 2001);
    let keys: Vec<(usize, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert!(keys
        .windows(2)
        .all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 <= w[1].1)));

    // a strong field makes I cross 1 several times before the first dip
    let m = manifest(&a);
    for series in m["summary"]["series"].as_array().unwrap() {
        if series["mu_over_j"] == -10.0 {
            assert!(series["interval_count"].as_u64().unwrap() >= 2, "{series}");
        }
    }
}

#[test]
fn hv_is_reproducible_and_reports_worked_example() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "hv1.json");
    let b = path(&dir, "hv2.json");
    for p in [&a, &b] {
        let run = chainbell(&["hv", "--seed", "7", "--format", "json", "--output", s(p)]);
        assert_eq!(code(&run), 0, "{}", stderr(&run));
    }
    let (ja, jb) = (
        fs::read_to_string(&a).unwrap(),
        fs::read_to_string(&b).unwrap(),
    );
    let data: Value = serde_json::from_str(&ja).unwrap();
    assert_eq!(data["rows"].as_array().unwrap().len(), 100);
    assert_eq!(
        data["rows"],
        serde_json::from_str::<Value>(&jb).unwrap()["rows"]
    );

    let m = manifest(&a);
    let worked = m["summary"]["plus_state_example"].as_array().unwrap();
    assert_eq!(worked.len(), 4);
    for w in worked {
        assert!((w["direct"].as_f64().unwrap() - 0.25).abs() < 1e-12);
        assert!((w["hidden_variable"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn replay_reproduces_data_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    for (name, format) in [("orig.csv", "csv"), ("orig.json", "json")] {
        let orig = path(&dir, name);
        let again = path(&dir, &format!("replayed.{format}"));
        let run = chainbell(&[
            "curve",
            "--n-sites",
            "5",
            "--t-max",
            "7",
            "--t-steps",
            "300",
            "--format",
            format,
            "--output",
            s(&orig),
        ]);
        assert_eq!(code(&run), 0, "{}", stderr(&run));
        let mut mpath = orig.as_os_str().to_owned();
        mpath.push(".manifest.json");
        let replay = chainbell(&[
            "replay",
            PathBuf::from(mpath).to_str().unwrap(),
            "--output",
            s(&again),
        ]);
        assert_eq!(code(&replay), 0, "{}", stderr(&replay));
        assert_eq!(fs::read(&orig).unwrap(), fs::read(&again).unwrap());
    }
}

#[test]
fn config_file_fills_in_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "run.cfg");
    fs::write(
        &cfg,
        "# curve settings\nn_sites = 4\nt_max = 2\nt_steps = 10\nmu_over_j = -2\n",
    )
    .unwrap();
    let out = path(&dir, "cfg.csv");
    let run = chainbell(&[
        "curve",
        "--config",
        s(&cfg),
        "--t-steps",
        "20",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let m = manifest(&out);
    assert_eq!(m["config"]["n_sites"][0], 4);
    assert_eq!(m["config"]["mu_over_j"][0], -2.0);
    assert_eq!(m["config"]["t_steps"], 20);
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 21);

    fs::write(&cfg, "n_sites 4\n").unwrap();
    assert_eq!(code(&chainbell(&["curve", "--config", s(&cfg)])), 1);
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("missing").join("x.csv");
    assert_eq!(
        code(&chainbell(&[
            "curve",
            "--n-sites",
            "3",
            "--output",
            s(&out)
        ])),
        1
    );
}
