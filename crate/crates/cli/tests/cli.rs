use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dissipaq::ResultTable;

fn dissipaq(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dissipaq"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("DISSIPAQ_WORKERS")
        .output()
        .unwrap()
}

fn read(path: &Path) -> ResultTable {
    ResultTable::parse(&fs::read(path).unwrap()).unwrap()
}

const SMALL_GRID: [&str; 6] = ["--x_min", "-8", "--x_max", "8", "--n", "200"];

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn spectrum_defaults_reproduce_the_oscillator() {
    let dir = tempfile::tempdir().unwrap();
    let o = dissipaq(&["spectrum"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let t = read(&dir.path().join("spectrum.csv"));
    assert_eq!(t.columns(), ["index", "re_lambda", "im_lambda", "residual"]);
    let (re, im) = (
        t.column("re_lambda").unwrap(),
        t.column("im_lambda").unwrap(),
    );
    assert!(re[0].abs() < 1e-3 && im[0].abs() < 1e-3);
    assert!((re[1] - 0.99499).abs() < 1e-3 && (im[1] - 0.1).abs() < 1e-3);
    assert!(t.provenance().starts_with(&format!(
        "dissipaq {} command=spectrum",
        env!("CARGO_PKG_VERSION")
    )));
}

#[test]
fn overdamped_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = dissipaq(&["spectrum", "--gamma", "1.5"], &out);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(
        err.starts_with("error code=2 kind=invalid message=overdamped"),
        "{err}"
    );
    assert!(!out.exists());
}

#[test]
fn malformed_input_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "gamma = 0.1\nfriction = 2\n").unwrap();
    let o = dissipaq(&["spectrum", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("kind=config message=line 2: key `friction`: unknown key"),
        "{}",
        stderr(&o)
    );

    let o = dissipaq(&["spectrum", "--friction", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = dissipaq(&["warp"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = dissipaq(&["spectrum", "--config", "/no/such/file"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = dissipaq(&["instanton", "--nodes", "256", "--max_iter", "1"], &out);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error code=3 kind=numerical "));
    assert!(!out.exists());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# damped oscillator\ngamma = 0.2\nlevels = 3\nx_min = -8\nx_max = 8\nn = 200\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let o = dissipaq(
        &["spectrum", "--config", c, "--gamma", "0.05"],
        &dir.path().join("a"),
    );
    assert!(o.status.success());
    let t = read(&dir.path().join("a/spectrum.csv"));
    assert_eq!(t.rows().len(), 3);
    assert!((t.column("im_lambda").unwrap()[1] - 0.05).abs() < 1e-3);
    assert!(t.provenance().contains(" gamma=0.05 "));
}

#[test]
fn classical_without_friction_conserves_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = dissipaq(&["classical", "--gamma", "0"], dir.path());
    assert!(o.status.success());
    let h = read(&dir.path().join("trajectory.csv"))
        .column("H")
        .unwrap();
    assert_eq!(h.len(), 1001);
    assert!(h.iter().all(|v| (v - h[0]).abs() < 1e-10));
}

#[test]
fn sweep_writes_one_directory_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["spectrum", "--sweep", "0,0.05,0.1", "--levels", "2"];
    args.extend(SMALL_GRID);
    assert!(dissipaq(&args, dir.path()).status.success());
    for (k, g) in [0.0, 0.05, 0.1].into_iter().enumerate() {
        let t = read(&dir.path().join(format!("sweep_{k:03}/spectrum.csv")));
        assert!((t.column("im_lambda").unwrap()[1] - g).abs() < 1e-3);
    }
}

#[test]
fn tunnel_rows_follow_sweep_and_conventions() {
    let dir = tempfile::tempdir().unwrap();
    assert!(dissipaq(&["tunnel", "--sweep", "0,0.1"], dir.path())
        .status
        .success());
    let t = read(&dir.path().join("tunneling.csv"));
    assert_eq!(
        t.columns(),
        [
            "gamma",
            "exponent_quadrature",
            "exponent_closed_form",
            "convention"
        ]
    );
    assert_eq!(t.rows().len(), 6);
    let dir = tempfile::tempdir().unwrap();
    assert!(dissipaq(&["tunnel", "--convention", "scaled"], dir.path())
        .status
        .success());
    assert_eq!(read(&dir.path().join("tunneling.csv")).rows().len(), 1);
}

#[test]
fn compare_emits_the_sign_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let o = dissipaq(
        &["compare", "--sweep", "0,0.1,0.2", "--nodes", "512"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let t = read(&dir.path().join("actions.csv"));
    assert_eq!(t.columns(), ["gamma", "cl_action", "ch_exponent"]);
    let (cl, ch) = (
        t.column("cl_action").unwrap(),
        t.column("ch_exponent").unwrap(),
    );
    assert_eq!(cl.len(), 3);
    assert!(cl.windows(2).all(|w| w[1] >= w[0]));
    assert!(ch.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn instanton_with_period_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = dissipaq(
        &["instanton", "--nodes", "256", "--period_check", "true"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read(&dir.path().join("instanton.csv")).rows().len(), 256);
    let c = read(&dir.path().join("period_check.csv"));
    assert!(c.column("relative_change").unwrap()[0] < 0.05);
}

#[test]
fn evolve_and_worker_count_do_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "evolve",
        "--horizon",
        "1",
        "--sweep",
        "0.1,0.2",
        "--levels",
        "3",
    ];
    args.extend(SMALL_GRID);
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_dissipaq"))
            .args(&args)
            .arg("--out")
            .arg(&out)
            .env("DISSIPAQ_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(out.join("sweep_001/evolution.csv")).unwrap()
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "4"));
    let t = ResultTable::parse(&a).unwrap();
    assert_eq!(
        t.columns(),
        ["t", "norm", "overlap_ground", "overlap_1", "overlap_2"]
    );
}

#[test]
fn every_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    assert!(dissipaq(&["tunnel"], dir.path()).status.success());
    let bytes = fs::read(dir.path().join("tunneling.csv")).unwrap();
    assert_eq!(ResultTable::parse(&bytes).unwrap().to_bytes(), bytes);
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dissipaq"))
        .arg("--help")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("--sweep"));
    drop(dir);
}
