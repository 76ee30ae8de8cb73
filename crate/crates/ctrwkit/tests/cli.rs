use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ctrwkit::bundle::read_bundle;
use ctrwkit::io::write_step_path;
use ctrwkit::report::{canonical_text, read_report};
use ctrwkit::scenario::Scenario;
use ctrwkit_core::cadlag::StepPath;
use ctrwkit_core::integral::simulate;
use ctrwkit_core::rng::SeedSpec;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ctrwkit"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const MINIMAL: &str =
    "kind = \"simulate\"\nseed = 3\nreps = 4\nn = [50]\n\n[process]\nalpha = 1.5\nmode = \"symmetric\"\n";

#[test]
fn simulate_writes_report_and_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        bin().args(["run", "--config"]).arg(example("simulate_minimal.toml")).current_dir(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("wrote "));
    let report = read_report(&dir.path().join("out/simulate_minimal.json")).unwrap();
    assert_eq!(report.scenario, "simulate_minimal");
    assert!(report.get("n=100.x_T.mean").is_some());
    let paths = dir.path().join("out/simulate_minimal_paths");
    for stem in ["n100.r0", "n100.r9"] {
        for ext in ["x.csv", "counting.csv", "json"] {
            assert!(paths.join(format!("{stem}.{ext}")).is_file(), "{stem}.{ext}");
        }
    }
}

#[test]
fn bundles_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        bin().args(["run", "--config"]).arg(example("simulate_minimal.toml")).current_dir(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let sc = Scenario::load(&example("simulate_minimal.toml"), None).unwrap();
    let cfg = sc.process().unwrap().build(100).unwrap();
    for r in [0usize, 7] {
        let back = read_bundle(&dir.path().join("out/simulate_minimal_paths"), &format!("n100.r{r}"))
            .unwrap_or_else(|e| panic!("{}", e.line()));
        let fresh = simulate(&cfg, sc.horizon, SeedSpec::new(sc.seed, r as u64)).unwrap();
        assert_eq!(back.x, fresh.x);
        assert_eq!(back.counting, fresh.counting);
    }
}

#[test]
fn reruns_are_identical_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", MINIMAL);
    let run = |out: &str, extra: &[&str]| {
        let o = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--out", out])
            .args(extra)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        canonical_text(&std::fs::read_to_string(dir.path().join(out)).unwrap()).unwrap()
    };
    assert_eq!(run("a.json", &[]), run("b.json", &[]));
    assert_ne!(run("a.json", &[]), run("c.json", &["--seed", "4"]));
    let text = run("d.json", &["--n-list", "20,40", "--reps", "3", "--threads", "1"]);
    assert!(text.contains("n=20.x_T.mean") && text.contains("n=40.x_T.mean"));
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (MINIMAL.replace("alpha = 1.5", "alpha = 2.5"), "PARAM_ALPHA_RANGE"),
        (format!("{MINIMAL}bogus = 1\n"), "CONFIG_UNKNOWN_KEY"),
        (MINIMAL.replace("kind = \"simulate\"", "kind = \"sde\""), "CONFIG_INVALID"),
        (format!("{MINIMAL}\n[process.waiting]\nbeta = 1.2\n"), "PARAM_BETA_RANGE"),
    ];
    for (i, (text, tag)) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.toml"), text);
        let o = bin().args(["run", "--config"]).arg(&cfg).current_dir(dir.path()).output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{tag}: {}", stderr(&o));
        assert!(stderr(&o).starts_with(tag), "expected {tag}, got {}", stderr(&o));
    }
    let o = bin().args(["simulate", "--bogus"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("CLI_USAGE"));
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_expression_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        std::fs::read_to_string(example("sde.toml")).unwrap().replace("b = \"0.5 * tanh(y)\"", "b = \"0.5 * tanh(y\"");
    let cfg = write(dir.path(), "sde.toml", &text);
    let o = bin()
        .args(["sde", "--config"])
        .arg(&cfg)
        .args(["--reps", "2", "--out", "x.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("EXPR_PARSE"), "{}", stderr(&o));
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["run", "--config", "no/such/file.toml"]).current_dir(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("IO_READ"));

    let x = write(dir.path(), "x.csv", "t,value\n0,0\n0.5,1\n");
    let bad = write(dir.path(), "bad.csv", "t,value\n0,0\n0.5,oops\n");
    let o = bin()
        .args(["metrics", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&bad)
        .args(["--out", "m.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("DATA_FORMAT"), "{}", stderr(&o));

    // the report path sits under a regular file
    let o = bin()
        .args(["simulate", "--config"])
        .arg(write(dir.path(), "s.toml", MINIMAL))
        .args(["--out", "x.csv/r.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("IO_WRITE"), "{}", stderr(&o));
}

#[test]
fn metrics_on_csv_paths() {
    let dir = tempfile::tempdir().unwrap();
    let xn = StepPath::from_jumps(0.0, &[(0.45, 0.5), (0.5, 0.5)], 1.0).unwrap();
    let x = StepPath::from_jumps(0.0, &[(0.5, 1.0)], 1.0).unwrap();
    write_step_path(&dir.path().join("xn.csv"), &xn).unwrap();
    write_step_path(&dir.path().join("x.csv"), &x).unwrap();
    let o = bin()
        .args(["metrics", "--x", "xn.csv", "--y", "x.csv", "--horizon", "1", "--out", "m.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_report(&dir.path().join("m.json")).unwrap();
    assert_eq!(r.get("d_uniform").unwrap().value, 0.5);
    assert_eq!(r.get("d_j1").unwrap().value, 0.5);
    let m1 = r.get("d_m1").unwrap().value;
    assert!(m1 <= 0.05 + r.get("d_m1_mesh").unwrap().value, "{m1}");

    let o = bin()
        .args(["run", "--config"])
        .arg(example("metrics_witness.toml"))
        .args(["--out", "w.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_report(&dir.path().join("w.json")).unwrap();
    assert!(r.get("n=100.d_j1").unwrap().value >= 0.25);
}
