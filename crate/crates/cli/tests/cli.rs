use std::path::{Path, PathBuf};
use std::process::Command;

use chancert_cli::files::{MatrixFile, ReportFile};
use tempfile::TempDir;

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_chancert")).args(args).output().expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).expect("utf8"),
        stderr: String::from_utf8(out.stderr).expect("utf8"),
        code: out.status.code().expect("exit code"),
    }
}

fn example(dir: &Path, name: &str) -> PathBuf {
    let r = run(&["example", name]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, r.stdout).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn validate_exit_codes_follow_the_invariants() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["validate", p(&example(dir.path(), "identity"))]).code, 0);
    assert_eq!(run(&["validate", p(&example(dir.path(), "bell-gram"))]).code, 0);

    // CNOT is CPTP but signals from A to B.
    let r = run(&["validate", p(&example(dir.path(), "cnot"))]);
    assert_eq!(r.code, 1);
    let report = ReportFile::parse(&r.stdout).unwrap();
    assert_eq!(report.exit_code, 1);
    assert!(report.reports.iter().any(|r| r.is_outside()));
}

#[test]
fn decohere_bell_basis_unitary() {
    let dir = TempDir::new().unwrap();
    let r = run(&["decohere", p(&example(dir.path(), "bell-basis-unitary"))]);
    assert_eq!(r.code, 0);
    let s = MatrixFile::parse(&r.stdout).unwrap().distribution().unwrap().to_stochastic();
    for o in 0..4 {
        for i in 0..4 {
            // ½(1⊗1 + X⊗X): weight ½ on o = i and on o = i xor 3.
            let expected = if o == i || o == (i ^ 3) { 0.5 } else { 0.0 };
            assert!((s[(o, i)] - expected).abs() < 1e-12, "S[{o},{i}] = {}", s[(o, i)]);
        }
    }
}

#[test]
fn certify_pr_box() {
    let dir = TempDir::new().unwrap();
    let pr = example(dir.path(), "pr-box");
    assert_eq!(run(&["certify", p(&pr), "--set", "local"]).code, 1);
    assert_eq!(run(&["certify", p(&pr), "--set", "npa1"]).code, 1);
    assert_eq!(run(&["certify", p(&pr), "--set", "ns"]).code, 0);
}

#[test]
fn noise_sweep_corners() {
    let r = run(&["noise-sweep", "--resolution", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "p,q,negativity\n0,0,0\n0,1,0\n1,0,0.5000000000000001\n1,1,0\n");
}

#[test]
fn csv_output_is_byte_stable() {
    let a = run(&["noise-sweep", "--resolution", "7"]);
    let b = run(&["--jobs", "1", "noise-sweep", "--resolution", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["cross-section", "--resolution", "5"]);
    let d = run(&["cross-section", "--resolution", "5"]);
    assert_eq!(c.code, 0);
    assert_eq!(c.stdout, d.stdout);
    let mut lines = c.stdout.lines();
    assert_eq!(lines.next(), Some("s,t,region"));
    assert_eq!(lines.count(), 25);
    assert!(c.stdout.contains("0,0,local\n"));
    assert!(c.stdout.contains("1,1,signaling-excluded\n"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let r = run(&["validate", p(&missing)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error:"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(run(&["certify", p(&garbage), "--set", "local"]).code, 2);

    let wrong_format = dir.path().join("wrong.json");
    std::fs::write(&wrong_format, r#"{"format":"other/9","kind":"state"}"#).unwrap();
    assert_eq!(run(&["validate", p(&wrong_format)]).code, 2);

    assert_eq!(run(&["noise-sweep", "--resolution", "1"]).code, 2);
    assert_eq!(run(&["cross-section", "--resolution", "0"]).code, 2);

    // A channel where a distribution is expected.
    let identity = example(dir.path(), "identity");
    assert_eq!(run(&["lose-from-strategy", p(&identity)]).code, 2);
}

#[test]
fn witness_reports_the_trace_identity() {
    let dir = TempDir::new().unwrap();
    let r = run(&["witness", p(&example(dir.path(), "cnot")), "--functional", "chsh", "--set", "L"]);
    assert_eq!(r.code, 0);
    let report = ReportFile::parse(&r.stdout).unwrap();
    let v = |k: &str| report.values[k].as_f64().unwrap();
    assert!((v("trace_jw") - (v("gamma_s") - v("gamma_of_decoherent_action"))).abs() < 1e-9);
}

#[test]
fn seesaw_is_deterministic_under_a_seed() {
    let dir = TempDir::new().unwrap();
    let ch = example(dir.path(), "bell-gram-identity");
    let inputs = example(dir.path(), "plus-inputs");
    let args = ["seesaw", p(&ch), p(&inputs), "--restarts", "2", "--seed", "7"];
    let a = ReportFile::parse(&run(&args).stdout).unwrap();
    let b = ReportFile::parse(&run(&args).stdout).unwrap();
    assert_eq!(a.seed, Some(7));
    assert_eq!(a.values["gamma_lower_bound"], b.values["gamma_lower_bound"]);
    assert_eq!(a.values["alice_measurement"], b.values["alice_measurement"]);
    let value = a.values["gamma_lower_bound"].as_f64().unwrap();
    assert!((value - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{value}");
}

#[test]
fn lose_channel_from_tsirelson_strategy() {
    let dir = TempDir::new().unwrap();
    let r = run(&["lose-from-strategy", p(&example(dir.path(), "tsirelson-strategy"))]);
    assert_eq!(r.code, 0);
    let path = dir.path().join("lose.json");
    std::fs::write(&path, &r.stdout).unwrap();
    assert_eq!(run(&["validate", p(&path)]).code, 0);
    // Decohered first, so the local test sees the Tsirelson correlations.
    assert_eq!(run(&["certify", p(&path), "--set", "local"]).code, 1);
    assert_eq!(run(&["certify", p(&path), "--set", "npa1"]).code, 0);
}

#[test]
fn simulate_computational_protocol() {
    let dir = TempDir::new().unwrap();
    let proto = example(dir.path(), "computational-protocol");
    let ch = example(dir.path(), "bell-basis-unitary");
    let r = run(&["simulate", p(&proto), "--channel", p(&ch)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let sim = MatrixFile::parse(&r.stdout).unwrap().distribution().unwrap();
    let dec = MatrixFile::parse(&run(&["decohere", p(&ch)]).stdout).unwrap().distribution().unwrap();
    assert!(sim.max_abs_diff(&dec) < 1e-12);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let r = run(&["--output", p(&out), "noise-sweep", "--resolution", "3"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("p,q,negativity\n"));
}

#[test]
fn matrix_files_round_trip() {
    let dir = TempDir::new().unwrap();
    for name in ["identity", "bell-gram", "pr-box", "chsh", "tsirelson-strategy", "plus-inputs", "computational-protocol"] {
        let text = std::fs::read_to_string(example(dir.path(), name)).unwrap();
        let file = MatrixFile::parse(&text).unwrap();
        assert_eq!(file.to_json(), text, "{name}");
    }
}
