use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cayley_spectra_cli::report::{read_sequence_csv, read_spectrum_csv, ChainReport, SpectrumReport};
use cayley_spectra_cli::Report;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cayley-spectra"));
    cmd.env_remove("CAYLEY_SPECTRA_MAX_BALL");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (Report, PathBuf) {
    let prefix = dir.join(name);
    let mut all: Vec<&str> = args.to_vec();
    let p = prefix.to_str().unwrap();
    all.extend(["--out", p]);
    let out = run(&all);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = prefix.with_extension("json");
    let report = Report::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    (report, json)
}

fn spectrum(r: Report) -> SpectrumReport {
    match r {
        Report::Spectrum(s) => s,
        other => panic!("expected spectrum, got {other:?}"),
    }
}

fn chain(r: Report) -> ChainReport {
    match r {
        Report::Chain(c) => c,
        other => panic!("expected chain, got {other:?}"),
    }
}

#[test]
fn partition_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (r, _) = run_to(dir.path(), "t", &["partition", "--k", "2", "--subgroup", "trivial"]);
    let Report::Partition(p) = r else { panic!() };
    assert_eq!((p.r, p.q.clone()), (1, vec![vec![3]]));
    assert_eq!(p.q_h0, vec![3]);
    assert_eq!(p.n_h0, 1);

    let (r, _) = run_to(dir.path(), "h", &["partition", "--k", "2", "--subgroup", "hcap"]);
    let Report::Partition(p) = r else { panic!() };
    assert_eq!(p.r, 4);
    assert_eq!(
        p.q,
        vec![vec![1, 1, 1, 0], vec![1, 1, 0, 1], vec![1, 0, 1, 1], vec![0, 1, 1, 1]]
    );
    assert_eq!(p.n_h0, 3);
    let csv = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(csv.starts_with("coset,representative,q_0,q_1,q_2,q_3\n0,e,1,1,1,0\n"));

    let (r, _) = run_to(dir.path(), "p", &["partition", "--k", "2", "--subgroup", "hpair:1,2"]);
    let Report::Partition(p) = r else { panic!() };
    assert_eq!(p.r, 6);
}

#[test]
fn spectrum_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (r, _) = run_to(
        dir.path(),
        "t",
        &[
            "spectrum",
            "--k",
            "2",
            "--subgroup",
            "trivial",
            "--epsilon",
            "1",
            "--potential",
            "0.5",
        ],
    );
    let s = spectrum(r);
    assert_eq!(s.solutions.len(), 1);
    assert_eq!(s.solutions[0].energy, 3.5);
    assert!(s.pass);

    let (r, _) = run_to(
        dir.path(),
        "e",
        &[
            "spectrum",
            "--k",
            "2",
            "--subgroup",
            "even",
            "--epsilon",
            "1",
            "--potential",
            "0,1",
        ],
    );
    let s = spectrum(r);
    let root = 37f64.sqrt();
    assert!((s.solutions[0].energy - (1.0 - root) / 2.0).abs() < 1e-12);
    assert!((s.solutions[1].energy - (1.0 + root) / 2.0).abs() < 1e-12);
    // (E - 0)(E - 1) - 9
    assert_eq!(s.dk_coefficients, vec![-9.0, -1.0, 1.0]);
    let rows = read_spectrum_csv(std::fs::File::open(dir.path().join("e.csv")).unwrap()).unwrap();
    assert_eq!(rows, s.solutions);

    let (r, _) = run_to(
        dir.path(),
        "h",
        &["spectrum", "--k", "2", "--subgroup", "hcap", "--epsilon", "0"],
    );
    let s = spectrum(r);
    let energies: Vec<f64> = s.solutions.iter().map(|x| x.energy).collect();
    for (got, want) in energies.iter().zip([-1.0, 1.0, 1.0, 3.0]) {
        assert!((got - want).abs() < 1e-12, "{energies:?}");
    }
    assert_eq!(s.solutions[1].multiplicity, 2);
}

#[test]
fn chain_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (r, _) = run_to(dir.path(), "d", &["chain", "--k", "2", "--energy", "3"]);
    let c = chain(r);
    let cf = c.closed_form.unwrap();
    assert!(cf.degenerate);
    assert_eq!(cf.lambda1, [1.0, 0.0]);

    let (r, _) = run_to(
        dir.path(),
        "o",
        &["chain", "--k", "2", "--energy", "0", "--seeds", "1,0"],
    );
    let c = chain(r);
    assert_eq!(
        c.closed_form.as_ref().unwrap().classification,
        cayley_spectra::ChainClass::Oscillatory
    );
    assert!(c.real);
    for w in c.sequence.windows(4) {
        assert!((w[0].re - w[3].re).abs() < 1e-12, "period 3");
    }
    let rows = read_sequence_csv(std::fs::File::open(dir.path().join("o.csv")).unwrap()).unwrap();
    assert_eq!(rows, c.sequence);

    let (r, _) = run_to(dir.path(), "x", &["chain", "--k", "2", "--energy", "10"]);
    let cf = chain(r).closed_form.unwrap();
    let big = (9.0 + 77f64.sqrt()) / 2.0;
    assert!((cf.lambda2[0] - big).abs() < 1e-12);
    assert!((cf.lambda1[0] - 1.0 / big).abs() < 1e-12);
    assert!(cf.pointwise_only);
}

#[test]
fn periodic_chain_potential() {
    let dir = tempfile::tempdir().unwrap();
    let (r, json) = run_to(
        dir.path(),
        "p",
        &["chain", "--k", "3", "--energy", "2", "--potential", "0,1,-0.5"],
    );
    let c = chain(r);
    assert!(c.closed_form.is_none());
    assert_eq!(c.potential, vec![0.0, 1.0, -0.5]);
    let out = run(&["verify", json.to_str().unwrap(), "--radius", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (_, one) = run_to(
        dir.path(),
        "one",
        &["spectrum", "--k", "2", "--subgroup", "trivial", "--potential", "0.5"],
    );
    let (r, _) = run_to(dir.path(), "v1", &["verify", one.to_str().unwrap(), "--radius", "5"]);
    let Report::Verification(v) = r else { panic!() };
    assert!(v.pass);
    assert_eq!(v.checks[0].radius, 5);

    let (_, three) = run_to(
        dir.path(),
        "three",
        &["spectrum", "--k", "2", "--subgroup", "hcap", "--epsilon", "0"],
    );
    let (r, _) = run_to(dir.path(), "v3", &["verify", three.to_str().unwrap(), "--radius", "4"]);
    let Report::Verification(v) = r else { panic!() };
    assert!(v.pass);
    assert_eq!(v.checks.len(), 4);

    let (_, ch) = run_to(dir.path(), "ch", &["chain", "--k", "2", "--energy", "0.5"]);
    let (r, _) = run_to(dir.path(), "vc", &["verify", ch.to_str().unwrap(), "--radius", "6"]);
    let Report::Verification(v) = r else { panic!() };
    assert!(v.pass);
}

fn tamper(path: &Path, f: impl FnOnce(&mut Value)) {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    f(&mut v);
    std::fs::write(path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
}

#[test]
fn tampered_energy_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (_, three) = run_to(
        dir.path(),
        "three",
        &["spectrum", "--k", "2", "--subgroup", "hcap", "--epsilon", "0"],
    );
    tamper(&three, |v| {
        let e = v["solutions"][0]["energy"].as_f64().unwrap();
        v["solutions"][0]["energy"] = (e + 0.1).into();
    });
    let out = run(&["verify", three.to_str().unwrap(), "--radius", "4"]);
    assert_eq!(out.status.code(), Some(1));

    let (_, ch) = run_to(dir.path(), "ch", &["chain", "--k", "2", "--energy", "0.5"]);
    tamper(&ch, |v| {
        let e = v["energy"].as_f64().unwrap();
        v["energy"] = (e + 0.1).into();
    });
    let out = run(&["verify", ch.to_str().unwrap(), "--radius", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["spectrum", "--subgroup", "nonsense"],
        vec!["spectrum", "--subgroup", "even", "--potential", "1,2,3"],
        vec!["spectrum", "--subgroup", "zM:1,2"],
        vec!["chain", "--subgroup", "zM:1,2"],
        vec!["partition", "--k", "0", "--subgroup", "trivial"],
        vec!["spectrum", "--subgroup", "even", "--convention", "other"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["verify", missing.to_str().unwrap()]).status.code(), Some(2));
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"kind\": \"spectrum\"}").unwrap();
    assert_eq!(run(&["verify", garbage.to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "k = 2\nunknown_key = 1\n").unwrap();
    assert_eq!(
        run(&["partition", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );

    // ball guard from the environment
    let (_, one) = run_to(dir.path(), "one", &["spectrum", "--subgroup", "trivial"]);
    let out = bin()
        .args(["verify", one.to_str().unwrap(), "--radius", "5"])
        .env("CAYLEY_SPECTRA_MAX_BALL", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "k = 3\nepsilon = 0.0\n\n[hom]\nm = 4\nimages = [\"(1 2)(3 4)\", \"(1 3)(2 4)\", \"id\", \"id\"]\n",
    )
    .unwrap();
    let (r, _) = run_to(dir.path(), "s", &["spectrum", "--config", cfg.to_str().unwrap()]);
    let s = spectrum(r);
    assert_eq!(s.subgroup, "custom");
    assert_eq!(s.r, 4);
    assert!((s.solutions.last().unwrap().energy - 4.0).abs() < 1e-12);
    let (r, _) = run_to(
        dir.path(),
        "s2",
        &["spectrum", "--config", cfg.to_str().unwrap(), "--subgroup", "even"],
    );
    assert_eq!(spectrum(r).r, 2);
}

#[test]
fn stdout_json_without_out() {
    let out = run(&["partition", "--subgroup", "even"]);
    assert!(out.status.success());
    let r = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(matches!(r, Report::Partition(p) if p.r == 2));
}

#[test]
fn reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        ("p", vec!["partition", "--subgroup", "hpair:1,3", "--k", "3"]),
        (
            "s",
            vec![
                "spectrum",
                "--subgroup",
                "hcap",
                "--potential",
                "0.1,0.2,-0.3,0.4",
                "--convention",
                "laplacian",
            ],
        ),
        (
            "c",
            vec!["chain", "--energy", "1.25", "--c1", "0.5,0.25", "--c2", "-1,0"],
        ),
    ] {
        let (r, json) = run_to(dir.path(), name, &args);
        let text = std::fs::read_to_string(&json).unwrap();
        assert_eq!(r.to_json().unwrap(), text);
    }
}
