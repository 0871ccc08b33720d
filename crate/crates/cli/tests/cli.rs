use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn entswap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entswap")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let col = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[col].to_string()).collect()
}

fn ppt_scan_rows(out: &Output) -> Vec<(usize, f64, f64)> {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[1].parse().unwrap(), rec[3].parse().unwrap(), rec[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn exact_moments_print_reduced_fractions() {
    let cases = [
        (["--case", "indep", "--p", "1"], "36"),
        (["--case", "indep", "--p", "2"], "684"),
        (["--case", "equal", "--p", "1"], "48"),
    ];
    for (head, want) in cases {
        let mut args = vec!["moments", "exact"];
        args.extend(head);
        args.extend(["--d1", "2", "--d2", "2", "--s", "3"]);
        let out = entswap(&args);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), want);
    }
    // Non-integral values stay fractions; c = 3/2 at d2 = 2 realizes s = 3.
    let out = entswap(&["moments", "exact", "--p", "1", "--d", "2", "--c", "3/2"]);
    assert_eq!(stdout(&out).trim(), "36");
}

#[test]
fn exact_moment_errors_map_to_exit_codes() {
    assert_eq!(code(&entswap(&["moments", "exact", "--p", "9", "--d", "2", "--s", "3"])), 3);
    assert_eq!(code(&entswap(&["moments", "exact", "--case", "equal", "--p", "5", "--d", "2", "--s", "3"])), 3);
    assert_eq!(code(&entswap(&["moments", "exact", "--p", "1", "--d", "2", "--s", "3", "--c", "2"])), 2);
    assert_eq!(code(&entswap(&["moments", "exact", "--p", "1", "--d", "2"])), 2);
    assert_eq!(code(&entswap(&["moments", "exact", "--p", "1", "--d", "2", "--c", "0"])), 2);
    assert_eq!(code(&entswap(&["moments", "exact", "--p", "1", "--d", "0", "--s", "1"])), 2);
}

#[test]
fn limit_moments_print_laurent_polynomials() {
    let cases: [(&[&str], &str); 4] = [
        (&["--p", "4"], "c^-2 + 2"),
        (&["--p", "3", "--c", "2"], "1/2"),
        (&["--p", "1"], "0"),
        (&["--p", "4", "--c", "2"], "9/4"),
    ];
    for (tail, want) in cases {
        let mut args = vec!["moments", "limit"];
        args.extend(tail);
        let out = entswap(&args);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), want);
    }
    assert_eq!(code(&entswap(&["moments", "limit", "--p", "0"])), 2);
    assert_eq!(code(&entswap(&["moments", "limit", "--p", "2", "--c", "x"])), 2);
}

#[test]
fn verify_reports_each_identity() {
    let out = entswap(&["verify", "--pmax", "6"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in ["nc_count_catalan", "biane_bijection", "inclusion_exclusion", "swap_routes_agree"] {
        assert!(text.contains(&format!("[PASS] {name}")), "{text}");
    }
    assert!(!text.contains("[FAIL]"));
    assert_eq!(code(&entswap(&["verify", "--pmax", "99"])), 3);
    assert_eq!(code(&entswap(&["verify", "--pmax", "0"])), 2);
}

#[test]
fn simulate_writes_limit_values_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = entswap(&[
        "simulate", "--case", "indep", "--d", "16", "--c", "2", "--pmax", "4", "--samples", "200", "--seed", "7",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let limits: Vec<f64> = csv_column(&out_dir.join("moments.csv"), "limit_value").iter().map(|x| x.parse().unwrap()).collect();
    assert_eq!(limits, vec![0.0, 1.0, 0.5, 2.25]);
    assert_eq!(csv_column(&out_dir.join("eigs.csv"), "value").len(), 200 * 256);

    let manifest = read_json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["realized_s"], 32);
    assert_eq!(manifest["params"]["c"], "2");
    for name in ["eigs.csv", "moments.csv"] {
        let bytes = fs::read(out_dir.join(name)).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(manifest["outputs"][name], digest.as_str());
    }
}

#[test]
fn rational_c_realizes_rounded_s() {
    let dir = tempfile::tempdir().unwrap();
    let out = entswap(&[
        "simulate", "--d", "3", "--c", "5/6", "--pmax", "2", "--samples", "2", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["realized_s"], 3);
    assert_eq!(manifest["params"]["c"], "1");
}

#[test]
fn simulate_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = entswap(&[
            "simulate", "--d1", "3", "--d2", "4", "--s", "5", "--samples", "24", "--seed", "99", "--threads", threads,
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        path
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "4");
    for name in ["eigs.csv", "moments.csv"] {
        let reference = fs::read(a.join(name)).unwrap();
        assert_eq!(reference, fs::read(b.join(name)).unwrap(), "{name} differs between runs");
        assert_eq!(reference, fs::read(c.join(name)).unwrap(), "{name} differs between thread counts");
    }
}

#[test]
fn manifest_reproduces_its_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let out = entswap(&["--seed", "5", "simulate", "--d", "3", "--s", "4", "--samples", "6", "--out", first.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let manifest = read_json(&first.join("manifest.json"));

    let second = dir.path().join("second");
    let argv: Vec<String> = manifest["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let out_pos = argv.iter().position(|a| a == "--out").unwrap();
    let mut replay = argv.clone();
    replay[out_pos + 1] = second.to_str().unwrap().to_string();
    let replay: Vec<&str> = replay.iter().map(String::as_str).collect();
    assert_eq!(code(&entswap(&replay)), 0);

    let again = read_json(&second.join("manifest.json"));
    assert_eq!(again["outputs"], manifest["outputs"]);
    assert_eq!(again["params"], manifest["params"]);
    for name in ["eigs.csv", "moments.csv"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap());
    }
}

#[test]
fn equal_case_moments_are_marked_exploratory() {
    let dir = tempfile::tempdir().unwrap();
    let out = entswap(&[
        "simulate", "--case", "equal", "--d", "3", "--s", "4", "--pmax", "2", "--samples", "4", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(csv_column(&dir.path().join("moments.csv"), "exploratory"), vec!["true", "true"]);
    assert_eq!(read_json(&dir.path().join("manifest.json"))["params"]["case"], "equal");
}

#[test]
fn simulate_needs_an_output_directory() {
    assert_eq!(code(&entswap(&["simulate", "--d", "3", "--s", "4"])), 2);
    assert_eq!(code(&entswap(&["simulate", "--d", "3", "--s", "4", "--samples", "1", "--out", "/tmp/unused"])), 2);
}

#[test]
fn json_format_writes_arrays_of_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = entswap(&[
        "--format", "json", "simulate", "--d", "2", "--s", "3", "--pmax", "2", "--samples", "3", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let moments = read_json(&dir.path().join("moments.json"));
    assert_eq!(moments.as_array().unwrap().len(), 2);
    assert_eq!(moments[1]["p"], 2);
    assert!(moments[0]["mean"].is_f64());
    let eigs = read_json(&dir.path().join("eigs.json"));
    assert_eq!(eigs.as_array().unwrap().len(), 3 * 4);
}

#[test]
fn spectrum_of_one_draw_at_d48_fits_the_limit_law() {
    let dir = tempfile::tempdir().unwrap();
    let out = entswap(&["--seed", "48", "spectrum", "--d", "48", "--c", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("ks.json"));
    assert_eq!(report["law"], "z_limit");
    assert_eq!(report["c"], 2.0);
    assert_eq!(report["n"], 2304);
    assert_eq!(report["seed"], 48);
    let ks = report["ks"].as_f64().unwrap();
    assert!(ks <= 0.05, "ks = {ks}");
    assert_eq!(csv_column(&dir.path().join("histogram.csv"), "height").len(), 50);
}

#[test]
fn spectrum_at_c16_is_close_to_the_semicircle() {
    // c = s/d2 = 16; a large d1 suppresses the O(c/d1) finite-size term.
    let out = entswap(&["--seed", "3", "spectrum", "--d1", "128", "--d2", "32", "--c", "16", "--law", "semicircle"]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["law"], "semicircle");
    assert_eq!(report["n"], 1024);
    let ks = report["ks"].as_f64().unwrap();
    assert!(ks <= 0.08, "ks = {ks}");
}

#[test]
fn spectrum_reads_simulated_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert_eq!(code(&entswap(&["simulate", "--d", "4", "--s", "8", "--samples", "3", "--out", sim.to_str().unwrap()])), 0);
    let eigs = sim.join("eigs.csv");

    let from_file = entswap(&["spectrum", "--input", eigs.to_str().unwrap(), "--sample", "1", "--c", "2"]);
    assert_eq!(code(&from_file), 0);
    let inline = entswap(&["spectrum", "--d", "4", "--s", "8", "--sample", "1"]);
    let (a, b): (Value, Value) = (serde_json::from_slice(&from_file.stdout).unwrap(), serde_json::from_slice(&inline.stdout).unwrap());
    assert_eq!(a["n"], 16);
    assert_eq!(a["ks"], b["ks"]);

    let all = entswap(&["spectrum", "--input", eigs.to_str().unwrap(), "--law", "mp", "--c", "1"]);
    let report: Value = serde_json::from_slice(&all.stdout).unwrap();
    assert_eq!(report["n"], 48);
    assert_eq!(report["law"], "mp");
    assert_eq!(code(&entswap(&["spectrum", "--input", eigs.to_str().unwrap()])), 2);
}

#[test]
fn malformed_or_missing_input_exits_4_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "sample_index,eig_index,value\n0,0,1.5\n0,1,0.25\n0,2,oops\n").unwrap();
    let out = entswap(&["spectrum", "--input", bad.to_str().unwrap(), "--law", "semicircle"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "sample_index,eig_index,value\n0,0,1.5\n0,1\n").unwrap();
    let out = entswap(&["spectrum", "--input", ragged.to_str().unwrap(), "--law", "semicircle"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let missing = dir.path().join("missing.csv");
    assert_eq!(code(&entswap(&["spectrum", "--input", missing.to_str().unwrap(), "--law", "semicircle"])), 4);
}

#[test]
fn ppt_scan_shows_the_threshold() {
    let out = entswap(&["--seed", "1", "ppt", "scan", "--d", "2", "--s", "2,16,64,200", "--samples", "200"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("d,s,samples,ppt_fraction,ci_halfwidth,seed\n"));
    let rows = ppt_scan_rows(&out);
    assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), vec![2, 16, 64, 200]);
    assert!(rows[0].1 < 0.5);
    assert!(rows[3].1 > 0.9);
    for w in rows.windows(2) {
        assert!(w[1].1 + w[1].2 >= w[0].1 - w[0].2);
    }
    assert_eq!(code(&entswap(&["ppt", "scan", "--d", "1", "--s", "2"])), 2);
}

#[test]
fn ppt_scan_writes_manifest_with_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = entswap(&["ppt", "scan", "--d", "2", "--s", "4,8", "--samples", "20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["command"], "ppt scan");
    assert!(manifest["outputs"]["ppt_scan.csv"].is_string());
}
