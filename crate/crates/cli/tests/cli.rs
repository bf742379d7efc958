use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn fcd(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcd")).args(args).current_dir(cwd).output().expect("spawn fcd")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "fcd failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(text: &str) -> serde_json::Map<String, serde_json::Value> {
    match serde_json::from_str(text).unwrap() {
        serde_json::Value::Object(m) => m,
        other => panic!("expected object, got {other}"),
    }
}

fn write(dir: &Path, name: &str, text: &str) {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).unwrap();
    }
    fs::write(path, text).unwrap();
}

fn stalemate_fixture(dir: &Path) {
    write(dir, "pred.xyz", "0.5 0\n1 0\n");
    write(dir, "gt.xyz", "0 0\n4 0\n");
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn metrics_identical_files_give_zero_distances() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "a.xyz", "0 0 0\n1 0 0\n0 1 0\n0.25 0.5 0.75\n");
    let report = json(&stdout(&fcd(&["metrics", "a.xyz", "a.xyz"], tmp.path())));
    for key in ["cd_l1", "cd_l2", "dcd", "emd", "hausdorff"] {
        assert_eq!(report[key].as_f64(), Some(0.0), "{key}");
    }
    assert_eq!(report["fscore"].as_f64(), Some(1.0));
}

#[test]
fn metrics_stalemate_fixture_matches_hand_computed_chamfer() {
    let tmp = TempDir::new().unwrap();
    stalemate_fixture(tmp.path());
    let report = json(&stdout(&fcd(&["metrics", "pred.xyz", "gt.xyz"], tmp.path())));
    // Nearest distances: pred->gt 0.5, 1.0; gt->pred 0.5, 3.0.
    let expected = 0.5 * ((0.5 + 1.0) / 2.0 + (0.5 + 3.0) / 2.0);
    assert_eq!(report["cd_l1"].as_f64(), Some(expected));
    assert_eq!(expected, 1.25);
    let expected_l2 = (0.25 + 1.0) / 2.0 + (0.25 + 9.0) / 2.0;
    assert_eq!(report["cd_l2"].as_f64(), Some(expected_l2));
}

#[test]
fn metrics_json_is_one_flat_object() {
    let tmp = TempDir::new().unwrap();
    stalemate_fixture(tmp.path());
    let text = stdout(&fcd(&["metrics", "pred.xyz", "gt.xyz"], tmp.path()));
    assert_eq!(text.lines().count(), 1);
    assert!(json(&text).values().all(|v| v.is_number() || v.is_null()));
}

#[test]
fn metrics_csv_has_single_header_and_lf() {
    let tmp = TempDir::new().unwrap();
    stalemate_fixture(tmp.path());
    let text = stdout(&fcd(&["metrics", "pred.xyz", "gt.xyz", "--format", "csv"], tmp.path()));
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["cd_l1,cd_l2,dcd,emd,fscore,hausdorff,p2f,fidelity", "1.25,5.25,1,1.75,0,3,,"]);
}

#[test]
fn metrics_missing_file_exits_2() {
    let tmp = TempDir::new().unwrap();
    stalemate_fixture(tmp.path());
    assert_eq!(code(&fcd(&["metrics", "pred.xyz", "nope.xyz"], tmp.path())), 2);
}

#[test]
fn metrics_malformed_file_exits_2() {
    let tmp = TempDir::new().unwrap();
    stalemate_fixture(tmp.path());
    write(tmp.path(), "bad.xyz", "1 2\nnot a number\n");
    assert_eq!(code(&fcd(&["metrics", "pred.xyz", "bad.xyz"], tmp.path())), 2);
}

#[test]
fn metrics_dimension_mismatch_exits_3_naming_metric() {
    let tmp = TempDir::new().unwrap();
    stalemate_fixture(tmp.path());
    write(tmp.path(), "three.xyz", "0 0 0\n1 1 1\n");
    let o = fcd(&["metrics", "pred.xyz", "three.xyz", "--metrics", "hausdorff"], tmp.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hausdorff"));
}

#[test]
fn metrics_skips_emd_on_size_mismatch_unless_approx() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "p.xyz", "0 0\n1 0\n2 0\n");
    write(tmp.path(), "g.xyz", "0 0\n2 0\n");
    let plain = json(&stdout(&fcd(&["metrics", "p.xyz", "g.xyz"], tmp.path())));
    assert!(plain["emd"].is_null());
    let approx = json(&stdout(&fcd(&["metrics", "p.xyz", "g.xyz", "--emd-approx"], tmp.path())));
    assert!(approx["emd"].as_f64().unwrap() >= 0.0);
}

#[test]
fn metrics_emd_sum_flag() {
    let tmp = TempDir::new().unwrap();
    stalemate_fixture(tmp.path());
    let mean = json(&stdout(&fcd(&["metrics", "pred.xyz", "gt.xyz", "--metrics", "emd"], tmp.path())));
    let sum = json(&stdout(&fcd(&["metrics", "pred.xyz", "gt.xyz", "--metrics", "emd", "--emd-sum"], tmp.path())));
    // Best matching: (0.5,0)->(0,0) and (1,0)->(4,0), total 3.5.
    assert_eq!(mean["emd"].as_f64(), Some(1.75));
    assert_eq!(sum["emd"].as_f64(), Some(3.5));
}

#[test]
fn metrics_point_to_face_and_fidelity() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "p.xyz", "0.25 0.25 1\n0.25 0.25 -2\n");
    write(tmp.path(), "in.xyz", "0.25 0.25 1\n");
    write(
        tmp.path(),
        "m.ply",
        "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n\
         element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n",
    );
    let args = ["metrics", "p.xyz", "p.xyz", "--mesh", "m.ply", "--input", "in.xyz"];
    let report = json(&stdout(&fcd(&args, tmp.path())));
    // Both points project inside the triangle in the z = 0 plane.
    assert_eq!(report["p2f"].as_f64(), Some(1.5));
    assert_eq!(report["fidelity"].as_f64(), Some(0.0));
}

#[test]
fn usage_error_exits_3() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&fcd(&["metrics", "--no-such-flag"], tmp.path())), 3);
    assert_eq!(code(&fcd(&["frobnicate"], tmp.path())), 3);
}

fn schedule_rows(args: &[&str]) -> Vec<(u32, f64, f64)> {
    let tmp = TempDir::new().unwrap();
    let text = stdout(&fcd(args, tmp.path()));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epoch,alpha,beta"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn schedule_static_has_401_constant_rows() {
    let rows = schedule_rows(&["schedule", "--schedule", "static", "--theta", "2", "--tau", "1", "--total", "400"]);
    assert_eq!(rows.len(), 401);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(*r, (i as u32, 1.0, 2.0));
    }
}

#[test]
fn schedule_stair_switches_at_transition() {
    let rows = schedule_rows(&["schedule", "--schedule", "stair", "--transition", "200"]);
    assert_eq!(rows[199], (199, 1.0, 2.0));
    assert_eq!(rows[200], (200, 1.0, 1.0));
}

#[test]
fn schedule_exponential_row_200() {
    let rows = schedule_rows(&["schedule", "--schedule", "exponential", "--sigma", "200"]);
    assert_eq!(rows[0].2, 2.0);
    let expected = (2.0 - 1.0) * (-200.0f64 / 200.0).exp() + 1.0;
    assert_eq!(rows[200].2, expected);
    assert!((rows[200].2 - 1.36788).abs() < 1e-5);
}

#[test]
fn schedule_rejects_inverted_bounds() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&fcd(&["schedule", "--theta", "0.5", "--tau", "1"], tmp.path())), 3);
}

#[test]
fn sweep_defaults_match_library_sweep() {
    let tmp = TempDir::new().unwrap();
    let text = stdout(&fcd(&["sweep"], tmp.path()));
    let config = fcd_core::stalemate::SweepConfig::default();
    let rows = fcd_core::stalemate::sweep(&config).unwrap();
    assert_eq!(text, fcd_core::stalemate::sweep_csv(&config, &rows));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], fcd_core::stalemate::SWEEP_CSV_HEADER);
    assert_eq!(data.len(), 1 + 28);
}

#[test]
fn sweep_invalid_range_exits_3() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&fcd(&["sweep", "--start", "3", "--end", "1"], tmp.path())), 3);
    assert_eq!(code(&fcd(&["sweep", "--step", "0"], tmp.path())), 3);
    // p2 at 0.3 is closer to g1 than p1 = 0.5 is.
    assert_eq!(code(&fcd(&["sweep", "--start", "0.3"], tmp.path())), 3);
}

const SHORT_RUN: [&str; 6] = ["optimize", "--benchmark", "clustered-grid", "--steps", "100", "--record-every"];

#[test]
fn optimize_benchmark_is_deterministic_and_replayable() {
    let tmp = TempDir::new().unwrap();
    let run = |dir: &str| {
        let mut args = SHORT_RUN.to_vec();
        args.extend(["10", "--out-dir", dir]);
        stdout(&fcd(&args, tmp.path()))
    };
    assert_eq!(run("a"), run("b"));
    let a = read_dir_sorted(&tmp.path().join("a"));
    assert_eq!(a, read_dir_sorted(&tmp.path().join("b")));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["final.xyz", "manifest.json", "trace.csv"]);

    stdout(&fcd(&["replay", "a/manifest.json", "--out-dir", "c"], tmp.path()));
    assert_eq!(a, read_dir_sorted(&tmp.path().join("c")));

    let trace = String::from_utf8(a[2].1.clone()).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("epoch,objective,alpha,beta,cd_l1,dcd,emd,grad_max"));
    let epochs: Vec<usize> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(epochs, (0..=100).step_by(10).collect::<Vec<_>>());
}

#[test]
fn optimize_files_with_pinning() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "init.xyz", "0.5 0\n1 0\n");
    write(tmp.path(), "target.xyz", "0 0\n4 0\n");
    let args = [
        "optimize", "--init", "init.xyz", "--target", "target.xyz", "--objective", "cd-l2", "--pin", "0",
        "--steps", "20000", "--step-size", "0.001", "--out-dir", "out",
    ];
    stdout(&fcd(&args, tmp.path()));
    let fin = fcd_core::cloud::io::read_cloud(tmp.path().join("out/final.xyz")).unwrap();
    assert_eq!(fin.point(0), &[0.5, 0.0]);
    // Equal-weight squared Chamfer stalls p2 at the midpoint of the targets.
    assert!((fin.point(1)[0] - 2.0).abs() < 1e-3);
    let manifest = json(&fs::read_to_string(tmp.path().join("out/manifest.json")).unwrap());
    assert_eq!(manifest["inputs"].as_object().unwrap().len(), 2);
}

#[test]
fn optimize_replay_detects_changed_input() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "init.xyz", "0.5 0\n1 0\n");
    write(tmp.path(), "target.xyz", "0 0\n4 0\n");
    let args = ["optimize", "--init", "init.xyz", "--target", "target.xyz", "--steps", "5", "--out-dir", "out"];
    stdout(&fcd(&args, tmp.path()));
    write(tmp.path(), "target.xyz", "0 0\n5 0\n");
    assert_eq!(code(&fcd(&["replay", "out/manifest.json", "--out-dir", "again"], tmp.path())), 3);
}

#[test]
fn optimize_hierarchical_writes_coarse_and_fine() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "optimize", "--benchmark", "clustered-grid", "--coarse-count", "16", "--children", "4", "--steps", "50",
        "--out-dir", "h",
    ];
    stdout(&fcd(&args, tmp.path()));
    let fine = fcd_core::cloud::io::read_cloud(tmp.path().join("h/final.xyz")).unwrap();
    let coarse = fcd_core::cloud::io::read_cloud(tmp.path().join("h/coarse.xyz")).unwrap();
    assert_eq!((fine.len(), coarse.len()), (64, 16));
}

#[test]
fn optimize_divergence_exits_4() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "init.xyz", "0.5 0\n1 0\n");
    write(tmp.path(), "target.xyz", "0 0\n4 0\n");
    let args = [
        "optimize", "--init", "init.xyz", "--target", "target.xyz", "--objective", "cd-l2", "--step-size", "10",
        "--steps", "200", "--out-dir", "out",
    ];
    assert_eq!(code(&fcd(&args, tmp.path())), 4);
}

#[test]
fn config_file_fills_missing_flags_and_flags_win() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "c.json", r#"{"steps": 30, "record-every": 5, "schedule": "linear", "no-snapshots": true}"#);
    let args = ["optimize", "--config", "c.json", "--benchmark", "clustered-grid", "--steps", "20", "--out-dir", "o"];
    stdout(&fcd(&args, tmp.path()));
    let trace = fs::read_to_string(tmp.path().join("o/trace.csv")).unwrap();
    let last = trace.lines().last().unwrap();
    let f: Vec<&str> = last.split(',').collect();
    assert_eq!(f[0], "20");
    assert_eq!(f[3].parse::<f64>().unwrap(), 2.0 - 20.0 / 400.0);
    assert_eq!(&f[4..7], ["", "", ""]);
    assert_eq!(trace.lines().count(), 1 + 5);

    // The manifest replays without the config file.
    fs::remove_file(tmp.path().join("c.json")).unwrap();
    stdout(&fcd(&["replay", "o/manifest.json", "--out-dir", "r"], tmp.path()));
    assert_eq!(read_dir_sorted(&tmp.path().join("o")), read_dir_sorted(&tmp.path().join("r")));
}

#[test]
fn config_file_rejects_unknown_keys() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "c.json", r#"{"warp-factor": 9}"#);
    assert_eq!(code(&fcd(&["sweep", "--config", "c.json"], tmp.path())), 3);
    assert_eq!(code(&fcd(&["sweep", "--config", "absent.json"], tmp.path())), 2);
}

fn batch_fixture(dir: &Path) -> Vec<(&'static str, &'static str, &'static str)> {
    let pairs = vec![
        ("a.xyz", "0.5 0\n1 0\n", "0 0\n4 0\n"),
        ("b.xyz", "0 0 0\n1 1 1\n", "0 0 0\n1 1 1\n"),
        ("c.xyz", "0 0\n0.3 0.1\n1 1\n", "0 0\n1 1\n2 0\n"),
    ];
    for (name, pred, gt) in &pairs {
        write(dir, &format!("set/pred/{name}"), pred);
        write(dir, &format!("set/gt/{name}"), gt);
    }
    write(dir, "set/pred/notes.txt", "ignored by the default pattern\n");
    pairs
}

#[test]
fn batch_rows_match_single_runs() {
    let tmp = TempDir::new().unwrap();
    let pairs = batch_fixture(tmp.path());
    let table = stdout(&fcd(&["batch", "set"], tmp.path()));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "name,cd_l1,cd_l2,dcd,emd,fscore,hausdorff,p2f,fidelity");
    assert_eq!(lines.len(), 1 + pairs.len());
    for ((name, _, _), line) in pairs.iter().zip(&lines[1..]) {
        let single = stdout(&fcd(
            &["metrics", &format!("set/pred/{name}"), &format!("set/gt/{name}"), "--format", "csv"],
            tmp.path(),
        ));
        assert_eq!(*line, format!("{name},{}", single.lines().nth(1).unwrap()));
    }
}

#[test]
fn batch_output_independent_of_parallelism() {
    let tmp = TempDir::new().unwrap();
    batch_fixture(tmp.path());
    let one = stdout(&fcd(&["batch", "set", "--parallelism", "1"], tmp.path()));
    let eight = stdout(&fcd(&["batch", "set", "--parallelism", "8"], tmp.path()));
    assert_eq!(one, eight);
}

#[test]
fn batch_empty_dir_gives_header_only() {
    let tmp = TempDir::new().unwrap();
    fs::create_dir(tmp.path().join("empty")).unwrap();
    let table = stdout(&fcd(&["batch", "empty"], tmp.path()));
    assert_eq!(table, "name,cd_l1,cd_l2,dcd,emd,fscore,hausdorff,p2f,fidelity\n");
}

#[test]
fn batch_missing_dir_or_gt_exits_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&fcd(&["batch", "absent"], tmp.path())), 2);
    write(tmp.path(), "set/pred/x.xyz", "0 0\n");
    assert_eq!(code(&fcd(&["batch", "set"], tmp.path())), 2);
}

#[test]
fn batch_out_dir_records_inputs() {
    let tmp = TempDir::new().unwrap();
    batch_fixture(tmp.path());
    stdout(&fcd(&["batch", "set", "--out-dir", "out"], tmp.path()));
    let manifest = json(&fs::read_to_string(tmp.path().join("out/manifest.json")).unwrap());
    assert_eq!(manifest["command"], "batch");
    assert_eq!(manifest["inputs"].as_object().unwrap().len(), 6);
    stdout(&fcd(&["replay", "out/manifest.json", "--out-dir", "again"], tmp.path()));
    assert_eq!(read_dir_sorted(&tmp.path().join("out")), read_dir_sorted(&tmp.path().join("again")));
}

#[test]
fn ambiguity_outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let a = stdout(&fcd(&["ambiguity", "--n", "8", "--seed", "3", "--out-dir", "a"], tmp.path()));
    let b = stdout(&fcd(&["ambiguity", "--n", "8", "--seed", "3", "--out-dir", "b"], tmp.path()));
    assert_eq!(a, b);
    assert_eq!(read_dir_sorted(&tmp.path().join("a")), read_dir_sorted(&tmp.path().join("b")));
    let report = json(&a);
    let (cc, cu) = (report["cd_clustered"].as_f64().unwrap(), report["cd_uniform"].as_f64().unwrap());
    assert!((cc - cu).abs() / cu <= 0.01);
}

#[test]
fn ambiguity_rejects_odd_n() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&fcd(&["ambiguity", "--n", "9"], tmp.path())), 3);
}
