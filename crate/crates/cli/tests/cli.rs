use std::path::Path;
use std::process::{Command, Output};

fn gte(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gte")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn version_names_formats() {
    let out = gte(&["--version"]);
    assert_eq!(code(&out), 0);
    let s = stdout(&out);
    assert!(s.contains("GRAPH1") && s.contains("GTE1"), "{s}");
}

#[test]
fn synth_encode_decode_eval() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.graph");
    let tensor = dir.path().join("t.gte");
    let decoded = dir.path().join("d.graph");
    let topo_csv = dir.path().join("topo.csv");
    let apls_csv = dir.path().join("apls.csv");

    let out = gte(&["synth", "--kind", "grid", "--extent", "300", "--spacing", "80", "--seed", "3", "-o", p(&graph)]);
    assert_eq!(code(&out), 0, "{out:?}");
    let out = gte(&["encode", "-i", p(&graph), "-o", p(&tensor)]);
    assert_eq!(code(&out), 0, "{out:?}");
    let out = gte(&["decode", "-i", p(&tensor), "-o", p(&decoded)]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).starts_with("slot_total"));

    // Decoded vertices sit on the cell grid, so the raw graph scores just under 1.
    let out = gte(&[
        "eval", "--truth", p(&graph), "--prop", p(&decoded), "--topo-csv", p(&topo_csv), "--apls-csv", p(&apls_csv),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let s = stdout(&out);
    let field = |name: &str| -> f64 {
        let rest = &s[s.find(&format!("\"{name}\": ")).unwrap() + name.len() + 4..];
        rest[..rest.find([',', '}']).unwrap()].parse().unwrap()
    };
    for name in ["precision", "recall", "apls", "crossing_recall"] {
        assert!(field(name) >= 0.99, "{s}");
    }
    assert!(std::fs::read_to_string(&topo_csv).unwrap().starts_with("seed_x,seed_y"));
    assert!(std::fs::read_to_string(&apls_csv).unwrap().starts_with("a_x,a_y"));
}

#[test]
fn perturb_and_loss() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.graph");
    let tensor = dir.path().join("t.gte");
    let noisy = dir.path().join("n.gte");
    assert_eq!(code(&gte(&["synth", "--kind", "radial", "--extent", "300", "-o", p(&graph)])), 0);
    assert_eq!(code(&gte(&["encode", "-i", p(&graph), "-o", p(&tensor)])), 0);

    let out = gte(&["loss", "--pred", p(&tensor), "--truth", p(&tensor)]);
    assert_eq!(code(&out), 0, "{out:?}");
    let clean = stdout(&out);

    let out = gte(&["perturb", "-i", p(&tensor), "-o", p(&noisy), "--sigma-p", "0.2", "--sigma-vec", "2", "--seed", "9"]);
    assert_eq!(code(&out), 0, "{out:?}");
    let out = gte(&["loss", "--pred", p(&noisy), "--truth", p(&tensor)]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert_ne!(stdout(&out), clean);

    let again = dir.path().join("n2.gte");
    gte(&["perturb", "-i", p(&tensor), "-o", p(&again), "--sigma-p", "0.2", "--sigma-vec", "2", "--seed", "9"]);
    assert_eq!(std::fs::read(&noisy).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn roundtrip_appends_rows() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.graph");
    let csv = dir.path().join("rows.csv");
    assert_eq!(code(&gte(&["synth", "--kind", "organic", "--extent", "300", "-o", p(&graph)])), 0);
    for _ in 0..2 {
        let out = gte(&["roundtrip", "-i", p(&graph), "-o", p(&csv)]);
        assert_eq!(code(&out), 0, "{out:?}");
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "{text}");
    assert!(lines[0].starts_with("config_hash"));
    // Everything but wall_ms repeats exactly.
    let fields = |l: &str| l.split(',').enumerate().filter(|&(i, _)| i != 17).map(|(_, f)| f.to_string()).collect::<Vec<_>>();
    assert_eq!(fields(lines[1]), fields(lines[2]));
}

#[test]
fn sweep_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = gte(&[
        "sweep", "--kind", "grid", "--extent", "300", "--axis", "w", "--values", "10,100", "--replicates", "2", "-o", p(&csv),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 5);
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    assert_eq!(code(&gte(&["sweep", "--axis", "colour", "--values", "1", "-o", p(&csv)])), 1);
    assert_eq!(code(&gte(&["sweep", "--axis", "w", "-o", p(&csv)])), 1);
    assert_eq!(code(&gte(&["encode", "--bogus"])), 1);
    assert_eq!(code(&gte(&[])), 1);
    assert_eq!(code(&gte(&["--help"])), 0);
}

#[test]
fn missing_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = gte(&["encode", "-i", p(&dir.path().join("absent.graph")), "-o", p(&dir.path().join("t.gte"))]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.graph"));
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, b"not a graph").unwrap();
    assert_eq!(code(&gte(&["encode", "-i", p(&bad), "-o", p(&dir.path().join("t.gte"))])), 2);
    assert_eq!(code(&gte(&["synth", "--kind", "lunar", "-o", p(&dir.path().join("g.graph"))])), 2);
    assert_eq!(code(&gte(&["synth", "--spacing", "5", "-o", p(&dir.path().join("g.graph"))])), 2);
}
