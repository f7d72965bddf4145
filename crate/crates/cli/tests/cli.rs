use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn distlabel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distlabel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_build_query_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("grid.txt");
    let labels = dir.path().join("grid.lbl");
    let out = distlabel(&["gen", "grid", "9", "--out", path_str(&graph)]);
    assert!(out.status.success());
    assert!(fs::read_to_string(&graph).unwrap().starts_with("9 12\n"));

    let out = distlabel(&["build", path_str(&graph), "--out", path_str(&labels)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = distlabel(&["query", path_str(&labels), "0", "8"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "4");

    let out = distlabel(&["query", path_str(&labels), "0", "99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreachable_pairs_print_inf() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("two.txt");
    let labels = dir.path().join("two.lbl");
    fs::write(&graph, "4 2\n1\n0\n3\n2\n").unwrap();
    let out = distlabel(&[
        "build",
        path_str(&graph),
        "--scheme",
        "baseline",
        "--out",
        path_str(&labels),
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&distlabel(&["query", path_str(&labels), "0", "2"])).trim(),
        "INF"
    );
    assert_eq!(
        stdout(&distlabel(&["query", path_str(&labels), "2", "3"])).trim(),
        "1"
    );

    let out = distlabel(&["check", path_str(&graph)]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("PASS n=4 pairs=16 unreachable=8"));
}

#[test]
fn check_passes_and_rejects_corrupted_labels() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tri.txt");
    let labels = dir.path().join("tri.lbl");
    distlabel(&[
        "gen",
        "random-triangulation",
        "200",
        "--seed",
        "3",
        "--out",
        path_str(&graph),
    ]);
    distlabel(&["build", path_str(&graph), "--out", path_str(&labels)]);
    let out = distlabel(&["check", path_str(&graph), "--labels", path_str(&labels)]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("PASS"));

    let mut bytes = fs::read(&labels).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x01;
    fs::write(&labels, &bytes).unwrap();
    let out = distlabel(&["check", path_str(&graph), "--labels", path_str(&labels)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("label format error"));
    let out = distlabel(&["query", path_str(&labels), "0", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn labels_from_another_graph_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let labels = dir.path().join("a.lbl");
    distlabel(&["gen", "tree", "30", "--seed", "1", "--out", path_str(&a)]);
    distlabel(&["gen", "tree", "30", "--seed", "2", "--out", path_str(&b)]);
    distlabel(&["build", path_str(&a), "--out", path_str(&labels)]);
    let out = distlabel(&["check", path_str(&b), "--labels", path_str(&labels)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generation_and_builds_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let graph = dir.path().join(format!("g{i}.txt"));
        let labels = dir.path().join(format!("g{i}.lbl"));
        distlabel(&[
            "gen",
            "big-face",
            "300",
            "--seed",
            "5",
            "--out",
            path_str(&graph),
        ]);
        distlabel(&[
            "build",
            path_str(&graph),
            "--base-threshold",
            "8",
            "--out",
            path_str(&labels),
        ]);
        files.push((fs::read(&graph).unwrap(), fs::read(&labels).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn bench_prints_the_documented_header() {
    let out = distlabel(&[
        "bench",
        "--families",
        "grid,tree",
        "--sizes",
        "20,64",
        "--seeds",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,n,seed,max_bits,mean_bits,base_max_bits,c,log_sum,build_ms,query_ns")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows[0].starts_with("grid,20,0,"));
    assert!(rows[7].starts_with("tree,64,1,"));
}

#[test]
fn dumps() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("c10.txt");
    distlabel(&["gen", "big-face", "10", "--out", path_str(&graph)]);
    let out = distlabel(&["dump-augmented", path_str(&graph)]);
    assert!(out.status.success());
    let text = stdout(&out);
    // C_10 plus an 8-vertex gadget in each of its two faces.
    assert!(text.starts_with("26 "));
    assert!(text.contains("# weights: 1 1 1 1 1 1 1 1 1 1 0"));

    let out = distlabel(&["dump-separator", path_str(&graph)]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# n=10 c="));
    assert!(text.contains("\nposition,vertex,gap\n0,"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(distlabel(&[]).status.code(), Some(2));
    assert_eq!(distlabel(&["gen", "torus", "5"]).status.code(), Some(2));
    assert_eq!(
        distlabel(&["build", "/nonexistent/graph.txt", "--out", "/tmp/x"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("k5.txt");
    fs::write(
        &graph,
        "5 10\n1 2 3 4\n0 2 3 4\n0 1 3 4\n0 1 2 4\n0 1 2 3\n",
    )
    .unwrap();
    let out = distlabel(&["check", path_str(&graph)]);
    assert_eq!(out.status.code(), Some(2));
}
