use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bnsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnsearch")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = bnsearch(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const COLLIDER: &str = "nodes 3\nvar x 2\nvar y 2\nvar z 2\nparents x\nparents z\nparents y x z\n\
cpt x 0 0.5 0.5\ncpt z 0 0.5 0.5\n\
cpt y 0 0.95 0.05\ncpt y 1 0.4 0.6\ncpt y 2 0.4 0.6\ncpt y 3 0.05 0.95\n";

#[test]
fn generate_then_sample() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.txt");
    let out = ok(&["generate", "--nodes", "5", "--seed", "1", "--out", p(&net)]);
    assert!(out.starts_with("nodes 5 edges "));
    bnsearch::load_network(&net).unwrap();

    let out = ok(&["generate", "--nodes", "6", "--edge-prob", "0", "--out", p(&net)]);
    assert_eq!(out.trim(), "nodes 6 edges 0");

    ok(&["generate", "--nodes", "10", "--seed", "3", "--out", p(&net)]);
    let bn = bnsearch::load_network(&net).unwrap();
    assert!(bn.vars().arities().iter().all(|&a| a == 2));
    assert!((0..10).all(|v| bn.dag().in_degree(v) <= 4));

    let data = dir.path().join("d.csv");
    let again = dir.path().join("d2.csv");
    ok(&["sample", "--network", p(&net), "--cases", "500", "--seed", "7", "--out", p(&data)]);
    ok(&["sample", "--network", p(&net), "--cases", "500", "--seed", "7", "--out", p(&again)]);
    let text = fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 501);
    assert_eq!(text, fs::read_to_string(&again).unwrap());

    ok(&["sample", "--network", p(&net), "--cases", "0", "--out", p(&data)]);
    assert_eq!(fs::read_to_string(&data).unwrap().lines().count(), 1);
}

#[test]
fn learn_collider_in_e_space_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("collider.txt");
    fs::write(&net, COLLIDER).unwrap();
    let data = dir.path().join("d.csv");
    ok(&["sample", "--network", p(&net), "--cases", "2000", "--seed", "5", "--out", p(&data)]);

    let learned = dir.path().join("learned.txt");
    let trace = dir.path().join("trace.txt");
    let out = ok(&["learn", "--data", p(&data), "--space", "e", "--out", p(&learned), "--trace", p(&trace)]);
    assert!(out.contains("score -"));
    let structure = fs::read_to_string(&learned).unwrap();
    assert_eq!(structure.lines().filter(|l| l.contains("->")).count(), 2, "{structure}");
    assert!(!structure.contains("--"));
    assert!(fs::read_to_string(&trace).unwrap().lines().all(|l| l.starts_with("step ")));

    assert_eq!(ok(&["compare", p(&learned), p(&learned)]).trim(), "0");
    assert_eq!(ok(&["compare", p(&learned), "--gold", p(&net)]).trim(), "0");

    let chain = dir.path().join("chain.txt");
    fs::write(&chain, "node x\nnode y\nnode z\nx -> y\ny -> z\n").unwrap();
    assert_eq!(ok(&["compare", p(&learned), p(&chain)]).trim(), "2");
}

#[test]
fn learn_on_empty_dataset_with_default_ess() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("empty.csv");
    fs::write(&data, "a,b,c\n").unwrap();
    let learned = dir.path().join("out.txt");
    for space in ["b", "e", "hybrid"] {
        let out = ok(&["learn", "--data", p(&data), "--space", space, "--out", p(&learned)]);
        assert_eq!(out, "score 0\nsteps 0\n");
        assert_eq!(fs::read_to_string(&learned).unwrap(), "node a\nnode b\nnode c\n");
    }
}

#[test]
fn errors_exit_nonzero_with_one_line() {
    let out = bnsearch(&["sample", "--network", "/nonexistent/net.txt", "--cases", "3", "--out", "/tmp/x.csv"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: "));

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    fs::write(&a, "node x\nnode y\n").unwrap();
    fs::write(&b, "node x\nnode q\n").unwrap();
    assert!(!bnsearch(&["compare", p(&a), p(&b)]).status.success());
    let data = dir.path().join("d.csv");
    fs::write(&data, "a\n0\n").unwrap();
    assert!(!bnsearch(&["learn", "--data", p(&data), "--ess", "0", "--out", p(&a)]).status.success());
}

#[test]
fn experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("one.tsv");
    let second = dir.path().join("two.tsv");
    let args = |out: &Path| {
        vec![
            "experiment".to_string(),
            "--nodes".into(),
            "5".into(),
            "--cases".into(),
            "200".into(),
            "--golds".into(),
            "2".into(),
            "--databases".into(),
            "2".into(),
            "--space".into(),
            "e,b,hybrid".into(),
            "--seed".into(),
            "9".into(),
            "--no-timing".into(),
            "--out".into(),
            p(out).to_string(),
        ]
    };
    let a: Vec<String> = args(&first);
    ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let b: Vec<String> = args(&second);
    ok(&b.iter().map(String::as_str).collect::<Vec<_>>());
    let report = fs::read_to_string(&first).unwrap();
    assert_eq!(report, fs::read_to_string(&second).unwrap());
    assert_eq!(report.lines().count(), 2);
    let runs = fs::read_to_string(dir.path().join("one.tsv.runs.tsv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 4 * 3);

    let degenerate = dir.path().join("deg.tsv");
    ok(&["experiment", "--nodes", "1", "--cases", "50", "--no-timing", "--out", p(&degenerate)]);
    let row: Vec<String> = fs::read_to_string(&degenerate).unwrap().lines().nth(1).unwrap().split('\t').map(String::from).collect();
    assert_eq!(row[5], "0");
    assert_eq!(row[8], "0");
}
