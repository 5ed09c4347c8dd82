use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gsco_core::instance::vector_from_csv;
use gsco_core::trace::TRACE_CSV_HEADER;

fn gsco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsco")).args(args).output().expect("spawn gsco")
}

fn ok(args: &[&str]) -> String {
    let out = gsco(args);
    assert!(out.status.success(), "gsco {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const FIXTURE: &[&str] = &["instance.d=16", "instance.n=8", "model.s=4", "model.g=2", "model.C=0.5"];

#[test]
fn generate_is_byte_identical_across_processes() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["generate", "--seed", "42", "instance.d=16", "instance.n=8", "--out"];
    let out_a = ok(&[&args[..], &[a.to_str().unwrap()]].concat());
    let out_b = ok(&[&args[..], &[b.to_str().unwrap()]].concat());
    let fp = |s: &str| s.lines().find(|l| l.starts_with("fingerprint")).unwrap().to_string();
    assert_eq!(fp(&out_a), fp(&out_b));
    for f in ["instance.json", "A.csv", "y.csv", "x_star.csv", "graph.edgelist", "truth.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn noiseless_instance_records_zero_objective_at_truth() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("inst");
    ok(&["generate", "--seed", "5", "instance.sigma=0", "--out", dir.to_str().unwrap()]);
    let truth: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["f_x_star"].as_f64(), Some(0.0));
    let x_star = vector_from_csv(&fs::read_to_string(dir.join("x_star.csv")).unwrap()).unwrap();
    let norm: f64 = x_star.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn open_loop_converges_and_backtracking_needs_fewer_iterations() {
    let tmp = tempfile::tempdir().unwrap();
    let (open, bt) = (tmp.path().join("open"), tmp.path().join("bt"));
    let base = [&["solve", "--seed", "42", "solver.max_iters=500", "solver.rel_tol=1e-6"], FIXTURE].concat();
    ok(&[&base[..], &["--out", open.to_str().unwrap()]].concat());
    ok(&[&base[..], &["solver.step=backtracking", "--out", bt.to_str().unwrap()]].concat());
    let (so, sb) = (summary(&open), summary(&bt));
    assert_eq!(so["termination"], "converged");
    assert_eq!(sb["termination"], "converged");
    assert!(sb["iterations"].as_u64() < so["iterations"].as_u64());

    let trace = fs::read_to_string(open.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some(TRACE_CSV_HEADER));
    assert_eq!(trace.lines().count(), so["iterations"].as_u64().unwrap() as usize + 2);
}

#[test]
fn echoed_config_reproduces_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let (first, second) = (tmp.path().join("first"), tmp.path().join("second"));
    ok(&[&["solve", "--seed", "3", "dmo.variant=topg_optimal", "--out", first.to_str().unwrap()], FIXTURE].concat());
    ok(&[
        "solve",
        "--config",
        first.join("config.txt").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(first.join("trace.csv")).unwrap(), fs::read(second.join("trace.csv")).unwrap());
}

#[test]
fn best_pgd_refuses_large_graph() {
    let out = gsco(&[
        "solve",
        "method=best_pgd",
        "instance.d=10312",
        "instance.n=100",
        "graph.edges=333983",
        "model.s=1623",
        "model.g=20",
        "--out",
        tempfile::tempdir().unwrap().path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(gsco(&["solve", "bogus.key=1"]).status.code(), Some(2));
    assert_eq!(gsco(&["solve", "method=sgd"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "instance.d = sixteen\n").unwrap();
    assert_eq!(gsco(&["generate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    let out = tmp.path().join("run");
    fs::write(&cfg, "seed = 1\nsolver.max_iters = 7\nsolver.rel_tol = 0\n").unwrap();
    ok(&["solve", "--config", cfg.to_str().unwrap(), "--seed", "9", "solver.max_iters=5", "--out", out.to_str().unwrap()]);
    let echo = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(echo.contains("seed = 9"));
    assert!(echo.contains("solver.max_iters = 5"));
    assert_eq!(summary(&out)["iterations"], 5);
}

#[test]
fn compare_ranks_methods_and_writes_long_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = tmp.path().join("inst");
    ok(&["generate", "--seed", "11", "instance.d=12", "graph.edges=24", "model.C=0.25", "instance.n=24", "--out", inst.to_str().unwrap()]);
    let mut cfgs = Vec::new();
    for m in ["dmo_fw", "random_pgd", "best_pgd"] {
        let p = tmp.path().join(format!("{m}.cfg"));
        fs::write(&p, format!("instance.path = {}\nmethod = {m}\n", inst.display())).unwrap();
        cfgs.push(p);
    }
    let out = tmp.path().join("cmp");
    let mut args = vec!["compare".to_string()];
    for c in &cfgs {
        args.push("--config".into());
        args.push(c.to_string_lossy().into_owned());
    }
    args.extend(["--out".into(), out.to_string_lossy().into_owned()]);
    let stdout = ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    let ranked: Vec<&str> = stdout.lines().filter(|l| l.starts_with(char::is_numeric)).collect();
    assert_eq!(ranked.len(), 3);

    let csv = fs::read_to_string(out.join("compare.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("method,t,objective"));
    for m in ["dmo_fw", "random_pgd", "best_pgd"] {
        assert!(csv.lines().any(|l| l.starts_with(&format!("{m},0,"))));
    }
}

#[test]
fn compare_same_method_twice_gives_identical_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&[&["solve", "--seed", "2", "--out", d.to_str().unwrap()], FIXTURE].concat());
    }
    let out = tmp.path().join("cmp");
    ok(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("compare.csv")).unwrap();
    let column = |label: &str| -> Vec<String> {
        csv.lines()
            .filter_map(|l| l.strip_prefix(label))
            .map(str::to_string)
            .collect()
    };
    let (ca, cb) = (column("dmo_fw#0,"), column("dmo_fw#1,"));
    assert!(!ca.is_empty());
    assert_eq!(ca, cb);
}

#[test]
fn compare_oracle_variants_emits_both() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&[&["solve", "--seed", "4", "name=topg", "--out", a.to_str().unwrap()], FIXTURE].concat());
    ok(&[&["solve", "--seed", "4", "name=topg_optimal", "dmo.variant=topg_optimal", "--out", b.to_str().unwrap()], FIXTURE].concat());
    let out = tmp.path().join("cmp");
    ok(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("compare.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("topg,")));
    assert!(csv.lines().any(|l| l.starts_with("topg_optimal,")));
}

#[test]
fn compare_rejects_mismatched_instances() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&[&["solve", "--seed", "1", "--out", a.to_str().unwrap()], FIXTURE].concat());
    ok(&[&["solve", "--seed", "2", "--out", b.to_str().unwrap()], FIXTURE].concat());
    let out = gsco(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", tmp.path().join("c").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
