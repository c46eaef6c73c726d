mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;

fn sortref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sortref")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn profile_one_wide_row() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    let o = sortref(&["profile", "--input", s(&input)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "subjects=3\nproperties=2\nsignatures=2\ncov=2/3 (0.67)\nsim=3/4 (0.75)\n");
}

#[test]
fn profile_rule_file_and_builtins() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    let rule = f.file("cover.rule", "# coverage, spelled out\n$c = $c -> val($c) = 1\n");
    let o = sortref(&[
        "profile",
        "--input",
        s(&input),
        "--builtin",
        "dep:q,p",
        "--builtin",
        "symdep:p,q",
        "--rule-file",
        s(&rule),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("dep:q,p=1/1 (1.00)\n"), "{text}");
    assert!(text.contains("symdep:p,q=1/3 (0.33)\n"), "{text}");
    assert!(text.contains("cover=2/3 (0.67)\n"), "{text}");
}

#[test]
fn sort_filter_and_type_only_subjects() {
    let f = Fixture::new();
    let ty = sortref_core::RDF_TYPE;
    let text = format!(
        "<{a}> <{ty}> <{t}> .\n<{a}> <{p}> \"1\" .\n<{b}> <{q}> \"1\" .\n<{c}> <{ty}> <{t}> .\n",
        a = iri("a"),
        b = iri("b"),
        c = iri("c"),
        t = iri("T"),
        p = iri("p"),
        q = iri("q"),
    );
    let input = f.file("typed.nt", &text);
    let sort = format!("<{}>", iri("T"));
    let o = sortref(&["profile", "--input", s(&input), "--sort", &sort, "--builtin", "cov"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "subjects=1\nproperties=1\nsignatures=1\ncov=1/1 (1.00)\n");
    assert!(stderr(&o).contains("skipped subject"), "{}", stderr(&o));

    let o = sortref(&["profile", "--input", s(&input), "--sort", &iri("Absent")]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn refine_highest_theta_one_wide_row() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    let dump = f.path("best.txt");
    let o = sortref(&["refine", "--input", s(&input), "--builtin", "cov", "--k", "2", "--out", s(&dump)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("mode=highest-theta\nprobe k=2 theta=2/3 (0.67) feasible\n"), "{text}");
    assert!(text.contains("best k=2 theta=1/1 sorts=2\n"), "{text}");
    let dump = std::fs::read_to_string(dump).unwrap();
    let sample = iri("s2");
    assert!(
        dump.starts_with(&format!("sort 1 sigma=1/1 (1.00) signatures=1 subjects=2\n  10\t2\t{sample}\n")),
        "{dump}"
    );
}

#[test]
fn refine_lowest_k_json() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    for dir in ["up", "down"] {
        let o = sortref(&[
            "refine",
            "--input",
            s(&input),
            "--mode",
            "lowest-k",
            "--theta",
            "9/10",
            "--direction",
            dir,
            "--format",
            "json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        let best = lines.iter().rev().find(|l| l["outcome"] == "feasible").unwrap();
        assert_eq!(best["k"], 2);
        assert_eq!(best["theta"], "9/10");
        assert_eq!(best["sorts"].as_array().unwrap().len(), 2);
        assert!(lines.iter().all(|l| l.get("wall_ms").is_none()));
    }
}

#[test]
fn timings_only_on_request() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    let args = ["refine", "--input", s(&input), "--mode", "lowest-k", "--theta", "1", "--format", "json"];
    let a = sortref(&args);
    let b = sortref(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut timed = args.to_vec();
    timed.push("--timings");
    let t = sortref(&timed);
    assert!(stdout(&t).contains("\"wall_ms\":"));
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    let decide = |k: &str, theta: &str, extra: &[&str]| {
        let mut args = vec!["refine", "--input", s(&input), "--mode", "decide", "--k", k, "--theta", theta];
        args.extend_from_slice(extra);
        sortref(&args).status.code()
    };
    assert_eq!(decide("2", "1", &[]), Some(0));
    assert_eq!(decide("1", "1", &[]), Some(1));
    assert_eq!(decide("2", "1", &["--time-limit", "0"]), Some(2));
    assert_eq!(sortref(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(sortref(&["refine", "--input", s(&input), "--mode", "decide"]).status.code(), Some(64));
    assert_eq!(decide("2", "1.0000001", &[]), Some(64));
    assert_eq!(sortref(&["profile", "--input", s(&f.path("missing.nt"))]).status.code(), Some(66));
    let bad = f.file("bad.nt", "<a> <b> <c> .\n<a> <b> .\n");
    let o = sortref(&["profile", "--input", s(&bad)]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert_eq!(sortref(&["--help"]).status.code(), Some(0));
}

#[test]
fn export_lp_counts_and_determinism() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    let run = |k: &str, out: &Path| {
        let o = sortref(&["export-lp", "--input", s(&input), "--k", k, "--theta", "1", "--out", s(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (stdout(&o), std::fs::read(out).unwrap())
    };
    let (counts, a) = run("2", &f.path("a.lp"));
    let (_, b) = run("2", &f.path("b.lp"));
    assert_eq!(a, b);
    assert_eq!(counts, "variables=16 binary=16 constraints=31\n");
    let lp = String::from_utf8(a).unwrap();
    assert!(lp.starts_with("\\ rule cov k=2 theta=1/1\nMinimize\n"), "{lp}");
    assert!(lp.contains(" hash_1: "));
    let (_, one) = run("1", &f.path("one.lp"));
    assert!(!String::from_utf8(one).unwrap().contains("hash_"));

    let o = sortref(&["export-lp", "--input", s(&input), "--k", "2", "--theta", "1", "--no-symmetry"]);
    assert!(!stdout(&o).contains("hash_"));
    assert!(stderr(&o).contains("constraints=30"));
}

#[test]
fn dep_table_toy() {
    let f = Fixture::new();
    let input = f.file("toy.nt", &ntriples(&[vec!["p", "q"], vec!["p"], vec!["q"]]));
    let o = sortref(&["dep-table", "--input", s(&input), "p", "q"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "dep\tp\tq\np\t1/1 (1.00)\t1/2 (0.50)\nq\t1/2 (0.50)\t1/1 (1.00)\n\nrank\tsymdep\tvalue\n1\tp q\t1/3 (0.33)\n"
    );
    let all = sortref(&["dep-table", "--input", s(&input), "--all-pairs"]);
    assert_eq!(all.stdout, o.stdout);
    let unknown = sortref(&["dep-table", "--input", s(&input), "p", "zzz"]);
    assert_eq!(unknown.status.code(), Some(64));
    assert!(stderr(&unknown).contains("unknown property `zzz`"));
}

#[test]
fn render_images() {
    let f = Fixture::new();
    let uniform = f.file("uniform.nt", &uniform_rows(3));
    let o = sortref(&["render", "--input", s(&uniform)]);
    assert_eq!(stdout(&o), "P2\n1 3\n255\n0\n0\n0\n");

    let wide = f.file("wide.nt", &one_wide_row(3));
    let o = sortref(&["render", "--input", s(&wide)]);
    assert_eq!(stdout(&o), "P2\n2 3\n255\n0 255\n0 255\n0 0\n");

    let o = sortref(&["render", "--input", s(&wide), "--format", "svg", "--scale", "log"]);
    assert!(stdout(&o).starts_with("<svg "));

    let base = f.path("sorts.pgm");
    let o = sortref(&["render", "--input", s(&wide), "--per-sort", "--k", "3", "--theta", "1", "--out", s(&base)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let written: Vec<&str> = std::str::from_utf8(&o.stdout).unwrap().lines().collect();
    assert_eq!(written.len(), 2);
    assert_eq!(std::fs::read_to_string(f.path("sorts-sort1.pgm")).unwrap(), "P2\n2 2\n255\n0 255\n0 255\n");
    assert_eq!(std::fs::read_to_string(f.path("sorts-sort2.pgm")).unwrap(), "P2\n2 1\n255\n0 0\n");
}

#[test]
fn gadget_files() {
    let f = Fixture::new();
    let g = f.file("g.txt", "# example\n3\n1 2\n");
    let out = f.path("g.nt");
    let o = sortref(&["gadget", s(&g), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d = sortref::ntriples::parse_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(d.subject_count(), 12);
    let rule = std::fs::read_to_string(f.path("g.rule")).unwrap();
    let parsed = sortref_core::parse_rule(&rule).unwrap();
    assert_eq!(parsed.arity(), 11);

    // The emitted files drive the generic refine command.
    let o = sortref(&[
        "refine",
        "--input",
        s(&out),
        "--rule-file",
        s(&f.path("g.rule")),
        "--mode",
        "decide",
        "--k",
        "3",
        "--theta",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let one = f.file("one.txt", "1\n");
    let o = sortref(&["gadget", s(&one)]);
    let d = sortref::ntriples::parse_str(&stdout(&o)).unwrap();
    assert_eq!(d.subject_count(), 4);

    let bad = f.file("bad.txt", "3\n1 2\n2 x\n");
    let o = sortref(&["gadget", s(&bad)]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let looped = f.file("loop.txt", "2\n2 2\n");
    assert!(stderr(&sortref(&["gadget", s(&looped)])).contains("self-loop"));
}

#[test]
fn gadget_decide_agrees_with_library() {
    let f = Fixture::new();
    let k4 = f.file("k4.txt", "4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n");
    let o = sortref(&["gadget", s(&k4), "--decide"]);
    let lib = sortref_core::refine::decide_3colorable_via_refinement(
        &sortref_core::refine::UndirectedGraph::complete(4),
        sortref_core::SolveOptions::default(),
        &sortref_core::NoDeadline,
    )
    .unwrap();
    let want = match lib {
        Some(true) => 0,
        Some(false) => 1,
        None => 2,
    };
    assert_eq!(o.status.code(), Some(want), "{}", stderr(&o));
}

#[test]
fn cache_save_and_load() {
    let f = Fixture::new();
    let input = f.file("wide.nt", &one_wide_row(3));
    let cache = f.path("wide.sig");
    let o = sortref(&["cache", "save", "--input", s(&input), "--out", s(&cache)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(
        text,
        format!(
            "SIGV1 2 2\n{p}\t{q}\n10\t2\t{s2}\n11\t1\t{s1}\n",
            p = iri("p"),
            q = iri("q"),
            s1 = iri("s1"),
            s2 = iri("s2")
        )
    );
    let o = sortref(&["cache", "load", s(&cache)]);
    assert_eq!(stdout(&o), "subjects=3\nproperties=2\nsignatures=2\n");

    let direct = sortref(&["profile", "--input", s(&input)]);
    let cached = sortref(&["profile", "--view", s(&cache)]);
    assert_eq!(direct.stdout, cached.stdout);

    let first_lines: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
    let truncated = f.file("t.sig", &first_lines);
    let o = sortref(&["cache", "load", s(&truncated)]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("malformed"), "{}", stderr(&o));
    let v2 = f.file("v2.sig", &text.replace("SIGV1", "SIGV2"));
    assert!(stderr(&sortref(&["cache", "load", s(&v2)])).contains("version"));
}
