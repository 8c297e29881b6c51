//! The `opvp` binary end to end: exit statuses, outputs and written files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opvp::{fg_to_vpda, vpda_to_fg, Grammar, Vpda};

fn fixture(kind: &str, name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(kind)
        .join(name)
}

fn grammar(name: &str) -> PathBuf {
    fixture("grammars", &format!("{name}.fg"))
}

fn automaton(name: &str) -> PathBuf {
    fixture("vpda", &format!("{name}.vpda"))
}

fn opvp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opvp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn check_lists_the_g3_relations() {
    let out = opvp(&["check", path(&grammar("g3"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("10 relations\n"), "{text}");
    for r in [
        "b≐c", "f≐d", "e≐f", "f≐b", "b⋖b", "f⋖f", "e⋖e", "c⋗c", "d⋗d", "b⋗f",
    ] {
        assert!(
            text.contains(&format!("  {r}\n")),
            "{r} missing from {text}"
        );
    }
    assert!(text.contains("conflict-free"));
}

#[test]
fn check_reports_conflicts() {
    let out = opvp(&["check", path(&grammar("nested_open"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("conflict at (c, r)"));
}

#[test]
fn g3_is_not_a_vp_matrix() {
    let out = opvp(&["classify", path(&grammar("g3"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "not a VP-matrix\n");
}

#[test]
fn classify_prints_the_partition() {
    let out = opvp(&["classify", path(&grammar("open_calls"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "calls: c\nreturns: r\ninternals: s\n");
}

#[test]
fn opm_renders_the_matrix() {
    let out = opvp(&["opm", path(&grammar("nested"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "  c r\nc < =\nr . >\n");
}

#[test]
fn parse_accepts_and_rejects() {
    let g = grammar("nested");
    let out = opvp(&["parse", path(&g), "--input", "c c r r"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("accept\n{S} [0..4)\n"));
    let out = opvp(&["parse", path(&g), "--input", "c c r"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("reject\n"));
}

#[test]
fn parse_refuses_a_grammar_with_conflicts() {
    let out = opvp(&["parse", path(&grammar("nested_open")), "--input", "c r"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not a Floyd grammar"));
}

#[test]
fn unknown_input_letter_is_an_input_error() {
    let out = opvp(&["parse", path(&grammar("nested")), "--input", "c x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--input: `x`"), "{}", stderr(&out));
}

#[test]
fn malformed_file_names_file_line_and_token() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fg");
    fs::write(&bad, "%axiom S\n%terminals a\nS => a\n").unwrap();
    let out = opvp(&["check", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains(&format!("{}:3: `=>`", bad.display())), "{err}");

    let bad = dir.path().join("bad.vpda");
    fs::write(
        &bad,
        "%calls c\n%returns r\n%states q\n%initial q\ncall q c p Z\n",
    )
    .unwrap();
    let out = opvp(&["run", path(&bad), "--input", "c"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(":5: `p`"), "{}", stderr(&out));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = opvp(&["opm", "no/such/file.fg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no/such/file.fg"));
}

#[test]
fn trace_on_an_automaton_uses_the_total_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("p.vpda");
    fs::write(
        &a,
        "%calls c c0\n%returns r\n%internals s\n%states q\n%initial q\n%final q\n",
    )
    .unwrap();
    let out = opvp(&["trace", path(&a), "--input", "s c0 c s r"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "|- < s > c0 < c < s > r > -|\n");

    let out = opvp(&["factorize", path(&a), "--input", "s c0 c s r"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "u1 = s\nc0 = c0\nv1 = c s r\n");
}

#[test]
fn trace_marks_gaps() {
    let out = opvp(&["trace", path(&grammar("nested")), "--input", "r c"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "|- < r ? c > -|\n");
}

#[test]
fn enum_lists_shortest_first() {
    let out = opvp(&["enum", "--max-len", "6", path(&grammar("nested"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "c r\nc c r r\nc c c r r r\n");
}

#[test]
fn run_prints_configurations() {
    let out = opvp(&["run", path(&automaton("dyck")), "--input", "c c r"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "(q0, ⊥ Z) final\naccept\n");
}

#[test]
fn from_vpda_then_equiv() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["dyck", "open_calls", "multi_return"] {
        let a = automaton(name);
        let g = dir.path().join(format!("{name}.fg"));
        let out = opvp(&["from-vpda", path(&a), "-o", path(&g)]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert!(stdout(&out).contains("construction: automaton to grammar"));
        let out = opvp(&["equiv", "--max-len", "8", path(&g), path(&a)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
    }
}

#[test]
fn to_vpda_then_equiv() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["nested", "open_calls"] {
        let g = grammar(name);
        let a = dir.path().join(format!("{name}.vpda"));
        let out = opvp(&["to-vpda", path(&g), "-o", path(&a)]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let out = opvp(&["equiv", "--max-len", "8", path(&g), path(&a)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stdout(&out));
    }
}

#[test]
fn to_vpda_refuses_g3() {
    let out = opvp(&["to-vpda", path(&grammar("g3"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not a VP-matrix"));
}

#[test]
fn equiv_prints_the_shortest_difference() {
    let out = opvp(&[
        "equiv",
        "--max-len",
        "6",
        path(&grammar("nested")),
        path(&automaton("dyck")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stdout(&out).starts_with("differ on `ε`"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn reverse_writes_the_mirror_grammar() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.fg");
    let out = opvp(&["reverse", path(&grammar("nested")), "-o", path(&r)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&r).unwrap(),
        "%axiom S\n%terminals c r\nS -> r S c | r c\n"
    );
    let out = opvp(&["enum", "--max-len", "4", path(&r)]);
    assert_eq!(stdout(&out), "r c\nr r c c\n");
}

#[test]
fn balanced_check() {
    let out = opvp(&[
        "check",
        "--balanced",
        "--pairing",
        "c:r",
        path(&grammar("nested")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("balanced restrictions hold"));

    let out = opvp(&[
        "check",
        "--balanced",
        "--pairing",
        "c:r",
        path(&grammar("nested_open")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("rule `S -> c S` has forbidden stencil cN"));
}

#[test]
fn json_output_carries_the_status() {
    let out = opvp(&["--json", "classify", path(&grammar("g3"))]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], 1);
    assert_eq!(v["vp_matrix"], false);

    let out = opvp(&["check", "--json", path(&grammar("g3"))]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["relations"].as_array().unwrap().len(), 10);
    assert_eq!(v["floyd"], true);
}

#[test]
fn outputs_are_deterministic() {
    let runs = [
        vec!["from-vpda", "../core/fixtures/vpda/nondeterministic.vpda"],
        vec!["to-vpda", "../core/fixtures/grammars/open_calls.fg"],
        vec![
            "--json",
            "parse",
            "../core/fixtures/grammars/l1.fg",
            "--input",
            "a b b e d",
        ],
    ];
    for args in runs {
        let args: Vec<String> = args
            .iter()
            .map(|a| {
                if a.starts_with("..") {
                    path(&Path::new(env!("CARGO_MANIFEST_DIR")).join(a)).to_string()
                } else {
                    a.to_string()
                }
            })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = opvp(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, opvp(&args).stdout, "{args:?}");
    }
}

#[test]
fn written_artifacts_read_back_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let a = automaton("nondeterministic");
    let g = dir.path().join("g.fg");
    opvp(&["from-vpda", path(&a), "-o", path(&g)]);
    let expected = vpda_to_fg(&Vpda::parse_text(&fs::read_to_string(&a).unwrap()).unwrap()).0;
    assert_eq!(
        Grammar::parse_text(&fs::read_to_string(&g).unwrap()).unwrap(),
        expected
    );

    let src = grammar("open_calls");
    let out = dir.path().join("a.vpda");
    opvp(&["to-vpda", path(&src), "-o", path(&out)]);
    let expected = fg_to_vpda(&Grammar::parse_text(&fs::read_to_string(&src).unwrap()).unwrap())
        .unwrap()
        .0;
    assert_eq!(
        Vpda::parse_text(&fs::read_to_string(&out).unwrap()).unwrap(),
        expected
    );
}
