use std::path::PathBuf;
use std::process::Command;

use xmodkit_cli::commands::{self, Algorithm, CondP, Options};
use xmodkit_cli::defs::load;
use xmodkit_cli::{CliError, Verdict};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn opts() -> Options {
    Options { budget: xmodkit::group::DEFAULT_BUDGET, ternary_len: 8, seed: 7 }
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_xmodkit")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn conjugation_on_s3_passes_at_length_8() {
    let defs = load(&read("s3.toml")).unwrap();
    let r = commands::check(&defs, "conj", &opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.results["ternary"]["max_len"], 8);
    assert_eq!(r.results["routes_consistent"], true);
}

#[test]
fn peiffer_violation_names_a_witness() {
    let defs = load(&read("s3.toml")).unwrap();
    let r = commands::check(&defs, "over_trivial", &opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let w = &r.results["axioms"]["peiffer"]["witness"];
    assert!(w["first"].is_string() && w["second"].is_string());
    assert_ne!(w["lhs"], w["rhs"]);
    assert_eq!(r.results["axioms"]["precrossed"]["passed"], true);
    assert!(r.results["ternary"].is_null());
}

#[test]
fn pi0_of_discrete_z4_is_z4() {
    let defs = load(&read("s3.toml")).unwrap();
    let r = commands::pi0_cmd(&defs, "discrete_z4").unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.results["order"], 4);
    assert_eq!(r.results["cosets"].as_array().unwrap().len(), 4);
}

#[test]
fn lift_identity_and_reduction() {
    let defs = load(&read("lift.toml")).unwrap();
    let ok = commands::lift(&defs, "identity", Algorithm::ProjectiveSection, &opts()).unwrap();
    assert_eq!(ok.verdict, Verdict::Pass);
    assert_eq!(ok.results["outcome"], "certified");
    let no = commands::lift(&defs, "reduction", Algorithm::ProjectiveSection, &opts()).unwrap();
    assert_eq!(no.verdict, Verdict::Fail);
    assert_eq!(no.results["step"], "EquivariantSection");
    let fam = commands::lift_family(&defs, "both", Algorithm::ProjectiveSection, &opts()).unwrap();
    let members = fam.results["members"].as_array().unwrap();
    assert_eq!(members[0]["exhaustive_section"], true);
    assert_eq!(members[1]["exhaustive_section"], false);
}

#[test]
fn pullback_section_on_a_module_collapse() {
    let defs = load(&read("modules.toml")).unwrap();
    let r = commands::lift(&defs, "collapse", Algorithm::PullbackSection, &opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn non_schreier_reports_the_obstruction() {
    let r = commands::condp(CondP::NonSchreier, None, None, None, &opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.results["g_order"], 64);
    assert_eq!(r.results["free_shape"]["free_g_order"], 256);
    assert_eq!(r.seed, Some(7));
}

#[test]
fn setmap_pipeline() {
    let defs = load(&read("modules.toml")).unwrap();
    let r = commands::condp(CondP::Z4Pipeline, Some(&defs), Some("fold"), None, &opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn toml_syntax_errors_carry_position() {
    let src = "[group.Z2]\ncyclic = 2\n\n[group.Z3\ncyclic = 3\n";
    match load(src) {
        Err(CliError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_action_table_is_located() {
    let src = "[group.Z2]\ncyclic = 2\n[group.Z3]\ncyclic = 3\n[action.bad]\nactor = \"Z2\"\ncarried = \"Z3\"\ngenerators = { \"1\" = { \"1\" = \"7\" } }\n";
    match load(src) {
        Err(CliError::Definition { line, column, message }) => {
            assert_eq!(line, 8);
            assert!(column > 1);
            assert!(message.contains("`7`"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    // an assignment that is not an automorphism of Z3
    let src = src.replace("\"7\"", "\"0\"");
    assert!(matches!(load(&src), Err(CliError::Definition { .. })));
}

#[test]
fn bad_multiplication_table() {
    let src = "[group.K]\nelements = [\"e\", \"a\"]\ntable = [[\"e\", \"a\"], [\"a\", \"a\"]]\n";
    assert!(matches!(load(src), Err(CliError::Definition { line: 1, .. })));
    let src = "[group.K]\nelements = [\"e\", \"a\"]\ntable = [[\"e\", \"a\"], [\"a\", \"b\"]]\n";
    match load(src) {
        Err(CliError::Definition { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("`b`"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unresolved_references_are_named() {
    let src = "[group.Z2]\ncyclic = 2\n[xmod.x]\nconjugation = \"Z5\"\n";
    match load(src) {
        Err(CliError::Definition { line, message, .. }) => {
            assert_eq!(line, 4);
            assert!(message.contains("`Z5`"));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(load("[grup.Z2]\ncyclic = 2\n"), Err(CliError::Parse { .. })));
}

#[test]
fn digest_ignores_layout_but_not_content() {
    let src = read("s3.toml");
    let base = commands::check(&load(&src).unwrap(), "conj", &opts()).unwrap().inputs_digest;
    // blocks reordered, comments added
    let mut blocks: Vec<&str> = src.split("\n\n").collect();
    blocks.reverse();
    let shuffled = format!("# reordered\n{}", blocks.join("\n\n# --\n"));
    let again = commands::check(&load(&shuffled).unwrap(), "conj", &opts()).unwrap().inputs_digest;
    assert_eq!(base, again);
    let other = commands::check(&load(&src).unwrap(), "alternating", &opts()).unwrap().inputs_digest;
    assert_ne!(base, other);
}

#[test]
fn reports_are_deterministic() {
    let args = ["condp", "transfer", "--count", "6", "--seed", "3"];
    let (a, out1, _) = run(&args);
    let (b, out2, _) = run(&args);
    assert_eq!((a, b), (0, 0));
    assert_eq!(out1, out2);
    let v: serde_json::Value = serde_json::from_str(&out1).unwrap();
    assert_eq!(v["seed"], 3);
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn exit_codes() {
    let s3 = fixture("s3.toml");
    let lift = fixture("lift.toml");
    let s3 = s3.to_str().unwrap();
    let lift = lift.to_str().unwrap();
    assert_eq!(run(&["check", s3, "conj"]).0, 0);
    assert_eq!(run(&["check", s3, "over_trivial"]).0, 1);
    assert_eq!(run(&["check", s3, "missing"]).0, 2);
    assert_eq!(run(&["check", "/nonexistent.toml", "x"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["lift", lift, "reduction"]).0, 1);
    let (code, _, err) = run(&["lift", lift, "identity", "--budget", "1"]);
    assert_eq!(code, 3, "{err}");
    let (code, out, _) = run(&["--summary", "--timing", "pi0", s3, "rotations"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("pi0 rotations: pass"));
    assert!(out.contains(" ms"));
}
