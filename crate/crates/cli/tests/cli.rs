//! Driver behavior and binary-level checks: name rules, failure modes,
//! flags, exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use specglue_cli::driver::{run_script, Options};
use specglue_cli::script::{parse, print};

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("specglue-cli-{}-{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn opts_in(dir: &Path) -> Options {
    Options {
        out_dir: dir.join("out"),
        script_dir: dir.to_path_buf(),
        ..Options::default()
    }
}

const ONE_GLUE: &str = "\
ring T = C[[x1,x2,x3,x4,x5,x6,x7,x8]] / (x1,x5) & (x1,x6,x7) & (x2,x3,x5) & (x2,x3,x6,x7)
glue B = T at (x1,x5,x6,x7,x8) , (x2,x3,x5,x6,x7,x8)
shape B
";

#[test]
fn sample_scripts_are_in_canonical_form() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scripts");
    for name in ["one_glue.script", "double_glue.script"] {
        let text = fs::read_to_string(dir.join(name)).unwrap();
        let script = parse(&text).unwrap();
        let printed = print(&script);
        let reparsed = parse(&printed).unwrap();
        assert_eq!(script.statements.iter().map(|l| &l.statement).collect::<Vec<_>>(),
                   reparsed.statements.iter().map(|l| &l.statement).collect::<Vec<_>>(),
                   "{name}");
        let body: String = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(printed, body, "{name} should be written canonically");
    }
}

#[test]
fn undeclared_names_and_collisions_are_hard_errors() {
    let dir = temp_dir("names");
    let err = run_script(&parse("shape T\n").unwrap(), &opts_in(&dir)).unwrap_err();
    assert_eq!(err.line, Some(1));
    assert!(err.message.contains("undeclared"));

    let two = "ring T = C[[a]] / (a)\nring T = C[[b]] / (b)\n";
    let err = run_script(&parse(two).unwrap(), &opts_in(&dir)).unwrap_err();
    assert_eq!(err.line, Some(2));
    assert!(err.message.contains("already declared"));

    let err = run_script(&parse("ring T = K[[a]] / (a)\n").unwrap(), &opts_in(&dir)).unwrap_err();
    assert!(err.message.contains("unknown base `K`"));
}

#[test]
fn failed_hypothesis_check_clears_pass_and_skips_the_rest() {
    let dir = temp_dir("failcheck");
    let text = "\
ring T = C[[a,b,v]] / (a) & (b)
glue B = T at (a,v) , (a,b,v)
shape T
";
    let outcome = run_script(&parse(text).unwrap(), &opts_in(&dir)).unwrap();
    assert!(!outcome.pass);
    let checks = outcome.report["hypothesis_checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    let violations = checks[0]["check"]["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    assert!(outcome.report["shapes"].as_array().unwrap().is_empty(),
            "statements after the failure must not run");
    assert!(outcome.report["notes"][0].as_str().unwrap().contains("skipped"));
    assert!(dir.join("out/report.json").exists());
}

#[test]
fn rational_base_fails_hypotheses_unless_asserted() {
    let dir = temp_dir("assert");
    let text = "\
ring T = Q[[a,b,v]] / (a,v) & (b,v)
glue B = T at (a,v) , (b,v)
";
    let outcome = run_script(&parse(text).unwrap(), &opts_in(&dir)).unwrap();
    assert!(!outcome.pass);
    let violations =
        outcome.report["hypothesis_checks"][0]["check"]["violations"].as_array().unwrap().clone();
    let flags: Vec<&str> = violations.iter().map(|v| v["flag"].as_str().unwrap()).collect();
    assert_eq!(flags, vec!["uncountable", "card_eq_residue"]);

    let mut opts = opts_in(&dir);
    opts.assert_flags =
        vec![("uncountable".to_string(), true), ("card_eq_residue".to_string(), true)];
    let outcome = run_script(&parse(text).unwrap(), &opts).unwrap();
    assert!(outcome.pass);

    let mut opts = opts_in(&dir);
    opts.assert_flags = vec![("domain".to_string(), true)];
    let err = run_script(&parse(text).unwrap(), &opts).unwrap_err();
    assert!(err.message.contains("not assertable"));
}

#[test]
fn merged_shapes_are_terminal_and_single_use() {
    let dir = temp_dir("lineage");
    let base = "\
ring T = C[[x1,x2,x3,x4,x5,x6,x7,x8]] / (x1,x5) & (x1,x6,x7) & (x2,x3,x5) & (x2,x3,x6,x7)
glue B = T at (x1,x5,x6,x7,x8) , (x2,x3,x5,x6,x7,x8)
gluemin S = B classes {(x5),(x6,x7)}
";
    let ok = run_script(&parse(base).unwrap(), &opts_in(&dir)).unwrap();
    assert!(ok.pass);

    let twice = format!("{base}gluemin S2 = B classes {{(x5) | (x6,x7)}}\n");
    let err = run_script(&parse(&twice).unwrap(), &opts_in(&dir)).unwrap_err();
    assert!(err.message.contains("one per lineage"));

    let from_shape = format!("{base}glue B2 = S at (x5) , (x6,x7)\n");
    let err = run_script(&parse(&from_shape).unwrap(), &opts_in(&dir)).unwrap_err();
    assert!(err.message.contains("merged shape, not a ring"));

    let verify_shape = format!("{base}verify S\n");
    let err = run_script(&parse(&verify_shape).unwrap(), &opts_in(&dir)).unwrap_err();
    assert!(err.message.contains("merged shape, not a ring"));
}

#[test]
fn gluemin_shape_accepts_shape_and_embed_requests() {
    let dir = temp_dir("shapereq");
    let text = "\
ring T = C[[x1,x2,x3,x4,x5,x6,x7,x8]] / (x1,x5) & (x1,x6,x7) & (x2,x3,x5) & (x2,x3,x6,x7)
glue B = T at (x1,x5,x6,x7,x8) , (x2,x3,x5,x6,x7,x8)
gluemin S = B classes {(x5),(x6,x7)}
shape S
embed five.poset in S
";
    fs::write(
        dir.join("five.poset"),
        "x1 < x2\nx2 < x3\nx3 < x4\nx1 < x5\nx5 < x4\n",
    )
    .unwrap();
    let outcome = run_script(&parse(text).unwrap(), &opts_in(&dir)).unwrap();
    assert!(outcome.pass);
    assert!(dir.join("out/S.json").exists());
    assert!(dir.join("out/S.dot").exists());
    assert!(outcome.report["embeddings"][0]["found"].is_object());
}

#[test]
fn embedding_none_is_a_result_not_a_failure() {
    let dir = temp_dir("embednone");
    fs::write(
        dir.join("five.poset"),
        "x1 < x2\nx2 < x3\nx3 < x4\nx1 < x5\nx5 < x4\n",
    )
    .unwrap();
    let text = "\
ring D = C[[a,b,c]] / (0)
embed five.poset in D
";
    let outcome = run_script(&parse(text).unwrap(), &opts_in(&dir)).unwrap();
    assert!(outcome.pass);
    assert!(outcome.report["embeddings"][0]["found"].is_null());
}

#[test]
fn strict_mode_reports_both_results_when_they_differ() {
    let dir = temp_dir("strict");
    fs::write(dir.join("pair.poset"), "a < x\nb < y\n").unwrap();
    let text = "\
ring D = C[[a,b,c,d]] / (0)
embed pair.poset in D
";
    let mut opts = opts_in(&dir);
    opts.strict_embed = true;
    let outcome = run_script(&parse(text).unwrap(), &opts).unwrap();
    assert!(outcome.pass);
    let entry = &outcome.report["embeddings"][0];
    assert!(entry["found"].is_object(), "the literal reading stacks the chains");
    assert!(entry["strict_found"].is_null(), "order reflection rules the chain out");
    assert_eq!(entry["modes_differ"], serde_json::json!(true));

    let loose_only = run_script(&parse(text).unwrap(), &opts_in(&dir)).unwrap();
    assert!(loose_only.report["embeddings"][0].get("strict_found").is_none());
}

#[test]
fn oracle_off_records_skips_instead_of_verdicts() {
    let dir = temp_dir("oracleoff");
    let mut opts = opts_in(&dir);
    opts.oracle = false;
    let text = format!("{ONE_GLUE}verify B\n");
    let outcome = run_script(&parse(&text).unwrap(), &opts).unwrap();
    assert!(outcome.pass);
    let oracle = outcome.report["oracle"].as_array().unwrap();
    assert_eq!(oracle.len(), 1);
    assert_eq!(oracle[0]["skipped"], serde_json::json!("oracle disabled"));
}

#[test]
fn binary_exit_codes_separate_failures_from_errors() {
    let dir = temp_dir("exitcodes");
    let bin = env!("CARGO_BIN_EXE_specglue");

    fs::write(dir.join("good.script"), ONE_GLUE).unwrap();
    let status = Command::new(bin)
        .args(["run", "good.script", "--out", "out-good"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{status:?}");

    let failing = "\
ring T = C[[a,b,v]] / (a) & (b)
glue B = T at (a,v) , (a,b,v)
";
    fs::write(dir.join("fail.script"), failing).unwrap();
    let status = Command::new(bin)
        .args(["run", "fail.script", "--out", "out-fail"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1), "{status:?}");

    fs::write(dir.join("bad.script"), "ring T = C[[a]]\n").unwrap();
    let status = Command::new(bin)
        .args(["run", "bad.script"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2), "{status:?}");
    let stderr = String::from_utf8(status.stderr).unwrap();
    assert!(stderr.contains("line 1"), "{stderr}");
}

#[test]
fn fmt_prints_the_canonical_form() {
    let dir = temp_dir("fmt");
    let bin = env!("CARGO_BIN_EXE_specglue");
    fs::write(
        dir.join("messy.script"),
        "ring   T =  C[[ a , b ]]  /  ( a )   &  ( b )\n\n# done\nshape    T\n",
    )
    .unwrap();
    let output = Command::new(bin)
        .args(["fmt", "messy.script"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(output.stdout).unwrap(),
        "ring T = C[[a,b]] / (a) & (b)\nshape T\n"
    );
}
