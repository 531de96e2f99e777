use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn exagg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exagg")).args(args).output().unwrap()
}

fn error_json(out: &Output) -> Value {
    serde_json::from_slice(out.stderr.trim_ascii())
        .unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", String::from_utf8_lossy(&out.stderr)))
}

fn out_dir(tmp: &tempfile::TempDir, name: &str) -> PathBuf {
    tmp.path().join(name)
}

#[test]
fn empty_tweet_file_exits_2_with_json_error() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("tweets.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out_path = out_dir(&tmp, "d");
    let out = exagg(&[
        "diffusion",
        "--documents",
        &fixture("documents.csv"),
        "--tweets",
        empty.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert!(err["error"].is_string());
    assert!(err["message"].as_str().unwrap().contains("tweets"));
    assert!(!out_path.join("manifest.json").exists());
}

#[test]
fn label_writes_one_row_per_document_and_scale() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "l");
    let out = exagg(&[
        "label",
        "--documents",
        &fixture("documents.csv"),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("labels.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "id,kind,journal_ref,scale,strength,advice,sample,overall"
    );
    // (462 press releases + 668 news articles) x 3 scales
    assert_eq!(lines.count(), 1130 * 3);

    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    for entry in manifest["outputs"].as_array().unwrap() {
        let bytes = std::fs::read(dir.join(entry["file"].as_str().unwrap())).unwrap();
        assert_eq!(entry["sha256"].as_str().unwrap().len(), 64);
        assert!(!bytes.is_empty());
    }
    assert_eq!(manifest["command"], "label");
}

#[test]
fn unknown_flag_and_missing_seed_are_usage_errors() {
    let out = exagg(&["label", "--documents", &fixture("documents.csv"), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "usage");

    let out = exagg(&["train-eval", "--features", "f.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["message"].as_str().unwrap().contains("--seed"));
}

#[test]
fn missing_input_exits_2_and_unwritable_output_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = out_dir(&tmp, "x");
    let out = exagg(&[
        "label",
        "--documents",
        "/nonexistent/docs.csv",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["message"]
        .as_str()
        .unwrap()
        .contains("/nonexistent/docs.csv"));

    // --out names an existing regular file
    let blocker = tmp.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let out = exagg(&[
        "label",
        "--documents",
        &fixture("documents.csv"),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "io");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# report settings\ngroup-by = discipline\nkind = press\nscale = two\n",
    )
    .unwrap();
    let dir = out_dir(&tmp, "r");
    let out = exagg(&[
        "--config",
        cfg.to_str().unwrap(),
        "report",
        "--documents",
        &fixture("documents.csv"),
        "--scale",
        "four",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["group_by"], "discipline");
    assert_eq!(manifest["config"]["kind"], "press");
    assert_eq!(manifest["config"]["scale"], "four");

    std::fs::write(&cfg, "no-such-key = 1\n").unwrap();
    let out = exagg(&[
        "--config",
        cfg.to_str().unwrap(),
        "label",
        "--documents",
        &fixture("documents.csv"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_json(&out)["message"].as_str().unwrap().contains("no-such-key"));
}

#[test]
fn zero_threads_rejected() {
    let out = exagg(&["--threads", "0", "label", "--documents", &fixture("documents.csv")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_lists_subcommands_and_exits_0() {
    let out = exagg(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in [
        "ingest",
        "label",
        "report",
        "diffusion",
        "flag",
        "profile",
        "train-eval",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn flag_rejects_partial_scales() {
    let tmp = tempfile::tempdir().unwrap();
    let d = out_dir(&tmp, "d");
    let out = exagg(&[
        "diffusion",
        "--documents",
        &fixture("documents.csv"),
        "--tweets",
        &fixture("tweets.jsonl"),
        "--scale",
        "seven",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!d.join("flags.json").exists());
    let f = out_dir(&tmp, "f");
    let out = exagg(&[
        "flag",
        "--ratios",
        d.join("ratios.csv").to_str().unwrap(),
        "--out",
        f.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
