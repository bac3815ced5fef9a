use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rulebase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rulebase")).args(args).env_remove("RULEBASE_SEED").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = rulebase(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn generate(dir: &Path, seed: &str) {
    let dir = dir.to_str().unwrap();
    ok(&["generate", "--depth", "2", "--total", "40", "--seed", seed, "--output", dir]);
}

#[test]
fn generate_is_byte_identical_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    generate(&a, "5");
    generate(&b, "5");
    generate(&c, "6");
    for f in ["train.jsonl", "dev.jsonl", "test.jsonl", "manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_ne!(fs::read(a.join("train.jsonl")).unwrap(), fs::read(c.join("train.jsonl")).unwrap());

    let report = json(&["verify", a.to_str().unwrap()]);
    assert_eq!(report["mismatches"], serde_json::json!([]));
    assert_eq!(report["split_overlap"], 0);

    let stats = json(&["stats", a.to_str().unwrap()]);
    assert_eq!(stats["answers"]["true"], stats["answers"]["false"]);
}

#[test]
fn seed_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    generate(&a, "9");
    let out = Command::new(env!("CARGO_BIN_EXE_rulebase"))
        .args(["generate", "--depth", "2", "--total", "40", "--output", b.to_str().unwrap()])
        .env("RULEBASE_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(a.join("train.jsonl")).unwrap(), fs::read(b.join("train.jsonl")).unwrap());
}

#[test]
fn config_file_and_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "name = \"tiny\"\ntarget_depth = 1\ntotal = 8\n[quotas]\natt_noneg = 2\natt_neg = 2\nrel_noneg = 2\nrel_neg = 2\n").unwrap();
    let out = tmp.path().join("out");
    ok(&["generate", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["name"], "tiny");
    assert_eq!(manifest["config"]["target_depth"], 1);

    fs::write(&cfg, "colour = 1\n").unwrap();
    let bad = rulebase(&["generate", "--config", cfg.to_str().unwrap()]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("colour"));
}

#[test]
fn probes_and_scores() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    let cfg = tmp.path().join("c.toml");
    // removal probes are exact only without negation as failure
    fs::write(
        &cfg,
        "target_depth = 3\ntotal = 20\n[quotas]\natt_noneg = 10\natt_neg = 0\nrel_noneg = 10\nrel_neg = 0\n",
    )
    .unwrap();
    ok(&["generate", "--config", cfg.to_str().unwrap(), "--output", data.to_str().unwrap()]);
    let probes = tmp.path().join("probes.jsonl");
    let preds = tmp.path().join("preds.jsonl");
    ok(&[
        "probe",
        data.to_str().unwrap(),
        "--output",
        probes.to_str().unwrap(),
        "--engine-predictions",
        preds.to_str().unwrap(),
    ]);
    let flips = json(&["score-flips", "--probes", probes.to_str().unwrap(), "--predictions", preds.to_str().unwrap()]);
    assert_eq!(flips["critical_flip_rate"], 1.0);
    assert_eq!(flips["irrelevant_flip_rate"], 0.0);

    let expl = json(&["score-explanations", data.to_str().unwrap()]);
    assert_eq!(expl["macro_f1"], 1.0);
}

#[test]
fn scramble_and_paraphrase_write_datasets() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    generate(&data, "4");
    let scrambled = tmp.path().join("s");
    ok(&["scramble", data.to_str().unwrap(), scrambled.to_str().unwrap(), "--seed", "1"]);
    let before = fs::read_to_string(data.join("train.jsonl")).unwrap();
    let after = fs::read_to_string(scrambled.join("train.jsonl")).unwrap();
    assert_eq!(before.lines().count(), after.lines().count());
    assert_ne!(before, after);

    let para = tmp.path().join("p");
    ok(&["assemble-para", "--output", para.to_str().unwrap(), "--theories", "10", "--seed", "2"]);
    let report = json(&["verify", para.to_str().unwrap()]);
    assert_eq!(report["mismatches"], serde_json::json!([]));
}

#[test]
fn prove_and_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let theory = tmp.path().join("t.theory");
    fs::write(&theory, "(\"Bob\" \"is\" \"big\" \"+\")\n(((\"someone\" \"is\" \"big\" \"+\")) -> (\"someone\" \"is\" \"red\" \"+\"))\n").unwrap();
    let v = json(&["prove", theory.to_str().unwrap(), "(\"Bob\" \"is\" \"red\" \"+\")"]);
    assert_eq!(v["answer"], true);
    assert_eq!(v["depth"], 1);
    assert_eq!(v["critical"], serde_json::json!([0, 1]));

    let bad = rulebase(&["prove", theory.to_str().unwrap(), "(\"Bob\" \"is\""]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));

    let list = json(&["corpus"]);
    assert_eq!(list.as_array().unwrap().len(), 9);
    let birds = json(&["corpus", "birds1"]);
    assert_eq!(birds["name"], "birds1");
    let scenarios = ok(&["corpus", "electricity1", "--scenarios", "3", "--seed", "1"]);
    assert!(scenarios.lines().filter(|l| l.is_empty()).count() >= 2);
    assert!(!rulebase(&["corpus", "birds1", "--scenarios", "2"]).status.success());
    assert!(!rulebase(&["corpus", "nope"]).status.success());
}
