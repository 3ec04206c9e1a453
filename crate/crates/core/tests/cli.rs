use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const FULL2: &str = r#"{"alphabet": 2, "transitions": [[1, 1], [1, 1]]}"#;

fn run(config: &Path, threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_multispec"));
    cmd.arg("--config").arg(config);
    if let Some(n) = threads {
        cmd.arg("--threads").arg(n.to_string());
    }
    cmd.output().unwrap()
}

fn setup(config: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("full2.json"), FULL2).unwrap();
    let p = dir.path().join("config.json");
    fs::write(&p, config).unwrap();
    (dir, p)
}

fn spectrum_config() -> String {
    json!({
        "command": "spectrum",
        "sft_path": "full2.json",
        "out_dir": "out",
        "seed": 3,
        "params": {"potential": {"depth": 2, "table": {"00": 0.3, "01": -1.0, "10": 0.5, "11": 0.0}}, "n_alpha": 51}
    })
    .to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn success_writes_manifest_with_matching_hashes() {
    let (dir, cfg) = setup(&spectrum_config());
    let o = run(&cfg, None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let entries = manifest["artifacts"].as_array().unwrap();
    let files: Vec<&str> = entries.iter().map(|e| e["file"].as_str().unwrap()).collect();
    assert_eq!(files, ["rotation.json", "spectrum.csv"]);
    for e in entries {
        let body = fs::read(out.join(e["file"].as_str().unwrap())).unwrap();
        assert_eq!(e["bytes"].as_u64().unwrap() as usize, body.len());
        assert_eq!(e["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&body)));
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let (a, cfg_a) = setup(&spectrum_config());
    let (b, cfg_b) = setup(&spectrum_config());
    assert_eq!(run(&cfg_a, Some(1)).status.code(), Some(0));
    assert_eq!(run(&cfg_b, Some(4)).status.code(), Some(0));
    for f in ["rotation.json", "spectrum.csv", "manifest.json"] {
        assert_eq!(
            fs::read(a.path().join("out").join(f)).unwrap(),
            fs::read(b.path().join("out").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn malformed_json_reports_line() {
    let text = "{\n  \"command\": \"spectrum\",\n  \"sft_path\": \"full2.json\"\n  \"out_dir\": \"out\"\n}";
    let (_dir, cfg) = setup(text);
    let o = run(&cfg, None);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn unknown_field_is_rejected() {
    let mut v: Value = serde_json::from_str(&spectrum_config()).unwrap();
    v["colour"] = json!("blue");
    let (_dir, cfg) = setup(&serde_json::to_string_pretty(&v).unwrap());
    let o = run(&cfg, None);
    assert_eq!(o.status.code(), Some(3));
    let msg = stderr(&o);
    assert!(msg.contains("colour") && msg.contains("line"), "{msg}");
}

#[test]
fn unknown_command_is_rejected() {
    let (_dir, cfg) = setup(&spectrum_config().replace("\"spectrum\"", "\"spectra\""));
    assert_eq!(run(&cfg, None).status.code(), Some(3));
}

#[test]
fn target_outside_the_hypotheses_exits_2() {
    // P(t) = 2 log 2 + t is not a pressure function on the full 2-shift
    let csv: String = std::iter::once("t,value".to_string())
        .chain((0..=400).map(|i| {
            let t = -20.0 + 0.1 * i as f64;
            format!("{t},{}", 2.0 * 2f64.ln() + t)
        }))
        .collect::<Vec<_>>()
        .join("\n");
    let config = json!({
        "command": "realize",
        "sft_path": "full2.json",
        "out_dir": "out",
        "seed": 7,
        "params": {"target": {"kind": "pressure", "csv": "target.csv"}, "depth": 1}
    });
    let (dir, cfg) = setup(&config.to_string());
    fs::write(dir.path().join("target.csv"), csv).unwrap();
    let o = run(&cfg, None);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn write_failure_exits_1() {
    let (dir, cfg) = setup(&spectrum_config());
    fs::write(dir.path().join("out"), "in the way").unwrap();
    let o = run(&cfg, None);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}
