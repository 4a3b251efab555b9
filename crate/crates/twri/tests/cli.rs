use std::path::Path;
use std::process::Command;

use twri::io::read_field_grid;

fn twri(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_twri")).args(args).output().expect("run twri")
}

fn config() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/two_packets.json").display().to_string()
}

#[test]
fn ensemble_reconstruct_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config();
    for cmd in ["ensemble", "reconstruct", "plot"] {
        let o = twri(&[cmd, "--config", &cfg, "--out", out, "--threads", "1"]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let e: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("ensemble_eps0.4.json")).unwrap()).unwrap();
    assert_eq!(e["command"], "ensemble");
    assert_eq!(e["data"]["poles"].as_array().unwrap().len(), 3);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|f| f.unwrap().file_name().into_string().unwrap()).collect();
    for m in 1..=3 {
        assert!(files.contains(&format!("heatmap_eps0.4_q{m}.png")), "{files:?}");
    }
    let manifest = files.iter().find(|f| f.starts_with("reconstruct") && f.ends_with(".json")).expect("grid manifest");
    let (g, _) = read_field_grid(&dir.path().join(manifest)).unwrap();
    assert_eq!((g.spec.nx, g.spec.nt), (241, 41));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model": {"epsilon": -1.0}, "packets": []}"#).unwrap();
    assert_eq!(twri(&["ensemble", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(twri(&["nonsense"]).status.code(), Some(2));
    assert_eq!(twri(&["ensemble"]).status.code(), Some(2));
}
