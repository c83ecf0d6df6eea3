use std::path::Path;
use std::process::{Command, Output};

use rollqv::simulate::{ModelParams, SimConfig};

fn rollqv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rollqv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = SimConfig {
        model: ModelParams::desk(),
        seed: 1,
    }
    .to_toml_string()
        + "surprise = 3\n";
    std::fs::write(&cfg, text).unwrap();
    let out = rollqv(&[
        "simulate",
        "--config",
        &s(&cfg),
        "--out-dir",
        &s(dir.path()),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("surprise"));
}

#[test]
fn ingest_skips_malformed_rows_and_estimate_reads_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    // 2021-06-01 09:45 at UTC-5 is 14:45 UTC
    let open_ns: i64 = 1_622_558_700_000_000_000;
    let mut text = String::from("timestamp_ns,price\n");
    let mut p = 100.0f64;
    for i in 0..60_000i64 {
        p *= 1.0 + 1e-4 * (((i * 7919) % 13) as f64 - 6.0) / 6.0;
        text.push_str(&format!("{},{p}\n", open_ns + i * 360_000_000));
    }
    text.push_str("not-a-number,1.0\n");
    text.push_str(&format!("{},\n", open_ns + 5));
    std::fs::write(&raw, text).unwrap();

    let clean = dir.path().join("clean.csv");
    let out = rollqv(&["ingest", "--in", &s(&raw), "--out", &s(&clean)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 malformed skipped"));
    let cleaned = std::fs::read_to_string(&clean).unwrap();
    assert!(cleaned.starts_with("date,timestamp_ns,time,price\n2021-06-01,"));

    let daily = dir.path().join("daily.csv");
    let out = rollqv(&["estimate", "--ticks", &s(&clean), "--out", &s(&daily)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let daily = std::fs::read_to_string(&daily).unwrap();
    let mut lines = daily.lines();
    assert_eq!(
        lines.next().unwrap(),
        "date,qv_ss,qv_sl,qv_ll,rho,beta,clamped_flag,sparse_blocks"
    );
    assert!(lines.next().unwrap().starts_with("2021-06-01,"));
}

#[test]
fn rate_needs_three_ladder_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("desk.toml");
    std::fs::write(
        &cfg,
        SimConfig {
            model: ModelParams::desk(),
            seed: 1,
        }
        .to_toml_string(),
    )
    .unwrap();
    let out = rollqv(&[
        "rate",
        "--config",
        &s(&cfg),
        "--reps",
        "1",
        "--k",
        "8,16",
        "--out",
        &s(&dir.path().join("slopes.csv")),
    ]);
    assert!(!out.status.success());
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let desk = SimConfig::from_path(&root.join("desk.toml")).unwrap();
    assert_eq!(desk.model, ModelParams::desk());
    let full = SimConfig::from_path(&root.join("full.toml")).unwrap();
    assert_eq!(full.model, ModelParams::full_scale());
}
