//! Black-box tests of the pamsim binary: exit codes, artifacts, overrides.

use std::path::PathBuf;
use std::process::Command;

fn pamsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pamsim"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pamsim-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &PathBuf, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_NOISELESS: &str = r#"
scheme = "manchester"
n_payload_bits = 40000
seed = 5
[rin]
disabled = true
[channel]
thermal_noise_a_per_sqrthz = 0.0
[ber]
min_errors = 1
max_payload_bits = 40000
"#;

#[test]
fn run_writes_report_and_exits_zero() {
    let dir = scratch_dir("run");
    let cfg = write(&dir, "cfg.toml", SMALL_NOISELESS);
    let out = pamsim()
        .arg("run")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.join("out/report.csv")).unwrap();
    assert!(report.starts_with("scheme,received_power_dbm,ber,"));
    assert!(report.contains("manchester"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("BER 0.000e0"), "stdout: {stdout}");
}

#[test]
fn missing_config_gives_machine_readable_error_line() {
    let out = pamsim().arg("run").arg("/definitely/not/here.toml").output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error: io: "), "stderr: {stderr}");
    assert_eq!(stderr.trim().lines().count(), 1);
}

#[test]
fn unknown_key_is_rejected_with_its_name() {
    let dir = scratch_dir("badkey");
    let cfg = write(&dir, "cfg.toml", "scheme = \"uncoded\"\nbawd = 28e9\n[rin]\ndisabled = true\n");
    let out = pamsim().arg("run").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error: unknown-key:"), "stderr: {stderr}");
    assert!(stderr.contains("bawd"));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = scratch_dir("sweep");
    let cfg = write(
        &dir,
        "cfg.toml",
        r#"
scheme = "uncoded"
n_payload_bits = 30000
seed = 9
[rin]
preset = "qdash-mode-3"
[channel]
received_power_dbm = -14.0
ac_coupling_cutoff_hz = 150e6
[ber]
min_errors = 10
max_payload_bits = 60000
[sweep]
parameter = "scheme"
values = ["uncoded", "8b10b", "manchester"]
"#,
    );
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out_dir = dir.join(format!("out{i}"));
        let out = pamsim()
            .arg("sweep")
            .arg(&cfg)
            .arg("--out-dir")
            .arg(&out_dir)
            .arg("--threads")
            .arg(threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        outputs.push((
            std::fs::read(out_dir.join("sweep.csv")).unwrap(),
            std::fs::read(out_dir.join("sweep_summary.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1], "sweep output depends on run or thread count");
    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(text.starts_with(
        "sweep_value,scheme,ber,ser,bits_compared,fec_pass,avg_rin_5g,avg_rin_30g,notch_hz"
    ));
    assert_eq!(text.trim().lines().count(), 4); // header + 3 points
}

#[test]
fn tap_log_written_when_enabled() {
    let dir = scratch_dir("taps");
    let cfg = write(
        &dir,
        "cfg.toml",
        r#"
scheme = "uncoded"
n_payload_bits = 40000
seed = 2
[rin]
disabled = true
[channel]
thermal_noise_a_per_sqrthz = 0.0
[equalizer]
tap_log_stride = 200
[ber]
min_errors = 1
max_payload_bits = 40000
"#,
    );
    let out = pamsim()
        .arg("run")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let taps = std::fs::read_to_string(dir.join("out/taps.csv")).unwrap();
    let mut lines = taps.lines();
    assert_eq!(
        lines.next().unwrap(),
        "symbol_index,tap_0,tap_1,tap_2,tap_3,tap_4,tap_5,tap_6,tap_7,tap_8,tap_9,tap_10,tap_11,tap_12"
    );
    assert!(taps.lines().count() > 50);
}
