use std::process::{Command, Output};

fn pitchsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pitchsim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn list_prints_every_id() {
    let out = pitchsim(&["list"]);
    assert!(out.status.success());
    let ids: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(ids, pitchsim::ENV_IDS);
}

#[test]
fn unknown_env_fails_and_lists_ids() {
    let out = pitchsim(&["run", "--env", "SSL-Nope-v9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    for id in pitchsim::ENV_IDS {
        assert!(err.contains(id), "{id} missing from: {err}");
    }
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = pitchsim(&[]);
    assert!(!out.status.success());
}

#[test]
fn run_reports_outcome_and_writes_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("ep.jsonl");
    let out = pitchsim(&["run", "--env", "SSL-GoToBall-v0", "--seed", "4", "--log", log.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["cause"], "timeout");
    assert_eq!(report["steps"], 1200);
    let frames = pitchsim::log::read_log(&log).unwrap();
    assert_eq!(frames.len(), 1201);
}

#[test]
fn run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let logs: Vec<_> = (0..2).map(|i| dir.path().join(format!("{i}.jsonl"))).collect();
    for log in &logs {
        let out = pitchsim(&["run", "--env", "VSSS-SingleAgent-v0", "--policy", "ou", "--seed", "11", "--log", log.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&logs[0]).unwrap(), std::fs::read(&logs[1]).unwrap());
}

#[test]
fn replay_policy_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let actions = dir.path().join("actions.jsonl");
    std::fs::write(&actions, "[0.5, 0.5]\n".repeat(1200)).unwrap();
    let out = pitchsim(&["run", "--env", "VSSS-SingleAgent-v0", "--policy", actions.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn overrides_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("o.toml");
    std::fs::write(&cfg, "episode_seconds = 1.0\n").unwrap();
    let out = pitchsim(&["run", "--env", "SSL-GoToBall-v0", "--overrides", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["steps"], 40);
}

#[test]
fn bad_overrides_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("o.toml");
    std::fs::write(&cfg, "episode_secs = 1.0\n").unwrap();
    let out = pitchsim(&["run", "--env", "SSL-GoToBall-v0", "--overrides", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("episode_secs"));
}

#[test]
fn bench_json_single_scenario() {
    let out = pitchsim(&["bench", "--blue", "2", "--yellow", "1", "--steps", "10000", "--reps", "2", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["n_blue"], 2);
    assert_eq!(report["steps_per_second"].as_array().unwrap().len(), 2);
    assert!(report["steps_per_second_mean"].as_f64().unwrap() > 0.0);
}

#[test]
fn bench_rejects_short_runs() {
    let out = pitchsim(&["bench", "--blue", "1", "--yellow", "1", "--steps", "100"]);
    assert!(!out.status.success());
}

#[cfg(feature = "render")]
fn count_ppm(dir: &std::path::Path) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "ppm"))
        .count()
}

#[cfg(feature = "render")]
#[test]
fn render_log_with_stride() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("ep.jsonl");
    let frames = dir.path().join("frames");
    let run = pitchsim(&["run", "--env", "SSL-PassEndurance-v0", "--log", log.to_str().unwrap()]);
    assert!(run.status.success(), "{}", stderr(&run));
    let out = pitchsim(&["render", "--log", log.to_str().unwrap(), "--out", frames.to_str().unwrap(), "--stride", "10", "--width", "200"]);
    assert!(out.status.success(), "{}", stderr(&out));
    // 121 frames: indices 0, 10, ..., 120
    assert_eq!(count_ppm(&frames), 13);
}

#[cfg(feature = "render")]
#[test]
fn run_renders_during_episode() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    let out = pitchsim(&["run", "--env", "SSL-PassEndurance-v0", "--render", frames.to_str().unwrap(), "--stride", "60"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(count_ppm(&frames), 3);
}

#[cfg(feature = "render")]
#[test]
fn render_rejects_corrupt_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("bad.jsonl");
    std::fs::write(&log, "{not json}\n").unwrap();
    let out = pitchsim(&["render", "--log", log.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}
