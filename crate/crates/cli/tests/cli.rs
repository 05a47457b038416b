use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curricula"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn assert_deterministic(subcommand: &str, config: &Path) {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = run(&[
            subcommand,
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (x, y) = (csv_files(a.path()), csv_files(b.path()));
    assert!(!x.is_empty());
    assert_eq!(x, y);
}

#[test]
fn every_experiment_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let small = [
        ("bandit", "seeds = [1, 2]\n[bandit]\npolicies = [\"ucb1_greedy\", \"curriculum_softmax\", \"uniform\", \"greedy_loss\"]\nhorizons = [100, 2000]\n"),
        ("curriculum", "seeds = [1, 2]\n[task]\nn_samples = 100\nmax_epochs = 60\nforgetting_rate = 0.05\nstrategies = [\"curriculum\", \"uniform\", \"greedy_hard_mining\"]\n"),
        ("anchors", "seeds = [1, 2]\n[anchors]\ntotal_steps = 20\nn_negatives = 300\n"),
        ("lemma1", "seeds = [1, 2]\n"),
    ];
    for (i, (kind, text)) in small.iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        fs::create_dir(&dir).unwrap();
        assert_deterministic(kind, &write_config(&dir, text));
    }
}

#[test]
fn out_of_range_epsilon_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "seeds = [1]\n[curriculum]\nepsilon = 1.5\n");
    let out = run(&[
        "curriculum",
        "--config",
        config.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("curriculum.epsilon"));
}

#[test]
fn malformed_config_reports_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "seeds = [1]\n[bandit]\nhorizons = [\"many\"]\n");
    let out = run(&["bandit", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bandit.horizons"));
}

#[test]
fn config_for_another_experiment_is_rejected() {
    let out = run(&["anchors", "--config", shipped("lemma1.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = run(&[
        "lemma1",
        "--config",
        shipped("lemma1.toml").to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn check_flag_turns_failed_flags_into_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "seeds = [1]\n[bandit]\nhorizons = [4000]\nmin_drift_regret_ratio = 1e9\n[bandit.drift]\nkind = \"rotating\"\nperiod = 1000\n",
    );
    let args = [
        "bandit",
        "--config",
        config.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let mut checked = args.to_vec();
    checked.push("--check");
    let out = run(&checked);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("drift_regret_ratio"));
}

#[test]
fn regret_bound_suite_passes_with_check_for_one_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "bandit",
        "--config",
        shipped("bandit_theorem1.toml").to_str().unwrap(),
        "--seed",
        "4",
        "--check",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("bandit-summary.json")).unwrap()).unwrap();
    assert_eq!(summary["bound_satisfied"], serde_json::Value::Bool(true));
    assert!(tmp.path().join("bandit-4.csv").exists());
}

#[test]
fn checkpoint_replay_reproduces_the_registry() {
    let tmp = tempfile::tempdir().unwrap();
    let config = shipped("checkpoint.toml");
    let (live, replayed) = (tmp.path().join("live"), tmp.path().join("replayed"));
    let out = run(&[
        "checkpoint",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "17",
        "--out",
        live.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = live.join("checkpoint-17-ops.jsonl");
    let out = run(&[
        "checkpoint",
        "--config",
        config.to_str().unwrap(),
        "--replay",
        log.to_str().unwrap(),
        "--out",
        replayed.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(live.join("checkpoint-17.json")).unwrap(),
        fs::read(replayed.join("checkpoint-replay.json")).unwrap()
    );
    let registry =
        curricula::SamplerRegistry::from_json(&fs::read_to_string(live.join("checkpoint-17.json")).unwrap()).unwrap();
    assert_eq!(registry.epoch_index(), 5);
}

#[test]
fn resume_continues_from_a_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let config = shipped("checkpoint.toml");
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    assert!(run(&[
        "checkpoint",
        "--config",
        config.to_str().unwrap(),
        "--out",
        first.to_str().unwrap()
    ])
    .status
    .success());
    let resume = first.join("checkpoint-0.json");
    let out = run(&[
        "checkpoint",
        "--config",
        config.to_str().unwrap(),
        "--resume",
        resume.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let registry =
        curricula::SamplerRegistry::from_json(&fs::read_to_string(second.join("checkpoint-0.json")).unwrap()).unwrap();
    assert_eq!(registry.epoch_index(), 10);
}
