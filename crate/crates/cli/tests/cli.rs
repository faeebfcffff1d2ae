use std::fs;
use std::path::{Path, PathBuf};

use codearena_cli::{run, Io, METRICS};
use codearena_core::gridsnake::{run_game, BuiltinBot, GameConfig, SnakeBot, Strategy};

fn codearena(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        std::iter::once("codearena").chain(args.iter().copied()),
        &mut Io {
            out: &mut out,
            err: &mut err,
        },
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Two NumberDuel players: A submits 7, B submits 3 unless `b_editor`
/// overrides it.
fn setup(dir: &Path, name: &str, rounds: u32, b_editor: &str) -> PathBuf {
    for (tpl, value) in [("seven", "7"), ("three", "3")] {
        fs::create_dir_all(dir.join(tpl)).unwrap();
        fs::write(dir.join(tpl).join("move.txt"), value).unwrap();
    }
    let path = dir.join(name);
    fs::write(
        &path,
        format!(
            "[tournament]\nrounds = {rounds}\nmaster_seed = 5\n\
             [game]\nname = \"NumberDuel\"\nsims_per_round = 3\n\
             [[players]]\nid = \"A\"\ntemplate = \"seven\"\n\
             [[players]]\nid = \"B\"\ntemplate = \"three\"\n{b_editor}\n"
        ),
    )
    .unwrap();
    path
}

fn run_one(config: &Path, out: &Path, seed: u64) {
    let (code, stdout, stderr) = codearena(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        &seed.to_string(),
        "--timestamp",
        &format!("2501010000{seed:02}"),
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("winner: "), "{stdout}");
}

/// Two tournaments won by A and one by B.
fn two_one_results(dir: &Path) -> PathBuf {
    let out = dir.join("results");
    let plain = setup(dir, "plain.toml", 2, "");
    let strong_b = setup(
        dir,
        "strong_b.toml",
        2,
        "editor = { kind = \"scripted\", rounds = [[{ op = \"write\", path = \"move.txt\", content = \"9\" }, \
         { op = \"write\", path = \"notes_v1.md\", content = \"a\" }], \
         [{ op = \"write\", path = \"notes_v2.md\", content = \"b\" }]] }",
    );
    run_one(&plain, &out, 1);
    run_one(&plain, &out, 2);
    run_one(&strong_b, &out, 3);
    out
}

#[test]
fn leaderboard_ranks_by_elo() {
    let dir = tempfile::tempdir().unwrap();
    let out = two_one_results(dir.path());
    let (code, stdout, stderr) = codearena(&["leaderboard", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let expected = 1200.0 + 200.0 * 2f64.log10();
    let a_row = stdout.lines().find(|l| l.starts_with("1 ")).unwrap();
    assert!(a_row.contains(" A "), "{stdout}");
    assert!(a_row.contains(&format!("{expected:.1}")), "{stdout}");
    assert!(stdout.contains("66.7%"), "{stdout}");
}

#[test]
fn leaderboard_suppresses_elo_when_separated() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let plain = setup(dir.path(), "plain.toml", 1, "");
    run_one(&plain, &out, 1);
    run_one(&plain, &out, 2);
    let (code, stdout, _) = codearena(&["leaderboard", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("elo: not reported"), "{stdout}");
    assert!(stdout.contains("separation"), "{stdout}");

    let (code, stdout, _) =
        codearena(&["leaderboard", out.to_str().unwrap(), "--pseudo-count", "0.5"]);
    assert_eq!(code, 0);
    assert!(!stdout.contains("not reported"), "{stdout}");
}

#[test]
fn leaderboard_bootstrap_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = two_one_results(dir.path());
    let csv = dir.path().join("csv");
    let args = [
        "leaderboard",
        out.to_str().unwrap(),
        "--bootstrap",
        "parametric",
        "--B",
        "40",
        "--pseudo-count",
        "0.5",
        "--csv",
        csv.to_str().unwrap(),
    ];
    let (code, stdout, stderr) = codearena(&args);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("kendall_tau"), "{stdout}");
    assert!(stdout.contains("boot_sd"), "{stdout}");
    for f in ["leaderboard.csv", "win_rates.csv", "win_matrix.csv", "stability.csv"] {
        assert!(csv.join(f).is_file(), "{f}");
    }
    let matrix = fs::read_to_string(csv.join("win_matrix.csv")).unwrap();
    assert_eq!(matrix.lines().next(), Some("id,A,B"));
    assert_eq!(codearena(&args).1, stdout, "seeded bootstrap is reproducible");
}

#[test]
fn analyze_reports_requested_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = two_one_results(dir.path());
    let (code, stdout, stderr) = codearena(&["analyze", out.to_str().unwrap(), "--metrics", "all"]);
    assert_eq!(code, 0, "{stderr}");
    for m in METRICS {
        assert!(stdout.contains(&format!("== {m} ==")), "{m}: {stdout}");
    }
    // B's notes_v1.md and notes_v2.md normalize to the same stem.
    let red = stdout.split("== redundancy ==").nth(1).unwrap();
    assert!(red.lines().any(|l| l.contains(" B ") && l.trim_end().ends_with("1.0000")), "{red}");

    let (code, stdout, _) = codearena(&["analyze", out.to_str().unwrap(), "--metrics", "lead_change"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("== lead_change =="));
    assert!(!stdout.contains("== comeback =="));
}

#[test]
fn unknown_metric_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = two_one_results(dir.path());
    let (code, _, stderr) = codearena(&["analyze", out.to_str().unwrap(), "--metrics", "speed"]);
    assert_eq!(code, 2);
    for m in METRICS {
        assert!(stderr.contains(m), "{stderr}");
    }
}

#[test]
fn hygiene_without_events_warns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let plain = setup(dir.path(), "plain.toml", 1, "");
    run_one(&plain, &out, 1);
    for entry in walk(&out) {
        if entry.file_name().unwrap().to_string_lossy().starts_with("events_") {
            fs::remove_file(entry).unwrap();
        }
    }
    let (code, stdout, stderr) = codearena(&["analyze", out.to_str().unwrap(), "--metrics", "hygiene"]);
    assert_eq!(code, 0);
    assert!(stderr.contains("no file events"), "{stderr}");
    assert!(!stdout.contains("== hygiene =="));
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn run_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[tournament]\nrounds = 0\n").unwrap();
    let out = dir.path().join("out");
    let (code, _, stderr) = codearena(&["run", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2, "{stderr}");

    let missing = setup(dir.path(), "ok.toml", 1, "").to_string_lossy().replace("ok.toml", "absent.toml");
    let (code, _, _) = codearena(&["run", "--config", &missing, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);

    let (code, _, _) = codearena(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, stdout, _) = codearena(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("leaderboard"));
}

#[test]
fn replay_number_duel_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    run_one(&setup(dir.path(), "plain.toml", 1, ""), &out, 1);
    let tdir = fs::read_dir(&out).unwrap().next().unwrap().unwrap().path();
    let log = tdir.join("round_01/sim_1.jsonl");
    let (code, stdout, _) = codearena(&["replay", log.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("moves A=7 B=3"), "{stdout}");
    assert!(stdout.trim_end().ends_with("winner A"), "{stdout}");

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"moves\":{\"A\":1},\"order\":[\"A\"],\"winner\":\"A\"}\n[1,2]\n").unwrap();
    let (code, _, stderr) = codearena(&["replay", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn replay_grid_snake_renders_every_turn() {
    let config = GameConfig {
        width: 7,
        height: 7,
        max_turns: 30,
        ..GameConfig::default()
    };
    let mut bots: Vec<(String, Box<dyn SnakeBot>)> = vec![
        ("one".into(), Box::new(BuiltinBot::new(Strategy::Greedy, 1))),
        ("two".into(), Box::new(BuiltinBot::new(Strategy::Flood, 2))),
    ];
    let record = run_game(&mut bots, &config, 9, "g").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("sim_1.jsonl");
    fs::write(&log, record.to_jsonl()).unwrap();
    let (code, stdout, stderr) = codearena(&["replay", log.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.starts_with("game g 7x7  A=one B=two"), "{stdout}");
    assert_eq!(stdout.matches("\nturn ").count(), record.turns.len());
}
