use std::fs;
use std::path::Path;

use codearena_core::tournament::{
    load_events, load_tournament, run_tournament, RunOptions, TournamentConfig, TournamentError,
    PLAYERS_DIR,
};
use codearena_core::workspace::Termination;
use codearena_core::PlayerId;

fn config(dir: &Path, a_command: &str, visibility: bool) -> TournamentConfig {
    for (tpl, value) in [("seven", "7"), ("three", "3")] {
        fs::create_dir_all(dir.join(tpl)).unwrap();
        fs::write(dir.join(tpl).join("move.txt"), value).unwrap();
    }
    let text = format!(
        r#"
        [tournament]
        rounds = 2
        master_seed = 3
        edit_step_budget = 1
        opponent_visibility = {visibility}
        [game]
        name = "NumberDuel"
        sims_per_round = 4
        [[players]]
        id = "A"
        template = "seven"
        editor = {{ kind = "external", command = '{a_command}' }}
        [[players]]
        id = "B"
        template = "three"
        "#
    );
    TournamentConfig::from_toml_str(&text, dir).unwrap()
}

fn opts() -> RunOptions {
    RunOptions {
        timestamp: Some("250101000000".into()),
    }
}

#[test]
fn opponent_code_is_visible_from_round_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "if [ -f opponent/B/move.txt ]; then cp opponent/B/move.txt seen_{round}.txt; fi; echo EDIT_COMPLETE",
        true,
    );
    let out = dir.path().join("out");
    let rec = run_tournament(&cfg, &out, &opts()).unwrap();
    let tdir = out.join(&rec.tournament_id);
    let ws_a = tdir.join(PLAYERS_DIR).join("A");
    assert!(!ws_a.join("seen_1.txt").exists());
    assert_eq!(fs::read_to_string(ws_a.join("seen_2.txt")).unwrap(), "3");

    // The mounted copy never shows up as a created file.
    let events = load_events(&tdir, &PlayerId::from("A"), 2).unwrap();
    let created: Vec<&String> = events.iter().flat_map(|e| &e.created).collect();
    assert_eq!(created, vec!["seen_2.txt"]);
    assert!(load_tournament(&tdir).unwrap().is_complete());
}

#[test]
fn writes_into_the_opponent_copy_are_undone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "if [ -d opponent/B ]; then echo 999 > opponent/B/move.txt; fi; echo EDIT_COMPLETE",
        true,
    );
    let out = dir.path().join("out");
    let rec = run_tournament(&cfg, &out, &opts()).unwrap();
    let tdir = out.join(&rec.tournament_id);
    assert_eq!(fs::read_to_string(tdir.join(PLAYERS_DIR).join("B/move.txt")).unwrap(), "3");
    let a = PlayerId::from("A");
    assert_eq!(rec.rounds[0].edits[&a].termination, Termination::Completed);
    assert_eq!(rec.rounds[1].edits[&a].termination, Termination::Crashed);
    // B never gains from the attempted write.
    assert_eq!(rec.round_wins.get(&a), Some(&2));
}

#[test]
fn editing_another_workspace_halts_the_tournament() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "echo 9999 > ../B/move.txt", false);
    let out = dir.path().join("out");
    match run_tournament(&cfg, &out, &opts()) {
        Err(TournamentError::Halted { round, message, .. }) => {
            assert_eq!(round, 1);
            assert!(message.contains('B'), "{message}");
        }
        other => panic!("expected a halt, got {other:?}"),
    }
}
