use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::rules::{decide_tournament_winner, Disposition};
use crate::player::{PlayerId, TournamentWinner, Winner};
use crate::rating::TournamentOutcome;
use crate::workspace::{round_dir_name, EditReport, FileEvents, FileManifest};

pub const SUMMARY_FILE: &str = "tournament.txt";
pub const TALLY_FILE: &str = "tally.txt";
pub const PLAYERS_DIR: &str = "players";

pub fn manifest_file(player: &PlayerId) -> String {
    format!("manifest_{player}.txt")
}

pub fn events_file(player: &PlayerId) -> String {
    format!("events_{player}.txt")
}

pub fn solution_file(player: &PlayerId) -> String {
    format!("solution_{player}.txt")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_index: u32,
    pub disposition: Disposition,
    pub round_winner: Winner,
    /// All players, in the shuffled order used for the competition.
    pub player_order: Vec<PlayerId>,
    pub sims: u64,
    pub ties: u64,
    /// Only participants of a played round appear here.
    pub sim_wins: BTreeMap<PlayerId, u64>,
    pub score: BTreeMap<PlayerId, f64>,
    /// Set when the scores were assigned by convention (walkover 100/0)
    /// rather than by simulation.
    #[serde(default)]
    pub score_by_convention: bool,
    pub validity: BTreeMap<PlayerId, bool>,
    #[serde(default)]
    pub invalid_reasons: BTreeMap<PlayerId, String>,
    #[serde(default)]
    pub edits: BTreeMap<PlayerId, EditReport>,
    /// Relative to the tournament's results directory.
    pub log_dir: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Halted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentRecord {
    /// Recovered from the results directory name; not stored in the summary
    /// so reruns produce identical files.
    #[serde(skip)]
    pub tournament_id: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halt_reason: Option<String>,
    pub arena_id: String,
    pub players: Vec<PlayerId>,
    pub config_digest: String,
    #[serde(with = "super::seed_repr")]
    pub master_seed: u64,
    pub rounds_planned: u32,
    pub round_winners: Vec<Winner>,
    pub round_wins: BTreeMap<PlayerId, u32>,
    /// Players who never won a round are absent.
    pub last_win_round: BTreeMap<PlayerId, u32>,
    pub tournament_winner: TournamentWinner,
    #[serde(skip)]
    pub rounds: Vec<RoundRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("no tournament results under {0}")]
    NotFound(PathBuf),
}

impl TournamentRecord {
    pub(crate) fn new(
        tournament_id: String,
        arena_id: String,
        players: Vec<PlayerId>,
        config_digest: String,
        master_seed: u64,
        rounds_planned: u32,
    ) -> Self {
        let mut record = Self {
            tournament_id,
            status: RunStatus::Completed,
            halt_reason: None,
            arena_id,
            players,
            config_digest,
            master_seed,
            rounds_planned,
            round_winners: Vec::new(),
            round_wins: BTreeMap::new(),
            last_win_round: BTreeMap::new(),
            tournament_winner: TournamentWinner::Draw,
            rounds: Vec::new(),
        };
        record.refresh();
        record
    }

    pub(crate) fn push_round(&mut self, round: RoundRecord) {
        self.rounds.push(round);
        self.refresh();
    }

    /// Recomputes the derived fields from `rounds`.
    fn refresh(&mut self) {
        self.round_winners = self.rounds.iter().map(|r| r.round_winner.clone()).collect();
        self.round_wins = self.players.iter().map(|p| (p.clone(), 0)).collect();
        self.last_win_round.clear();
        for r in &self.rounds {
            if let Winner::Player(p) = &r.round_winner {
                *self.round_wins.entry(p.clone()).or_default() += 1;
                self.last_win_round.insert(p.clone(), r.round_index);
            }
        }
        self.tournament_winner = decide_tournament_winner(&self.round_winners);
    }

    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Completed && self.rounds.len() == self.rounds_planned as usize
    }

    /// Checks the summary fields against the per-round records.
    pub fn is_consistent(&self) -> bool {
        let mut copy = self.clone();
        copy.refresh();
        copy.round_winners == self.round_winners
            && copy.round_wins == self.round_wins
            && copy.last_win_round == self.last_win_round
            && copy.tournament_winner == self.tournament_winner
    }

    /// The tournament as one comparison among all players; `None` winner
    /// for a draw.
    pub fn outcome(&self) -> TournamentOutcome {
        TournamentOutcome {
            players: self.players.clone(),
            winner: self.tournament_winner.player().cloned(),
        }
    }

    /// One comparison per round among that round's valid players. Rounds
    /// depend on each other, so fits on these overstate certainty.
    pub fn round_outcomes(&self) -> Vec<TournamentOutcome> {
        self.rounds
            .iter()
            .filter(|r| r.disposition == Disposition::Played)
            .map(|r| TournamentOutcome {
                players: r.sim_wins.keys().cloned().collect(),
                winner: r.round_winner.player().cloned(),
            })
            .collect()
    }

    pub fn summary_text(&self) -> String {
        toml::to_string(self).expect("summary serializes")
    }
}

impl RoundRecord {
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("round record serializes")
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, LoadError> {
    toml::from_str(&read(path)?).map_err(|e| LoadError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Loads a results directory written by `run_tournament`.
pub fn load_tournament(dir: &Path) -> Result<TournamentRecord, LoadError> {
    let mut record: TournamentRecord = parse_toml(&dir.join(SUMMARY_FILE))?;
    record.tournament_id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    for i in 1..=record.round_winners.len() as u32 {
        let path = dir.join(round_dir_name(i)).join(TALLY_FILE);
        record.rounds.push(parse_toml(&path)?);
    }
    if !record.is_consistent() {
        return Err(LoadError::Format {
            path: dir.join(SUMMARY_FILE),
            message: "summary disagrees with round records".into(),
        });
    }
    Ok(record)
}

/// Every tournament directory at or directly below each of `paths`, sorted
/// by tournament id.
pub fn find_tournaments(paths: &[PathBuf]) -> Result<Vec<PathBuf>, LoadError> {
    let mut found = Vec::new();
    for path in paths {
        if path.join(SUMMARY_FILE).is_file() {
            found.push(path.clone());
            continue;
        }
        let entries = fs::read_dir(path).map_err(|source| LoadError::Io {
            path: path.clone(),
            source,
        })?;
        let mut here: Vec<PathBuf> = entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.join(SUMMARY_FILE).is_file())
            .collect();
        if here.is_empty() {
            return Err(LoadError::NotFound(path.clone()));
        }
        found.append(&mut here);
    }
    found.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    found.dedup();
    Ok(found)
}

/// Per-round file events of one player, in round order. Rounds without an
/// events file are skipped.
pub fn load_events(dir: &Path, player: &PlayerId, rounds: u32) -> Result<Vec<FileEvents>, LoadError> {
    let mut out = Vec::new();
    for r in 1..=rounds {
        let path = dir.join(round_dir_name(r)).join(events_file(player));
        if !path.is_file() {
            continue;
        }
        let ev = FileEvents::parse(&read(&path)?).map_err(|message| LoadError::Format {
            path: path.clone(),
            message,
        })?;
        out.push(ev);
    }
    Ok(out)
}

pub fn load_manifest(dir: &Path, player: &PlayerId, round: u32) -> Result<Option<FileManifest>, LoadError> {
    let path = dir.join(round_dir_name(round)).join(manifest_file(player));
    if !path.is_file() {
        return Ok(None);
    }
    FileManifest::parse(&read(&path)?)
        .map(Some)
        .map_err(|message| LoadError::Format { path, message })
}

pub fn load_solution(dir: &Path, player: &PlayerId, round: u32) -> Result<Option<String>, LoadError> {
    let path = dir.join(round_dir_name(round)).join(solution_file(player));
    if !path.is_file() {
        return Ok(None);
    }
    read(&path).map(Some)
}
