//! Pluggable code-arena interface.
//!
//! An arena validates a player's workspace and runs one simulation between
//! an ordered set of validated workspaces. Logs are opaque bytes to the
//! engine; each arena declares its own format and file extension.

mod args;
pub mod number_duel;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::player::{PlayerId, Winner};
use crate::seed;

pub use args::{ArgValue, ArenaArgs};

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error("unknown arena `{0}` (registered: {list})", list = registered_arenas().join(", "))]
    UnknownArena(String),
    #[error("invalid arena configuration: {0}")]
    Config(String),
    #[error("cannot read workspace {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("arena crashed: {message}")]
    Crash { message: String, partial_log: Vec<u8> },
    #[error("match aborted after {completed} completed simulations: {source}")]
    Match {
        completed: u64,
        #[source]
        source: Box<ArenaError>,
    },
}

impl ArenaError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ArenaError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArenaDescriptor {
    pub arena_id: String,
    pub min_players: usize,
    pub max_players: usize,
    /// Human-readable statement of what a valid submission looks like.
    pub validation_rules: String,
    /// Extension of per-simulation log files, e.g. `jsonl`.
    pub log_format: String,
    /// Workspace file holding the player's solution, archived each round.
    pub solution_file: Option<String>,
}

impl ArenaDescriptor {
    pub fn supports(&self, players: usize) -> bool {
        (self.min_players..=self.max_players).contains(&players)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub reason: Option<String>,
}

impl ValidationReport {
    pub fn valid() -> Self {
        Self {
            ok: true,
            reason: None,
        }
    }

    pub fn invalid(reason: impl Into<String>) -> Self {
        Self {
            ok: false,
            reason: Some(reason.into()),
        }
    }
}

/// A validated workspace taking part in a simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Participant {
    pub player_id: PlayerId,
    pub root: PathBuf,
}

impl Participant {
    pub fn new(player_id: impl Into<PlayerId>, root: impl Into<PathBuf>) -> Self {
        Self {
            player_id: player_id.into(),
            root: root.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub winner: Winner,
    /// Arena-specific score, comparable only within one simulation.
    pub raw_score: BTreeMap<PlayerId, f64>,
    pub log: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchTally {
    pub sim_wins: BTreeMap<PlayerId, u64>,
    pub ties: u64,
    pub sims: u64,
}

impl MatchTally {
    pub fn new<'a>(players: impl IntoIterator<Item = &'a PlayerId>) -> Self {
        Self {
            sim_wins: players.into_iter().map(|p| (p.clone(), 0)).collect(),
            ties: 0,
            sims: 0,
        }
    }

    pub fn record(&mut self, winner: &Winner) {
        self.sims += 1;
        match winner {
            Winner::Player(p) => *self.sim_wins.entry(p.clone()).or_default() += 1,
            Winner::Tie => self.ties += 1,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.sim_wins.values().sum::<u64>() + self.ties == self.sims
    }
}

/// A code arena. Implementations must be reentrant: concurrent
/// `run_simulation` calls may not share mutable state.
pub trait Arena: Send + Sync {
    fn descriptor(&self) -> &ArenaDescriptor;

    /// Checks the workspace against the arena's entrypoint contract. An
    /// invalid submission is `Ok` with `ok = false`; `Err` is reserved for
    /// workspaces that cannot be read at all.
    fn validate_workspace(&self, root: &Path) -> Result<ValidationReport, ArenaError>;

    /// Runs one simulation. The outcome must be a deterministic function of
    /// the workspaces' content, their order, and `seed`.
    fn run_simulation(&self, participants: &[Participant], seed: u64)
        -> Result<SimOutcome, ArenaError>;
}

pub fn registered_arenas() -> Vec<&'static str> {
    vec![number_duel::ARENA_ID, crate::gridsnake::ARENA_ID]
}

/// Instantiates a registered arena by id.
pub fn create_arena(arena_id: &str, args: &ArenaArgs) -> Result<Box<dyn Arena>, ArenaError> {
    match arena_id {
        number_duel::ARENA_ID => Ok(Box::new(number_duel::NumberDuel::from_args(args)?)),
        crate::gridsnake::ARENA_ID => Ok(Box::new(crate::gridsnake::GridSnakeArena::from_args(
            args,
        )?)),
        other => Err(ArenaError::UnknownArena(other.to_string())),
    }
}

/// Runs `sims` simulations with seeds derived from `seed` and tallies them.
///
/// When `log_dir` is given, simulation `k` (1-based) writes its log to
/// `sim_<k>.<ext>` there, in order.
pub fn run_match(
    arena: &dyn Arena,
    participants: &[Participant],
    sims: u64,
    seed: u64,
    log_dir: Option<&Path>,
) -> Result<MatchTally, ArenaError> {
    let desc = arena.descriptor();
    if sims == 0 {
        return Err(ArenaError::Config("a match needs at least one simulation".into()));
    }
    if !desc.supports(participants.len()) {
        return Err(ArenaError::Config(format!(
            "{} supports {}..={} players, got {}",
            desc.arena_id,
            desc.min_players,
            desc.max_players,
            participants.len()
        )));
    }
    if let Some(dir) = log_dir {
        fs::create_dir_all(dir).map_err(|e| ArenaError::io(dir, e))?;
    }
    let mut tally = MatchTally::new(participants.iter().map(|p| &p.player_id));
    for k in 1..=sims {
        let outcome = arena
            .run_simulation(participants, seed::sim_seed(seed, k))
            .map_err(|e| {
                if let (Some(dir), ArenaError::Crash { partial_log, .. }) = (log_dir, &e) {
                    let _ = fs::write(sim_log_path(dir, k, &desc.log_format), partial_log);
                }
                ArenaError::Match {
                    completed: k - 1,
                    source: Box::new(e),
                }
            })?;
        if let Some(dir) = log_dir {
            let path = sim_log_path(dir, k, &desc.log_format);
            fs::write(&path, &outcome.log).map_err(|e| ArenaError::io(path, e))?;
        }
        tally.record(&outcome.winner);
    }
    Ok(tally)
}

pub fn sim_log_path(dir: &Path, sim_index: u64, ext: &str) -> PathBuf {
    dir.join(format!("sim_{sim_index}.{ext}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_arena_is_rejected() {
        let err = create_arena("Chess", &ArenaArgs::default()).err().unwrap();
        assert!(matches!(err, ArenaError::UnknownArena(_)));
        assert!(err.to_string().contains("NumberDuel"));
    }

    #[test]
    fn tally_bookkeeping() {
        let a = PlayerId::from("A");
        let b = PlayerId::from("B");
        let mut t = MatchTally::new([&a, &b]);
        t.record(&Winner::Player(a.clone()));
        t.record(&Winner::Tie);
        assert!(t.is_consistent());
        assert_eq!(t.sim_wins[&a], 1);
        assert_eq!(t.sim_wins[&b], 0);
        assert_eq!(t.ties, 1);
    }
}
