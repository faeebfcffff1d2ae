//! GridSnake: a simultaneous-move grid-survival arena.
//!
//! A workspace is valid when it contains `bot.toml` naming either an
//! in-process baseline strategy (`builtin = "greedy"`) or a bot command
//! (`command = "python3 main.py"`) that speaks the stdio protocol:
//!
//! ```text
//! engine -> {"type":"hello"}                          bot -> {"name":"<label>"}
//! engine -> {"type":"move_request","you":..,"state":..} bot -> {"move":"up"}
//! ```
//!
//! Each simulation logs one JSON object per turn.

mod bots;
mod game;
mod record;
mod rules;

use std::fs;
use std::io::ErrorKind;
use std::path::Path;
use std::time::Duration;

use serde::Deserialize;

use crate::arena::{Arena, ArenaArgs, ArenaDescriptor, ArenaError, Participant, SimOutcome, ValidationReport};
use crate::player::{PlayerId, Winner};
use crate::seed;

pub use bots::{BotError, BuiltinBot, ProcessBot, SnakeBot, Strategy};
pub use game::{run_game, GameRecord, GameResult};
pub use record::{Board, Customizations, GameInfo, MoveRequest, SnakeRecord, TurnRecord};
pub use rules::{
    apply_turn, decide_winner, init_game, resolve_eliminations, spawn_food, Direction,
    Elimination, EliminationCause, GameConfig, GameError, GameState, Point, Snake,
};

pub const ARENA_ID: &str = "GridSnake";
pub const ENTRYPOINT: &str = "bot.toml";

/// Contents of `bot.toml`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BotSpec {
    pub builtin: Option<String>,
    pub command: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BotKind {
    Builtin(Strategy),
    Command(String),
}

impl BotSpec {
    pub fn kind(&self) -> Result<BotKind, String> {
        match (&self.builtin, &self.command) {
            (Some(b), None) => Strategy::parse(b)
                .map(BotKind::Builtin)
                .ok_or_else(|| format!("unknown builtin strategy `{b}`")),
            (None, Some(c)) if !c.trim().is_empty() => Ok(BotKind::Command(c.clone())),
            (None, Some(_)) => Err("empty bot command".to_string()),
            _ => Err("exactly one of `builtin` or `command` is required".to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridSnakeArena {
    config: GameConfig,
    descriptor: ArenaDescriptor,
}

impl GridSnakeArena {
    pub fn new(config: GameConfig) -> Self {
        Self {
            config,
            descriptor: ArenaDescriptor {
                arena_id: ARENA_ID.to_string(),
                min_players: 2,
                max_players: 4,
                validation_rules: format!(
                    "`{ENTRYPOINT}` names a builtin strategy or a command that answers the \
                     stdio handshake"
                ),
                log_format: "jsonl".to_string(),
                solution_file: Some(ENTRYPOINT.to_string()),
            },
        }
    }

    pub fn from_args(args: &ArenaArgs) -> Result<Self, ArenaError> {
        Ok(Self::new(GameConfig::from_args(args)?))
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    fn move_timeout(&self) -> Duration {
        Duration::from_millis(self.config.move_timeout)
    }

    fn read_spec(root: &Path) -> Result<Result<BotKind, String>, ArenaError> {
        let path = root.join(ENTRYPOINT);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == ErrorKind::NotFound => {
                return Ok(Err("entrypoint missing".to_string()))
            }
            Err(e) if e.kind() == ErrorKind::InvalidData => {
                return Ok(Err("unparsable: not UTF-8".to_string()))
            }
            Err(e) => return Err(ArenaError::io(path, e)),
        };
        Ok(toml::from_str::<BotSpec>(&text)
            .map_err(|e| format!("unparsable: {}", e.message()))
            .and_then(|spec| spec.kind()))
    }

    fn make_bot(&self, kind: &BotKind, root: &Path, seed: u64) -> Box<dyn SnakeBot> {
        match kind {
            BotKind::Builtin(strategy) => Box::new(BuiltinBot::new(*strategy, seed)),
            BotKind::Command(command) => {
                match ProcessBot::spawn(command, root, self.move_timeout()) {
                    Ok(bot) => Box::new(bot),
                    Err(e) => Box::new(DeadBot(e.to_string())),
                }
            }
        }
    }
}

/// Stand-in for a bot process that failed to start; forfeits every move.
struct DeadBot(String);

impl SnakeBot for DeadBot {
    fn name(&self) -> &str {
        ""
    }

    fn next_move(&mut self, _you: &str, _state: &TurnRecord) -> Result<Direction, BotError> {
        Err(BotError::Protocol(self.0.clone()))
    }
}

impl Arena for GridSnakeArena {
    fn descriptor(&self) -> &ArenaDescriptor {
        &self.descriptor
    }

    fn validate_workspace(&self, root: &Path) -> Result<ValidationReport, ArenaError> {
        if !root.is_dir() {
            return Err(ArenaError::io(
                root,
                std::io::Error::new(ErrorKind::NotFound, "workspace directory missing"),
            ));
        }
        Ok(match Self::read_spec(root)? {
            Err(reason) => ValidationReport::invalid(reason),
            Ok(BotKind::Builtin(_)) => ValidationReport::valid(),
            Ok(BotKind::Command(command)) => {
                match ProcessBot::spawn(&command, root, self.move_timeout()) {
                    Ok(_) => ValidationReport::valid(),
                    Err(e) => ValidationReport::invalid(format!("handshake failed: {e}")),
                }
            }
        })
    }

    fn run_simulation(
        &self,
        participants: &[Participant],
        seed: u64,
    ) -> Result<SimOutcome, ArenaError> {
        let mut bots = Vec::with_capacity(participants.len());
        for (i, p) in participants.iter().enumerate() {
            let kind = Self::read_spec(&p.root)?.map_err(|reason| ArenaError::Crash {
                message: format!("{}: {reason}", p.player_id),
                partial_log: Vec::new(),
            })?;
            let bot_seed = seed::derive(seed, i as u64 + 1);
            bots.push((p.player_id.to_string(), self.make_bot(&kind, &p.root, bot_seed)));
        }
        let record = run_game(&mut bots, &self.config, seed, &format!("{seed:016x}"))
            .map_err(|e| ArenaError::Crash {
                message: e.to_string(),
                partial_log: Vec::new(),
            })?;
        let winner = match record.result.winner {
            Some(ref id) => Winner::Player(PlayerId::new(id.clone())),
            None => Winner::Tie,
        };
        Ok(SimOutcome {
            winner,
            raw_score: record
                .result
                .survived
                .iter()
                .map(|(id, &t)| (PlayerId::new(id.clone()), f64::from(t)))
                .collect(),
            log: record.to_jsonl(),
        })
    }
}
