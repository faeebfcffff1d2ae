//! NumberDuel: each submission is a `move.txt` holding an integer in
//! `[0, 2^31)`; the largest number wins and equal maxima tie. The seed is
//! ignored, which makes it a zero-noise arena for exercising the engine.

use std::collections::BTreeMap;
use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Arena, ArenaArgs, ArenaDescriptor, ArenaError, Participant, SimOutcome, ValidationReport};
use crate::player::{PlayerId, Winner};

pub const ARENA_ID: &str = "NumberDuel";
pub const ENTRYPOINT: &str = "move.txt";
const MAX_MOVE: u64 = 1 << 31;

/// One line per simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuelLog {
    pub moves: BTreeMap<PlayerId, u64>,
    pub order: Vec<PlayerId>,
    pub winner: Winner,
}

#[derive(Debug, Clone)]
pub struct NumberDuel {
    descriptor: ArenaDescriptor,
}

impl Default for NumberDuel {
    fn default() -> Self {
        Self {
            descriptor: ArenaDescriptor {
                arena_id: ARENA_ID.to_string(),
                min_players: 2,
                max_players: 8,
                validation_rules: format!(
                    "`{ENTRYPOINT}` holds a base-10 integer in [0, 2^31)"
                ),
                log_format: "jsonl".to_string(),
                solution_file: Some(ENTRYPOINT.to_string()),
            },
        }
    }
}

impl NumberDuel {
    pub fn from_args(args: &ArenaArgs) -> Result<Self, ArenaError> {
        for key in args.keys() {
            log::warn!("{ARENA_ID} ignores argument `{key}`");
        }
        Ok(Self::default())
    }

    fn read_move(root: &Path) -> Result<Result<u64, String>, ArenaError> {
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
        Ok(match text.trim().parse::<u64>() {
            Ok(v) if v < MAX_MOVE => Ok(v),
            Ok(v) => Err(format!("out of range: {v}")),
            Err(_) => Err("unparsable".to_string()),
        })
    }
}

impl Arena for NumberDuel {
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
        Ok(match Self::read_move(root)? {
            Ok(_) => ValidationReport::valid(),
            Err(reason) => ValidationReport::invalid(reason),
        })
    }

    fn run_simulation(
        &self,
        participants: &[Participant],
        _seed: u64,
    ) -> Result<SimOutcome, ArenaError> {
        let mut moves = BTreeMap::new();
        for p in participants {
            let value = Self::read_move(&p.root)?.map_err(|reason| ArenaError::Crash {
                message: format!("{}: {reason}", p.player_id),
                partial_log: Vec::new(),
            })?;
            moves.insert(p.player_id.clone(), value);
        }
        let best = moves.values().copied().max().unwrap_or(0);
        let mut leaders = moves.iter().filter(|(_, &v)| v == best).map(|(p, _)| p);
        let winner = match (leaders.next(), leaders.next()) {
            (Some(p), None) => Winner::Player(p.clone()),
            _ => Winner::Tie,
        };
        let entry = DuelLog {
            moves: moves.clone(),
            order: participants.iter().map(|p| p.player_id.clone()).collect(),
            winner: winner.clone(),
        };
        let mut log = serde_json::to_vec(&entry).expect("duel log serializes");
        log.push(b'\n');
        Ok(SimOutcome {
            winner,
            raw_score: moves.into_iter().map(|(p, v)| (p, v as f64)).collect(),
            log,
        })
    }
}
