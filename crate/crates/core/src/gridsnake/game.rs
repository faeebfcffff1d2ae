use std::collections::BTreeMap;

use super::bots::SnakeBot;
use super::record::{GameInfo, TurnRecord};
use super::rules::{apply_turn, decide_winner, init_game, Elimination, GameConfig, GameError};

#[derive(Debug, Clone, PartialEq)]
pub struct GameResult {
    /// Winning snake id, or `None` for a tie.
    pub winner: Option<String>,
    pub turns: u32,
    pub eliminations: Vec<Elimination>,
    /// Turn at which each snake was eliminated, or the final turn if alive.
    pub survived: BTreeMap<String, u32>,
    pub final_lengths: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct GameRecord {
    pub result: GameResult,
    pub turns: Vec<TurnRecord>,
}

impl GameRecord {
    /// The turn log as JSON lines.
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for t in &self.turns {
            serde_json::to_writer(&mut out, t).expect("turn record serializes");
            out.push(b'\n');
        }
        out
    }
}

/// Plays one game. `bots` pairs each snake id with its controller; a bot
/// that errors (timeout, crash, bad reply) forfeits that turn's move.
pub fn run_game(
    bots: &mut [(String, Box<dyn SnakeBot>)],
    config: &GameConfig,
    seed: u64,
    game_id: &str,
) -> Result<GameRecord, GameError> {
    let ids: Vec<String> = bots.iter().map(|(id, _)| id.clone()).collect();
    let mut state = init_game(config, seed, &ids)?;
    for (snake, (_, bot)) in state.snakes.iter_mut().zip(bots.iter()) {
        let name = bot.name();
        if !name.is_empty() {
            snake.name = name.to_string();
        }
    }
    let info = GameInfo::new(game_id, config);
    let mut turns = vec![TurnRecord::capture(&info, config, &state, Vec::new())];
    let mut eliminations = Vec::new();
    let mut survived = BTreeMap::new();

    while state.alive_count() >= 2 && state.turn < config.max_turns {
        let snapshot = turns.last().expect("turn 0 recorded");
        let mut moves = BTreeMap::new();
        for (i, (id, bot)) in bots.iter_mut().enumerate() {
            if !state.snakes[i].alive {
                continue;
            }
            match bot.next_move(id, snapshot) {
                Ok(dir) => {
                    moves.insert(id.clone(), dir);
                }
                Err(e) => log::debug!("snake {id} forfeits turn {}: {e}", state.turn),
            }
            state.snakes[i].latency_ms = bot.last_latency_ms();
        }
        let elims = apply_turn(&mut state, config, &moves);
        for e in &elims {
            survived.insert(e.id.clone(), e.turn);
        }
        eliminations.extend(elims.iter().cloned());
        turns.push(TurnRecord::capture(&info, config, &state, elims));
    }

    for s in state.alive() {
        survived.insert(s.id.clone(), state.turn);
    }
    Ok(GameRecord {
        result: GameResult {
            winner: decide_winner(&state),
            turns: state.turn,
            eliminations,
            survived,
            final_lengths: state
                .snakes
                .iter()
                .map(|s| (s.id.clone(), s.length()))
                .collect(),
        },
        turns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridsnake::bots::{BuiltinBot, Strategy};
    use crate::gridsnake::rules::Direction;
    use crate::gridsnake::BotError;

    fn builtin(id: &str, strategy: Strategy, seed: u64) -> (String, Box<dyn SnakeBot>) {
        (id.to_string(), Box::new(BuiltinBot::new(strategy, seed)))
    }

    struct Mute;

    impl SnakeBot for Mute {
        fn name(&self) -> &str {
            "mute"
        }
        fn next_move(&mut self, _: &str, _: &TurnRecord) -> Result<Direction, BotError> {
            Err(BotError::Exited)
        }
    }

    #[test]
    fn game_ends_with_at_most_one_survivor_or_turn_limit() {
        let config = GameConfig::default();
        let mut bots = vec![
            builtin("a", Strategy::Greedy, 1),
            builtin("b", Strategy::Random, 2),
        ];
        let rec = run_game(&mut bots, &config, 5, "g").unwrap();
        assert_eq!(rec.turns.len() as u32, rec.result.turns + 1);
        let last = rec.turns.last().unwrap();
        assert!(last.board.snakes.len() <= 1 || rec.result.turns == config.max_turns);
        if last.board.snakes.len() == 1 {
            assert_eq!(rec.result.winner.as_deref(), Some(last.board.snakes[0].id.as_str()));
        }
        for (i, t) in rec.turns.iter().enumerate() {
            assert_eq!(t.turn as usize, i);
        }
    }

    #[test]
    fn dead_bot_loses() {
        let config = GameConfig::default();
        let mut bots: Vec<(String, Box<dyn SnakeBot>)> = vec![
            builtin("a", Strategy::Greedy, 1),
            ("b".to_string(), Box::new(Mute)),
        ];
        let rec = run_game(&mut bots, &config, 5, "g").unwrap();
        assert_eq!(rec.result.winner.as_deref(), Some("a"));
        assert_eq!(rec.result.turns, 1);
        assert_eq!(rec.turns[1].eliminated[0].id, "b");
    }

    #[test]
    fn turn_limit_with_equal_lengths_is_a_tie() {
        let config = GameConfig {
            max_turns: 1,
            min_food: 0,
            food_spawn_chance: 0.0,
            ..GameConfig::default()
        };
        let mut bots = vec![
            builtin("a", Strategy::Flood, 1),
            builtin("b", Strategy::Flood, 2),
        ];
        let rec = run_game(&mut bots, &config, 3, "g").unwrap();
        assert_eq!(rec.result.turns, 1);
        assert_eq!(rec.result.winner, None);
    }

    #[test]
    fn replay_is_byte_identical() {
        let config = GameConfig::default();
        let play = || {
            let mut bots = vec![
                builtin("a", Strategy::Greedy, 10),
                builtin("b", Strategy::Greedy, 11),
            ];
            run_game(&mut bots, &config, 77, "g").unwrap().to_jsonl()
        };
        assert_eq!(play(), play());
    }
}
