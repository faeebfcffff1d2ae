//! Turn-log schema. Each log line, and the `state` of every move request
//! sent to a bot, is a full snapshot of the board.

use serde::{Deserialize, Serialize};

use super::rules::{Elimination, GameConfig, GameState, Point};

const PALETTE: [&str; 4] = ["#e05d44", "#3b7dd8", "#48a868", "#b86fd1"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub game: GameInfo,
    pub turn: u32,
    pub board: Board,
    /// Snakes eliminated by the move that produced this turn.
    #[serde(default)]
    pub eliminated: Vec<Elimination>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameInfo {
    pub id: String,
    pub ruleset: Ruleset,
    pub map: String,
    pub timeout: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ruleset {
    pub name: String,
    pub version: String,
    pub settings: RulesetSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RulesetSettings {
    pub food_spawn_chance: f64,
    pub minimum_food: usize,
    pub max_turns: u32,
    pub start_length: usize,
    pub start_health: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Board {
    pub height: i32,
    pub width: i32,
    pub snakes: Vec<SnakeRecord>,
    pub food: Vec<Point>,
    pub hazards: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnakeRecord {
    pub id: String,
    pub name: String,
    pub latency: String,
    pub health: i32,
    pub body: Vec<Point>,
    pub head: Point,
    pub length: usize,
    pub shout: String,
    pub squad: String,
    pub customizations: Customizations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customizations {
    pub color: String,
    pub head: String,
    pub tail: String,
}

impl GameInfo {
    pub fn new(id: impl Into<String>, config: &GameConfig) -> Self {
        Self {
            id: id.into(),
            ruleset: Ruleset {
                name: "standard".into(),
                version: "v1".into(),
                settings: RulesetSettings {
                    food_spawn_chance: config.food_spawn_chance,
                    minimum_food: config.min_food,
                    max_turns: config.max_turns,
                    start_length: config.start_length,
                    start_health: config.start_health,
                },
            },
            map: "standard".into(),
            timeout: config.move_timeout,
        }
    }
}

impl TurnRecord {
    /// Snapshot of `state`; only living snakes appear on the board.
    pub fn capture(
        game: &GameInfo,
        config: &GameConfig,
        state: &GameState,
        eliminated: Vec<Elimination>,
    ) -> Self {
        let snakes = state
            .snakes
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive)
            .map(|(i, s)| SnakeRecord {
                id: s.id.clone(),
                name: s.name.clone(),
                latency: s.latency_ms.to_string(),
                health: s.health,
                body: s.body.iter().copied().collect(),
                head: s.head(),
                length: s.length(),
                shout: String::new(),
                squad: String::new(),
                customizations: Customizations {
                    color: PALETTE[i % PALETTE.len()].into(),
                    head: "default".into(),
                    tail: "default".into(),
                },
            })
            .collect();
        Self {
            game: game.clone(),
            turn: state.turn,
            board: Board {
                height: config.height,
                width: config.width,
                snakes,
                food: state.food.clone(),
                hazards: Vec::new(),
            },
            eliminated,
        }
    }

    pub fn snake(&self, id: &str) -> Option<&SnakeRecord> {
        self.board.snakes.iter().find(|s| s.id == id)
    }

    /// Text grid, top row first. Snake `i` of `legend` draws its head as
    /// `A + i` and its body as `a + i`; food is `*`, empty cells `.`.
    pub fn render_text(&self, legend: &[String]) -> String {
        let (w, h) = (self.board.width.max(0) as usize, self.board.height.max(0) as usize);
        let mut grid = vec![vec!['.'; w]; h];
        let mut put = |p: &Point, c: char| {
            if (0..w as i32).contains(&p.x) && (0..h as i32).contains(&p.y) {
                grid[h - 1 - p.y as usize][p.x as usize] = c;
            }
        };
        for f in &self.board.food {
            put(f, '*');
        }
        for s in &self.board.snakes {
            let i = legend.iter().position(|id| *id == s.id).unwrap_or(25).min(25) as u8;
            for b in s.body.iter().skip(1) {
                put(b, (b'a' + i) as char);
            }
            put(&s.head, (b'A' + i) as char);
        }
        let mut out = String::new();
        for row in grid {
            out.extend(row);
            out.push('\n');
        }
        out
    }
}

/// Engine-to-bot request for one move.
#[derive(Debug, Clone, Serialize)]
pub struct MoveRequest<'a> {
    #[serde(rename = "type")]
    pub kind: &'a str,
    pub you: &'a str,
    pub state: &'a TurnRecord,
}
