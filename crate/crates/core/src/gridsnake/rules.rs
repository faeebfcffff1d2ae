//! Grid-survival game rules: spawning, simultaneous movement, feeding,
//! eliminations and food respawn.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{ArenaArgs, ArenaError};

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("invalid game configuration: {0}")]
    Config(String),
    #[error("{0} players requested, the board has room for 2 to 4")]
    PlayerCount(usize),
    #[error("duplicate snake id `{0}`")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// `Up` increases `y`; the origin is the bottom-left cell.
    pub fn step(self, dir: Direction) -> Self {
        match dir {
            Direction::Up => Self::new(self.x, self.y + 1),
            Direction::Down => Self::new(self.x, self.y - 1),
            Direction::Left => Self::new(self.x - 1, self.y),
            Direction::Right => Self::new(self.x + 1, self.y),
        }
    }

    pub fn manhattan(self, other: Point) -> i32 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Up,
        Direction::Down,
        Direction::Left,
        Direction::Right,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "up" => Some(Direction::Up),
            "down" => Some(Direction::Down),
            "left" => Some(Direction::Left),
            "right" => Some(Direction::Right),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub width: i32,
    pub height: i32,
    pub max_turns: u32,
    pub start_length: usize,
    pub start_health: i32,
    pub food_spawn_chance: f64,
    pub min_food: usize,
    /// Per-move response limit for process bots, in milliseconds.
    pub move_timeout: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            width: 11,
            height: 11,
            max_turns: 500,
            start_length: 3,
            start_health: 100,
            food_spawn_chance: 0.15,
            min_food: 1,
            move_timeout: 500,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.width < 7 || self.height < 7 {
            return Err(GameError::Config(format!(
                "board must be at least 7x7, got {}x{}",
                self.width, self.height
            )));
        }
        if self.start_length < 1 {
            return Err(GameError::Config("start_length must be at least 1".into()));
        }
        if self.start_health < 1 {
            return Err(GameError::Config("start_health must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.food_spawn_chance) {
            return Err(GameError::Config(format!(
                "food_spawn_chance must lie in [0, 1], got {}",
                self.food_spawn_chance
            )));
        }
        if self.max_turns == 0 {
            return Err(GameError::Config("max_turns must be positive".into()));
        }
        Ok(())
    }

    /// Reads the recognised keys from arena arguments; others are ignored.
    pub fn from_args(args: &ArenaArgs) -> Result<Self, ArenaError> {
        let mut c = GameConfig::default();
        let int = |key: &str, lo: i64| -> Result<Option<i64>, ArenaError> {
            match args.int(key)? {
                Some(v) if v < lo => Err(ArenaError::Config(format!(
                    "argument `{key}` must be at least {lo}, got {v}"
                ))),
                other => Ok(other),
            }
        };
        if let Some(v) = int("width", 7)? {
            c.width = v as i32;
        }
        if let Some(v) = int("height", 7)? {
            c.height = v as i32;
        }
        if let Some(v) = int("max_turns", 1)? {
            c.max_turns = v as u32;
        }
        if let Some(v) = int("start_length", 1)? {
            c.start_length = v as usize;
        }
        if let Some(v) = int("start_health", 1)? {
            c.start_health = v as i32;
        }
        if let Some(v) = int("min_food", 0)? {
            c.min_food = v as usize;
        }
        if let Some(v) = int("move_timeout", 1)? {
            c.move_timeout = v as u64;
        }
        if let Some(v) = args.float("food_spawn_chance")? {
            c.food_spawn_chance = v;
        }
        c.validate().map_err(|e| ArenaError::Config(e.to_string()))?;
        Ok(c)
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height
    }

    /// Spawn cells, one per quadrant, in assignment order.
    pub fn spawn_cells(&self) -> [Point; 4] {
        let (w, h) = (self.width, self.height);
        [
            Point::new(2, 2),
            Point::new(w - 3, h - 3),
            Point::new(2, h - 3),
            Point::new(w - 3, 2),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EliminationCause {
    OutOfBounds,
    SelfCollision,
    BodyCollision,
    HeadToHead,
    Starvation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub id: String,
    pub cause: EliminationCause,
    pub turn: u32,
    /// The other snake involved in a collision, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snake {
    pub id: String,
    pub name: String,
    pub health: i32,
    /// Head first.
    pub body: VecDeque<Point>,
    pub alive: bool,
    pub latency_ms: u64,
}

impl Snake {
    pub fn head(&self) -> Point {
        self.body[0]
    }

    pub fn length(&self) -> usize {
        self.body.len()
    }
}

#[derive(Debug, Clone)]
pub struct GameState {
    pub turn: u32,
    pub snakes: Vec<Snake>,
    pub food: Vec<Point>,
    pub rng: ChaCha8Rng,
}

impl GameState {
    pub fn alive(&self) -> impl Iterator<Item = &Snake> {
        self.snakes.iter().filter(|s| s.alive)
    }

    pub fn alive_count(&self) -> usize {
        self.alive().count()
    }

    pub fn snake(&self, id: &str) -> Option<&Snake> {
        self.snakes.iter().find(|s| s.id == id)
    }

    fn free_cells(&self, config: &GameConfig) -> Vec<Point> {
        let mut occupied = vec![false; (config.width * config.height) as usize];
        let idx = |p: Point| (p.y * config.width + p.x) as usize;
        for s in self.alive() {
            for &p in &s.body {
                if config.in_bounds(p) {
                    occupied[idx(p)] = true;
                }
            }
        }
        for &f in &self.food {
            occupied[idx(f)] = true;
        }
        let mut free = Vec::new();
        for y in 0..config.height {
            for x in 0..config.width {
                let p = Point::new(x, y);
                if !occupied[idx(p)] {
                    free.push(p);
                }
            }
        }
        free
    }
}

/// Places 2 to 4 snakes in distinct quadrants (assignment shuffled by the
/// seed) with their whole body stacked on the spawn cell, then places the
/// minimum amount of food.
pub fn init_game(config: &GameConfig, seed: u64, ids: &[String]) -> Result<GameState, GameError> {
    config.validate()?;
    if !(2..=4).contains(&ids.len()) {
        return Err(GameError::PlayerCount(ids.len()));
    }
    for (i, id) in ids.iter().enumerate() {
        if ids[..i].contains(id) {
            return Err(GameError::DuplicateId(id.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..ids.len()).collect();
    slots.shuffle(&mut rng);
    let cells = config.spawn_cells();
    let snakes = ids
        .iter()
        .zip(&slots)
        .map(|(id, &slot)| Snake {
            id: id.clone(),
            name: id.clone(),
            health: config.start_health,
            body: std::iter::repeat_n(cells[slot], config.start_length).collect(),
            alive: true,
            latency_ms: 0,
        })
        .collect();
    let mut state = GameState {
        turn: 0,
        snakes,
        food: Vec::new(),
        rng,
    };
    spawn_food(&mut state, config);
    Ok(state)
}

/// Tops food up to `min_food`; otherwise adds one food with probability
/// `food_spawn_chance`. New food is uniform over cells free of snakes and
/// food. A full board is left unchanged.
pub fn spawn_food(state: &mut GameState, config: &GameConfig) {
    let wanted = if state.food.len() < config.min_food {
        config.min_food - state.food.len()
    } else if config.food_spawn_chance <= 0.0 {
        0
    } else if config.food_spawn_chance >= 1.0
        || state.rng.random::<f64>() < config.food_spawn_chance
    {
        1
    } else {
        0
    };
    if wanted == 0 {
        return;
    }
    let mut free = state.free_cells(config);
    for _ in 0..wanted {
        if free.is_empty() {
            break;
        }
        let pick = state.rng.random_range(0..free.len());
        state.food.push(free.swap_remove(pick));
    }
}

/// Advances the game by one turn.
///
/// Every living snake moves simultaneously (tail popped before collisions
/// are checked), loses one health, and eats food under its new head, which
/// restores full health and grows it by one segment at the tail. A snake
/// without an entry in `moves` reverses onto its own neck and is eliminated
/// by self-collision. Returns the eliminations of this turn.
pub fn apply_turn(
    state: &mut GameState,
    config: &GameConfig,
    moves: &BTreeMap<String, Direction>,
) -> Vec<Elimination> {
    let mut forfeited = vec![false; state.snakes.len()];
    for (i, snake) in state.snakes.iter_mut().enumerate() {
        if !snake.alive {
            continue;
        }
        let head = snake.head();
        let new_head = match moves.get(&snake.id) {
            Some(&dir) => head.step(dir),
            None => {
                forfeited[i] = true;
                snake.body.get(1).copied().unwrap_or(head)
            }
        };
        snake.body.push_front(new_head);
        snake.body.pop_back();
        snake.health -= 1;
    }

    let mut eaten = Vec::new();
    for snake in state.snakes.iter_mut().filter(|s| s.alive) {
        let head = snake.head();
        if state.food.contains(&head) {
            snake.health = config.start_health;
            let tail = *snake.body.back().expect("snake has a body");
            snake.body.push_back(tail);
            eaten.push(head);
        }
    }
    state.food.retain(|f| !eaten.contains(f));

    let eliminations = resolve_eliminations(state, config, &forfeited);
    for e in &eliminations {
        if let Some(s) = state.snakes.iter_mut().find(|s| s.id == e.id) {
            s.alive = false;
        }
    }
    spawn_food(state, config);
    state.turn += 1;
    eliminations
}

/// Applies the elimination rules to the post-move configuration.
///
/// Starvation and leaving the board are checked first; collisions are then
/// checked against the snakes that survived that first pass. A head-to-head
/// collision removes every snake that is not strictly longer than the other.
pub fn resolve_eliminations(
    state: &GameState,
    config: &GameConfig,
    forfeited: &[bool],
) -> Vec<Elimination> {
    let turn = state.turn + 1;
    let elim = |s: &Snake, cause, by: Option<&Snake>| Elimination {
        id: s.id.clone(),
        cause,
        turn,
        by: by.map(|o| o.id.clone()),
    };
    let mut out = Vec::new();
    let mut survivors = Vec::new();
    for (i, s) in state.snakes.iter().enumerate() {
        if !s.alive {
            continue;
        }
        if s.health <= 0 {
            out.push(elim(s, EliminationCause::Starvation, None));
        } else if !config.in_bounds(s.head()) {
            out.push(elim(s, EliminationCause::OutOfBounds, None));
        } else {
            survivors.push(i);
        }
    }
    for &i in &survivors {
        let s = &state.snakes[i];
        let head = s.head();
        if forfeited.get(i).copied().unwrap_or(false) || s.body.iter().skip(1).any(|&p| p == head)
        {
            out.push(elim(s, EliminationCause::SelfCollision, None));
            continue;
        }
        let others = survivors.iter().filter(|&&j| j != i).map(|&j| &state.snakes[j]);
        if let Some(o) = others
            .clone()
            .find(|o| o.body.iter().skip(1).any(|&p| p == head))
        {
            out.push(elim(s, EliminationCause::BodyCollision, Some(o)));
            continue;
        }
        if let Some(o) = others.clone().find(|o| o.head() == head && s.length() <= o.length()) {
            out.push(elim(s, EliminationCause::HeadToHead, Some(o)));
        }
    }
    out
}

/// Winner of a finished game: the last snake alive; at the turn limit, the
/// unique longest living snake; otherwise a tie (`None`).
pub fn decide_winner(state: &GameState) -> Option<String> {
    let alive: Vec<&Snake> = state.alive().collect();
    match alive.as_slice() {
        [] => None,
        [only] => Some(only.id.clone()),
        many => {
            let longest = many.iter().map(|s| s.length()).max()?;
            let mut top = many.iter().filter(|s| s.length() == longest);
            match (top.next(), top.next()) {
                (Some(s), None) => Some(s.id.clone()),
                _ => None,
            }
        }
    }
}
