//! Snake controllers: in-process baseline strategies and external bot
//! processes speaking newline-delimited JSON over stdio.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{MoveRequest, TurnRecord};
use super::rules::{Direction, Point};

#[derive(Debug, Error)]
pub enum BotError {
    #[error("could not start bot `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bot did not answer within {0:?}")]
    Timeout(Duration),
    #[error("bot process exited")]
    Exited,
    #[error("malformed bot response `{0}`")]
    Protocol(String),
    #[error("bot i/o failed: {0}")]
    Io(#[from] std::io::Error),
}

pub trait SnakeBot: Send {
    fn name(&self) -> &str;

    fn next_move(&mut self, you: &str, state: &TurnRecord) -> Result<Direction, BotError>;

    /// Wall-clock time of the last move request, in milliseconds.
    fn last_latency_ms(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Uniform over moves that do not collide immediately.
    Random,
    /// Heads for the nearest food, avoiding contested cells and dead ends.
    Greedy,
    /// Maximises reachable space, eating when hungry.
    Flood,
}

impl Strategy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(Strategy::Random),
            "greedy" => Some(Strategy::Greedy),
            "flood" => Some(Strategy::Flood),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Greedy => "greedy",
            Strategy::Flood => "flood",
        }
    }
}

/// In-process baseline bot. Random choices come from its own seeded stream.
pub struct BuiltinBot {
    strategy: Strategy,
    name: String,
    rng: ChaCha8Rng,
}

impl BuiltinBot {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        Self {
            strategy,
            name: strategy.label().to_string(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

/// Occupancy grid of the next turn as seen by one snake.
struct BoardView {
    width: i32,
    height: i32,
    blocked: Vec<bool>,
}

impl BoardView {
    fn new(state: &TurnRecord) -> Self {
        let (width, height) = (state.board.width, state.board.height);
        let mut view = Self {
            width,
            height,
            blocked: vec![false; (width * height) as usize],
        };
        for s in &state.board.snakes {
            let n = s.body.len();
            // The tail moves away unless the snake just ate (stacked tail).
            let keep_tail = n >= 2 && s.body[n - 1] == s.body[n - 2];
            let upto = if keep_tail { n } else { n.saturating_sub(1) };
            for &p in &s.body[..upto.max(1)] {
                view.set(p);
            }
        }
        view
    }

    fn inside(&self, p: Point) -> bool {
        p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height
    }

    fn idx(&self, p: Point) -> usize {
        (p.y * self.width + p.x) as usize
    }

    fn set(&mut self, p: Point) {
        if self.inside(p) {
            let i = self.idx(p);
            self.blocked[i] = true;
        }
    }

    fn open(&self, p: Point) -> bool {
        self.inside(p) && !self.blocked[self.idx(p)]
    }

    /// Cells reachable from `start` through open cells, capped at `limit`.
    fn reachable(&self, start: Point, limit: usize) -> usize {
        if !self.open(start) {
            return 0;
        }
        let mut seen = vec![false; self.blocked.len()];
        let mut queue = VecDeque::from([start]);
        seen[self.idx(start)] = true;
        let mut count = 0;
        while let Some(p) = queue.pop_front() {
            count += 1;
            if count >= limit {
                break;
            }
            for d in Direction::ALL {
                let q = p.step(d);
                if self.open(q) && !seen[self.idx(q)] {
                    seen[self.idx(q)] = true;
                    queue.push_back(q);
                }
            }
        }
        count
    }
}

struct Candidate {
    dir: Direction,
    space: usize,
    contested: bool,
    food_distance: i32,
}

impl BuiltinBot {
    fn candidates(&self, you: &str, state: &TurnRecord) -> Vec<Candidate> {
        let Some(me) = state.snake(you) else {
            return Vec::new();
        };
        let view = BoardView::new(state);
        let cap = (me.length * 2).max(16);
        Direction::ALL
            .iter()
            .filter_map(|&dir| {
                let next = me.head.step(dir);
                if !view.open(next) {
                    return None;
                }
                let contested = state.board.snakes.iter().any(|o| {
                    o.id != me.id && o.length >= me.length && o.head.manhattan(next) == 1
                });
                let food_distance = state
                    .board
                    .food
                    .iter()
                    .map(|f| f.manhattan(next))
                    .min()
                    .unwrap_or(0);
                Some(Candidate {
                    dir,
                    space: view.reachable(next, cap),
                    contested,
                    food_distance,
                })
            })
            .collect()
    }

    fn pick(&mut self, best: Vec<&Candidate>) -> Direction {
        best.choose(&mut self.rng).map(|c| c.dir).unwrap_or(Direction::Up)
    }
}

fn best_by<K: Ord>(cands: &[Candidate], key: impl Fn(&Candidate) -> K) -> Vec<&Candidate> {
    let Some(top) = cands.iter().map(&key).max() else {
        return Vec::new();
    };
    cands.iter().filter(|c| key(c) == top).collect()
}

impl SnakeBot for BuiltinBot {
    fn name(&self) -> &str {
        &self.name
    }

    fn next_move(&mut self, you: &str, state: &TurnRecord) -> Result<Direction, BotError> {
        let cands = self.candidates(you, state);
        if cands.is_empty() {
            return Ok(Direction::Up);
        }
        let length = state.snake(you).map(|s| s.length).unwrap_or(1);
        let health = state.snake(you).map(|s| s.health).unwrap_or(0);
        let chosen = match self.strategy {
            Strategy::Random => cands.iter().collect(),
            Strategy::Greedy => best_by(&cands, |c| {
                (!c.contested, c.space >= length, -c.food_distance)
            }),
            Strategy::Flood => {
                let hungry = health < 40;
                best_by(&cands, |c| {
                    (
                        !c.contested,
                        c.space,
                        if hungry { -c.food_distance } else { 0 },
                    )
                })
            }
        };
        Ok(self.pick(chosen))
    }
}

#[derive(Serialize)]
struct Hello {
    #[serde(rename = "type")]
    kind: &'static str,
}

#[derive(Deserialize)]
struct HelloReply {
    name: String,
}

#[derive(Deserialize)]
struct MoveReply {
    #[serde(rename = "move")]
    direction: String,
}

/// A bot running as a child process (`sh -c <command>` in the bot's
/// workspace). The handshake happens in [`ProcessBot::spawn`].
pub struct ProcessBot {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    name: String,
    timeout: Duration,
    latency_ms: u64,
}

impl ProcessBot {
    pub fn spawn(command: &str, cwd: &Path, timeout: Duration) -> Result<Self, BotError> {
        let mut cmd = Command::new("sh");
        cmd.arg("-c")
            .arg(command)
            .current_dir(cwd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null());
        #[cfg(unix)]
        {
            use std::os::unix::process::CommandExt;
            cmd.process_group(0);
        }
        let mut child = cmd.spawn().map_err(|source| BotError::Spawn {
            command: command.to_string(),
            source,
        })?;
        let stdin = child.stdin.take().expect("stdin piped");
        let stdout = child.stdout.take().expect("stdout piped");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut bot = Self {
            child,
            stdin,
            lines,
            name: String::new(),
            timeout,
            latency_ms: 0,
        };
        let reply = bot.exchange(&Hello { kind: "hello" })?;
        let hello: HelloReply =
            serde_json::from_str(&reply).map_err(|_| BotError::Protocol(reply.clone()))?;
        bot.name = hello.name;
        Ok(bot)
    }

    fn exchange<T: Serialize>(&mut self, msg: &T) -> Result<String, BotError> {
        let mut line = serde_json::to_vec(msg).map_err(|e| BotError::Protocol(e.to_string()))?;
        line.push(b'\n');
        let started = Instant::now();
        self.stdin
            .write_all(&line)
            .and_then(|_| self.stdin.flush())
            .map_err(|_| BotError::Exited)?;
        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(reply) => reply,
            Err(RecvTimeoutError::Timeout) => return Err(BotError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => return Err(BotError::Exited),
        };
        self.latency_ms = started.elapsed().as_millis() as u64;
        Ok(reply)
    }
}

impl SnakeBot for ProcessBot {
    fn name(&self) -> &str {
        &self.name
    }

    fn next_move(&mut self, you: &str, state: &TurnRecord) -> Result<Direction, BotError> {
        let request = MoveRequest {
            kind: "move_request",
            you,
            state,
        };
        let reply = self.exchange(&request)?;
        let parsed: MoveReply =
            serde_json::from_str(&reply).map_err(|_| BotError::Protocol(reply.clone()))?;
        Direction::parse(&parsed.direction).ok_or(BotError::Protocol(reply))
    }

    fn last_latency_ms(&self) -> u64 {
        self.latency_ms
    }
}

impl Drop for ProcessBot {
    fn drop(&mut self) {
        crate::process::kill_tree(&mut self.child);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridsnake::record::GameInfo;
    use crate::gridsnake::rules::{init_game, GameConfig};

    fn turn0(seed: u64) -> TurnRecord {
        let config = GameConfig::default();
        let state = init_game(&config, seed, &["a".into(), "b".into()]).unwrap();
        TurnRecord::capture(&GameInfo::new("t", &config), &config, &state, vec![])
    }

    #[test]
    fn builtins_only_choose_safe_moves() {
        let state = turn0(4);
        for strategy in [Strategy::Random, Strategy::Greedy, Strategy::Flood] {
            let mut bot = BuiltinBot::new(strategy, 1);
            let dir = bot.next_move("a", &state).unwrap();
            let head = state.snake("a").unwrap().head.step(dir);
            assert!(head.x >= 0 && head.x < 11 && head.y >= 0 && head.y < 11);
        }
    }

    #[test]
    fn builtin_is_deterministic_per_seed() {
        let state = turn0(9);
        let a: Vec<_> = (0..5)
            .map(|s| BuiltinBot::new(Strategy::Random, s).next_move("a", &state).unwrap())
            .collect();
        let b: Vec<_> = (0..5)
            .map(|s| BuiltinBot::new(Strategy::Random, s).next_move("a", &state).unwrap())
            .collect();
        assert_eq!(a, b);
    }

    #[cfg(unix)]
    #[test]
    fn process_bot_protocol() {
        let dir = tempfile::tempdir().unwrap();
        let script = r#"while read line; do
  case "$line" in
    *hello*) echo '{"name":"shell-bot"}' ;;
    *) echo '{"move":"left"}' ;;
  esac
done"#;
        std::fs::write(dir.path().join("bot.sh"), script).unwrap();
        let mut bot =
            ProcessBot::spawn("sh bot.sh", dir.path(), Duration::from_millis(2000)).unwrap();
        assert_eq!(bot.name(), "shell-bot");
        assert_eq!(bot.next_move("a", &turn0(1)).unwrap(), Direction::Left);
    }

    #[cfg(unix)]
    #[test]
    fn silent_process_bot_times_out() {
        let dir = tempfile::tempdir().unwrap();
        let err = ProcessBot::spawn("sleep 5", dir.path(), Duration::from_millis(100))
            .err()
            .unwrap();
        assert!(matches!(err, BotError::Timeout(_) | BotError::Exited));
    }
}
