use std::fs;
use std::path::Path;

use codearena_core::arena::number_duel::DuelLog;
use codearena_core::gridsnake::TurnRecord;

use crate::{CliError, Io};

enum Log {
    Snake(Vec<TurnRecord>),
    Duel(Vec<DuelLog>),
}

pub fn run(file: &Path, io: &mut Io<'_>) -> Result<(), CliError> {
    let text = fs::read_to_string(file)
        .map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
    let log = parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
    io.print(&render(&log))
}

fn parse(text: &str) -> Result<Log, String> {
    let lines: Vec<&str> = text.strip_suffix('\n').unwrap_or(text).split('\n').collect();
    let first = lines.first().copied().unwrap_or_default();
    if first.trim().is_empty() {
        return Err("line 1: empty log".into());
    }
    let schema_err = |i: usize, e: serde_json::Error| format!("line {}: schema violation: {e}", i + 1);
    if serde_json::from_str::<TurnRecord>(first).is_ok() {
        let mut turns: Vec<TurnRecord> = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            let t: TurnRecord = serde_json::from_str(line).map_err(|e| schema_err(i, e))?;
            if let Some(prev) = turns.last() {
                if t.turn != prev.turn + 1 {
                    return Err(format!(
                        "line {}: schema violation: turn {} follows turn {}",
                        i + 1,
                        t.turn,
                        prev.turn
                    ));
                }
            }
            turns.push(t);
        }
        return Ok(Log::Snake(turns));
    }
    let mut duels = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        duels.push(serde_json::from_str(line).map_err(|e| schema_err(i, e))?);
    }
    Ok(Log::Duel(duels))
}

fn render(log: &Log) -> String {
    let mut out = String::new();
    match log {
        Log::Snake(turns) => {
            let legend: Vec<String> = turns
                .first()
                .map(|t| t.board.snakes.iter().map(|s| s.id.clone()).collect())
                .unwrap_or_default();
            let keys: Vec<String> = legend
                .iter()
                .enumerate()
                .map(|(i, id)| format!("{}={id}", (b'A' + i.min(25) as u8) as char))
                .collect();
            if let Some(t) = turns.first() {
                out += &format!("game {} {}x{}  {}\n", t.game.id, t.board.width, t.board.height, keys.join(" "));
            }
            for t in turns {
                let lengths: Vec<String> = t
                    .board
                    .snakes
                    .iter()
                    .map(|s| format!("{}:len={},hp={}", s.id, s.length, s.health))
                    .collect();
                out += &format!("\nturn {}  {}\n", t.turn, lengths.join(" "));
                out += &t.render_text(&legend);
                for e in &t.eliminated {
                    let cause = serde_json::to_string(&e.cause).unwrap_or_default();
                    out += &format!("eliminated {} ({})", e.id, cause.trim_matches('"'));
                    if let Some(by) = &e.by {
                        out += &format!(" by {by}");
                    }
                    out += "\n";
                }
            }
        }
        Log::Duel(duels) => {
            for d in duels {
                let moves: Vec<String> = d.moves.iter().map(|(p, v)| format!("{p}={v}")).collect();
                let order: Vec<String> = d.order.iter().map(|p| p.to_string()).collect();
                out += &format!(
                    "moves {}  order {}  winner {}\n",
                    moves.join(" "),
                    order.join(","),
                    d.winner
                );
            }
        }
    }
    out
}
