use std::collections::BTreeMap;
use std::path::PathBuf;

use codearena_core::analytics::{
    all_created, comeback_counts, filename_redundancy, hygiene_ratios, lead_changes,
    outcome_series, solution_diversity, throwaway_files, win_rate_matrix, win_share,
};
use codearena_core::tournament::{load_events, load_solution, TournamentRecord};
use codearena_core::workspace::FileEvents;
use codearena_core::PlayerId;

use super::load_records;
use crate::table::{num, Table};
use crate::{CliError, Io};

pub const METRICS: [&str; 8] = [
    "win_rate",
    "comeback",
    "lead_change",
    "win_share",
    "diversity",
    "redundancy",
    "throwaway",
    "hygiene",
];

#[derive(Debug, clap::Args)]
pub struct Args {
    /// A tournament directory or a parent holding several.
    #[arg(required = true)]
    pub dirs: Vec<PathBuf>,
    /// Comma-separated metric names, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    pub metrics: Vec<String>,
    /// Longest losing streak reported by `comeback`.
    #[arg(long, default_value_t = 5)]
    pub max_streak: usize,
    /// Also write each metric table as `<metric>.csv` into this directory.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

struct Loaded {
    dir: PathBuf,
    record: TournamentRecord,
    events: BTreeMap<PlayerId, Vec<FileEvents>>,
}

pub fn run(args: &Args, io: &mut Io<'_>) -> Result<(), CliError> {
    let metrics = select(&args.metrics)?;
    let records = load_records(&args.dirs, true, io)?;
    let mut loaded = Vec::new();
    for (dir, record) in records {
        let mut events = BTreeMap::new();
        for p in &record.players {
            let ev = load_events(&dir, p, record.round_winners.len() as u32)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            events.insert(p.clone(), ev);
        }
        loaded.push(Loaded { dir, record, events });
    }
    let has_events = loaded.iter().any(|l| l.events.values().any(|e| !e.is_empty()));

    let mut text = String::new();
    for metric in metrics {
        let needs_events = matches!(metric, "redundancy" | "throwaway" | "hygiene");
        if needs_events && !has_events {
            io.warn(&format!("{metric}: no file events recorded; metric absent"));
            continue;
        }
        let table = match metric {
            "win_rate" => win_rate(&loaded),
            "comeback" => comeback(&loaded, args.max_streak),
            "lead_change" => lead_change(&loaded),
            "win_share" => share(&loaded),
            "diversity" => diversity(&loaded)?,
            "redundancy" => redundancy(&loaded),
            "throwaway" => throwaway(&loaded),
            "hygiene" => hygiene(&loaded),
            _ => unreachable!("metric names are validated"),
        };
        text += &format!("== {metric} ==\n{}\n", table.render());
        if let Some(dir) = &args.csv {
            table
                .write_csv(&dir.join(format!("{metric}.csv")))
                .map_err(|e| CliError::Infra(format!("writing CSV: {e}")))?;
        }
    }
    io.print(&text)
}

fn select(requested: &[String]) -> Result<Vec<&'static str>, CliError> {
    if requested.iter().any(|m| m == "all") {
        return Ok(METRICS.to_vec());
    }
    let mut out = Vec::new();
    for m in requested {
        match METRICS.iter().find(|k| **k == m.as_str()) {
            Some(k) if !out.contains(k) => out.push(*k),
            Some(_) => {}
            None => {
                return Err(CliError::Usage(format!(
                    "unknown metric `{m}`; valid metrics: {}, all",
                    METRICS.join(", ")
                )))
            }
        }
    }
    Ok(out)
}

fn win_rate(loaded: &[Loaded]) -> Table {
    let outcomes: Vec<_> = loaded.iter().map(|l| l.record.outcome()).collect();
    let m = win_rate_matrix(&outcomes);
    let mut t = Table::new(&["player", "opponent", "meetings", "win_rate"]);
    for (i, a) in m.ids.iter().enumerate() {
        for (j, b) in m.ids.iter().enumerate() {
            if i != j && m.meetings[i][j] > 0 {
                t.push(vec![
                    a.to_string(),
                    b.to_string(),
                    m.meetings[i][j].to_string(),
                    num(m.rate[i][j], 4),
                ]);
            }
        }
    }
    t
}

fn comeback(loaded: &[Loaded], max_streak: usize) -> Table {
    let mut series: BTreeMap<&PlayerId, Vec<_>> = BTreeMap::new();
    for l in loaded {
        for p in &l.record.players {
            series.entry(p).or_default().push(outcome_series(&l.record.round_winners, p));
        }
    }
    let pooled: Vec<_> = series.values().flatten().cloned().collect();
    let mut t = Table::new(&["player", "k", "events", "wins", "probability"]);
    let mut push = |who: String, s: &[Vec<_>]| {
        for k in 1..=max_streak {
            let c = comeback_counts(s, k);
            t.push(vec![
                who.clone(),
                k.to_string(),
                c.events.to_string(),
                c.wins.to_string(),
                num(c.probability(), 4),
            ]);
        }
    };
    for (p, s) in &series {
        push(p.to_string(), s);
    }
    push("*".into(), &pooled);
    t
}

fn lead_change(loaded: &[Loaded]) -> Table {
    let mut t = Table::new(&["tournament", "arena", "changes", "transitions", "rate"]);
    let (mut changes, mut transitions) = (0, 0);
    for l in loaded {
        let (c, n) = lead_changes(&l.record.round_winners);
        changes += c;
        transitions += n;
        t.push(vec![
            l.record.tournament_id.clone(),
            l.record.arena_id.clone(),
            c.to_string(),
            n.to_string(),
            num(ratio(c, n), 4),
        ]);
    }
    t.push(vec![
        "*".into(),
        "*".into(),
        changes.to_string(),
        transitions.to_string(),
        num(ratio(changes, transitions), 4),
    ]);
    t
}

fn ratio(a: u32, b: u32) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

fn share(loaded: &[Loaded]) -> Table {
    let mut t = Table::new(&["tournament", "arena", "player", "round_wins", "share"]);
    for l in loaded {
        let shares = win_share(&l.record.round_winners, &l.record.players);
        for p in &l.record.players {
            t.push(vec![
                l.record.tournament_id.clone(),
                l.record.arena_id.clone(),
                p.to_string(),
                l.record.round_wins.get(p).copied().unwrap_or(0).to_string(),
                num(shares.as_ref().and_then(|s| s.get(p).copied()), 4),
            ]);
        }
    }
    t
}

/// Mean pairwise similarity of one player's solution file across the
/// tournaments of one arena, per round.
fn diversity(loaded: &[Loaded]) -> Result<Table, CliError> {
    // (arena, player, round) -> (tournament id, solution text)
    type Groups<'a> = BTreeMap<(&'a str, &'a PlayerId, u32), Vec<(String, String)>>;
    let mut groups = Groups::new();
    for l in loaded {
        for p in &l.record.players {
            for r in 1..=l.record.round_winners.len() as u32 {
                let text = load_solution(&l.dir, p, r).map_err(|e| CliError::Usage(e.to_string()))?;
                if let Some(text) = text {
                    groups
                        .entry((l.record.arena_id.as_str(), p, r))
                        .or_default()
                        .push((l.record.tournament_id.clone(), text));
                }
            }
        }
    }
    let mut t = Table::new(&["arena", "player", "round", "solutions", "mean_similarity"]);
    for ((arena, p, r), texts) in groups {
        t.push(vec![
            arena.into(),
            p.to_string(),
            r.to_string(),
            texts.len().to_string(),
            num(solution_diversity(&texts), 4),
        ]);
    }
    Ok(t)
}

fn final_round(l: &Loaded) -> u32 {
    l.record.round_winners.len() as u32
}

fn redundancy(loaded: &[Loaded]) -> Table {
    let mut t = Table::new(&["tournament", "arena", "player", "created", "redundancy"]);
    for l in loaded {
        for (p, ev) in &l.events {
            let created = all_created(ev);
            t.push(vec![
                l.record.tournament_id.clone(),
                l.record.arena_id.clone(),
                p.to_string(),
                created.len().to_string(),
                num(filename_redundancy(&created), 4),
            ]);
        }
    }
    t
}

fn throwaway(loaded: &[Loaded]) -> Table {
    let mut t = Table::new(&[
        "tournament",
        "arena",
        "player",
        "considered",
        "throwaway",
        "root_considered",
        "root_throwaway",
        "subdir_considered",
        "subdir_throwaway",
    ]);
    for l in loaded {
        for (p, ev) in &l.events {
            let r = throwaway_files(ev, final_round(l));
            t.push(vec![
                l.record.tournament_id.clone(),
                l.record.arena_id.clone(),
                p.to_string(),
                r.considered.to_string(),
                r.throwaway.len().to_string(),
                r.root_considered.to_string(),
                r.root_throwaway.to_string(),
                r.subdir_considered.to_string(),
                r.subdir_throwaway.to_string(),
            ]);
        }
    }
    t
}

fn hygiene(loaded: &[Loaded]) -> Table {
    let mut t = Table::new(&["tournament", "arena", "player", "created", "root_clutter", "file_reuse"]);
    for l in loaded {
        for (p, ev) in &l.events {
            let h = hygiene_ratios(ev, final_round(l));
            t.push(vec![
                l.record.tournament_id.clone(),
                l.record.arena_id.clone(),
                p.to_string(),
                h.as_ref().map_or(0, |h| h.created).to_string(),
                num(h.as_ref().map(|h| h.root_clutter), 4),
                num(h.as_ref().and_then(|h| h.file_reuse), 4),
            ]);
        }
    }
    t
}
