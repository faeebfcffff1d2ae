use std::path::Path;

use codearena_core::tournament::{run_tournament, RunOptions, TournamentConfig, TournamentError};

use crate::table::{num, Table};
use crate::{CliError, Io};

pub fn run(
    config: &Path,
    out: &Path,
    seed: Option<u64>,
    timestamp: Option<String>,
    io: &mut Io<'_>,
) -> Result<(), CliError> {
    let mut cfg = TournamentConfig::load(config).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let record = match run_tournament(&cfg, out, &RunOptions { timestamp }) {
        Ok(r) => r,
        Err(e) if e.is_config_error() => return Err(CliError::Usage(e.to_string())),
        Err(TournamentError::ResultsExist(p)) => {
            return Err(CliError::Usage(format!("results directory {} already exists", p.display())))
        }
        Err(e) => return Err(CliError::Infra(e.to_string())),
    };

    let mut header = vec!["round", "disposition", "winner"];
    let ids: Vec<String> = record.players.iter().map(|p| format!("score[{p}]")).collect();
    header.extend(ids.iter().map(String::as_str));
    let mut t = Table::new(&header);
    for r in &record.rounds {
        let mut row = vec![
            r.round_index.to_string(),
            format!("{:?}", r.disposition).to_uppercase(),
            r.round_winner.to_string(),
        ];
        row.extend(record.players.iter().map(|p| num(r.score.get(p).copied(), 1)));
        t.push(row);
    }
    io.print(&format!(
        "tournament {}\nresults {}\n\n{}\nwinner: {}\n",
        record.tournament_id,
        out.join(&record.tournament_id).display(),
        t.render(),
        record.tournament_winner
    ))
}
