pub mod analyze;
pub mod leaderboard;
pub mod replay;
pub mod run;

use std::path::PathBuf;

use codearena_core::tournament::{find_tournaments, load_tournament, TournamentRecord};

use crate::{CliError, Io};

/// Loads every tournament under `dirs`. Halted tournaments are skipped
/// unless `keep_partial`.
pub(crate) fn load_records(
    dirs: &[PathBuf],
    keep_partial: bool,
    io: &mut Io<'_>,
) -> Result<Vec<(PathBuf, TournamentRecord)>, CliError> {
    let paths = find_tournaments(dirs).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = Vec::new();
    for path in paths {
        let rec = load_tournament(&path).map_err(|e| CliError::Usage(e.to_string()))?;
        if !rec.is_complete() && !keep_partial {
            io.warn(&format!("skipping incomplete tournament {}", rec.tournament_id));
            continue;
        }
        out.push((path, rec));
    }
    if out.is_empty() {
        return Err(CliError::Usage("no usable tournament results".into()));
    }
    Ok(out)
}
