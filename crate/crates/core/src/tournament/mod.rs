//! Multi-round tournaments.
//!
//! Each round has an edit phase, where every player's editor changes its
//! workspace, and a competition phase, where the valid workspaces play
//! `sims_per_round` simulations in a shuffled order. Everything is written
//! under `results/<tournament_id>/`:
//!
//! ```text
//! tournament.txt                 summary
//! players/<id>/                  workspaces
//! round_<nn>/tally.txt           round record
//! round_<nn>/sim_<k>.<ext>       simulation logs
//! round_<nn>/manifest_<id>.txt   post-edit file manifest
//! round_<nn>/events_<id>.txt     created/modified/deleted files
//! round_<nn>/solution_<id>.txt   the arena's solution file, if any
//! ```

mod config;
mod record;
mod rules;
pub(crate) mod seed_repr;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arena::{create_arena, run_match, Arena, ArenaError, Participant};
use crate::player::{PlayerId, Winner};
use crate::seed;
use crate::workspace::{
    capture_tree, diff_manifests, inject_logs, mount_opponent_readonly, provision, round_dir_name,
    run_editor, scan_references, snapshot, unmount_opponents, TreeSnapshot, Workspace,
    WorkspaceError,
};

pub use config::{
    ConfigError, PlayerSpec, TournamentConfig, DEFAULT_EDIT_STEP_BUDGET, DEFAULT_ROUNDS,
    DEFAULT_SIMS_PER_ROUND,
};
pub use record::{
    events_file, find_tournaments, load_events, load_manifest, load_solution, load_tournament,
    manifest_file, solution_file, LoadError, RoundRecord, RunStatus, TournamentRecord,
    PLAYERS_DIR, SUMMARY_FILE, TALLY_FILE,
};
pub use rules::{
    decide_round_winner, decide_tournament_winner, resolve_validity, round_scores, shuffle_order,
    Disposition, EmptyValidity, Resolution,
};

#[derive(Debug, thiserror::Error)]
pub enum TournamentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Arena(ArenaError),
    #[error("provisioning failed: {0}")]
    Provision(WorkspaceError),
    #[error("results directory {0} already exists")]
    ResultsExist(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// An infrastructure failure stopped the tournament. Completed rounds
    /// and a `halted` summary are on disk.
    #[error("tournament halted in round {round}: {message}")]
    Halted {
        round: u32,
        message: String,
        results_dir: PathBuf,
    },
}

impl TournamentError {
    /// Errors caused by the configuration rather than the machine.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            TournamentError::Config(_)
                | TournamentError::Arena(ArenaError::UnknownArena(_) | ArenaError::Config(_))
                | TournamentError::Provision(WorkspaceError::TemplateMissing(_))
        )
    }
}

fn io_err(path: &Path, source: std::io::Error) -> TournamentError {
    TournamentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// `yymmddHHMMSS` stamp for the tournament id; the current UTC time when
    /// absent.
    pub timestamp: Option<String>,
}

struct Context<'a> {
    config: &'a TournamentConfig,
    arena: Box<dyn Arena>,
    dir: PathBuf,
    workspaces: Vec<Workspace>,
    /// Post-edit code of each player from the previous round.
    previous_code: Vec<TreeSnapshot>,
}

/// Runs a whole tournament and writes its results under
/// `out_dir/<tournament_id>/`.
pub fn run_tournament(
    config: &TournamentConfig,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<TournamentRecord, TournamentError> {
    config.validate()?;
    let arena = create_arena(&config.arena_id, &config.arena_args).map_err(TournamentError::Arena)?;
    let desc = arena.descriptor();
    if !desc.supports(config.players.len()) {
        return Err(TournamentError::Arena(ArenaError::Config(format!(
            "{} supports {}..={} players, got {}",
            desc.arena_id,
            desc.min_players,
            desc.max_players,
            config.players.len()
        ))));
    }
    for p in &config.players {
        let tpl = config.template_path(p);
        if !tpl.is_dir() {
            return Err(TournamentError::Provision(WorkspaceError::TemplateMissing(tpl)));
        }
    }

    let stamp = options
        .timestamp
        .clone()
        .unwrap_or_else(|| chrono::Utc::now().format("%y%m%d%H%M%S").to_string());
    let tid = config.tournament_id(&stamp);
    let dir = out_dir.join(&tid);
    if dir.exists() {
        return Err(TournamentError::ResultsExist(dir));
    }
    let players_dir = dir.join(PLAYERS_DIR);
    fs::create_dir_all(&players_dir).map_err(|e| io_err(&players_dir, e))?;
    let mut workspaces = Vec::new();
    for p in &config.players {
        let ws = provision(&config.template_path(p), &players_dir, &p.player_id, &tid)
            .map_err(TournamentError::Provision)?;
        workspaces.push(ws);
    }

    let mut record = TournamentRecord::new(
        tid,
        config.arena_id.clone(),
        config.player_ids(),
        config.digest(),
        config.master_seed,
        config.rounds,
    );
    let mut ctx = Context {
        config,
        arena,
        dir,
        workspaces,
        previous_code: Vec::new(),
    };
    log::info!("tournament {} started", record.tournament_id);
    for round in 1..=config.rounds {
        match run_round(&mut ctx, round) {
            Ok(r) => {
                log::info!("round {round}: {} ({:?})", r.round_winner, r.disposition);
                record.push_round(r);
            }
            Err(message) => {
                record.status = RunStatus::Halted;
                record.halt_reason = Some(format!("round {round}: {message}"));
                write_summary(&ctx.dir, &record)?;
                return Err(TournamentError::Halted {
                    round,
                    message,
                    results_dir: ctx.dir.clone(),
                });
            }
        }
    }
    for ws in &mut ctx.workspaces {
        unmount_opponents(ws).map_err(TournamentError::Provision)?;
    }
    write_summary(&ctx.dir, &record)?;
    Ok(record)
}

fn write_summary(dir: &Path, record: &TournamentRecord) -> Result<(), TournamentError> {
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, record.summary_text()).map_err(|e| io_err(&path, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs one round. Errors are infrastructure failures that halt the
/// tournament; player failures are recorded in the round instead.
fn run_round(ctx: &mut Context<'_>, round: u32) -> Result<RoundRecord, String> {
    let config = ctx.config;
    let round_dir = ctx.dir.join(round_dir_name(round));
    fs::create_dir_all(&round_dir).map_err(|e| format!("{}: {e}", round_dir.display()))?;
    let ids = config.player_ids();

    if config.opponent_visibility && round > 1 {
        for i in 0..ctx.workspaces.len() {
            let opponents: Vec<(PlayerId, TreeSnapshot)> = (0..ids.len())
                .filter(|&j| j != i)
                .map(|j| (ids[j].clone(), ctx.previous_code[j].clone()))
                .collect();
            mount_opponent_readonly(&mut ctx.workspaces[i], &opponents).map_err(|e| e.to_string())?;
        }
    }

    // Edit phase, one player at a time, checking that nobody else's
    // workspace changed.
    let mut digests: Vec<String> = ctx
        .workspaces
        .iter()
        .map(|ws| capture_tree(&ws.root).map(|t| t.digest()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut edits = BTreeMap::new();
    for (i, spec) in config.players.iter().enumerate() {
        let ws = &ctx.workspaces[i];
        let before = snapshot(&ws.root, round).map_err(|e| e.to_string())?;
        let report = run_editor(&spec.editor, ws, round, config.edit_step_budget);
        if let Some(detail) = &report.detail {
            log::warn!("round {round}: editor of {} {:?}: {detail}", spec.player_id, report.termination);
        }
        edits.insert(spec.player_id.clone(), report);
        for (j, other) in ctx.workspaces.iter().enumerate() {
            let d = capture_tree(&other.root).map_err(|e| e.to_string())?.digest();
            if j != i && d != digests[j] {
                return Err(format!(
                    "editor of {} modified the workspace of {}",
                    spec.player_id, ids[j]
                ));
            }
            digests[j] = d;
        }
        let after = snapshot(&ws.root, round).map_err(|e| e.to_string())?;
        let mut events = diff_manifests(&before, &after, round);
        scan_references(&ws.root, &mut events, &before).map_err(|e| e.to_string())?;
        let hygiene = crate::workspace::FileManifest {
            entries: after
                .entries
                .into_iter()
                .filter(|e| crate::workspace::is_hygiene_path(&e.path))
                .collect(),
        };
        write(&round_dir.join(manifest_file(&spec.player_id)), hygiene.to_text())?;
        write(&round_dir.join(events_file(&spec.player_id)), events.to_text())?;
    }
    ctx.previous_code = ctx
        .workspaces
        .iter()
        .map(|ws| capture_tree(&ws.root))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;

    // Validation and disposition.
    let mut validity = Vec::new();
    let mut invalid_reasons = BTreeMap::new();
    for ws in &ctx.workspaces {
        let report = ctx
            .arena
            .validate_workspace(&ws.root)
            .map_err(|e| format!("validating {}: {e}", ws.player_id))?;
        if let Some(reason) = report.reason.filter(|_| !report.ok) {
            invalid_reasons.insert(ws.player_id.clone(), reason);
        }
        validity.push((ws.player_id.clone(), report.ok));
        if let Some(name) = &ctx.arena.descriptor().solution_file {
            let src = ws.root.join(name);
            if src.is_file() {
                let target = round_dir.join(solution_file(&ws.player_id));
                fs::copy(&src, &target).map_err(|e| format!("{}: {e}", target.display()))?;
            }
        }
    }
    let resolution = resolve_validity(&validity).map_err(|e| e.to_string())?;
    let mut order_rng = ChaCha8Rng::seed_from_u64(seed::order_seed(config.master_seed, round));
    let order = shuffle_order(&mut order_rng, &ids);

    let (sim_wins, ties, winner) = match resolution.disposition {
        Disposition::Played => {
            let participants: Vec<Participant> = order
                .iter()
                .filter(|p| resolution.participants.contains(p))
                .map(|p| {
                    let i = ids.iter().position(|q| q == p).expect("known player");
                    Participant::new(p.clone(), ctx.workspaces[i].root.clone())
                })
                .collect();
            let tally = run_match(
                ctx.arena.as_ref(),
                &participants,
                config.sims_per_round,
                seed::match_seed(config.master_seed, round),
                Some(&round_dir),
            )
            .map_err(|e| e.to_string())?;
            let winner = decide_round_winner(&tally.sim_wins, tally.ties);
            (tally.sim_wins, tally.ties, winner)
        }
        Disposition::Walkover => (
            BTreeMap::new(),
            0,
            Winner::Player(resolution.participants[0].clone()),
        ),
        Disposition::AllInvalidTie => (BTreeMap::new(), 0, Winner::Tie),
    };
    let score = round_scores(&ids, &resolution, &sim_wins, ties, config.sims_per_round);
    let record = RoundRecord {
        round_index: round,
        disposition: resolution.disposition,
        round_winner: winner,
        player_order: order,
        sims: config.sims_per_round,
        ties,
        sim_wins,
        score,
        score_by_convention: resolution.disposition == Disposition::Walkover,
        validity: validity.into_iter().collect(),
        invalid_reasons,
        edits,
        log_dir: round_dir_name(round),
    };
    write(&round_dir.join(TALLY_FILE), record.to_text())?;

    // Copy the round's logs and tally into every workspace.
    let ext = format!(".{}", ctx.arena.descriptor().log_format);
    let mut files: Vec<PathBuf> = fs::read_dir(&round_dir)
        .map_err(|e| format!("{}: {e}", round_dir.display()))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name == TALLY_FILE || (name.starts_with("sim_") && name.ends_with(&ext))
        })
        .collect();
    files.sort();
    for ws in &ctx.workspaces {
        inject_logs(ws, round, &files).map_err(|e| e.to_string())?;
    }
    Ok(record)
}
