use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::PathBuf;

use clap::ValueEnum;
use codearena_core::analytics::{win_rate_matrix, WinRateMatrix};
use codearena_core::rating::{
    bootstrap_nonparametric, bootstrap_parametric, covariance, fit, stability, to_elo,
    BootstrapReport, DrawPolicy, EloReport, FitOptions, StabilityReport, StrengthFit,
    TournamentOutcome, WinMatrix,
};
use codearena_core::PlayerId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::load_records;
use crate::table::{num, Table};
use crate::{CliError, Io};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bootstrap {
    Nonparametric,
    Parametric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Granularity {
    Tournament,
    Round,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Draws {
    Exclude,
    Split,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Results directories: a tournament directory or a parent holding several.
    #[arg(required = true)]
    pub dirs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub bootstrap: Option<Bootstrap>,
    /// Bootstrap sample count.
    #[arg(long = "B", default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub bootstrap_seed: u64,
    /// Added to every off-diagonal win count before fitting.
    #[arg(long, default_value_t = 0.0)]
    pub pseudo_count: f64,
    /// `round` treats every played round as a comparison. Rounds of one
    /// tournament are not independent, so uncertainties are understated.
    #[arg(long, value_enum, default_value = "tournament")]
    pub granularity: Granularity,
    #[arg(long, value_enum, default_value = "exclude")]
    pub draws: Draws,
    /// Also write the tables as CSV files into this directory.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Point estimate, or the reason it is absent.
type Rated = Result<(StrengthFit, WinMatrix, EloReport), String>;

pub fn run(args: &Args, io: &mut Io<'_>) -> Result<(), CliError> {
    if !(args.pseudo_count >= 0.0 && args.pseudo_count.is_finite()) {
        return Err(CliError::Usage("--pseudo-count must be a non-negative number".into()));
    }
    let records = load_records(&args.dirs, false, io)?;
    let draws = match args.draws {
        Draws::Exclude => DrawPolicy::Exclude,
        Draws::Split => DrawPolicy::Split,
    };
    if args.granularity == Granularity::Round {
        io.warn("round granularity treats dependent rounds as independent comparisons; standard errors are optimistic");
    }
    let mut by_arena: BTreeMap<&str, Vec<TournamentOutcome>> = BTreeMap::new();
    let mut outcomes = Vec::new();
    for (_, rec) in &records {
        let these = match args.granularity {
            Granularity::Tournament => vec![rec.outcome()],
            Granularity::Round => rec.round_outcomes(),
        };
        by_arena.entry(rec.arena_id.as_str()).or_default().extend(these.iter().cloned());
        outcomes.extend(these);
    }

    let opts = FitOptions {
        pseudo_count: args.pseudo_count,
        ..FitOptions::default()
    };
    let rated = rate(&outcomes, draws, &opts);
    let per_arena: Vec<(&str, Rated)> = if by_arena.len() > 1 {
        by_arena.iter().map(|(a, o)| (*a, rate(o, draws, &opts))).collect()
    } else {
        Vec::new()
    };

    let rates = win_rate_matrix(&outcomes);
    let rate_table = win_rate_table(&rates);
    let boot = match (&args.bootstrap, &rated) {
        (None, _) => None,
        (Some(_), Err(_)) => {
            io.warn("bootstrap skipped: no point estimate");
            None
        }
        (Some(method), Ok((point, games, elo))) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.bootstrap_seed);
            let report = match method {
                Bootstrap::Nonparametric => {
                    bootstrap_nonparametric(&outcomes, draws, args.samples, &opts, &mut rng)
                }
                Bootstrap::Parametric => {
                    bootstrap_parametric(point, games, args.samples, &opts, &mut rng)
                }
            }
            .map_err(|e| CliError::Usage(format!("bootstrap: {e}")))?;
            if report.failures > 0 {
                io.warn(&format!("{} of {} bootstrap refits failed and were dropped", report.failures, report.b));
            }
            let stab = stability(&elo.ranking(), &report.rank_samples)
                .map_err(|e| CliError::Usage(format!("stability: {e}")))?;
            Some((report, stab))
        }
    };

    let board = leaderboard_table(&outcomes, &rated, &per_arena, boot.as_ref().map(|b| &b.0));
    let mut text = format!("{} tournament(s), {} comparison(s)\n\n", records.len(), outcomes.len());
    text += "win rates (row beat column)\n";
    text += &rate_table.render();
    text += "\n";
    if let Err(reason) = &rated {
        text += &format!("elo: {reason}\n\n");
    }
    text += &board.render();
    let stab_table = boot.as_ref().map(|(report, stab)| stability_table(report, stab));
    if let Some(t) = &stab_table {
        text += "\nbootstrap rank stability\n";
        text += &t.render();
    }
    io.print(&text)?;

    if let Some(dir) = &args.csv {
        let csv_err = |e: String| CliError::Infra(format!("writing CSV: {e}"));
        board.write_csv(&dir.join("leaderboard.csv")).map_err(csv_err)?;
        rate_table.write_csv(&dir.join("win_rates.csv")).map_err(csv_err)?;
        if let Some(t) = &stab_table {
            t.write_csv(&dir.join("stability.csv")).map_err(csv_err)?;
        }
        let w = WinMatrix::from_tournaments(&outcomes, draws)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let path = dir.join("win_matrix.csv");
        let file = File::create(&path).map_err(|e| csv_err(format!("{}: {e}", path.display())))?;
        w.write_csv(file).map_err(|e| csv_err(e.to_string()))?;
    }
    Ok(())
}

fn rate(outcomes: &[TournamentOutcome], draws: DrawPolicy, opts: &FitOptions) -> Rated {
    let decided = outcomes.iter().filter(|o| o.winner.is_some()).count();
    let usable = if draws == DrawPolicy::Split { outcomes.len() } else { decided };
    if usable < 2 {
        return Err(format!("not reported, {usable} usable comparison(s); at least 2 are needed"));
    }
    let games = WinMatrix::from_tournaments(outcomes, draws).map_err(|e| format!("not reported, {e}"))?;
    let point = fit(&games, opts).map_err(|e| format!("not reported, {e}"))?;
    let cov = covariance(&point, &games).ok();
    let elo = to_elo(&point, cov.as_ref());
    Ok((point, games, elo))
}

fn win_rate_table(m: &WinRateMatrix) -> Table {
    let mut header = vec!["player".to_string()];
    header.extend(m.ids.iter().map(|p| p.to_string()));
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for (i, id) in m.ids.iter().enumerate() {
        let mut row = vec![id.to_string()];
        row.extend((0..m.ids.len()).map(|j| {
            if i == j {
                "-".into()
            } else {
                m.rate[i][j].map_or("-".into(), |r| format!("{:.1}%", 100.0 * r))
            }
        }));
        t.push(row);
    }
    t
}

fn leaderboard_table(
    outcomes: &[TournamentOutcome],
    rated: &Rated,
    per_arena: &[(&str, Rated)],
    boot: Option<&BootstrapReport>,
) -> Table {
    let ids: BTreeSet<&PlayerId> = outcomes.iter().flat_map(|o| o.players.iter()).collect();
    let played = |p: &PlayerId| outcomes.iter().filter(|o| o.players.contains(p)).count();
    let won = |p: &PlayerId| outcomes.iter().filter(|o| o.winner.as_ref() == Some(p)).count();
    let elo_of = |r: &Rated, p: &PlayerId| -> Option<(f64, Option<f64>)> {
        let (_, _, elo) = r.as_ref().ok()?;
        let i = elo.ids.iter().position(|x| x == p)?;
        Some((elo.rating[i], elo.se.as_ref().map(|se| se[i])))
    };

    let mut order: Vec<&PlayerId> = ids.into_iter().collect();
    order.sort_by(|a, b| {
        let key = |p: &PlayerId| match elo_of(rated, p) {
            Some((r, _)) => r,
            None => won(p) as f64 / played(p).max(1) as f64,
        };
        key(b).total_cmp(&key(a)).then_with(|| a.cmp(b))
    });

    let mut header: Vec<String> = ["rank", "player", "elo", "se"].map(String::from).to_vec();
    if boot.is_some() {
        header.extend(["boot_mean", "boot_sd"].map(String::from));
    }
    header.extend(per_arena.iter().map(|(a, _)| format!("elo[{a}]")));
    header.extend(["played", "won", "win_rate"].map(String::from));
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for (rank, p) in order.into_iter().enumerate() {
        let point = elo_of(rated, p);
        let mut row = vec![
            (rank + 1).to_string(),
            p.to_string(),
            num(point.map(|x| x.0), 1),
            num(point.and_then(|x| x.1), 1),
        ];
        if let Some(b) = boot {
            let i = b.ids.iter().position(|x| x == p);
            row.push(num(i.map(|i| b.mean[i]), 1));
            row.push(num(i.map(|i| b.sd[i]), 1));
        }
        row.extend(per_arena.iter().map(|(_, r)| num(elo_of(r, p).map(|x| x.0), 1)));
        let (n, w) = (played(p), won(p));
        row.push(n.to_string());
        row.push(w.to_string());
        row.push(if n == 0 { "-".into() } else { format!("{:.1}%", 100.0 * w as f64 / n as f64) });
        t.push(row);
    }
    t
}

fn stability_table(report: &BootstrapReport, s: &StabilityReport) -> Table {
    let mut t = Table::new(&["metric", "value"]);
    let rows = [
        ("samples", s.samples.to_string()),
        ("failures", report.failures.to_string()),
        ("kendall_tau", format!("{:.3}", s.kendall_tau)),
        ("spearman_rho", format!("{:.3}", s.spearman_rho)),
        ("footrule_normalized", format!("{:.3}", s.footrule_normalized)),
        ("top1_consistency", format!("{:.3}", s.top1_consistency)),
        ("pairwise_order_agreement", format!("{:.3}", s.pairwise_order_agreement)),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v]);
    }
    t
}
