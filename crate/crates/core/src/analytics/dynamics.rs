use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::player::{PlayerId, Winner};
use crate::rating::TournamentOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RoundResult {
    Win,
    Loss,
    Tie,
}

/// A focal player's per-round results in one tournament.
pub fn outcome_series(round_winners: &[Winner], player: &PlayerId) -> Vec<RoundResult> {
    round_winners
        .iter()
        .map(|w| match w {
            Winner::Tie => RoundResult::Tie,
            Winner::Player(p) if p == player => RoundResult::Win,
            Winner::Player(_) => RoundResult::Loss,
        })
        .collect()
}

/// Ordered-pair win rates: `rate[i][j]` is the fraction of tournaments
/// containing both `i` and `j` that `i` won. Draws stay in the
/// denominator. `None` when the pair never met.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinRateMatrix {
    pub ids: Vec<PlayerId>,
    pub rate: Vec<Vec<Option<f64>>>,
    pub meetings: Vec<Vec<u32>>,
}

pub fn win_rate_matrix(outcomes: &[TournamentOutcome]) -> WinRateMatrix {
    let mut ids: Vec<PlayerId> = outcomes.iter().flat_map(|o| o.players.iter().cloned()).collect();
    ids.sort();
    ids.dedup();
    let n = ids.len();
    let idx = |p: &PlayerId| ids.binary_search(p).expect("collected above");
    let mut wins = vec![vec![0u32; n]; n];
    let mut meetings = vec![vec![0u32; n]; n];
    for o in outcomes {
        let members: Vec<usize> = o.players.iter().map(idx).collect();
        let winner = o.winner.as_ref().map(idx);
        for &i in &members {
            for &j in &members {
                if i != j {
                    meetings[i][j] += 1;
                    if winner == Some(i) {
                        wins[i][j] += 1;
                    }
                }
            }
        }
    }
    let rate = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (meetings[i][j] > 0).then(|| f64::from(wins[i][j]) / f64::from(meetings[i][j])))
                .collect()
        })
        .collect();
    WinRateMatrix { ids, rate, meetings }
}

/// Qualifying events and wins for one streak length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComebackCount {
    pub events: u32,
    pub wins: u32,
}

impl ComebackCount {
    pub fn probability(&self) -> Option<f64> {
        (self.events > 0).then(|| f64::from(self.wins) / f64::from(self.events))
    }
}

/// Counts rounds ending a run of exactly `k` losses that have a following
/// round, and how often that next round was won. Runs are measured up to
/// the round itself, so each losing round belongs to one `k`.
pub fn comeback_counts(series: &[Vec<RoundResult>], k: usize) -> ComebackCount {
    let mut c = ComebackCount { events: 0, wins: 0 };
    if k == 0 {
        return c;
    }
    for s in series {
        let mut run = 0;
        for r in 0..s.len() {
            run = if s[r] == RoundResult::Loss { run + 1 } else { 0 };
            if run == k && r + 1 < s.len() {
                c.events += 1;
                if s[r + 1] == RoundResult::Win {
                    c.wins += 1;
                }
            }
        }
    }
    c
}

/// Probability of winning the round after exactly `k` straight losses,
/// pooled over `series`; `None` without qualifying events.
pub fn comeback_probability(series: &[Vec<RoundResult>], k: usize) -> Option<f64> {
    comeback_counts(series, k).probability()
}

/// Changes of winner between consecutive non-tie rounds, and the number of
/// such transitions.
pub fn lead_changes(round_winners: &[Winner]) -> (u32, u32) {
    let decided: Vec<&PlayerId> = round_winners.iter().filter_map(Winner::player).collect();
    let transitions = decided.len().saturating_sub(1) as u32;
    let changes = decided.windows(2).filter(|w| w[0] != w[1]).count() as u32;
    (changes, transitions)
}

/// Fraction of non-tie transitions with a new winner; `None` with fewer
/// than two decided rounds.
pub fn lead_change_rate(round_winners: &[Winner]) -> Option<f64> {
    let (changes, transitions) = lead_changes(round_winners);
    (transitions > 0).then(|| f64::from(changes) / f64::from(transitions))
}

/// Each player's share of the decided rounds; `None` when every round was
/// a tie.
pub fn win_share(round_winners: &[Winner], players: &[PlayerId]) -> Option<BTreeMap<PlayerId, f64>> {
    let decided: Vec<&PlayerId> = round_winners.iter().filter_map(Winner::player).collect();
    if decided.is_empty() {
        return None;
    }
    let total = decided.len() as f64;
    Some(
        players
            .iter()
            .map(|p| {
                let wins = decided.iter().filter(|&&q| q == p).count() as f64;
                (p.clone(), wins / total)
            })
            .collect(),
    )
}
