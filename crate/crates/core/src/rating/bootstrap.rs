use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::elo::{rank_order, strength_to_elo};
use super::{fit, DrawPolicy, FitOptions, RatingError, StrengthFit, TournamentOutcome, WinMatrix};
use crate::player::PlayerId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub ids: Vec<PlayerId>,
    /// Samples requested.
    pub b: usize,
    /// Refits that failed (separation, disconnection) and were dropped.
    pub failures: usize,
    /// One row of Elo ratings per successful sample.
    pub elo_samples: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    /// Sample standard deviation of each player's rating.
    pub sd: Vec<f64>,
    /// Ranking of each successful sample, best first.
    pub rank_samples: Vec<Vec<PlayerId>>,
}

impl BootstrapReport {
    fn from_samples(
        ids: Vec<PlayerId>,
        b: usize,
        samples: Vec<Option<StrengthFit>>,
    ) -> Result<Self, RatingError> {
        let n = ids.len();
        let elo_samples: Vec<Vec<f64>> = samples
            .iter()
            .flatten()
            .map(|f| f.s.iter().map(|&s| strength_to_elo(s)).collect())
            .collect();
        let failures = b - elo_samples.len();
        if elo_samples.is_empty() {
            return Err(RatingError::AllBootstrapFailed { failures });
        }
        // Welford updates keep the spread of identical samples exactly zero.
        let mut mean = vec![0.0; n];
        let mut m2 = vec![0.0; n];
        for (k, row) in elo_samples.iter().enumerate() {
            for i in 0..n {
                let delta = row[i] - mean[i];
                mean[i] += delta / (k + 1) as f64;
                m2[i] += delta * (row[i] - mean[i]);
            }
        }
        let k = elo_samples.len();
        let sd = m2
            .iter()
            .map(|&v| if k < 2 { 0.0 } else { (v / (k - 1) as f64).sqrt() })
            .collect();
        let rank_samples = elo_samples
            .iter()
            .map(|r| rank_order(&ids, r).into_iter().map(|i| ids[i].clone()).collect())
            .collect();
        Ok(Self {
            ids,
            b,
            failures,
            elo_samples,
            mean,
            sd,
            rank_samples,
        })
    }
}

fn sample_seeds<R: Rng + ?Sized>(rng: &mut R, b: usize) -> Vec<u64> {
    (0..b).map(|_| rng.random()).collect()
}

fn refit(w: &WinMatrix, opts: &FitOptions) -> Result<Option<StrengthFit>, RatingError> {
    match fit(w, opts) {
        Ok(f) if f.converged => Ok(Some(f)),
        Ok(_)
        | Err(RatingError::Separation { .. })
        | Err(RatingError::Disconnected { .. })
        | Err(RatingError::Singular { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Resamples whole tournaments with replacement and refits each sample.
/// Each sample draws from its own generator seeded from `rng`.
pub fn bootstrap_nonparametric<R: Rng + ?Sized>(
    outcomes: &[TournamentOutcome],
    draws: DrawPolicy,
    b: usize,
    opts: &FitOptions,
    rng: &mut R,
) -> Result<BootstrapReport, RatingError> {
    if b == 0 {
        return Err(RatingError::Data("bootstrap needs at least one sample".into()));
    }
    let ids = WinMatrix::from_tournaments(outcomes, draws)?.ids().to_vec();
    let mut samples = Vec::with_capacity(b);
    for seed in sample_seeds(rng, b) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let resampled: Vec<TournamentOutcome> = (0..outcomes.len())
            .map(|_| outcomes[r.random_range(0..outcomes.len())].clone())
            .collect();
        let w = WinMatrix::from_tournaments_with_ids(ids.clone(), &resampled, draws)?;
        samples.push(refit(&w, opts)?);
    }
    BootstrapReport::from_samples(ids, b, samples)
}

/// Draws `w_ij ~ Binomial(n_ij, sigmoid(s_i - s_j))` for every observed
/// pair, keeping the games per pair fixed, and refits. Fractional game
/// counts are rounded to the nearest integer.
pub fn bootstrap_parametric<R: Rng + ?Sized>(
    fitted: &StrengthFit,
    games: &WinMatrix,
    b: usize,
    opts: &FitOptions,
    rng: &mut R,
) -> Result<BootstrapReport, RatingError> {
    if b == 0 {
        return Err(RatingError::Data("bootstrap needs at least one sample".into()));
    }
    if games.ids() != fitted.ids.as_slice() {
        return Err(RatingError::Data("fit and win matrix have different players".into()));
    }
    let n = games.n();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let nij = games.games(i, j).round() as u64;
            if nij > 0 {
                let p = super::fit::sigmoid(fitted.s[i] - fitted.s[j]);
                let dist = Binomial::new(nij, p).map_err(|e| RatingError::Data(e.to_string()))?;
                pairs.push((i, j, nij, dist));
            }
        }
    }
    let mut samples = Vec::with_capacity(b);
    for seed in sample_seeds(rng, b) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut w = WinMatrix::zeros(games.ids().to_vec());
        for (i, j, nij, dist) in &pairs {
            let wins = dist.sample(&mut r);
            w.set(*i, *j, wins as f64);
            w.set(*j, *i, (nij - wins) as f64);
        }
        samples.push(refit(&w, opts)?);
    }
    BootstrapReport::from_samples(games.ids().to_vec(), b, samples)
}
