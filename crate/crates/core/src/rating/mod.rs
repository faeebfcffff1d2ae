//! Bradley-Terry ratings from tournament outcomes.
//!
//! Player `i` beats player `j` with probability `sigmoid(s_i - s_j)`. The
//! strengths `s` are fitted by maximum likelihood with the gauge
//! `sum(s) = 0`, and mapped to Elo ratings `R = 1200 + 400 / ln(10) * s`.
//! Uncertainty comes from the inverse information matrix on the sum-zero
//! subspace or from nonparametric and parametric bootstraps.

mod bootstrap;
mod covariance;
mod elo;
mod fit;
mod matrix;
mod stability;

pub use bootstrap::{bootstrap_nonparametric, bootstrap_parametric, BootstrapReport};
pub use covariance::{covariance, sum_zero_basis, CovarianceReport};
pub use elo::{
    elo_scale, elo_win_probability, strength_to_elo, to_elo, EloReport, BASE_RATING, ELO_SLOPE,
};
pub use fit::{
    fit, log_likelihood, predict, separation_flags, sigmoid, strongly_connected, FitOptions,
    Separation, StrengthFit, DIVERGENCE_LIMIT,
};
pub use matrix::{DrawPolicy, TournamentOutcome, WinMatrix};
pub use stability::{stability, StabilityReport};

#[derive(Debug, thiserror::Error)]
pub enum RatingError {
    #[error("no outcomes to rate")]
    Empty,
    #[error("unknown player `{0}`")]
    UnknownPlayer(String),
    #[error("{0}")]
    Data(String),
    #[error("comparison graph is disconnected: {components:?}")]
    Disconnected { components: Vec<Vec<String>> },
    #[error("no finite maximum-likelihood estimate (separation; flagged players: {players:?}); a pseudo-count removes it")]
    Separation { players: Vec<String> },
    #[error("fit did not converge")]
    NotConverged,
    #[error("singular information matrix: {detail}")]
    Singular { detail: String },
    #[error("all {failures} bootstrap refits failed")]
    AllBootstrapFailed { failures: usize },
}
