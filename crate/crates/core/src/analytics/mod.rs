//! Competitive-dynamics and codebase-hygiene metrics.
//!
//! All functions are pure over tournament outcomes, round winners and the
//! per-round file events recorded by the tournament engine.

mod dynamics;
mod hygiene;
mod similarity;

pub use dynamics::{
    comeback_counts, comeback_probability, lead_change_rate, lead_changes, outcome_series,
    win_rate_matrix, win_share, ComebackCount, RoundResult, WinRateMatrix,
};
pub use hygiene::{
    all_created, created_files, filename_redundancy, hygiene_ratios, normalize_filename,
    throwaway_files, CreatedFile, HygieneRatios, ThrowawayReport, MIN_TOKEN_LEN,
};
pub use similarity::{matched_chars, similarity, similarity_chars, solution_diversity};
