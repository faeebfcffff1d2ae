//! Tournament engine and rating toolkit for code arenas.
//!
//! Players own a workspace that is edited between rounds and then run
//! against the other players' workspaces inside an [`arena::Arena`]. Round
//! outcomes are aggregated into tournament records, and tournament records
//! feed the Bradley-Terry rating engine in [`rating`] and the dynamics and
//! hygiene metrics in [`analytics`].

pub mod analytics;
pub mod arena;
pub mod gridsnake;
pub mod player;
mod process;
pub mod rating;
pub mod seed;
pub mod tournament;
pub mod workspace;

pub use player::{PlayerId, TournamentWinner, Winner};
