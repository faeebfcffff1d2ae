use std::fmt;

use serde::{Deserialize, Serialize};

/// Label used for a round that no single player won.
pub const TIE_LABEL: &str = "TIE";
/// Label used for a tournament in which every round was a tie.
pub const DRAW_LABEL: &str = "DRAW";

/// Identifier of a player. Tokens are ASCII alphanumerics plus `_` and `-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(String);

impl PlayerId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Whether the id is usable as a directory name and is not one of the
    /// reserved outcome labels.
    pub fn is_valid_token(&self) -> bool {
        !self.0.is_empty()
            && self.0 != TIE_LABEL
            && self.0 != DRAW_LABEL
            && self
                .0
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PlayerId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

impl From<String> for PlayerId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

/// Outcome of a simulation or a round: a single winning player, or a tie.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum Winner {
    Player(PlayerId),
    Tie,
}

impl Winner {
    pub fn player(&self) -> Option<&PlayerId> {
        match self {
            Winner::Player(p) => Some(p),
            Winner::Tie => None,
        }
    }

    pub fn is_tie(&self) -> bool {
        matches!(self, Winner::Tie)
    }
}

impl From<Winner> for String {
    fn from(w: Winner) -> Self {
        match w {
            Winner::Player(p) => p.0,
            Winner::Tie => TIE_LABEL.to_string(),
        }
    }
}

impl From<String> for Winner {
    fn from(s: String) -> Self {
        if s == TIE_LABEL {
            Winner::Tie
        } else {
            Winner::Player(PlayerId(s))
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Winner::Player(p) => p.fmt(f),
            Winner::Tie => f.write_str(TIE_LABEL),
        }
    }
}

/// Outcome of a tournament: the player with most round wins (last win breaks
/// ties), or a draw when no round had a winner.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub enum TournamentWinner {
    Player(PlayerId),
    Draw,
}

impl TournamentWinner {
    pub fn player(&self) -> Option<&PlayerId> {
        match self {
            TournamentWinner::Player(p) => Some(p),
            TournamentWinner::Draw => None,
        }
    }
}

impl From<TournamentWinner> for String {
    fn from(w: TournamentWinner) -> Self {
        match w {
            TournamentWinner::Player(p) => p.0,
            TournamentWinner::Draw => DRAW_LABEL.to_string(),
        }
    }
}

impl From<String> for TournamentWinner {
    fn from(s: String) -> Self {
        if s == DRAW_LABEL {
            TournamentWinner::Draw
        } else {
            TournamentWinner::Player(PlayerId(s))
        }
    }
}

impl fmt::Display for TournamentWinner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TournamentWinner::Player(p) => p.fmt(f),
            TournamentWinner::Draw => f.write_str(DRAW_LABEL),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_labels_are_not_tokens() {
        assert!(!PlayerId::new("TIE").is_valid_token());
        assert!(!PlayerId::new("DRAW").is_valid_token());
        assert!(!PlayerId::new("a b").is_valid_token());
        assert!(!PlayerId::new("").is_valid_token());
        assert!(PlayerId::new("p1-x_2").is_valid_token());
    }

    #[test]
    fn winner_string_form() {
        assert_eq!(String::from(Winner::Tie), "TIE");
        assert_eq!(Winner::from("A".to_string()), Winner::Player("A".into()));
    }
}
