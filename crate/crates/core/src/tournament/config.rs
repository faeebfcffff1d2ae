use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arena::ArenaArgs;
use crate::player::PlayerId;
use crate::workspace::EditorSpec;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config does not parse: {0}")]
    Parse(String),
    #[error("`{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSpec {
    pub player_id: PlayerId,
    pub editor: EditorSpec,
    /// As written in the config; relative paths resolve against the
    /// config's directory.
    pub workspace_template: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentConfig {
    pub rounds: u32,
    pub sims_per_round: u64,
    pub arena_id: String,
    pub arena_args: ArenaArgs,
    pub players: Vec<PlayerSpec>,
    #[serde(with = "crate::tournament::seed_repr")]
    pub master_seed: u64,
    pub edit_step_budget: u32,
    pub opponent_visibility: bool,
    /// Directory that relative template paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

pub const DEFAULT_ROUNDS: u32 = 15;
pub const DEFAULT_SIMS_PER_ROUND: u64 = 1000;
pub const DEFAULT_EDIT_STEP_BUDGET: u32 = 30;

// On-disk layout: [tournament], [game] with [game.args], [[players]].
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    tournament: TournamentSection,
    game: Option<GameSection>,
    #[serde(default)]
    players: Vec<PlayerSection>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TournamentSection {
    rounds: Option<i64>,
    #[serde(default, with = "crate::tournament::seed_repr::option")]
    master_seed: Option<u64>,
    edit_step_budget: Option<i64>,
    #[serde(default)]
    opponent_visibility: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameSection {
    name: Option<String>,
    sims_per_round: Option<i64>,
    #[serde(default)]
    args: ArenaArgs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayerSection {
    id: Option<String>,
    template: Option<PathBuf>,
    editor: Option<EditorSpec>,
}

fn positive(field: &str, value: Option<i64>, default: u64) -> Result<u64, ConfigError> {
    match value {
        None => Ok(default),
        Some(v) if v >= 1 => Ok(v as u64),
        Some(v) => Err(invalid(field, format!("must be a positive count, got {v}"))),
    }
}

impl TournamentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, &base)
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let game = file.game.ok_or_else(|| invalid("game", "section is missing"))?;
        let arena_id = game
            .name
            .filter(|n| !n.trim().is_empty())
            .ok_or_else(|| invalid("game.name", "arena id is missing"))?;
        let rounds = positive("tournament.rounds", file.tournament.rounds, DEFAULT_ROUNDS as u64)?;
        let budget = positive(
            "tournament.edit_step_budget",
            file.tournament.edit_step_budget,
            DEFAULT_EDIT_STEP_BUDGET as u64,
        )?;
        let mut players = Vec::new();
        for (i, p) in file.players.into_iter().enumerate() {
            let id = p.id.ok_or_else(|| invalid(format!("players[{i}].id"), "is missing"))?;
            let template = p
                .template
                .ok_or_else(|| invalid(format!("players[{i}].template"), "is missing"))?;
            players.push(PlayerSpec {
                player_id: PlayerId::new(id),
                editor: p.editor.unwrap_or(EditorSpec::Noop),
                workspace_template: template,
            });
        }
        let config = TournamentConfig {
            rounds: u32::try_from(rounds).map_err(|_| invalid("tournament.rounds", "too large"))?,
            sims_per_round: positive("game.sims_per_round", game.sims_per_round, DEFAULT_SIMS_PER_ROUND)?,
            arena_id,
            arena_args: game.args,
            players,
            master_seed: file.tournament.master_seed.unwrap_or(0),
            edit_step_budget: u32::try_from(budget)
                .map_err(|_| invalid("tournament.edit_step_budget", "too large"))?,
            opponent_visibility: file.tournament.opponent_visibility,
            base_dir: base_dir.to_path_buf(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds == 0 {
            return Err(invalid("tournament.rounds", "must be at least 1"));
        }
        if self.sims_per_round == 0 {
            return Err(invalid("game.sims_per_round", "must be at least 1"));
        }
        if self.edit_step_budget == 0 {
            return Err(invalid("tournament.edit_step_budget", "must be at least 1"));
        }
        if self.players.len() < 2 {
            return Err(invalid("players", "at least two players are required"));
        }
        let mut seen = BTreeSet::new();
        for (i, p) in self.players.iter().enumerate() {
            if !p.player_id.is_valid_token() {
                return Err(invalid(
                    format!("players[{i}].id"),
                    format!("`{}` is not a valid player id", p.player_id),
                ));
            }
            if !seen.insert(&p.player_id) {
                return Err(invalid(
                    format!("players[{i}].id"),
                    format!("duplicate player id `{}`", p.player_id),
                ));
            }
            p.editor
                .validate(self.rounds)
                .map_err(|m| invalid(format!("players[{i}].editor"), m))?;
        }
        Ok(())
    }

    pub fn player_ids(&self) -> Vec<PlayerId> {
        self.players.iter().map(|p| p.player_id.clone()).collect()
    }

    pub fn template_path(&self, player: &PlayerSpec) -> PathBuf {
        self.base_dir.join(&player.workspace_template)
    }

    /// SHA-256 over the canonical JSON form of the config.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(json)))
    }

    /// `<arena>.r<rounds>.s<sims>.p<k>.<ids>.<yymmddHHMMSS>`
    pub fn tournament_id(&self, timestamp: &str) -> String {
        let ids: Vec<&str> = self.players.iter().map(|p| p.player_id.as_str()).collect();
        format!(
            "{}.r{}.s{}.p{}.{}.{}",
            self.arena_id,
            self.rounds,
            self.sims_per_round,
            self.players.len(),
            ids.join("."),
            timestamp
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
        [tournament]
        rounds = 15
        master_seed = 7

        [game]
        name = "GridSnake"
        sims_per_round = 1000
        [game.args]
        width = 11

        [[players]]
        id = "alpha"
        template = "tpl"

        [[players]]
        id = "beta"
        template = "tpl"
        editor = { kind = "external", command = "./edit.sh {round}" }
    "#;

    #[test]
    fn parses_sections() {
        let c = TournamentConfig::from_toml_str(BASIC, Path::new("/cfg")).unwrap();
        assert_eq!(c.rounds, 15);
        assert_eq!(c.sims_per_round, 1000);
        assert_eq!(c.arena_id, "GridSnake");
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.edit_step_budget, DEFAULT_EDIT_STEP_BUDGET);
        assert!(!c.opponent_visibility);
        assert_eq!(c.players[0].editor, EditorSpec::Noop);
        assert_eq!(c.template_path(&c.players[1]), Path::new("/cfg/tpl"));
    }

    #[test]
    fn tournament_id_shape() {
        let c = TournamentConfig::from_toml_str(BASIC, Path::new(".")).unwrap();
        let id = c.tournament_id("250101120000");
        assert_eq!(id, "GridSnake.r15.s1000.p2.alpha.beta.250101120000");
        assert!(id.contains("r15.s1000.p2"));
    }

    #[test]
    fn missing_arena_names_the_field() {
        let text = BASIC.replace("name = \"GridSnake\"", "");
        let err = TournamentConfig::from_toml_str(&text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("game.name"), "{err}");
    }

    #[test]
    fn rejects_bad_configs() {
        let dup = BASIC.replace("id = \"beta\"", "id = \"alpha\"");
        assert!(TournamentConfig::from_toml_str(&dup, Path::new(".")).is_err());
        let zero = BASIC.replace("rounds = 15", "rounds = 0");
        assert!(TournamentConfig::from_toml_str(&zero, Path::new(".")).is_err());
        let reserved = BASIC.replace("id = \"beta\"", "id = \"TIE\"");
        assert!(TournamentConfig::from_toml_str(&reserved, Path::new(".")).is_err());
        let scripted = BASIC.replace(
            "rounds = 15",
            "rounds = 1",
        ).replace(
            "editor = { kind = \"external\", command = \"./edit.sh {round}\" }",
            "editor = { kind = \"scripted\", rounds = [[], []] }",
        );
        assert!(TournamentConfig::from_toml_str(&scripted, Path::new(".")).is_err());
        assert!(TournamentConfig::from_toml_str("[game]\nname = \"X\"\nbogus = 1", Path::new(".")).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = TournamentConfig::from_toml_str(BASIC, Path::new("/x")).unwrap();
        let b = TournamentConfig::from_toml_str(BASIC, Path::new("/y")).unwrap();
        assert_eq!(a.digest(), b.digest());
        let mut c = a.clone();
        c.master_seed = 8;
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn large_seeds_round_trip_as_strings() {
        let text = BASIC.replace("master_seed = 7", "master_seed = \"18446744073709551615\"");
        let c = TournamentConfig::from_toml_str(&text, Path::new(".")).unwrap();
        assert_eq!(c.master_seed, u64::MAX);
    }
}
