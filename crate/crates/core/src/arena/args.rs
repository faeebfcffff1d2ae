use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ArenaError;

/// A scalar arena argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArgValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

/// Arena arguments keyed by name, as given in the `game.args` table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArenaArgs(pub BTreeMap<String, ArgValue>);

impl ArenaArgs {
    pub fn with(mut self, key: &str, value: ArgValue) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn int(&self, key: &str) -> Result<Option<i64>, ArenaError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(ArgValue::Int(v)) => Ok(Some(*v)),
            Some(other) => Err(ArenaError::Config(format!(
                "argument `{key}` must be an integer, got {other:?}"
            ))),
        }
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>, ArenaError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(ArgValue::Int(v)) => Ok(Some(*v as f64)),
            Some(ArgValue::Float(v)) => Ok(Some(*v)),
            Some(other) => Err(ArenaError::Config(format!(
                "argument `{key}` must be a number, got {other:?}"
            ))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}
