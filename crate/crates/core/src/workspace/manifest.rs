use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Component, Path};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use super::{walk_error, WorkspaceError, LOGS_DIR, OPPONENT_DIR};

/// Content hash used for every manifest digest.
pub const DIGEST_ALGORITHM: &str = "sha256";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative, `/`-separated, never containing `..`.
    pub path: String,
    pub digest: String,
    pub size: u64,
    pub recorded_round: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileManifest {
    /// Sorted by path.
    pub entries: Vec<ManifestEntry>,
}

/// Created, modified and deleted files of one round, plus the pre-existing
/// files whose names are mentioned in the content written this round.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEvents {
    pub round: u32,
    pub created: Vec<String>,
    pub modified: Vec<String>,
    pub deleted: Vec<String>,
    pub referenced: Vec<String>,
}

pub fn digest_bytes(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Whether a path takes part in hygiene accounting. Injected logs and the
/// mounted opponent copy do not.
pub fn is_hygiene_path(path: &str) -> bool {
    let first = path.split('/').next().unwrap_or("");
    first != LOGS_DIR && first != OPPONENT_DIR
}

fn relative_key(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let mut parts = Vec::new();
    for c in rel.components() {
        match c {
            Component::Normal(s) => parts.push(s.to_str()?),
            _ => return None,
        }
    }
    let key = parts.join("/");
    (!key.is_empty() && !key.contains(['\t', '\n', '\r'])).then_some(key)
}

/// Lists every regular file under `root` with its digest and size.
pub fn snapshot(root: &Path, round: u32) -> Result<FileManifest, WorkspaceError> {
    let mut entries = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| walk_error(root, e))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(path) = relative_key(root, entry.path()) else {
            log::warn!("skipping unrepresentable path {}", entry.path().display());
            continue;
        };
        let data = fs::read(entry.path()).map_err(|e| WorkspaceError::io(entry.path(), e))?;
        entries.push(ManifestEntry {
            path,
            digest: digest_bytes(&data),
            size: data.len() as u64,
            recorded_round: round,
        });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(FileManifest { entries })
}

impl FileManifest {
    pub fn get(&self, path: &str) -> Option<&ManifestEntry> {
        self.entries
            .binary_search_by(|e| e.path.as_str().cmp(path))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Tab-separated `path digest size` lines under a header naming the
    /// digest algorithm and round.
    pub fn to_text(&self) -> String {
        let round = self.entries.first().map(|e| e.recorded_round).unwrap_or(0);
        let mut out = format!("# {DIGEST_ALGORITHM} round={round}\n");
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}\t{}", e.path, e.digest, e.size);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut round = 0;
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if let Some(header) = line.strip_prefix("# ") {
                let mut it = header.split_whitespace();
                if it.next() != Some(DIGEST_ALGORITHM) {
                    return Err(format!("line {}: unsupported digest header", n + 1));
                }
                if let Some(r) = it.next().and_then(|r| r.strip_prefix("round=")) {
                    round = r.parse().map_err(|_| format!("line {}: bad round", n + 1))?;
                }
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [path, digest, size] = cols.as_slice() else {
                return Err(format!("line {}: expected 3 columns", n + 1));
            };
            entries.push(ManifestEntry {
                path: path.to_string(),
                digest: digest.to_string(),
                size: size.parse().map_err(|_| format!("line {}: bad size", n + 1))?,
                recorded_round: round,
            });
        }
        Ok(Self { entries })
    }
}

/// Classifies hygiene-relevant paths as created, deleted or modified.
pub fn diff_manifests(before: &FileManifest, after: &FileManifest, round: u32) -> FileEvents {
    let old: BTreeMap<&str, &str> = before
        .entries
        .iter()
        .filter(|e| is_hygiene_path(&e.path))
        .map(|e| (e.path.as_str(), e.digest.as_str()))
        .collect();
    let new: BTreeMap<&str, &str> = after
        .entries
        .iter()
        .filter(|e| is_hygiene_path(&e.path))
        .map(|e| (e.path.as_str(), e.digest.as_str()))
        .collect();
    let mut events = FileEvents {
        round,
        ..FileEvents::default()
    };
    for (path, digest) in &new {
        match old.get(path) {
            None => events.created.push(path.to_string()),
            Some(d) if d != digest => events.modified.push(path.to_string()),
            _ => {}
        }
    }
    events.deleted = old
        .keys()
        .filter(|p| !new.contains_key(*p))
        .map(|p| p.to_string())
        .collect();
    events
}

fn file_name(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

/// Fills `events.referenced` with the files of `known` (the manifest before
/// this round's edits) whose file name occurs in the content of a file
/// created or modified this round.
pub fn scan_references(
    root: &Path,
    events: &mut FileEvents,
    known: &FileManifest,
) -> Result<(), WorkspaceError> {
    let mut texts = Vec::new();
    for path in events.created.iter().chain(&events.modified) {
        let full = root.join(path);
        let data = fs::read(&full).map_err(|e| WorkspaceError::io(&full, e))?;
        texts.push((path.clone(), String::from_utf8_lossy(&data).into_owned()));
    }
    let mut referenced: Vec<String> = known
        .entries
        .iter()
        .filter(|e| is_hygiene_path(&e.path))
        .filter(|e| {
            let name = file_name(&e.path);
            texts
                .iter()
                .any(|(writer, text)| *writer != e.path && text.contains(name))
        })
        .map(|e| e.path.clone())
        .collect();
    referenced.sort();
    events.referenced = referenced;
    Ok(())
}

impl FileEvents {
    /// True when nothing was created, modified or deleted.
    pub fn is_empty(&self) -> bool {
        self.created.is_empty() && self.modified.is_empty() && self.deleted.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# round={}\n", self.round);
        for (tag, list) in [
            ("created", &self.created),
            ("modified", &self.modified),
            ("deleted", &self.deleted),
            ("referenced", &self.referenced),
        ] {
            for p in list {
                let _ = writeln!(out, "{tag}\t{p}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut ev = FileEvents::default();
        for (n, line) in text.lines().enumerate() {
            if let Some(r) = line.strip_prefix("# round=") {
                ev.round = r.trim().parse().map_err(|_| format!("line {}: bad round", n + 1))?;
                continue;
            }
            let (tag, path) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected `tag<TAB>path`", n + 1))?;
            let list = match tag {
                "created" => &mut ev.created,
                "modified" => &mut ev.modified,
                "deleted" => &mut ev.deleted,
                "referenced" => &mut ev.referenced,
                other => return Err(format!("line {}: unknown tag `{other}`", n + 1)),
            };
            list.push(path.to_string());
        }
        Ok(ev)
    }
}
