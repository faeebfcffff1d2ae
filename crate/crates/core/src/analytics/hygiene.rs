use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::workspace::FileEvents;

/// Normalized names shorter than this never count as shared prefixes.
pub const MIN_TOKEN_LEN: usize = 4;

fn is_version_segment(seg: &str) -> bool {
    let mut chars = seg.chars();
    match chars.next() {
        Some(c) if c.is_ascii_digit() => seg.chars().all(|c| c.is_ascii_digit()),
        Some(c) if c.is_ascii_alphabetic() => {
            let rest = chars.as_str();
            !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
        }
        _ => false,
    }
}

/// File name without directories and extension, with trailing `_13`,
/// `-v2`, `.3` style segments removed repeatedly.
pub fn normalize_filename(path: &str) -> String {
    let base = path.rsplit('/').next().unwrap_or(path);
    let mut name = match base.rfind('.') {
        Some(dot) if dot > 0 => &base[..dot],
        _ => base,
    };
    while let Some(pos) = name.rfind(['_', '-', '.']) {
        if pos == 0 || !is_version_segment(&name[pos + 1..]) {
            break;
        }
        name = &name[..pos];
    }
    name.to_string()
}

/// Fraction of files whose normalized name (at least `MIN_TOKEN_LEN`
/// characters) is shared with another file. `None` for no files.
pub fn filename_redundancy<S: AsRef<str>>(paths: &[S]) -> Option<f64> {
    if paths.is_empty() {
        return None;
    }
    let tokens: Vec<String> = paths.iter().map(|p| normalize_filename(p.as_ref())).collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &tokens {
        *counts.entry(t).or_default() += 1;
    }
    let redundant = tokens
        .iter()
        .filter(|t| t.chars().count() >= MIN_TOKEN_LEN && counts[t.as_str()] >= 2)
        .count();
    Some(redundant as f64 / paths.len() as f64)
}

/// A file created in some round, and whether any later round used it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreatedFile {
    pub path: String,
    pub round: u32,
    pub at_root: bool,
    pub used_later: bool,
}

/// Files created before `final_round`, each marked used if a later round
/// modified it or referenced its name from written content. Files created
/// in the final round have no later round to be used in and are left out.
pub fn created_files(events: &[FileEvents], final_round: u32) -> Vec<CreatedFile> {
    let mut out = Vec::new();
    for ev in events.iter().filter(|e| e.round < final_round) {
        for path in &ev.created {
            let used_later = events.iter().filter(|e| e.round > ev.round).any(|e| {
                e.modified.contains(path) || e.referenced.contains(path)
            });
            out.push(CreatedFile {
                path: path.clone(),
                round: ev.round,
                at_root: !path.contains('/'),
                used_later,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThrowawayReport {
    pub considered: usize,
    pub throwaway: Vec<String>,
    pub root_considered: usize,
    pub root_throwaway: usize,
    pub subdir_considered: usize,
    pub subdir_throwaway: usize,
}

pub fn throwaway_files(events: &[FileEvents], final_round: u32) -> ThrowawayReport {
    let files = created_files(events, final_round);
    let count = |root: bool, thrown: bool| {
        files
            .iter()
            .filter(|f| f.at_root == root && (!thrown || !f.used_later))
            .count()
    };
    ThrowawayReport {
        considered: files.len(),
        throwaway: files.iter().filter(|f| !f.used_later).map(|f| f.path.clone()).collect(),
        root_considered: count(true, false),
        root_throwaway: count(true, true),
        subdir_considered: count(false, false),
        subdir_throwaway: count(false, true),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HygieneRatios {
    pub created: usize,
    /// Files created at the workspace root over all created files.
    pub root_clutter: f64,
    /// Files used after their creation round over files created before the
    /// final round. `None` if no file was created before it.
    pub file_reuse: Option<f64>,
}

/// `None` when no file was created at all.
pub fn hygiene_ratios(events: &[FileEvents], final_round: u32) -> Option<HygieneRatios> {
    let created: Vec<&String> = events.iter().flat_map(|e| &e.created).collect();
    if created.is_empty() {
        return None;
    }
    let at_root = created.iter().filter(|p| !p.contains('/')).count();
    let files = created_files(events, final_round);
    let reused = files.iter().filter(|f| f.used_later).count();
    Some(HygieneRatios {
        created: created.len(),
        root_clutter: at_root as f64 / created.len() as f64,
        file_reuse: (!files.is_empty()).then(|| reused as f64 / files.len() as f64),
    })
}

/// Distinct paths created across all rounds, for redundancy.
pub fn all_created(events: &[FileEvents]) -> Vec<String> {
    let set: BTreeSet<&String> = events.iter().flat_map(|e| &e.created).collect();
    set.into_iter().cloned().collect()
}
