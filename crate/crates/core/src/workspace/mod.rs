//! Isolated per-player workspaces.
//!
//! A workspace is a directory exclusively owned by one player for the
//! duration of a tournament. Editors run inside it as subprocesses with a
//! wall-clock limit, round logs are injected under `logs/`, and when
//! opponent visibility is on a read-only copy of each opponent's previous
//! code is mounted under `opponent/`.

mod editor;
mod exec;
mod manifest;
mod mount;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use crate::player::PlayerId;

pub use editor::{run_editor, EditReport, EditorSpec, PatchOp, Termination, COMPLETION_MARKER};
pub use exec::{exec, ExecLimits, ExecResult, READONLY_VIOLATION_EXIT};
pub use manifest::{
    diff_manifests, digest_bytes, is_hygiene_path, scan_references, snapshot, FileEvents,
    FileManifest, ManifestEntry, DIGEST_ALGORITHM,
};
pub use mount::{capture_tree, mount_opponent_readonly, unmount_opponents, TreeSnapshot};

pub const LOGS_DIR: &str = "logs";
pub const OPPONENT_DIR: &str = "opponent";

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("workspace template {0} does not exist")]
    TemplateMissing(PathBuf),
    #[error("workspace {0} already exists")]
    Collision(PathBuf),
    #[error("empty command")]
    EmptyCommand,
    #[error("could not spawn `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: io::Error,
    },
    #[error("path `{0}` escapes the workspace")]
    PathEscape(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl WorkspaceError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        WorkspaceError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
    pub player_id: PlayerId,
    pub tournament_id: String,
    /// Read-only opponent copies currently mounted, used to detect and undo
    /// writes into `opponent/`.
    pub(crate) mounted: Vec<(PlayerId, TreeSnapshot)>,
}

impl Workspace {
    /// Opens an existing workspace directory without copying anything.
    pub fn open(root: impl Into<PathBuf>, player_id: PlayerId, tournament_id: &str) -> Self {
        Self {
            root: root.into(),
            player_id,
            tournament_id: tournament_id.to_string(),
            mounted: Vec::new(),
        }
    }

    pub fn logs_dir(&self) -> PathBuf {
        self.root.join(LOGS_DIR)
    }

    pub fn round_logs_dir(&self, round: u32) -> PathBuf {
        self.logs_dir().join(round_dir_name(round))
    }
}

pub fn round_dir_name(round: u32) -> String {
    format!("round_{round:02}")
}

/// Deep-copies `template` to `parent/<player_id>` and creates an empty
/// `logs/` directory.
pub fn provision(
    template: &Path,
    parent: &Path,
    player_id: &PlayerId,
    tournament_id: &str,
) -> Result<Workspace, WorkspaceError> {
    if !template.is_dir() {
        return Err(WorkspaceError::TemplateMissing(template.to_path_buf()));
    }
    let root = parent.join(player_id.as_str());
    if root.exists() {
        return Err(WorkspaceError::Collision(root));
    }
    copy_tree(template, &root)?;
    let logs = root.join(LOGS_DIR);
    if logs.exists() {
        remove_tree(&logs)?;
    }
    fs::create_dir_all(&logs).map_err(|e| WorkspaceError::io(&logs, e))?;
    Ok(Workspace::open(root, player_id.clone(), tournament_id))
}

/// Copies round log files into `logs/round_<nn>/`, replacing any earlier
/// injection for the same round.
pub fn inject_logs(
    workspace: &Workspace,
    round: u32,
    files: &[PathBuf],
) -> Result<(), WorkspaceError> {
    let dest = workspace.round_logs_dir(round);
    if dest.exists() {
        remove_tree(&dest)?;
    }
    fs::create_dir_all(&dest).map_err(|e| WorkspaceError::io(&dest, e))?;
    for file in files {
        let name = file
            .file_name()
            .ok_or_else(|| WorkspaceError::PathEscape(file.display().to_string()))?;
        let target = dest.join(name);
        fs::copy(file, &target).map_err(|e| WorkspaceError::io(&target, e))?;
    }
    Ok(())
}

pub(crate) fn copy_tree(from: &Path, to: &Path) -> Result<(), WorkspaceError> {
    for entry in WalkDir::new(from).sort_by_file_name() {
        let entry = entry.map_err(|e| walk_error(from, e))?;
        let rel = entry.path().strip_prefix(from).expect("walk stays under root");
        let target = to.join(rel);
        let ft = entry.file_type();
        if ft.is_dir() {
            fs::create_dir_all(&target).map_err(|e| WorkspaceError::io(&target, e))?;
        } else if ft.is_file() {
            fs::copy(entry.path(), &target).map_err(|e| WorkspaceError::io(&target, e))?;
        }
    }
    Ok(())
}

/// Removes a directory tree, restoring write permission first so read-only
/// mounts can be cleared.
pub(crate) fn remove_tree(path: &Path) -> Result<(), WorkspaceError> {
    set_tree_readonly(path, false)?;
    fs::remove_dir_all(path).map_err(|e| WorkspaceError::io(path, e))
}

pub(crate) fn set_tree_readonly(path: &Path, readonly: bool) -> Result<(), WorkspaceError> {
    if !path.exists() {
        return Ok(());
    }
    for entry in WalkDir::new(path).contents_first(readonly) {
        let entry = entry.map_err(|e| walk_error(path, e))?;
        if entry.file_type().is_symlink() {
            continue;
        }
        let meta = entry
            .metadata()
            .map_err(|e| walk_error(entry.path(), e))?;
        let mut perms = meta.permissions();
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            let mode = match (readonly, meta.is_dir()) {
                (true, true) => 0o555,
                (true, false) => 0o444,
                (false, true) => 0o755,
                (false, false) => 0o644,
            };
            perms.set_mode(mode);
        }
        #[cfg(not(unix))]
        perms.set_readonly(readonly);
        fs::set_permissions(entry.path(), perms).map_err(|e| WorkspaceError::io(entry.path(), e))?;
    }
    Ok(())
}

pub(crate) fn walk_error(path: &Path, e: walkdir::Error) -> WorkspaceError {
    let p = e.path().unwrap_or(path).to_path_buf();
    WorkspaceError::io(p, e.into_io_error().unwrap_or_else(|| io::Error::other("walk failed")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("main.py"), "def move(): pass\n").unwrap();
        fs::create_dir_all(dir.path().join("docs")).unwrap();
        fs::write(dir.path().join("docs/rules.md"), "# rules\n").unwrap();
        dir
    }

    #[test]
    fn provision_copies_template_and_adds_logs() {
        let tpl = template();
        let out = tempfile::tempdir().unwrap();
        let ws = provision(tpl.path(), out.path(), &"p1".into(), "t").unwrap();
        assert!(ws.root.join("main.py").is_file());
        assert!(ws.root.join("docs/rules.md").is_file());
        assert!(ws.logs_dir().is_dir());
        assert_eq!(fs::read_dir(ws.logs_dir()).unwrap().count(), 0);
    }

    #[test]
    fn same_template_gives_identical_digests() {
        let tpl = template();
        let out = tempfile::tempdir().unwrap();
        let a = provision(tpl.path(), out.path(), &"a".into(), "t").unwrap();
        let b = provision(tpl.path(), out.path(), &"b".into(), "t").unwrap();
        let (ma, mb) = (snapshot(&a.root, 0).unwrap(), snapshot(&b.root, 0).unwrap());
        assert_eq!(ma.entries, mb.entries);
    }

    #[test]
    fn provision_errors() {
        let out = tempfile::tempdir().unwrap();
        let err = provision(&out.path().join("nope"), out.path(), &"a".into(), "t").unwrap_err();
        assert!(matches!(err, WorkspaceError::TemplateMissing(_)));
        let tpl = template();
        provision(tpl.path(), out.path(), &"a".into(), "t").unwrap();
        let err = provision(tpl.path(), out.path(), &"a".into(), "t").unwrap_err();
        assert!(matches!(err, WorkspaceError::Collision(_)));
    }

    #[test]
    fn injection_lands_in_round_dir_and_is_idempotent() {
        let tpl = template();
        let out = tempfile::tempdir().unwrap();
        let ws = provision(tpl.path(), out.path(), &"a".into(), "t").unwrap();
        let logs = tempfile::tempdir().unwrap();
        let f = logs.path().join("sim_1.jsonl");
        fs::write(&f, "{}\n").unwrap();
        inject_logs(&ws, 1, &[f.clone()]).unwrap();
        inject_logs(&ws, 3, &[f.clone()]).unwrap();
        let first = snapshot(&ws.root, 3).unwrap();
        inject_logs(&ws, 3, &[f]).unwrap();
        assert_eq!(snapshot(&ws.root, 3).unwrap().entries, first.entries);
        assert!(ws.root.join("logs/round_03/sim_1.jsonl").is_file());
        assert!(ws.root.join("logs/round_01/sim_1.jsonl").is_file());
    }

    #[test]
    fn injection_only_changes_logs() {
        let tpl = template();
        let out = tempfile::tempdir().unwrap();
        let ws = provision(tpl.path(), out.path(), &"a".into(), "t").unwrap();
        let before = snapshot(&ws.root, 1).unwrap();
        let logs = tempfile::tempdir().unwrap();
        let f = logs.path().join("tally.txt");
        fs::write(&f, "x").unwrap();
        inject_logs(&ws, 1, &[f]).unwrap();
        let after = snapshot(&ws.root, 1).unwrap();
        let events = diff_manifests(&before, &after, 1);
        assert!(events.is_empty());
        let changed: Vec<_> = after
            .entries
            .iter()
            .filter(|e| !before.entries.contains(e))
            .collect();
        assert!(!changed.is_empty());
        assert!(changed.iter().all(|e| e.path.starts_with("logs/")));
    }
}
