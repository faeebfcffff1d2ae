use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use super::manifest::is_hygiene_path;
use super::{remove_tree, set_tree_readonly, walk_error, Workspace, WorkspaceError, OPPONENT_DIR};
use crate::player::PlayerId;

/// In-memory copy of a workspace's files, keyed by relative path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeSnapshot {
    pub files: BTreeMap<String, Vec<u8>>,
}

impl TreeSnapshot {
    /// Digest over the sorted (path, content) pairs.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (path, data) in &self.files {
            h.update((path.len() as u64).to_le_bytes());
            h.update(path.as_bytes());
            h.update((data.len() as u64).to_le_bytes());
            h.update(data);
        }
        hex::encode(h.finalize())
    }

    fn write_to(&self, dir: &Path) -> Result<(), WorkspaceError> {
        for (path, data) in &self.files {
            let target = dir.join(path);
            if let Some(parent) = target.parent() {
                fs::create_dir_all(parent).map_err(|e| WorkspaceError::io(parent, e))?;
            }
            fs::write(&target, data).map_err(|e| WorkspaceError::io(&target, e))?;
        }
        Ok(())
    }
}

/// Captures a workspace's own code: everything outside `logs/` and
/// `opponent/`.
pub fn capture_tree(root: &Path) -> Result<TreeSnapshot, WorkspaceError> {
    let mut snap = capture_tree_at(root)?;
    snap.files.retain(|p, _| is_hygiene_path(p));
    Ok(snap)
}

pub(crate) fn capture_tree_at(dir: &Path) -> Result<TreeSnapshot, WorkspaceError> {
    let mut snap = TreeSnapshot::default();
    if !dir.exists() {
        return Ok(snap);
    }
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| walk_error(dir, e))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(dir).expect("under dir");
        let Some(key) = rel.to_str().map(|s| s.replace('\\', "/")) else {
            continue;
        };
        let data = fs::read(entry.path()).map_err(|e| WorkspaceError::io(entry.path(), e))?;
        snap.files.insert(key, data);
    }
    Ok(snap)
}

/// Places a read-only copy of each opponent snapshot under
/// `opponent/<player_id>/`, replacing any previous mount.
pub fn mount_opponent_readonly(
    workspace: &mut Workspace,
    opponents: &[(PlayerId, TreeSnapshot)],
) -> Result<(), WorkspaceError> {
    unmount_opponents(workspace)?;
    workspace.mounted = opponents.to_vec();
    write_mounts(workspace)
}

pub fn unmount_opponents(workspace: &mut Workspace) -> Result<(), WorkspaceError> {
    let dir = workspace.root.join(OPPONENT_DIR);
    if dir.exists() {
        remove_tree(&dir)?;
    }
    workspace.mounted.clear();
    Ok(())
}

pub(crate) fn restore_opponents(workspace: &Workspace) -> Result<(), WorkspaceError> {
    let dir = workspace.root.join(OPPONENT_DIR);
    if dir.exists() {
        remove_tree(&dir)?;
    }
    write_mounts(workspace)
}

fn write_mounts(workspace: &Workspace) -> Result<(), WorkspaceError> {
    let dir = workspace.root.join(OPPONENT_DIR);
    for (pid, snap) in &workspace.mounted {
        let target = dir.join(pid.as_str());
        fs::create_dir_all(&target).map_err(|e| WorkspaceError::io(&target, e))?;
        snap.write_to(&target)?;
    }
    set_tree_readonly(&dir, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::{exec, ExecLimits};

    fn setup() -> (tempfile::TempDir, Workspace, TreeSnapshot) {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("a");
        fs::create_dir_all(root.join("logs")).unwrap();
        let ws = Workspace::open(&root, "a".into(), "t");
        let mut opp = TreeSnapshot::default();
        opp.files.insert("main.py".into(), b"print(1)".to_vec());
        opp.files.insert("lib/util.py".into(), b"x".to_vec());
        (dir, ws, opp)
    }

    #[test]
    fn capture_skips_logs_and_opponent() {
        let (_d, ws, _) = setup();
        fs::write(ws.root.join("main.py"), "m").unwrap();
        fs::write(ws.root.join("logs/l.txt"), "l").unwrap();
        let snap = capture_tree(&ws.root).unwrap();
        assert_eq!(snap.files.keys().collect::<Vec<_>>(), vec!["main.py"]);
    }

    #[test]
    fn mounted_copy_matches_snapshot_digest() {
        let (_d, mut ws, opp) = setup();
        assert!(!ws.root.join(OPPONENT_DIR).exists());
        mount_opponent_readonly(&mut ws, &[("b".into(), opp.clone())]).unwrap();
        let mounted = capture_tree_at(&ws.root.join("opponent/b")).unwrap();
        assert_eq!(mounted.digest(), opp.digest());
        // Remounting replaces the previous copy.
        mount_opponent_readonly(&mut ws, &[("b".into(), TreeSnapshot::default())]).unwrap();
        assert!(capture_tree_at(&ws.root.join("opponent")).unwrap().files.is_empty());
        unmount_opponents(&mut ws).unwrap();
        assert!(!ws.root.join(OPPONENT_DIR).exists());
    }

    #[cfg(unix)]
    #[test]
    fn writes_into_opponent_copy_fail_and_are_undone() {
        let (_d, mut ws, opp) = setup();
        mount_opponent_readonly(&mut ws, &[("b".into(), opp.clone())]).unwrap();
        let r = exec(&ws, "echo hacked > opponent/b/main.py", &ExecLimits::default()).unwrap();
        assert_ne!(r.exit_code, Some(0));
        let mounted = capture_tree_at(&ws.root.join("opponent/b")).unwrap();
        assert_eq!(mounted.digest(), opp.digest());
        // Reading is fine.
        let r = exec(&ws, "cat opponent/b/main.py", &ExecLimits::default()).unwrap();
        assert!(r.success());
        assert!(!r.readonly_violation);
    }
}
