use std::io::Read;
use std::process::{Command, Stdio};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::mount::{capture_tree_at, restore_opponents};
use super::{Workspace, WorkspaceError, OPPONENT_DIR};

/// Exit code reported when a command modified the read-only opponent copy.
pub const READONLY_VIOLATION_EXIT: i32 = 126;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecLimits {
    pub wall_clock: Duration,
    pub max_output: usize,
}

impl Default for ExecLimits {
    fn default() -> Self {
        Self {
            wall_clock: Duration::from_secs(300),
            max_output: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecResult {
    /// `None` when the process was killed by a signal (including timeouts).
    pub exit_code: Option<i32>,
    /// Combined stdout and stderr, at most `max_output` bytes.
    pub output: Vec<u8>,
    pub truncated: bool,
    pub timed_out: bool,
    pub readonly_violation: bool,
}

impl ExecResult {
    pub fn success(&self) -> bool {
        self.exit_code == Some(0) && !self.timed_out
    }

    pub fn output_text(&self) -> String {
        String::from_utf8_lossy(&self.output).into_owned()
    }
}

/// Runs `sh -c <command>` inside the workspace root.
///
/// The process (and its process group) is killed once `wall_clock` elapses.
/// Output beyond `max_output` bytes is drained and discarded. If the command
/// changes the mounted opponent copy, the copy is restored and the result
/// is reported as a failure.
pub fn exec(
    workspace: &Workspace,
    command: &str,
    limits: &ExecLimits,
) -> Result<ExecResult, WorkspaceError> {
    if command.trim().is_empty() {
        return Err(WorkspaceError::EmptyCommand);
    }
    let guard = if workspace.mounted.is_empty() {
        None
    } else {
        Some(capture_tree_at(&workspace.root.join(OPPONENT_DIR))?.digest())
    };

    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(command)
        .current_dir(&workspace.root)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    let mut child = cmd.spawn().map_err(|source| WorkspaceError::Spawn {
        command: command.to_string(),
        source,
    })?;

    let sink = Arc::new(Mutex::new(OutputSink::new(limits.max_output)));
    let readers: Vec<_> = [
        child.stdout.take().map(|s| Box::new(s) as Box<dyn Read + Send>),
        child.stderr.take().map(|s| Box::new(s) as Box<dyn Read + Send>),
    ]
    .into_iter()
    .flatten()
    .map(|mut stream| {
        let sink = Arc::clone(&sink);
        thread::spawn(move || {
            let mut buf = [0u8; 8192];
            while let Ok(n) = stream.read(&mut buf) {
                if n == 0 {
                    break;
                }
                sink.lock().expect("sink lock").push(&buf[..n]);
            }
        })
    })
    .collect();

    let deadline = Instant::now() + limits.wall_clock;
    let mut timed_out = false;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if Instant::now() >= deadline => {
                timed_out = true;
                crate::process::kill_tree(&mut child);
                break None;
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(WorkspaceError::io(&workspace.root, e)),
        }
    };
    for r in readers {
        let _ = r.join();
    }
    let sink = Arc::try_unwrap(sink)
        .map(|m| m.into_inner().expect("sink lock"))
        .unwrap_or_else(|arc| arc.lock().expect("sink lock").clone());

    let mut result = ExecResult {
        exit_code: status.and_then(|s| s.code()),
        output: sink.data,
        truncated: sink.truncated,
        timed_out,
        readonly_violation: false,
    };
    if let Some(before) = guard {
        let after = capture_tree_at(&workspace.root.join(OPPONENT_DIR))?.digest();
        if after != before {
            restore_opponents(workspace)?;
            result.readonly_violation = true;
            if result.exit_code == Some(0) {
                result.exit_code = Some(READONLY_VIOLATION_EXIT);
            }
        }
    }
    Ok(result)
}

#[derive(Debug, Clone)]
struct OutputSink {
    data: Vec<u8>,
    cap: usize,
    truncated: bool,
}

impl OutputSink {
    fn new(cap: usize) -> Self {
        Self {
            data: Vec::new(),
            cap,
            truncated: false,
        }
    }

    fn push(&mut self, chunk: &[u8]) {
        let room = self.cap.saturating_sub(self.data.len());
        if chunk.len() > room {
            self.truncated = true;
        }
        self.data.extend_from_slice(&chunk[..chunk.len().min(room)]);
    }
}

#[cfg(all(test, unix))]
mod tests {
    use super::*;

    fn ws() -> (tempfile::TempDir, Workspace) {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::open(dir.path(), "p".into(), "t");
        (dir, ws)
    }

    #[test]
    fn exit_codes_and_cwd() {
        let (_d, ws) = ws();
        let r = exec(&ws, "true", &ExecLimits::default()).unwrap();
        assert_eq!(r.exit_code, Some(0));
        assert!(r.success());
        let r = exec(&ws, "exit 3", &ExecLimits::default()).unwrap();
        assert_eq!(r.exit_code, Some(3));
        exec(&ws, "echo hi > here.txt", &ExecLimits::default()).unwrap();
        assert!(ws.root.join("here.txt").is_file());
    }

    #[test]
    fn timeout_kills_the_process_group() {
        let (_d, ws) = ws();
        let limits = ExecLimits {
            wall_clock: Duration::from_secs(1),
            ..ExecLimits::default()
        };
        let started = Instant::now();
        let r = exec(&ws, "sleep 10", &limits).unwrap();
        assert!(r.timed_out);
        assert!(!r.success());
        assert!(started.elapsed() < Duration::from_secs(5));
    }

    #[test]
    fn output_is_truncated_at_cap() {
        let (_d, ws) = ws();
        let limits = ExecLimits {
            max_output: 1 << 20,
            ..ExecLimits::default()
        };
        let r = exec(&ws, "head -c 10485760 /dev/zero", &limits).unwrap();
        assert!(r.truncated);
        assert!(r.output.len() <= 1 << 20);
        assert_eq!(r.exit_code, Some(0));
    }

    #[test]
    fn empty_command_is_rejected() {
        let (_d, ws) = ws();
        assert!(matches!(
            exec(&ws, "  ", &ExecLimits::default()),
            Err(WorkspaceError::EmptyCommand)
        ));
    }
}
