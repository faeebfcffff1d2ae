use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Component, Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{exec, ExecLimits, Workspace, WorkspaceError};

/// A line equal to this in an external editor's output ends the edit phase.
pub const COMPLETION_MARKER: &str = "EDIT_COMPLETE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EditorSpec {
    Noop,
    /// One patch script per round, applied as a single step. Rounds beyond
    /// the list leave the workspace alone.
    Scripted {
        #[serde(default)]
        rounds: Vec<Vec<PatchOp>>,
    },
    /// Shell command run once per step inside the workspace. `{workspace}`,
    /// `{round}`, `{step}`, `{player}` and `{budget}` are substituted.
    External {
        command: String,
        #[serde(default)]
        timeout_secs: Option<f64>,
        #[serde(default)]
        max_output: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatchOp {
    Write { path: String, content: String },
    Append { path: String, content: String },
    Delete { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BudgetExhausted,
    Crashed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditReport {
    pub steps_used: u32,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Reserved for editors with a monetary budget; always `None` here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

impl EditReport {
    fn new(steps_used: u32, termination: Termination, detail: Option<String>) -> Self {
        Self {
            steps_used,
            termination,
            detail,
            cost: None,
        }
    }
}

impl EditorSpec {
    pub fn validate(&self, rounds: u32) -> Result<(), String> {
        match self {
            EditorSpec::Noop => Ok(()),
            EditorSpec::Scripted { rounds: scripts } => {
                if scripts.len() > rounds as usize {
                    return Err(format!(
                        "scripted editor has {} patch scripts for {rounds} rounds",
                        scripts.len()
                    ));
                }
                for op in scripts.iter().flatten() {
                    resolve_relative(Path::new("."), op.path()).map_err(|e| e.to_string())?;
                }
                Ok(())
            }
            EditorSpec::External {
                command,
                timeout_secs,
                max_output,
            } => {
                if command.trim().is_empty() {
                    return Err("external editor command is empty".into());
                }
                if timeout_secs.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                    return Err("timeout_secs must be positive".into());
                }
                if *max_output == Some(0) {
                    return Err("max_output must be positive".into());
                }
                Ok(())
            }
        }
    }
}

impl PatchOp {
    pub fn path(&self) -> &str {
        match self {
            PatchOp::Write { path, .. } | PatchOp::Append { path, .. } | PatchOp::Delete { path } => path,
        }
    }

    fn apply(&self, root: &Path) -> Result<(), WorkspaceError> {
        let target = resolve_relative(root, self.path())?;
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).map_err(|e| WorkspaceError::io(parent, e))?;
        }
        match self {
            PatchOp::Write { content, .. } => {
                fs::write(&target, content).map_err(|e| WorkspaceError::io(&target, e))
            }
            PatchOp::Append { content, .. } => OpenOptions::new()
                .create(true)
                .append(true)
                .open(&target)
                .and_then(|mut f| f.write_all(content.as_bytes()))
                .map_err(|e| WorkspaceError::io(&target, e)),
            PatchOp::Delete { .. } => {
                fs::remove_file(&target).map_err(|e| WorkspaceError::io(&target, e))
            }
        }
    }
}

fn resolve_relative(root: &Path, rel: &str) -> Result<PathBuf, WorkspaceError> {
    let path = Path::new(rel);
    let ok = !rel.is_empty() && path.components().all(|c| matches!(c, Component::Normal(_)));
    if !ok {
        return Err(WorkspaceError::PathEscape(rel.to_string()));
    }
    Ok(root.join(path))
}

fn render(template: &str, ws: &Workspace, round: u32, step: u32, budget: u32) -> String {
    template
        .replace("{workspace}", &ws.root.display().to_string())
        .replace("{round}", &round.to_string())
        .replace("{step}", &step.to_string())
        .replace("{player}", ws.player_id.as_str())
        .replace("{budget}", &budget.to_string())
}

/// Runs one round's edit phase. Failures are reported in the returned
/// report and leave the workspace as the editor left it.
pub fn run_editor(editor: &EditorSpec, workspace: &Workspace, round: u32, budget: u32) -> EditReport {
    match editor {
        EditorSpec::Noop => EditReport::new(0, Termination::Completed, None),
        EditorSpec::Scripted { rounds } => {
            let Some(script) = rounds.get(round.saturating_sub(1) as usize) else {
                return EditReport::new(0, Termination::Completed, None);
            };
            if budget == 0 {
                return EditReport::new(0, Termination::BudgetExhausted, None);
            }
            for op in script {
                if let Err(e) = op.apply(&workspace.root) {
                    return EditReport::new(1, Termination::Crashed, Some(e.to_string()));
                }
            }
            EditReport::new(1, Termination::Completed, None)
        }
        EditorSpec::External {
            command,
            timeout_secs,
            max_output,
        } => {
            let defaults = ExecLimits::default();
            let limits = ExecLimits {
                wall_clock: timeout_secs
                    .map(Duration::from_secs_f64)
                    .unwrap_or(defaults.wall_clock),
                max_output: max_output.unwrap_or(defaults.max_output),
            };
            for step in 1..=budget {
                let cmd = render(command, workspace, round, step, budget);
                let result = match exec(workspace, &cmd, &limits) {
                    Ok(r) => r,
                    Err(e) => return EditReport::new(step, Termination::Crashed, Some(e.to_string())),
                };
                if result.timed_out {
                    return EditReport::new(step, Termination::Crashed, Some("timed out".into()));
                }
                if !result.success() {
                    let detail = match result.exit_code {
                        Some(c) => format!("exited with status {c}"),
                        None => "killed by signal".into(),
                    };
                    return EditReport::new(step, Termination::Crashed, Some(detail));
                }
                if result.output_text().lines().any(|l| l.trim() == COMPLETION_MARKER) {
                    return EditReport::new(step, Termination::Completed, None);
                }
            }
            EditReport::new(budget, Termination::BudgetExhausted, None)
        }
    }
}
