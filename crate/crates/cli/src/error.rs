use qwalk_core::WalkError;
use serde_json::json;

use crate::config::{ConfigIssue, IssueKind};

/// Failure of a scenario run, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid configuration ({} problem(s))", .0.len())]
    Config(Vec<ConfigIssue>),
    #[error("engine cap exceeded ({} problem(s))", .0.len())]
    Cap(Vec<ConfigIssue>),
    #[error("numerical health check failed: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ScenarioError {
    /// Config problems take precedence over cap violations.
    pub fn from_issues(issues: Vec<ConfigIssue>) -> Self {
        if issues.iter().any(|i| i.kind == IssueKind::Config) {
            ScenarioError::Config(issues)
        } else {
            ScenarioError::Cap(issues)
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            ScenarioError::Cap(_) => 3,
            ScenarioError::Numerical(_) => 4,
            ScenarioError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Config(_) => "config",
            ScenarioError::Cap(_) => "cap",
            ScenarioError::Numerical(_) => "numerical",
            ScenarioError::Io(_) => "io",
        }
    }

    /// One-line JSON error record.
    pub fn to_json(&self) -> String {
        let errors: Vec<serde_json::Value> = match self {
            ScenarioError::Config(issues) | ScenarioError::Cap(issues) => issues
                .iter()
                .map(|i| json!({ "source": i.origin.as_ref().map(ToString::to_string), "message": i.message }))
                .collect(),
            ScenarioError::Numerical(msg) | ScenarioError::Io(msg) => vec![json!({ "source": null, "message": msg })],
        };
        json!({ "status": "error", "kind": self.kind(), "exit_code": self.exit_code(), "errors": errors }).to_string()
    }
}

impl From<WalkError> for ScenarioError {
    fn from(e: WalkError) -> Self {
        let issue = |kind| vec![ConfigIssue { kind, origin: None, message: e.to_string() }];
        match e {
            WalkError::OracleCap { .. } | WalkError::TooManyParticles { .. } => ScenarioError::Cap(issue(IssueKind::Cap)),
            WalkError::NormalizationDefect { .. }
            | WalkError::ZeroProbabilityCondition { .. }
            | WalkError::NoContributingPairs { .. } => ScenarioError::Numerical(e.to_string()),
            _ => ScenarioError::Config(issue(IssueKind::Config)),
        }
    }
}

impl From<std::io::Error> for ScenarioError {
    fn from(e: std::io::Error) -> Self {
        ScenarioError::Io(e.to_string())
    }
}
