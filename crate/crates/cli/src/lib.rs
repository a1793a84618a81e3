//! Scenario runner for the quantum-walk engines.
//!
//! A scenario is a flat `key = value` file (or one of the built-in
//! presets), optionally adjusted by command-line flags. Running it
//! produces one CSV or JSON table and, on request, a gnuplot script.
//!
//! ```
//! use qwalk_cli::{render_scenario, validate_config};
//!
//! let s = validate_config("lattice = 1\nsteps = 1\noccupations = 1,1\nspecies = boson\nobservable = two-mode:1:2\n").unwrap();
//! let out = render_scenario(&s, "example").unwrap();
//! assert!(out.data.contains("k_i,k_j,P_boson,defect_boson"));
//! ```

pub mod compute;
pub mod config;
pub mod error;
pub mod presets;
pub mod render;

use std::fs;
use std::path::PathBuf;

pub use compute::{evaluate, Series, Table};
pub use config::{
    validate, validate_config, ConfigIssue, Engine, Format, IssueKind, Observable, Occupations, Order, Origin, RawConfig,
    Scenario,
};
pub use error::ScenarioError;
pub use presets::{preset, PRESET_NAMES};

/// Where the base configuration comes from plus flag overrides.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub preset: Option<String>,
    pub config: Option<PathBuf>,
    /// `(key, values)`; a non-empty list replaces the key's entries.
    pub overrides: Vec<(&'static str, Vec<String>)>,
}

/// Builds and validates the scenario; the string names its source.
pub fn resolve(inv: &Invocation) -> Result<(Scenario, String), ScenarioError> {
    let config_error = |message: String| ScenarioError::Config(vec![ConfigIssue { kind: IssueKind::Config, origin: None, message }]);
    let (text, source) = match (&inv.preset, &inv.config) {
        (Some(_), Some(_)) => return Err(config_error("--preset and --config are mutually exclusive".into())),
        (Some(name), None) => match preset(name) {
            Some(text) => (text.to_string(), format!("preset {name}")),
            None => return Err(config_error(format!("unknown preset `{name}` (expected one of {})", PRESET_NAMES.join(", ")))),
        },
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            (text, format!("config {}", path.display()))
        }
        (None, None) => (String::new(), "command line".to_string()),
    };
    let (mut raw, mut issues) = RawConfig::parse(&text);
    for (key, values) in &inv.overrides {
        raw.override_key(key, values);
    }
    match validate(&raw) {
        Ok(s) if issues.is_empty() => Ok((s, source)),
        Ok(_) => Err(ScenarioError::from_issues(issues)),
        Err(more) => {
            issues.extend(more);
            Err(ScenarioError::from_issues(issues))
        }
    }
}

/// Rendered output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub data: String,
    pub plot: Option<String>,
}

/// Evaluates the scenario and renders it in its format, without touching the filesystem.
pub fn render_scenario(s: &Scenario, source: &str) -> Result<Rendered, ScenarioError> {
    let table = evaluate(s)?;
    let data = match s.format {
        Format::Csv => render::csv(s, source, &table),
        Format::Json => render::json(s, source, &table),
    };
    let plot = match (&s.plot, &s.out) {
        (Some(_), Some(out)) => Some(render::gnuplot(&table, &out.to_string_lossy())),
        _ => None,
    };
    Ok(Rendered { data, plot })
}

/// Runs the scenario and writes its files. Returns the table when no
/// output path is set, for the caller to print.
pub fn run_scenario(s: &Scenario, source: &str) -> Result<Option<String>, ScenarioError> {
    let rendered = render_scenario(s, source)?;
    if let (Some(path), Some(script)) = (&s.plot, &rendered.plot) {
        fs::write(path, script)?;
    }
    match &s.out {
        Some(path) => {
            fs::write(path, &rendered.data)?;
            Ok(None)
        }
        None => Ok(Some(rendered.data)),
    }
}
