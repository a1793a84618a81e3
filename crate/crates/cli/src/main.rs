use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qwalk_cli::{resolve, run_scenario, ConfigIssue, Invocation, IssueKind, ScenarioError};

/// Runs quantum-walk scenarios and writes CSV or JSON tables.
#[derive(Debug, Parser)]
#[command(name = "qwalk", version)]
struct Cli {
    /// Built-in scenario: fig2, fig3a, fig3b, fig3c or fig4.
    #[arg(long)]
    preset: Option<String>,
    /// Scenario file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Beam splitters per layer L (the lattice has 2L modes).
    #[arg(long)]
    lattice: Option<String>,
    /// Number of steps n; repeat or give a comma list to sweep.
    #[arg(long)]
    steps: Vec<String>,
    /// Comma list of occupations per mode, or central-block:N; repeat to sweep.
    #[arg(long)]
    occupations: Vec<String>,
    /// boson, fermion or distinguishable; repeatable.
    #[arg(long)]
    species: Vec<String>,
    /// mean-profile, single-mode:i, two-mode:i:j, conditional:m:i:j or pair-averaged:m; repeatable.
    #[arg(long)]
    observable: Vec<String>,
    /// main or oracle.
    #[arg(long)]
    engine: Option<String>,
    /// Output file; the table goes to stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Also write a gnuplot script reading the CSV output.
    #[arg(long)]
    plot: Option<String>,
}

impl Cli {
    fn invocation(self) -> Invocation {
        let one = |v: Option<String>| v.into_iter().collect::<Vec<_>>();
        Invocation {
            preset: self.preset,
            config: self.config,
            overrides: vec![
                ("lattice", one(self.lattice)),
                ("steps", self.steps),
                ("occupations", self.occupations),
                ("species", self.species),
                ("observable", self.observable),
                ("engine", one(self.engine)),
                ("out", one(self.out)),
                ("format", one(self.format)),
                ("plot", one(self.plot)),
            ],
        }
    }
}

fn fail(err: ScenarioError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string().trim_end().to_string();
            return fail(ScenarioError::Config(vec![ConfigIssue { kind: IssueKind::Config, origin: None, message }]));
        }
    };
    let result = resolve(&cli.invocation()).and_then(|(scenario, source)| run_scenario(&scenario, &source));
    match result {
        Ok(Some(table)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(table.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
