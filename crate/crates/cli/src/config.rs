//! Flat `key = value` scenario files and their validation.
//!
//! Keys `steps`, `occupations`, `species` and `observable` may repeat; each
//! line adds to the list (`steps` and `species` also take comma lists). The
//! remaining keys are scalars and may appear once. Everything after `#` on
//! a line is a comment.

use std::fmt;
use std::path::PathBuf;

use qwalk_core::oracle::{ORACLE_MAX_MODES, ORACLE_MAX_PARTICLES};
use qwalk_core::{Species, MAX_PARTICLES};

/// Where a setting came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag(&'static str),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag(name) => write!(f, "flag --{name}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    /// Malformed or inconsistent settings.
    Config,
    /// Valid request that exceeds what an engine can handle.
    Cap,
}

/// One validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub kind: IssueKind,
    pub origin: Option<Origin>,
    pub message: String,
}

impl ConfigIssue {
    fn config(origin: Option<&Origin>, message: impl Into<String>) -> Self {
        Self { kind: IssueKind::Config, origin: origin.cloned(), message: message.into() }
    }

    fn cap(origin: Option<&Origin>, message: impl Into<String>) -> Self {
        Self { kind: IssueKind::Cap, origin: origin.cloned(), message: message.into() }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.origin {
            Some(o) => write!(f, "{o}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    key: String,
    value: String,
    origin: Origin,
}

const LIST_KEYS: [&str; 4] = ["steps", "occupations", "species", "observable"];
const SCALAR_KEYS: [&str; 5] = ["lattice", "engine", "format", "out", "plot"];

/// Unvalidated settings, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawConfig {
    entries: Vec<Entry>,
}

impl RawConfig {
    /// Splits `text` into entries; lines that are not `key = value` are
    /// reported and skipped.
    pub fn parse(text: &str) -> (Self, Vec<ConfigIssue>) {
        let mut entries = Vec::new();
        let mut issues = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let origin = Origin::Line(idx + 1);
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            match content.split_once('=') {
                Some((key, value)) if !key.trim().is_empty() => entries.push(Entry {
                    key: key.trim().to_string(),
                    value: value.trim().to_string(),
                    origin,
                }),
                _ => issues.push(ConfigIssue::config(Some(&origin), format!("expected `key = value`, found `{content}`"))),
            }
        }
        (Self { entries }, issues)
    }

    /// Replaces every entry for `key` by `values`, attributed to a command-line flag.
    pub fn override_key(&mut self, key: &'static str, values: &[String]) {
        if values.is_empty() {
            return;
        }
        self.entries.retain(|e| e.key != key);
        for v in values {
            self.entries.push(Entry { key: key.to_string(), value: v.trim().to_string(), origin: Origin::Flag(key) });
        }
    }
}

/// Initial occupations as written by the user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Occupations {
    Explicit(Vec<u32>),
    /// `N` singly occupied adjacent modes centred on the lattice.
    CentralBlock(usize),
}

impl Occupations {
    pub fn resolve(&self, modes: usize) -> Vec<u32> {
        match self {
            Occupations::Explicit(v) => v.clone(),
            Occupations::CentralBlock(n) => {
                let first = modes / 2 + 1 - n / 2;
                (1..=modes).map(|j| u32::from(j >= first && j < first + n)).collect()
            }
        }
    }
}

impl fmt::Display for Occupations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Occupations::Explicit(v) => f.write_str(&join(v, ",")),
            Occupations::CentralBlock(n) => write!(f, "central-block:{n}"),
        }
    }
}

/// Order `m` of a conditional request; `N` means the total particle number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Fixed(usize),
    AllParticles,
}

impl Order {
    pub fn resolve(self, particles: usize) -> usize {
        match self {
            Order::Fixed(m) => m,
            Order::AllParticles => particles,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Fixed(m) => write!(f, "{m}"),
            Order::AllParticles => f.write_str("N"),
        }
    }
}

/// Requested quantity; modes are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    MeanProfile,
    SingleMode(usize),
    TwoMode(usize, usize),
    Conditional { m: Order, i: usize, j: usize },
    PairAveraged { m: Order },
}

impl Observable {
    /// Observables of one kind share a table layout.
    pub fn kind(&self) -> &'static str {
        match self {
            Observable::MeanProfile => "mean-profile",
            Observable::SingleMode(_) => "single-mode",
            Observable::TwoMode(..) => "two-mode",
            Observable::Conditional { .. } => "conditional",
            Observable::PairAveraged { .. } => "pair-averaged",
        }
    }

    fn modes(&self) -> Vec<usize> {
        match *self {
            Observable::SingleMode(i) => vec![i],
            Observable::TwoMode(i, j) | Observable::Conditional { i, j, .. } => vec![i, j],
            Observable::MeanProfile | Observable::PairAveraged { .. } => vec![],
        }
    }

    fn order(&self) -> Option<Order> {
        match *self {
            Observable::Conditional { m, .. } | Observable::PairAveraged { m } => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::MeanProfile => f.write_str("mean-profile"),
            Observable::SingleMode(i) => write!(f, "single-mode:{i}"),
            Observable::TwoMode(i, j) => write!(f, "two-mode:{i}:{j}"),
            Observable::Conditional { m, i, j } => write!(f, "conditional:{m}:{i}:{j}"),
            Observable::PairAveraged { m } => write!(f, "pair-averaged:{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Main,
    Oracle,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Main => "main",
            Engine::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A validated scenario. Series run over `steps x occupations x observables`
/// in that nesting order; every series is evaluated for every species.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    /// Number of beam splitters per layer; the lattice has `2L` modes.
    pub half_modes: usize,
    pub steps: Vec<usize>,
    pub occupations: Vec<Occupations>,
    pub species: Vec<Species>,
    pub observables: Vec<Observable>,
    pub engine: Engine,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Scenario {
    pub fn modes(&self) -> usize {
        2 * self.half_modes
    }

    /// Settings that determine the numbers, as config text (no output paths).
    pub fn resolved_config(&self) -> Vec<(&'static str, String)> {
        let mut lines = vec![("lattice", self.half_modes.to_string())];
        lines.push(("steps", join(&self.steps, ", ")));
        for occ in &self.occupations {
            lines.push(("occupations", occ.to_string()));
        }
        let species: Vec<&str> = self.species.iter().map(|s| s.as_str()).collect();
        lines.push(("species", species.join(", ")));
        for obs in &self.observables {
            lines.push(("observable", obs.to_string()));
        }
        lines.push(("engine", self.engine.as_str().to_string()));
        lines
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

/// Parses and validates a config file, reporting every problem found.
pub fn validate_config(text: &str) -> Result<Scenario, Vec<ConfigIssue>> {
    let (raw, mut issues) = RawConfig::parse(text);
    match validate(&raw) {
        Ok(s) if issues.is_empty() => Ok(s),
        Ok(_) => Err(issues),
        Err(more) => {
            issues.extend(more);
            Err(issues)
        }
    }
}

/// Validates already split settings.
pub fn validate(raw: &RawConfig) -> Result<Scenario, Vec<ConfigIssue>> {
    let mut v = Validator::default();
    let mut half_modes = None;
    let mut steps = Vec::new();
    let mut occupations: Vec<(Occupations, Origin)> = Vec::new();
    let mut species: Vec<(Species, Origin)> = Vec::new();
    let mut observables: Vec<(Observable, Origin)> = Vec::new();
    let mut engine = Engine::Main;
    let mut format = Format::Csv;
    let mut out = None;
    let mut plot = None;
    let mut plot_origin = None;
    let mut seen: Vec<(&str, &Origin)> = Vec::new();

    for e in &raw.entries {
        let key = e.key.as_str();
        let o = &e.origin;
        if SCALAR_KEYS.contains(&key) {
            if let Some((_, first)) = seen.iter().find(|(k, _)| *k == key) {
                v.config(o, format!("`{key}` already set at {first}"));
                continue;
            }
            seen.push((key, o));
        } else if !LIST_KEYS.contains(&key) {
            v.config(o, format!("unknown key `{key}`"));
            continue;
        }
        match key {
            "lattice" => match e.value.parse::<usize>() {
                Ok(l) if l >= 1 => half_modes = Some(l),
                _ => v.config(o, format!("lattice must be a positive integer, found `{}`", e.value)),
            },
            "steps" => {
                for item in e.value.split(',') {
                    match item.trim().parse::<usize>() {
                        Ok(n) => steps.push(n),
                        Err(_) => v.config(o, format!("steps must be non-negative integers, found `{}`", item.trim())),
                    }
                }
            }
            "occupations" => match parse_occupations(&e.value) {
                Ok(occ) => occupations.push((occ, o.clone())),
                Err(msg) => v.config(o, msg),
            },
            "species" => {
                for item in e.value.split(',') {
                    match item.trim().parse::<Species>() {
                        Ok(s) if species.iter().any(|(t, _)| *t == s) => v.config(o, format!("species `{s}` listed twice")),
                        Ok(s) => species.push((s, o.clone())),
                        Err(msg) => v.config(o, msg),
                    }
                }
            }
            "observable" => match parse_observable(&e.value) {
                Ok(obs) => observables.push((obs, o.clone())),
                Err(msg) => v.config(o, msg),
            },
            "engine" => match e.value.as_str() {
                "main" => engine = Engine::Main,
                "oracle" => engine = Engine::Oracle,
                other => v.config(o, format!("unknown engine `{other}` (expected main or oracle)")),
            },
            "format" => match e.value.as_str() {
                "csv" => format = Format::Csv,
                "json" => format = Format::Json,
                other => v.config(o, format!("unknown format `{other}` (expected csv or json)")),
            },
            "out" => out = Some(PathBuf::from(&e.value)),
            "plot" => {
                plot = Some(PathBuf::from(&e.value));
                plot_origin = Some(o.clone());
            }
            _ => unreachable!(),
        }
    }

    for (key, missing) in [
        ("lattice", half_modes.is_none()),
        ("steps", steps.is_empty()),
        ("occupations", occupations.is_empty()),
        ("species", species.is_empty()),
        ("observable", observables.is_empty()),
    ] {
        // a present but malformed key has already been reported
        if missing && !raw.entries.iter().any(|e| e.key == key) {
            v.issues.push(ConfigIssue::config(None, format!("missing key `{key}`")));
        }
    }

    if let Some(l) = half_modes {
        let modes = 2 * l;
        if engine == Engine::Oracle && modes > ORACLE_MAX_MODES {
            let o = raw.entries.iter().find(|e| e.key == "lattice").map(|e| &e.origin);
            v.issues.push(ConfigIssue::cap(o, format!("oracle engine handles at most {ORACLE_MAX_MODES} modes, lattice has {modes}")));
        }
        let mut particle_counts = Vec::new();
        for (occ, o) in &occupations {
            if let Some(n) = check_occupations(&mut v, occ, o, modes, &species, engine) {
                particle_counts.push(n);
            }
        }
        for (obs, o) in &observables {
            for i in obs.modes() {
                if i == 0 || i > modes {
                    v.config(o, format!("mode {i} outside 1..={modes}"));
                }
            }
            if let [i, j] = obs.modes()[..] {
                if i == j {
                    v.config(o, format!("the two watched modes must differ, both are {i}"));
                }
            }
            if let Some(Order::Fixed(m)) = obs.order() {
                if let Some(&n) = particle_counts.iter().filter(|&&n| m > n).max() {
                    v.config(o, format!("conditional order m={m} exceeds particle number N={n}"));
                }
            }
            if let Some(order) = obs.order() {
                if species.iter().any(|(s, _)| *s == Species::Fermion)
                    && particle_counts.iter().any(|&n| order.resolve(n) > 2)
                {
                    v.config(o, format!("fermions cannot put more than 2 particles into two modes (observable {obs})"));
                }
            }
        }
    }

    if let Some((first, _)) = observables.first() {
        for (obs, o) in &observables[1..] {
            if obs.kind() != first.kind() {
                v.config(o, format!("observable {obs} cannot share a table with {} requests", first.kind()));
            }
        }
    }

    if plot.is_some() {
        if format != Format::Csv {
            v.config(plot_origin.as_ref().unwrap(), "plot scripts read CSV output; set format = csv");
        }
        if out.is_none() {
            v.config(plot_origin.as_ref().unwrap(), "plot scripts need an output file; set out");
        }
    }

    if !v.issues.is_empty() {
        return Err(v.issues);
    }
    Ok(Scenario {
        half_modes: half_modes.unwrap(),
        steps,
        occupations: occupations.into_iter().map(|(o, _)| o).collect(),
        species: species.into_iter().map(|(s, _)| s).collect(),
        observables: observables.into_iter().map(|(o, _)| o).collect(),
        engine,
        format,
        out,
        plot,
    })
}

#[derive(Default)]
struct Validator {
    issues: Vec<ConfigIssue>,
}

impl Validator {
    fn config(&mut self, origin: &Origin, message: impl Into<String>) {
        self.issues.push(ConfigIssue::config(Some(origin), message));
    }
}

/// Checks one occupation entry against the lattice and species; returns
/// its particle number when usable.
fn check_occupations(
    v: &mut Validator,
    occ: &Occupations,
    o: &Origin,
    modes: usize,
    species: &[(Species, Origin)],
    engine: Engine,
) -> Option<usize> {
    let particles = match occ {
        Occupations::CentralBlock(n) => {
            if *n == 0 || *n > modes {
                v.config(o, format!("central block of {n} particles does not fit {modes} modes"));
                return None;
            }
            *n
        }
        Occupations::Explicit(r) => {
            if r.len() != modes {
                v.config(o, format!("occupations list {} modes but the lattice has {modes}", r.len()));
                return None;
            }
            if species.iter().any(|(s, _)| *s == Species::Fermion) {
                for (j, &rj) in r.iter().enumerate().filter(|(_, &rj)| rj > 1) {
                    v.config(o, format!("Pauli violation at mode {}: {rj} fermions in one mode", j + 1));
                }
            }
            let total = r.iter().map(|&x| x as usize).sum();
            if total == 0 {
                v.config(o, "occupations hold no particles");
                return None;
            }
            total
        }
    };
    if particles > MAX_PARTICLES {
        v.issues.push(ConfigIssue::cap(Some(o), format!("{particles} particles exceed the supported maximum of {MAX_PARTICLES}")));
    }
    if engine == Engine::Oracle && particles > ORACLE_MAX_PARTICLES {
        v.issues.push(ConfigIssue::cap(
            Some(o),
            format!("oracle engine handles at most {ORACLE_MAX_PARTICLES} particles, occupations hold {particles}"),
        ));
    }
    Some(particles)
}

fn parse_occupations(value: &str) -> Result<Occupations, String> {
    if let Some(rest) = value.strip_prefix("central-block") {
        let n = rest.trim_start_matches([':', ' ']).trim();
        return n
            .parse::<usize>()
            .map(Occupations::CentralBlock)
            .map_err(|_| format!("central-block needs a particle number, found `{n}`"));
    }
    value
        .split(',')
        .map(|item| item.trim().parse::<u32>().map_err(|_| format!("occupation `{}` is not a non-negative integer", item.trim())))
        .collect::<Result<Vec<_>, _>>()
        .map(Occupations::Explicit)
}

fn parse_observable(value: &str) -> Result<Observable, String> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let int = |s: &str| s.parse::<usize>().map_err(|_| format!("expected an integer in `{value}`, found `{s}`"));
    let order = |s: &str| if s == "N" { Ok(Order::AllParticles) } else { int(s).map(Order::Fixed) };
    match parts[..] {
        ["mean-profile"] => Ok(Observable::MeanProfile),
        ["single-mode", i] => Ok(Observable::SingleMode(int(i)?)),
        ["two-mode", i, j] => Ok(Observable::TwoMode(int(i)?, int(j)?)),
        ["conditional", m, i, j] => Ok(Observable::Conditional { m: order(m)?, i: int(i)?, j: int(j)? }),
        ["pair-averaged", m] => Ok(Observable::PairAveraged { m: order(m)? }),
        _ => Err(format!(
            "unknown observable `{value}` (expected mean-profile, single-mode:i, two-mode:i:j, conditional:m:i:j or pair-averaged:m)"
        )),
    }
}
