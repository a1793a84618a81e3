//! CSV, JSON and gnuplot output.

use std::fmt::Write;

use serde_json::{json, Value};

use crate::compute::{Series, Table};
use crate::config::{Observable, Scenario};

const GENERATOR: &str = concat!("qwalk ", env!("CARGO_PKG_VERSION"));

/// 17 significant digits, enough to round-trip any f64.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn describe(index: usize, s: &Series) -> String {
    let mut text = format!("series {index}: steps={} particles={} observable={}", s.steps, s.particles, s.observable);
    let used: Vec<String> = s.pairs.iter().flatten().map(|(u, _)| u.to_string()).collect();
    if let Some((_, total)) = s.pairs.iter().flatten().next() {
        // one count when every species could use the same pairs
        let shown = if used.iter().all(|u| *u == used[0]) { used[0].clone() } else { used.join(",") };
        write!(text, " pairs_used={shown}/{total}").unwrap();
    }
    text
}

/// CSV table preceded by a `#` comment block with the resolved configuration.
pub fn csv(scenario: &Scenario, source: &str, table: &Table) -> String {
    let mut out = String::new();
    writeln!(out, "# {GENERATOR}").unwrap();
    writeln!(out, "# source = {source}").unwrap();
    for (key, value) in scenario.resolved_config() {
        writeln!(out, "# {key} = {value}").unwrap();
    }
    writeln!(out, "# modes = {}", scenario.modes()).unwrap();
    for (idx, s) in table.series.iter().enumerate() {
        writeln!(out, "# {}", describe(idx, s)).unwrap();
    }
    for (idx, occ) in distinct_occupations(table).iter().enumerate() {
        writeln!(out, "# input occupations {idx} = {}", occ.iter().map(u32::to_string).collect::<Vec<_>>().join(",")).unwrap();
    }
    writeln!(out, "{}", table.columns().join(",")).unwrap();
    let tagged = table.series.len() > 1;
    for (idx, s) in table.series.iter().enumerate() {
        for (row, index) in s.index.iter().enumerate() {
            let mut cells: Vec<String> = Vec::new();
            if tagged {
                cells.push(idx.to_string());
            }
            cells.extend(index.iter().map(i64::to_string));
            cells.extend(s.values.iter().map(|col| format_number(col[row])));
            cells.extend(s.defects.iter().map(|&d| format_number(d)));
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
    }
    out
}

fn distinct_occupations(table: &Table) -> Vec<&[u32]> {
    let mut seen: Vec<&[u32]> = Vec::new();
    for s in &table.series {
        if !seen.contains(&s.occupations.as_slice()) {
            seen.push(&s.occupations);
        }
    }
    seen
}

/// JSON document with the same numbers as the CSV.
pub fn json(scenario: &Scenario, source: &str, table: &Table) -> String {
    let config = json!({
        "lattice": scenario.half_modes,
        "steps": scenario.steps,
        "occupations": scenario.occupations.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "species": scenario.species.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        "observables": scenario.observables.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "engine": scenario.engine.as_str(),
    });
    let tagged = table.series.len() > 1;
    let series: Vec<Value> = table
        .series
        .iter()
        .enumerate()
        .map(|(idx, s)| {
            json!({
                "index": idx,
                "steps": s.steps,
                "particles": s.particles,
                "observable": s.observable.to_string(),
                "occupations": s.occupations,
                "pairs_used": s.pairs.iter().map(|p| p.map(|(u, _)| u)).collect::<Vec<_>>(),
                "pairs_total": s.pairs.iter().map(|p| p.map(|(_, t)| t)).collect::<Vec<_>>(),
                "description": describe(idx, s),
            })
        })
        .collect();
    let mut rows = Vec::new();
    for (idx, s) in table.series.iter().enumerate() {
        for (row, index) in s.index.iter().enumerate() {
            let mut cells: Vec<Value> = Vec::new();
            if tagged {
                cells.push(json!(idx));
            }
            cells.extend(index.iter().map(|&v| json!(v)));
            cells.extend(s.values.iter().map(|col| json!(col[row])));
            cells.extend(s.defects.iter().map(|&d| json!(d)));
            rows.push(Value::Array(cells));
        }
    }
    let doc = json!({
        "generator": GENERATOR,
        "source": source,
        "modes": scenario.modes(),
        "config": config,
        "columns": table.columns(),
        "series": series,
        "rows": rows,
    });
    let mut text = doc.to_string();
    text.push('\n');
    text
}

/// gnuplot script plotting the CSV at `data_path`.
pub fn gnuplot(table: &Table, data_path: &str) -> String {
    let mut out = String::new();
    writeln!(out, "# {GENERATOR} plot script").unwrap();
    writeln!(out, "set datafile separator \",\"").unwrap();
    writeln!(out, "set key autotitle columnhead").unwrap();
    writeln!(out, "data = \"{}\"", data_path.replace('"', "\\\"")).unwrap();
    let tagged = table.series.len() > 1;
    let (x, ylabel) = match table.series[0].observable {
        Observable::MeanProfile => ("mode", "mean occupation"),
        Observable::SingleMode(_) => ("k", "P(k)"),
        Observable::TwoMode(..) => ("k_i", "P(k_i, k_j)"),
        Observable::Conditional { .. } | Observable::PairAveraged { .. } => ("dk", "P(dk)"),
    };
    let value_columns: Vec<String> =
        table.species.iter().map(|s| format!("{}_{}", table.value_prefix, s.short())).collect();
    if matches!(table.series[0].observable, Observable::TwoMode(..)) {
        writeln!(out, "set view map").unwrap();
        writeln!(out, "set xlabel \"k_i\"\nset ylabel \"k_j\"").unwrap();
        writeln!(out, "set multiplot layout {},{}", table.series.len(), value_columns.len()).unwrap();
        for (idx, s) in table.series.iter().enumerate() {
            for col in &value_columns {
                let x = if tagged { format!("(column(\"series\") == {idx} ? column(\"k_i\") : NaN)") } else { "\"k_i\"".into() };
                writeln!(out, "set title \"{col}, {}\"", s.observable).unwrap();
                writeln!(out, "splot data using {x}:\"k_j\":\"{col}\" with points pointtype 5 palette notitle").unwrap();
            }
        }
        writeln!(out, "unset multiplot").unwrap();
        return out;
    }
    writeln!(out, "set xlabel \"{x}\"\nset ylabel \"{ylabel}\"").unwrap();
    if matches!(table.series[0].observable, Observable::SingleMode(_)) {
        writeln!(out, "set logscale y").unwrap();
    }
    let mut curves = Vec::new();
    for (idx, s) in table.series.iter().enumerate() {
        for col in &value_columns {
            let xs = if tagged { format!("(column(\"series\") == {idx} ? column(\"{x}\") : NaN)") } else { format!("\"{x}\"") };
            let title = if tagged { format!("{col}, steps={} N={} {}", s.steps, s.particles, s.observable) } else { col.clone() };
            curves.push(format!("data using {xs}:\"{col}\" with linespoints title \"{title}\""));
        }
    }
    writeln!(out, "plot {}", curves.join(", \\\n     ")).unwrap();
    out
}
