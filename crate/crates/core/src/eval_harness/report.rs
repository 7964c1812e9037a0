use std::path::Path;

use serde::Deserialize;

use super::HarnessError;
use crate::topo_metrics::MetricReport;

const HEADER: [&str; 6] = ["label", "DET_l", "DET_t", "TOP_ll", "TOP_lt", "OLS"];

#[derive(Copy, Clone, PartialEq, Debug)]
enum Mark {
    None,
    Best,
    Second,
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

/// Markdown table of the given rows, values at four decimals.
pub fn render_table(reports: &[MetricReport]) -> String {
    render(reports, false)
}

/// Like [`render_table`], with the best value per column in bold and the
/// runner-up underlined. Comparison is on the printed values, so printed ties
/// share a mark. A single row is left unmarked.
pub fn render_table_flagged(reports: &[MetricReport]) -> String {
    render(reports, true)
}

fn render(reports: &[MetricReport], flag: bool) -> String {
    let cells: Vec<[String; 5]> = reports.iter().map(|r| r.values().map(fmt4)).collect();
    let marks = if flag && reports.len() > 1 {
        column_marks(&cells)
    } else {
        vec![[Mark::None; 5]; reports.len()]
    };
    let mut out = format!("| {} |\n", HEADER.join(" | "));
    out.push_str("|---|---:|---:|---:|---:|---:|\n");
    for ((report, row), marks) in reports.iter().zip(&cells).zip(&marks) {
        out.push_str("| ");
        out.push_str(&report.label);
        for (cell, mark) in row.iter().zip(marks) {
            out.push_str(" | ");
            match mark {
                Mark::None => out.push_str(cell),
                Mark::Best => out.push_str(&format!("**{cell}**")),
                Mark::Second => out.push_str(&format!("<u>{cell}</u>")),
            }
        }
        out.push_str(" |\n");
    }
    out
}

fn column_marks(cells: &[[String; 5]]) -> Vec<[Mark; 5]> {
    let mut marks = vec![[Mark::None; 5]; cells.len()];
    for col in 0..5 {
        // Printed values at fixed precision order the same as the numbers.
        let values: Vec<f64> = cells.iter().map(|r| r[col].parse().expect("formatted float")).collect();
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let second = values
            .iter()
            .copied()
            .filter(|&v| v < best)
            .fold(f64::NEG_INFINITY, f64::max);
        for (row, &v) in values.iter().enumerate() {
            if v == best {
                marks[row][col] = Mark::Best;
            } else if v == second {
                marks[row][col] = Mark::Second;
            }
        }
    }
    marks
}

/// Reads a report file holding either one report or an array of them.
pub fn read_reports(path: &Path) -> Result<Vec<MetricReport>, HarnessError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(Box<MetricReport>),
        Many(Vec<MetricReport>),
    }
    let text = super::files::read_to_string(path)?;
    let schema = |reason: String| HarnessError::Schema {
        path: path.to_path_buf(),
        reason,
    };
    let reports = match serde_json::from_str(&text).map_err(|e| schema(e.to_string()))? {
        OneOrMany::One(r) => vec![*r],
        OneOrMany::Many(v) => v,
    };
    for r in &reports {
        r.check_consistency().map_err(|e| schema(format!("{}: {e}", r.label)))?;
    }
    Ok(reports)
}
