//! Deterministic file emission. All floats go through one formatting rule
//! so identical runs produce identical bytes and parsed CSVs re-serialize
//! to the same text.

use std::path::Path;

use mestbench_core::harness::{
    aggregate_form, aggregate_link_form, EmpiricalResult, MethodTag, StudyResult,
};
use mestbench_core::metrics::{fmt_value, MetricReport};

use crate::CliError;

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn csv_line(cells: &[String]) -> String {
    cells.join(",")
}

/// Tables 1-2 layout: one row per (link, form), one column per method.
pub fn sim_table_by_link_form(
    result: &StudyResult,
    methods: &[MethodTag],
    extract: &dyn Fn(&MetricReport) -> Option<f64>,
) -> String {
    let mut out = String::new();
    let mut head = vec!["link".to_string(), "form".to_string()];
    head.extend(methods.iter().map(|m| m.key().to_string()));
    out.push_str(&csv_line(&head));
    out.push('\n');
    let groups = aggregate_link_form(&result.rows, methods, &|row| {
        row.metrics.as_ref().and_then(extract)
    });
    for (link, form, cols) in groups {
        let mut cells = vec![link.name().to_string(), form.name().to_string()];
        cells.extend(cols.into_iter().map(fmt_value));
        out.push_str(&csv_line(&cells));
        out.push('\n');
    }
    out
}

/// Table 3 layout: one row per form.
pub fn sim_table_by_form(
    result: &StudyResult,
    methods: &[MethodTag],
    extract: &dyn Fn(&MetricReport) -> Option<f64>,
) -> String {
    let mut out = String::new();
    let mut head = vec!["form".to_string()];
    head.extend(methods.iter().map(|m| m.key().to_string()));
    out.push_str(&csv_line(&head));
    out.push('\n');
    for (form, cols) in
        aggregate_form(&result.rows, methods, &|row| row.metrics.as_ref().and_then(extract))
    {
        let mut cells = vec![form.name().to_string()];
        cells.extend(cols.into_iter().map(fmt_value));
        out.push_str(&csv_line(&cells));
        out.push('\n');
    }
    out
}

/// Plain-text provenance manifest. The `generated_at_unix` line is the one
/// byte-varying line between identical runs.
pub fn manifest(result: &StudyResult, workers: usize) -> String {
    let p = &result.provenance;
    let mut out = String::from("# mestbench simulation manifest\n");
    out.push_str(&format!("version = {}\n", p.version));
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    out.push_str(&format!("generated_at_unix = {stamp}\n"));
    out.push_str(&format!("master_seed = {}\n", p.master_seed));
    for (key, value) in &p.grid_lines {
        out.push_str(&format!("{key} = {value}\n"));
    }
    out.push_str(&format!("replications = {}\n", p.replications));
    out.push_str(&format!(
        "methods = {}\n",
        p.methods.iter().map(|m| m.key()).collect::<Vec<_>>().join(", ")
    ));
    out.push_str(&format!("cells = {}\n", p.cell_count));
    out.push_str(&format!("workers = {workers}\n"));
    out.push_str(
        "seed_scheme = chacha8(splitmix64 chain over master seed, cell content, replication, method slot)\n",
    );
    let failures: usize = result.rows.iter().map(|r| r.failures).sum();
    out.push_str(&format!("failures = {failures}\n"));
    out
}

/// Long-format benchmark table: dataset, method, train, test.
pub fn bench_table(
    result: &EmpiricalResult,
    extract_train: &dyn Fn(&MetricReport) -> Option<f64>,
    extract_test: &dyn Fn(&MetricReport) -> Option<f64>,
    restrict_proposed: bool,
) -> String {
    let mut out = String::from("dataset,method,train,test\n");
    for row in &result.rows {
        if restrict_proposed && !row.method.is_proposed() {
            continue;
        }
        let (train, test) = match &row.metrics {
            Some(m) => (extract_train(m), extract_test(m)),
            None => (None, None),
        };
        out.push_str(&csv_line(&[
            row.dataset.clone(),
            row.method.key().to_string(),
            fmt_value(train),
            fmt_value(test),
        ]));
        out.push('\n');
    }
    out
}

/// Combined parameter table with significance stars.
pub fn params_table(result: &EmpiricalResult) -> String {
    let mut out = String::from("dataset,method,parameter,estimate,ci_low,ci_high,stars\n");
    for p in &result.params {
        out.push_str(&csv_line(&[
            p.dataset.clone(),
            p.method.key().to_string(),
            p.parameter.clone(),
            fmt_value(Some(p.estimate)),
            fmt_value(Some(p.ci_low)),
            fmt_value(Some(p.ci_high)),
            if p.starred { "**".to_string() } else { String::new() },
        ]));
        out.push('\n');
    }
    out
}

/// Simulation extractors matching the three table files.
pub fn coverage_pct(m: &MetricReport) -> Option<f64> {
    m.coverage.map(|c| 100.0 * c)
}

pub fn ci_width(m: &MetricReport) -> Option<f64> {
    Some(m.ci_width_mean)
}

pub fn ars_train(m: &MetricReport) -> Option<f64> {
    Some(m.ars_train)
}

/// Pretty-print a CSV as an aligned text table.
pub fn render_csv_table(content: &str) -> String {
    let rows: Vec<Vec<&str>> = content.lines().map(|l| l.split(',').collect()).collect();
    if rows.is_empty() {
        return String::new();
    }
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for (r, row) in rows.iter().enumerate() {
        let line: Vec<String> =
            row.iter().enumerate().map(|(i, c)| format!("{c:>width$}", width = widths[i])).collect();
        out.push_str(&line.join("  "));
        out.push('\n');
        if r == 0 {
            out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (cols - 1)));
            out.push('\n');
        }
    }
    out
}

/// Names used by `simulate` outputs, shared with the report command.
pub const SIM_FILES: [&str; 3] = ["sim_coverage.csv", "sim_ciwidth.csv", "sim_ars.csv"];
/// Names used by `benchmark` outputs.
pub const BENCH_FILES: [&str; 4] =
    ["bench_ars.csv", "bench_aic.csv", "bench_auc.csv", "bench_params.csv"];
