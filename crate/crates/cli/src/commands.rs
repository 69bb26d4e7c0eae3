//! The five subcommands: simulate, fit, benchmark, rum, report.

use std::path::{Path, PathBuf};

use mestbench_core::harness::{self, EmpiricalResult, MethodTag};
use mestbench_core::ingest::DatasetRecipe;
use mestbench_core::metrics::MetricReport;
use mestbench_core::model::Dataset;
use mestbench_core::rum;

use crate::config::ConfigFile;
use crate::output::{self, write_file};
use crate::svg;
use crate::CliError;

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", out.display())))
}

fn load_dataset(recipe: &DatasetRecipe) -> Result<Dataset, CliError> {
    recipe
        .load()
        .map_err(|e| CliError::Data(format!("dataset {}: {e}", recipe.name)))
}

/// Run the simulation grid and emit the three study tables plus manifest.
pub fn cmd_simulate(
    config: &ConfigFile,
    out: &Path,
    workers: usize,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let grid = config.study_grid(seed)?;
    let est = config.estimator_settings()?;
    ensure_out_dir(out)?;
    let result = harness::run_sim_study(&grid, &est, workers)
        .map_err(|e| CliError::Fit(e.to_string()))?;

    let methods = &grid.methods;
    write_file(
        &out.join("sim_coverage.csv"),
        &output::sim_table_by_link_form(&result, methods, &output::coverage_pct),
    )?;
    write_file(
        &out.join("sim_ciwidth.csv"),
        &output::sim_table_by_link_form(&result, methods, &output::ci_width),
    )?;
    write_file(
        &out.join("sim_ars.csv"),
        &output::sim_table_by_form(&result, methods, &output::ars_train),
    )?;
    write_file(&out.join("manifest.txt"), &output::manifest(&result, workers))?;
    println!(
        "simulate: {} cells x {} methods -> {}",
        result.provenance.cell_count,
        methods.len(),
        out.display()
    );
    Ok(())
}

/// Fit one method on one dataset; emit draws, plots, metrics, parameters.
pub fn cmd_fit(
    config: &ConfigFile,
    out: &Path,
    data_dir: &Path,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let recipe = config.dataset_recipe("fit", data_dir)?;
    let method = config.fit_method("fit")?;
    let est = config.estimator_settings()?;
    let seed = config.seed("fit", seed)?;
    let dataset = load_dataset(&recipe)?;
    ensure_out_dir(out)?;

    let (fit, p_params) = harness::fit_method(method, &dataset, &est, seed)
        .map_err(CliError::Fit)?;

    // Draws CSV: iteration column then one column per parameter.
    let mut draws_csv = String::from("iter,");
    draws_csv.push_str(&fit.names.join(","));
    draws_csv.push('\n');
    for i in 0..fit.draws.nrows() {
        draws_csv.push_str(&i.to_string());
        for j in 0..fit.draws.ncols() {
            draws_csv.push_str(&format!(",{:.6}", fit.draws[[i, j]]));
        }
        draws_csv.push('\n');
    }
    write_file(&out.join("draws.csv"), &draws_csv)?;

    let title = format!("{} on {}: retained draws", method.display(), recipe.name);
    write_file(&out.join("trace.svg"), &svg::trace_plot(&fit.names, &fit.draws, &title))?;
    for (j, name) in fit.names.iter().enumerate() {
        let values: Vec<f64> = fit.draws.column(j).to_vec();
        let title = format!("{} on {}: {}", method.display(), recipe.name, name);
        write_file(
            &out.join(format!("hist_{}.svg", sanitize(name))),
            &svg::histogram(name, &values, &title),
        )?;
    }

    let report = harness::score_fit(&dataset, &fit, p_params, None);
    let mut metrics_csv = String::from(MetricReport::csv_header());
    metrics_csv.push('\n');
    metrics_csv.push_str(&report.to_csv_row(&recipe.name, method.key()));
    metrics_csv.push('\n');
    write_file(&out.join("metrics.csv"), &metrics_csv)?;

    let empirical = EmpiricalResult {
        rows: Vec::new(),
        params: (0..dataset.n_params())
            .map(|j| harness::ParamRow {
                dataset: recipe.name.clone(),
                method,
                parameter: fit.names[j].clone(),
                estimate: fit.point[j],
                ci_low: fit.ci_low[j],
                ci_high: fit.ci_high[j],
                starred: fit.starred(j),
            })
            .collect(),
    };
    write_file(&out.join("params.csv"), &output::params_table(&empirical))?;
    println!(
        "fit: {} on {} ({} retained draws, acceptance {:.3}) -> {}",
        method.display(),
        recipe.name,
        fit.draws.nrows(),
        fit.diagnostics.acceptance_rate,
        out.display()
    );
    if fit.diagnostics.adaptation_failure {
        eprintln!(
            "warning: post-burn-in acceptance rate {:.3} outside [0.05, 0.6]",
            fit.diagnostics.acceptance_rate
        );
    }
    Ok(())
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_alphanumeric() { c } else { '_' }).collect()
}

/// Benchmark all configured methods on all configured datasets.
pub fn cmd_benchmark(
    config: &ConfigFile,
    out: &Path,
    data_dir: &Path,
    seed: Option<u64>,
    auc_proposed_only_flag: bool,
) -> Result<(), CliError> {
    let recipes = config.benchmark_recipes(data_dir)?;
    let methods = if config.has_key("benchmark", "methods") {
        config.methods("benchmark", "methods")?
    } else {
        MethodTag::ALL.to_vec()
    };
    let est = config.estimator_settings()?;
    let master_seed = config.seed("benchmark", seed)?;
    let auc_proposed_only =
        auc_proposed_only_flag || config.flag("benchmark", "auc_proposed_only", false)?;
    ensure_out_dir(out)?;

    let mut combined = EmpiricalResult::default();
    for recipe in &recipes {
        let dataset = load_dataset(recipe)?;
        let result =
            harness::run_empirical(&dataset, &recipe.name, &methods, &est, master_seed);
        for row in &result.rows {
            if let Some(err) = &row.error {
                eprintln!("note: {} on {}: {err} (recorded as NA)", row.method.key(), recipe.name);
            }
        }
        combined.rows.extend(result.rows);
        combined.params.extend(result.params);
    }

    write_file(
        &out.join("bench_ars.csv"),
        &output::bench_table(&combined, &|m| Some(m.ars_train), &|m| m.ars_test, false),
    )?;
    write_file(
        &out.join("bench_aic.csv"),
        &output::bench_table(&combined, &|m| Some(m.aic_train), &|m| m.aic_test, false),
    )?;
    write_file(
        &out.join("bench_auc.csv"),
        &output::bench_table(&combined, &|m| m.auc_train, &|m| m.auc_test, auc_proposed_only),
    )?;
    write_file(&out.join("bench_params.csv"), &output::params_table(&combined))?;
    println!(
        "benchmark: {} datasets x {} methods -> {}",
        recipes.len(),
        methods.len(),
        out.display()
    );
    Ok(())
}

/// Fit one method, then rank individuals by fitted utility.
pub fn cmd_rum(
    config: &ConfigFile,
    out: &Path,
    data_dir: &Path,
    seed: Option<u64>,
    top_k: usize,
) -> Result<(), CliError> {
    let recipe = config.dataset_recipe("rum", data_dir)?;
    let method = config.fit_method("rum")?;
    let est = config.estimator_settings()?;
    let seed = config.seed("rum", seed)?;
    let top_k = config.optional_usize("rum", "top_k", top_k)?;
    let dataset = load_dataset(&recipe)?;
    ensure_out_dir(out)?;

    let (fit, _) = harness::fit_method(method, &dataset, &est, seed).map_err(CliError::Fit)?;
    let report = rum::utilities(&dataset, &fit)
        .map_err(|e| CliError::Fit(e.to_string()))?;
    let mut csv = String::from(rum::UtilityReport::csv_header());
    csv.push('\n');
    for row in report.to_csv_rows() {
        csv.push_str(&row);
        csv.push('\n');
    }
    write_file(&out.join("utilities.csv"), &csv)?;

    let ranked = rum::rank_alternatives(&report, top_k);
    println!("rum: top {} of {} individuals by fitted utility (baseline utility 0):", ranked.len(), report.u1.len());
    for (rank, &idx) in ranked.iter().enumerate() {
        let pos = report.indices.iter().position(|&i| i == idx).expect("ranked index exists");
        println!(
            "  {:>3}. row {:>6}  u1 = {:>10.6}  p = {:.4}",
            rank + 1,
            idx,
            report.u1[pos],
            report.choice_prob[pos]
        );
    }
    Ok(())
}

/// Pretty-print whichever result tables exist in a directory.
pub fn cmd_report(dir: &Path) -> Result<(), CliError> {
    let mut found = false;
    for name in output::SIM_FILES.iter().chain(output::BENCH_FILES.iter()) {
        let path: PathBuf = dir.join(name);
        if let Ok(content) = std::fs::read_to_string(&path) {
            found = true;
            println!("== {name} ==");
            print!("{}", output::render_csv_table(&content));
            println!();
        }
    }
    if !found {
        return Err(CliError::Data(format!(
            "no result tables found in {}",
            dir.display()
        )));
    }
    Ok(())
}
