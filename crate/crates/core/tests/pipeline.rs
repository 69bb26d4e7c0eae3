//! Cross-module integration: ingestion feeding the benchmark runner, and
//! worker-count invariance of the study harness.

use std::io::Write;
use std::path::{Path, PathBuf};

use mestbench_core::baselines::GibbsSettings;
use mestbench_core::dgp::{SimForm, SimLink};
use mestbench_core::harness::{run_empirical, run_sim_study, EstimatorSettings, MethodTag, StudyGrid};
use mestbench_core::ingest::{DatasetRecipe, SplitRule};
use mestbench_core::proposed::LahemlSettings;

fn fast_settings() -> EstimatorSettings {
    EstimatorSettings {
        laheml: LahemlSettings { iterations: 300, burn_in: 150, penalty_tau: 1.0, ..LahemlSettings::default() },
        gibbs: GibbsSettings { iterations: 400, burn_in: 200, ..GibbsSettings::default() },
        ridge: 1.0,
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

/// Synthetic shuttle-shaped data: distress concentrates at low temperature
/// with overlapping classes in the training block.
fn synthetic_challenger() -> String {
    let rows = [
        (1, 53.0, 50.0),
        (1, 57.0, 50.0),
        (1, 58.0, 100.0),
        (1, 63.0, 200.0),
        (0, 66.0, 50.0),
        (0, 67.0, 100.0),
        (1, 67.0, 200.0),
        (0, 68.0, 100.0),
        (0, 69.0, 200.0),
        (0, 70.0, 100.0),
        (1, 70.0, 100.0),
        (0, 72.0, 200.0),
        (0, 73.0, 100.0),
        (0, 75.0, 50.0),
        (1, 75.0, 50.0),
        (0, 76.0, 100.0),
        (0, 78.0, 200.0),
        (0, 79.0, 100.0),
        // test block: far from the boundary
        (1, 40.0, 100.0),
        (1, 45.0, 200.0),
        (0, 80.0, 100.0),
        (0, 81.0, 200.0),
        (0, 83.0, 50.0),
    ];
    let mut out = String::from("stress,temperature,pressure\n");
    for (s, t, p) in rows {
        out.push_str(&format!("{s},{t},{p}\n"));
    }
    out
}

#[test]
fn ingest_feeds_the_empirical_runner() {
    let dir = tempfile::tempdir().unwrap();
    write_file(dir.path(), "challenger.csv", &synthetic_challenger());
    let recipe = DatasetRecipe::builtin("challenger", dir.path()).unwrap();
    assert_eq!(recipe.split, SplitRule::FirstK(18));
    let dataset = recipe.load().unwrap();
    let methods = [MethodTag::MleLogistic, MethodTag::UnifiedNonparametric];
    let result = run_empirical(&dataset, "challenger", &methods, &fast_settings(), 5);
    assert_eq!(result.rows.len(), 2);
    for row in &result.rows {
        let m = row.metrics.as_ref().unwrap_or_else(|| panic!("{:?} failed", row.method));
        assert!(m.ars_test.is_some());
        assert!(m.aic_test.unwrap() >= 0.0);
    }
    // Three named parameters per successful method.
    assert_eq!(result.params.len(), 6);
    assert!(result.params.iter().any(|p| p.parameter == "temperature"));
}

/// The harness gives identical rows regardless of worker count.
#[test]
fn study_rows_do_not_depend_on_worker_count() {
    let grid = StudyGrid {
        links: vec![SimLink::Logit, SimLink::Cloglog],
        forms: vec![SimForm::Linear],
        sizes: vec![80],
        balances: vec![0.3, 0.5],
        replications: 1,
        methods: vec![MethodTag::MleLogistic, MethodTag::Nonparametric],
        master_seed: 99,
    };
    let est = fast_settings();
    let serial = run_sim_study(&grid, &est, 1).unwrap();
    let parallel = run_sim_study(&grid, &est, 4).unwrap();
    assert_eq!(serial.rows.len(), parallel.rows.len());
    for (a, b) in serial.rows.iter().zip(parallel.rows.iter()) {
        assert_eq!(a.method, b.method);
        assert_eq!(a.n, b.n);
        assert_eq!(a.balance, b.balance);
        let (ma, mb) = (a.metrics.as_ref().unwrap(), b.metrics.as_ref().unwrap());
        assert_eq!(ma.ars_train, mb.ars_train);
        assert_eq!(ma.aic_train, mb.aic_train);
        assert_eq!(ma.ci_width_mean, mb.ci_width_mean);
    }
}

/// Simulated datasets can round-trip through the ingestion CSV schema.
#[test]
fn simulated_data_exports_to_the_csv_schema() {
    use mestbench_core::dgp::{generate, SimConfig};
    let sim = generate(&SimConfig::new(50, SimForm::Linear, SimLink::Logit, 0.5, 3).unwrap())
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    // Export the standardized design columns as covariates.
    let mut csv = String::from("label,x1,x2\n");
    for i in 0..sim.dataset.n() {
        csv.push_str(&format!(
            "{},{},{}\n",
            sim.dataset.y[i], sim.dataset.design[[i, 1]], sim.dataset.design[[i, 2]]
        ));
    }
    write_file(dir.path(), "sim.csv", &csv);
    let recipe_text = "\
name = simexport
source = sim.csv
outcome = label
columns = x1:identity, x2:identity
split = fraction:0.8
";
    let recipe_path = write_file(dir.path(), "sim.recipe", recipe_text);
    let recipe = DatasetRecipe::from_file(&recipe_path, dir.path()).unwrap();
    let loaded = recipe.load().unwrap();
    assert_eq!(loaded.n(), 50);
    assert_eq!(loaded.y, sim.dataset.y);
}
