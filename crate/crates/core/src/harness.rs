//! Study orchestration: the simulation grid and the empirical benchmark.
//!
//! Cells are independent work units. Every random stream is derived from
//! the master seed, the cell's content, the replication number, and the
//! method identity, so adding or removing methods never disturbs other
//! methods' results, and reruns are bit-identical.

use ndarray::{s, Array1};
use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::{
    fit_bayes_probit, fit_mle_logistic, fit_penalized_logistic, GibbsSettings, IrlsSettings,
};
use crate::dgp::{generate, SimConfig, SimForm, SimLink};
use crate::metrics::{self, MetricReport};
use crate::model::{Dataset, FitResult};
use crate::proposed::{fit_laheml, LahemlSettings, MethodKind};
use crate::seed::{derive_seed, pack_stream};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Every estimation method the benchmark compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MethodTag {
    Nonparametric,
    UnifiedNonparametric,
    PenalizedNonparametric,
    UnifiedPenalized,
    Parametric,
    BayesProbit,
    MleLogistic,
    PenalizedLogistic,
}

impl MethodTag {
    pub const ALL: [MethodTag; 8] = [
        MethodTag::Nonparametric,
        MethodTag::UnifiedNonparametric,
        MethodTag::PenalizedNonparametric,
        MethodTag::UnifiedPenalized,
        MethodTag::Parametric,
        MethodTag::BayesProbit,
        MethodTag::MleLogistic,
        MethodTag::PenalizedLogistic,
    ];

    /// Stable identity used in seed derivation; never reorder.
    pub fn slot(self) -> u8 {
        match self {
            MethodTag::Nonparametric => 0,
            MethodTag::UnifiedNonparametric => 1,
            MethodTag::PenalizedNonparametric => 2,
            MethodTag::UnifiedPenalized => 3,
            MethodTag::Parametric => 4,
            MethodTag::BayesProbit => 5,
            MethodTag::MleLogistic => 6,
            MethodTag::PenalizedLogistic => 7,
        }
    }

    /// Key used in config files and CSV headers.
    pub fn key(self) -> &'static str {
        match self {
            MethodTag::Nonparametric => "nonparametric",
            MethodTag::UnifiedNonparametric => "unified_nonparametric",
            MethodTag::PenalizedNonparametric => "penalized_nonparametric",
            MethodTag::UnifiedPenalized => "unified_penalized",
            MethodTag::Parametric => "parametric",
            MethodTag::BayesProbit => "bayes_probit",
            MethodTag::MleLogistic => "mle_logistic",
            MethodTag::PenalizedLogistic => "penalized_logistic",
        }
    }

    /// Human-readable name used in printed tables.
    pub fn display(self) -> &'static str {
        match self {
            MethodTag::Nonparametric => "Nonparametric",
            MethodTag::UnifiedNonparametric => "Unified Nonparametric",
            MethodTag::PenalizedNonparametric => "Penalized Nonparametric",
            MethodTag::UnifiedPenalized => "Unified Penalized",
            MethodTag::Parametric => "Parametric",
            MethodTag::BayesProbit => "Existing Bayes",
            MethodTag::MleLogistic => "MLE Logistic",
            MethodTag::PenalizedLogistic => "Penalized Logistic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        MethodTag::ALL.into_iter().find(|m| m.key() == s.trim())
    }

    /// The four sampler-based nonparametric/unified methods (the AUC table
    /// scope).
    pub fn is_proposed(self) -> bool {
        matches!(
            self,
            MethodTag::Nonparametric
                | MethodTag::UnifiedNonparametric
                | MethodTag::PenalizedNonparametric
                | MethodTag::UnifiedPenalized
        )
    }
}

/// Settings bundle shared by every method in a run.
#[derive(Debug, Clone)]
pub struct EstimatorSettings {
    pub laheml: LahemlSettings,
    pub gibbs: GibbsSettings,
    /// Ridge weight for the penalized logistic baseline.
    pub ridge: f64,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            laheml: LahemlSettings { penalty_tau: 1.0, ..LahemlSettings::default() },
            gibbs: GibbsSettings::default(),
            ridge: 1.0,
        }
    }
}

/// Fit one method on a dataset. Errors come back as strings so a sweep can
/// record them and continue.
pub fn fit_method(
    tag: MethodTag,
    dataset: &Dataset,
    est: &EstimatorSettings,
    seed: u64,
) -> Result<(FitResult, usize), String> {
    let p = dataset.n_params();
    let laheml = |kind: MethodKind| {
        let settings = LahemlSettings { seed, ..est.laheml.clone() };
        fit_laheml(dataset, kind, &settings)
            .map(|fit| (fit, p + kind.n_alpha()))
            .map_err(|e| e.to_string())
    };
    match tag {
        MethodTag::Nonparametric => laheml(MethodKind::Nonparametric),
        MethodTag::UnifiedNonparametric => laheml(MethodKind::Unified),
        MethodTag::PenalizedNonparametric => laheml(MethodKind::NonparametricPenalized),
        MethodTag::UnifiedPenalized => laheml(MethodKind::UnifiedPenalized),
        MethodTag::Parametric => laheml(MethodKind::Parametric),
        MethodTag::BayesProbit => {
            let settings = GibbsSettings { seed, ..est.gibbs.clone() };
            fit_bayes_probit(dataset, &settings).map(|fit| (fit, p)).map_err(|e| e.to_string())
        }
        MethodTag::MleLogistic => fit_mle_logistic(dataset, &IrlsSettings::default())
            .map(|fit| (fit, p))
            .map_err(|e| e.to_string()),
        MethodTag::PenalizedLogistic => {
            fit_penalized_logistic(dataset, &IrlsSettings::with_ridge(est.ridge))
                .map(|fit| (fit, p))
                .map_err(|e| e.to_string())
        }
    }
}

/// Score a fit on its dataset: classification, fit, and (when the truth is
/// known) interval metrics. The AIC uses the original-data Bernoulli
/// likelihood at the fitted point. Interval metrics cover the coefficient
/// block only.
pub fn score_fit(
    dataset: &Dataset,
    fit: &FitResult,
    p_params: usize,
    beta_true: Option<&Array1<f64>>,
) -> MetricReport {
    let p = dataset.n_params();
    let y_train = dataset.y_at(&dataset.train_idx);
    let ars_train = metrics::ars(y_train.view(), fit.probs_train.view()).unwrap_or(f64::NAN);
    let ll_train = metrics::bernoulli_loglik(y_train.view(), fit.probs_train.view());
    let aic_train = metrics::aic_norm(ll_train, p_params, dataset.train_idx.len());
    let auc_train = metrics::auc(y_train.view(), fit.probs_train.view()).ok();

    let (ars_test, aic_test, auc_test) = if dataset.test_idx.is_empty() {
        (None, None, None)
    } else {
        let y_test = dataset.y_at(&dataset.test_idx);
        let ars = metrics::ars(y_test.view(), fit.probs_test.view()).ok();
        let ll = metrics::bernoulli_loglik(y_test.view(), fit.probs_test.view());
        let aic = Some(metrics::aic_norm(ll, p_params, dataset.test_idx.len()));
        let auc = metrics::auc(y_test.view(), fit.probs_test.view()).ok();
        (ars, aic, auc)
    };

    let lo = fit.ci_low.slice(s![..p]);
    let hi = fit.ci_high.slice(s![..p]);
    let coverage = beta_true
        .and_then(|truth| metrics::coverage(lo, hi, truth.view()).ok());
    let ci_width_mean = metrics::ci_width(lo, hi).unwrap_or(f64::NAN);

    MetricReport {
        ars_train,
        ars_test,
        aic_train,
        aic_test,
        auc_train,
        auc_test,
        coverage,
        ci_width_mean,
    }
}

/// The simulation study grid.
#[derive(Debug, Clone)]
pub struct StudyGrid {
    pub links: Vec<SimLink>,
    pub forms: Vec<SimForm>,
    pub sizes: Vec<usize>,
    pub balances: Vec<f64>,
    pub replications: usize,
    pub methods: Vec<MethodTag>,
    pub master_seed: u64,
}

impl StudyGrid {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.links.is_empty()
            || self.forms.is_empty()
            || self.sizes.is_empty()
            || self.balances.is_empty()
            || self.methods.is_empty()
        {
            return Err(HarnessError::InvalidGrid(
                "links, forms, sizes, balances, and methods must be nonempty".into(),
            ));
        }
        if self.replications == 0 {
            return Err(HarnessError::InvalidGrid("replications must be at least 1".into()));
        }
        for &b in &self.balances {
            if !(b > 0.0 && b <= 0.5) {
                return Err(HarnessError::InvalidGrid(format!(
                    "balance must lie in (0, 0.5], got {b}"
                )));
            }
        }
        for &n in &self.sizes {
            if n < 10 {
                return Err(HarnessError::InvalidGrid(format!("size must be at least 10, got {n}")));
            }
        }
        Ok(())
    }

    /// Cells in canonical order (link, form, size, balance).
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &link in &self.links {
            for &form in &self.forms {
                for &n in &self.sizes {
                    for &balance in &self.balances {
                        cells.push(Cell { link, form, n, balance });
                    }
                }
            }
        }
        cells.sort_by_key(Cell::sort_key);
        cells.dedup_by_key(|c| c.sort_key());
        cells
    }
}

/// One simulation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub link: SimLink,
    pub form: SimForm,
    pub n: usize,
    pub balance: f64,
}

impl Cell {
    fn sort_key(&self) -> (u8, u8, usize, u64) {
        (
            self.link as u8,
            self.form as u8,
            self.n,
            (self.balance * 1000.0).round() as u64,
        )
    }

    /// Content-derived code feeding seed derivation; independent of the
    /// order the grid lists were written in.
    fn code(&self) -> u64 {
        let (link, form, n, bal) = self.sort_key();
        (bal << 34) | ((n as u64) << 4) | ((form as u64) << 2) | link as u64
    }
}

/// One aggregated record per (cell, method).
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub link: SimLink,
    pub form: SimForm,
    pub n: usize,
    pub balance: f64,
    pub method: MethodTag,
    pub replications: usize,
    pub failures: usize,
    /// Mean metrics over successful replications; `None` when all failed.
    pub metrics: Option<MetricReport>,
    /// Last failure message, when any replication failed.
    pub failure: Option<String>,
}

/// Run provenance: everything needed to reproduce the result rows.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub master_seed: u64,
    pub version: String,
    pub cell_count: usize,
    pub replications: usize,
    pub methods: Vec<MethodTag>,
    pub grid_lines: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    pub provenance: Provenance,
}

/// Run the simulation study over `workers` threads.
pub fn run_sim_study(
    grid: &StudyGrid,
    est: &EstimatorSettings,
    workers: usize,
) -> Result<StudyResult, HarnessError> {
    grid.validate()?;
    let cells = grid.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;

    let mut rows: Vec<StudyRow> = pool.install(|| {
        cells
            .par_iter()
            .flat_map_iter(|cell| run_cell(cell, grid, est))
            .collect()
    });
    rows.sort_by_key(|r| {
        (
            Cell { link: r.link, form: r.form, n: r.n, balance: r.balance }.sort_key(),
            r.method.slot(),
        )
    });

    let provenance = Provenance {
        master_seed: grid.master_seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        cell_count: cells.len(),
        replications: grid.replications,
        methods: grid.methods.clone(),
        grid_lines: vec![
            ("links".into(), join(&grid.links, SimLink::name)),
            ("forms".into(), join(&grid.forms, SimForm::name)),
            ("sizes".into(), grid.sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")),
            (
                "balances".into(),
                grid.balances.iter().map(|b| format!("{b}")).collect::<Vec<_>>().join(", "),
            ),
        ],
    };
    Ok(StudyResult { rows, provenance })
}

fn join<T: Copy>(items: &[T], name: fn(T) -> &'static str) -> String {
    items.iter().map(|&i| name(i)).collect::<Vec<_>>().join(", ")
}

const DATA_SLOT: u8 = 0xFF;

fn run_cell(cell: &Cell, grid: &StudyGrid, est: &EstimatorSettings) -> Vec<StudyRow> {
    let cell_master = derive_seed(grid.master_seed, cell.code());
    let mut per_method: Vec<(Vec<MetricReport>, usize, Option<String>)> =
        vec![(Vec::new(), 0, None); grid.methods.len()];

    for rep in 0..grid.replications {
        let data_seed = derive_seed(cell_master, pack_stream(0, rep, DATA_SLOT));
        let sim = SimConfig::new(cell.n, cell.form, cell.link, cell.balance, data_seed)
            .and_then(|config| generate(&config));
        match sim {
            Ok(sim) => {
                for (m, &tag) in grid.methods.iter().enumerate() {
                    let fit_seed = derive_seed(cell_master, pack_stream(0, rep, tag.slot()));
                    match fit_method(tag, &sim.dataset, est, fit_seed) {
                        Ok((fit, p_params)) => {
                            let report = score_fit(
                                &sim.dataset,
                                &fit,
                                p_params,
                                Some(&sim.beta_true_design),
                            );
                            per_method[m].0.push(report);
                        }
                        Err(msg) => {
                            per_method[m].1 += 1;
                            per_method[m].2 = Some(msg);
                        }
                    }
                }
            }
            Err(e) => {
                // Data generation failed: every method records the failure.
                for slot in per_method.iter_mut() {
                    slot.1 += 1;
                    slot.2 = Some(e.to_string());
                }
            }
        }
    }

    grid.methods
        .iter()
        .zip(per_method)
        .map(|(&method, (reports, failures, failure))| StudyRow {
            link: cell.link,
            form: cell.form,
            n: cell.n,
            balance: cell.balance,
            method,
            replications: grid.replications,
            failures,
            metrics: average_reports(&reports),
            failure,
        })
        .collect()
}

/// Field-wise mean over reports; optional fields average their present
/// values and stay `None` when never present.
pub fn average_reports(reports: &[MetricReport]) -> Option<MetricReport> {
    if reports.is_empty() {
        return None;
    }
    let mean = |get: &dyn Fn(&MetricReport) -> f64| {
        get_mean(reports.iter().map(get))
    };
    let mean_opt = |get: &dyn Fn(&MetricReport) -> Option<f64>| {
        let vals: Vec<f64> = reports.iter().filter_map(get).collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    };
    Some(MetricReport {
        ars_train: mean(&|r| r.ars_train),
        ars_test: mean_opt(&|r| r.ars_test),
        aic_train: mean(&|r| r.aic_train),
        aic_test: mean_opt(&|r| r.aic_test),
        auc_train: mean_opt(&|r| r.auc_train),
        auc_test: mean_opt(&|r| r.auc_test),
        coverage: mean_opt(&|r| r.coverage),
        ci_width_mean: mean(&|r| r.ci_width_mean),
    })
}

fn get_mean(values: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = values.collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// Average a per-row statistic over (link, form) groups, one column per
/// method, in the Tables 1-2 layout.
pub fn aggregate_link_form(
    rows: &[StudyRow],
    methods: &[MethodTag],
    extract: &dyn Fn(&StudyRow) -> Option<f64>,
) -> Vec<(SimLink, SimForm, Vec<Option<f64>>)> {
    let mut groups: Vec<(SimLink, SimForm)> = Vec::new();
    for row in rows {
        if !groups.contains(&(row.link, row.form)) {
            groups.push((row.link, row.form));
        }
    }
    groups.sort_by_key(|&(l, f)| (l as u8, f as u8));
    groups
        .into_iter()
        .map(|(link, form)| {
            let cols = methods
                .iter()
                .map(|&m| {
                    let vals: Vec<f64> = rows
                        .iter()
                        .filter(|r| r.link == link && r.form == form && r.method == m)
                        .filter_map(extract)
                        .collect();
                    if vals.is_empty() {
                        None
                    } else {
                        Some(vals.iter().sum::<f64>() / vals.len() as f64)
                    }
                })
                .collect();
            (link, form, cols)
        })
        .collect()
}

/// As [`aggregate_link_form`] but grouped by form alone (Table 3 layout).
pub fn aggregate_form(
    rows: &[StudyRow],
    methods: &[MethodTag],
    extract: &dyn Fn(&StudyRow) -> Option<f64>,
) -> Vec<(SimForm, Vec<Option<f64>>)> {
    let mut forms: Vec<SimForm> = Vec::new();
    for row in rows {
        if !forms.contains(&row.form) {
            forms.push(row.form);
        }
    }
    forms.sort_by_key(|&f| f as u8);
    forms
        .into_iter()
        .map(|form| {
            let cols = methods
                .iter()
                .map(|&m| {
                    let vals: Vec<f64> = rows
                        .iter()
                        .filter(|r| r.form == form && r.method == m)
                        .filter_map(extract)
                        .collect();
                    if vals.is_empty() {
                        None
                    } else {
                        Some(vals.iter().sum::<f64>() / vals.len() as f64)
                    }
                })
                .collect();
            (form, cols)
        })
        .collect()
}

/// One benchmark row per method on one empirical dataset.
#[derive(Debug, Clone)]
pub struct EmpiricalRow {
    pub dataset: String,
    pub method: MethodTag,
    pub metrics: Option<MetricReport>,
    pub error: Option<String>,
}

/// One parameter-table line: estimate, interval, and significance star.
#[derive(Debug, Clone)]
pub struct ParamRow {
    pub dataset: String,
    pub method: MethodTag,
    pub parameter: String,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Interval excludes zero.
    pub starred: bool,
}

#[derive(Debug, Clone, Default)]
pub struct EmpiricalResult {
    pub rows: Vec<EmpiricalRow>,
    pub params: Vec<ParamRow>,
}

/// Fit every method on one loaded dataset, recording failures inline.
pub fn run_empirical(
    dataset: &Dataset,
    dataset_name: &str,
    methods: &[MethodTag],
    est: &EstimatorSettings,
    master_seed: u64,
) -> EmpiricalResult {
    let name_code = hash_name(dataset_name);
    let mut result = EmpiricalResult::default();
    for &tag in methods {
        let seed = derive_seed(derive_seed(master_seed, name_code), pack_stream(0, 0, tag.slot()));
        match fit_method(tag, dataset, est, seed) {
            Ok((fit, p_params)) => {
                let report = score_fit(dataset, &fit, p_params, None);
                for j in 0..dataset.n_params() {
                    result.params.push(ParamRow {
                        dataset: dataset_name.to_string(),
                        method: tag,
                        parameter: fit.names[j].clone(),
                        estimate: fit.point[j],
                        ci_low: fit.ci_low[j],
                        ci_high: fit.ci_high[j],
                        starred: fit.starred(j),
                    });
                }
                result.rows.push(EmpiricalRow {
                    dataset: dataset_name.to_string(),
                    method: tag,
                    metrics: Some(report),
                    error: None,
                });
            }
            Err(msg) => result.rows.push(EmpiricalRow {
                dataset: dataset_name.to_string(),
                method: tag,
                metrics: None,
                error: Some(msg),
            }),
        }
    }
    result
}

fn hash_name(name: &str) -> u64 {
    // FNV-1a.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
