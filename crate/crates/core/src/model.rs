//! Shared domain types: covariate transforms, datasets, exponent-family
//! link states, and fit summaries.
//!
//! The estimation methods in this crate all consume the same pipeline:
//! raw covariates are mapped through an a-priori list of transforms into a
//! design matrix, the design and a coefficient vector produce a linear
//! predictor `lambda`, and `lambda` is rescaled into the open unit interval
//! where the success/failure measure components
//! `nu_plus = lambda_tilde^(1/alpha1)` and
//! `nu_minus = (1 - lambda_tilde)^(1/alpha2)` live.

use ndarray::{Array1, Array2, ArrayView1};
use thiserror::Error;

/// Errors from model construction and link evaluation.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("log_sqrt requires strictly positive input, got {value} at row {row}, column {col}")]
    NonPositiveInput { row: usize, col: usize, value: f64 },
    #[error("transform list has {transforms} entries but the raw matrix has {columns} columns")]
    LengthMismatch { transforms: usize, columns: usize },
    #[error("beta has {beta} entries but the design has {columns} columns")]
    ShapeMismatch { beta: usize, columns: usize },
    #[error("exponents must be positive, got alpha1={alpha1}, alpha2={alpha2}")]
    NonPositiveAlpha { alpha1: f64, alpha2: f64 },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}

/// Per-column covariate transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Exp,
    Sin,
    /// `log(sqrt(x))`; requires `x > 0`.
    LogSqrt,
}

impl Transform {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Exp => x.exp(),
            Transform::Sin => x.sin(),
            Transform::LogSqrt => x.sqrt().ln(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "identity" | "id" => Some(Transform::Identity),
            "exp" => Some(Transform::Exp),
            "sin" => Some(Transform::Sin),
            "log_sqrt" => Some(Transform::LogSqrt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Exp => "exp",
            Transform::Sin => "sin",
            Transform::LogSqrt => "log_sqrt",
        }
    }
}

/// The a-priori functional form: one transform per raw covariate column,
/// plus an optional intercept column of ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub transforms: Vec<Transform>,
    pub intercept: bool,
}

impl ModelSpec {
    pub fn new(transforms: Vec<Transform>, intercept: bool) -> Self {
        Self { transforms, intercept }
    }

    /// Number of design columns this spec produces.
    pub fn design_cols(&self) -> usize {
        self.transforms.len() + usize::from(self.intercept)
    }

    /// Apply the transforms and prepend the intercept column.
    /// No standardization; see [`apply_model_spec`] for the full pipeline.
    pub fn build_design(&self, raw: &Array2<f64>) -> Result<Array2<f64>, ModelError> {
        if self.transforms.len() != raw.ncols() {
            return Err(ModelError::LengthMismatch {
                transforms: self.transforms.len(),
                columns: raw.ncols(),
            });
        }
        let n = raw.nrows();
        let offset = usize::from(self.intercept);
        let mut design = Array2::<f64>::zeros((n, self.design_cols()));
        if self.intercept {
            design.column_mut(0).fill(1.0);
        }
        for (j, &t) in self.transforms.iter().enumerate() {
            for i in 0..n {
                let x = raw[[i, j]];
                if t == Transform::LogSqrt && x <= 0.0 {
                    return Err(ModelError::NonPositiveInput { row: i, col: j, value: x });
                }
                design[[i, j + offset]] = t.apply(x);
            }
        }
        Ok(design)
    }
}

/// Column means and standard deviations fitted on the training rows.
///
/// The intercept column (and any constant column) carries mean 0 / sd 1 so
/// it passes through unchanged.
#[derive(Debug, Clone)]
pub struct Standardization {
    pub mean: Array1<f64>,
    pub sd: Array1<f64>,
}

impl Standardization {
    /// Identity statistics for a `p`-column design (no-op on apply).
    pub fn identity(p: usize) -> Self {
        Self { mean: Array1::zeros(p), sd: Array1::ones(p) }
    }

    /// Fit per-column statistics over `rows` (all rows when empty),
    /// skipping the leading intercept column when `has_intercept`.
    pub fn fit(design: &Array2<f64>, rows: &[usize], has_intercept: bool) -> Self {
        let p = design.ncols();
        let all: Vec<usize>;
        let rows = if rows.is_empty() {
            all = (0..design.nrows()).collect();
            &all
        } else {
            rows
        };
        let m = rows.len() as f64;
        let mut mean = Array1::zeros(p);
        let mut sd = Array1::ones(p);
        let start = usize::from(has_intercept);
        for j in start..p {
            let mu = rows.iter().map(|&i| design[[i, j]]).sum::<f64>() / m;
            let var = rows.iter().map(|&i| (design[[i, j]] - mu).powi(2)).sum::<f64>() / m;
            mean[j] = mu;
            // Constant columns keep sd 1 so they come out centered, not NaN.
            sd[j] = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
        }
        Self { mean, sd }
    }

    /// Apply the fitted statistics column-wise.
    pub fn apply(&self, design: &Array2<f64>) -> Array2<f64> {
        let mut out = design.clone();
        for j in 0..design.ncols() {
            let (m, s) = (self.mean[j], self.sd[j]);
            out.column_mut(j).mapv_inplace(|v| (v - m) / s);
        }
        out
    }
}

/// Transform raw covariates into a standardized design matrix.
///
/// Column `j` of the output is `transforms[j]` applied elementwise, with an
/// intercept column of ones prepended when the spec asks for one. Every
/// non-intercept column is then z-scored using statistics computed over
/// `train_rows` (over all rows when `None`); the same statistics apply to
/// the remaining rows, so there is no test-set leakage.
pub fn apply_model_spec(
    raw: &Array2<f64>,
    spec: &ModelSpec,
    train_rows: Option<&[usize]>,
) -> Result<(Array2<f64>, Standardization), ModelError> {
    let design = spec.build_design(raw)?;
    let stats = Standardization::fit(&design, train_rows.unwrap_or(&[]), spec.intercept);
    Ok((stats.apply(&design), stats))
}

/// A binary-outcome dataset: standardized design matrix, outcomes, and
/// disjoint train/test row indices.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub design: Array2<f64>,
    /// Outcomes in {0.0, 1.0}.
    pub y: Array1<f64>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    /// Whether column 0 of the design is an intercept column of ones.
    pub has_intercept: bool,
    /// One name per design column, used in parameter tables.
    pub col_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        design: Array2<f64>,
        y: Array1<f64>,
        train_idx: Vec<usize>,
        test_idx: Vec<usize>,
        has_intercept: bool,
        col_names: Vec<String>,
    ) -> Result<Self, ModelError> {
        let n = design.nrows();
        if y.len() != n {
            return Err(ModelError::InvalidDataset(format!(
                "outcome length {} does not match {} design rows",
                y.len(),
                n
            )));
        }
        if y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(ModelError::InvalidDataset("outcomes must be 0 or 1".into()));
        }
        if col_names.len() != design.ncols() {
            return Err(ModelError::InvalidDataset(format!(
                "{} column names for {} design columns",
                col_names.len(),
                design.ncols()
            )));
        }
        let mut seen = vec![false; n];
        for &i in train_idx.iter().chain(test_idx.iter()) {
            if i >= n {
                return Err(ModelError::InvalidDataset(format!(
                    "split index {i} out of range for {n} rows"
                )));
            }
            if seen[i] {
                return Err(ModelError::InvalidDataset(format!(
                    "row {i} appears in both splits"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { design, y, train_idx, test_idx, has_intercept, col_names })
    }

    /// Convenience constructor: all rows in the training split, default
    /// column names (`Intercept`, `X1`, ...).
    pub fn train_only(
        design: Array2<f64>,
        y: Array1<f64>,
        has_intercept: bool,
    ) -> Result<Self, ModelError> {
        let n = design.nrows();
        let names = default_col_names(design.ncols(), has_intercept);
        Self::new(design, y, (0..n).collect(), Vec::new(), has_intercept, names)
    }

    pub fn n(&self) -> usize {
        self.design.nrows()
    }

    /// Success count over all rows (the `k` of the unified likelihood).
    pub fn k(&self) -> usize {
        self.y.iter().filter(|&&v| v == 1.0).count()
    }

    pub fn n_params(&self) -> usize {
        self.design.ncols()
    }

    /// Outcomes restricted to a split.
    pub fn y_at(&self, idx: &[usize]) -> Array1<f64> {
        Array1::from_iter(idx.iter().map(|&i| self.y[i]))
    }

    /// Design columns to which an L2 penalty applies (everything but the
    /// intercept).
    pub fn penalized_cols(&self) -> std::ops::Range<usize> {
        usize::from(self.has_intercept)..self.design.ncols()
    }
}

pub fn default_col_names(p: usize, has_intercept: bool) -> Vec<String> {
    (0..p)
        .map(|j| {
            if has_intercept && j == 0 {
                "Intercept".to_string()
            } else {
                format!("X{}", j + usize::from(!has_intercept))
            }
        })
        .collect()
}

/// Coefficients plus the two positive exponents of the unified likelihood.
///
/// The non-unified restriction is `alpha2 == alpha1` with the failure
/// component tied to `1 - nu_plus` at the likelihood level.
#[derive(Debug, Clone)]
pub struct UnifiedParams {
    pub beta: Array1<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl UnifiedParams {
    pub fn new(beta: Array1<f64>, alpha1: f64, alpha2: f64) -> Result<Self, ModelError> {
        if alpha1 <= 0.0 || alpha2 <= 0.0 || !alpha1.is_finite() || !alpha2.is_finite() {
            return Err(ModelError::NonPositiveAlpha { alpha1, alpha2 });
        }
        Ok(Self { beta, alpha1, alpha2 })
    }
}

/// How a linear predictor is mapped into the open unit interval.
///
/// The affine min-max map is fitted on the rows in `fit_rows` (all rows
/// when empty) with an interior margin `epsilon`; rows outside the fitted
/// range are clipped into `[epsilon, 1 - epsilon]`. A constant predictor
/// has no usable range and maps everywhere to 0.5.
#[derive(Debug, Clone)]
pub struct RescaleRule {
    pub epsilon: f64,
    pub fit_rows: Vec<usize>,
}

impl Default for RescaleRule {
    fn default() -> Self {
        Self { epsilon: 0.01, fit_rows: Vec::new() }
    }
}

impl RescaleRule {
    /// Rule fitted on a dataset's training rows.
    pub fn for_dataset(dataset: &Dataset) -> Self {
        Self { epsilon: 0.01, fit_rows: dataset.train_idx.clone() }
    }

    /// Map `lambda` into `[epsilon, 1 - epsilon]`.
    pub fn rescale(&self, lambda: &Array1<f64>) -> Array1<f64> {
        let eps = self.epsilon;
        let bounds_over: Vec<f64> = if self.fit_rows.is_empty() {
            lambda.to_vec()
        } else {
            self.fit_rows.iter().map(|&i| lambda[i]).collect()
        };
        let lo = bounds_over.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = bounds_over.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        if !(span > 1e-12 * lo.abs().max(hi.abs()).max(1.0)) {
            // Degenerate (constant) predictor: symmetric noninformative map.
            return Array1::from_elem(lambda.len(), 0.5);
        }
        lambda.mapv(|v| (eps + (1.0 - 2.0 * eps) * (v - lo) / span).clamp(eps, 1.0 - eps))
    }
}

/// The per-observation link quantities for one parameter value.
#[derive(Debug, Clone)]
pub struct LinkState {
    pub lambda: Array1<f64>,
    pub lambda_tilde: Array1<f64>,
    /// Rows with `lambda >= 0`.
    pub s_plus: Vec<usize>,
    /// Rows with `lambda < 0`.
    pub s_minus: Vec<usize>,
    /// `lambda_tilde^(1/alpha1)`.
    pub nu_plus: Array1<f64>,
    /// `(1 - lambda_tilde)^(1/alpha2)`.
    pub nu_minus: Array1<f64>,
}

/// Build the link state: `lambda = design . beta`, the sign partition, the
/// rescaled predictor, and the two measure components.
pub fn link_state(
    design: &Array2<f64>,
    beta: &ArrayView1<f64>,
    alpha1: f64,
    alpha2: f64,
    rescale: &RescaleRule,
) -> Result<LinkState, ModelError> {
    if alpha1 <= 0.0 || alpha2 <= 0.0 {
        return Err(ModelError::NonPositiveAlpha { alpha1, alpha2 });
    }
    if beta.len() != design.ncols() {
        return Err(ModelError::ShapeMismatch { beta: beta.len(), columns: design.ncols() });
    }
    let lambda = design.dot(beta);
    let lambda_tilde = rescale.rescale(&lambda);
    let mut s_plus = Vec::new();
    let mut s_minus = Vec::new();
    for (i, &l) in lambda.iter().enumerate() {
        if l >= 0.0 {
            s_plus.push(i);
        } else {
            s_minus.push(i);
        }
    }
    let nu_plus = lambda_tilde.mapv(|v| v.powf(1.0 / alpha1));
    let nu_minus = lambda_tilde.mapv(|v| (1.0 - v).powf(1.0 / alpha2));
    Ok(LinkState { lambda, lambda_tilde, s_plus, s_minus, nu_plus, nu_minus })
}

/// Sampler/optimizer diagnostics attached to every fit.
#[derive(Debug, Clone)]
pub struct FitDiagnostics {
    /// Post-burn-in acceptance rate; 1.0 for deterministic optimizers.
    pub acceptance_rate: f64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Set when the post-burn-in acceptance rate fell outside [0.05, 0.6].
    pub adaptation_failure: bool,
}

impl FitDiagnostics {
    pub fn deterministic(iterations: usize) -> Self {
        Self { acceptance_rate: 1.0, iterations, burn_in: 0, adaptation_failure: false }
    }
}

/// A fitted model: retained draws, median point estimate, 99% equal-tailed
/// intervals, and per-observation success probabilities at the point.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// One name per parameter (design columns first, then any exponents).
    pub names: Vec<String>,
    /// Post-burn-in draws, one row per retained iteration. Deterministic
    /// fits hold a single row.
    pub draws: Array2<f64>,
    /// Coordinate-wise median of the draws.
    pub point: Array1<f64>,
    /// 0.5% empirical quantile per coordinate.
    pub ci_low: Array1<f64>,
    /// 99.5% empirical quantile per coordinate.
    pub ci_high: Array1<f64>,
    pub probs_train: Array1<f64>,
    pub probs_test: Array1<f64>,
    pub diagnostics: FitDiagnostics,
}

impl FitResult {
    /// Summarize retained draws into medians and 99% equal-tailed intervals.
    pub fn from_draws(
        names: Vec<String>,
        draws: Array2<f64>,
        probs_train: Array1<f64>,
        probs_test: Array1<f64>,
        diagnostics: FitDiagnostics,
    ) -> Self {
        let dims = draws.ncols();
        let mut point = Array1::zeros(dims);
        let mut ci_low = Array1::zeros(dims);
        let mut ci_high = Array1::zeros(dims);
        for j in 0..dims {
            let mut col: Vec<f64> = draws.column(j).to_vec();
            col.sort_by(|a, b| a.total_cmp(b));
            point[j] = quantile_sorted(&col, 0.5);
            ci_low[j] = quantile_sorted(&col, 0.005);
            ci_high[j] = quantile_sorted(&col, 0.995);
        }
        Self { names, draws, point, ci_low, ci_high, probs_train, probs_test, diagnostics }
    }

    /// Wrap a deterministic point estimate with Wald-style intervals
    /// `point +- z * se`. The draws matrix holds the single point.
    pub fn from_wald(
        names: Vec<String>,
        point: Array1<f64>,
        se: Array1<f64>,
        z: f64,
        probs_train: Array1<f64>,
        probs_test: Array1<f64>,
        diagnostics: FitDiagnostics,
    ) -> Self {
        let ci_low = &point - &(se.mapv(|s| z * s));
        let ci_high = &point + &(se.mapv(|s| z * s));
        let draws = point.clone().insert_axis(ndarray::Axis(0));
        Self { names, draws, point, ci_low, ci_high, probs_train, probs_test, diagnostics }
    }

    /// Whether the 99% interval for coordinate `j` excludes zero.
    pub fn starred(&self, j: usize) -> bool {
        self.ci_low[j] > 0.0 || self.ci_high[j] < 0.0
    }
}

/// Empirical quantile with linear interpolation on a sorted slice.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}
