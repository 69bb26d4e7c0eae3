//! Evaluation quantities: ARS (misclassification at 0.5), per-observation
//! normalized AIC, interval coverage, CI width, and Mann-Whitney AUC.

use ndarray::ArrayView1;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {left} outcomes vs {right} scores")]
    LengthMismatch { left: usize, right: usize },
    #[error("interval count {intervals} does not match parameter count {truth}")]
    DimMismatch { intervals: usize, truth: usize },
    #[error("AUC requires both classes present")]
    OneClassOnly,
}

/// Misclassification rate at threshold 0.5 (scores at exactly 0.5 predict
/// success). Lower is better; 0.0 is perfect classification.
pub fn ars(y: ArrayView1<f64>, probs: ArrayView1<f64>) -> Result<f64, MetricError> {
    if y.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if y.len() != probs.len() {
        return Err(MetricError::LengthMismatch { left: y.len(), right: probs.len() });
    }
    let wrong = y
        .iter()
        .zip(probs.iter())
        .filter(|&(&yi, &pi)| {
            let pred = if pi >= 0.5 { 1.0 } else { 0.0 };
            pred != yi
        })
        .count();
    Ok(wrong as f64 / y.len() as f64)
}

/// `(-2 loglik + 2 p) / n`: AIC normalized per observation so values are
/// comparable across sample sizes.
pub fn aic_norm(loglik: f64, p_params: usize, n: usize) -> f64 {
    assert!(n > 0, "aic_norm requires n > 0");
    (-2.0 * loglik + 2.0 * p_params as f64) / n as f64
}

/// Bernoulli log-likelihood of outcomes under success probabilities,
/// with probabilities clamped away from 0 and 1 so the result is finite.
pub fn bernoulli_loglik(y: ArrayView1<f64>, probs: ArrayView1<f64>) -> f64 {
    y.iter()
        .zip(probs.iter())
        .map(|(&yi, &pi)| {
            let p = pi.clamp(1e-12, 1.0 - 1e-12);
            if yi == 1.0 {
                p.ln()
            } else {
                (1.0 - p).ln()
            }
        })
        .sum()
}

/// Fraction of coordinates whose interval contains the true value.
pub fn coverage(
    ci_low: ArrayView1<f64>,
    ci_high: ArrayView1<f64>,
    beta_true: ArrayView1<f64>,
) -> Result<f64, MetricError> {
    if ci_low.len() != beta_true.len() || ci_high.len() != beta_true.len() {
        return Err(MetricError::DimMismatch {
            intervals: ci_low.len(),
            truth: beta_true.len(),
        });
    }
    if beta_true.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let covered = beta_true
        .iter()
        .enumerate()
        .filter(|&(j, &b)| ci_low[j] <= b && b <= ci_high[j])
        .count();
    Ok(covered as f64 / beta_true.len() as f64)
}

/// Mean interval width over coordinates.
pub fn ci_width(ci_low: ArrayView1<f64>, ci_high: ArrayView1<f64>) -> Result<f64, MetricError> {
    if ci_low.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if ci_low.len() != ci_high.len() {
        return Err(MetricError::LengthMismatch { left: ci_low.len(), right: ci_high.len() });
    }
    Ok(ci_low.iter().zip(ci_high.iter()).map(|(&l, &h)| h - l).sum::<f64>()
        / ci_low.len() as f64)
}

/// Mann-Whitney AUC: the probability a random positive outscores a random
/// negative, with half credit for ties. Computed from average ranks.
pub fn auc(y: ArrayView1<f64>, probs: ArrayView1<f64>) -> Result<f64, MetricError> {
    if y.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if y.len() != probs.len() {
        return Err(MetricError::LengthMismatch { left: y.len(), right: probs.len() });
    }
    let n = y.len();
    let n_pos = y.iter().filter(|&&v| v == 1.0).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricError::OneClassOnly);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));
    // Average ranks across tied scores.
    let mut rank = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && probs[order[j]] == probs[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for k in i..j {
            rank[order[k]] = avg;
        }
        i = j;
    }
    let rank_sum_pos: f64 =
        y.iter().enumerate().filter(|&(_, &v)| v == 1.0).map(|(i, _)| rank[i]).sum();
    let n_pos = n_pos as f64;
    let n_neg = n_neg as f64;
    Ok((rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg))
}

/// One row of evaluation output per (dataset, method) pair. Fields that do
/// not apply (no test split, truth unknown, one-class split) are `None` and
/// serialize as `NA`.
#[derive(Debug, Clone)]
pub struct MetricReport {
    pub ars_train: f64,
    pub ars_test: Option<f64>,
    pub aic_train: f64,
    pub aic_test: Option<f64>,
    pub auc_train: Option<f64>,
    pub auc_test: Option<f64>,
    /// Fraction of true coefficients covered (simulation only).
    pub coverage: Option<f64>,
    pub ci_width_mean: f64,
}

impl MetricReport {
    pub fn csv_header() -> &'static str {
        "dataset,method,ars_train,ars_test,aic_train,aic_test,auc_train,auc_test,coverage,ci_width_mean"
    }

    pub fn to_csv_row(&self, dataset: &str, method: &str) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            dataset,
            method,
            fmt_value(Some(self.ars_train)),
            fmt_value(self.ars_test),
            fmt_value(Some(self.aic_train)),
            fmt_value(self.aic_test),
            fmt_value(self.auc_train),
            fmt_value(self.auc_test),
            fmt_value(self.coverage),
            fmt_value(Some(self.ci_width_mean)),
        )
    }
}

/// The one float-to-text rule used by every emitted CSV, so parsing and
/// re-serializing a file reproduces identical bytes.
pub fn fmt_value(v: Option<f64>) -> String {
    match v {
        None => "NA".to_string(),
        Some(x) if x.is_nan() => "NA".to_string(),
        Some(x) => format!("{x:.6}"),
    }
}
