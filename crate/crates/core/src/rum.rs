//! Additive random utility extraction.
//!
//! With the baseline alternative's utility normalized to zero, the fitted
//! coefficients give each individual a cardinal utility `u1 = x'beta` for
//! the chosen alternative, comparable across individuals, alongside the
//! fitted choice probability.

use thiserror::Error;

use crate::model::{Dataset, FitResult};

#[derive(Debug, Error)]
pub enum RumError {
    #[error("fit has {fit} coefficients but the design has {design} columns")]
    DimMismatch { fit: usize, design: usize },
}

/// Per-individual utilities and choice probabilities at the point estimate.
///
/// Rows follow the dataset's train split then test split order is NOT used;
/// entries are sorted by original row index.
#[derive(Debug, Clone)]
pub struct UtilityReport {
    /// Original dataset row index per entry.
    pub indices: Vec<usize>,
    /// `x_i' beta` at the fitted point.
    pub u1: Vec<f64>,
    /// Baseline utility, identically zero by normalization.
    pub v0: f64,
    /// Fitted success probability per entry, from the fitting method's link.
    pub choice_prob: Vec<f64>,
}

impl UtilityReport {
    pub fn csv_header() -> &'static str {
        "index,u1,choice_prob"
    }

    pub fn to_csv_rows(&self) -> Vec<String> {
        self.indices
            .iter()
            .zip(self.u1.iter().zip(self.choice_prob.iter()))
            .map(|(&i, (&u, &p))| format!("{i},{u:.6},{p:.6}"))
            .collect()
    }
}

/// Compute utilities for every row in the dataset's splits.
pub fn utilities(dataset: &Dataset, fit: &FitResult) -> Result<UtilityReport, RumError> {
    let p = dataset.n_params();
    if fit.point.len() < p {
        return Err(RumError::DimMismatch { fit: fit.point.len(), design: p });
    }
    let beta = fit.point.slice(ndarray::s![..p]);
    let mut entries: Vec<(usize, f64, f64)> = Vec::new();
    for (pos, &i) in dataset.train_idx.iter().enumerate() {
        entries.push((i, dataset.design.row(i).dot(&beta), fit.probs_train[pos]));
    }
    for (pos, &i) in dataset.test_idx.iter().enumerate() {
        entries.push((i, dataset.design.row(i).dot(&beta), fit.probs_test[pos]));
    }
    entries.sort_by_key(|&(i, _, _)| i);
    Ok(UtilityReport {
        indices: entries.iter().map(|e| e.0).collect(),
        u1: entries.iter().map(|e| e.1).collect(),
        v0: 0.0,
        choice_prob: entries.iter().map(|e| e.2).collect(),
    })
}

/// Indices of the top-k utilities, descending, ties broken by ascending
/// index. `top_k` larger than the report is truncated to its length.
pub fn rank_alternatives(report: &UtilityReport, top_k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..report.u1.len()).collect();
    order.sort_by(|&a, &b| {
        report.u1[b]
            .total_cmp(&report.u1[a])
            .then_with(|| report.indices[a].cmp(&report.indices[b]))
    });
    order.truncate(top_k.min(report.u1.len()));
    order.into_iter().map(|pos| report.indices[pos]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{fit_mle_logistic, IrlsSettings};
    use crate::model::FitDiagnostics;
    use ndarray::{arr1, arr2, Array1, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn wald_fit(dataset: &Dataset, beta: Array1<f64>) -> FitResult {
        let probs_train = Array1::from_iter(
            dataset.train_idx.iter().map(|&i| dataset.design.row(i).dot(&beta)),
        )
        .mapv(|v| 1.0 / (1.0 + (-v).exp()));
        let probs_test = Array1::from_iter(
            dataset.test_idx.iter().map(|&i| dataset.design.row(i).dot(&beta)),
        )
        .mapv(|v| 1.0 / (1.0 + (-v).exp()));
        FitResult::from_wald(
            dataset.col_names.clone(),
            beta,
            Array1::from_elem(dataset.n_params(), 0.1),
            2.5758293035489008,
            probs_train,
            probs_test,
            FitDiagnostics::deterministic(1),
        )
    }

    #[test]
    fn zero_beta_means_indifference() {
        let design = arr2(&[[1.0, 0.5], [1.0, -0.5], [1.0, 2.0]]);
        let d = Dataset::train_only(design, arr1(&[1.0, 0.0, 1.0]), true).unwrap();
        let fit = wald_fit(&d, arr1(&[0.0, 0.0]));
        let report = utilities(&d, &fit).unwrap();
        assert!(report.u1.iter().all(|&u| u == 0.0));
        assert_eq!(report.v0, 0.0);
    }

    #[test]
    fn unit_row_reads_off_the_coefficient() {
        let design = arr2(&[[1.0, 0.0], [0.0, 1.0]]);
        let d = Dataset::new(
            design,
            arr1(&[1.0, 0.0]),
            vec![0, 1],
            vec![],
            false,
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let fit = wald_fit(&d, arr1(&[0.7, -1.3]));
        let report = utilities(&d, &fit).unwrap();
        assert!((report.u1[0] - 0.7).abs() < 1e-12);
        assert!((report.u1[1] + 1.3).abs() < 1e-12);
    }

    /// Argsort-equality oracle: every monotone-link fit orders utilities
    /// and choice probabilities identically.
    #[test]
    fn utilities_and_probabilities_sort_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 60;
        let mut design = Array2::<f64>::zeros((n, 3));
        for i in 0..n {
            design[[i, 0]] = 1.0;
            design[[i, 1]] = StandardNormal.sample(&mut rng);
            design[[i, 2]] = StandardNormal.sample(&mut rng);
        }
        let y = Array1::from_shape_fn(n, |i| {
            let eta = 0.4 + design[[i, 1]] - design[[i, 2]];
            if rng.random::<f64>() < 1.0 / (1.0 + (-eta as f64).exp()) {
                1.0
            } else {
                0.0
            }
        });
        let d = Dataset::train_only(design, y, true).unwrap();
        let fit = fit_mle_logistic(&d, &IrlsSettings::default()).unwrap();
        let report = utilities(&d, &fit).unwrap();
        let mut by_u: Vec<usize> = (0..n).collect();
        by_u.sort_by(|&a, &b| report.u1[a].total_cmp(&report.u1[b]));
        let mut by_p: Vec<usize> = (0..n).collect();
        by_p.sort_by(|&a, &b| report.choice_prob[a].total_cmp(&report.choice_prob[b]));
        assert_eq!(by_u, by_p);
    }

    #[test]
    fn ranking_follows_utility_with_index_ties() {
        let report = UtilityReport {
            indices: vec![0, 1, 2],
            u1: vec![3.0, 1.0, 2.0],
            v0: 0.0,
            choice_prob: vec![0.9, 0.4, 0.6],
        };
        assert_eq!(rank_alternatives(&report, 2), vec![0, 2]);
        let flat = UtilityReport {
            indices: vec![0, 1, 2, 3],
            u1: vec![1.0; 4],
            v0: 0.0,
            choice_prob: vec![0.5; 4],
        };
        assert_eq!(rank_alternatives(&flat, 3), vec![0, 1, 2]);
    }

    #[test]
    fn ranking_is_translation_invariant() {
        let report = UtilityReport {
            indices: vec![0, 1, 2, 3],
            u1: vec![0.3, -1.0, 2.2, 0.9],
            v0: 0.0,
            choice_prob: vec![0.5; 4],
        };
        let shifted = UtilityReport {
            u1: report.u1.iter().map(|u| u + 17.5).collect(),
            ..report.clone()
        };
        assert_eq!(rank_alternatives(&report, 4), rank_alternatives(&shifted, 4));
    }

    /// Utilities are linear in the covariates at fixed beta.
    #[test]
    fn utilities_are_linear_up_to_the_intercept() {
        let beta = arr1(&[0.5, 1.2, -0.7]);
        let a = [1.0, 0.3, 1.1];
        let b = [1.0, -0.8, 0.4];
        let sum = [1.0, a[1] + b[1], a[2] + b[2]];
        let design = arr2(&[a, b, sum]);
        let d = Dataset::train_only(design, arr1(&[1.0, 0.0, 1.0]), true).unwrap();
        let fit = wald_fit(&d, beta);
        let r = utilities(&d, &fit).unwrap();
        assert!((r.u1[2] - (r.u1[0] + r.u1[1] - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let design = arr2(&[[1.0, 0.5]]);
        let d = Dataset::train_only(design, arr1(&[1.0]), true).unwrap();
        let short = FitResult::from_wald(
            vec!["Intercept".into()],
            arr1(&[0.1]),
            arr1(&[0.1]),
            2.58,
            arr1(&[0.5]),
            arr1(&[]),
            FitDiagnostics::deterministic(1),
        );
        assert!(matches!(utilities(&d, &short), Err(RumError::DimMismatch { .. })));
    }
}
