//! Logistic regression by iteratively reweighted least squares, with an
//! optional ridge penalty on the non-intercept coefficients.

use ndarray::{Array1, Array2};

use super::{sigmoid, FitError, Z_995};
use crate::linalg::{weighted_gram, SpdFactor};
use crate::model::{Dataset, FitDiagnostics, FitResult};

/// IRLS controls. `ridge = 0` is the plain MLE; `ridge > 0` maximizes
/// `loglik - ridge * ||beta_noint||^2 / 2` with the intercept unpenalized.
#[derive(Debug, Clone)]
pub struct IrlsSettings {
    pub max_iter: usize,
    /// Convergence threshold on the max absolute coefficient update.
    pub tol: f64,
    pub ridge: f64,
}

impl Default for IrlsSettings {
    fn default() -> Self {
        Self { max_iter: 100, tol: 1e-8, ridge: 0.0 }
    }
}

impl IrlsSettings {
    pub fn with_ridge(ridge: f64) -> Self {
        Self { ridge, ..Self::default() }
    }
}

/// Maximum-likelihood logistic fit with Wald 99% intervals.
pub fn fit_mle_logistic(dataset: &Dataset, settings: &IrlsSettings) -> Result<FitResult, FitError> {
    if settings.ridge != 0.0 {
        return Err(FitError::InvalidSettings(format!(
            "fit_mle_logistic requires ridge = 0, got {}",
            settings.ridge
        )));
    }
    fit_logistic(dataset, settings)
}

/// Ridge-penalized logistic fit. Nests the MLE at `ridge = 0`.
pub fn fit_penalized_logistic(
    dataset: &Dataset,
    settings: &IrlsSettings,
) -> Result<FitResult, FitError> {
    if settings.ridge < 0.0 {
        return Err(FitError::InvalidSettings(format!(
            "ridge penalty must be nonnegative, got {}",
            settings.ridge
        )));
    }
    fit_logistic(dataset, settings)
}

fn fit_logistic(dataset: &Dataset, settings: &IrlsSettings) -> Result<FitResult, FitError> {
    if settings.tol <= 0.0 {
        return Err(FitError::InvalidSettings("tol must be positive".into()));
    }
    let train = &dataset.train_idx;
    if train.is_empty() {
        return Err(FitError::InvalidSettings("empty training split".into()));
    }
    let x = &dataset.design;
    let p = x.ncols();
    let y_train = dataset.y_at(train);
    let penalized: Vec<bool> =
        (0..p).map(|j| settings.ridge > 0.0 && dataset.penalized_cols().contains(&j)).collect();

    let mut beta = Array1::<f64>::zeros(p);
    let mut dev = penalized_deviance(x, train, &y_train, &beta, settings.ridge, &penalized);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..settings.max_iter {
        iterations = iter + 1;
        let eta: Vec<f64> = train.iter().map(|&i| x.row(i).dot(&beta)).collect();
        let probs: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let weights = Array1::from_iter(probs.iter().map(|&pi| (pi * (1.0 - pi)).max(1e-10)));

        // Newton system: (X'WX + R) delta = X'(y - p) - R beta.
        let mut h = weighted_gram(x, train, &weights);
        let mut g = Array1::<f64>::zeros(p);
        for (r, &i) in train.iter().enumerate() {
            let resid = y_train[r] - probs[r];
            for j in 0..p {
                g[j] += x[[i, j]] * resid;
            }
        }
        for j in 0..p {
            if penalized[j] {
                h[[j, j]] += settings.ridge;
                g[j] -= settings.ridge * beta[j];
            }
        }
        let factor = SpdFactor::new(&h).ok_or(FitError::RankDeficient)?;
        let delta = factor.solve(&g);

        if delta.iter().all(|d| d.abs() <= settings.tol) {
            beta = &beta + &delta;
            converged = true;
            break;
        }

        // Step-halving keeps the penalized deviance non-increasing.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let candidate = &beta + &delta.mapv(|d| step * d);
            let cand_dev =
                penalized_deviance(x, train, &y_train, &candidate, settings.ridge, &penalized);
            if cand_dev <= dev + 1e-12 {
                accepted = Some((candidate, cand_dev));
                break;
            }
            step *= 0.5;
        }
        let (next, next_dev) = accepted.ok_or(FitError::NoConvergence {
            iterations: settings.max_iter,
        })?;
        let max_update = delta.iter().map(|d| (step * d).abs()).fold(0.0f64, f64::max);
        beta = next;
        dev = next_dev;

        // Separation shows up either as coefficients running away or as
        // the deviance collapsing to zero with nonzero coefficients.
        if beta.iter().any(|b| b.abs() > 1e3)
            || (settings.ridge == 0.0 && dev < 1e-6 && beta.iter().any(|b| b.abs() > 1e-6))
        {
            return Err(FitError::SeparationDetected { last_beta: beta.to_vec() });
        }
        if max_update <= settings.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(FitError::NoConvergence { iterations: settings.max_iter });
    }

    // Wald standard errors from the (penalized) information at the optimum.
    let eta: Vec<f64> = train.iter().map(|&i| x.row(i).dot(&beta)).collect();
    let weights = Array1::from_iter(
        eta.iter().map(|&e| (sigmoid(e) * (1.0 - sigmoid(e))).max(1e-10)),
    );
    let mut h = weighted_gram(x, train, &weights);
    for j in 0..p {
        if penalized[j] {
            h[[j, j]] += settings.ridge;
        }
    }
    let factor = SpdFactor::new(&h).ok_or(FitError::RankDeficient)?;
    let se = factor.inverse_diag().mapv(f64::sqrt);

    let probs_train = Array1::from_iter(train.iter().map(|&i| sigmoid(x.row(i).dot(&beta))));
    let probs_test =
        Array1::from_iter(dataset.test_idx.iter().map(|&i| sigmoid(x.row(i).dot(&beta))));

    Ok(FitResult::from_wald(
        dataset.col_names.clone(),
        beta,
        se,
        Z_995,
        probs_train,
        probs_test,
        FitDiagnostics::deterministic(iterations),
    ))
}

/// `-2 loglik + ridge ||beta_pen||^2` over the training rows.
fn penalized_deviance(
    x: &Array2<f64>,
    train: &[usize],
    y_train: &Array1<f64>,
    beta: &Array1<f64>,
    ridge: f64,
    penalized: &[bool],
) -> f64 {
    let mut ll = 0.0;
    for (r, &i) in train.iter().enumerate() {
        let eta = x.row(i).dot(beta);
        let p = sigmoid(eta).clamp(1e-15, 1.0 - 1e-15);
        ll += if y_train[r] == 1.0 { p.ln() } else { (1.0 - p).ln() };
    }
    let pen: f64 = beta
        .iter()
        .enumerate()
        .filter(|&(j, _)| penalized[j])
        .map(|(_, b)| b * b)
        .sum();
    -2.0 * ll + ridge * pen
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn symmetric_toy() -> Dataset {
        // Five successes at x = +1, five failures at x = -1.
        let mut design = Array2::<f64>::zeros((10, 2));
        let mut y = Array1::<f64>::zeros(10);
        for i in 0..10 {
            design[[i, 0]] = 1.0;
            design[[i, 1]] = if i < 5 { 1.0 } else { -1.0 };
            y[i] = if i < 5 { 1.0 } else { 0.0 };
        }
        Dataset::train_only(design, y, true).unwrap()
    }

    fn random_logistic_dataset(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut design = Array2::<f64>::zeros((n, 3));
        for i in 0..n {
            design[[i, 0]] = 1.0;
            design[[i, 1]] = StandardNormal.sample(&mut rng);
            design[[i, 2]] = StandardNormal.sample(&mut rng);
        }
        let beta = [0.3, 0.9, -0.7];
        let y = Array1::from_shape_fn(n, |i| {
            let eta = beta[0] + beta[1] * design[[i, 1]] + beta[2] * design[[i, 2]];
            if rng.random::<f64>() < sigmoid(eta) {
                1.0
            } else {
                0.0
            }
        });
        Dataset::train_only(design, y, true).unwrap()
    }

    /// The symmetric toy is itself perfectly separated, so the likelihood
    /// has no finite maximum; the diverging iterate still keeps its
    /// intercept at zero by symmetry.
    #[test]
    fn symmetric_data_gives_zero_intercept() {
        match fit_mle_logistic(&symmetric_toy(), &IrlsSettings::default()) {
            Err(FitError::SeparationDetected { last_beta }) => {
                assert!(last_beta[0].abs() <= 1e-6, "intercept {}", last_beta[0]);
                assert!(last_beta[1] > 0.0);
            }
            other => panic!("expected SeparationDetected, got {other:?}"),
        }
    }

    #[test]
    fn separated_data_is_detected() {
        // y == 1 exactly when x > 0: perfectly separated.
        let design = arr2(&[
            [1.0, 1.0],
            [1.0, 2.0],
            [1.0, 0.5],
            [1.0, -1.0],
            [1.0, -2.0],
            [1.0, -0.5],
        ]);
        let y = arr1(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let d = Dataset::train_only(design, y, true).unwrap();
        assert!(matches!(
            fit_mle_logistic(&d, &IrlsSettings::default()),
            Err(FitError::SeparationDetected { .. })
        ));
    }

    #[test]
    fn duplicate_columns_are_rank_deficient() {
        let mut design = Array2::<f64>::zeros((8, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..8 {
            design[[i, 0]] = 1.0;
            let v: f64 = StandardNormal.sample(&mut rng);
            design[[i, 1]] = v;
            design[[i, 2]] = v;
        }
        let y = arr1(&[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let d = Dataset::train_only(design, y, true).unwrap();
        assert!(matches!(
            fit_mle_logistic(&d, &IrlsSettings::default()),
            Err(FitError::RankDeficient)
        ));
    }

    #[test]
    fn huge_ridge_shrinks_slopes_to_zero() {
        let d = random_logistic_dataset(100, 2);
        let fit = fit_penalized_logistic(&d, &IrlsSettings::with_ridge(1e8)).unwrap();
        let norm = (fit.point[1].powi(2) + fit.point[2].powi(2)).sqrt();
        assert!(norm <= 1e-3, "slope norm {norm}");
    }

    #[test]
    fn zero_ridge_reproduces_the_mle() {
        let d = random_logistic_dataset(120, 3);
        let mle = fit_mle_logistic(&d, &IrlsSettings::default()).unwrap();
        let pen = fit_penalized_logistic(&d, &IrlsSettings::with_ridge(0.0)).unwrap();
        for j in 0..3 {
            assert!((mle.point[j] - pen.point[j]).abs() < 1e-8);
        }
    }

    /// Direct-comparison oracle: heavier penalties shrink harder.
    #[test]
    fn shrinkage_is_monotone_in_the_penalty() {
        for seed in [4, 5, 6] {
            let d = random_logistic_dataset(150, seed);
            let light = fit_penalized_logistic(&d, &IrlsSettings::with_ridge(1.0)).unwrap();
            let heavy = fit_penalized_logistic(&d, &IrlsSettings::with_ridge(10.0)).unwrap();
            let norm = |f: &FitResult| (f.point[1].powi(2) + f.point[2].powi(2)).sqrt();
            assert!(norm(&heavy) <= norm(&light) + 1e-12);
        }
    }

    /// Local-max property of the penalized objective at the optimum.
    #[test]
    fn solution_is_a_local_maximum() {
        let d = random_logistic_dataset(80, 9);
        let ridge = 1.0;
        let fit = fit_penalized_logistic(&d, &IrlsSettings::with_ridge(ridge)).unwrap();
        let objective = |beta: &Array1<f64>| {
            let mut ll = 0.0;
            for &i in &d.train_idx {
                let p = sigmoid(d.design.row(i).dot(beta)).clamp(1e-15, 1.0 - 1e-15);
                ll += if d.y[i] == 1.0 { p.ln() } else { (1.0 - p).ln() };
            }
            ll - ridge * (beta[1] * beta[1] + beta[2] * beta[2]) / 2.0
        };
        let at_opt = objective(&fit.point);
        for j in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut b = fit.point.clone();
                b[j] += sign * 0.01;
                assert!(objective(&b) <= at_opt, "not a local max in coordinate {j}");
            }
        }
    }

    #[test]
    fn mle_rejects_nonzero_ridge() {
        let d = random_logistic_dataset(50, 1);
        assert!(matches!(
            fit_mle_logistic(&d, &IrlsSettings::with_ridge(1.0)),
            Err(FitError::InvalidSettings(_))
        ));
    }
}
