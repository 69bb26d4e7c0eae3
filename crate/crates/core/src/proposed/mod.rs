//! The exponent-family likelihoods and their sampler.
//!
//! The unified likelihood scores each observation through the two measure
//! components of the link state, `nu_plus = lambda_tilde^(1/alpha1)` and
//! `nu_minus = (1 - lambda_tilde)^(1/alpha2)`, normalized per observation:
//! `p = nu_plus / (nu_plus + nu_minus)`. The non-unified restriction drops
//! the second exponent and ties failure mass to `1 - p` directly. Both are
//! fit by an adaptive blockwise random-walk Metropolis sampler with
//! burn-in-only adaptation; the parametric tag runs the plain logistic
//! Bernoulli likelihood under the same sampler.

mod laheml;
mod optimize;

pub use laheml::fit_laheml;
pub use optimize::{
    maximize_nonparametric, maximize_unified, maximize_unified_with_starts, MaximizeOptions,
};

use ndarray::{Array1, ArrayView1};
use thiserror::Error;

use crate::baselines::sigmoid;
use crate::model::{link_state, Dataset, ModelError, RescaleRule, UnifiedParams};

#[derive(Debug, Error)]
pub enum LoglikError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("log-likelihood evaluated to a non-finite value")]
    NonFinite,
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
}

/// Sampler controls.
#[derive(Debug, Clone)]
pub struct LahemlSettings {
    pub iterations: usize,
    pub burn_in: usize,
    /// Acceptance rate the burn-in adaptation steers toward.
    pub target_accept: f64,
    /// Iterations between adaptation updates during burn-in.
    pub adapt_window: usize,
    /// L2 penalty weight applied by the penalized method tags.
    pub penalty_tau: f64,
    /// Closed interval the exponents live in.
    pub alpha_bounds: (f64, f64),
    pub seed: u64,
}

impl Default for LahemlSettings {
    fn default() -> Self {
        Self {
            iterations: 1000,
            burn_in: 500,
            target_accept: 0.234,
            adapt_window: 50,
            penalty_tau: 0.0,
            alpha_bounds: (0.1, 10.0),
            seed: 0,
        }
    }
}

impl LahemlSettings {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub(crate) fn validate(&self) -> Result<(), LoglikError> {
        if self.burn_in >= self.iterations {
            return Err(LoglikError::InvalidSettings(format!(
                "burn_in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.adapt_window == 0 {
            return Err(LoglikError::InvalidSettings("adapt_window must be positive".into()));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(LoglikError::InvalidSettings("target_accept must lie in (0, 1)".into()));
        }
        let (lo, hi) = self.alpha_bounds;
        if !(lo > 0.0 && hi > lo) {
            return Err(LoglikError::InvalidSettings(format!(
                "alpha bounds must be positive and ordered, got ({lo}, {hi})"
            )));
        }
        if self.penalty_tau < 0.0 {
            return Err(LoglikError::InvalidSettings("penalty_tau must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Which likelihood the sampler targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    /// Plain logistic Bernoulli likelihood under the same sampler.
    Parametric,
    /// Non-unified: one exponent, failure mass tied to `1 - p`.
    Nonparametric,
    /// Unified: separate success and failure exponents.
    Unified,
    NonparametricPenalized,
    UnifiedPenalized,
}

impl MethodKind {
    pub fn is_penalized(self) -> bool {
        matches!(self, MethodKind::NonparametricPenalized | MethodKind::UnifiedPenalized)
    }

    pub fn is_unified(self) -> bool {
        matches!(self, MethodKind::Unified | MethodKind::UnifiedPenalized)
    }

    /// Number of exponent parameters this method samples.
    pub fn n_alpha(self) -> usize {
        match self {
            MethodKind::Parametric => 0,
            MethodKind::Nonparametric | MethodKind::NonparametricPenalized => 1,
            MethodKind::Unified | MethodKind::UnifiedPenalized => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Parametric => "parametric",
            MethodKind::Nonparametric => "nonparametric",
            MethodKind::Unified => "unified",
            MethodKind::NonparametricPenalized => "nonparametric_penalized",
            MethodKind::UnifiedPenalized => "unified_penalized",
        }
    }
}

/// Success probability of the unified link at a rescaled predictor value.
pub fn unified_prob(lambda_tilde: f64, alpha1: f64, alpha2: f64) -> f64 {
    let nu_plus = lambda_tilde.powf(1.0 / alpha1);
    let nu_minus = (1.0 - lambda_tilde).powf(1.0 / alpha2);
    nu_plus / (nu_plus + nu_minus)
}

/// Success probability of the non-unified link.
pub fn nonparametric_prob(lambda_tilde: f64, alpha: f64) -> f64 {
    lambda_tilde.powf(1.0 / alpha)
}

/// Unified log-likelihood over the training split, minus
/// `penalty_tau * ||beta_noint||^2` when `penalty_tau > 0`.
///
/// The per-observation normalization `p = nu_plus / (nu_plus + nu_minus)`
/// absorbs the likelihood's free constant.
pub fn unified_loglik(
    dataset: &Dataset,
    params: &UnifiedParams,
    rescale: &RescaleRule,
    penalty_tau: f64,
) -> Result<f64, LoglikError> {
    let state = link_state(
        &dataset.design,
        &params.beta.view(),
        params.alpha1,
        params.alpha2,
        rescale,
    )?;
    let mut ll = 0.0;
    for &i in &dataset.train_idx {
        let p = unified_prob(state.lambda_tilde[i], params.alpha1, params.alpha2)
            .clamp(1e-300, 1.0 - 1e-16);
        ll += if dataset.y[i] == 1.0 { p.ln() } else { (1.0 - p).ln() };
    }
    ll -= penalty_tau * penalty_norm2(dataset, &params.beta.view());
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(LoglikError::NonFinite)
    }
}

/// Non-unified log-likelihood: `p = lambda_tilde^(1/alpha)`, `q = 1 - p`.
pub fn nonparametric_loglik(
    dataset: &Dataset,
    beta: &Array1<f64>,
    alpha: f64,
    rescale: &RescaleRule,
    penalty_tau: f64,
) -> Result<f64, LoglikError> {
    let state = link_state(&dataset.design, &beta.view(), alpha, alpha, rescale)?;
    let mut ll = 0.0;
    for &i in &dataset.train_idx {
        let p = nonparametric_prob(state.lambda_tilde[i], alpha).clamp(1e-300, 1.0 - 1e-16);
        ll += if dataset.y[i] == 1.0 { p.ln() } else { (1.0 - p).ln() };
    }
    ll -= penalty_tau * penalty_norm2(dataset, &beta.view());
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(LoglikError::NonFinite)
    }
}

/// Plain logistic Bernoulli log-likelihood over the training split.
pub fn parametric_loglik(dataset: &Dataset, beta: &Array1<f64>) -> f64 {
    dataset
        .train_idx
        .iter()
        .map(|&i| {
            let p = sigmoid(dataset.design.row(i).dot(beta)).clamp(1e-15, 1.0 - 1e-15);
            if dataset.y[i] == 1.0 {
                p.ln()
            } else {
                (1.0 - p).ln()
            }
        })
        .sum()
}

fn penalty_norm2(dataset: &Dataset, beta: &ArrayView1<f64>) -> f64 {
    dataset.penalized_cols().map(|j| beta[j] * beta[j]).sum()
}

/// Per-observation success probabilities of a method at a parameter vector
/// laid out as `(beta..., alpha...)`, split into (train, test).
pub fn method_probs(
    method: MethodKind,
    dataset: &Dataset,
    point: &ArrayView1<f64>,
    rescale: &RescaleRule,
) -> Result<(Array1<f64>, Array1<f64>), LoglikError> {
    let p = dataset.n_params();
    let beta = point.slice(ndarray::s![..p]).to_owned();
    let probs_all: Array1<f64> = match method {
        MethodKind::Parametric => dataset.design.dot(&beta).mapv(sigmoid),
        MethodKind::Nonparametric | MethodKind::NonparametricPenalized => {
            let alpha = point[p];
            let state = link_state(&dataset.design, &beta.view(), alpha, alpha, rescale)?;
            state.lambda_tilde.mapv(|lt| nonparametric_prob(lt, alpha))
        }
        MethodKind::Unified | MethodKind::UnifiedPenalized => {
            let (a1, a2) = (point[p], point[p + 1]);
            let state = link_state(&dataset.design, &beta.view(), a1, a2, rescale)?;
            state.lambda_tilde.mapv(|lt| unified_prob(lt, a1, a2))
        }
    };
    let train = Array1::from_iter(dataset.train_idx.iter().map(|&i| probs_all[i]));
    let test = Array1::from_iter(dataset.test_idx.iter().map(|&i| probs_all[i]));
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    pub(crate) fn noise_dataset(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut design = Array2::<f64>::zeros((n, 3));
        for i in 0..n {
            design[[i, 0]] = 1.0;
            design[[i, 1]] = StandardNormal.sample(&mut rng);
            design[[i, 2]] = StandardNormal.sample(&mut rng);
        }
        let y = Array1::from_shape_fn(n, |_| if rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 });
        Dataset::train_only(design, y, true).unwrap()
    }

    #[test]
    fn zero_beta_unit_alpha_is_pure_coin_flipping() {
        let d = noise_dataset(64, 1);
        let rescale = RescaleRule::for_dataset(&d);
        let params = UnifiedParams::new(Array1::zeros(3), 1.0, 1.0).unwrap();
        let ll = unified_loglik(&d, &params, &rescale, 0.0).unwrap();
        assert!((ll - 64.0 * 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn equal_alphas_are_symmetric_at_the_midpoint() {
        for alpha in [0.25, 0.5, 1.0, 2.0, 7.0] {
            let p = unified_prob(0.5, alpha, alpha);
            assert!((p - 0.5).abs() < 1e-15, "alpha {alpha}: {p}");
        }
    }

    /// Frozen regression constant from a high-precision evaluation of
    /// nu_plus / (nu_plus + nu_minus) at lambda_tilde = 0.7 with
    /// alpha1 = 0.5, alpha2 = 2 (nu_plus = 0.49, nu_minus = sqrt(0.3)).
    #[test]
    fn asymmetric_alphas_break_the_symmetry() {
        let p = unified_prob(0.7, 0.5, 2.0);
        assert!((p - 0.4721878660689715).abs() < 1e-12, "{p}");
        // The induced link is no longer symmetric around the midpoint.
        let q = unified_prob(0.3, 0.5, 2.0);
        assert!((p + q - 1.0).abs() > 1e-3);
    }

    #[test]
    fn unit_alpha_nonparametric_is_the_identity_link() {
        for lt in [0.01, 0.2, 0.5, 0.77, 0.99] {
            assert!((nonparametric_prob(lt, 1.0) - lt).abs() < 1e-15);
        }
        // Both links pass through one half at the midpoint.
        assert!((nonparametric_prob(0.5, 1.0) - 0.5).abs() < 1e-15);
        assert!((unified_prob(0.5, 1.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn penalty_subtracts_scaled_slope_norm() {
        let d = noise_dataset(32, 3);
        let rescale = RescaleRule::for_dataset(&d);
        let beta = arr1(&[0.4, 1.0, -2.0]);
        let free = nonparametric_loglik(&d, &beta, 1.0, &rescale, 0.0).unwrap();
        let taxed = nonparametric_loglik(&d, &beta, 1.0, &rescale, 2.5).unwrap();
        assert!((free - taxed - 2.5 * 5.0).abs() < 1e-10);
    }

    #[test]
    fn loglik_rejects_nonpositive_alpha() {
        let d = noise_dataset(16, 4);
        let rescale = RescaleRule::for_dataset(&d);
        let beta = Array1::zeros(3);
        assert!(matches!(
            nonparametric_loglik(&d, &beta, 0.0, &rescale, 0.0),
            Err(LoglikError::Model(ModelError::NonPositiveAlpha { .. }))
        ));
    }
}
