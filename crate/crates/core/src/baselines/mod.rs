//! Comparison estimators: maximum-likelihood and ridge logistic regression
//! fit by IRLS, and the latent-variable Bayesian probit Gibbs sampler.

mod irls;
mod probit;

pub use irls::{fit_mle_logistic, fit_penalized_logistic, IrlsSettings};
pub use probit::{fit_bayes_probit, GibbsSettings};

use thiserror::Error;

use crate::model::ModelError;

/// 99% two-sided normal quantile used for Wald intervals.
pub const Z_995: f64 = 2.5758293035489008;

#[derive(Debug, Error)]
pub enum FitError {
    /// The likelihood is maximized at infinity. Carries the last iterate so
    /// callers can still inspect the diverging direction.
    #[error("perfect separation detected: coefficients diverging")]
    SeparationDetected { last_beta: Vec<f64> },
    #[error("design matrix is rank deficient on the training split")]
    RankDeficient,
    #[error("IRLS did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Numerically stable logistic function.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
