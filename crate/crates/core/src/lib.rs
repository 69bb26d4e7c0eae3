//! Binary-outcome regression estimators built on a signed-measure link
//! formulation, together with the classical baselines they are compared
//! against and the machinery to benchmark all of them.
//!
//! The crate is organized around eight pieces:
//!
//! * [`model`] — shared domain types: covariate transforms, datasets,
//!   exponent-family link states, and fit summaries.
//! * [`dgp`] — simulation data-generating processes (logit / probit /
//!   complementary log-log) with controlled class balance.
//! * [`baselines`] — maximum-likelihood and ridge logistic regression via
//!   IRLS, and a latent-variable Bayesian probit Gibbs sampler.
//! * [`proposed`] — the exponent-family likelihoods (unified and
//!   non-unified) and the adaptive random-walk Metropolis sampler that
//!   fits them, penalized or not.
//! * [`metrics`] — ARS, normalized AIC, interval coverage, CI width, AUC.
//! * [`ingest`] — CSV ingestion with recipes for the four empirical
//!   datasets (intoxication, higgs, challenger, bank).
//! * [`harness`] — the simulation study grid and empirical benchmark
//!   runners.
//! * [`rum`] — additive random utility extraction from fitted models.

pub mod baselines;
pub mod dgp;
pub mod harness;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod proposed;
pub mod rum;
pub mod seed;
pub mod textkv;

mod linalg;

pub use model::{
    Dataset, FitDiagnostics, FitResult, LinkState, ModelError, ModelSpec, RescaleRule,
    Standardization, Transform, UnifiedParams,
};
