//! Simulation data-generating processes.
//!
//! Covariates are standard normal, outcomes come from a logit, probit, or
//! complementary log-log link applied to one of three functional forms, and
//! the class balance is controlled by shifting the intercept until the
//! expected success rate hits the target.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::model::{apply_model_spec, Dataset, ModelError, ModelSpec, Standardization, Transform};
use crate::seed::derive_seed;

/// Default true coefficients (intercept, x1, x2) for every study cell.
pub const DEFAULT_BETA_TRUE: [f64; 3] = [0.5, 1.0, -1.0];

/// Intercept search range for balance targeting.
const INTERCEPT_RANGE: (f64, f64) = (-20.0, 20.0);

#[derive(Debug, Error)]
pub enum DgpError {
    #[error("sample size must be at least 10, got {0}")]
    SampleTooSmall(usize),
    #[error("balance must lie in (0, 0.5], got {0}")]
    BalanceOutOfRange(f64),
    #[error("covariate matrix must have 2 columns, got {0}")]
    ShapeMismatch(usize),
    #[error("target success rate {target} is unreachable for intercepts in [-20, 20]")]
    NoBracket { target: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Outcome-generating link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SimLink {
    Logit,
    Probit,
    Cloglog,
}

impl SimLink {
    pub const ALL: [SimLink; 3] = [SimLink::Logit, SimLink::Probit, SimLink::Cloglog];

    /// Success probability at linear predictor `eta`.
    pub fn prob(self, eta: f64) -> f64 {
        match self {
            SimLink::Logit => {
                if eta >= 0.0 {
                    1.0 / (1.0 + (-eta).exp())
                } else {
                    let e = eta.exp();
                    e / (1.0 + e)
                }
            }
            SimLink::Probit => Normal::standard().cdf(eta),
            SimLink::Cloglog => {
                // 1 - exp(-exp(eta)), saturating instead of overflowing.
                if eta > 700.0 {
                    1.0
                } else {
                    1.0 - (-eta.exp()).exp()
                }
            }
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "logit" => Some(SimLink::Logit),
            "probit" => Some(SimLink::Probit),
            "cloglog" => Some(SimLink::Cloglog),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SimLink::Logit => "logit",
            SimLink::Probit => "probit",
            SimLink::Cloglog => "cloglog",
        }
    }
}

/// Functional form of the linear predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SimForm {
    /// Intercept + X1 + X2.
    Linear,
    /// Intercept + X1 + exp(X2).
    Mixed,
    /// Intercept + exp(X1) + sin(X2).
    Nonlinear,
}

impl SimForm {
    pub const ALL: [SimForm; 3] = [SimForm::Linear, SimForm::Mixed, SimForm::Nonlinear];

    pub fn transforms(self) -> [Transform; 2] {
        match self {
            SimForm::Linear => [Transform::Identity, Transform::Identity],
            SimForm::Mixed => [Transform::Identity, Transform::Exp],
            SimForm::Nonlinear => [Transform::Exp, Transform::Sin],
        }
    }

    /// The (correctly specified) model spec a fit of this form uses.
    pub fn model_spec(self) -> ModelSpec {
        ModelSpec::new(self.transforms().to_vec(), true)
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "linear" => Some(SimForm::Linear),
            "mixed" => Some(SimForm::Mixed),
            "nonlinear" => Some(SimForm::Nonlinear),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SimForm::Linear => "linear",
            SimForm::Mixed => "mixed",
            SimForm::Nonlinear => "nonlinear",
        }
    }
}

/// One simulation cell: size, form, link, balance target, truth, and seed.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: usize,
    pub form: SimForm,
    pub link: SimLink,
    /// Target success proportion in (0, 0.5].
    pub balance: f64,
    pub beta_true: [f64; 3],
    pub seed: u64,
}

impl SimConfig {
    pub fn new(
        n: usize,
        form: SimForm,
        link: SimLink,
        balance: f64,
        seed: u64,
    ) -> Result<Self, DgpError> {
        Self::with_beta(n, form, link, balance, DEFAULT_BETA_TRUE, seed)
    }

    pub fn with_beta(
        n: usize,
        form: SimForm,
        link: SimLink,
        balance: f64,
        beta_true: [f64; 3],
        seed: u64,
    ) -> Result<Self, DgpError> {
        if n < 10 {
            return Err(DgpError::SampleTooSmall(n));
        }
        if !(balance > 0.0 && balance <= 0.5) {
            return Err(DgpError::BalanceOutOfRange(balance));
        }
        Ok(Self { n, form, link, balance, beta_true, seed })
    }
}

/// Draw an n x 2 matrix of i.i.d. standard normals, reproducible from `seed`.
pub fn gen_covariates(n: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, 2), |_| StandardNormal.sample(&mut rng))
}

/// `eta_i = b1 + b2 t1(x_i1) + b3 t2(x_i2)` for the form's transforms.
pub fn linear_predictor(
    form: SimForm,
    x: &Array2<f64>,
    beta_true: &[f64; 3],
) -> Result<Array1<f64>, DgpError> {
    if x.ncols() != 2 {
        return Err(DgpError::ShapeMismatch(x.ncols()));
    }
    let [t1, t2] = form.transforms();
    Ok(Array1::from_shape_fn(x.nrows(), |i| {
        beta_true[0] + beta_true[1] * t1.apply(x[[i, 0]]) + beta_true[2] * t2.apply(x[[i, 1]])
    }))
}

/// Bernoulli outcomes under the link, reproducible from `seed`.
pub fn gen_outcomes(link: SimLink, eta: &Array1<f64>, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    eta.mapv(|e| {
        let p = link.prob(e);
        if rng.random::<f64>() < p {
            1.0
        } else {
            0.0
        }
    })
}

/// Adjust the intercept so the mean success probability over the generated
/// covariates matches `config.balance` (within 0.005).
pub fn rebalance(config: &SimConfig) -> Result<f64, DgpError> {
    rebalance_to(config, config.balance)
}

/// As [`rebalance`] but with an explicit target, which may fall outside the
/// config's own balance range (unreachable targets report `NoBracket`).
pub fn rebalance_to(config: &SimConfig, target: f64) -> Result<f64, DgpError> {
    let x = gen_covariates(config.n, covariate_seed(config.seed));
    let [t1, t2] = config.form.transforms();
    let base: Vec<f64> = (0..config.n)
        .map(|i| {
            config.beta_true[1] * t1.apply(x[[i, 0]])
                + config.beta_true[2] * t2.apply(x[[i, 1]])
        })
        .collect();
    let mean_prob = |c: f64| {
        base.iter().map(|&b| config.link.prob(c + b)).sum::<f64>() / config.n as f64
    };
    let (mut lo, mut hi) = INTERCEPT_RANGE;
    if mean_prob(lo) > target || mean_prob(hi) < target {
        return Err(DgpError::NoBracket { target });
    }
    // mean_prob is nondecreasing in the intercept, so bisection converges.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_prob(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let c = 0.5 * (lo + hi);
    if (mean_prob(c) - target).abs() > 0.005 {
        return Err(DgpError::NoBracket { target });
    }
    Ok(c)
}

/// A generated dataset with everything a study cell needs to score fits.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    /// Transformed, standardized design with all rows in the training split.
    pub dataset: Dataset,
    pub standardization: Standardization,
    /// Intercept actually used for outcome generation (raw scale).
    pub adjusted_intercept: f64,
    /// True coefficients mapped onto the standardized design scale. This is
    /// the exact affine image of (adjusted intercept, b2, b3), so coverage
    /// against it is meaningful for correctly specified fits.
    pub beta_true_design: Array1<f64>,
    /// Share of ones actually realized in the outcomes.
    pub realized_balance: f64,
}

/// Run the full pipeline: covariates, balance targeting, outcomes, and the
/// standardized design under the correctly specified model spec.
pub fn generate(config: &SimConfig) -> Result<SimulatedData, DgpError> {
    let x = gen_covariates(config.n, covariate_seed(config.seed));
    let adjusted_intercept = rebalance(config)?;
    let beta_gen = [adjusted_intercept, config.beta_true[1], config.beta_true[2]];
    let eta = linear_predictor(config.form, &x, &beta_gen)?;
    let y = gen_outcomes(config.link, &eta, outcome_seed(config.seed));

    let spec = config.form.model_spec();
    let (design, stats) = apply_model_spec(&x, &spec, None)?;
    let realized_balance = y.iter().sum::<f64>() / config.n as f64;
    let dataset = Dataset::train_only(design, y, true)?;

    // eta = b0 + sum_j b_j (m_j + s_j z_j): slopes scale by s, intercept
    // absorbs the means.
    let mut beta_true_design = Array1::zeros(3);
    beta_true_design[0] = adjusted_intercept
        + beta_gen[1] * stats.mean[1]
        + beta_gen[2] * stats.mean[2];
    beta_true_design[1] = beta_gen[1] * stats.sd[1];
    beta_true_design[2] = beta_gen[2] * stats.sd[2];

    Ok(SimulatedData {
        dataset,
        standardization: stats,
        adjusted_intercept,
        beta_true_design,
        realized_balance,
    })
}

fn covariate_seed(seed: u64) -> u64 {
    derive_seed(seed, 0)
}

fn outcome_seed(seed: u64) -> u64 {
    derive_seed(seed, 1)
}
