//! Direct maximization of the exponent-family log-likelihoods.
//!
//! Used for the nesting check (the unified maximum must dominate the
//! equal-exponent slice) and for parameter-recovery diagnostics. The
//! search is Nelder-Mead over `(beta..., log alpha...)` with the
//! log-exponents projected into their bounds before every evaluation,
//! restarted from a zero start, random starts, and any caller-supplied
//! starts; the reported maximum includes the start points themselves, so
//! seeding the unconstrained search with the constrained maximizer makes
//! the nesting inequality hold by construction.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{nonparametric_loglik, unified_loglik, LoglikError};
use crate::model::{Dataset, RescaleRule, UnifiedParams};

const ALPHA_LOG_BOUNDS: (f64, f64) = (-2.302585092994046, 2.302585092994046); // ln 0.1 .. ln 10

#[derive(Debug, Clone)]
pub struct MaximizeOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self { restarts: 4, max_iters: 600, seed: 0 }
    }
}

/// Maximize the unified log-likelihood, optionally on the
/// `alpha1 == alpha2` slice. Returns the maximizer and its value.
pub fn maximize_unified(
    dataset: &Dataset,
    rescale: &RescaleRule,
    constrain_equal: bool,
    opts: &MaximizeOptions,
) -> Result<(UnifiedParams, f64), LoglikError> {
    maximize_unified_with_starts(dataset, rescale, constrain_equal, &[], opts)
}

/// As [`maximize_unified`] with extra start vectors laid out as
/// `(beta..., log alpha...)` in the run's own dimensionality.
pub fn maximize_unified_with_starts(
    dataset: &Dataset,
    rescale: &RescaleRule,
    constrain_equal: bool,
    extra_starts: &[Vec<f64>],
    opts: &MaximizeOptions,
) -> Result<(UnifiedParams, f64), LoglikError> {
    let p = dataset.n_params();
    let n_alpha = if constrain_equal { 1 } else { 2 };
    let objective = |x: &[f64]| -> f64 {
        let beta = Array1::from_iter(x[..p].iter().copied());
        let la1 = x[p].clamp(ALPHA_LOG_BOUNDS.0, ALPHA_LOG_BOUNDS.1);
        let la2 = if constrain_equal {
            la1
        } else {
            x[p + 1].clamp(ALPHA_LOG_BOUNDS.0, ALPHA_LOG_BOUNDS.1)
        };
        match UnifiedParams::new(beta, la1.exp(), la2.exp())
            .map_err(LoglikError::from)
            .and_then(|params| unified_loglik(dataset, &params, rescale, 0.0))
        {
            Ok(v) => v,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let (x, value) = best_over_starts(&objective, p + n_alpha, extra_starts, opts);
    let beta = Array1::from_iter(x[..p].iter().copied());
    let a1 = x[p].clamp(ALPHA_LOG_BOUNDS.0, ALPHA_LOG_BOUNDS.1).exp();
    let a2 = if constrain_equal {
        a1
    } else {
        x[p + 1].clamp(ALPHA_LOG_BOUNDS.0, ALPHA_LOG_BOUNDS.1).exp()
    };
    Ok((UnifiedParams::new(beta, a1, a2)?, value))
}

/// Maximize the non-unified log-likelihood. Returns `(beta, alpha, value)`.
pub fn maximize_nonparametric(
    dataset: &Dataset,
    rescale: &RescaleRule,
    opts: &MaximizeOptions,
) -> Result<(Array1<f64>, f64, f64), LoglikError> {
    let p = dataset.n_params();
    let objective = |x: &[f64]| -> f64 {
        let beta = Array1::from_iter(x[..p].iter().copied());
        let alpha = x[p].clamp(ALPHA_LOG_BOUNDS.0, ALPHA_LOG_BOUNDS.1).exp();
        nonparametric_loglik(dataset, &beta, alpha, rescale, 0.0).unwrap_or(f64::NEG_INFINITY)
    };
    let (x, value) = best_over_starts(&objective, p + 1, &[], opts);
    let beta = Array1::from_iter(x[..p].iter().copied());
    let alpha = x[p].clamp(ALPHA_LOG_BOUNDS.0, ALPHA_LOG_BOUNDS.1).exp();
    Ok((beta, alpha, value))
}

fn best_over_starts(
    objective: &dyn Fn(&[f64]) -> f64,
    dims: usize,
    extra_starts: &[Vec<f64>],
    opts: &MaximizeOptions,
) -> (Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dims]];
    for _ in 0..opts.restarts {
        starts.push((0..dims).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect());
    }
    starts.extend(extra_starts.iter().cloned());

    let mut best_x = starts[0].clone();
    let mut best_f = objective(&best_x);
    for start in &starts {
        let f_start = objective(start);
        if f_start > best_f {
            best_f = f_start;
            best_x = start.clone();
        }
        let (x, f) = nelder_mead_max(objective, start, opts.max_iters);
        if f > best_f {
            best_f = f;
            best_x = x;
        }
    }
    (best_x, best_f)
}

/// Standard Nelder-Mead on `-f`, returning the best vertex found.
fn nelder_mead_max(
    objective: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let d = start.len();
    let f = |x: &[f64]| -objective(x);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(start.to_vec());
    for i in 0..d {
        let mut v = start.to_vec();
        v[i] += 0.25;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iters {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];
        if (values[worst] - values[best]).abs() < 1e-12 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| {
                order[..d].iter().map(|&i| simplex[i][j]).sum::<f64>() / d as f64
            })
            .collect();
        let blend = |t: f64| -> Vec<f64> {
            (0..d).map(|j| centroid[j] + t * (centroid[j] - simplex[worst][j])).collect()
        };
        let reflected = blend(1.0);
        let f_reflected = f(&reflected);
        if f_reflected < values[best] {
            let expanded = blend(2.0);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            let contracted = blend(-0.5);
            let f_contracted = f(&contracted);
            if f_contracted < values[worst] {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                // Shrink toward the best vertex.
                for i in 0..=d {
                    if i == best {
                        continue;
                    }
                    for j in 0..d {
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    }
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best].clone(), -values[best])
}
