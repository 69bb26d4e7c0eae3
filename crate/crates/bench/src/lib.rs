//! Shared fixtures for the criterion benchmarks.

use mestbench_core::dgp::{generate, SimConfig, SimForm, SimLink, SimulatedData};

/// A balanced logit-generated dataset of the given size.
pub fn logit_dataset(n: usize, seed: u64) -> SimulatedData {
    let config = SimConfig::new(n, SimForm::Linear, SimLink::Logit, 0.5, seed)
        .expect("valid benchmark config");
    generate(&config).expect("benchmark data generates")
}
