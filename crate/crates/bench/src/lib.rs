//! Shared fixtures for the criterion benches.

use stark_core::ModelParams;

pub fn subcritical_params(g: f64) -> ModelParams {
    ModelParams::new(1.0, 0.2, 0.7, g).expect("valid parameters")
}

pub fn near_critical_params(g: f64) -> ModelParams {
    ModelParams::new(1.0, 0.999, 0.05, g).expect("valid parameters")
}
