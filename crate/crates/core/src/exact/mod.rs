//! Closed-form moments, large-time expansions and regime analysis.

mod asymptotics;
mod gamma;
mod moments;

use thiserror::Error;

pub use asymptotics::{
    classify_baseline, classify_regime, residual_gap, second_moment_asymptotics,
    super_coefficient, AsymptoticExpansion, Path, PathPoint, Term, FIT_WINDOW,
};
pub use gamma::{gamma, gamma_ratio, harmonic, rgamma, HARMONIC_DIRECT_MAX};
pub use moments::{
    baseline_second_moment, first_moment, first_moment_2d, first_moment_2d_from,
    first_moment_asymptotic, first_moment_asymptotic_from, first_moment_from, ode_analogue,
    second_moment_2d, second_moment_exact, sigma2_exact, Evaluation, Method, MomentAlgebra,
    RESONANCE_GUARD,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("Γ(t+α)/Γ(t) is undefined for t={t}, α={alpha}")]
    Domain { t: u64, alpha: f64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error("resonant parameters: {0}")]
    Resonance(String),
}
