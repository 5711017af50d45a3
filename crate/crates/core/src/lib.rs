//! Exact and stochastic analysis of the elephant random walk with stops,
//! perturbed by occasional symmetric restarts.
//!
//! * [`model`]: validated parameters and shared step-law types.
//! * [`exact`]: closed-form first and second moments, expansions, regimes.
//! * [`oracle`]: recurrence iteration and exhaustive history enumeration.
//! * [`sim`]: sufficient-statistic Monte Carlo ensembles in 1D and 2D.

pub mod exact;
pub mod fit;
pub mod model;
pub mod oracle;
pub mod sim;

pub use model::{Params1D, Params2D, ParamError, Regime, RegimeReport};
