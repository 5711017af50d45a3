use super::gamma::{gamma_ratio, harmonic, rgamma};
use super::ExactError;
use crate::model::{Params1D, Params2D};

/// Radius around a vanishing closed-form denominator inside which values are
/// produced by iterating the recurrences instead.
pub const RESONANCE_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Recurrence,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Recurrence => "recurrence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub method: Method,
}

impl Evaluation {
    fn closed(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
        }
    }
    fn iterated(value: f64) -> Self {
        Self {
            value,
            method: Method::Recurrence,
        }
    }
}

/// The second-moment algebra as a function of `(eps, r, gamma)` alone.
///
/// Unlike [`Params1D`] this accepts `eps = 0` and any `eps` in `[0, 1)`, so
/// the closed forms can be probed towards the unperturbed limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentAlgebra {
    eps: f64,
    r: f64,
    gamma: f64,
}

impl MomentAlgebra {
    pub fn new(eps: f64, r: f64, gamma: f64) -> Result<Self, ExactError> {
        let ok = (0.0..1.0).contains(&eps)
            && r > 0.0
            && r < 1.0
            && gamma.is_finite()
            && gamma.abs() < 1.0;
        if !ok {
            return Err(ExactError::InvalidInput(format!(
                "moment algebra needs 0 <= eps < 1, 0 < r < 1, |gamma| < 1 (eps={eps}, r={r}, gamma={gamma})"
            )));
        }
        Ok(Self { eps, r, gamma })
    }

    pub fn from_params(params: &Params1D) -> Self {
        Self {
            eps: params.eps(),
            r: params.r(),
            gamma: params.gamma(),
        }
    }

    pub fn from_params_2d(params: &Params2D) -> Self {
        Self {
            eps: params.eps(),
            r: params.r(),
            gamma: params.gamma(),
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `eps + r`, the decay rate of the stop fraction.
    pub(crate) fn lam(&self) -> f64 {
        self.eps + self.r
    }

    /// `1 - eps - r`.
    pub(crate) fn kappa(&self) -> f64 {
        1.0 - self.eps - self.r
    }

    /// `C = r / ((eps + r) Γ(1 - eps - r))`.
    pub fn c_const(&self) -> f64 {
        self.r * rgamma(self.kappa()) / self.lam()
    }

    pub(crate) fn is_half(&self) -> bool {
        self.gamma == 0.5
    }

    pub(crate) fn sigma2_resonant(&self) -> bool {
        self.kappa().abs() < RESONANCE_GUARD
    }

    pub(crate) fn m2_resonant(&self) -> bool {
        self.sigma2_resonant()
            || (self.kappa() - 2.0 * self.gamma).abs() < RESONANCE_GUARD
            || (!self.is_half() && (self.gamma - 0.5).abs() < RESONANCE_GUARD)
    }

    /// Coefficient of the linear term for `gamma != 1/2`.
    pub(crate) fn linear_coeff(&self) -> f64 {
        self.eps / ((1.0 - 2.0 * self.gamma) * self.lam())
    }

    /// Coefficient of `Γ(t + 1 - eps - r)/Γ(t)` for `gamma != 1/2`.
    pub(crate) fn stop_coeff(&self) -> f64 {
        self.c_const() / (self.kappa() - 2.0 * self.gamma)
    }

    /// Coefficient of `Γ(t + 2 gamma)/Γ(t)` fixed by `<X_1^2> = 1`, `gamma != 1/2`.
    pub(crate) fn memory_coeff(&self) -> f64 {
        let lam = self.lam();
        -rgamma(2.0 * self.gamma)
            * (self.eps / (lam * (1.0 - 2.0 * self.gamma))
                + self.r / (lam * (self.kappa() - 2.0 * self.gamma)))
    }

    /// Coefficient of the linear term `D t` for `gamma = 1/2`, fixed by `<X_1^2> = 1`.
    pub(crate) fn half_linear_coeff(&self) -> f64 {
        self.r / (self.lam() * self.lam())
    }

    /// `<σ_t^2>`, the probability that step `t` is nonzero.
    pub fn sigma2(&self, t: u64) -> Result<Evaluation, ExactError> {
        check_t(t)?;
        if t == 1 {
            return Ok(Evaluation::closed(1.0));
        }
        if self.sigma2_resonant() {
            return Ok(Evaluation::iterated(self.iterate(t).0));
        }
        let lam = self.lam();
        let value = self.c_const() * gamma_ratio(t, -lam)? + self.eps / lam;
        Ok(Evaluation::closed(value))
    }

    /// `<X_t^2>`.
    pub fn second_moment(&self, t: u64) -> Result<Evaluation, ExactError> {
        check_t(t)?;
        if t == 1 {
            return Ok(Evaluation::closed(1.0));
        }
        if self.m2_resonant() {
            return Ok(Evaluation::iterated(self.iterate(t).1));
        }
        let tf = t as f64;
        let kappa = self.kappa();
        let value = if self.is_half() {
            let lam = self.lam();
            self.eps / lam * tf * harmonic(t) - self.c_const() / lam * gamma_ratio(t, kappa)?
                + self.half_linear_coeff() * tf
        } else {
            self.linear_coeff() * tf
                + self.stop_coeff() * gamma_ratio(t, kappa)?
                + self.memory_coeff() * gamma_ratio(t, 2.0 * self.gamma)?
        };
        Ok(Evaluation::closed(value))
    }

    /// Forward iteration of both recurrences up to `t`; returns `(<σ_t^2>, <X_t^2>)`.
    pub fn iterate(&self, t: u64) -> (f64, f64) {
        let mut sigma2 = 1.0;
        let mut m2 = 1.0;
        for tau in 1..t {
            let tau = tau as f64;
            sigma2 = (1.0 - self.lam() / tau) * sigma2 + self.eps / tau;
            m2 = (1.0 + 2.0 * self.gamma / tau) * m2 + sigma2;
        }
        (sigma2, m2)
    }
}

fn check_t(t: u64) -> Result<(), ExactError> {
    if t == 0 {
        Err(ExactError::InvalidInput("time must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `<X_t> = (2s-1) Γ(t+γ) / (Γ(1+γ) Γ(t))`.
pub fn first_moment(params: &Params1D, t: u64) -> Result<f64, ExactError> {
    first_moment_from(2.0 * params.s() - 1.0, params.gamma(), t)
}

/// First moment from an arbitrary initial mean `<X_1>`.
pub fn first_moment_from(initial_mean: f64, gamma: f64, t: u64) -> Result<f64, ExactError> {
    check_t(t)?;
    if t == 1 || initial_mean == 0.0 {
        return Ok(initial_mean);
    }
    Ok(initial_mean * gamma_ratio(t, gamma)? * rgamma(1.0 + gamma))
}

/// `((2s-1)/Γ(1+γ), γ)`: coefficient and exponent of `<X_t>` for large `t`.
pub fn first_moment_asymptotic(params: &Params1D) -> (f64, f64) {
    first_moment_asymptotic_from(2.0 * params.s() - 1.0, params.gamma())
}

pub fn first_moment_asymptotic_from(initial_mean: f64, gamma: f64) -> (f64, f64) {
    (initial_mean * rgamma(1.0 + gamma), gamma)
}

pub fn sigma2_exact(params: &Params1D, t: u64) -> Result<Evaluation, ExactError> {
    MomentAlgebra::from_params(params).sigma2(t)
}

pub fn second_moment_exact(params: &Params1D, t: u64) -> Result<Evaluation, ExactError> {
    MomentAlgebra::from_params(params).second_moment(t)
}

/// `<|X_t|^2>` of the 2D walk. The rotation bias `gamma'` drops out since
/// `X · AX = 0`, so this is the 1D algebra at the 2D `(eps, r, gamma)`.
pub fn second_moment_2d(params: &Params2D, t: u64) -> Result<Evaluation, ExactError> {
    MomentAlgebra::from_params_2d(params).second_moment(t)
}

/// `<X_t>` of the 2D walk, `Π_{k<t} (I + (γ + γ'A)/k)` applied to `<X_1>`.
///
/// There is no closed form; this costs `t` matrix-vector products.
pub fn first_moment_2d(params: &Params2D, t: u64) -> Result<[f64; 2], ExactError> {
    let s = params.s();
    first_moment_2d_from([s[0] - s[2], s[1] - s[3]], params.gamma(), params.gammap(), t)
}

pub fn first_moment_2d_from(
    initial_mean: [f64; 2],
    gamma: f64,
    gammap: f64,
    t: u64,
) -> Result<[f64; 2], ExactError> {
    check_t(t)?;
    let [mut x, mut y] = initial_mean;
    for k in 1..t {
        let k = k as f64;
        // (γ + γ'A)(x, y) with A(x, y) = (-y, x)
        let dx = (gamma * x - gammap * y) / k;
        let dy = (gamma * y + gammap * x) / k;
        x += dx;
        y += dy;
    }
    Ok([x, y])
}

/// Second moment of the unperturbed walk (`eps = 0`):
/// `(Γ(t+2γ)/Γ(2γ) - Γ(1+t-r)/Γ(1-r)) / ((2γ+r-1) Γ(t))`.
pub fn baseline_second_moment(gamma: f64, r: f64, t: u64) -> Result<Evaluation, ExactError> {
    let algebra = MomentAlgebra::new(0.0, r, gamma)?;
    check_t(t)?;
    if t == 1 {
        return Ok(Evaluation::closed(1.0));
    }
    let denom = 2.0 * gamma + r - 1.0;
    if denom.abs() < RESONANCE_GUARD {
        return Ok(Evaluation::iterated(algebra.iterate(t).1));
    }
    let value = (rgamma(2.0 * gamma) * gamma_ratio(t, 2.0 * gamma)?
        - rgamma(1.0 - r) * gamma_ratio(t, 1.0 - r)?)
        / denom;
    Ok(Evaluation::closed(value))
}

/// Solution `(x(t), y(t))` of the continuous analogue
/// `x' + (eps+r)x/t = eps/t`, `y' - 2γ y/t = x`
/// with integration constants `c` (for `x`) and `d` (homogeneous part of `y`).
pub fn ode_analogue(params: &Params1D, c: f64, d: f64, t: f64) -> Result<(f64, f64), ExactError> {
    if !(t > 0.0) {
        return Err(ExactError::InvalidInput(format!("ode time must be positive, got {t}")));
    }
    let a = MomentAlgebra::from_params(params);
    let lam = a.lam();
    let kappa = a.kappa();
    let gamma = a.gamma;
    let x = c * t.powf(-lam) + a.eps / lam;
    if a.is_half() {
        let y = a.eps / lam * t * t.ln() - c / lam * t.powf(kappa) + d * t;
        return Ok((x, y));
    }
    let resonant = (1.0 - 2.0 * gamma).abs() < RESONANCE_GUARD
        || (kappa - 2.0 * gamma).abs() < RESONANCE_GUARD;
    if resonant {
        return Err(ExactError::Resonance(format!(
            "continuous analogue has a vanishing denominator at gamma={gamma}, eps+r={lam}"
        )));
    }
    let y = a.linear_coeff() * t + c / (kappa - 2.0 * gamma) * t.powf(kappa) + d * t.powf(2.0 * gamma);
    Ok((x, y))
}
