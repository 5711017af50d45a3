//! Model parameters for the perturbed walk and the quantities derived from them.
//!
//! A remembered nonzero step is copied with probability `p`, reversed with
//! probability `q` and turned into a stop with probability `r`. A remembered
//! stop restarts motion with probability `eps` (split evenly over the lattice
//! directions). In two dimensions a remembered step can also be rotated by a
//! quarter turn counter-clockwise (`pp`) or clockwise (`qp`).

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};
use thiserror::Error;

/// Absolute tolerance for the normalization constraints.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("probabilities must sum to 1 (got {sum}, tolerance {NORMALIZATION_TOL})")]
    Normalization { sum: f64 },
    #[error("parameter `{name}` = {value} must lie strictly inside (0, 1)")]
    Range { name: &'static str, value: f64 },
}

fn open_unit(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(ParamError::Range { name, value })
    }
}

fn normalized(sum: f64) -> Result<(), ParamError> {
    if (sum - 1.0).abs() > NORMALIZATION_TOL || !sum.is_finite() {
        Err(ParamError::Normalization { sum })
    } else {
        Ok(())
    }
}

/// Validated one-dimensional parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params1D {
    p: f64,
    q: f64,
    r: f64,
    eps: f64,
    s: f64,
    gamma: f64,
}

impl Params1D {
    pub fn new(p: f64, q: f64, r: f64, eps: f64, s: f64) -> Result<Self, ParamError> {
        let p = open_unit("p", p)?;
        let q = open_unit("q", q)?;
        let r = open_unit("r", r)?;
        let eps = open_unit("eps", eps)?;
        let s = open_unit("s", s)?;
        normalized(p + q + r)?;
        Ok(Self {
            p,
            q,
            r,
            eps,
            s,
            gamma: p - q,
        })
    }

    /// Builds parameters from the memory parameter `gamma = p - q` and the stop
    /// probability, with `p = (1 - r + gamma) / 2` and `q = (1 - r - gamma) / 2`.
    ///
    /// The requested `gamma` is stored as given, so `gamma = 0.5` selects the
    /// exact half-memory branch even when `p - q` rounds one ulp away from it.
    pub fn from_gamma(gamma: f64, r: f64, eps: f64, s: f64) -> Result<Self, ParamError> {
        let p = 0.5 * (1.0 - r + gamma);
        let q = 0.5 * (1.0 - r - gamma);
        let mut params = Self::new(p, q, r, eps, s)?;
        params.gamma = gamma;
        Ok(params)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same parameters with a different initial right-step probability.
    pub fn with_s(&self, s: f64) -> Result<Self, ParamError> {
        let s = open_unit("s", s)?;
        Ok(Self { s, ..*self })
    }

    pub fn law(&self) -> StepLaw1D<f64> {
        StepLaw1D {
            p: self.p,
            q: self.q,
            r: self.r,
            eps: self.eps,
        }
    }
}

/// Validated two-dimensional parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params2D {
    p: f64,
    q: f64,
    pp: f64,
    qp: f64,
    r: f64,
    eps: f64,
    s: [f64; 4],
    gamma: f64,
    gammap: f64,
}

impl Params2D {
    /// `s` holds the initial probabilities of moving along `+i, +j, -i, -j`.
    pub fn new(
        p: f64,
        q: f64,
        pp: f64,
        qp: f64,
        r: f64,
        eps: f64,
        s: [f64; 4],
    ) -> Result<Self, ParamError> {
        let p = open_unit("p", p)?;
        let q = open_unit("q", q)?;
        let pp = open_unit("pp", pp)?;
        let qp = open_unit("qp", qp)?;
        let r = open_unit("r", r)?;
        let eps = open_unit("eps", eps)?;
        const NAMES: [&str; 4] = ["s1", "s2", "s3", "s4"];
        for (name, &v) in NAMES.iter().zip(&s) {
            open_unit(name, v)?;
        }
        normalized(s.iter().sum())?;
        normalized(p + q + pp + qp + r)?;
        Ok(Self {
            p,
            q,
            pp,
            qp,
            r,
            eps,
            s,
            gamma: p - q,
            gammap: pp - qp,
        })
    }

    /// Builds parameters from `gamma`, `gamma'` and the stop probability.
    /// `axis_share` is the fraction of the moving mass `1 - r` assigned to
    /// copy/reverse (`p + q`); the remainder goes to the two rotations.
    pub fn from_gammas(
        gamma: f64,
        gammap: f64,
        r: f64,
        eps: f64,
        s: [f64; 4],
        axis_share: f64,
    ) -> Result<Self, ParamError> {
        let axis = axis_share * (1.0 - r);
        let turn = (1.0 - axis_share) * (1.0 - r);
        let mut params = Self::new(
            0.5 * (axis + gamma),
            0.5 * (axis - gamma),
            0.5 * (turn + gammap),
            0.5 * (turn - gammap),
            r,
            eps,
            s,
        )?;
        params.gamma = gamma;
        params.gammap = gammap;
        Ok(params)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn pp(&self) -> f64 {
        self.pp
    }
    pub fn qp(&self) -> f64 {
        self.qp
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn s(&self) -> [f64; 4] {
        self.s
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn gammap(&self) -> f64 {
        self.gammap
    }

    /// Swaps the two rotation probabilities, which negates `gamma'`.
    pub fn mirrored(&self) -> Self {
        Self {
            pp: self.qp,
            qp: self.pp,
            gammap: -self.gammap,
            ..*self
        }
    }

    pub fn law(&self) -> StepLaw2D<f64> {
        StepLaw2D {
            p: self.p,
            q: self.q,
            pp: self.pp,
            qp: self.qp,
            r: self.r,
            eps: self.eps,
        }
    }
}

/// Scalar field the step laws are evaluated in: `f64` for simulation and
/// exact rationals for the enumeration oracles.
pub trait Field: Clone + PartialEq + Debug + Num + FromPrimitive {}

impl<T: Clone + PartialEq + Debug + Num + FromPrimitive> Field for T {}

pub(crate) fn int<F: Field>(v: i64) -> F {
    F::from_i64(v).expect("integer is representable in every field")
}

/// Per-remembered-step transition probabilities of the 1D walk.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLaw1D<F> {
    pub p: F,
    pub q: F,
    pub r: F,
    pub eps: F,
}

impl<F: Field> StepLaw1D<F> {
    pub fn gamma(&self) -> F {
        self.p.clone() - self.q.clone()
    }
}

/// Per-remembered-step transition probabilities of the 2D walk.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLaw2D<F> {
    pub p: F,
    pub q: F,
    pub pp: F,
    pub qp: F,
    pub r: F,
    pub eps: F,
}

impl<F: Field> StepLaw2D<F> {
    pub fn gamma(&self) -> F {
        self.p.clone() - self.q.clone()
    }
    pub fn gammap(&self) -> F {
        self.pp.clone() - self.qp.clone()
    }
}

/// Large-time behaviour of the mean squared displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SubDiffusive,
    Diffusive,
    LogAnomalous,
    SuperDiffusive,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SubDiffusive => "sub_diffusive",
            Regime::Diffusive => "diffusive",
            Regime::LogAnomalous => "log_anomalous",
            Regime::SuperDiffusive => "super_diffusive",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    pub leading_exponent: f64,
    pub leading_coefficient: f64,
    /// Remaining `(exponent, coefficient)` pairs in decreasing order.
    pub secondary_terms: Vec<(f64, f64)>,
    /// Diffusivity minus the unperturbed diffusivity `1/r`, for diffusive regimes.
    pub residual_gap: Option<f64>,
    /// True when part of the report comes from a numerical fit.
    pub fitted: bool,
}

impl RegimeReport {
    pub fn diffusivity(&self) -> Option<f64> {
        (self.regime == Regime::Diffusive).then_some(self.leading_coefficient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_is_p_minus_q() {
        let params = Params1D::new(0.55, 0.25, 0.2, 0.1, 0.5).unwrap();
        assert!((params.gamma() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_unnormalized_1d() {
        assert!(matches!(
            Params1D::new(0.5, 0.5, 0.2, 0.1, 0.5),
            Err(ParamError::Normalization { .. })
        ));
    }

    #[test]
    fn eps_must_be_strictly_positive() {
        assert!(matches!(
            Params1D::new(0.4, 0.4, 0.2, 0.0, 0.5),
            Err(ParamError::Range { name: "eps", .. })
        ));
        assert!(Params1D::new(0.4, 0.4, 0.2, 1.0, 0.5).is_err());
        assert!(Params1D::new(0.4, 0.4, 0.2, f64::NAN, 0.5).is_err());
    }

    #[test]
    fn from_gamma_keeps_requested_gamma() {
        let params = Params1D::from_gamma(0.5, 0.2, 0.1, 0.5).unwrap();
        assert_eq!(params.gamma(), 0.5);
        assert!((params.p() - 0.65).abs() < 1e-15);
        assert!((params.q() - 0.15).abs() < 1e-15);
        assert!(Params1D::from_gamma(0.9, 0.2, 0.1, 0.5).is_err());
    }

    #[test]
    fn validates_2d() {
        let quarter = [0.25; 4];
        let params = Params2D::new(0.3, 0.1, 0.2, 0.2, 0.2, 0.1, quarter).unwrap();
        assert!((params.gamma() - 0.2).abs() < 1e-15);
        assert_eq!(params.gammap(), 0.0);

        assert!(matches!(
            Params2D::new(0.3, 0.1, 0.2, 0.2, 0.1, 0.1, quarter),
            Err(ParamError::Normalization { .. })
        ));

        let sym = Params2D::new(0.25, 0.25, 0.15, 0.15, 0.2, 0.05, quarter).unwrap();
        assert_eq!(sym.gamma(), 0.0);
        assert_eq!(sym.gammap(), 0.0);
    }

    #[test]
    fn rejects_printed_four_term_constraint() {
        // p + q + q' + r = 1 alone is not accepted: p' must be accounted for.
        assert!(Params2D::new(0.3, 0.1, 0.2, 0.2, 0.4, 0.1, [0.25; 4]).is_err());
    }

    #[test]
    fn rejects_bad_initial_direction_law() {
        assert!(Params2D::new(0.3, 0.1, 0.2, 0.2, 0.2, 0.1, [0.3, 0.3, 0.3, 0.3]).is_err());
        assert!(Params2D::new(0.3, 0.1, 0.2, 0.2, 0.2, 0.1, [1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn mirrored_negates_gammap() {
        let params = Params2D::from_gammas(0.3, 0.1, 0.2, 0.1, [0.25; 4], 0.5).unwrap();
        let m = params.mirrored();
        assert_eq!(m.gammap(), -params.gammap());
        assert_eq!(m.gamma(), params.gamma());
    }
}
