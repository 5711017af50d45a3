use super::gamma::{euler_gamma, rgamma};
use super::moments::{MomentAlgebra, RESONANCE_GUARD};
use super::ExactError;
use crate::fit::{fit_power_law, log_spaced};
use crate::model::{Params1D, Regime, RegimeReport};

/// One term `coefficient · t^exponent` (times `ln t` when `has_log`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub exponent: f64,
    pub has_log: bool,
}

impl Term {
    fn new(coefficient: f64, exponent: f64) -> Self {
        Self {
            coefficient,
            exponent,
            has_log: false,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let v = self.coefficient * t.powf(self.exponent);
        if self.has_log {
            v * t.ln()
        } else {
            v
        }
    }
}

/// Large-time expansion of `<X_t^2>`, ordered by decreasing `(exponent, has_log)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion {
    pub terms: Vec<Term>,
    /// Set when some terms come from fitting recurrence output.
    pub fitted: bool,
}

impl AsymptoticExpansion {
    pub fn leading(&self) -> Term {
        self.terms[0]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.eval(t)).sum()
    }

    fn sorted(mut terms: Vec<Term>, fitted: bool) -> Self {
        terms.sort_by(|a, b| {
            (b.exponent, b.has_log as u8)
                .partial_cmp(&(a.exponent, a.has_log as u8))
                .expect("finite exponents")
        });
        Self { terms, fitted }
    }
}

/// Window on which resonant expansions are fitted.
pub const FIT_WINDOW: (u64, u64) = (10_000, 1_000_000);
const FIT_POINTS: usize = 25;

/// Fits `sign · c · t^a` to `m2(t) - lead(t)` sampled from the recurrence.
fn fit_remainder(algebra: &MomentAlgebra, lead: Option<Term>) -> Option<Term> {
    let ts = log_spaced(FIT_WINDOW.0, FIT_WINDOW.1, FIT_POINTS);
    let values = iterate_at(algebra, &ts);
    let residual: Vec<(f64, f64)> = ts
        .iter()
        .zip(&values)
        .map(|(&t, &m)| (t as f64, m - lead.map_or(0.0, |l| l.eval(t as f64))))
        .collect();
    let sign = residual.last()?.1.signum();
    if residual.iter().any(|&(_, v)| v.signum() != sign) {
        return None;
    }
    let abs: Vec<(f64, f64)> = residual.iter().map(|&(t, v)| (t, v.abs())).collect();
    let fit = fit_power_law(&abs).ok()?;
    Some(Term::new(sign * fit.log_coefficient.exp(), fit.exponent))
}

fn iterate_at(algebra: &MomentAlgebra, ts: &[u64]) -> Vec<f64> {
    let (eps, lam, gamma) = (algebra.eps(), algebra.eps() + algebra.r(), algebra.gamma());
    let mut out = Vec::with_capacity(ts.len());
    let (mut sigma2, mut m2) = (1.0, 1.0);
    let mut t = 1u64;
    for &target in ts {
        while t < target {
            let tau = t as f64;
            sigma2 = (1.0 - lam / tau) * sigma2 + eps / tau;
            m2 = (1.0 + 2.0 * gamma / tau) * m2 + sigma2;
            t += 1;
        }
        out.push(m2);
    }
    out
}

impl MomentAlgebra {
    pub fn asymptotics(&self) -> AsymptoticExpansion {
        let lam = self.lam();
        let kappa = self.kappa();
        if self.is_half() {
            let log = Term {
                coefficient: self.eps() / lam,
                exponent: 1.0,
                has_log: true,
            };
            if self.sigma2_resonant() {
                let rest = fit_remainder(self, Some(log));
                return AsymptoticExpansion::sorted(std::iter::once(log).chain(rest).collect(), true);
            }
            let linear = Term::new(self.half_linear_coeff() + euler_gamma() * self.eps() / lam, 1.0);
            let stop = Term::new(-self.c_const() / lam, kappa);
            return AsymptoticExpansion::sorted(vec![log, linear, stop], false);
        }
        if !self.m2_resonant() {
            return AsymptoticExpansion::sorted(
                vec![
                    Term::new(self.linear_coeff(), 1.0),
                    Term::new(self.stop_coeff(), kappa),
                    Term::new(self.memory_coeff(), 2.0 * self.gamma()),
                ],
                false,
            );
        }
        let lead = if (self.gamma() - 0.5).abs() < RESONANCE_GUARD {
            None
        } else if self.gamma() < 0.5 {
            Some(Term::new(self.linear_coeff(), 1.0))
        } else {
            Some(Term::new(self.memory_coeff(), 2.0 * self.gamma()))
        };
        let rest = fit_remainder(self, lead);
        let terms: Vec<Term> = lead.into_iter().chain(rest).collect();
        AsymptoticExpansion::sorted(terms, true)
    }

    /// Regime of the perturbed walk (`eps > 0`) or of the baseline (`eps = 0`).
    pub fn classify(&self) -> RegimeReport {
        if self.eps() == 0.0 {
            return classify_baseline_inner(self.gamma(), self.r());
        }
        let expansion = self.asymptotics();
        let gamma = self.gamma();
        let (regime, leading) = if self.is_half() {
            (Regime::LogAnomalous, expansion.terms[0])
        } else if gamma < 0.5 {
            (Regime::Diffusive, Term::new(self.linear_coeff(), 1.0))
        } else {
            (Regime::SuperDiffusive, Term::new(self.memory_coeff(), 2.0 * gamma))
        };
        let secondary_terms = expansion
            .terms
            .iter()
            .filter(|t| **t != leading)
            .map(|t| (t.exponent, t.coefficient))
            .collect();
        let residual_gap =
            (regime == Regime::Diffusive).then(|| leading.coefficient - 1.0 / self.r());
        RegimeReport {
            regime,
            leading_exponent: leading.exponent,
            leading_coefficient: leading.coefficient,
            secondary_terms,
            residual_gap,
            fitted: expansion.fitted,
        }
    }
}

pub fn second_moment_asymptotics(params: &Params1D) -> AsymptoticExpansion {
    MomentAlgebra::from_params(params).asymptotics()
}

pub fn classify_regime(params: &Params1D) -> RegimeReport {
    MomentAlgebra::from_params(params).classify()
}

/// Regime of the unperturbed (`eps = 0`) walk.
pub fn classify_baseline(gamma: f64, r: f64) -> Result<RegimeReport, ExactError> {
    MomentAlgebra::new(0.0, r, gamma).map(|a| a.classify())
}

fn classify_baseline_inner(gamma: f64, r: f64) -> RegimeReport {
    let denom = 2.0 * gamma + r - 1.0;
    let stop = 1.0 - r;
    if denom.abs() < RESONANCE_GUARD {
        let algebra = MomentAlgebra::new(0.0, r, gamma).expect("validated by caller");
        let fit = fit_remainder(&algebra, None).expect("baseline moment is positive");
        return RegimeReport {
            regime: Regime::SubDiffusive,
            leading_exponent: fit.exponent,
            leading_coefficient: fit.coefficient,
            secondary_terms: Vec::new(),
            residual_gap: None,
            fitted: true,
        };
    }
    let memory = Term::new(rgamma(2.0 * gamma) / denom, 2.0 * gamma);
    let stopped = Term::new(-rgamma(stop) / denom, stop);
    let (lead, rest) = if memory.coefficient != 0.0 && memory.exponent > stopped.exponent {
        (memory, stopped)
    } else {
        (stopped, memory)
    };
    let regime = if gamma == 0.5 {
        Regime::Diffusive
    } else if lead.exponent < 1.0 {
        Regime::SubDiffusive
    } else {
        Regime::SuperDiffusive
    };
    let secondary_terms = if rest.coefficient != 0.0 {
        vec![(rest.exponent, rest.coefficient)]
    } else {
        Vec::new()
    };
    RegimeReport {
        regime,
        leading_exponent: lead.exponent,
        leading_coefficient: lead.coefficient,
        secondary_terms,
        residual_gap: (regime == Regime::Diffusive).then(|| lead.coefficient - 1.0 / r),
        fitted: false,
    }
}

/// One-parameter families `gamma(eps, r)` along which diffusivity is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Path {
    /// `gamma = (1 - eps) / 2`
    Regular,
    /// `gamma = (1 - eps r) / 2`
    Residual,
    /// `gamma = (1 + eps r) / 2`
    Super,
}

impl Path {
    pub fn gamma(&self, eps: f64, r: f64) -> f64 {
        match self {
            Path::Regular => 0.5 * (1.0 - eps),
            Path::Residual => 0.5 * (1.0 - eps * r),
            Path::Super => 0.5 * (1.0 + eps * r),
        }
    }
}

impl std::str::FromStr for Path {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "regular" => Ok(Path::Regular),
            "residual" => Ok(Path::Residual),
            "super" => Ok(Path::Super),
            other => Err(format!("unknown path `{other}` (expected regular|residual|super)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub gamma: f64,
    /// Diffusivity, or the super-diffusive coefficient on [`Path::Super`].
    pub value: f64,
    /// `value` minus its unperturbed counterpart (`1/r`, or `1/r^2 + 1/r` on the super path).
    pub gap: f64,
}

/// Coefficient of `t^{1 + eps r}` on the super-diffusive path.
pub fn super_coefficient(eps: f64, r: f64) -> f64 {
    let lam = eps + r;
    rgamma(1.0 + eps * r) * (1.0 / (r * lam) + r / (lam * (lam + eps * r)))
}

/// Diffusivity (or super-diffusive coefficient) along a path and its excess
/// over the unperturbed walk. `eps = 0` gives the limiting values.
pub fn residual_gap(eps: f64, r: f64, path: Path) -> Result<PathPoint, ExactError> {
    if !(0.0..1.0).contains(&eps) || !(r > 0.0 && r < 1.0) {
        return Err(ExactError::InvalidInput(format!(
            "need 0 <= eps < 1 and 0 < r < 1 (eps={eps}, r={r})"
        )));
    }
    let gamma = path.gamma(eps, r);
    let p = 0.5 * (1.0 - r + gamma);
    let q = 0.5 * (1.0 - r - gamma);
    let inside = |v: f64| v > 0.0 && v < 1.0;
    if !(inside(gamma) && inside(p) && inside(q)) {
        return Err(ExactError::InvalidInput(format!(
            "path {path:?} leaves the admissible region at eps={eps}, r={r} (gamma={gamma}, p={p}, q={q})"
        )));
    }
    let (value, gap) = match path {
        Path::Regular => {
            let v = 1.0 / (eps + r);
            (v, v - 1.0 / r)
        }
        Path::Residual => {
            let v = 1.0 / (r * (eps + r));
            (v, v - 1.0 / r)
        }
        Path::Super => {
            let v = super_coefficient(eps, r);
            (v, v - (1.0 / (r * r) + 1.0 / r))
        }
    };
    Ok(PathPoint { gamma, value, gap })
}
