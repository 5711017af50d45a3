//! Gamma-function building blocks: `Γ(x)`, the entire reciprocal `1/Γ(x)`,
//! the ratio `Γ(t+α)/Γ(t)` and harmonic numbers.
//!
//! Everything is anchored at the integer `20`: arguments are split into an
//! integer part and a fraction `f ∈ [0, 1)` (exact in binary), `Γ(20 + f)` is
//! obtained from `19!` and a Stirling-difference series for
//! `ln Γ(20+f) - ln Γ(20)`, and the remaining shift is a short product of
//! exactly formed factors `f + k`.

use super::ExactError;

const ANCHOR: f64 = 20.0;
/// 19! is exactly representable (2^16 times an odd 41-bit integer).
const FACT19: f64 = 121_645_100_408_832_000.0;
/// `B_{2k} / (2k (2k-1))` for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Largest `t` for which harmonic numbers are summed term by term.
pub const HARMONIC_DIRECT_MAX: u64 = 1_000_000;

fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut acc = 0.0;
    for c in STIRLING {
        acc += c * pow;
        pow *= inv2;
    }
    acc
}

/// `ln Γ(x + a) - ln Γ(x)` for `x >= 20` and `x + a >= 20`.
fn ln_ratio_large(x: f64, a: f64) -> f64 {
    debug_assert!(x >= ANCHOR && x + a >= ANCHOR);
    a * x.ln() + (x + a - 0.5) * (a / x).ln_1p() - a + (stirling_tail(x + a) - stirling_tail(x))
}

/// `Γ(20 + f)` for `f ∈ [0, 1)`.
fn gamma_anchor(f: f64) -> f64 {
    if f == 0.0 {
        FACT19
    } else {
        FACT19 * ln_ratio_large(ANCHOR, f).exp()
    }
}

/// Double-double value `hi + lo` used to carry long products of shift factors.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    const ONE: Dd = Dd(1.0, 0.0);

    /// `a + b` without rounding error.
    fn sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn mul(self, y: Dd) -> Dd {
        let p = self.0 * y.0;
        let e = self.0.mul_add(y.0, -p) + (self.0 * y.1 + self.1 * y.0);
        let s = p + e;
        Dd(s, e - (s - p))
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }

    /// `v / self`.
    fn divide(self, v: f64) -> f64 {
        let q = v / self.0;
        q - q * (self.1 / self.0)
    }

    fn scale(self, v: f64) -> f64 {
        v * self.0 + v * self.1
    }
}

/// `Π_{k=lo}^{hi-1} (x + k)` in double-double.
fn shift_product(x: f64, lo: f64, hi: f64) -> Dd {
    let mut acc = Dd::ONE;
    let mut k = lo;
    while k < hi {
        acc = acc.mul(Dd::sum(x, k));
        k += 1.0;
    }
    acc
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    assert!(x > 0.0, "gamma is only evaluated for positive arguments, got {x}");
    let m = x.floor();
    let f = x - m;
    let base = gamma_anchor(f);
    if m < ANCHOR {
        shift_product(f, m, ANCHOR).divide(base)
    } else if m < 160.0 {
        shift_product(f, ANCHOR, m).scale(base)
    } else {
        (ln_ratio_large(ANCHOR, x - ANCHOR) + FACT19.ln()).exp()
    }
}

/// `1/Γ(x)`, an entire function: zero at `0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x > 0.0 {
        return 1.0 / gamma(x);
    }
    let m = x.floor();
    if x == m {
        return 0.0;
    }
    // Γ(x - m) = Γ(x) · x(x + 1)···(x - m - 1)
    shift_product(x, 0.0, -m).scale(1.0) / gamma(x - m)
}

fn rising(x: f64, n: u32) -> f64 {
    (0..n).map(|k| x + k as f64).product()
}

/// `Γ(t + α) / Γ(t)`.
///
/// Integer `α` is evaluated as a rising (or falling) factorial product; any
/// other `α` through the anchored Stirling difference.
pub fn gamma_ratio(t: u64, alpha: f64) -> Result<f64, ExactError> {
    let x = t as f64;
    if t == 0 || !alpha.is_finite() || x + alpha <= 0.0 {
        return Err(ExactError::Domain { t, alpha });
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    if alpha == alpha.round() && alpha.abs() <= 64.0 {
        return Ok(gamma_ratio_product(x, alpha as i32));
    }
    Ok(gamma_ratio_stirling(x, alpha))
}

pub(crate) fn gamma_ratio_product(x: f64, n: i32) -> f64 {
    if n >= 0 {
        rising(x, n as u32)
    } else {
        let m = (-n) as u32;
        1.0 / rising(x - m as f64, m)
    }
}

pub(crate) fn gamma_ratio_stirling(x: f64, alpha: f64) -> f64 {
    let low = x.min(x + alpha);
    let shift = if low < ANCHOR { (ANCHOR - low).ceil() } else { 0.0 };
    let num = shift_product(x, 0.0, shift);
    let den = shift_product(alpha, x, x + shift);
    let ratio = num.mul(Dd(1.0 / den.0, 0.0));
    ln_ratio_large(x + shift, alpha).exp() * ratio.value() * (1.0 - den.1 / den.0)
}

fn pairwise_reciprocals(lo: u64, hi: u64) -> f64 {
    if hi - lo < 32 {
        (lo..=hi).rev().map(|k| 1.0 / k as f64).sum()
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_reciprocals(lo, mid) + pairwise_reciprocals(mid + 1, hi)
    }
}

pub(crate) fn harmonic_direct(t: u64) -> f64 {
    if t == 0 {
        0.0
    } else {
        pairwise_reciprocals(1, t)
    }
}

pub(crate) fn harmonic_asymptotic(t: u64) -> f64 {
    let x = t as f64;
    let inv2 = 1.0 / (x * x);
    x.ln() + EULER_GAMMA + 0.5 / x - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0))
}

/// `H_t = Σ_{k=1}^t 1/k`.
pub fn harmonic(t: u64) -> f64 {
    if t <= HARMONIC_DIRECT_MAX {
        harmonic_direct(t)
    } else {
        harmonic_asymptotic(t)
    }
}

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ratio_trivial_cases() {
        assert_eq!(gamma_ratio(5, 0.0).unwrap(), 1.0);
        assert_eq!(gamma_ratio(1, 1.0).unwrap(), 1.0);
        assert_eq!(gamma_ratio(4, 2.0).unwrap(), 20.0);
        assert_eq!(gamma_ratio(4, -2.0).unwrap(), 1.0 / 6.0);
    }

    #[test]
    fn ratio_half_integer_product_oracle() {
        // Γ(3.5)/Γ(3) = 2.5 · 1.5 · 0.5 · Γ(0.5) / 2 with Γ(0.5) = √π
        let oracle = 2.5 * 1.5 * 0.5 * PI.sqrt() / 2.0;
        let got = gamma_ratio(3, 0.5).unwrap();
        assert!(rel(got, oracle) < 1e-14, "{got} vs {oracle}");
        assert!((got - 1.661_675).abs() < 5e-7);
    }

    #[test]
    fn ratio_matches_shifted_products() {
        // Γ(t+α)/Γ(t) = Γ(1+α)/Γ(1) · Π_{k=1}^{t-1} (k+α)/k
        for &alpha in &[-0.95, -0.3, 0.25, 0.5, 0.9, 1.37, 1.98] {
            let mut oracle = gamma(1.0 + alpha);
            for t in 1..=200u64 {
                if t > 1 {
                    oracle *= (t as f64 - 1.0 + alpha) / (t as f64 - 1.0);
                }
                let got = gamma_ratio(t, alpha).unwrap();
                assert!(rel(got, oracle) < 1e-12, "t={t} α={alpha}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn integer_paths_agree_with_stirling_path() {
        for t in [1u64, 2, 7, 19, 20, 21, 100, 10_000, 1_000_000] {
            for n in [-1i32, 1, 2] {
                if t as i64 + n as i64 <= 0 {
                    continue;
                }
                let product = gamma_ratio_product(t as f64, n);
                let stirling = gamma_ratio_stirling(t as f64, n as f64);
                assert!(rel(stirling, product) < 1e-12, "t={t} n={n}");
            }
        }
    }

    #[test]
    fn ratio_domain_error() {
        assert!(gamma_ratio(1, -1.0).is_err());
        assert!(gamma_ratio(2, -2.5).is_err());
        assert!(gamma_ratio(0, 0.5).is_err());
        assert!(gamma_ratio(1, -0.5).is_ok());
    }

    #[test]
    fn ratio_approaches_power() {
        for &alpha in &[-1.0, -0.5, 0.3, 1.0] {
            let t = 1_000_000u64;
            let r = gamma_ratio(t, alpha).unwrap() / (t as f64).powf(alpha);
            assert!((r - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn gamma_known_values() {
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-15);
        assert!(rel(gamma(1.5), PI.sqrt() / 2.0) < 1e-15);
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(5.0), 24.0);
        assert!(rel(gamma(25.0), 620_448_401_733_239_439_360_000.0) < 1e-15);
    }

    #[test]
    fn gamma_matches_statrs() {
        for i in 1..400 {
            let x = i as f64 * 0.0737;
            let a = gamma(x);
            let b = statrs::function::gamma::gamma(x);
            assert!(rel(a, b) < 5e-13, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn reciprocal_gamma_is_entire() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-1.0), 0.0);
        assert_eq!(rgamma(-2.0), 0.0);
        // Γ(-0.5) = -2√π, Γ(-1.5) = 4√π/3
        assert!(rel(rgamma(-0.5), -0.5 / PI.sqrt()) < 1e-15);
        assert!(rel(rgamma(-1.5), 3.0 / (4.0 * PI.sqrt())) < 1e-15);
        // continuity through the pole at 0: 1/Γ(x) ≈ x near 0
        assert!(rel(rgamma(1e-10), 1e-10) < 1e-9);
        assert!(rel(rgamma(-1e-10), -1e-10) < 1e-9);
    }

    #[test]
    fn harmonic_paths_agree_at_crossover() {
        for t in [10_000u64, 500_000, HARMONIC_DIRECT_MAX] {
            let d = harmonic_direct(t);
            let a = harmonic_asymptotic(t);
            assert!(rel(a, d) < 1e-12, "t={t}: {d} vs {a}");
        }
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
        assert!(rel(harmonic(4), 25.0 / 12.0) < 1e-15);
    }
}
