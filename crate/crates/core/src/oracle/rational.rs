//! Exact rational images of floating-point parameters.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::model::{Params1D, Params2D, StepLaw1D, StepLaw2D};

const MAX_DENOMINATOR: i128 = 1 << 40;

/// The simplest fraction whose nearest double is `x`, or the exact binary
/// value of `x` when no fraction with a modest denominator rounds to it.
pub fn to_rational(x: f64) -> BigRational {
    assert!(x.is_finite(), "cannot convert {x} to a rational");
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > MAX_DENOMINATOR {
            break;
        }
        if (h2 as f64) / (k2 as f64) == x {
            return BigRational::new(BigInt::from(h2), BigInt::from(k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rest - a;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    BigRational::from_float(x).expect("finite")
}

/// Exact step law with `r` fixed by normalization.
pub fn exact_law(params: &Params1D) -> StepLaw1D<BigRational> {
    let p = to_rational(params.p());
    let q = to_rational(params.q());
    let r = BigRational::one() - &p - &q;
    StepLaw1D { p, q, r, eps: to_rational(params.eps()) }
}

pub fn exact_s(params: &Params1D) -> BigRational {
    to_rational(params.s())
}

pub fn exact_law_2d(params: &Params2D) -> StepLaw2D<BigRational> {
    let p = to_rational(params.p());
    let q = to_rational(params.q());
    let pp = to_rational(params.pp());
    let qp = to_rational(params.qp());
    let r = BigRational::one() - &p - &q - &pp - &qp;
    StepLaw2D { p, q, pp, qp, r, eps: to_rational(params.eps()) }
}

/// Initial direction weights with the last one fixed by normalization.
pub fn exact_s_2d(params: &Params2D) -> [BigRational; 4] {
    let s = params.s();
    let a = to_rational(s[0]);
    let b = to_rational(s[1]);
    let c = to_rational(s[2]);
    let d = BigRational::one() - &a - &b - &c;
    [a, b, c, d]
}
