//! Independent ground truth: forward iteration of the moment recurrences and
//! brute-force expansion of every step history in exact rational arithmetic.
//!
//! Nothing here relies on the sufficient-statistic reduction or on the closed
//! forms; the conditional step law is rebuilt from the full history each time.

mod rational;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::model::{int, Field, Params1D, Params2D, StepLaw1D, StepLaw2D};

pub use rational::{exact_law, exact_law_2d, exact_s, exact_s_2d, to_rational};

/// Longest 1D history the enumerator expands by default (`2·3^7` leaves).
pub const ENUMERATION_CAP_1D: usize = 8;
/// Longest 2D history the enumerator expands by default (`4·5^4` leaves).
pub const ENUMERATION_CAP_2D: usize = 5;

/// Unit steps of the 2D walk in outcome order `+i, +j, -i, -j, 0`.
pub const DIRECTIONS_2D: [[i8; 2]; 5] = [[1, 0], [0, 1], [-1, 0], [0, -1], [0, 0]];
/// Steps of the 1D walk in outcome order `+1, -1, 0`.
pub const STEPS_1D: [i8; 3] = [1, -1, 0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration of histories of length {t} exceeds the cap {cap}")]
    CapExceeded { t: usize, cap: usize },
    #[error("checkpoints must be sorted, distinct and inside [1, {t_max}]")]
    InvalidCheckpoints { t_max: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub t_values: Vec<u64>,
    pub sigma2: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
}

pub(crate) fn check_checkpoints(t_max: u64, checkpoints: &[u64]) -> Result<(), OracleError> {
    let sorted = checkpoints.windows(2).all(|w| w[0] < w[1]);
    let inside = checkpoints.iter().all(|&t| t >= 1 && t <= t_max);
    if sorted && inside {
        Ok(())
    } else {
        Err(OracleError::InvalidCheckpoints { t_max })
    }
}

/// Iterates `<σ_t^2>`, `<X_t>` and `<X_t^2>` forward from their initial
/// values and records them at `checkpoints`.
pub fn iterate_recurrences(
    params: &Params1D,
    t_max: u64,
    checkpoints: &[u64],
) -> Result<MomentTable, OracleError> {
    check_checkpoints(t_max, checkpoints)?;
    let (eps, lam, gamma) = (params.eps(), params.eps() + params.r(), params.gamma());
    let mut table = MomentTable {
        t_values: checkpoints.to_vec(),
        sigma2: Vec::with_capacity(checkpoints.len()),
        m1: Vec::with_capacity(checkpoints.len()),
        m2: Vec::with_capacity(checkpoints.len()),
    };
    let (mut sigma2, mut m1, mut m2) = (1.0, 2.0 * params.s() - 1.0, 1.0);
    let mut t = 1u64;
    for &target in checkpoints {
        while t < target {
            let tau = t as f64;
            sigma2 = (1.0 - lam / tau) * sigma2 + eps / tau;
            m2 = (1.0 + 2.0 * gamma / tau) * m2 + sigma2;
            m1 *= 1.0 + gamma / tau;
            t += 1;
        }
        table.sigma2.push(sigma2);
        table.m1.push(m1);
        table.m2.push(m2);
    }
    Ok(table)
}

/// Conditional law of the next step over `(+1, -1, 0)`, averaged over a
/// uniformly chosen remembered step of the full `history`.
pub fn conditional_dist_full_history<F: Field>(history: &[i8], law: &StepLaw1D<F>) -> [F; 3] {
    assert!(!history.is_empty(), "the conditional law needs at least one past step");
    let two = int::<F>(2);
    let half_eps = law.eps.clone() / two;
    let restart = F::one() - law.eps.clone();
    let mut acc = [F::zero(), F::zero(), F::zero()];
    for &step in history {
        let row = match step {
            1 => [law.p.clone(), law.q.clone(), law.r.clone()],
            -1 => [law.q.clone(), law.p.clone(), law.r.clone()],
            0 => [half_eps.clone(), half_eps.clone(), restart.clone()],
            other => panic!("invalid 1D step {other}"),
        };
        for (a, v) in acc.iter_mut().zip(row) {
            *a = a.clone() + v;
        }
    }
    let t = int::<F>(history.len() as i64);
    acc.map(|a| a / t.clone())
}

fn direction_index(step: [i8; 2]) -> usize {
    DIRECTIONS_2D
        .iter()
        .position(|d| *d == step)
        .unwrap_or_else(|| panic!("invalid 2D step {step:?}"))
}

/// Conditional law of the next 2D step over `(+i, +j, -i, -j, 0)` from the full history.
pub fn conditional_dist_full_history_2d<F: Field>(
    history: &[[i8; 2]],
    law: &StepLaw2D<F>,
) -> [F; 5] {
    assert!(!history.is_empty(), "the conditional law needs at least one past step");
    let quarter_eps = law.eps.clone() / int::<F>(4);
    let mut acc: [F; 5] = std::array::from_fn(|_| F::zero());
    let mut add = |i: usize, v: F| acc[i] = acc[i].clone() + v;
    for &step in history {
        let k = direction_index(step);
        if k == 4 {
            for i in 0..4 {
                add(i, quarter_eps.clone());
            }
            add(4, F::one() - law.eps.clone());
        } else {
            // indices advance by one under the quarter turn A
            add(k, law.p.clone());
            add((k + 2) % 4, law.q.clone());
            add((k + 1) % 4, law.pp.clone());
            add((k + 3) % 4, law.qp.clone());
            add(4, law.r.clone());
        }
    }
    let t = int::<F>(history.len() as i64);
    acc.map(|a| a / t.clone())
}

/// Exact moments of the 1D walk at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoments {
    pub t: usize,
    pub m1: BigRational,
    pub m2: BigRational,
}

impl ExactMoments {
    pub fn m1_f64(&self) -> f64 {
        self.m1.to_f64().unwrap_or(f64::NAN)
    }
    pub fn m2_f64(&self) -> f64 {
        self.m2.to_f64().unwrap_or(f64::NAN)
    }
}

/// Exact moments of the 2D walk at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoments2D {
    pub t: usize,
    pub m1: [BigRational; 2],
    pub m2: BigRational,
}

impl ExactMoments2D {
    pub fn m1_f64(&self) -> [f64; 2] {
        self.m1.clone().map(|v| v.to_f64().unwrap_or(f64::NAN))
    }
    pub fn m2_f64(&self) -> f64 {
        self.m2.to_f64().unwrap_or(f64::NAN)
    }
}

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

struct Tree1D<'a> {
    law: &'a StepLaw1D<BigRational>,
    sums: Vec<(BigRational, BigRational)>,
    history: Vec<i8>,
}

impl Tree1D<'_> {
    fn expand(&mut self, prob: BigRational, x: i64, t_max: usize) {
        let t = self.history.len();
        let (m1, m2) = &mut self.sums[t - 1];
        *m1 += &prob * big(x);
        *m2 += &prob * big(x * x);
        if t == t_max {
            return;
        }
        let dist = conditional_dist_full_history(&self.history, self.law);
        for (step, w) in STEPS_1D.into_iter().zip(dist) {
            if w.is_zero() {
                continue;
            }
            self.history.push(step);
            self.expand(&prob * w, x + step as i64, t_max);
            self.history.pop();
        }
    }
}

/// Exact `<X_t>` and `<X_t^2>` for every `t` in `1..=t_max` by expanding all histories.
pub fn enumerate_exact_all(
    params: &Params1D,
    t_max: usize,
    cap: usize,
) -> Result<Vec<ExactMoments>, OracleError> {
    if t_max > cap {
        return Err(OracleError::CapExceeded { t: t_max, cap });
    }
    let law = exact_law(params);
    let s = exact_s(params);
    let mut tree = Tree1D {
        law: &law,
        sums: vec![(BigRational::zero(), BigRational::zero()); t_max],
        history: Vec::with_capacity(t_max),
    };
    for (step, prob) in [(1i8, s.clone()), (-1, big(1) - s)] {
        tree.history.push(step);
        tree.expand(prob, step as i64, t_max);
        tree.history.pop();
    }
    Ok(tree
        .sums
        .into_iter()
        .enumerate()
        .map(|(i, (m1, m2))| ExactMoments { t: i + 1, m1, m2 })
        .collect())
}

/// Exact moments at time `t <= 8`.
pub fn enumerate_exact(params: &Params1D, t: usize) -> Result<ExactMoments, OracleError> {
    if t == 0 {
        return Err(OracleError::InvalidCheckpoints { t_max: 0 });
    }
    let mut all = enumerate_exact_all(params, t, ENUMERATION_CAP_1D)?;
    Ok(all.pop().expect("t >= 1"))
}

struct Tree2D<'a> {
    law: &'a StepLaw2D<BigRational>,
    sums: Vec<([BigRational; 2], BigRational)>,
    history: Vec<[i8; 2]>,
}

impl Tree2D<'_> {
    fn expand(&mut self, prob: BigRational, x: [i64; 2], t_max: usize) {
        let t = self.history.len();
        let (m1, m2) = &mut self.sums[t - 1];
        m1[0] += &prob * big(x[0]);
        m1[1] += &prob * big(x[1]);
        *m2 += &prob * big(x[0] * x[0] + x[1] * x[1]);
        if t == t_max {
            return;
        }
        let dist = conditional_dist_full_history_2d(&self.history, self.law);
        for (step, w) in DIRECTIONS_2D.into_iter().zip(dist) {
            if w.is_zero() {
                continue;
            }
            self.history.push(step);
            self.expand(&prob * w, [x[0] + step[0] as i64, x[1] + step[1] as i64], t_max);
            self.history.pop();
        }
    }
}

pub fn enumerate_exact_2d_all(
    params: &Params2D,
    t_max: usize,
    cap: usize,
) -> Result<Vec<ExactMoments2D>, OracleError> {
    if t_max > cap {
        return Err(OracleError::CapExceeded { t: t_max, cap });
    }
    let law = exact_law_2d(params);
    let s = exact_s_2d(params);
    let zero = || BigRational::zero();
    let mut tree = Tree2D {
        law: &law,
        sums: vec![([zero(), zero()], zero()); t_max],
        history: Vec::with_capacity(t_max),
    };
    for (step, prob) in DIRECTIONS_2D[..4].iter().zip(s) {
        tree.history.push(*step);
        tree.expand(prob, [step[0] as i64, step[1] as i64], t_max);
        tree.history.pop();
    }
    Ok(tree
        .sums
        .into_iter()
        .enumerate()
        .map(|(i, (m1, m2))| ExactMoments2D { t: i + 1, m1, m2 })
        .collect())
}

/// Exact 2D moments at time `t <= 5`.
pub fn enumerate_exact_2d(params: &Params2D, t: usize) -> Result<ExactMoments2D, OracleError> {
    if t == 0 {
        return Err(OracleError::InvalidCheckpoints { t_max: 0 });
    }
    let mut all = enumerate_exact_2d_all(params, t, ENUMERATION_CAP_2D)?;
    Ok(all.pop().expect("t >= 1"))
}

/// Every sequence over the 1D alphabet of length `len`, in base-3 code order.
pub fn all_histories_1d(len: usize) -> impl Iterator<Item = Vec<i8>> {
    let count = 3usize.pow(len as u32);
    (0..count).map(move |mut code| {
        (0..len)
            .map(|_| {
                let s = STEPS_1D[code % 3];
                code /= 3;
                s
            })
            .collect()
    })
}

/// Every sequence over the 2D alphabet of length `len`, in base-5 code order.
pub fn all_histories_2d(len: usize) -> impl Iterator<Item = Vec<[i8; 2]>> {
    let count = 5usize.pow(len as u32);
    (0..count).map(move |mut code| {
        (0..len)
            .map(|_| {
                let s = DIRECTIONS_2D[code % 5];
                code /= 5;
                s
            })
            .collect()
    })
}
