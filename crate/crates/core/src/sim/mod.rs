//! Monte Carlo simulation on the reduced state.
//!
//! The conditional step law depends on the history only through
//! `(t, Σσ_k, Σσ_k²)` in 1D and `(t, Σσ_k, n_x, n_y)` in 2D, so a walker
//! carries a constant-size state. The reduction is checked against
//! [`crate::oracle::conditional_dist_full_history`] in the tests.

mod ensemble;
mod stream;

pub use ensemble::{
    default_checkpoints, fit_exponent, run_ensemble, run_ensemble_2d, EnsembleConfig, MomentCurve,
    SimError, DEFAULT_MEMORY_CAP, WALKER_BLOCK,
};
pub use stream::WalkerStream;

use crate::model::{int, Field, Params1D, Params2D, StepLaw1D, StepLaw2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkerState1D {
    pub t: u64,
    pub x: i64,
    /// Number of nonzero steps so far.
    pub n: u64,
}

impl WalkerState1D {
    /// Statistics of an explicit history.
    pub fn from_history(history: &[i8]) -> Self {
        Self {
            t: history.len() as u64,
            x: history.iter().map(|&s| s as i64).sum(),
            n: history.iter().filter(|&&s| s != 0).count() as u64,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.x.unsigned_abs() <= self.n && self.n <= self.t && (self.n as i64 - self.x) % 2 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkerState2D {
    pub t: u64,
    pub x: [i64; 2],
    pub nx: u64,
    pub ny: u64,
}

impl WalkerState2D {
    pub fn from_history(history: &[[i8; 2]]) -> Self {
        let mut s = Self { t: history.len() as u64, x: [0, 0], nx: 0, ny: 0 };
        for step in history {
            s.x[0] += step[0] as i64;
            s.x[1] += step[1] as i64;
            s.nx += (step[0] != 0) as u64;
            s.ny += (step[1] != 0) as u64;
        }
        s
    }

    pub fn is_valid(&self) -> bool {
        self.x[0].unsigned_abs() <= self.nx
            && self.x[1].unsigned_abs() <= self.ny
            && self.nx + self.ny <= self.t
            && (self.nx as i64 - self.x[0]) % 2 == 0
            && (self.ny as i64 - self.x[1]) % 2 == 0
    }
}

/// Law of the next step over `(+1, -1, 0)` from the reduced state, in any field.
pub fn step_distribution_in<F: Field>(state: &WalkerState1D, law: &StepLaw1D<F>) -> [F; 3] {
    let t = int::<F>(state.t as i64);
    let n = int::<F>(state.n as i64);
    let x = int::<F>(state.x);
    let two_t = int::<F>(2) * t.clone();
    let half_eps = law.eps.clone() / int::<F>(2);
    let moving = n.clone() * (law.p.clone() + law.q.clone() - law.eps.clone());
    let drift = x * law.gamma();
    let plus = (moving.clone() + drift.clone()) / two_t.clone() + half_eps.clone();
    let minus = (moving - drift) / two_t + half_eps;
    let zero = n * (law.r.clone() + law.eps.clone() - F::one()) / t + F::one() - law.eps.clone();
    [plus, minus, zero]
}

/// Floating-point form of the reduced 1D law with the parameter
/// combinations folded once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel1D {
    moving: f64,
    gamma: f64,
    half_eps: f64,
    stop: f64,
    restart: f64,
}

impl Kernel1D {
    pub fn new(params: &Params1D) -> Self {
        let law = params.law();
        Self {
            moving: law.p + law.q - law.eps,
            gamma: law.p - law.q,
            half_eps: 0.5 * law.eps,
            stop: law.r + law.eps - 1.0,
            restart: 1.0 - law.eps,
        }
    }

    #[inline]
    fn moving_pair(&self, state: &WalkerState1D) -> (f64, f64, f64) {
        let inv = 1.0 / state.t as f64;
        let half = 0.5 * inv;
        let moving = state.n as f64 * self.moving;
        let drift = state.x as f64 * self.gamma;
        ((moving + drift) * half + self.half_eps, (moving - drift) * half + self.half_eps, inv)
    }

    #[inline]
    pub fn distribution(&self, state: &WalkerState1D) -> [f64; 3] {
        let (plus, minus, inv) = self.moving_pair(state);
        [plus, minus, state.n as f64 * self.stop * inv + self.restart]
    }

    #[inline]
    pub fn advance(&self, state: &WalkerState1D, u: f64) -> WalkerState1D {
        let (plus, minus, _) = self.moving_pair(state);
        // branch-free: the outcome is unpredictable by construction
        let up = (u < plus) as i64;
        let down = (u < plus + minus) as i64 - up;
        WalkerState1D { t: state.t + 1, x: state.x + up - down, n: state.n + (up + down) as u64 }
    }
}

pub fn step_distribution(state: &WalkerState1D, params: &Params1D) -> [f64; 3] {
    Kernel1D::new(params).distribution(state)
}

/// Law of the next 2D step over `(+i, +j, -i, -j, 0)` from the reduced state.
pub fn step_distribution_2d_in<F: Field>(state: &WalkerState2D, law: &StepLaw2D<F>) -> [F; 5] {
    let t = int::<F>(state.t as i64);
    let two_t = int::<F>(2) * t.clone();
    let nx = int::<F>(state.nx as i64);
    let ny = int::<F>(state.ny as i64);
    let x1 = int::<F>(state.x[0]);
    let x2 = int::<F>(state.x[1]);
    let (g, gp) = (law.gamma(), law.gammap());
    let axis = law.p.clone() + law.q.clone();
    let cross = law.pp.clone() + law.qp.clone();
    let leak = (nx.clone() + ny.clone()) * law.eps.clone() / int::<F>(2);
    let quarter = law.eps.clone() / int::<F>(4);
    let along_x = nx.clone() * axis.clone() + ny.clone() * cross.clone() - leak.clone();
    let along_y = ny.clone() * axis + nx.clone() * cross - leak;
    let side = |along: &F, drift: F| (along.clone() + drift) / two_t.clone() + quarter.clone();
    let pi = side(&along_x, x1.clone() * g.clone() - x2.clone() * gp.clone());
    let pj = side(&along_y, x2.clone() * g.clone() + x1.clone() * gp.clone());
    let mi = side(&along_x, F::zero() - x1.clone() * g.clone() + x2.clone() * gp.clone());
    let mj = side(&along_y, F::zero() - x2 * g - x1 * gp);
    let zero = (nx + ny) * (law.r.clone() + law.eps.clone() - F::one()) / t + F::one()
        - law.eps.clone();
    [pi, pj, mi, mj, zero]
}

pub fn step_distribution_2d(state: &WalkerState2D, params: &Params2D) -> [f64; 5] {
    step_distribution_2d_in(state, &params.law())
}

/// Index of the outcome selected by `u` under inverse-transform sampling.
#[inline]
fn pick<const N: usize>(dist: &[f64; N], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in dist.iter().enumerate().take(N - 1) {
        acc += w;
        if u < acc {
            return i;
        }
    }
    N - 1
}

/// One step of the walk driven by a single uniform `u ∈ [0, 1)`.
pub fn advance(state: &WalkerState1D, params: &Params1D, u: f64) -> WalkerState1D {
    Kernel1D::new(params).advance(state, u)
}

pub fn init_walker(params: &Params1D, u: f64) -> WalkerState1D {
    let x = if u < params.s() { 1 } else { -1 };
    WalkerState1D { t: 1, x, n: 1 }
}

#[inline]
pub(crate) fn advance_2d_with(
    state: &WalkerState2D,
    law: &StepLaw2D<f64>,
    u: f64,
) -> WalkerState2D {
    let dist = step_distribution_2d_in(state, law);
    let mut next = WalkerState2D { t: state.t + 1, ..*state };
    match pick(&dist, u) {
        0 => {
            next.x[0] += 1;
            next.nx += 1;
        }
        1 => {
            next.x[1] += 1;
            next.ny += 1;
        }
        2 => {
            next.x[0] -= 1;
            next.nx += 1;
        }
        3 => {
            next.x[1] -= 1;
            next.ny += 1;
        }
        _ => {}
    }
    next
}

pub fn advance_2d(state: &WalkerState2D, params: &Params2D, u: f64) -> WalkerState2D {
    advance_2d_with(state, &params.law(), u)
}

/// First step along `+i, +j, -i, -j` with weights `s`.
pub fn init_walker_2d(params: &Params2D, u: f64) -> WalkerState2D {
    let k = pick(&params.s(), u);
    let mut state = WalkerState2D { t: 1, x: [0, 0], nx: 0, ny: 0 };
    match k {
        0 => state.x[0] = 1,
        1 => state.x[1] = 1,
        2 => state.x[0] = -1,
        _ => state.x[1] = -1,
    }
    if k % 2 == 0 {
        state.nx = 1;
    } else {
        state.ny = 1;
    }
    state
}
