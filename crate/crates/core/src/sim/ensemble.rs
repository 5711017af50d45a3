//! Ensemble runner: walkers are split into fixed index blocks, each block
//! accumulates integer moment sums at every checkpoint, and the blocks are
//! combined in index order. Integer sums are exact, so the result does not
//! depend on how blocks are scheduled across workers.

use rayon::prelude::*;
use thiserror::Error;

use super::stream::WalkerStream;
use super::{advance_2d_with, init_walker, init_walker_2d, Kernel1D};
use crate::fit::{fit_power_law, FitError, PowerLawFit};
use crate::model::{Params1D, Params2D};
use crate::oracle::check_checkpoints;

/// Walkers per scheduling block.
pub const WALKER_BLOCK: u64 = 4096;
/// Walkers advanced in lockstep inside a block; each keeps its own stream.
const LANES: u64 = 16;
/// Default bound on the bytes held by per-block accumulators.
pub const DEFAULT_MEMORY_CAP: u64 = 512 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("accumulators need {needed} bytes, above the cap of {cap} bytes")]
    Resource { needed: u64, cap: u64 },
    #[error("invalid ensemble configuration: {0}")]
    Config(String),
    #[error("moment sums overflowed 128-bit accumulators")]
    Overflow,
    #[error(transparent)]
    Fit(#[from] FitError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub walkers: u64,
    pub t_max: u64,
    pub checkpoints: Vec<u64>,
    pub master_seed: u64,
    pub worker_count: usize,
    pub memory_cap: u64,
}

impl EnsembleConfig {
    pub fn new(walkers: u64, t_max: u64, master_seed: u64) -> Self {
        Self {
            walkers,
            t_max,
            checkpoints: default_checkpoints(t_max),
            master_seed,
            worker_count: 1,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<u64>) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn with_workers(mut self, worker_count: usize) -> Self {
        self.worker_count = worker_count;
        self
    }

    fn validate(&self, bytes_per_checkpoint: u64) -> Result<(), SimError> {
        if self.walkers == 0 || self.t_max == 0 || self.worker_count == 0 {
            return Err(SimError::Config("walkers, t_max and worker_count must be positive".into()));
        }
        if self.checkpoints.is_empty() {
            return Err(SimError::Config("no checkpoints".into()));
        }
        check_checkpoints(self.t_max, &self.checkpoints)
            .map_err(|e| SimError::Config(e.to_string()))?;
        let blocks = self.walkers.div_ceil(WALKER_BLOCK);
        let needed = blocks
            .saturating_mul(self.checkpoints.len() as u64)
            .saturating_mul(bytes_per_checkpoint);
        if needed > self.memory_cap {
            return Err(SimError::Resource { needed, cap: self.memory_cap });
        }
        Ok(())
    }
}

/// Powers of two below `t_max`, then `t_max`.
pub fn default_checkpoints(t_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..64).map(|k| 1u64 << k).take_while(|&t| t < t_max).collect();
    out.push(t_max);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCurve {
    pub checkpoints: Vec<u64>,
    /// One entry per checkpoint, of length `dim`.
    pub mean: Vec<Vec<f64>>,
    pub msd: Vec<f64>,
    pub msd_se: Vec<f64>,
    pub walkers: u64,
    pub dim: usize,
}

impl MomentCurve {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.checkpoints.iter().zip(&self.msd).map(|(&t, &m)| (t as f64, m)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Sums<const D: usize> {
    x: [i128; D],
    x2: u128,
    x4: u128,
}

impl<const D: usize> Default for Sums<D> {
    fn default() -> Self {
        Self { x: [0; D], x2: 0, x4: 0 }
    }
}

impl<const D: usize> Sums<D> {
    fn add(&mut self, pos: [i64; D]) -> Result<(), SimError> {
        let mut sq: u128 = 0;
        for (acc, &c) in self.x.iter_mut().zip(&pos) {
            *acc += c as i128;
            sq += (c.unsigned_abs() as u128).pow(2);
        }
        self.x2 = self.x2.checked_add(sq).ok_or(SimError::Overflow)?;
        let quad = sq.checked_mul(sq).ok_or(SimError::Overflow)?;
        self.x4 = self.x4.checked_add(quad).ok_or(SimError::Overflow)?;
        Ok(())
    }

    fn merge(&mut self, other: &Self) -> Result<(), SimError> {
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a = a.checked_add(*b).ok_or(SimError::Overflow)?;
        }
        self.x2 = self.x2.checked_add(other.x2).ok_or(SimError::Overflow)?;
        self.x4 = self.x4.checked_add(other.x4).ok_or(SimError::Overflow)?;
        Ok(())
    }
}

fn run_blocks<const D: usize, W>(cfg: &EnsembleConfig, walk: W) -> Result<MomentCurve, SimError>
where
    W: Fn(std::ops::Range<u64>, &[u64], &mut [Sums<D>]) -> Result<(), SimError> + Sync,
{
    cfg.validate(std::mem::size_of::<Sums<D>>() as u64)?;
    let blocks: Vec<u64> = (0..cfg.walkers.div_ceil(WALKER_BLOCK)).collect();
    let k = cfg.checkpoints.len();
    let run_block = |&b: &u64| -> Result<Vec<Sums<D>>, SimError> {
        let mut sums = vec![Sums::<D>::default(); k];
        let hi = ((b + 1) * WALKER_BLOCK).min(cfg.walkers);
        let mut lo = b * WALKER_BLOCK;
        while lo < hi {
            let end = (lo + LANES).min(hi);
            walk(lo..end, &cfg.checkpoints, &mut sums)?;
            lo = end;
        }
        Ok(sums)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count)
        .build()
        .map_err(|e| SimError::Config(e.to_string()))?;
    let partial: Vec<Result<Vec<Sums<D>>, SimError>> =
        pool.install(|| blocks.par_iter().map(run_block).collect());
    let mut total = vec![Sums::<D>::default(); k];
    for block in partial {
        for (acc, s) in total.iter_mut().zip(block?.iter()) {
            acc.merge(s)?;
        }
    }
    Ok(summarize(cfg, &total))
}

fn summarize<const D: usize>(cfg: &EnsembleConfig, total: &[Sums<D>]) -> MomentCurve {
    let n = cfg.walkers as f64;
    let mut curve = MomentCurve {
        checkpoints: cfg.checkpoints.clone(),
        mean: Vec::with_capacity(total.len()),
        msd: Vec::with_capacity(total.len()),
        msd_se: Vec::with_capacity(total.len()),
        walkers: cfg.walkers,
        dim: D,
    };
    for s in total {
        curve.mean.push(s.x.iter().map(|&v| v as f64 / n).collect());
        let msd = s.x2 as f64 / n;
        let se = if cfg.walkers > 1 {
            let var = (s.x4 as f64 - (s.x2 as f64) * msd) / (n - 1.0);
            (var.max(0.0) / n).sqrt()
        } else {
            0.0
        };
        curve.msd.push(msd);
        curve.msd_se.push(se);
    }
    curve
}

/// Runs the walkers of `lanes` side by side, recording `pos` at each checkpoint.
fn walk_lanes<S: Copy, const D: usize>(
    seed: u64,
    lanes: std::ops::Range<u64>,
    checkpoints: &[u64],
    sums: &mut [Sums<D>],
    init: impl Fn(f64) -> S,
    step: impl Fn(&S, f64) -> S,
    pos: impl Fn(&S) -> [i64; D],
) -> Result<(), SimError> {
    let mut streams: Vec<WalkerStream> = lanes.map(|w| WalkerStream::new(seed, w)).collect();
    let mut states: Vec<S> = streams.iter_mut().map(|s| init(s.uniform())).collect();
    let mut t = 1;
    for (k, &target) in checkpoints.iter().enumerate() {
        while t < target {
            for (state, stream) in states.iter_mut().zip(streams.iter_mut()) {
                *state = step(state, stream.uniform());
            }
            t += 1;
        }
        for state in &states {
            sums[k].add(pos(state))?;
        }
    }
    Ok(())
}

/// Monte Carlo estimate of `<X_t>`, `<X_t^2>` and its standard error.
pub fn run_ensemble(params: &Params1D, cfg: &EnsembleConfig) -> Result<MomentCurve, SimError> {
    let kernel = Kernel1D::new(params);
    run_blocks::<1, _>(cfg, |lanes, checkpoints, sums| {
        walk_lanes(
            cfg.master_seed,
            lanes,
            checkpoints,
            sums,
            |u| init_walker(params, u),
            |s, u| kernel.advance(s, u),
            |s| [s.x],
        )
    })
}

/// 2D counterpart of [`run_ensemble`]; the MSD is `<|X_t|^2>`.
pub fn run_ensemble_2d(params: &Params2D, cfg: &EnsembleConfig) -> Result<MomentCurve, SimError> {
    let law = params.law();
    run_blocks::<2, _>(cfg, |lanes, checkpoints, sums| {
        walk_lanes(
            cfg.master_seed,
            lanes,
            checkpoints,
            sums,
            |u| init_walker_2d(params, u),
            |s, u| advance_2d_with(s, &law, u),
            |s| s.x,
        )
    })
}

/// Log-log least squares of the MSD over checkpoints inside `window`.
pub fn fit_exponent(curve: &MomentCurve, window: (u64, u64)) -> Result<PowerLawFit, SimError> {
    let points: Vec<(f64, f64)> = curve
        .checkpoints
        .iter()
        .zip(&curve.msd)
        .filter(|(&t, _)| t >= window.0 && t <= window.1)
        .map(|(&t, &m)| (t as f64, m))
        .collect();
    Ok(fit_power_law(&points)?)
}
