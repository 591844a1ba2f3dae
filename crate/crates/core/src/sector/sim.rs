use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::point::fold_step;
use crate::qcalc::{drift_constants, enumerate_moves, mixing_schedule, r_weights, MixingSchedule};
use crate::{Error, Result};

/// Monte Carlo summary of the projected walk started at the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkStats {
    pub d: u32,
    pub q: String,
    pub seed: u64,
    pub trajectory_count: usize,
    pub horizon: u64,
    /// `R(X_horizon)` per trajectory.
    pub rho_samples: Vec<i64>,
    /// Per trajectory, the number of steps taken from a boundary state.
    pub boundary_visits: Vec<u64>,
    /// Per trajectory, the last `t <= horizon` with `X_t` on the boundary.
    pub last_boundary_step: Vec<u64>,
    /// R-increments of steps whose pre-state is interior.
    pub interior_increment_histogram: BTreeMap<i64, u64>,
}

impl WalkStats {
    pub fn interior_steps(&self) -> u64 {
        self.interior_increment_histogram.values().sum()
    }

    /// Mean interior R-increment and its standard error.
    pub fn interior_drift(&self) -> (f64, f64) {
        let n = self.interior_steps() as f64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for (&r, &c) in &self.interior_increment_histogram {
            s1 += r as f64 * c as f64;
            s2 += (r * r) as f64 * c as f64;
        }
        let mean = s1 / n;
        let var = (s2 / n - mean * mean) * n / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    /// `(rho - drift * t) / (sigma sqrt(t))` at the horizon.
    pub fn normalized_rho(&self, drift: f64, sigma: f64) -> Vec<f64> {
        let t = self.horizon as f64;
        self.rho_samples.iter().map(|&r| (r as f64 - drift * t) / (sigma * t.sqrt())).collect()
    }

    /// Fraction of trajectories that never touch the boundary at or after
    /// `horizon / 2`.
    pub fn transient_fraction(&self) -> f64 {
        let half = self.horizon / 2;
        let ok = self.last_boundary_step.iter().filter(|&&t| t < half).count();
        ok as f64 / self.trajectory_count as f64
    }
}

/// Inverse-CDF sampler over the `2^d - 2` moves.
struct MoveSampler {
    n: usize,
    cumulative: Vec<f64>,
    gamma: Vec<u8>,
    gamma_prime: Vec<i64>,
    r_increment: Vec<i64>,
    weights: Vec<i64>,
}

impl MoveSampler {
    fn new(d: u32, q: &BigRational) -> Result<Self> {
        let moves = enumerate_moves(d)?;
        let deg = crate::qcalc::vertex_degree(d)?.eval(q);
        let mut acc = BigRational::from_integer(0.into());
        let mut cumulative = Vec::with_capacity(moves.len());
        for m in &moves {
            acc += num_traits::pow(q.clone(), m.z_exponent as usize) / &deg;
            cumulative.push(acc.to_f64().unwrap_or(f64::NAN));
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self {
            n: d as usize - 1,
            cumulative,
            gamma: moves.iter().flat_map(|m| m.gamma.iter().copied()).collect(),
            gamma_prime: moves.iter().flat_map(|m| m.gamma_prime.iter().map(|&g| g as i64)).collect(),
            r_increment: moves.iter().map(|m| m.r_increment).collect(),
            weights: r_weights(d),
        })
    }

    fn len(&self) -> usize {
        self.r_increment.len()
    }

    #[inline]
    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u).min(self.len() - 1)
    }

    /// Runs one trajectory from the origin. `checkpoints` must be sorted;
    /// `rho_at` receives `R(X_t)` for each.
    fn run(
        &self,
        horizon: u64,
        checkpoints: &[u64],
        rng: &mut ChaCha8Rng,
        hist: &mut [u64],
        rho_at: &mut Vec<i64>,
    ) -> Trajectory {
        let n = self.n;
        let mut x = vec![0i64; n];
        let mut scratch = vec![0i64; n + 1];
        let mut rho = 0i64;
        let mut visits = 0;
        let mut last = 0;
        let mut next_cp = 0;
        while next_cp < checkpoints.len() && checkpoints[next_cp] == 0 {
            rho_at.push(0);
            next_cp += 1;
        }
        for t in 0..horizon {
            let boundary = x.contains(&0);
            let m = self.sample(rng);
            let gp = &self.gamma_prime[m * n..(m + 1) * n];
            if !boundary {
                for (xi, g) in x.iter_mut().zip(gp) {
                    *xi += g;
                }
                rho += self.r_increment[m];
                hist[m] += 1;
            } else {
                visits += 1;
                last = t;
                if x.iter().zip(gp).all(|(xi, g)| xi + g >= 0) {
                    for (xi, g) in x.iter_mut().zip(gp) {
                        *xi += g;
                    }
                    rho += self.r_increment[m];
                } else {
                    fold_step(&mut x, &self.gamma[m * (n + 1)..(m + 1) * (n + 1)], &mut scratch);
                    rho = self.weights.iter().zip(&x).map(|(w, v)| w * v).sum();
                }
            }
            while next_cp < checkpoints.len() && checkpoints[next_cp] == t + 1 {
                rho_at.push(rho);
                next_cp += 1;
            }
        }
        if x.contains(&0) {
            last = horizon;
        }
        Trajectory { rho, visits, last }
    }
}

struct Trajectory {
    rho: i64,
    visits: u64,
    last: u64,
}

/// Trajectory `i` draws from ChaCha8 stream `i` under key `seed`, so the
/// output does not depend on thread count or scheduling.
fn trajectory_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

struct Batch {
    trajectories: Vec<Trajectory>,
    checkpoints: Vec<Vec<i64>>,
    hist: Vec<u64>,
}

fn run_batch(
    d: u32,
    q: &BigRational,
    horizon: u64,
    trajectories: usize,
    seed: u64,
    checkpoints: &[u64],
) -> Result<(MoveSampler, Batch)> {
    if trajectories == 0 {
        return Err(Error::Domain("need at least one trajectory".into()));
    }
    let sampler = MoveSampler::new(d, q)?;
    let per: Vec<(Trajectory, Vec<i64>, Vec<u64>)> = (0..trajectories as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i);
            let mut hist = vec![0u64; sampler.len()];
            let mut cps = Vec::with_capacity(checkpoints.len());
            let tr = sampler.run(horizon, checkpoints, &mut rng, &mut hist, &mut cps);
            (tr, cps, hist)
        })
        .collect();
    let mut hist = vec![0u64; sampler.len()];
    let mut trs = Vec::with_capacity(per.len());
    let mut cps = Vec::with_capacity(per.len());
    for (tr, cp, h) in per {
        for (a, b) in hist.iter_mut().zip(&h) {
            *a += b;
        }
        trs.push(tr);
        cps.push(cp);
    }
    Ok((sampler, Batch { trajectories: trs, checkpoints: cps, hist }))
}

pub fn simulate(d: u32, q: &BigRational, horizon: u64, trajectories: usize, seed: u64) -> Result<WalkStats> {
    let (sampler, batch) = run_batch(d, q, horizon, trajectories, seed, &[])?;
    let mut histogram = BTreeMap::new();
    for (m, &c) in batch.hist.iter().enumerate() {
        if c > 0 {
            *histogram.entry(sampler.r_increment[m]).or_insert(0) += c;
        }
    }
    Ok(WalkStats {
        d,
        q: q.to_string(),
        seed,
        trajectory_count: trajectories,
        horizon,
        rho_samples: batch.trajectories.iter().map(|t| t.rho).collect(),
        boundary_visits: batch.trajectories.iter().map(|t| t.visits).collect(),
        last_boundary_step: batch.trajectories.iter().map(|t| t.last).collect(),
        interior_increment_histogram: histogram,
    })
}

/// Monte Carlo check of the two tail estimates that drive the cutoff
/// bounds: leaving the `r_0` ball by `t_0` is unlikely, and staying inside
/// the `r_1` ball at `t_1` is unlikely.
#[derive(Clone, Debug, Serialize)]
pub struct TailExperiment {
    pub schedule: MixingSchedule,
    /// `t_0` rounded to the nearest step, clamped at 0.
    pub t0_step: u64,
    pub t1_step: u64,
    pub p_exceed_r0_at_t0: f64,
    pub p_below_r1_at_t1: f64,
    /// `P[Z > c s]` for a standard normal `Z`.
    pub normal_tail_reference: f64,
    pub pre_asymptotic: bool,
}

pub fn standard_normal_tail(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)
}

pub fn tail_experiment(
    d: u32,
    q: &BigRational,
    n: &BigInt,
    s: f64,
    trajectories: usize,
    seed: u64,
) -> Result<TailExperiment> {
    let schedule = mixing_schedule(d, q, n, s)?;
    let consts = drift_constants(d, q)?;
    let t0_step = schedule.t_0.round().max(0.0) as u64;
    let t1_step = schedule.t_1.round().max(0.0) as u64;
    let (_, batch) = run_batch(d, q, t1_step, trajectories, seed, &[t0_step, t1_step])?;
    let frac = |pred: &dyn Fn(&Vec<i64>) -> bool| {
        batch.checkpoints.iter().filter(|c| pred(c)).count() as f64 / trajectories as f64
    };
    let p_exceed_r0_at_t0 = frac(&|c| c[0] as f64 > schedule.r_0);
    let p_below_r1_at_t1 = frac(&|c| (c[1] as f64) < schedule.r_1);
    Ok(TailExperiment {
        pre_asymptotic: schedule.pre_asymptotic || schedule.r_0 <= 0.0,
        t0_step,
        t1_step,
        p_exceed_r0_at_t0,
        p_below_r1_at_t1,
        normal_tail_reference: standard_normal_tail(consts.c_constant * s),
        schedule,
    })
}
