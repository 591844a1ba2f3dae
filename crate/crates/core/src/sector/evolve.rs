use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::law::transition_distribution;
use super::point::SectorPoint;
use crate::{Error, Result};

pub const DEFAULT_STATE_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug)]
pub struct EvolveConfig {
    /// States with `R(x) > r_max` are dropped and their mass booked as
    /// truncated.
    pub r_max: i64,
    /// Maximum number of live states before evolution aborts.
    pub state_cap: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { r_max: i64::MAX, state_cap: DEFAULT_STATE_CAP }
    }
}

/// Distribution of the projected walk at a fixed horizon, restricted to
/// `R <= r_max`; `distribution` mass plus `truncated` is exactly one.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution<T> {
    pub horizon: usize,
    pub distribution: BTreeMap<SectorPoint, T>,
    pub truncated: T,
}

impl<T: Clone + Zero> Evolution<T> {
    /// Mass aggregated by R-norm.
    pub fn r_histogram(&self) -> BTreeMap<i64, T> {
        let mut out: BTreeMap<i64, T> = BTreeMap::new();
        for (p, m) in &self.distribution {
            let e = out.entry(p.r_norm()).or_insert_with(T::zero);
            *e = e.clone() + m.clone();
        }
        out
    }
}

fn evolve<T>(
    d: u32,
    q: &BigRational,
    start: &SectorPoint,
    horizon: usize,
    cfg: &EvolveConfig,
    convert: impl Fn(&BigRational) -> T,
) -> Result<Evolution<T>>
where
    T: Clone + Zero + std::ops::Mul<Output = T>,
{
    let mut laws: HashMap<SectorPoint, Vec<(SectorPoint, T)>> = HashMap::new();
    let mut current: BTreeMap<SectorPoint, T> = BTreeMap::new();
    let mut truncated = T::zero();
    if start.r_norm() > cfg.r_max {
        truncated = convert(&BigRational::from_integer(1.into()));
    } else {
        current.insert(start.clone(), convert(&BigRational::from_integer(1.into())));
    }
    for step in 0..horizon {
        let mut next: BTreeMap<SectorPoint, T> = BTreeMap::new();
        for (p, mass) in &current {
            if !laws.contains_key(p) {
                let law = transition_distribution(d, q, p)?;
                laws.insert(p.clone(), law.entries.iter().map(|(t, w)| (t.clone(), convert(w))).collect());
            }
            for (t, w) in &laws[p] {
                let add = mass.clone() * w.clone();
                if t.r_norm() > cfg.r_max {
                    truncated = truncated + add;
                } else {
                    let e = next.entry(t.clone()).or_insert_with(T::zero);
                    *e = e.clone() + add;
                }
            }
        }
        if next.len() > cfg.state_cap {
            return Err(Error::StateCap { cap: cfg.state_cap, step: step + 1, horizon });
        }
        current = next;
    }
    Ok(Evolution { horizon, distribution: current, truncated })
}

/// Exact forward evolution over the rationals.
pub fn evolve_exact(
    d: u32,
    q: &BigRational,
    start: &SectorPoint,
    horizon: usize,
    cfg: &EvolveConfig,
) -> Result<Evolution<BigRational>> {
    if start.d() != d {
        return Err(Error::Domain(format!("start point {start} is not in N^{}", d - 1)));
    }
    evolve(d, q, start, horizon, cfg, Clone::clone)
}

/// Same evolution in `f64`, for horizons where rational denominators blow up.
pub fn evolve_float(
    d: u32,
    q: &BigRational,
    start: &SectorPoint,
    horizon: usize,
    cfg: &EvolveConfig,
) -> Result<Evolution<f64>> {
    if start.d() != d {
        return Err(Error::Domain(format!("start point {start} is not in N^{}", d - 1)));
    }
    evolve(d, q, start, horizon, cfg, |r| r.to_f64().unwrap_or(f64::NAN))
}
