use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::point::{fold, SectorPoint};
use crate::qcalc::{enumerate_moves, vertex_degree};
use crate::{Error, Result};

/// One-step law of the projected walk from `source`, with coinciding
/// targets merged.
#[derive(Clone, Debug, PartialEq)]
pub struct StepLaw {
    pub source: SectorPoint,
    /// Sorted by target.
    pub entries: Vec<(SectorPoint, BigRational)>,
}

impl StepLaw {
    pub fn total(&self) -> BigRational {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn mass(&self, target: &SectorPoint) -> BigRational {
        self.entries.iter().find(|(t, _)| t == target).map(|(_, p)| p.clone()).unwrap_or_else(BigRational::zero)
    }
}

/// Each move `gamma` sends `alpha` to `fold(alpha + gamma)` with mass
/// `q^{Z_gamma} / deg`.
pub fn transition_distribution(d: u32, q: &BigRational, p: &SectorPoint) -> Result<StepLaw> {
    if p.d() != d {
        return Err(Error::Domain(format!("point {p} does not have {} coordinates", d - 1)));
    }
    let deg = vertex_degree(d)?.eval(q);
    let alpha = p.alpha();
    let mut merged: BTreeMap<SectorPoint, BigRational> = BTreeMap::new();
    for m in enumerate_moves(d)? {
        let raw: Vec<i64> = alpha.iter().zip(&m.gamma).map(|(&a, &g)| a as i64 + g as i64).collect();
        let target = fold(d, &raw)?;
        let w = num_traits::pow(q.clone(), m.z_exponent as usize) / &deg;
        *merged.entry(target).or_insert_with(BigRational::zero) += w;
    }
    Ok(StepLaw { source: p.clone(), entries: merged.into_iter().collect() })
}

/// Per-coordinate masses of interior moves that raise (`up`) and lower
/// (`down`) the coordinate; `up = q * down` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateBias {
    pub up: BigRational,
    pub down: BigRational,
}

pub fn bias_check(d: u32, q: &BigRational) -> Result<Vec<CoordinateBias>> {
    let deg = vertex_degree(d)?.eval(q);
    let moves = enumerate_moves(d)?;
    Ok((0..d as usize - 1)
        .map(|i| {
            let mut up = BigRational::zero();
            let mut down = BigRational::zero();
            for m in &moves {
                let w = num_traits::pow(q.clone(), m.z_exponent as usize) / &deg;
                match m.gamma_prime[i] {
                    1 => up += w,
                    -1 => down += w,
                    _ => {}
                }
            }
            CoordinateBias { up, down }
        })
        .collect())
}
