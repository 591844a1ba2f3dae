use std::fmt;

use serde::Serialize;

use crate::qcalc::r_norm;
use crate::{Error, Result};

/// A vertex of the sector `N^{d-1}`, stored in difference coordinates
/// `x_i = alpha_i - alpha_{i+1}` of the descending exponent vector `alpha`
/// (whose last entry is 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SectorPoint {
    x: Vec<u32>,
}

impl SectorPoint {
    pub fn origin(d: u32) -> Self {
        Self { x: vec![0; d.saturating_sub(1) as usize] }
    }

    pub fn from_x(x: Vec<u32>) -> Self {
        Self { x }
    }

    /// From a descending exponent vector ending in 0.
    pub fn from_alpha(alpha: &[u32]) -> Result<Self> {
        if alpha.len() < 2 || alpha.last() != Some(&0) || alpha.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("{alpha:?} is not a descending exponent vector ending in 0")));
        }
        Ok(Self { x: alpha.windows(2).map(|w| w[0] - w[1]).collect() })
    }

    pub fn d(&self) -> u32 {
        self.x.len() as u32 + 1
    }

    pub fn x(&self) -> &[u32] {
        &self.x
    }

    /// Suffix sums of `x`, followed by the trailing 0.
    pub fn alpha(&self) -> Vec<u32> {
        let mut alpha = vec![0; self.x.len() + 1];
        for i in (0..self.x.len()).rev() {
            alpha[i] = alpha[i + 1] + self.x[i];
        }
        alpha
    }

    pub fn r_norm(&self) -> i64 {
        r_norm(self.d(), &self.x)
    }

    /// Some coordinate vanishes.
    pub fn is_boundary(&self) -> bool {
        self.x.contains(&0)
    }
}

impl fmt::Display for SectorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.x.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Brings a stepped exponent vector back into the sector: sort descending,
/// then subtract the last entry from every entry.
pub fn fold(d: u32, raw: &[i64]) -> Result<SectorPoint> {
    if raw.len() != d as usize {
        return Err(Error::Domain(format!("expected {d} exponents, got {}", raw.len())));
    }
    let mut sorted = raw.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Ok(SectorPoint { x: sorted.windows(2).map(|w| (w[0] - w[1]) as u32).collect() })
}

/// In-place fold on the difference coordinates for the Monte Carlo inner
/// loop. `alpha` is scratch of length `d`.
pub(crate) fn fold_step(x: &mut [i64], gamma: &[u8], alpha: &mut [i64]) {
    let n = x.len();
    alpha[n] = gamma[n] as i64;
    for i in (0..n).rev() {
        alpha[i] = alpha[i + 1] - gamma[i + 1] as i64 + x[i] + gamma[i] as i64;
    }
    alpha.sort_unstable_by(|a, b| b.cmp(a));
    for i in 0..n {
        x[i] = alpha[i] - alpha[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fold_examples() {
        for a in 1..6i64 {
            assert_eq!(fold(3, &[a + 1, 0, 1]).unwrap().x(), &[a as u32, 1]);
        }
        for b in 1..6i64 {
            assert_eq!(fold(3, &[b, b + 1, 1]).unwrap().x(), &[1, b as u32 - 1]);
        }
        assert_eq!(fold(4, &[5, 3, 3, 0]).unwrap().alpha(), vec![5, 3, 3, 0]);
        assert!(fold(3, &[1, 0]).is_err());
    }

    #[test]
    fn alpha_validation() {
        assert!(SectorPoint::from_alpha(&[2, 3, 0]).is_err());
        assert!(SectorPoint::from_alpha(&[2, 1, 1]).is_err());
        assert_eq!(SectorPoint::from_alpha(&[4, 1, 0]).unwrap().x(), &[3, 1]);
    }

    #[test]
    fn boundary_and_norm() {
        let p = SectorPoint::from_x(vec![2, 0, 1]);
        assert!(p.is_boundary());
        assert_eq!(p.r_norm(), 3 * 2 + 3);
        assert!(!SectorPoint::from_x(vec![1, 1]).is_boundary());
        assert_eq!(p.to_string(), "(2,0,1)");
    }

    proptest! {
        #[test]
        fn alpha_round_trip(x in prop::collection::vec(0u32..50, 1..7)) {
            let p = SectorPoint::from_x(x);
            prop_assert_eq!(SectorPoint::from_alpha(&p.alpha()).unwrap(), p);
        }

        #[test]
        fn fold_step_matches_fold(x in prop::collection::vec(0i64..4, 1..6), mask in 1u32..1000) {
            let d = x.len() + 1;
            let mask = 1 + mask % ((1 << d) - 2);
            let gamma: Vec<u8> = (0..d).map(|i| ((mask >> (d - 1 - i)) & 1) as u8).collect();
            let p = SectorPoint::from_x(x.iter().map(|&v| v as u32).collect());
            let raw: Vec<i64> = p.alpha().iter().zip(&gamma).map(|(&a, &g)| a as i64 + g as i64).collect();
            let expect = fold(d as u32, &raw).unwrap();
            let mut fast = x.clone();
            let mut scratch = vec![0; d];
            fold_step(&mut fast, &gamma, &mut scratch);
            let got: Vec<u32> = fast.iter().map(|&v| v as u32).collect();
            prop_assert_eq!(got.as_slice(), expect.x());
        }
    }
}
