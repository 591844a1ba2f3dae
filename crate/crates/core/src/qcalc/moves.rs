use num_bigint::BigInt;

use super::poly::QPolynomial;
use crate::{Error, Result};

/// One apartment step `alpha -> alpha + gamma` for a non-constant binary
/// vector `gamma`, with the data that determines its weight and its effect
/// on sector coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaMove {
    pub gamma: Vec<u8>,
    /// Inversion count `#{i < j : gamma_i = 1, gamma_j = 0}`; the step has
    /// weight `q^z_exponent / deg`.
    pub z_exponent: u32,
    /// Change of the difference coordinates, `gamma[i] - gamma[i+1]`.
    pub gamma_prime: Vec<i32>,
    /// `R(gamma_prime)`.
    pub r_increment: i64,
}

/// Weights of the R-norm: `(j+1)(d-1-j)` for the 0-based coordinate `j`.
pub fn r_weights(d: u32) -> Vec<i64> {
    let d = d as i64;
    (0..d - 1).map(|j| (j + 1) * (d - 1 - j)).collect()
}

/// `R(x) = sum_j j(d-j) x_j` (1-based weights). Linear in `x`.
pub fn r_norm<T: Copy + Into<i64>>(d: u32, x: &[T]) -> i64 {
    r_weights(d).iter().zip(x).map(|(w, &v)| w * v.into()).sum()
}

fn check_rank(d: u32) -> Result<()> {
    // 2^d moves; past this the enumeration is not a desk-scale object
    if !(2..=24).contains(&d) {
        return Err(Error::Domain(format!("rank parameter d must lie in 2..=24, got {d}")));
    }
    Ok(())
}

/// All `2^d - 2` non-constant binary moves, ordered by `gamma` read as a
/// binary number with `gamma[0]` most significant.
pub fn enumerate_moves(d: u32) -> Result<Vec<GammaMove>> {
    check_rank(d)?;
    let weights = r_weights(d);
    let n = d as usize;
    Ok((1u32..(1 << d) - 1)
        .map(|mask| {
            let gamma: Vec<u8> = (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u8).collect();
            let mut z = 0;
            let mut ones_seen = 0;
            for &g in &gamma {
                if g == 1 {
                    ones_seen += 1;
                } else {
                    z += ones_seen;
                }
            }
            let gamma_prime: Vec<i32> = gamma.windows(2).map(|w| w[0] as i32 - w[1] as i32).collect();
            let r_increment = weights.iter().zip(&gamma_prime).map(|(w, &g)| w * g as i64).sum();
            GammaMove { gamma, z_exponent: z, gamma_prime, r_increment }
        })
        .collect())
}

fn moment_polynomial(d: u32, power: u32) -> Result<QPolynomial> {
    Ok(enumerate_moves(d)?
        .iter()
        .map(|m| QPolynomial::monomial(BigInt::from(m.r_increment.pow(power)), m.z_exponent as usize))
        .sum())
}

/// `sum_gamma q^{Z_gamma}`, the total (unnormalized) transition mass.
pub fn mass_polynomial(d: u32) -> Result<QPolynomial> {
    moment_polynomial(d, 0)
}

/// `sum_gamma R(gamma') q^{Z_gamma}`; the drift times the vertex degree.
pub fn drift_polynomial(d: u32) -> Result<QPolynomial> {
    moment_polynomial(d, 1)
}

/// `sum_gamma R(gamma')^2 q^{Z_gamma}`.
pub fn second_moment_polynomial(d: u32) -> Result<QPolynomial> {
    moment_polynomial(d, 2)
}
