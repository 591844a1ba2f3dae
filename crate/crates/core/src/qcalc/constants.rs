use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::gaussian::vertex_degree;
use super::moves::{drift_polynomial, enumerate_moves, second_moment_polynomial};
use crate::{Error, Result};

/// Exact law, mean and variance of the interior R-increment, and the
/// constants derived from them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftConstants {
    pub d: u32,
    #[serde(serialize_with = "ser_rational")]
    pub q_value: BigRational,
    /// `deg(xi)` at `q`; an integer whenever `q` is.
    #[serde(serialize_with = "ser_rational")]
    pub degree: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub drift: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub variance: BigRational,
    /// `C_{d,q} = 1 / drift`.
    #[serde(serialize_with = "ser_rational")]
    pub cutoff_constant: BigRational,
    /// `drift^{3/2} / sigma`, the scale of the normal tail in the window.
    pub c_constant: f64,
    /// Set when `q` is not a prime power (no building exists; the formulas
    /// are still evaluated).
    pub non_prime_power: bool,
}

impl DriftConstants {
    pub fn sigma(&self) -> f64 {
        to_f64(&self.variance).sqrt()
    }

    pub fn drift_f64(&self) -> f64 {
        to_f64(&self.drift)
    }
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `f64` value of a rational whose numerator and denominator may both
/// exceed the `f64` range.
pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64().filter(|v| v.is_finite() && *v != 0.0) {
        return v;
    }
    if r.is_zero() {
        return 0.0;
    }
    let ln = ln_big(&num_traits::sign::abs(r.numer().clone())) - ln_big(r.denom());
    let sign = if r.numer() < &BigInt::zero() { -1.0 } else { 1.0 };
    sign * ln.exp()
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().map_or(f64::NAN, f64::ln) + shift as f64 * std::f64::consts::LN_2
}

pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut m = q;
            while m.is_multiple_of(p) {
                m /= p;
            }
            return m == 1;
        }
        p += 1;
    }
    true
}

fn check_q(q: &BigRational) -> Result<bool> {
    if q < &BigRational::from_integer(2.into()) {
        return Err(Error::Domain(format!("q must be at least 2, got {q}")));
    }
    let pp = q.is_integer() && q.to_integer().to_u64().is_some_and(is_prime_power);
    Ok(!pp)
}

/// Law of the R-increment of one interior step: `R(gamma') -> mass`.
pub fn increment_law(d: u32, q: &BigRational) -> Result<BTreeMap<i64, BigRational>> {
    let deg = vertex_degree(d)?.eval(q);
    let mut law: BTreeMap<i64, BigRational> = BTreeMap::new();
    for m in enumerate_moves(d)? {
        let w = num_traits::pow(q.clone(), m.z_exponent as usize) / &deg;
        *law.entry(m.r_increment).or_insert_with(BigRational::zero) += w;
    }
    Ok(law)
}

pub fn drift_constants(d: u32, q: &BigRational) -> Result<DriftConstants> {
    let non_prime_power = check_q(q)?;
    let degree = vertex_degree(d)?.eval(q);
    let drift = drift_polynomial(d)?.eval(q) / &degree;
    let second = second_moment_polynomial(d)?.eval(q) / &degree;
    let variance = second - &drift * &drift;
    let cutoff_constant = BigRational::one() / &drift;
    let c_constant = to_f64(&drift).powf(1.5) / to_f64(&variance).sqrt();
    Ok(DriftConstants { d, q_value: q.clone(), degree, drift, variance, cutoff_constant, c_constant, non_prime_power })
}

/// Lower bound on the two-step expected change of the distance to the
/// x-axis for the planar (`d = 3`) walk started on the y-axis:
/// `(4q^4 + q^3 - 5q^2 - 9q - 7) / (4 (q^2+q+1)^2)`.
pub fn two_step_drift_d3(q: &BigRational) -> BigRational {
    let p = |c: &[i64]| super::QPolynomial::from_i64(c).eval(q);
    let s = p(&[1, 1, 1]);
    p(&[-7, -9, -5, 1, 4]) / (BigRational::from_integer(4.into()) * &s * &s)
}

/// `floor(d/2) * ceil(d/2)`, the large-`q` limit of the drift.
pub fn drift_limit(d: u32) -> u64 {
    let d = d as u64;
    (d / 2) * d.div_ceil(2)
}
