//! Ball, fiber and `L^2`-norm bounds from the cutoff argument, evaluated
//! exactly where the quantities are rational and in log-space otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::constants::{ln_big, to_f64};
use super::moves::r_norm;
use crate::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn pow(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        BigRational::one() / num_traits::pow(q.clone(), (-e) as usize)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereSize {
    pub value: BigRational,
    /// `false` for `r = 0`, where the value 1 is a convention.
    pub in_formula_range: bool,
}

/// Size of the graph-distance sphere of radius `r` around a vertex of the
/// `d = 3` building:
/// `(r+1)q^{2r} + 2r q^{2r-1} + 2r q^{2r-2} + (r-1)q^{2r-3}`.
pub fn sphere_size_d3(q: &BigRational, r: u32) -> SphereSize {
    if r == 0 {
        return SphereSize { value: BigRational::one(), in_formula_range: false };
    }
    let r64 = r as i64;
    let e = 2 * r64;
    let value = rat(r64 + 1) * pow(q, e)
        + rat(2 * r64) * pow(q, e - 1)
        + rat(2 * r64) * pow(q, e - 2)
        + rat(r64 - 1) * pow(q, e - 3);
    SphereSize { value, in_formula_range: true }
}

/// Crude ball bound `8 r^2 q^{2r}`.
pub fn ball_bound_d3(q: &BigRational, r: u32) -> BigRational {
    rat(8 * (r as i64) * (r as i64)) * pow(q, 2 * r as i64)
}

/// Two bounds on the fiber of the sector point `x`: the product form
/// `prod_{j=1}^{d-1} (q^{j+1}-1)/(q-1) * q^{R(x)}` and the looser
/// `d! q^{C(d,2) + R(x)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberBound {
    pub product_form: BigRational,
    pub loose_form: BigRational,
}

pub fn fiber_bound(d: u32, q: &BigRational, x: &[u64]) -> Result<FiberBound> {
    if d < 2 || x.len() != d as usize - 1 {
        return Err(Error::Domain(format!(
            "fiber bound needs d >= 2 and a point with d-1 = {} coordinates, got {}",
            d.saturating_sub(1),
            x.len()
        )));
    }
    let xi: Vec<i64> = x.iter().map(|&v| v as i64).collect();
    let r = r_norm(d, &xi);
    let one = BigRational::one();
    let mut product = BigRational::one();
    for j in 1..d as i64 {
        product *= (pow(q, j + 1) - &one) / (q - &one);
    }
    let product_form = product * pow(q, r);
    let factorial: BigInt = (1..=d as u64).map(BigInt::from).product();
    let binom = (d as i64) * (d as i64 - 1) / 2;
    let loose_form = BigRational::from_integer(factorial) * pow(q, binom + r);
    Ok(FiberBound { product_form, loose_form })
}

/// A non-negative real carried as its natural log, with the linear value
/// when it fits in an `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogValue {
    pub ln: f64,
    pub value: Option<f64>,
}

impl LogValue {
    pub fn from_ln(ln: f64) -> Self {
        let v = ln.exp();
        Self { ln, value: v.is_finite().then_some(v) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormBudget {
    /// `(sqrt(n)/2) (2 q R(x))^{d^d} q^{-R(x)/2}`.
    pub general: LogValue,
    /// `d = 3` only:
    /// `(sqrt(n)/2) C(x+2,2) C(2y+5,5) q^{9/2} q^{-(x+y)}`.
    pub sharp_d3: Option<LogValue>,
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Upper bounds on the TV norm of the non-trivial part of the conditional
/// distribution above the sector point `x`, for an `n`-vertex Ramanujan
/// quotient.
pub fn l2_norm_budget(d: u32, q: &BigRational, x: &[u64], n: &BigInt) -> Result<NormBudget> {
    if d < 2 || x.len() != d as usize - 1 {
        return Err(Error::Domain("norm budget needs a point with d-1 coordinates".into()));
    }
    if n < &BigInt::one() {
        return Err(Error::Domain("norm budget needs n >= 1".into()));
    }
    let ln_q = to_f64(q).ln();
    let ln_half_sqrt_n = 0.5 * ln_big(n) - std::f64::consts::LN_2;
    let xi: Vec<i64> = x.iter().map(|&v| v as i64).collect();
    let r = r_norm(d, &xi) as f64;
    let exponent = (d as f64).powi(d as i32);
    let ln_poly = if r == 0.0 { f64::NEG_INFINITY } else { exponent * (2.0 * to_f64(q) * r).ln() };
    let general = LogValue::from_ln(ln_half_sqrt_n + ln_poly - 0.5 * r * ln_q);
    let sharp_d3 = (d == 3).then(|| {
        let (a, b) = (x[0], x[1]);
        LogValue::from_ln(
            ln_half_sqrt_n + ln_binomial(a + 2, 2) + ln_binomial(2 * b + 5, 5) + (4.5 - (a + b) as f64) * ln_q,
        )
    });
    Ok(NormBudget { general, sharp_d3 })
}
