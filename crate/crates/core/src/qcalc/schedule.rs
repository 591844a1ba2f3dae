use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::constants::{drift_constants, ln_big, ser_rational, to_f64};
use crate::{Error, Result};

fn ser_bigint<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

/// Predicted cutoff location and the lower/upper radii and times that
/// bracket it, all in units of `log_q n` (R-norm radii).
///
/// Times are real-valued; callers round outward (floor lower bounds,
/// ceil upper bounds).
#[derive(Clone, Debug, Serialize)]
pub struct MixingSchedule {
    pub d: u32,
    #[serde(serialize_with = "ser_rational")]
    pub q: BigRational,
    #[serde(serialize_with = "ser_bigint")]
    pub n: BigInt,
    pub s: f64,
    pub log_q_n: f64,
    /// `C_{d,q}`; the cutoff sits at `C_{d,q} * log_q n`.
    #[serde(serialize_with = "ser_rational")]
    pub cutoff_coefficient: BigRational,
    pub t_cutoff: f64,
    pub t_0: f64,
    pub t_1: f64,
    pub r_0: f64,
    pub r_1: f64,
    pub window: f64,
    /// `r_0 <= 0` or `t_0 < 0`: `n` is too small for the asymptotic picture.
    pub pre_asymptotic: bool,
    /// `d = 3` only: the same schedule with graph distance (`R / 2`) and
    /// logarithms to base `q^2`.
    pub graph_distance: Option<GraphDistanceSchedule>,
    /// `d = 2` only: the `(q+1)`-regular tree form `k/(k-2) log_{k-1} n`.
    pub tree: Option<TreeSchedule>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphDistanceSchedule {
    /// `(q^2+q+1)/(q^2-1)`, multiplying `log_{q^2} n`.
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: BigRational,
    pub log_q2_n: f64,
    pub t_cutoff: f64,
    pub t_0: f64,
    pub t_1: f64,
    pub r_0: f64,
    pub r_1: f64,
    pub window: f64,
    pub pre_asymptotic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeSchedule {
    #[serde(serialize_with = "ser_rational")]
    pub k: BigRational,
    /// `k/(k-2)`, multiplying `log_{k-1} n`.
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: BigRational,
    pub log_k1_n: f64,
    pub t_cutoff: f64,
}

impl MixingSchedule {
    /// `t_0` rounded down and clamped at zero.
    pub fn t_0_floor(&self) -> u64 {
        self.t_0.floor().max(0.0) as u64
    }

    pub fn t_1_ceil(&self) -> u64 {
        self.t_1.ceil().max(0.0) as u64
    }
}

pub fn mixing_schedule(d: u32, q: &BigRational, n: &BigInt, s: f64) -> Result<MixingSchedule> {
    let consts = drift_constants(d, q)?;
    let q2 = q * q;
    if BigRational::from_integer(n.clone()) < q2 {
        return Err(Error::Domain(format!("n = {n} is below q^2 = {q2}")));
    }
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!("slack s must be non-negative, got {s}")));
    }
    let ln_q = to_f64(q).ln();
    let ln_n = ln_big(n);
    let log_q_n = ln_n / ln_q;
    let loglog = log_q_n.ln() / ln_q;
    let c = to_f64(&consts.cutoff_constant);
    let window = log_q_n.sqrt();
    let t_cutoff = c * log_q_n;
    let t_0 = t_cutoff - (s + 1.0) * window;
    let t_1 = t_cutoff + (s + 1.0) * window;
    let r_0 = log_q_n - d as f64 * loglog;
    let dd = (d as f64).powi(d as i32);
    let r_1 = log_q_n + 2.0 * (dd + 1.0) * loglog;

    let graph_distance = (d == 3).then(|| {
        let one = BigRational::one();
        let coefficient = (&q2 + q + &one) / (&q2 - &one);
        let log_q2_n = ln_n / (2.0 * ln_q);
        let loglog2 = log_q2_n.ln() / (2.0 * ln_q);
        let window = log_q2_n.sqrt();
        let t_cutoff = to_f64(&coefficient) * log_q2_n;
        let r_0 = log_q2_n - 3.0 * loglog2;
        let t_0 = t_cutoff - (s + 1.0) * window;
        GraphDistanceSchedule {
            coefficient,
            log_q2_n,
            t_cutoff,
            t_0,
            t_1: t_cutoff + (s + 1.0) * window,
            r_0,
            r_1: log_q2_n + 16.0 * loglog2,
            window,
            pre_asymptotic: r_0 <= 0.0 || t_0 < 0.0,
        }
    });

    let tree = (d == 2).then(|| {
        let k = q + BigRational::one();
        let two = BigRational::from_integer(2.into());
        let coefficient = &k / (&k - &two);
        let log_k1_n = ln_n / to_f64(&(&k - BigRational::one())).ln();
        TreeSchedule { t_cutoff: to_f64(&coefficient) * log_k1_n, k, coefficient, log_k1_n }
    });

    Ok(MixingSchedule {
        d,
        q: q.clone(),
        n: n.clone(),
        s,
        log_q_n,
        cutoff_coefficient: consts.cutoff_constant,
        t_cutoff,
        t_0,
        t_1,
        r_0,
        r_1,
        window,
        pre_asymptotic: r_0 <= 0.0 || t_0 < 0.0,
        graph_distance,
        tree,
    })
}
