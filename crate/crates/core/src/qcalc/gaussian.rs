use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::QPolynomial;
use crate::{Error, Result};

fn check(d: u32, j: u32) -> Result<()> {
    if d == 0 || j > d {
        return Err(Error::Domain(format!("Gaussian binomial [{d} {j}] needs d >= 1 and 0 <= j <= d")));
    }
    Ok(())
}

/// The Gaussian binomial `[d j]_q` as a polynomial in `q`, built with the
/// q-Pascal rule `[n k] = [n-1 k-1] + q^k [n-1 k]`.
pub fn gaussian_binomial(d: u32, j: u32) -> Result<QPolynomial> {
    check(d, j)?;
    let (d, j) = (d as usize, j as usize);
    // row[k] holds [n k] for the current n
    let mut row = vec![QPolynomial::one()];
    for n in 1..=d {
        let mut next = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let left = if k > 0 { row[k - 1].clone() } else { QPolynomial::zero() };
            let right = match row.get(k) {
                Some(p) => &QPolynomial::monomial(BigInt::one(), k) * p,
                None => QPolynomial::zero(),
            };
            next.push(&left + &right);
        }
        row = next;
    }
    Ok(row.swap_remove(j))
}

/// `[d j]_q` at a rational point via the product
/// `prod_{i=1}^{j} (q^{d-i+1} - 1)/(q^i - 1)`. At `q = 1` the product is
/// singular and the ordinary binomial (the polynomial's value) is returned.
pub fn gaussian_binomial_at(d: u32, j: u32, q: &BigRational) -> Result<BigRational> {
    check(d, j)?;
    if q.is_one() {
        return Ok(gaussian_binomial(d, j)?.eval(q));
    }
    let one = BigRational::one();
    let pow = |e: u32| num_traits::pow(q.clone(), e as usize);
    let mut acc = BigRational::one();
    for i in 1..=j {
        acc = acc * (pow(d - i + 1) - &one) / (pow(i) - &one);
    }
    Ok(acc)
}

/// Degree of a vertex of the building: the number of nonzero proper
/// subspaces of `F_q^d`, `sum_{j=1}^{d-1} [d j]_q`.
pub fn vertex_degree(d: u32) -> Result<QPolynomial> {
    if d < 2 {
        return Err(Error::Domain(format!("vertex degree needs d >= 2, got {d}")));
    }
    (1..d).map(|j| gaussian_binomial(d, j)).sum()
}

pub fn vertex_degree_at(d: u32, q: &BigRational) -> Result<BigRational> {
    if d < 2 {
        return Err(Error::Domain(format!("vertex degree needs d >= 2, got {d}")));
    }
    (1..d).try_fold(BigRational::zero(), |acc, j| Ok(acc + gaussian_binomial_at(d, j, q)?))
}
