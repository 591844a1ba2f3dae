use serde::Serialize;

use super::graph::RegularDigraph;
use crate::qcalc::LogValue;
use crate::{Error, Result};

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

fn check(ell: u64, r: u64, k: u64) -> Result<()> {
    if ell == 0 || r == 0 || k == 0 {
        return Err(Error::Domain(format!("need ell, r, k >= 1, got ({ell}, {r}, {k})")));
    }
    Ok(())
}

/// Norm bound `C(ell+r-1, r-1) k^{r-1} lambda^{ell-r+1}` for `A^ell` on an
/// r-normal operator with non-trivial spectral radius `lambda`.
pub fn normal_bound(ell: u64, r: u64, k: u64, lambda: f64) -> Result<LogValue> {
    check(ell, r, k)?;
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    let exponent = ell as f64 - r as f64 + 1.0;
    // lambda^0 = 1 even at lambda = 0
    let lambda_term = if exponent == 0.0 { 0.0 } else { exponent * lambda.ln() };
    let ln = ln_binomial(ell + r - 1, r - 1) + (r - 1) as f64 * (k as f64).ln() + lambda_term;
    Ok(LogValue::from_ln(ln))
}

/// The Ramanujan-digraph specialization `(ell+r)^r k^{(r+ell)/2}`.
pub fn ram_digraph_bound(ell: u64, r: u64, k: u64) -> Result<LogValue> {
    check(ell, r, k)?;
    Ok(LogValue::from_ln(r as f64 * ((ell + r) as f64).ln() + 0.5 * (r + ell) as f64 * (k as f64).ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionCheck {
    pub collision_free: bool,
    /// First ordered pair `(u, v)` joined by two or more walks.
    pub violation: Option<(usize, usize)>,
}

/// Counts directed walks of length `1..=horizon` between every ordered pair,
/// saturating at 2. Exact for digraphs without short cycles, conservative
/// otherwise: a closed walk repeated twice counts as two.
pub fn collision_free_walks(out: &[Vec<usize>], horizon: usize) -> Result<CollisionCheck> {
    if horizon == 0 {
        return Err(Error::Domain("collision check needs L >= 1".into()));
    }
    let n = out.len();
    for (u, v) in out.iter().enumerate().flat_map(|(u, l)| l.iter().map(move |&v| (u, v))) {
        if v >= n {
            return Err(Error::Domain(format!("arc ({u},{v}) out of range")));
        }
    }
    for u in 0..n {
        let mut total = vec![0u8; n];
        let mut cur = vec![0u8; n];
        cur[u] = 1;
        for _ in 0..horizon {
            let mut next = vec![0u8; n];
            for (x, &c) in cur.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for &y in &out[x] {
                    next[y] = next[y].saturating_add(c).min(2);
                }
            }
            for (t, &c) in total.iter_mut().zip(&next) {
                *t = t.saturating_add(c).min(2);
            }
            if next.iter().all(|&c| c == 0) {
                break;
            }
            cur = next;
        }
        if let Some(v) = total.iter().position(|&c| c >= 2) {
            return Ok(CollisionCheck { collision_free: false, violation: Some((u, v)) });
        }
    }
    Ok(CollisionCheck { collision_free: true, violation: None })
}

pub fn collision_free_check(g: &RegularDigraph, horizon: usize) -> Result<CollisionCheck> {
    collision_free_walks(g.out_lists(), horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(v: LogValue) -> f64 {
        v.value.unwrap()
    }

    #[test]
    fn bound_examples() {
        assert!((value(normal_bound(3, 2, 4, 2.0).unwrap()) - 64.0).abs() < 1e-9);
        assert!((value(ram_digraph_bound(3, 2, 4).unwrap()) - 800.0).abs() < 1e-9);
        for ell in 1..20 {
            let v = value(normal_bound(ell, 1, 7, 1.5).unwrap());
            assert!((v - 1.5f64.powi(ell as i32)).abs() < 1e-9 * v);
        }
        assert!((value(normal_bound(3, 4, 2, 0.0).unwrap()) - 160.0).abs() < 1e-9);
        assert_eq!(normal_bound(3, 2, 2, 0.0).unwrap().value, Some(0.0));
        assert!(normal_bound(0, 1, 1, 1.0).is_err());
        assert!(ram_digraph_bound(1, 0, 1).is_err());
    }

    #[test]
    fn directed_path_is_collision_free() {
        let out: Vec<Vec<usize>> = (0..8).map(|i| if i < 7 { vec![i + 1] } else { vec![] }).collect();
        for l in [1, 3, 20] {
            assert!(collision_free_walks(&out, l).unwrap().collision_free);
        }
    }

    #[test]
    fn violations() {
        let out = vec![vec![1, 1], vec![]];
        assert_eq!(collision_free_walks(&out, 1).unwrap().violation, Some((0, 1)));
        let k3: Vec<Vec<usize>> = (0..3).map(|u| (0..3).filter(|&v| v != u).collect()).collect();
        assert!(collision_free_walks(&k3, 1).unwrap().collision_free);
        let c = collision_free_walks(&k3, 2).unwrap();
        // 0 -> 0 is reached by 0->1->0 and 0->2->0
        assert_eq!(c.violation, Some((0, 0)));
        let g = RegularDigraph::from_out_lists(2, k3).unwrap();
        assert!(!collision_free_check(&g, 2).unwrap().collision_free);
    }
}
