use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::graph::{first_unreachable, Walkable};
use crate::{Error, Result};

/// Exact evolution is used while `n * horizon` stays below this.
pub const EXACT_PRODUCT_LIMIT: u64 = 10_000_000;

const PAR_THRESHOLD: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Auto,
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WalkOptions {
    /// Hold with probability 1/2 at every step.
    pub lazy: bool,
    pub precision: Precision,
}

impl WalkOptions {
    pub fn lazy() -> Self {
        Self { lazy: true, ..Default::default() }
    }

    fn mode(&self, n: usize, horizon: usize) -> EvolutionMode {
        match self.precision {
            Precision::Exact => EvolutionMode::Exact,
            Precision::Float => EvolutionMode::Float,
            Precision::Auto if (n as u64).saturating_mul(horizon as u64) <= EXACT_PRODUCT_LIMIT => EvolutionMode::Exact,
            Precision::Auto => EvolutionMode::Float,
        }
    }
}

/// `mu^t`, either as integer numerators over a common denominator
/// (`k^t`, or `(2k)^t` for the lazy walk) or in floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Exact { numerators: Vec<BigInt>, denominator: BigInt },
    Float(Vec<f64>),
}

impl Distribution {
    pub fn point_mass(n: usize, v: usize, mode: EvolutionMode) -> Self {
        match mode {
            EvolutionMode::Exact => {
                let mut numerators = vec![BigInt::zero(); n];
                numerators[v] = BigInt::from(1);
                Distribution::Exact { numerators, denominator: BigInt::from(1) }
            }
            EvolutionMode::Float => {
                let mut p = vec![0.0; n];
                p[v] = 1.0;
                Distribution::Float(p)
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Distribution::Exact { numerators, .. } => numerators.len(),
            Distribution::Float(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> EvolutionMode {
        match self {
            Distribution::Exact { .. } => EvolutionMode::Exact,
            Distribution::Float(_) => EvolutionMode::Float,
        }
    }

    pub fn to_rationals(&self) -> Option<Vec<BigRational>> {
        match self {
            Distribution::Exact { numerators, denominator } => {
                Some(numerators.iter().map(|a| BigRational::new(a.clone(), denominator.clone())).collect())
            }
            Distribution::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Distribution::Exact { .. } => {
                self.to_rationals().unwrap().iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
            }
            Distribution::Float(p) => p.clone(),
        }
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn map_vertices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    if n >= PAR_THRESHOLD {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// One step `mu -> mu P`.
pub fn step<G: Walkable + ?Sized>(g: &G, mu: &Distribution, lazy: bool) -> Distribution {
    let n = g.n();
    let k = g.k();
    match mu {
        Distribution::Exact { numerators, denominator } => {
            let kb = BigInt::from(k);
            let next = map_vertices(n, |w| {
                let mut s: BigInt = g.in_neighbors(w).iter().map(|&u| &numerators[u]).sum();
                if lazy {
                    s += &numerators[w] * &kb;
                }
                s
            });
            let factor = if lazy { BigInt::from(2 * k) } else { kb.clone() };
            Distribution::Exact { numerators: next, denominator: denominator * factor }
        }
        Distribution::Float(p) => {
            let move_w = if lazy { 0.5 / k as f64 } else { 1.0 / k as f64 };
            let next = map_vertices(n, |w| {
                let hold = if lazy { 0.5 * p[w] } else { 0.0 };
                compensated_sum(g.in_neighbors(w).iter().map(|&u| p[u] * move_w).chain(std::iter::once(hold)))
            });
            Distribution::Float(next)
        }
    }
}

/// `mu^0, ..., mu^horizon` from `v0`.
pub fn evolve_srw<G: Walkable + ?Sized>(
    g: &G,
    v0: usize,
    horizon: usize,
    opts: &WalkOptions,
) -> Result<Vec<Distribution>> {
    check_vertex(g, v0)?;
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(Distribution::point_mass(g.n(), v0, opts.mode(g.n(), horizon)));
    for _ in 0..horizon {
        let next = step(g, out.last().unwrap(), opts.lazy);
        out.push(next);
    }
    Ok(out)
}

fn check_vertex<G: Walkable + ?Sized>(g: &G, v0: usize) -> Result<()> {
    if v0 >= g.n() {
        return Err(Error::Domain(format!("start vertex {v0} out of range 0..{}", g.n())));
    }
    Ok(())
}

/// Distances of `mu` to uniform: total, its color-averaged part, and the
/// remainder. Without a coloring all vertices form one class, so
/// `trivial = 0` and `orth = total`.
#[derive(Clone, Debug, PartialEq)]
pub struct TvSplit {
    pub total: f64,
    pub trivial: f64,
    pub orth: f64,
    pub total_exact: Option<BigRational>,
}

pub fn tv_split(mu: &Distribution, colors: Option<&[usize]>, num_colors: usize) -> TvSplit {
    let n = mu.len();
    let one_class = vec![0usize; n];
    let (colors, m) = match colors {
        Some(c) => (c, num_colors),
        None => (&one_class[..], 1),
    };
    let mut sizes = vec![0usize; m];
    for &c in colors {
        sizes[c] += 1;
    }
    match mu {
        Distribution::Exact { numerators, denominator } => {
            let nb = BigInt::from(n);
            let total: BigInt = numerators.iter().map(|a| (a * &nb - denominator).abs()).sum();
            let mut class_mass = vec![BigInt::zero(); m];
            for (a, &c) in numerators.iter().zip(colors) {
                class_mass[c] += a;
            }
            let trivial: BigInt =
                class_mass.iter().zip(&sizes).map(|(s, &sz)| (s * &nb - denominator * BigInt::from(sz)).abs()).sum();
            // sum_w |mu(w) - mass(c)/|c||, grouped by class
            let mut orth = BigRational::zero();
            for c in 0..m {
                let sz = BigInt::from(sizes[c]);
                let dev: BigInt = numerators
                    .iter()
                    .zip(colors)
                    .filter(|(_, &cc)| cc == c)
                    .map(|(a, _)| (a * &sz - &class_mass[c]).abs())
                    .sum();
                orth += BigRational::new(dev, sz);
            }
            let two_n_den = denominator * BigInt::from(2 * n);
            let total = BigRational::new(total, two_n_den.clone());
            let trivial = BigRational::new(trivial, two_n_den);
            let orth = orth / BigRational::from_integer(denominator * BigInt::from(2));
            let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
            TvSplit { total: f(&total), trivial: f(&trivial), orth: f(&orth), total_exact: Some(total) }
        }
        Distribution::Float(p) => {
            let u = 1.0 / n as f64;
            let total = 0.5 * compensated_sum(p.iter().map(|x| (x - u).abs()));
            let mut class_mass = vec![Vec::new(); m];
            for (&x, &c) in p.iter().zip(colors) {
                class_mass[c].push(x);
            }
            let class_mass: Vec<f64> = class_mass.into_iter().map(|v| compensated_sum(v.into_iter())).collect();
            let trivial =
                0.5 * compensated_sum(class_mass.iter().zip(&sizes).map(|(s, &sz)| (s - sz as f64 * u).abs()));
            let orth =
                0.5 * compensated_sum(p.iter().zip(colors).map(|(x, &c)| (x - class_mass[c] / sizes[c] as f64).abs()));
            TvSplit { total, trivial, orth, total_exact: None }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "vertex")]
pub enum Start {
    Vertex(usize),
    /// Maximize over all start vertices at every `t`.
    Worst,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingProfile {
    pub start: Start,
    pub lazy: bool,
    pub mode: EvolutionMode,
    pub times: Vec<usize>,
    pub tv_total: Vec<f64>,
    pub tv_trivial: Vec<f64>,
    pub tv_orth: Vec<f64>,
    #[serde(skip)]
    pub tv_total_exact: Option<Vec<BigRational>>,
    /// `(eps, first t with tv_total < eps)`, `None` past the horizon.
    pub t_mix: Vec<(f64, Option<usize>)>,
}

impl MixingProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,tv_total,tv_trivial,tv_orth\n");
        for i in 0..self.times.len() {
            writeln!(
                s,
                "{},{},{},{}",
                self.times[i],
                fmt12(self.tv_total[i]),
                fmt12(self.tv_trivial[i]),
                fmt12(self.tv_orth[i])
            )
            .unwrap();
        }
        s
    }
}

/// Twelve significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// Steps one or all start distributions in lockstep and reports the
/// (worst) TV split at each time.
struct ProfileRunner<'a, G: Walkable + ?Sized> {
    g: &'a G,
    lazy: bool,
    current: Vec<Distribution>,
    t: usize,
}

impl<'a, G: Walkable + ?Sized> ProfileRunner<'a, G> {
    fn new(g: &'a G, start: Start, mode: EvolutionMode, lazy: bool) -> Result<Self> {
        if let Some(v) = first_unreachable(g) {
            return Err(Error::Disconnected { unreachable: v });
        }
        let starts: Vec<usize> = match start {
            Start::Vertex(v) => {
                check_vertex(g, v)?;
                vec![v]
            }
            Start::Worst => (0..g.n()).collect(),
        };
        let current = starts.iter().map(|&v| Distribution::point_mass(g.n(), v, mode)).collect();
        Ok(Self { g, lazy, current, t: 0 })
    }

    fn split(&self) -> TvSplit {
        let (colors, m) = match self.g.coloring() {
            Some(c) => (Some(c.colors()), c.num_colors()),
            None => (None, 1),
        };
        self.current
            .iter()
            .map(|mu| tv_split(mu, colors, m))
            .max_by(|a, b| match (&a.total_exact, &b.total_exact) {
                (Some(x), Some(y)) => x.cmp(y),
                _ => a.total.total_cmp(&b.total),
            })
            .unwrap()
    }

    fn advance(&mut self) {
        for mu in &mut self.current {
            *mu = step(self.g, mu, self.lazy);
        }
        self.t += 1;
    }
}

fn below(split: &TvSplit, eps: f64) -> bool {
    match &split.total_exact {
        Some(x) => *x < BigRational::from_float(eps).expect("finite eps"),
        None => split.total < eps,
    }
}

fn check_eps(eps: &[f64]) -> Result<()> {
    if let Some(e) = eps.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Domain(format!("eps = {e} outside (0,1)")));
    }
    Ok(())
}

/// TV profile for `t = 0..=horizon`.
pub fn tv_profile<G: Walkable + ?Sized>(
    g: &G,
    start: Start,
    horizon: usize,
    eps: &[f64],
    opts: &WalkOptions,
) -> Result<MixingProfile> {
    check_eps(eps)?;
    let mode = opts.mode(g.n(), horizon);
    let mut run = ProfileRunner::new(g, start, mode, opts.lazy)?;
    let mut p = MixingProfile {
        start,
        lazy: opts.lazy,
        mode,
        times: Vec::with_capacity(horizon + 1),
        tv_total: Vec::with_capacity(horizon + 1),
        tv_trivial: Vec::with_capacity(horizon + 1),
        tv_orth: Vec::with_capacity(horizon + 1),
        tv_total_exact: (mode == EvolutionMode::Exact).then(Vec::new),
        t_mix: eps.iter().map(|&e| (e, None)).collect(),
    };
    loop {
        let s = run.split();
        for (e, t) in &mut p.t_mix {
            if t.is_none() && below(&s, *e) {
                *t = Some(run.t);
            }
        }
        p.times.push(run.t);
        p.tv_total.push(s.total);
        p.tv_trivial.push(s.trivial);
        p.tv_orth.push(s.orth);
        if let (Some(v), Some(x)) = (&mut p.tv_total_exact, s.total_exact) {
            v.push(x);
        }
        if run.t == horizon {
            break;
        }
        run.advance();
    }
    Ok(p)
}

/// Runs until TV drops below every `eps` or `max_horizon` is reached.
pub fn mixing_times<G: Walkable + ?Sized>(
    g: &G,
    start: Start,
    eps: &[f64],
    opts: &WalkOptions,
    max_horizon: usize,
) -> Result<Vec<Option<usize>>> {
    check_eps(eps)?;
    let mut run = ProfileRunner::new(g, start, opts.mode(g.n(), max_horizon), opts.lazy)?;
    let mut out = vec![None; eps.len()];
    loop {
        let s = run.split();
        for (o, &e) in out.iter_mut().zip(eps) {
            if o.is_none() && below(&s, e) {
                *o = Some(run.t);
            }
        }
        if out.iter().all(Option::is_some) || run.t == max_horizon {
            return Ok(out);
        }
        run.advance();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffRatio {
    pub t_eps: Option<usize>,
    pub t_one_minus_eps: Option<usize>,
    /// `t_mix(eps) / t_mix(1 - eps)`; infinite when the denominator is 0,
    /// NaN when either time is past the horizon.
    pub ratio: f64,
    pub infinite: bool,
}

/// `t_mix(eps) / t_mix(1 - eps)` for each family member.
pub fn cutoff_ratio<G: Walkable>(
    family: &[(&G, usize)],
    eps: f64,
    opts: &WalkOptions,
    max_horizon: usize,
) -> Result<Vec<CutoffRatio>> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("cutoff ratio needs 0 < eps < 1/2, got {eps}")));
    }
    family
        .iter()
        .map(|&(g, v0)| {
            let t = mixing_times(g, Start::Vertex(v0), &[eps, 1.0 - eps], opts, max_horizon)?;
            let (a, b) = (t[0], t[1]);
            let (ratio, infinite) = match (a, b) {
                (Some(_), Some(0)) => (f64::INFINITY, true),
                (Some(a), Some(b)) => (a as f64 / b as f64, false),
                _ => (f64::NAN, false),
            };
            Ok(CutoffRatio { t_eps: a, t_one_minus_eps: b, ratio, infinite })
        })
        .collect()
}
