use std::collections::BTreeMap;

use cutoff_core::cayley::{cayley_graph, FieldSpec, GeneratorSet, Matrix};
use cutoff_core::graphlab::{
    complete, cycle, evolve_srw, first_unreachable, hypercube, normal_bound, petersen, planted_path, ram_digraph_bound,
    spectral_report, tv_profile, tv_split, Coloring, RegularGraph, Start, WalkOptions,
};
use cutoff_core::qcalc::{
    drift_constants, drift_limit, enumerate_moves, increment_law, mass_polynomial, r_norm, vertex_degree,
    vertex_degree_at,
};
use cutoff_core::sector::{transition_distribution, SectorPoint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Circulant graph on `Z_n` with connection set `±s` for each `s`.
fn circulant(n: usize, steps: &[usize]) -> RegularGraph {
    let mut edges = Vec::new();
    let mut k = 0;
    for &s in steps {
        for v in 0..n {
            if 2 * s == n {
                if v < s {
                    edges.push((v, v + s));
                }
            } else {
                edges.push((v, (v + s) % n));
            }
        }
        k += if 2 * s == n { 1 } else { 2 };
    }
    RegularGraph::from_edges(n, k, &edges).unwrap()
}

fn arb_circulant() -> impl Strategy<Value = RegularGraph> {
    (5usize..40)
        .prop_flat_map(|n| (Just(n), proptest::collection::btree_set(1..=n / 2, 1..4)))
        .prop_map(|(n, s)| circulant(n, &s.into_iter().collect::<Vec<_>>()))
}

fn arb_graph() -> impl Strategy<Value = RegularGraph> {
    prop_oneof![
        arb_circulant(),
        (0u64..1000).prop_map(|seed| planted_path(40, 8, seed).unwrap()),
        (2u32..6).prop_map(|m| hypercube(m).unwrap()),
        (2usize..9).prop_map(|n| complete(n).unwrap()),
        Just(petersen()),
    ]
}

// ---------------------------------------------------------------- qcalc

#[test]
fn move_masses_sum_to_the_degree() {
    for d in 2..=10 {
        assert_eq!(mass_polynomial(d).unwrap(), vertex_degree(d).unwrap(), "d={d}");
    }
}

#[test]
fn planar_move_weights() {
    for m in enumerate_moves(3).unwrap() {
        let (dx, dy) = (m.gamma_prime[0], m.gamma_prime[1]);
        assert_eq!(m.z_exponent as i32, dx + dy + 1, "{:?}", m.gamma);
    }
}

#[test]
fn drift_has_the_fitted_large_q_rate() {
    // fitted once over q = 2..=1024 and rounded up
    let fitted = [(2u32, 2.0), (3, 2.4), (4, 4.4), (5, 5.4), (6, 7.2), (7, 7.8)];
    for (d, k) in fitted {
        let limit = drift_limit(d) as f64;
        for q in 2..=1024i64 {
            let e = drift_constants(d, &rat(q)).unwrap().drift_f64();
            assert!((e - limit).abs() <= k / q as f64, "d={d} q={q}: {e}");
        }
    }
}

#[test]
fn r_norm_unit_vectors() {
    for d in 2..=12u32 {
        let unit = |i: usize| {
            let mut x = vec![0i64; d as usize - 1];
            x[i] = 1;
            r_norm(d, &x)
        };
        assert_eq!(unit(0), d as i64 - 1);
        assert_eq!(unit(d as usize - 2), d as i64 - 1);
        let mid = unit(((d as usize - 1).div_ceil(2)) - 1);
        assert!((0..d as usize - 1).all(|i| unit(i) <= mid));
    }
}

proptest! {
    #[test]
    fn r_norm_is_linear(d in 2u32..10, seed in proptest::collection::vec((0i64..1000, 0i64..1000), 9)) {
        let n = d as usize - 1;
        let x: Vec<i64> = seed.iter().take(n).map(|p| p.0).collect();
        let y: Vec<i64> = seed.iter().take(n).map(|p| p.1).collect();
        let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert_eq!(r_norm(d, &sum), r_norm(d, &x) + r_norm(d, &y));
    }

    #[test]
    fn d3_drift_closed_form(q in 2i64..5000) {
        let c = drift_constants(3, &rat(q)).unwrap();
        let s = q * q + q + 1;
        prop_assert_eq!(&c.drift, &BigRational::new((2 * (q * q - 1)).into(), s.into()));
        // twice the graph-distance drift (q^2-1)/(q^2+q+1)
        prop_assert_eq!(c.drift / rat(2), BigRational::new((q * q - 1).into(), s.into()));
    }
}

// ---------------------------------------------------------------- sector

fn points(d: u32, max: u32) -> Vec<SectorPoint> {
    let n = d as usize - 1;
    let mut out = Vec::new();
    let total = (max + 1).pow(n as u32);
    for code in 0..total {
        let x: Vec<u32> = (0..n).map(|i| (code / (max + 1).pow(i as u32)) % (max + 1)).collect();
        out.push(SectorPoint::from_x(x));
    }
    out
}

#[test]
fn step_laws_are_stochastic_on_all_boundary_strata() {
    for d in 2..=7 {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let qr = rat(q);
            let deg = vertex_degree(d).unwrap().eval(&qr);
            for p in points(d, 3) {
                let law = transition_distribution(d, &qr, &p).unwrap();
                assert_eq!(law.total(), BigRational::one(), "d={d} q={q} {p}");
                // folding only merges: unnormalized masses add up to sum q^Z
                let moved: BigRational = law.entries.iter().map(|(_, m)| m * &deg).sum();
                assert_eq!(moved, deg);
            }
        }
    }
}

proptest! {
    #[test]
    fn interior_increments_follow_the_drift_law(
        d in 2u32..7,
        q in prop::sample::select(vec![2i64, 3, 4, 5, 7, 8, 9]),
        x in proptest::collection::vec(1u32..20, 6),
    ) {
        let p = SectorPoint::from_x(x[..d as usize - 1].to_vec());
        let qr = rat(q);
        let mut by_r: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (t, m) in transition_distribution(d, &qr, &p).unwrap().entries {
            *by_r.entry(t.r_norm() - p.r_norm()).or_insert_with(BigRational::zero) += m;
        }
        by_r.retain(|_, m| !m.is_zero());
        prop_assert_eq!(by_r, increment_law(d, &qr).unwrap());
    }

    #[test]
    fn d3_axes_are_mirror_images(q in 2i64..12, y in 1u32..10) {
        let qr = rat(q);
        let a = transition_distribution(3, &qr, &SectorPoint::from_x(vec![0, y])).unwrap();
        let b = transition_distribution(3, &qr, &SectorPoint::from_x(vec![y, 0])).unwrap();
        let mut mirrored: Vec<(SectorPoint, BigRational)> = a
            .entries
            .into_iter()
            .map(|(t, m)| (SectorPoint::from_x(vec![t.x()[1], t.x()[0]]), m))
            .collect();
        mirrored.sort();
        prop_assert_eq!(mirrored, b.entries);
    }
}

// ---------------------------------------------------------------- graphlab

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_evolution_is_stochastic(g in arb_graph(), lazy in any::<bool>()) {
        let opts = WalkOptions { lazy, ..Default::default() };
        for mu in evolve_srw(&g, 0, 50, &opts).unwrap() {
            let total: BigRational = mu.to_rationals().unwrap().into_iter().sum();
            prop_assert_eq!(total, BigRational::one());
        }
    }

    #[test]
    fn tv_splits_bound_the_total(g in arb_graph(), m in 1usize..5, seed in any::<u64>(), lazy in any::<bool>()) {
        let n = g.n();
        let m = m.min(n);
        // surjective colouring: first m vertices take each colour once
        let mut colors: Vec<usize> = (0..n).map(|v| if v < m { v } else { (seed >> (v % 60)) as usize % m }).collect();
        colors.rotate_left((seed % n as u64) as usize);
        let coloring = Coloring::new(colors.clone()).unwrap();
        let opts = WalkOptions { lazy, ..Default::default() };
        for mu in evolve_srw(&g, 0, 30, &opts).unwrap() {
            let s = tv_split(&mu, Some(&colors), coloring.num_colors());
            prop_assert!(s.total <= s.trivial + s.orth + 1e-12, "{:?}", s);
            prop_assert!(s.trivial <= s.total + 1e-12);
        }
    }

    #[test]
    fn lazy_tv_never_increases(g in arb_graph()) {
        prop_assume!(first_unreachable(&g).is_none());
        let p = tv_profile(&g, Start::Vertex(0), 80, &[0.5], &WalkOptions::lazy()).unwrap();
        match p.tv_total_exact {
            Some(exact) => {
                for w in exact.windows(2) {
                    prop_assert!(w[1] <= w[0]);
                }
            }
            None => {
                for w in p.tv_total.windows(2) {
                    prop_assert!(w[1] <= w[0] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn top_eigenvalue_is_the_degree(g in arb_graph()) {
        let r = spectral_report(&g).unwrap();
        let top = r.eigenvalues.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((top - g.k() as f64).abs() <= 1e-9 * g.k() as f64, "top {} k {}", top, g.k());
        prop_assert!(r.max_residual <= 1e-9 * g.k() as f64);
    }

    #[test]
    fn ramanujan_digraph_bound_dominates(ell in 1u64..=100, r in 1u64..=6, k in 2u64..=64) {
        let normal = normal_bound(ell, r, k, (k as f64).sqrt()).unwrap();
        let ram = ram_digraph_bound(ell, r, k).unwrap();
        prop_assert!(normal.ln <= ram.ln);
    }
}

#[test]
fn cycles_have_the_textbook_spectrum() {
    for n in [7usize, 10] {
        let r = spectral_report(&cycle(n).unwrap()).unwrap();
        let mut got: Vec<f64> = r.eigenvalues.iter().map(|e| e.0).collect();
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> =
            (0..n).map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

// ---------------------------------------------------------------- cayley

fn pgl2_generators(f: FieldSpec) -> GeneratorSet {
    let g = f.primitive();
    let mut mats = vec![Matrix::new(2, vec![1, 1, 0, 1]).unwrap(), Matrix::new(2, vec![0, 1, 1, 0]).unwrap()];
    if g != 1 {
        mats.push(Matrix::new(2, vec![g, 0, 0, 1]).unwrap());
    }
    GeneratorSet::new(f, 2, &mats).unwrap().symmetrize()
}

#[test]
fn pgl2_over_f4_by_brute_force() {
    let f = FieldSpec::new(2, 2, Some(&[1, 1, 1])).unwrap();
    let mut classes = 0;
    for code in 0..256u32 {
        let m: Vec<u32> = (0..4).map(|i| (code >> (2 * i)) & 3).collect();
        let det = f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2]));
        if det != 0 && m.iter().find(|&&x| x != 0) == Some(&1) {
            classes += 1;
        }
    }
    assert_eq!(classes, 60);
    let cg = cayley_graph(&pgl2_generators(f), 1000).unwrap();
    assert_eq!(cg.order(), 60);
}

#[test]
fn cayley_graphs_are_vertex_transitive() {
    let cg = cayley_graph(&pgl2_generators(FieldSpec::prime(5).unwrap()), 1000).unwrap();
    let g = &cg.graph;
    let reference = tv_profile(g, Start::Vertex(0), 12, &[0.25], &WalkOptions::default()).unwrap();
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    for _ in 0..5 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let v = (state >> 33) as usize % g.n();
        let p = tv_profile(g, Start::Vertex(v), 12, &[0.25], &WalkOptions::default()).unwrap();
        assert_eq!(p.tv_total_exact, reference.tv_total_exact, "start {v}");
    }
}

#[test]
fn generator_count_matches_the_building_degree() {
    // 4 = q + 1 symmetric generators of PGL_2(F_3): u, u^-1 and two involutions
    let f = FieldSpec::prime(3).unwrap();
    let mats = [
        Matrix::new(2, vec![1, 1, 0, 1]).unwrap(),
        Matrix::new(2, vec![1, 2, 0, 1]).unwrap(),
        Matrix::new(2, vec![0, 1, 1, 0]).unwrap(),
        Matrix::new(2, vec![2, 0, 0, 1]).unwrap(),
    ];
    let gens = GeneratorSet::new(f, 2, &mats).unwrap();
    assert!(gens.is_symmetric());
    let cg = cayley_graph(&gens, 1000).unwrap();
    assert_eq!(cg.order(), 24);
    assert_eq!(BigRational::from_integer(cg.graph.k().into()), vertex_degree_at(2, &rat(3)).unwrap());
}
