use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::graph::{RegularDigraph, RegularGraph};
use crate::{Error, Result};

/// Largest `n` handled by dense eigensolvers.
pub const DENSE_CAP: usize = 4096;

/// Residual tolerance per unit degree: eigenpairs must satisfy
/// `|A v - lambda v| <= RESIDUAL_TOL * k`.
pub const RESIDUAL_TOL: f64 = 1e-9;

const LANCZOS_STEPS: usize = 600;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Dense,
    /// Lanczos on the complement of the trivial space: only extremal
    /// non-trivial eigenvalues are reported.
    Iterative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub k: usize,
    pub mode: SolverMode,
    /// Graphs: real parts only (imaginary parts zero). Sorted descending by
    /// real part for graphs, by modulus for digraphs. Complete in dense
    /// mode; extremal Ritz values in iterative mode.
    pub eigenvalues: Vec<(f64, f64)>,
    pub trivial_count: usize,
    pub lambda_nontrivial: f64,
    /// Graphs: `2 sqrt(k-1)`; digraphs: `sqrt(k)`.
    pub ramanujan_bound: f64,
    pub is_ramanujan: bool,
    pub bipartite: bool,
    /// `false` when the supplied coloring is not equitable and was ignored.
    pub coloring_used: bool,
    pub max_residual: f64,
}

fn adjacency_matrix(lists: &[Vec<usize>]) -> DMatrix<f64> {
    let n = lists.len();
    let mut a = DMatrix::zeros(n, n);
    for (u, l) in lists.iter().enumerate() {
        for &v in l {
            a[(u, v)] += 1.0;
        }
    }
    a
}

/// Every vertex of a class has the same number of neighbors in each class.
fn is_equitable(g: &RegularGraph, colors: &[usize], m: usize) -> bool {
    let mut pattern: Vec<Option<Vec<usize>>> = vec![None; m];
    for v in 0..g.n() {
        let mut counts = vec![0; m];
        for &w in g.neighbors(v) {
            counts[colors[w]] += 1;
        }
        match &pattern[colors[v]] {
            None => pattern[colors[v]] = Some(counts),
            Some(p) if *p != counts => return false,
            _ => {}
        }
    }
    true
}

/// Orthonormal basis of the trivial space: constants, the bipartition sign
/// vector, and color-class indicators.
fn trivial_basis(g: &RegularGraph, bipartition: Option<&[u8]>, use_coloring: bool) -> Vec<DVector<f64>> {
    let n = g.n();
    let mut raw = vec![DVector::from_element(n, 1.0)];
    if let Some(side) = bipartition {
        raw.push(DVector::from_iterator(n, side.iter().map(|&s| if s == 0 { 1.0 } else { -1.0 })));
    }
    if use_coloring {
        let c = g.coloring().unwrap();
        for class in 0..c.num_colors() {
            raw.push(DVector::from_iterator(n, c.colors().iter().map(|&x| (x == class) as u8 as f64)));
        }
    }
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for mut v in raw {
        for b in &basis {
            let p = b.dot(&v);
            v.axpy(-p, b, 1.0);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    basis
}

fn apply(g: &RegularGraph, x: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(g.n(), (0..g.n()).map(|u| g.neighbors(u).iter().map(|&v| x[v]).sum()))
}

fn project_out(x: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for b in basis {
        let p = b.dot(x);
        x.axpy(-p, b, 1.0);
    }
}

/// Spectrum of a `k`-regular graph and the Ramanujan test
/// `nontrivial spectrum in [-2 sqrt(k-1), 2 sqrt(k-1)]`.
pub fn spectral_report(g: &RegularGraph) -> Result<SpectralReport> {
    spectral_report_with_cap(g, DENSE_CAP)
}

/// As [`spectral_report`], switching to Lanczos above `dense_cap` vertices.
pub fn spectral_report_with_cap(g: &RegularGraph, dense_cap: usize) -> Result<SpectralReport> {
    let n = g.n();
    let k = g.k();
    let connected = super::graph::first_unreachable(g).is_none();
    let bipartition = if connected { g.bipartition() } else { None };
    let coloring_used = g.coloring().is_some_and(|c| is_equitable(g, c.colors(), c.num_colors()));
    let basis = trivial_basis(g, bipartition.as_deref(), coloring_used);
    let tol = RESIDUAL_TOL * k.max(1) as f64;

    // trivial eigenvalues from the compression of A to the trivial space
    let t = basis.len();
    let images: Vec<DVector<f64>> = basis.iter().map(|b| apply(g, b)).collect();
    let small = DMatrix::from_fn(t, t, |i, j| basis[i].dot(&images[j]));
    let trivial: Vec<f64> = SymmetricEigen::new(small.clone()).eigenvalues.iter().copied().collect();

    let (mode, nontrivial, max_residual) =
        if n <= dense_cap { dense_nontrivial(g, &basis, &small)? } else { lanczos_nontrivial(g, &basis)? };
    if max_residual > tol {
        return Err(Error::SolverFailure { residual: max_residual });
    }
    let bound = 2.0 * ((k as f64) - 1.0).max(0.0).sqrt();
    let lambda_nontrivial = nontrivial.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let is_ramanujan = nontrivial.iter().all(|x| x.abs() <= bound + tol);
    let mut eigenvalues: Vec<f64> = trivial.iter().chain(&nontrivial).copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(SpectralReport {
        n,
        k,
        mode,
        eigenvalues: eigenvalues.into_iter().map(|x| (x, 0.0)).collect(),
        trivial_count: t,
        lambda_nontrivial,
        ramanujan_bound: bound,
        is_ramanujan,
        bipartite: bipartition.is_some(),
        coloring_used,
        max_residual,
    })
}

/// Dense eigensolve of `A` with its compression to the (invariant)
/// trivial space replaced by a shift outside the spectrum; the shifted
/// eigenvalues are discarded.
fn dense_nontrivial(
    g: &RegularGraph,
    basis: &[DVector<f64>],
    small: &DMatrix<f64>,
) -> Result<(SolverMode, Vec<f64>, f64)> {
    let n = g.n();
    let k = g.k() as f64;
    let shift = 4.0 * k + 10.0;
    let mut m = adjacency_matrix(g.adjacency());
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let c = if i == j { shift - small[(i, j)] } else { -small[(i, j)] };
            m.ger(c, bi, bj, 1.0);
        }
    }
    let eig = SymmetricEigen::try_new(m, 1e-14, 0).ok_or(Error::SolverFailure { residual: f64::INFINITY })?;
    let mut values = Vec::with_capacity(n);
    let mut max_residual = 0.0f64;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if (lambda - shift).abs() < 1.0 {
            continue;
        }
        let v: DVector<f64> = eig.eigenvectors.column(i).into_owned();
        let r = (apply(g, &v) - &v * lambda).norm();
        max_residual = max_residual.max(r);
        values.push(lambda);
    }
    if values.len() + basis.len() != n {
        // the trivial space was not invariant; cannot happen for a regular
        // graph with an equitable coloring
        return Err(Error::SolverFailure { residual: f64::INFINITY });
    }
    Ok((SolverMode::Dense, values, max_residual))
}

/// Lanczos with full reorthogonalization, started from a fixed vector in
/// the complement of the trivial space.
fn lanczos_nontrivial(g: &RegularGraph, basis: &[DVector<f64>]) -> Result<(SolverMode, Vec<f64>, f64)> {
    let n = g.n();
    let k = g.k() as f64;
    let mut v = DVector::from_fn(n, |i, _| ((i as f64 + 1.0) * 0.754_877_666).sin());
    project_out(&mut v, basis);
    v /= v.norm();
    let mut vs: Vec<DVector<f64>> = vec![v];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for j in 0..LANCZOS_STEPS.min(n - basis.len()) {
        let mut w = apply(g, &vs[j]);
        alpha.push(vs[j].dot(&w));
        // two passes of Gram-Schmidt against everything seen so far
        for _ in 0..2 {
            project_out(&mut w, basis);
            for q in &vs {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let b = w.norm();
        if b < 1e-10 * k {
            break;
        }
        beta.push(b);
        vs.push(w / b);
    }
    let m = alpha.len();
    let tri = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::try_new(tri, 1e-14, 0).ok_or(Error::SolverFailure { residual: f64::INFINITY })?;
    let (lo, hi) = eig.eigenvalues.iter().enumerate().fold((0, 0), |(lo, hi), (i, &x)| {
        (if x < eig.eigenvalues[lo] { i } else { lo }, if x > eig.eigenvalues[hi] { i } else { hi })
    });
    let mut values = Vec::new();
    let mut max_residual = 0.0f64;
    for i in if lo == hi { vec![lo] } else { vec![lo, hi] } {
        let lambda = eig.eigenvalues[i];
        let s = eig.eigenvectors.column(i);
        let mut x = DVector::zeros(n);
        for (c, q) in s.iter().zip(&vs) {
            x.axpy(*c, q, 1.0);
        }
        let r = (apply(g, &x) - &x * lambda).norm() / x.norm();
        max_residual = max_residual.max(r);
        values.push(lambda);
    }
    Ok((SolverMode::Iterative, values, max_residual))
}

/// Spectrum of a `k`-regular digraph and the test `|z| = k or |z| <= sqrt(k)`.
pub fn digraph_spectral_report(g: &RegularDigraph, dense_cap: usize) -> Result<SpectralReport> {
    let n = g.n();
    let k = g.k() as f64;
    if n > dense_cap {
        return Err(Error::Domain(format!("digraph with {n} vertices exceeds the dense solver cap {dense_cap}")));
    }
    let a = adjacency_matrix(g.out_lists());
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), 1e-14, 0)
        .ok_or(Error::SolverFailure { residual: f64::INFINITY })?;
    let (q, t) = schur.clone().unpack();
    let max_residual = (&a - &q * &t * q.transpose()).norm();
    let tol = RESIDUAL_TOL * k.max(1.0) * (n as f64).sqrt();
    if max_residual > tol {
        return Err(Error::SolverFailure { residual: max_residual });
    }
    let mut eigenvalues: Vec<(f64, f64)> = schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    eigenvalues.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    let ztol = 1e-7 * k.max(1.0);
    let (trivial, nontrivial): (Vec<_>, Vec<_>) =
        eigenvalues.iter().map(|z| z.0.hypot(z.1)).partition(|&r| (r - k).abs() <= ztol);
    let bound = k.sqrt();
    let lambda_nontrivial = nontrivial.iter().fold(0.0f64, |a, &x| a.max(x));
    Ok(SpectralReport {
        n,
        k: g.k(),
        mode: SolverMode::Dense,
        eigenvalues,
        trivial_count: trivial.len(),
        lambda_nontrivial,
        ramanujan_bound: bound,
        is_ramanujan: lambda_nontrivial <= bound + ztol,
        bipartite: false,
        coloring_used: false,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::super::graph::{complete, cycle, hypercube, petersen, planted_path, Coloring};
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-8
    }

    #[test]
    fn complete_graphs() {
        for k in 2..=10 {
            let r = spectral_report(&complete(k + 1).unwrap()).unwrap();
            assert_eq!(r.eigenvalues.len(), k + 1);
            assert!(close(r.eigenvalues[0].0, k as f64));
            assert!(r.eigenvalues[1..].iter().all(|z| close(z.0, -1.0)));
            assert!(r.is_ramanujan);
            assert_eq!(r.trivial_count, 1);
        }
    }

    #[test]
    fn petersen_spectrum() {
        let r = spectral_report(&petersen()).unwrap();
        let ev: Vec<f64> = r.eigenvalues.iter().map(|z| z.0).collect();
        assert!(close(ev[0], 3.0));
        assert!(ev[1..6].iter().all(|&x| close(x, 1.0)));
        assert!(ev[6..].iter().all(|&x| close(x, -2.0)));
        assert!(r.is_ramanujan);
        assert!(close(r.lambda_nontrivial, 2.0));
    }

    #[test]
    fn cycles_are_ramanujan() {
        for n in [5, 6, 11, 12] {
            let r = spectral_report(&cycle(n).unwrap()).unwrap();
            assert!(r.is_ramanujan);
            assert_eq!(r.bipartite, n % 2 == 0);
            assert_eq!(r.trivial_count, 1 + (n % 2 == 0) as usize);
            let mut expect: Vec<f64> =
                (0..n).map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
            expect.sort_by(|a, b| b.total_cmp(a));
            for (z, e) in r.eigenvalues.iter().zip(&expect) {
                assert!(close(z.0, *e));
            }
        }
    }

    #[test]
    fn coloring_characters_are_trivial() {
        // C_6 with 3 colors i mod 3: quotient is the triangle, eigenvalues 2, -1, -1
        let g = cycle(6).unwrap().with_coloring(Coloring::new((0..6).map(|i| i % 3).collect()).unwrap()).unwrap();
        let r = spectral_report(&g).unwrap();
        assert!(r.coloring_used);
        // -2 (bipartite sign) is not in the color span, so 4 trivial directions
        assert_eq!(r.trivial_count, 4);
        assert_eq!(r.eigenvalues.len(), 6);
        // a non-equitable coloring is ignored
        let g = cycle(6).unwrap().with_coloring(Coloring::new(vec![0, 0, 1, 1, 1, 1]).unwrap()).unwrap();
        assert!(!spectral_report(&g).unwrap().coloring_used);
    }

    #[test]
    fn planted_path_is_not_ramanujan() {
        let r = spectral_report(&planted_path(300, 60, 3).unwrap()).unwrap();
        assert!(!r.is_ramanujan);
        assert!(r.lambda_nontrivial > 2.0 * 2f64.sqrt());
    }

    #[test]
    fn iterative_mode_on_hypercube() {
        let r = spectral_report(&hypercube(13).unwrap()).unwrap();
        assert_eq!(r.mode, SolverMode::Iterative);
        // trivial: 13 and -13; extremal nontrivial: +-11
        assert!(close(r.lambda_nontrivial, 11.0));
        assert!(!r.is_ramanujan);
        assert_eq!(r.trivial_count, 2);
    }

    #[test]
    fn digraphs() {
        // directed triangle: eigenvalues are the cube roots of unity, k = 1
        let d = RegularDigraph::from_arcs(3, 1, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = digraph_spectral_report(&d, DENSE_CAP).unwrap();
        assert_eq!(r.trivial_count, 3);
        // complete digraph with loops on 4 vertices: J has spectrum {4,0,0,0}
        let arcs: Vec<_> = (0..4).flat_map(|u| (0..4).map(move |v| (u, v))).collect();
        let r = digraph_spectral_report(&RegularDigraph::from_arcs(4, 4, &arcs).unwrap(), DENSE_CAP).unwrap();
        assert_eq!(r.trivial_count, 1);
        assert!(r.is_ramanujan);
        // complete digraph without loops, k = 3: nontrivial -1 <= sqrt 3
        let arcs: Vec<_> = (0..4).flat_map(|u| (0..4).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        let r = digraph_spectral_report(&RegularDigraph::from_arcs(4, 3, &arcs).unwrap(), DENSE_CAP).unwrap();
        assert!(close(r.lambda_nontrivial, 1.0));
        assert!(r.is_ramanujan);
    }
}
