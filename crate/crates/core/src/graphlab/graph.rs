use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Vertex coloring, surjective onto `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    m: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Result<Self> {
        let m = colors.iter().max().map_or(0, |&c| c + 1);
        let mut seen = vec![false; m];
        for &c in &colors {
            seen[c] = true;
        }
        if let Some(c) = seen.iter().position(|&s| !s) {
            return Err(Error::Domain(format!("coloring is not surjective: color {c} unused")));
        }
        Ok(Self { colors, m })
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.m
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.m];
        for &c in &self.colors {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Undirected `k`-regular multigraph. An edge `u v` puts `v` in the list of
/// `u` and `u` in the list of `v`; a loop `u u` contributes a single entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    k: usize,
    adjacency: Vec<Vec<usize>>,
    coloring: Option<Coloring>,
}

/// Directed multigraph with in- and out-degree `k` everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularDigraph {
    n: usize,
    k: usize,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

fn offenders(lists: &[Vec<usize>], k: usize) -> Vec<(usize, usize)> {
    lists.iter().enumerate().filter(|(_, l)| l.len() != k).map(|(v, l)| (v, l.len())).collect()
}

impl RegularGraph {
    /// Builds from an edge list, checking regularity.
    pub fn from_edges(n: usize, k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::with_capacity(k); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("edge ({u},{v}) out of range for n = {n}")));
            }
            adjacency[u].push(v);
            if u != v {
                adjacency[v].push(u);
            }
        }
        Self::from_adjacency(k, adjacency)
    }

    pub fn from_adjacency(k: usize, mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let bad = offenders(&adjacency, k);
        if !bad.is_empty() {
            return Err(Error::NotRegular { expected: k, offenders: bad });
        }
        for l in &mut adjacency {
            l.sort_unstable();
        }
        Ok(Self { n: adjacency.len(), k, adjacency, coloring: None })
    }

    pub fn with_coloring(mut self, coloring: Coloring) -> Result<Self> {
        if coloring.colors.len() != self.n {
            return Err(Error::Domain(format!(
                "coloring covers {} vertices, graph has {}",
                coloring.colors.len(),
                self.n
            )));
        }
        self.coloring = Some(coloring);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn coloring(&self) -> Option<&Coloring> {
        self.coloring.as_ref()
    }

    /// Edges with multiplicity, each once, `u <= v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * self.k / 2);
        for (u, l) in self.adjacency.iter().enumerate() {
            out.extend(l.iter().filter(|&&v| v >= u).map(|&v| (u, v)));
        }
        out
    }

    /// Two-coloring by parity of BFS depth, if every component admits one.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut side = vec![u8::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        queue.push_back(v);
                    } else if side[v] == side[u] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }
}

impl RegularDigraph {
    pub fn from_arcs(n: usize, k: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![Vec::with_capacity(k); n];
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::Domain(format!("arc ({u},{v}) out of range for n = {n}")));
            }
            out[u].push(v);
        }
        Self::from_out_lists(k, out)
    }

    pub fn from_out_lists(k: usize, mut out: Vec<Vec<usize>>) -> Result<Self> {
        let n = out.len();
        let mut inc = vec![Vec::with_capacity(k); n];
        for (u, l) in out.iter_mut().enumerate() {
            l.sort_unstable();
            for &v in l.iter() {
                if v >= n {
                    return Err(Error::Domain(format!("arc ({u},{v}) out of range for n = {n}")));
                }
                inc[v].push(u);
            }
        }
        let mut bad = offenders(&out, k);
        if bad.is_empty() {
            bad = offenders(&inc, k);
        }
        if !bad.is_empty() {
            return Err(Error::NotRegular { expected: k, offenders: bad });
        }
        Ok(Self { n, k, out, inc })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn out_lists(&self) -> &[Vec<usize>] {
        &self.out
    }
}

/// Access shared by walks on graphs and digraphs.
pub trait Walkable: Sync {
    fn n(&self) -> usize;
    fn k(&self) -> usize;
    fn out_neighbors(&self, v: usize) -> &[usize];
    fn in_neighbors(&self, v: usize) -> &[usize];
    fn coloring(&self) -> Option<&Coloring> {
        None
    }
}

impl Walkable for RegularGraph {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }
    fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }
    fn coloring(&self) -> Option<&Coloring> {
        self.coloring.as_ref()
    }
}

impl Walkable for RegularDigraph {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
    fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }
    fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }
}

/// Result of reading an edge-list file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadedGraph {
    Undirected(RegularGraph),
    Directed(RegularDigraph),
}

fn parse_fields<const N: usize>(line: &str, lineno: usize) -> Result<[usize; N]> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != N {
        return Err(Error::Parse { line: lineno, message: format!("expected {N} integers, got {:?}", line.trim()) });
    }
    let mut out = [0; N];
    for (o, f) in out.iter_mut().zip(&fields) {
        *o = f.parse().map_err(|_| Error::Parse { line: lineno, message: format!("bad integer {f:?}") })?;
    }
    Ok(out)
}

/// Significant lines with their 1-based numbers; blank lines and `#`
/// comments are skipped.
fn content_lines(source: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    source.lines().enumerate().filter_map(|(i, l)| match l {
        Err(e) => Some(Err(e.into())),
        Ok(l) => {
            let body = l.split('#').next().unwrap_or("").trim().to_string();
            (!body.is_empty()).then_some(Ok((i + 1, body)))
        }
    })
}

/// Reads `graph <n> <k> <directed|undirected>` followed by `u v` lines.
pub fn load_graph(source: impl BufRead) -> Result<LoadedGraph> {
    let mut lines = content_lines(source);
    let (hl, header) = lines.next().transpose()?.ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || Error::Parse {
        line: hl,
        message: format!("expected `graph <n> <k> <directed|undirected>`, got {header:?}"),
    };
    if h.len() != 4 || h[0] != "graph" {
        return Err(bad_header());
    }
    let n: usize = h[1].parse().map_err(|_| bad_header())?;
    let k: usize = h[2].parse().map_err(|_| bad_header())?;
    let directed = match h[3] {
        "directed" => true,
        "undirected" => false,
        _ => return Err(bad_header()),
    };
    let mut pairs = Vec::new();
    for l in lines {
        let (no, body) = l?;
        let [u, v] = parse_fields::<2>(&body, no)?;
        if u >= n || v >= n {
            return Err(Error::Parse { line: no, message: format!("vertex out of range 0..{n}") });
        }
        pairs.push((u, v));
    }
    Ok(if directed {
        LoadedGraph::Directed(RegularDigraph::from_arcs(n, k, &pairs)?)
    } else {
        LoadedGraph::Undirected(RegularGraph::from_edges(n, k, &pairs)?)
    })
}

/// Reads `v c` lines covering every vertex of an `n`-vertex graph once.
pub fn load_coloring(source: impl BufRead, n: usize) -> Result<Coloring> {
    let mut colors = vec![usize::MAX; n];
    for l in content_lines(source) {
        let (no, body) = l?;
        let [v, c] = parse_fields::<2>(&body, no)?;
        if v >= n {
            return Err(Error::Parse { line: no, message: format!("vertex {v} out of range 0..{n}") });
        }
        if colors[v] != usize::MAX {
            return Err(Error::Parse { line: no, message: format!("vertex {v} colored twice") });
        }
        colors[v] = c;
    }
    if let Some(v) = colors.iter().position(|&c| c == usize::MAX) {
        return Err(Error::Domain(format!("vertex {v} has no color")));
    }
    Coloring::new(colors)
}

pub fn write_graph(g: &RegularGraph) -> String {
    let mut s = format!("graph {} {} undirected\n", g.n, g.k);
    for (u, v) in g.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

pub fn write_digraph(g: &RegularDigraph) -> String {
    let mut s = format!("graph {} {} directed\n", g.n, g.k);
    for (u, l) in g.out.iter().enumerate() {
        for v in l {
            writeln!(s, "{u} {v}").unwrap();
        }
    }
    s
}

pub fn write_coloring(c: &Coloring) -> String {
    c.colors.iter().enumerate().map(|(v, c)| format!("{v} {c}\n")).collect()
}

pub fn cycle(n: usize) -> Result<RegularGraph> {
    if n < 3 {
        return Err(Error::Domain("cycle needs n >= 3".into()));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    RegularGraph::from_edges(n, 2, &edges)
}

/// `Q_m`, vertices are bit masks.
pub fn hypercube(m: u32) -> Result<RegularGraph> {
    if m == 0 || m > 24 {
        return Err(Error::Domain("hypercube dimension must be in 1..=24".into()));
    }
    let n = 1usize << m;
    let adjacency = (0..n).map(|v| (0..m).map(|b| v ^ (1 << b)).collect()).collect();
    RegularGraph::from_adjacency(m as usize, adjacency)
}

pub fn complete(n: usize) -> Result<RegularGraph> {
    if n < 2 {
        return Err(Error::Domain("complete graph needs n >= 2".into()));
    }
    let adjacency = (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect();
    RegularGraph::from_adjacency(n - 1, adjacency)
}

pub fn petersen() -> RegularGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    RegularGraph::from_edges(10, 3, &edges).expect("petersen graph is 3-regular")
}

/// A 3-regular multigraph that is far from an expander: a path of
/// `path_len` looped vertices spliced into a random cubic multigraph
/// (Hamiltonian cycle plus perfect matching) on the remaining vertices.
/// The path carries an eigenvector with eigenvalue near 3.
pub fn planted_path(n: usize, path_len: usize, seed: u64) -> Result<RegularGraph> {
    let rest = n.saturating_sub(path_len);
    if path_len < 2 || rest < 4 || !rest.is_multiple_of(2) {
        return Err(Error::Domain("planted path needs path_len >= 2 and an even remainder >= 4".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..rest).collect();
    order.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = (0..rest).map(|i| (order[i], order[(i + 1) % rest])).collect();
    order.shuffle(&mut rng);
    // cut one cycle edge and route it through the path
    let (a, b) = edges.pop().unwrap();
    edges.extend(order.chunks(2).map(|p| (p[0], p[1])));
    let p0 = rest;
    for i in 0..path_len {
        edges.push((p0 + i, p0 + i));
        if i + 1 < path_len {
            edges.push((p0 + i, p0 + i + 1));
        }
    }
    edges.push((a, p0));
    edges.push((p0 + path_len - 1, b));
    RegularGraph::from_edges(n, 3, &edges)
}

/// Whether every vertex reaches and is reached from vertex 0; returns the
/// first vertex that fails.
pub fn first_unreachable<G: Walkable + ?Sized>(g: &G) -> Option<usize> {
    let n = g.n();
    if n == 0 {
        return None;
    }
    for dir in 0..2 {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            let next = if dir == 0 { g.out_neighbors(u) } else { g.in_neighbors(u) };
            for &v in next {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<LoadedGraph> {
        load_graph(s.as_bytes())
    }

    #[test]
    fn loads_small_graphs() {
        let LoadedGraph::Undirected(c4) = load("graph 4 2 undirected\n0 1\n1 2\n2 3\n3 0\n").unwrap() else { panic!() };
        assert_eq!((c4.n(), c4.k()), (4, 2));
        let k4 = write_graph(&complete(4).unwrap());
        let LoadedGraph::Undirected(g) = load(&k4).unwrap() else { panic!() };
        assert_eq!((g.n(), g.k()), (4, 3));
        assert_eq!(g, complete(4).unwrap());
    }

    #[test]
    fn irregular_vertex_is_named() {
        // K_4 with the edge 2-3 replaced by a loop at 2: vertex 3 drops to degree 2
        let src = "graph 4 3 undirected\n0 1\n0 2\n0 3\n1 2\n1 3\n2 2\n";
        match load(src) {
            Err(Error::NotRegular { expected: 3, offenders }) => assert_eq!(offenders, vec![(3, 2)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load("graph 3 2 undirected\n0 1\n\n1 x\n") {
            Err(Error::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
        match load("graph 3 two undirected\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match load("graph 3 2 undirected\n0 5\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loops_and_multi_edges() {
        let LoadedGraph::Undirected(g) = load("graph 2 3 undirected\n0 1\n0 1\n0 0\n1 1\n").unwrap() else { panic!() };
        assert_eq!(g.neighbors(0), &[0, 1, 1]);
        let again = load(&write_graph(&g)).unwrap();
        assert_eq!(again, LoadedGraph::Undirected(g));
    }

    #[test]
    fn digraph_regularity() {
        let LoadedGraph::Directed(d) = load("graph 3 1 directed\n0 1\n1 2\n2 0\n").unwrap() else { panic!() };
        assert_eq!(d.out_neighbors(2), &[0]);
        assert_eq!(load(&write_digraph(&d)).unwrap(), LoadedGraph::Directed(d));
        // out-degrees fine, in-degree of 1 is 2
        assert!(matches!(
            load("graph 3 1 directed\n0 1\n1 2\n2 1\n"),
            Err(Error::NotRegular { offenders, .. }) if offenders == vec![(0, 0), (1, 2)]
        ));
    }

    #[test]
    fn coloring_files() {
        let c = load_coloring("0 0\n1 1\n2 0\n3 1\n".as_bytes(), 4).unwrap();
        assert_eq!(c.class_sizes(), vec![2, 2]);
        assert_eq!(load_coloring(write_coloring(&c).as_bytes(), 4).unwrap(), c);
        assert!(load_coloring("0 0\n1 2\n".as_bytes(), 2).is_err());
        assert!(load_coloring("0 0\n".as_bytes(), 2).is_err());
        assert!(matches!(load_coloring("0 0\n0 1\n".as_bytes(), 2), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn families() {
        assert_eq!(hypercube(4).unwrap().n(), 16);
        assert!(hypercube(4).unwrap().bipartition().is_some());
        assert!(cycle(5).unwrap().bipartition().is_none());
        let p = petersen();
        assert_eq!(p.edges().len(), 15);
        assert!(first_unreachable(&p).is_none());
        let g = planted_path(200, 40, 1).unwrap();
        assert_eq!(g.k(), 3);
        assert!(first_unreachable(&g).is_none());
        assert_eq!(g, planted_path(200, 40, 1).unwrap());
    }

    #[test]
    fn disconnected_detected() {
        let g = RegularGraph::from_edges(6, 2, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(first_unreachable(&g), Some(3));
        let d = RegularDigraph::from_arcs(2, 1, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(first_unreachable(&d), Some(1));
    }
}
