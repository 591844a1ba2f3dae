use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use num_bigint::BigInt;
use num_integer::Integer;

use super::field::FieldSpec;
use super::matrix::{canonicalize, Matrix, ProjectiveMatrix};
use crate::graphlab::RegularGraph;
use crate::{Error, Result};

/// Generators of a subgroup of `PGL_d(F_q)`, with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    field: FieldSpec,
    d: usize,
    gens: Vec<ProjectiveMatrix>,
    symmetric: bool,
}

fn multiset(gens: &[ProjectiveMatrix]) -> BTreeMap<&ProjectiveMatrix, usize> {
    let mut m = BTreeMap::new();
    for g in gens {
        *m.entry(g).or_insert(0) += 1;
    }
    m
}

impl GeneratorSet {
    pub fn new(field: FieldSpec, d: usize, matrices: &[Matrix]) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Domain("empty generator set".into()));
        }
        let gens = matrices
            .iter()
            .map(|m| {
                if m.d() != d {
                    return Err(Error::Domain(format!("generator is {}x{}, expected {d}x{d}", m.d(), m.d())));
                }
                canonicalize(m, &field)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut s = Self { field, d, gens, symmetric: false };
        s.symmetric = s.check_symmetric();
        Ok(s)
    }

    /// Each class occurs exactly as often as its inverse class.
    fn check_symmetric(&self) -> bool {
        let counts = multiset(&self.gens);
        counts.iter().all(|(g, &c)| counts.get(&g.inverse(&self.field)).copied().unwrap_or(0) == c)
    }

    /// Appends inverses until every class is balanced by its inverse.
    pub fn symmetrize(mut self) -> Self {
        let inverses: Vec<ProjectiveMatrix> = {
            let counts = multiset(&self.gens);
            let mut add = Vec::new();
            for (g, &c) in &counts {
                let gi = g.inverse(&self.field);
                let ci = counts.get(&gi).copied().unwrap_or(0);
                add.extend(std::iter::repeat_n(gi, c.saturating_sub(ci)));
            }
            add
        };
        self.gens.extend(inverses);
        self.symmetric = true;
        self
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn gens(&self) -> &[ProjectiveMatrix] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Every generator has determinant in `(F_q^*)^d`, i.e. the generated
    /// group lies in `PSL_d(F_q)`. Well defined on scalar classes since
    /// scaling multiplies the determinant by a `d`-th power.
    pub fn in_psl(&self) -> bool {
        let q1 = self.field.q() as u64 - 1;
        let e = q1 / (self.d as u64).gcd(&q1);
        self.gens.iter().all(|g| self.field.pow(g.matrix().det(&self.field), e) == 1)
    }
}

#[derive(Clone, Debug)]
pub struct CayleyGraph {
    pub graph: RegularGraph,
    /// Vertex `i` is `elements[i]`; vertex 0 is the identity.
    pub elements: Vec<ProjectiveMatrix>,
    pub in_psl: bool,
}

impl CayleyGraph {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// BFS closure from the identity under right multiplication. Each layer is
/// sorted by canonical entries before numbering, so vertex indices are
/// reproducible. Fails once more than `cap` elements are found.
pub fn cayley_graph(gens: &GeneratorSet, cap: usize) -> Result<CayleyGraph> {
    if gens.is_empty() {
        return Err(Error::Domain("empty generator set".into()));
    }
    if !gens.is_symmetric() {
        return Err(Error::Domain("generator set is not closed under inverses; symmetrize it first".into()));
    }
    let f = &gens.field;
    let mut elements = vec![ProjectiveMatrix::identity(gens.d)];
    let mut index: HashMap<ProjectiveMatrix, usize> = HashMap::from([(elements[0].clone(), 0)]);
    let mut layer = 0..1;
    while !layer.is_empty() {
        let mut next: Vec<ProjectiveMatrix> = Vec::new();
        for x in layer.clone() {
            for s in &gens.gens {
                let y = elements[x].mul(s, f);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), usize::MAX);
                    next.push(y);
                }
            }
        }
        if elements.len() + next.len() > cap {
            return Err(Error::CapExceeded { cap, frontier: next.len() });
        }
        next.sort();
        let start = elements.len();
        for (i, y) in next.into_iter().enumerate() {
            index.insert(y.clone(), start + i);
            elements.push(y);
        }
        layer = start..elements.len();
    }
    let adjacency: Vec<Vec<usize>> =
        elements.iter().map(|x| gens.gens.iter().map(|s| index[&x.mul(s, f)]).collect()).collect();
    let graph = RegularGraph::from_adjacency(gens.len(), adjacency)?;
    Ok(CayleyGraph { graph, elements, in_psl: gens.in_psl() })
}

/// `|PGL_d(F_q)| = (1/(q-1)) prod_{i<d} (q^d - q^i)`.
pub fn pgl_order(d: u32, q: u64) -> BigInt {
    let q = BigInt::from(q);
    let qd = q.pow(d);
    let prod: BigInt = (0..d).map(|i| &qd - q.pow(i)).product();
    prod / (q - 1)
}

fn parse_line(body: &str, lineno: usize) -> Result<Vec<u32>> {
    body.split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse { line: lineno, message: format!("bad integer {t:?}") }))
        .collect()
}

/// Reads `gens <d> <p> <e>`, then `modulus c_0 ... c_e` when `e > 1`, then
/// one generator per line as `d^2` field elements, row-major.
pub fn parse_generators(source: impl BufRead) -> Result<GeneratorSet> {
    let mut lines = source.lines().enumerate().filter_map(|(i, l)| match l {
        Err(e) => Some(Err(Error::from(e))),
        Ok(l) => {
            let body = l.split('#').next().unwrap_or("").trim().to_string();
            (!body.is_empty()).then_some(Ok((i + 1, body)))
        }
    });
    let (hl, header) = lines.next().transpose()?.ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "gens" {
        return Err(Error::Parse { line: hl, message: format!("expected `gens <d> <p> <e>`, got {header:?}") });
    }
    let nums = parse_line(&h[1..].join(" "), hl)?;
    let (d, p, e) = (nums[0] as usize, nums[1], nums[2]);
    if d == 0 {
        return Err(Error::Parse { line: hl, message: "matrix size must be >= 1".into() });
    }
    let field = if e > 1 {
        let (ml, body) =
            lines.next().transpose()?.ok_or(Error::Parse { line: hl + 1, message: "missing modulus line".into() })?;
        let rest = body
            .strip_prefix("modulus")
            .ok_or(Error::Parse { line: ml, message: "expected `modulus c_0 ... c_e`".into() })?;
        let coeffs = parse_line(rest, ml)?;
        FieldSpec::new(p, e, Some(&coeffs)).map_err(|err| Error::Parse { line: ml, message: err.to_string() })?
    } else {
        FieldSpec::new(p, e.max(1), None).map_err(|err| Error::Parse { line: hl, message: err.to_string() })?
    };
    let mut mats = Vec::new();
    for l in lines {
        let (no, body) = l?;
        let entries = parse_line(&body, no)?;
        if entries.len() != d * d {
            return Err(Error::Parse {
                line: no,
                message: format!("expected {} entries, got {}", d * d, entries.len()),
            });
        }
        let m = Matrix::new(d, entries)?;
        canonicalize(&m, &field).map_err(|err| Error::Parse { line: no, message: err.to_string() })?;
        mats.push(m);
    }
    GeneratorSet::new(field, d, &mats)
}
