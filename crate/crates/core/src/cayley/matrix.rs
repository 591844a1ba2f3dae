use std::fmt;

use super::field::FieldSpec;
use crate::{Error, Result};

/// Row-major `d x d` matrix over a field, entries in the integer encoding
/// of [`FieldSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    d: usize,
    entries: Vec<u32>,
}

impl Matrix {
    pub fn new(d: usize, entries: Vec<u32>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(Error::Domain(format!(
                "expected {} entries for a {d}x{d} matrix, got {}",
                d * d,
                entries.len()
            )));
        }
        Ok(Self { d, entries })
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = vec![0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1;
        }
        Self { d, entries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.d + j]
    }

    pub fn mul(&self, other: &Matrix, f: &FieldSpec) -> Matrix {
        let d = self.d;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = 0;
                for l in 0..d {
                    s = f.add(s, f.mul(self.get(i, l), other.get(l, j)));
                }
                entries[i * d + j] = s;
            }
        }
        Matrix { d, entries }
    }

    pub fn scale(&self, c: u32, f: &FieldSpec) -> Matrix {
        Matrix { d: self.d, entries: self.entries.iter().map(|&x| f.mul(x, c)).collect() }
    }

    /// Row reduction; returns the determinant and, when invertible, the inverse.
    fn gauss_jordan(&self, f: &FieldSpec) -> (u32, Option<Matrix>) {
        let d = self.d;
        let mut a = self.entries.clone();
        let mut inv = Matrix::identity(d).entries;
        let mut det = 1;
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| a[r * d + col] != 0) else {
                return (0, None);
            };
            if piv != col {
                for j in 0..d {
                    a.swap(piv * d + j, col * d + j);
                    inv.swap(piv * d + j, col * d + j);
                }
                det = f.neg(det);
            }
            let p = a[col * d + col];
            det = f.mul(det, p);
            let pi = f.inv(p).expect("pivot is nonzero");
            for j in 0..d {
                a[col * d + j] = f.mul(a[col * d + j], pi);
                inv[col * d + j] = f.mul(inv[col * d + j], pi);
            }
            for r in 0..d {
                let c = a[r * d + col];
                if r == col || c == 0 {
                    continue;
                }
                for j in 0..d {
                    a[r * d + j] = f.sub(a[r * d + j], f.mul(c, a[col * d + j]));
                    inv[r * d + j] = f.sub(inv[r * d + j], f.mul(c, inv[col * d + j]));
                }
            }
        }
        (det, Some(Matrix { d, entries: inv }))
    }

    pub fn det(&self, f: &FieldSpec) -> u32 {
        self.gauss_jordan(f).0
    }

    pub fn inverse(&self, f: &FieldSpec) -> Result<Matrix> {
        self.gauss_jordan(f).1.ok_or(Error::Singular)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.d {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.d {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// A scalar class of invertible matrices, represented by the member whose
/// first nonzero entry (row-major) is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveMatrix(Matrix);

impl ProjectiveMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn identity(d: usize) -> Self {
        ProjectiveMatrix(Matrix::identity(d))
    }

    pub fn mul(&self, other: &ProjectiveMatrix, f: &FieldSpec) -> ProjectiveMatrix {
        // products of invertible matrices are invertible
        canonicalize_unchecked(&self.0.mul(&other.0, f), f)
    }

    pub fn inverse(&self, f: &FieldSpec) -> ProjectiveMatrix {
        canonicalize_unchecked(&self.0.inverse(f).expect("canonical matrices are invertible"), f)
    }
}

fn canonicalize_unchecked(m: &Matrix, f: &FieldSpec) -> ProjectiveMatrix {
    let lead = *m.entries.iter().find(|&&x| x != 0).expect("nonzero matrix");
    ProjectiveMatrix(m.scale(f.inv(lead).expect("nonzero"), f))
}

pub fn canonicalize(m: &Matrix, f: &FieldSpec) -> Result<ProjectiveMatrix> {
    if let Some(x) = m.entries.iter().find(|&&x| !f.contains(x)) {
        return Err(Error::Field(format!("entry {x} is not an element of F_{}", f.q())));
    }
    if m.det(f) == 0 {
        return Err(Error::Singular);
    }
    Ok(canonicalize_unchecked(m, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(d: usize, e: &[u32]) -> Matrix {
        Matrix::new(d, e.to_vec()).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(canonicalize(&Matrix::identity(3), &f5).unwrap().matrix(), &Matrix::identity(3));
        assert_eq!(canonicalize(&m(2, &[2, 0, 0, 2]), &f5).unwrap().matrix(), &Matrix::identity(2));
        assert_eq!(canonicalize(&m(2, &[0, 2, 1, 0]), &f5).unwrap().matrix(), &m(2, &[0, 1, 3, 0]));
        assert!(matches!(canonicalize(&m(2, &[1, 2, 2, 4]), &f5), Err(Error::Singular)));
        assert!(canonicalize(&m(2, &[1, 7, 0, 1]), &f5).is_err());
    }

    #[test]
    fn det_and_inverse() {
        let f7 = FieldSpec::prime(7).unwrap();
        let a = m(3, &[1, 2, 3, 0, 1, 4, 5, 6, 0]);
        // det = 1(0-24) - 2(0-20) + 3(0-5) = 1
        assert_eq!(a.det(&f7), 1);
        let inv = a.inverse(&f7).unwrap();
        assert_eq!(a.mul(&inv, &f7), Matrix::identity(3));
        let swap = m(2, &[0, 1, 1, 0]);
        assert_eq!(swap.det(&f7), 6);
    }

    #[test]
    fn scalar_classes_exhaustive() {
        // over F_3 and F_4, two invertible 2x2 matrices share a canonical
        // form iff one is a scalar multiple of the other
        for f in [FieldSpec::prime(3).unwrap(), FieldSpec::new(2, 2, Some(&[1, 1, 1])).unwrap()] {
            let q = f.q();
            let all: Vec<Matrix> = (0..q.pow(4))
                .map(|c| m(2, &[c % q, c / q % q, c / q / q % q, c / q / q / q]))
                .filter(|a| a.det(&f) != 0)
                .collect();
            for a in all.iter().step_by(3) {
                let ca = canonicalize(a, &f).unwrap();
                assert_eq!(canonicalize(ca.matrix(), &f).unwrap(), ca);
                for b in &all {
                    let scalar = (1..q).any(|s| &a.scale(s, &f) == b);
                    assert_eq!(canonicalize(b, &f).unwrap() == ca, scalar);
                }
            }
        }
    }
}
