use crate::{Error, Result};

/// Largest field order supported (log/exp tables are materialized).
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// `F_q` with `q = p^e`, realized as `F_p[x]/(modulus)`. An element is the
/// integer whose base-`p` digits are its polynomial coefficients, lowest
/// degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    /// Monic, `c_0, ..., c_e`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime
    let mut r = 1u64;
    let (mut b, mut x) = (a as u64, (p - 2) as u64);
    while x > 0 {
        if x & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        x >>= 1;
    }
    r as u32
}

/// Remainder of `a` modulo monic `m` over `F_p`, coefficients low first.
fn poly_rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let off = a.len() - dm;
            for i in 0..dm {
                a[off + i] = ((a[off + i] as u64 + (p - lead) as u64 * m[i] as u64) % p as u64) as u32;
            }
        }
    }
    a
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// `F_{p^e}`; `modulus` (coefficients `c_0..c_e`) is required for `e > 1`
    /// and must be irreducible.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::Field(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::Field("extension degree must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| Error::Field(format!("field order {p}^{e} exceeds {MAX_FIELD_ORDER}")))?
            as u32;
        let modulus = match (e, modulus) {
            (1, None) => vec![0, 1],
            (_, None) => return Err(Error::Field(format!("degree-{e} extension needs a modulus"))),
            (_, Some(m)) => {
                if m.len() != e as usize + 1 {
                    return Err(Error::Field(format!("modulus must have {} coefficients", e + 1)));
                }
                if let Some(c) = m.iter().find(|&&c| c >= p) {
                    return Err(Error::Field(format!("modulus coefficient {c} not in F_{p}")));
                }
                let lead = m[e as usize];
                if lead == 0 {
                    return Err(Error::Field("modulus has leading coefficient 0".into()));
                }
                let li = inv_mod(lead, p);
                let monic: Vec<u32> = m.iter().map(|&c| (c as u64 * li as u64 % p as u64) as u32).collect();
                if !is_irreducible(&monic, p) {
                    return Err(Error::Field(format!("modulus {m:?} is reducible over F_{p}")));
                }
                monic
            }
        };
        let mut f = FieldSpec { p, e, q, modulus, exp: Vec::new(), log: Vec::new() };
        f.build_tables()?;
        Ok(f)
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.e as usize);
        for _ in 0..self.e {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    fn pack_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; da.len() + db.len() - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        self.pack_digits(&poly_rem(prod, &self.modulus, self.p))
    }

    /// Finds a primitive element and fills `exp`/`log`.
    fn build_tables(&mut self) -> Result<()> {
        let order = self.q - 1;
        let factors: Vec<u32> = (2..=order).filter(|&d| order.is_multiple_of(d) && is_prime(d as u64)).collect();
        let pow = |f: &Self, mut b: u32, mut x: u32| {
            let mut r = 1;
            while x > 0 {
                if x & 1 == 1 {
                    r = f.mul_slow(r, b);
                }
                b = f.mul_slow(b, b);
                x >>= 1;
            }
            r
        };
        let g = (1..self.q)
            .find(|&g| factors.iter().all(|&f| pow(self, g, order / f) != 1))
            .ok_or_else(|| Error::Field("no primitive element (modulus not irreducible?)".into()))?;
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, g);
        }
        self.exp = exp;
        self.log = log;
        Ok(())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> u32 {
        self.exp.get(1).copied().unwrap_or(1)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut r, mut place) = (0, 1);
        for _ in 0..self.e {
            r += (a % self.p + b % self.p) % self.p * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        r
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.e == 1 {
            return (self.p - a) % self.p;
        }
        let d: Vec<u32> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.pack_digits(&d)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.q as u64 - 1)) as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::Field("inverse of 0".into()));
        }
        let l = self.log[a as usize];
        Ok(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    pub fn pow(&self, a: u32, n: u64) -> u32 {
        if n == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (n % (self.q as u64 - 1));
        self.exp[(l % (self.q as u64 - 1)) as usize]
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }
}

/// No monic factor of degree `1..=deg/2`, by trial division.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for fd in 1..=deg / 2 {
        let count = (p as u64).pow(fd as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(fd + 1);
            let mut c = code;
            for _ in 0..fd {
                f.push((c % p as u64) as u32);
                c /= p as u64;
            }
            f.push(1);
            if poly_rem(m.to_vec(), &f, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}
