//! Arithmetic in small extension fields GF(p^k).
//!
//! Elements are residue polynomials modulo a monic irreducible, stored as
//! integers `0..q` whose base-`p` digits are the coefficients (lowest degree
//! first). Multiplication goes through discrete log tables built from a
//! primitive element found by search.

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1 << 16;

#[derive(Debug, Clone)]
pub struct GaloisField {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

/// Built-in irreducible for the order `q`, as coefficients lowest degree
/// first (monic).
pub fn builtin_modulus(q: u64) -> Option<(u64, Vec<u64>)> {
    let (p, m): (u64, &[u64]) = match q {
        4 => (2, &[1, 1, 1]),
        8 => (2, &[1, 1, 0, 1]),
        9 => (3, &[1, 0, 1]),
        16 => (2, &[1, 1, 0, 0, 1]),
        25 => (5, &[2, 0, 1]),
        27 => (3, &[1, 2, 0, 1]),
        49 => (7, &[1, 0, 1]),
        _ => return None,
    };
    Some((p, m.to_vec()))
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = crate::arith::pow_mod(b[db], p - 2, p);
    while r.len() > db {
        let c = *r.last().unwrap() * lead_inv % p;
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Exhaustive check: no monic factor of degree `1..=deg/2` divides `m`.
pub fn is_irreducible(m: &[u64], p: u64) -> bool {
    let Some(deg) = m.len().checked_sub(1) else {
        return false;
    };
    if deg == 0 || m[deg] % p == 0 {
        return false;
    }
    let m: Vec<u64> = m.iter().map(|c| c % p).collect();
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = low;
            for _ in 0..d {
                cand.push(x % p);
                x /= p;
            }
            cand.push(1);
            if poly_rem(&m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl GaloisField {
    /// The prime field GF(p).
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, &[0, 1])
    }

    /// A built-in field of order `q`.
    pub fn builtin(q: u64) -> Result<Self> {
        if is_prime(q) {
            return Self::prime(q);
        }
        let (p, m) = builtin_modulus(q)
            .ok_or_else(|| Error::InvalidInput(format!("no built-in irreducible for q = {q}")))?;
        Self::new(p, &m)
    }

    /// GF(p^k) with `k = modulus.len() - 1`; `modulus` is monic, lowest degree first.
    pub fn new(p: u64, modulus: &[u64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let k = modulus.len().saturating_sub(1) as u32;
        if k == 0 || modulus[k as usize] % p != 1 {
            return Err(Error::InvalidInput("modulus must be monic of positive degree".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidInput(format!("field order {p}^{k} too large")))?;
        if !is_irreducible(modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        let mut field = GaloisField {
            p,
            k,
            q,
            modulus: modulus.iter().map(|c| c % p).collect(),
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    fn digits(&self, a: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut x = a;
        for _ in 0..self.k {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    fn from_digits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.k as usize];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k as usize, 0);
        self.from_digits(&r)
    }

    fn build_tables(&mut self) {
        let order = self.q - 1;
        for g in 1..self.q {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = 1u64;
            for _ in 0..order {
                exp.push(x as u32);
                x = self.mul_slow(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() as u64 == order {
                let mut log = vec![u32::MAX; self.q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                break;
            }
        }
        assert_eq!(self.exp.len() as u64, order, "multiplicative group must be cyclic");
        let mut trace = vec![0u32; self.q as usize];
        for a in 1..self.q {
            let mut acc = 0u64;
            let mut x = a;
            for _ in 0..self.k {
                acc = self.add(acc, x);
                x = self.pow(x, self.p);
            }
            assert!(acc < self.p, "trace must land in the prime field");
            trace[a as usize] = acc as u32;
        }
        self.trace = trace;
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Embeds an integer through the prime field.
    pub fn from_int(&self, c: i128) -> u64 {
        c.rem_euclid(self.p as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.k {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let l = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q - 1);
        self.exp[l as usize] as u64
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if self.log.is_empty() {
            let mut acc = 1;
            for _ in 0..e {
                acc = self.mul_slow(acc, a);
            }
            return acc;
        }
        let l = (self.log[a as usize] as u128 * e as u128) % (self.q - 1) as u128;
        self.exp[l as usize] as u64
    }

    /// Absolute trace to GF(p), as an integer in `0..p`.
    pub fn trace(&self, a: u64) -> u64 {
        self.trace[a as usize] as u64
    }

    /// Nonzero elements, in index order.
    pub fn units(&self) -> impl Iterator<Item = u64> {
        1..self.q
    }
}
