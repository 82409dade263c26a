//! Exponential sums by exact value histograms.
//!
//! Every sum here has the shape `norm * sum_x exp(2 pi i u g(x) / M)` with
//! `M = p^l`. The kernels only count how often each residue occurs; the
//! complex value is produced once at the end, with an explicit bound on the
//! floating-point error. Equality and vanishing are decided exactly on the
//! histogram using the relation `sum_j zeta^(r + j p^(l-1)) = 0`.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, is_prime};
use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::poly::Polynomial;

/// Default cap on the number of evaluation points per sum.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;
/// Environment variable that overrides [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "IGUSA_LAB_BUDGET";
/// Largest modulus with a dense histogram.
pub const MAX_DENSE_MODULUS: u64 = 1 << 24;

/// Histograms with more buckets than this are elided from serialized reports.
pub const SERIAL_HISTOGRAM_LIMIT: usize = 4096;

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// Reads the override from the environment, falling back to the default.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().replace('_', "").parse::<f64>().ok())
            .filter(|v| *v >= 1.0)
            .map(|v| Budget(v as u128))
            .unwrap_or_default()
    }

    pub fn check(self, points: Option<u128>) -> Result<u128> {
        match points {
            Some(pts) if pts <= self.0 => Ok(pts),
            Some(pts) => Err(Error::BudgetExceeded { points: pts, budget: self.0 }),
            None => Err(Error::BudgetExceeded { points: u128::MAX, budget: self.0 }),
        }
    }
}

/// A unit `u` coprime to `p`; the character is `a -> exp(2 pi i u a / p^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnitTwist(u64);

impl UnitTwist {
    pub const ONE: UnitTwist = UnitTwist(1);

    pub fn new(u: u64, p: u64) -> Result<Self> {
        if gcd(u % p, p) != 1 {
            return Err(Error::InvalidInput(format!("twist {u} is not a unit mod {p}")));
        }
        Ok(UnitTwist(u))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// Counts of residues mod `prime^level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueHistogram {
    pub prime: u64,
    pub level: u32,
    #[serde(serialize_with = "ser_counts")]
    pub counts: Vec<u64>,
}

fn ser_counts<S: serde::Serializer>(counts: &[u64], s: S) -> std::result::Result<S::Ok, S::Error> {
    if counts.len() <= SERIAL_HISTOGRAM_LIMIT {
        s.collect_seq(counts)
    } else {
        s.serialize_none()
    }
}

impl ValueHistogram {
    pub fn modulus(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Histogram of `u * value`.
    pub fn twisted(&self, u: u64) -> ValueHistogram {
        let m = self.modulus();
        let u = u % m;
        let mut counts = vec![0u64; m as usize];
        for (a, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                counts[(a as u64 * u % m) as usize] += c;
            }
        }
        ValueHistogram { prime: self.prime, level: self.level, counts }
    }

    /// The same values viewed mod `prime^level` for a larger level.
    pub fn lifted(&self, level: u32) -> ValueHistogram {
        assert!(level >= self.level);
        let step = self.prime.pow(level - self.level);
        let m = self.prime.pow(level);
        let mut counts = vec![0u64; m as usize];
        for (a, &c) in self.counts.iter().enumerate() {
            counts[a * step as usize] += c;
        }
        ValueHistogram { prime: self.prime, level, counts }
    }

    /// Coordinates of `sum_a c_a zeta^a` in the basis `zeta^(r + j P)`,
    /// `r < P = p^(level-1)`, `j < p - 1`; entries with `j = p - 1` are
    /// eliminated. Two histograms give the same sum iff these agree.
    pub fn reduced(&self) -> Vec<i128> {
        let m = self.counts.len();
        if self.level == 0 {
            return vec![self.counts[0] as i128];
        }
        let big_p = m / self.prime as usize;
        let mut out: Vec<i128> = self.counts.iter().map(|&c| c as i128).collect();
        for r in 0..big_p {
            let top = out[r + (self.prime as usize - 1) * big_p];
            for j in 0..self.prime as usize {
                out[r + j * big_p] -= top;
            }
        }
        out
    }

    /// Exact test for `sum_a c_a zeta^a == 0`.
    pub fn sums_to_zero(&self) -> bool {
        self.reduced().iter().all(|&x| x == 0)
    }

    /// The sum as an exact rational, if it is one.
    pub fn rational_value(&self) -> Option<BigInt> {
        let red = self.reduced();
        if red.iter().skip(1).all(|&x| x == 0) {
            Some(BigInt::from(red[0]))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumKind {
    /// Full box `(Z/p^m)^n`.
    Global,
    /// Multiples of `p` in `(Z/p^m)^n`.
    Local,
    /// Torus `(F_q^*)^n`, normalized by `(q-1)^-n`.
    Torus,
    /// Affine space `F_q^n`, normalized by `q^-n`.
    Affine,
    /// `(F_p[t]/t^m)^n`, character read off the `t^(m-1)` coefficient.
    Laurent,
    /// Units `((Z/p^L)^*)^n`, normalized by `p^(-Ln)`.
    Units,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpSumValue {
    pub kind: SumKind,
    /// Field order for torus and affine sums, `p^m` otherwise.
    pub order: u64,
    pub twist: u64,
    pub histogram: ValueHistogram,
    #[serde(serialize_with = "crate::arith::ser_rational")]
    pub normalization: BigRational,
    pub re: f64,
    pub im: f64,
    /// Bound on `|computed - exact|` as complex numbers.
    pub abs_error: f64,
}

impl ExpSumValue {
    fn build(
        kind: SumKind,
        order: u64,
        twist: u64,
        histogram: ValueHistogram,
        normalization: BigRational,
    ) -> Self {
        let (re, im, abs_error) = evaluate(&histogram, &normalization);
        ExpSumValue { kind, order, twist, histogram, normalization, re, im, abs_error }
    }

    /// `(|value|, error bound)`.
    pub fn magnitude(&self) -> (f64, f64) {
        if self.im == 0.0 {
            return (self.re.abs(), self.abs_error);
        }
        let r = self.re.hypot(self.im);
        (r, self.abs_error + 2.0 * UNIT_ROUNDOFF * r)
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.histogram.sums_to_zero()
    }

    /// The value as an exact rational, if it is one.
    pub fn rational_value(&self) -> Option<BigRational> {
        self.histogram
            .rational_value()
            .map(|v| BigRational::from_integer(v) * &self.normalization)
    }

    /// Exact equality of the normalized values, at histogram level.
    pub fn exactly_equals(&self, other: &ExpSumValue) -> bool {
        if let (Some(a), Some(b)) = (self.rational_value(), other.rational_value()) {
            return a == b;
        }
        // distinct cyclotomic fields meet only in the rationals
        let (ha, hb) = (&self.histogram, &other.histogram);
        let level = ha.level.max(hb.level);
        let prime = if ha.level >= hb.level { ha.prime } else { hb.prime };
        if (ha.level > 0 && ha.prime != prime) || (hb.level > 0 && hb.prime != prime) {
            return false;
        }
        let lift = |h: &ValueHistogram| ValueHistogram { prime, ..h.clone() }.lifted(level).reduced();
        let (a, b) = (lift(ha), lift(hb));
        let lhs = self.normalization.numer() * other.normalization.denom();
        let rhs = other.normalization.numer() * self.normalization.denom();
        a.iter().zip(&b).all(|(&x, &y)| &lhs * BigInt::from(x) == &rhs * BigInt::from(y))
    }

    /// The same sum with the character twisted by a further unit.
    pub fn twisted(&self, u: u64) -> ExpSumValue {
        let m = self.histogram.modulus();
        let twist = if m <= 1 { self.twist } else { (self.twist as u128 * u as u128 % m as u128) as u64 };
        Self::build(self.kind, self.order, twist, self.histogram.twisted(u), self.normalization.clone())
    }

    /// The same histogram under a different normalization.
    pub fn renormalized(&self, normalization: BigRational) -> ExpSumValue {
        Self::build(self.kind, self.order, self.twist, self.histogram.clone(), normalization)
    }

    /// True iff `|value|` is certainly at most `bound`.
    pub fn magnitude_at_most(&self, bound: f64) -> bool {
        let (r, e) = self.magnitude();
        r - e <= bound
    }
}

/// Complex value with a rigorous error bound.
///
/// Per nonzero bucket the angle `2 pi a'/M` (with `a'` reduced to
/// `|a'| <= M/2`) carries relative error at most `3u`, so absolute error at
/// most `10u`; `sin`/`cos` add `2u`, scaling by the count adds `u`.
/// Pairwise summation over the `M` buckets (base blocks of eight) adds
/// `(log2 M + 4) u` times the total mass, and the final scaling by the
/// normalization `3u` more. Both components together give
/// `abs_error = sqrt2 * 1.02 * norm * total * u * (20 + ceil(log2 M))`.
fn evaluate(h: &ValueHistogram, norm: &BigRational) -> (f64, f64, f64) {
    let m = h.modulus();
    let norm_f = crate::arith::to_f64(norm);
    let total = h.total() as f64;
    if let Some(v) = h.rational_value() {
        let exact = BigRational::from_integer(v) * norm;
        let x = crate::arith::to_f64(&exact);
        let err = if BigRational::from_float(x).as_ref() == Some(&exact) { 0.0 } else { UNIT_ROUNDOFF * x.abs() };
        return (x, 0.0, err);
    }
    let step = TAU / m as f64;
    let (re, im) = pairwise(&h.counts, 0, m, step);
    let log2 = 64 - (m - 1).leading_zeros();
    let err = std::f64::consts::SQRT_2 * 1.02 * norm_f * total * UNIT_ROUNDOFF * (20.0 + log2 as f64);
    (re * norm_f, im * norm_f, err)
}

fn pairwise(counts: &[u64], lo: u64, m: u64, step: f64) -> (f64, f64) {
    let len = counts.len();
    if len <= 8 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let a = lo + i as u64;
            let signed = if 2 * a <= m { a as f64 } else { -((m - a) as f64) };
            let (s, co) = (signed * step).sin_cos();
            re += c as f64 * co;
            im += c as f64 * s;
        }
        return (re, im);
    }
    let mid = len / 2;
    let (l, r) = counts.split_at(mid);
    let ((a, b), (c, d)) = if len > 1 << 14 {
        rayon::join(|| pairwise(l, lo, m, step), || pairwise(r, lo + mid as u64, m, step))
    } else {
        (pairwise(l, lo, m, step), pairwise(r, lo + mid as u64, m, step))
    };
    (a + c, b + d)
}

/// Runs `eval(lo, hi, hist)` over disjoint blocks of `0..total` in parallel
/// and adds the partial histograms.
fn par_histogram<F>(total: u128, buckets: usize, eval: F) -> Vec<u64>
where
    F: Fn(u128, u128, &mut [u64]) + Sync,
{
    let threads = rayon::current_num_threads().max(1);
    let mem_cap = ((1usize << 27) / buckets.max(1)).max(1);
    let blocks = (threads * 4).min(mem_cap).min(total.max(1) as usize).max(1) as u128;
    let parts: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut h = vec![0u64; buckets];
            eval(total * b / blocks, total * (b + 1) / blocks, &mut h);
            h
        })
        .collect();
    let mut out = vec![0u64; buckets];
    for part in parts {
        for (o, c) in out.iter_mut().zip(part) {
            *o += c;
        }
    }
    out
}

/// Last-variable Horner form of a polynomial mod `M`.
struct SplitPoly {
    modulus: u64,
    n: usize,
    /// `groups[e]` holds the prefix terms multiplying `x_n^e`.
    groups: Vec<Vec<(Vec<u32>, u64)>>,
    prefix_max: Vec<u32>,
}

impl SplitPoly {
    fn new(f: &Polynomial, modulus: u64) -> Self {
        let n = f.num_vars();
        let mbig = BigInt::from(modulus);
        let mut groups: Vec<Vec<(Vec<u32>, u64)>> = Vec::new();
        let mut prefix_max = vec![0u32; n.saturating_sub(1)];
        for (e, c) in f.terms() {
            let c = num_integer::Integer::mod_floor(c, &mbig);
            let c: u64 = c.try_into().expect("reduced coefficient");
            if c == 0 {
                continue;
            }
            let last = if n == 0 { 0 } else { e.0[n - 1] as usize };
            if groups.len() <= last {
                groups.resize(last + 1, Vec::new());
            }
            let prefix = e.0[..n.saturating_sub(1)].to_vec();
            for (mx, &k) in prefix_max.iter_mut().zip(&prefix) {
                *mx = (*mx).max(k);
            }
            groups[last].push((prefix, c));
        }
        SplitPoly { modulus, n, groups, prefix_max }
    }

    /// Histogram of values over `values^n`, restricted to flat indices `lo..hi`.
    fn fill(&self, values: &[u64], lo: u128, hi: u128, hist: &mut [u64]) {
        let m = self.modulus;
        let len = values.len() as u128;
        if self.n == 0 {
            let c = self.groups.first().and_then(|g| g.first()).map_or(0, |t| t.1);
            hist[c as usize] += (hi - lo) as u64;
            return;
        }
        let k = self.n - 1;
        let mut digits = vec![0usize; k];
        let mut outer = lo / len;
        for d in digits.iter_mut().rev() {
            *d = (outer % len) as usize;
            outer /= len;
        }
        let mut pos = lo;
        let mut powers: Vec<Vec<u64>> = self.prefix_max.iter().map(|&e| vec![0; e as usize + 1]).collect();
        let mut coeffs = vec![0u64; self.groups.len()];
        while pos < hi {
            for (j, row) in powers.iter_mut().enumerate() {
                let base = values[digits[j]] % m;
                let mut acc = 1 % m;
                for slot in row.iter_mut() {
                    *slot = acc;
                    acc = acc * base % m;
                }
            }
            for (slot, group) in coeffs.iter_mut().zip(&self.groups) {
                let mut s = 0u64;
                for (e, c) in group {
                    let mut v = *c;
                    for (j, &ej) in e.iter().enumerate() {
                        if ej > 0 {
                            v = v * powers[j][ej as usize] % m;
                        }
                    }
                    s += v;
                    if s >= m {
                        s -= m;
                    }
                }
                *slot = s;
            }
            let start = (pos % len) as usize;
            let end = ((hi - pos + start as u128).min(len)) as usize;
            for &x in &values[start..end] {
                let x = x % m;
                let mut acc = 0u64;
                for &c in coeffs.iter().rev() {
                    acc = (acc * x + c) % m;
                }
                hist[acc as usize] += 1;
            }
            pos += (end - start) as u128;
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < values.len() {
                    break;
                }
                *d = 0;
            }
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn modulus_for(p: u64, m: u32) -> Result<u64> {
    match crate::arith::checked_pow(p, m) {
        Some(v) if v <= MAX_DENSE_MODULUS as u128 => Ok(v as u64),
        Some(v) => Err(Error::ModulusTooLarge(v)),
        None => Err(Error::ModulusTooLarge(u128::MAX)),
    }
}

fn box_histogram(f: &Polynomial, values: &[u64], modulus: u64, budget: Budget) -> Result<Vec<u64>> {
    let n = f.num_vars() as u32;
    let points = budget.check((values.len() as u128).checked_pow(n))?;
    let split = SplitPoly::new(f, modulus);
    Ok(par_histogram(points, modulus as usize, |lo, hi, h| split.fill(values, lo, hi, h)))
}

fn unit_of(u: UnitTwist, p: u64) -> Result<u64> {
    UnitTwist::new(u.get(), p).map(UnitTwist::get)
}

/// `p^(-mn) sum_{x in (Z/p^m)^n} exp(2 pi i u f(x) / p^m)`.
pub fn s_sum(f: &Polynomial, p: u64, m: u32, u: UnitTwist, budget: Budget) -> Result<ExpSumValue> {
    check_prime(p)?;
    let u = unit_of(u, p)?;
    let modulus = modulus_for(p, m)?;
    let values: Vec<u64> = (0..modulus).collect();
    let counts = box_histogram(f, &values, modulus, budget)?;
    let h = ValueHistogram { prime: p, level: m, counts }.twisted(u);
    let norm = crate::arith::inv_pow(p, m * f.num_vars() as u32);
    Ok(ExpSumValue::build(SumKind::Global, modulus, u % modulus, h, norm))
}

/// `p^(-mn) sum_{x in (pZ/p^m)^n} exp(2 pi i u g(x) / p^m)`.
pub fn t_sum(g: &Polynomial, p: u64, m: u32, u: UnitTwist, budget: Budget) -> Result<ExpSumValue> {
    check_prime(p)?;
    if m == 0 {
        return Err(Error::InvalidInput("local sums need m >= 1".into()));
    }
    let u = unit_of(u, p)?;
    let modulus = modulus_for(p, m)?;
    let values: Vec<u64> = (0..modulus / p).map(|j| p * j).collect();
    let counts = box_histogram(g, &values, modulus, budget)?;
    let h = ValueHistogram { prime: p, level: m, counts }.twisted(u);
    let norm = crate::arith::inv_pow(p, m * g.num_vars() as u32);
    Ok(ExpSumValue::build(SumKind::Local, modulus, u % modulus, h, norm))
}

/// `p^(-Ln) sum_{x in ((Z/p^L)^*)^n} exp(2 pi i u f(x) / p^m)`, the integral
/// of `psi(u f(x) / p^m)` over the unit box whenever `f mod p^m` only depends
/// on `x mod p^L`.
pub fn unit_box_sum(f: &Polynomial, p: u64, level: u32, m: u32, u: UnitTwist, budget: Budget) -> Result<ExpSumValue> {
    check_prime(p)?;
    let u = unit_of(u, p)?;
    let modulus = modulus_for(p, m)?;
    let width = modulus_for(p, level)?;
    let values: Vec<u64> = (0..width).filter(|x| x % p != 0).collect();
    let counts = box_histogram(f, &values, modulus, budget)?;
    let h = ValueHistogram { prime: p, level: m, counts }.twisted(u);
    let norm = crate::arith::inv_pow(p, level * f.num_vars() as u32);
    Ok(ExpSumValue::build(SumKind::Units, modulus, u % modulus, h, norm))
}

/// Torus-normalized `(p-1)^(-n) sum_{x in (F_p^*)^n} psi_p(u h(x))`.
pub fn e_sum(h: &Polynomial, p: u64, u: UnitTwist, budget: Budget) -> Result<ExpSumValue> {
    check_prime(p)?;
    let u = unit_of(u, p)?;
    let modulus = modulus_for(p, 1)?;
    let values: Vec<u64> = (1..p).collect();
    let counts = box_histogram(h, &values, modulus, budget)?;
    let hist = ValueHistogram { prime: p, level: 1, counts }.twisted(u);
    let norm = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p - 1), h.num_vars()));
    Ok(ExpSumValue::build(SumKind::Torus, p, u % p, hist, norm))
}

/// Evaluates `h` at a point of `F_q^n`, given as field element indices.
fn eval_in_field(field: &GaloisField, terms: &[(Vec<u32>, u64)], x: &[u64]) -> u64 {
    let mut acc = 0u64;
    'terms: for (e, c) in terms {
        let mut v = *c;
        for (j, &k) in e.iter().enumerate() {
            if k > 0 {
                if x[j] == 0 {
                    continue 'terms;
                }
                v = field.mul(v, field.pow(x[j], k as u64));
            }
        }
        acc = field.add(acc, v);
    }
    acc
}

fn field_histogram(h: &Polynomial, field: &GaloisField, torus: bool, budget: Budget) -> Result<Vec<u64>> {
    let n = h.num_vars() as u32;
    let q = field.order();
    let width = if torus { q - 1 } else { q } as u128;
    let points = budget.check(width.checked_pow(n))?;
    let terms: Vec<(Vec<u32>, u64)> = h
        .terms()
        .map(|(e, c)| {
            let c = num_integer::Integer::mod_floor(c, &BigInt::from(field.characteristic()));
            (e.0.clone(), u64::try_from(c).expect("reduced"))
        })
        .filter(|(_, c)| *c != 0)
        .collect();
    let p = field.characteristic() as usize;
    let offset = u64::from(torus);
    Ok(par_histogram(points, p, |lo, hi, hist| {
        let mut x = vec![0u64; n as usize];
        for idx in lo..hi {
            let mut rest = idx;
            for xj in x.iter_mut().rev() {
                *xj = (rest % width) as u64 + offset;
                rest /= width;
            }
            hist[field.trace(eval_in_field(field, &terms, &x)) as usize] += 1;
        }
    }))
}

/// Torus-normalized sum over `(F_q^*)^n` with `psi_q = psi_p o Tr`.
pub fn e_sum_ext(h: &Polynomial, field: &GaloisField, u: UnitTwist, budget: Budget) -> Result<ExpSumValue> {
    let p = field.characteristic();
    let u = unit_of(u, p)?;
    let counts = field_histogram(h, field, true, budget)?;
    let hist = ValueHistogram { prime: p, level: 1, counts }.twisted(u);
    let norm = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(field.order() - 1), h.num_vars()));
    Ok(ExpSumValue::build(SumKind::Torus, field.order(), u % p, hist, norm))
}

/// `q^(-n) sum_{x in F_q^n} psi_q(u h(x))`.
pub fn affine_sum_ext(h: &Polynomial, field: &GaloisField, u: UnitTwist, budget: Budget) -> Result<ExpSumValue> {
    let p = field.characteristic();
    let u = unit_of(u, p)?;
    let counts = field_histogram(h, field, false, budget)?;
    let hist = ValueHistogram { prime: p, level: 1, counts }.twisted(u);
    let norm = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(field.order()), h.num_vars()));
    Ok(ExpSumValue::build(SumKind::Affine, field.order(), u % p, hist, norm))
}

/// Product in `F_p[t]/(t^m)`.
fn trunc_mul(a: &[u64], b: &[u64], p: u64, out: &mut [u64]) {
    let m = out.len();
    out.iter_mut().for_each(|o| *o = 0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().take(m - i).enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
}

/// Equal-characteristic model: `p^(-mn) sum_{x in (F_p[t]/t^m)^n} psi_p(u c_{m-1}(f(x)))`
/// where `c_{m-1}` is the coefficient of `t^(m-1)`.
pub fn s_sum_laurent(f: &Polynomial, p: u64, m: u32, u: UnitTwist, budget: Budget) -> Result<ExpSumValue> {
    check_prime(p)?;
    let u = unit_of(u, p)?;
    let n = f.num_vars();
    if m == 0 {
        let h = ValueHistogram { prime: p, level: 0, counts: vec![1] };
        return Ok(ExpSumValue::build(SumKind::Laurent, 1, 0, h, BigRational::one()));
    }
    let width = crate::arith::checked_pow(p, m).ok_or(Error::ModulusTooLarge(u128::MAX))?;
    let points = budget.check(width.checked_pow(n as u32))?;
    let pb = BigInt::from(p);
    let terms: Vec<(Vec<u32>, u64)> = f
        .terms()
        .map(|(e, c)| (e.0.clone(), u64::try_from(num_integer::Integer::mod_floor(c, &pb)).expect("reduced")))
        .filter(|(_, c)| *c != 0)
        .collect();
    let max_exp = f.max_exponents();
    let ml = m as usize;
    let counts = par_histogram(points, p as usize, |lo, hi, hist| {
        let mut coords = vec![vec![0u64; ml]; n];
        let mut powers: Vec<Vec<Vec<u64>>> = max_exp.iter().map(|&e| vec![vec![0u64; ml]; e as usize + 1]).collect();
        let mut term = vec![0u64; ml];
        let mut scratch = vec![0u64; ml];
        for idx in lo..hi {
            let mut rest = idx;
            for c in coords.iter_mut().rev() {
                let mut x = (rest % width) as u64;
                rest /= width;
                for slot in c.iter_mut() {
                    *slot = x % p;
                    x /= p;
                }
            }
            for (j, table) in powers.iter_mut().enumerate() {
                table[0].iter_mut().for_each(|v| *v = 0);
                table[0][0] = 1 % p;
                for e in 1..table.len() {
                    let (done, todo) = table.split_at_mut(e);
                    trunc_mul(&done[e - 1], &coords[j], p, &mut todo[0]);
                }
            }
            let mut top = 0u64;
            for (e, c) in &terms {
                term.iter_mut().for_each(|v| *v = 0);
                term[0] = *c;
                for (j, &k) in e.iter().enumerate() {
                    if k > 0 {
                        trunc_mul(&term, &powers[j][k as usize], p, &mut scratch);
                        std::mem::swap(&mut term, &mut scratch);
                    }
                }
                top = (top + term[ml - 1]) % p;
            }
            hist[top as usize] += 1;
        }
    });
    let hist = ValueHistogram { prime: p, level: 1, counts }.twisted(u);
    let norm = crate::arith::inv_pow(p, m * n as u32);
    Ok(ExpSumValue::build(SumKind::Laurent, width as u64, u % p, hist, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n).unwrap()
    }

    fn b() -> Budget {
        Budget::default()
    }

    /// Direct complex sum, the oracle for the histogram kernels.
    fn naive(f: &Polynomial, values: &[u64], modulus: u64, u: u64) -> (f64, f64, u128) {
        let n = f.num_vars();
        let mut re = 0.0;
        let mut im = 0.0;
        let mut count = 0u128;
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<BigInt> = idx.iter().map(|&i| BigInt::from(values[i])).collect();
            let v = f.evaluate(&x) * BigInt::from(u);
            let a = num_integer::Integer::mod_floor(&v, &BigInt::from(modulus));
            let a: u64 = a.try_into().unwrap();
            let th = TAU * a as f64 / modulus as f64;
            re += th.cos();
            im += th.sin();
            count += 1;
            let mut j = n;
            loop {
                if j == 0 {
                    return (re, im, count);
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < values.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    #[test]
    fn gauss_magnitudes() {
        let f = poly("x1^2", 1);
        let s = s_sum(&f, 5, 1, UnitTwist::ONE, b()).unwrap();
        let (r, e) = s.magnitude();
        assert!((r - 5f64.powf(-0.5)).abs() <= e + 1e-15);
        assert!(e < 1e-12);
        assert!((r - 0.447_213_595_499_958).abs() < 1e-12);
        let s = s_sum(&f, 7, 2, UnitTwist::ONE, b()).unwrap();
        assert!((s.magnitude().0 - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(s.histogram.total(), 49);
    }

    #[test]
    fn empty_character() {
        let f = poly("x1^3 + 2*x1*x2", 2);
        let s = s_sum(&f, 5, 0, UnitTwist::ONE, b()).unwrap();
        assert_eq!(s.rational_value(), Some(BigRational::one()));
        assert_eq!(s.magnitude(), (1.0, 0.0));
        let l = s_sum_laurent(&f, 5, 0, UnitTwist::ONE, b()).unwrap();
        assert_eq!(l.rational_value(), Some(BigRational::one()));
    }

    #[test]
    fn local_examples() {
        let g = poly("x1^2 + x2^3", 2);
        let t = t_sum(&g, 5, 1, UnitTwist::ONE, b()).unwrap();
        assert_eq!(t.rational_value(), Some(BigRational::new(1.into(), 25.into())));
        let t = t_sum(&poly("x1^2", 1), 5, 2, UnitTwist::ONE, b()).unwrap();
        assert_eq!(t.rational_value(), Some(BigRational::new(1.into(), 5.into())));
        let t = t_sum(&poly("x1", 1), 5, 2, UnitTwist::ONE, b()).unwrap();
        assert!(t.is_exactly_zero());
        assert_eq!(t.magnitude(), (0.0, 0.0));
        assert_eq!(t.histogram.total(), 5);
    }

    #[test]
    fn torus_examples() {
        for p in [3u64, 5, 7, 11, 13] {
            let e = e_sum(&poly("x1", 1), p, UnitTwist::ONE, b()).unwrap();
            assert_eq!(e.rational_value(), Some(BigRational::new((-1).into(), BigInt::from(p - 1))));
        }
        let h = poly("x1^2", 1);
        let e = e_sum(&h, 5, UnitTwist::ONE, b()).unwrap();
        let (re, im, _) = naive(&h, &[1, 2, 3, 4], 5, 1);
        assert!((e.re - re / 4.0).abs() < 1e-14 && (e.im - im / 4.0).abs() < 1e-14);
        let h = poly("x1^2 + x2^3", 2);
        let e = e_sum(&h, 7, UnitTwist::new(3, 7).unwrap(), b()).unwrap();
        assert_eq!(e.histogram.total(), 36);
        let (re, im, _) = naive(&h, &[1, 2, 3, 4, 5, 6], 7, 3);
        assert!((e.re - re / 36.0).abs() < 1e-14 && (e.im - im / 36.0).abs() < 1e-14);
    }

    #[test]
    fn extension_examples() {
        let f4 = GaloisField::builtin(4).unwrap();
        let e = e_sum_ext(&poly("x1", 1), &f4, UnitTwist::ONE, b()).unwrap();
        assert_eq!(e.rational_value(), Some(BigRational::new((-1).into(), 3.into())));
        // x1*x2 over F_4: for each unit x1 the inner sum over units is -1
        let e = e_sum_ext(&poly("x1*x2", 2), &f4, UnitTwist::ONE, b()).unwrap();
        assert_eq!(e.rational_value(), Some(BigRational::new((-3).into(), 9.into())));
        let f9 = GaloisField::builtin(9).unwrap();
        let a = affine_sum_ext(&poly("x1^2", 1), &f9, UnitTwist::ONE, b()).unwrap();
        assert!((a.magnitude().0 - 1.0 / 3.0).abs() < 1e-12);
        let e = e_sum_ext(&poly("x1^2", 1), &f9, UnitTwist::ONE, b()).unwrap();
        assert_eq!(e.histogram.total(), 8);
    }

    #[test]
    fn prime_field_extension_agrees() {
        let h = poly("x1^3 + 2*x1*x2 - x2^2", 2);
        for p in [3u64, 5, 7] {
            let f = GaloisField::prime(p).unwrap();
            for u in 1..p {
                let tw = UnitTwist::new(u, p).unwrap();
                let a = e_sum(&h, p, tw, b()).unwrap();
                let c = e_sum_ext(&h, &f, tw, b()).unwrap();
                assert_eq!(a.histogram, c.histogram);
                let s = s_sum(&h, p, 1, tw, b()).unwrap();
                let t = affine_sum_ext(&h, &f, tw, b()).unwrap();
                assert!(s.exactly_equals(&t));
            }
        }
    }

    #[test]
    fn laurent_examples() {
        let l = s_sum_laurent(&poly("x1^2", 1), 5, 1, UnitTwist::ONE, b()).unwrap();
        assert!((l.magnitude().0 - 5f64.powf(-0.5)).abs() < 1e-12);
        let l = s_sum_laurent(&poly("x1", 1), 3, 2, UnitTwist::ONE, b()).unwrap();
        assert!(l.is_exactly_zero());
        // x^2 over F_5[t]/t^2: coefficient of t is 2 x0 x1, a full sum unless x0 = 0
        let l = s_sum_laurent(&poly("x1^2", 1), 5, 2, UnitTwist::ONE, b()).unwrap();
        assert_eq!(l.rational_value(), Some(BigRational::new(1.into(), 5.into())));
    }

    #[test]
    fn budget_and_errors() {
        let f = poly("x1 + x2 + x3", 3);
        let err = s_sum(&f, 101, 2, UnitTwist::ONE, Budget(1000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert_eq!(s_sum(&f, 4, 1, UnitTwist::ONE, b()).unwrap_err(), Error::NotPrime(4));
        assert!(UnitTwist::new(10, 5).is_err());
    }

    #[test]
    fn exact_zero_criterion() {
        let h = ValueHistogram { prime: 3, level: 2, counts: vec![2, 1, 0, 2, 1, 0, 2, 1, 0] };
        assert!(h.sums_to_zero());
        let h = ValueHistogram { prime: 3, level: 2, counts: vec![1, 1, 1, 1, 1, 1, 1, 1, 0] };
        assert!(!h.sums_to_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn histogram_kernels_match_naive(
            c in proptest::collection::vec(-4i64..5, 4),
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
            m in 1u32..3,
            u in 1u64..50,
        ) {
            prop_assume!(u % p != 0);
            let f = Polynomial::from_int_terms(2, &[(&[2, 0], c[0]), (&[1, 1], c[1]), (&[0, 3], c[2]), (&[1, 0], c[3])]);
            let tw = UnitTwist::new(u, p).unwrap();
            let s = s_sum(&f, p, m, tw, b()).unwrap();
            let modulus = p.pow(m);
            let values: Vec<u64> = (0..modulus).collect();
            let (re, im, count) = naive(&f, &values, modulus, u);
            prop_assert_eq!(s.histogram.total(), count);
            let norm = (modulus * modulus) as f64;
            prop_assert!((s.re - re / norm).abs() <= s.abs_error + 1e-12);
            prop_assert!((s.im - im / norm).abs() <= s.abs_error + 1e-12);
            let (r, e) = s.magnitude();
            prop_assert!(r <= 1.0 + e);

            // twist by remap equals twist by scaling the polynomial
            let scaled = f.scale(&BigInt::from(u));
            let direct = s_sum(&scaled, p, m, UnitTwist::ONE, b()).unwrap();
            prop_assert_eq!(&direct.histogram, &s.histogram);

            let t = t_sum(&f, p, m, tw, b()).unwrap();
            prop_assert_eq!(t.histogram.total(), (modulus / p).pow(2) as u128);
            let tv: Vec<u64> = (0..modulus / p).map(|j| j * p).collect();
            let (re, im, _) = naive(&f, &tv, modulus, u);
            prop_assert!((t.re - re / norm).abs() <= t.abs_error + 1e-12);
            prop_assert!((t.im - im / norm).abs() <= t.abs_error + 1e-12);

            let e = e_sum(&f, p, tw, b()).unwrap();
            prop_assert_eq!(e.histogram.total(), ((p - 1) * (p - 1)) as u128);
            prop_assert!(e.magnitude_at_most(1.0));

            let l = s_sum_laurent(&f, p, 1, tw, b()).unwrap();
            let s1 = s_sum(&f, p, 1, tw, b()).unwrap();
            prop_assert!(l.exactly_equals(&s1));
        }

        #[test]
        fn partition_independent(c in proptest::collection::vec(-9i64..10, 3)) {
            let f = Polynomial::from_int_terms(2, &[(&[3, 0], c[0]), (&[1, 2], c[1]), (&[0, 1], c[2])]);
            let split = SplitPoly::new(&f, 49);
            let values: Vec<u64> = (0..49).collect();
            let mut whole = vec![0u64; 49];
            split.fill(&values, 0, 49 * 49, &mut whole);
            let mut parts = vec![0u64; 49];
            for (lo, hi) in [(0u128, 13u128), (13, 400), (400, 1111), (1111, 2401)] {
                split.fill(&values, lo, hi, &mut parts);
            }
            prop_assert_eq!(whole, parts);
        }
    }
}
