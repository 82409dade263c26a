//! Small integer helpers.

use num_bigint::BigInt;
use num_rational::BigRational;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `lo..=hi`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| is_prime(p)).collect()
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `p^m` if it fits in `u128`.
pub fn checked_pow(p: u64, m: u32) -> Option<u128> {
    (p as u128).checked_pow(m)
}

/// Exact rational `1 / p^e`.
pub fn inv_pow(p: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::from(1), num_traits::pow(BigInt::from(p), e as usize))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Deterministic twist set: every unit for `p <= 31`, otherwise eight spread-out units.
pub fn twist_set(p: u64) -> Vec<u64> {
    if p <= 31 {
        (1..p).collect()
    } else {
        let mut out: Vec<u64> = (0..8).map(|i| 1 + i * (p - 1) / 8).collect();
        out.dedup();
        out
    }
}

/// Serializes a rational as `"num/den"`.
pub fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

pub fn ser_rationals<S: serde::Serializer>(rs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(rational_string))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!(primes_in(1, 30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(1));
        assert!(!is_prime(91));
        assert!(is_prime(97));
    }

    #[test]
    fn modular_power() {
        assert_eq!(pow_mod(3, 4, 7), 4);
        assert_eq!(pow_mod(2, 0, 1), 0);
        assert_eq!(pow_mod(10, 18, 1_000_000_007), 49);
    }

    #[test]
    fn twists() {
        assert_eq!(twist_set(5), vec![1, 2, 3, 4]);
        let t = twist_set(61);
        assert_eq!(t.len(), 8);
        assert!(t.iter().all(|&u| u >= 1 && u < 61));
    }
}
