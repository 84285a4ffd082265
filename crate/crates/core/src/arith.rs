//! Integer primitives: primality, residue symbols and the admissibility
//! condition on prime triples.
//!
//! Residue symbols are computed by modular exponentiation (Euler's
//! criterion) and never through reciprocity, so reciprocity laws remain
//! something the test suite can check rather than something the code assumes.

use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Value of a quadratic residue or Hilbert symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolValue {
    MinusOne,
    Zero,
    PlusOne,
}

impl SymbolValue {
    pub fn as_i8(self) -> i8 {
        match self {
            SymbolValue::MinusOne => -1,
            SymbolValue::Zero => 0,
            SymbolValue::PlusOne => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(SymbolValue::MinusOne),
            0 => Some(SymbolValue::Zero),
            1 => Some(SymbolValue::PlusOne),
            _ => None,
        }
    }

    /// `+1` for `true`, `-1` for `false`.
    pub fn from_bool(square: bool) -> Self {
        if square {
            SymbolValue::PlusOne
        } else {
            SymbolValue::MinusOne
        }
    }

    pub fn is_one(self) -> bool {
        self == SymbolValue::PlusOne
    }
}

impl Mul for SymbolValue {
    type Output = SymbolValue;

    fn mul(self, rhs: SymbolValue) -> SymbolValue {
        SymbolValue::from_i8(self.as_i8() * rhs.as_i8()).unwrap()
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

impl Serialize for SymbolValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for SymbolValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        SymbolValue::from_i8(v)
            .ok_or_else(|| serde::de::Error::custom(format!("symbol value {v} not in {{-1,0,1}}")))
    }
}

/// An odd rational prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct OddPrime(u64);

impl OddPrime {
    pub fn new(value: u64) -> Result<Self> {
        if value % 2 == 1 && is_prime(value as u128) {
            Ok(OddPrime(value))
        } else {
            Err(Error::NotOddPrime(value.to_string()))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for OddPrime {
    type Error = Error;

    fn try_from(v: u64) -> Result<Self> {
        OddPrime::new(v)
    }
}

impl From<OddPrime> for u64 {
    fn from(p: OddPrime) -> u64 {
        p.0
    }
}

impl fmt::Display for OddPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// Bases 2..=41 make Miller-Rabin deterministic below 3.3 * 10^24.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` for word-sized operands.
pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin_u64(n: u64) -> bool {
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in MR_BASES.iter() {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in MR_BASES.iter() {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test.
///
/// Exact for every `n < 3.3 * 10^24`; above that the same witness set is
/// used and the answer is only probabilistic.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in MR_BASES.iter() {
        let p = p as u128;
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 43 * 43 {
        return true;
    }
    if n <= u64::MAX as u128 {
        miller_rabin_u64(n as u64)
    } else {
        miller_rabin_big(&BigUint::from(n))
    }
}

/// Primality for arbitrary-precision input.
pub fn is_prime_big(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    match n.to_u128() {
        Some(v) => is_prime(v),
        None => {
            let u = n.magnitude();
            if u.is_even() {
                return false;
            }
            miller_rabin_big(u)
        }
    }
}

/// All primes `<= limit` by sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Floor square root.
pub fn isqrt_u64(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x > 0 && x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn is_square_u64(n: u64) -> bool {
    let r = isqrt_u64(n);
    r * r == n
}

/// Largest integer whose square does not exceed `n` (`n >= 0`).
pub fn isqrt_big(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// Trial division cutoff: cofactors up to `TRIAL_LIMIT^2` are fully factored.
const TRIAL_LIMIT: u64 = 10_000_000;

/// Factor `n > 0` into ascending `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut d = 5u64;
    let mut step = 2;
    while d.saturating_mul(d) <= n {
        if d > TRIAL_LIMIT {
            if is_prime(n as u128) {
                break;
            }
            return Err(Error::FactorizationBound(n.to_string()));
        }
        push(d, &mut n);
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// Factor the absolute value of a nonzero big integer.
pub fn factor_big(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    let v = n
        .abs()
        .to_u64()
        .ok_or_else(|| Error::FactorizationBound(n.to_string()))?;
    factor_u64(v)
}

/// True when `n` has no repeated prime factor (sign ignored).
pub fn is_squarefree(n: i64) -> Result<bool> {
    if n == 0 {
        return Ok(false);
    }
    Ok(factor_u64(n.unsigned_abs())?.iter().all(|&(_, e)| e == 1))
}

fn residue_to_symbol(r: &BigInt, p: &BigInt) -> SymbolValue {
    if r.is_zero() {
        SymbolValue::Zero
    } else if r.is_one() {
        SymbolValue::PlusOne
    } else {
        debug_assert_eq!(r, &(p - 1));
        SymbolValue::MinusOne
    }
}

/// Legendre symbol `(a/p)` via Euler's criterion.
pub fn legendre(a: &BigInt, p: OddPrime) -> SymbolValue {
    let pb = BigInt::from(p.get());
    let a = a.mod_floor(&pb);
    let e = BigInt::from((p.get() - 1) / 2);
    residue_to_symbol(&a.modpow(&e, &pb), &pb)
}

/// Legendre symbol for a machine-word numerator.
pub fn legendre_i64(a: i64, p: OddPrime) -> SymbolValue {
    let pv = p.get();
    let r = (a as i128).rem_euclid(pv as i128) as u64;
    match pow_mod_u64(r, (pv - 1) / 2, pv) {
        0 => SymbolValue::Zero,
        1 => SymbolValue::PlusOne,
        _ => SymbolValue::MinusOne,
    }
}

/// The quartic symbol `(2/p)_4 = 2^((p-1)/4) mod p`, defined for `p = 1 mod 8`.
pub fn quartic_symbol_of_two(p: OddPrime) -> Result<SymbolValue> {
    let pv = p.get();
    if pv % 8 != 1 {
        return Err(Error::QuarticUndefined(pv));
    }
    match pow_mod_u64(2, (pv - 1) / 4, pv) {
        1 => Ok(SymbolValue::PlusOne),
        x if x == pv - 1 => Ok(SymbolValue::MinusOne),
        x => Err(Error::Internal(format!("2^((p-1)/4) = {x} mod {pv} is not +-1"))),
    }
}

/// Per-clause evaluation of the admissibility condition on `(p, q, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub passes: bool,
    pub p_mod_16: bool,
    pub q_mod_8: bool,
    pub r_mod_8: bool,
    pub legendre_qr_p: bool,
    pub quartic_two_p: bool,
}

impl ConditionReport {
    /// Names of the clauses that fail, in evaluation order.
    pub fn failing_clauses(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.p_mod_16 {
            out.push("p = 9 mod 16");
        }
        if !self.q_mod_8 {
            out.push("q = 3 mod 8");
        }
        if !self.r_mod_8 {
            out.push("r = 3 mod 8");
        }
        if !self.legendre_qr_p {
            out.push("(qr/p) = -1");
        }
        if !self.quartic_two_p {
            out.push("(2/p)_4 = -1");
        }
        out
    }
}

/// Evaluates `p = 9 (16)`, `q = r = 3 (8)`, `(qr/p) = -1` and `(2/p)_4 = -1`.
pub fn check_condition1(p: OddPrime, q: OddPrime, r: OddPrime) -> Result<ConditionReport> {
    if p == q || q == r || p == r {
        return Err(Error::NotDistinct { p: p.get(), q: q.get(), r: r.get() });
    }
    let p_mod_16 = p.get() % 16 == 9;
    let q_mod_8 = q.get() % 8 == 3;
    let r_mod_8 = r.get() % 8 == 3;
    let qr = BigInt::from(q.get()) * BigInt::from(r.get());
    let legendre_qr_p = legendre(&qr, p) == SymbolValue::MinusOne;
    let quartic_two_p = matches!(quartic_symbol_of_two(p), Ok(SymbolValue::MinusOne));
    Ok(ConditionReport {
        passes: p_mod_16 && q_mod_8 && r_mod_8 && legendre_qr_p && quartic_two_p,
        p_mod_16,
        q_mod_8,
        r_mod_8,
        legendre_qr_p,
        quartic_two_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(v: u64) -> OddPrime {
        OddPrime::new(v).unwrap()
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(41));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(!is_prime(5289));
        assert!(is_prime(2));
        // strong pseudoprime to bases 2, 3, 5, 7
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(1_000_000_007));
        assert!(is_prime((1u128 << 89) - 1));
        assert!(!is_prime(((1u128 << 61) - 1) * ((1u128 << 31) - 1)));
    }

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_up_to(20_000);
        let from_mr: Vec<u64> = (0..=20_000u64).filter(|&n| is_prime(n as u128)).collect();
        assert_eq!(sieve, from_mr);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_i64(3, op(41)), SymbolValue::MinusOne);
        assert_eq!(legendre_i64(129, op(41)), SymbolValue::MinusOne);
        assert_eq!(legendre_i64(41, op(41)), SymbolValue::Zero);
        assert_eq!(legendre(&BigInt::from(-129), op(41)), SymbolValue::MinusOne);
    }

    #[test]
    fn quartic_examples() {
        assert_eq!(quartic_symbol_of_two(op(41)).unwrap(), SymbolValue::MinusOne);
        assert_eq!(quartic_symbol_of_two(op(73)).unwrap(), SymbolValue::PlusOne);
        assert_eq!(quartic_symbol_of_two(op(17)).unwrap(), SymbolValue::MinusOne);
        assert_eq!(quartic_symbol_of_two(op(43)), Err(Error::QuarticUndefined(43)));
    }

    #[test]
    fn condition_examples() {
        let rep = check_condition1(op(41), op(3), op(43)).unwrap();
        assert!(rep.passes);

        let rep = check_condition1(op(41), op(3), op(11)).unwrap();
        assert!(!rep.passes);
        assert_eq!(rep.failing_clauses(), vec!["(qr/p) = -1"]);

        let rep = check_condition1(op(17), op(3), op(11)).unwrap();
        assert!(!rep.p_mod_16);
        assert!(!rep.passes);

        assert!(check_condition1(op(41), op(3), op(3)).is_err());
        assert!(OddPrime::new(9).is_err());
        assert!(OddPrime::new(2).is_err());
    }

    #[test]
    fn factoring() {
        assert_eq!(factor_u64(5289).unwrap(), vec![(3, 1), (41, 1), (43, 1)]);
        assert_eq!(factor_u64(1).unwrap(), vec![]);
        assert_eq!(factor_u64(1 << 10).unwrap(), vec![(2, 10)]);
        assert_eq!(factor_u64(1_000_000_007 * 3).unwrap(), vec![(3, 1), (1_000_000_007, 1)]);
        assert!(is_squarefree(-42).unwrap());
        assert!(!is_squarefree(12).unwrap());
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..2000u64 {
            let r = isqrt_u64(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt_u64(u64::MAX), u32::MAX as u64);
    }
}
