//! Quadratic Hilbert symbols over `Q` and over `Q(√2)`, and global norm tests.
//!
//! Over `Q(√2)` the odd places use the tame symbol in the residue field and the
//! real places use signs. The dyadic place `⟨√2⟩` is never evaluated directly;
//! its value is whatever makes the product over all places equal to `+1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor_big, is_squarefree, legendre, OddPrime, SymbolValue};
use crate::error::{Error, Result};
use crate::zsqrt2::{factor_rational_prime, SplitKind, Zsqrt2Elem};

/// A place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceOfQ {
    Prime(u64),
    Real,
}

/// `p`-adic valuation and the prime-to-`p` part of a nonzero integer.
fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while n.is_multiple_of(&p) {
        n /= &p;
        v += 1;
    }
    (v, n)
}

fn rational_to_integer(x: &BigRational) -> BigInt {
    // x = n/d has the same square class as n*d
    x.numer() * x.denom()
}

/// Classical quadratic Hilbert symbol `(a, b)_v` over `Q`.
pub fn hilbert_symbol_q(a: &BigRational, b: &BigRational, v: PlaceOfQ) -> Result<SymbolValue> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidInput("Hilbert symbol of zero".into()));
    }
    hilbert_symbol_q_int(&rational_to_integer(a), &rational_to_integer(b), v)
}

/// Hilbert symbol `(a, b)_v` for nonzero integers.
pub fn hilbert_symbol_q_int(a: &BigInt, b: &BigInt, v: PlaceOfQ) -> Result<SymbolValue> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidInput("Hilbert symbol of zero".into()));
    }
    match v {
        PlaceOfQ::Real => Ok(SymbolValue::from_bool(!(a.is_negative() && b.is_negative()))),
        PlaceOfQ::Prime(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, w) = split_valuation(b, 2);
            let eps = |x: &BigInt| x.mod_floor(&BigInt::from(4)).to_u8().unwrap() == 3;
            let omega = |x: &BigInt| matches!(x.mod_floor(&BigInt::from(8)).to_u8().unwrap(), 3 | 5);
            let mut odd = eps(&u) && eps(&w);
            odd ^= alpha % 2 == 1 && omega(&w);
            odd ^= beta % 2 == 1 && omega(&u);
            Ok(SymbolValue::from_bool(!odd))
        }
        PlaceOfQ::Prime(p) => {
            let op = OddPrime::new(p)?;
            let (alpha, u) = split_valuation(a, p);
            let (beta, w) = split_valuation(b, p);
            let mut val = SymbolValue::PlusOne;
            if alpha % 2 == 1 && beta % 2 == 1 && p % 4 == 3 {
                val = val * SymbolValue::MinusOne;
            }
            if beta % 2 == 1 {
                val = val * legendre(&u, op);
            }
            if alpha % 2 == 1 {
                val = val * legendre(&w, op);
            }
            Ok(val)
        }
    }
}

/// Whether `a` is a norm from `Q(√b)` everywhere locally, with the failing places.
pub fn hilbert_places_q(a: &BigInt, b: &BigInt) -> Result<Vec<(PlaceOfQ, SymbolValue)>> {
    let mut primes: Vec<u64> = vec![2];
    for n in [a, b] {
        primes.extend(factor_big(n)?.into_iter().map(|(p, _)| p));
    }
    primes.sort_unstable();
    primes.dedup();
    let mut out = vec![];
    for p in primes {
        out.push((PlaceOfQ::Prime(p), hilbert_symbol_q_int(a, b, PlaceOfQ::Prime(p))?));
    }
    out.push((PlaceOfQ::Real, hilbert_symbol_q_int(a, b, PlaceOfQ::Real)?));
    Ok(out)
}

/// A place of `Q(√2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaceOfQ1 {
    /// Generated by `prime_elem`, lying above the odd rational prime `p`.
    OddPrime { p: u64, prime_elem: Zsqrt2Elem },
    Dyadic,
    /// The embedding `√2 ↦ embedding_sign · 1.414…`.
    RealEmbedding { embedding_sign: i8 },
}

impl PlaceOfQ1 {
    /// Odd places above the rational prime `p`.
    pub fn above(p: u64) -> Result<Vec<PlaceOfQ1>> {
        OddPrime::new(p)?;
        let s = factor_rational_prime(p)?;
        Ok(match s.kind {
            SplitKind::Split => s
                .factors
                .into_iter()
                .map(|prime_elem| PlaceOfQ1::OddPrime { p, prime_elem })
                .collect(),
            _ => vec![PlaceOfQ1::OddPrime { p, prime_elem: Zsqrt2Elem::from_int(p) }],
        })
    }

    pub fn real_places() -> [PlaceOfQ1; 2] {
        [PlaceOfQ1::RealEmbedding { embedding_sign: 1 }, PlaceOfQ1::RealEmbedding { embedding_sign: -1 }]
    }
}

impl fmt::Display for PlaceOfQ1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceOfQ1::OddPrime { p, prime_elem } if prime_elem.is_rational() => write!(f, "<{p}>"),
            PlaceOfQ1::OddPrime { p, prime_elem } => write!(f, "<{prime_elem}> above {p}"),
            PlaceOfQ1::Dyadic => write!(f, "<√2>"),
            PlaceOfQ1::RealEmbedding { embedding_sign } if *embedding_sign > 0 => write!(f, "real √2>0"),
            PlaceOfQ1::RealEmbedding { .. } => write!(f, "real √2<0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolEntry {
    pub place: PlaceOfQ1,
    pub value: SymbolValue,
}

/// Local symbols at every place where they can differ from `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolTable {
    pub entries: Vec<SymbolEntry>,
    pub product: SymbolValue,
}

impl SymbolTable {
    pub fn value_at(&self, place: &PlaceOfQ1) -> SymbolValue {
        self.entries
            .iter()
            .find(|e| &e.place == place)
            .map(|e| e.value)
            .unwrap_or(SymbolValue::PlusOne)
    }

    pub fn all_plus(&self) -> bool {
        self.entries.iter().all(|e| e.value.is_one())
    }

    pub fn failing_places(&self) -> Vec<&PlaceOfQ1> {
        self.entries.iter().filter(|e| !e.value.is_one()).map(|e| &e.place).collect()
    }

    pub fn dyadic(&self) -> SymbolValue {
        self.value_at(&PlaceOfQ1::Dyadic)
    }

    /// Compact text such as `-1 at <3>, <43>`.
    pub fn summary(&self) -> String {
        let bad: Vec<String> = self.failing_places().iter().map(|p| p.to_string()).collect();
        if bad.is_empty() {
            "all local symbols +1".to_string()
        } else {
            format!("-1 at {}", bad.join(", "))
        }
    }
}

/// `v_P(x)` and `x / π^v` for an odd place.
fn valuation_q1(x: &Zsqrt2Elem, pi: &Zsqrt2Elem) -> (u32, Zsqrt2Elem) {
    let mut x = x.clone();
    let mut v = 0;
    while let Some(y) = x.exact_div(pi) {
        x = y;
        v += 1;
    }
    (v, x)
}

/// Multiplication in `F_p[t]/(t^2 - 2)`.
fn fp2_mul(x: (BigInt, BigInt), y: &(BigInt, BigInt), p: &BigInt) -> (BigInt, BigInt) {
    let a = (&x.0 * &y.0 + BigInt::from(2) * &x.1 * &y.1).mod_floor(p);
    let b = (&x.0 * &y.1 + &x.1 * &y.0).mod_floor(p);
    (a, b)
}

fn fp2_pow(x: &(BigInt, BigInt), e: &BigInt, p: &BigInt) -> (BigInt, BigInt) {
    let mut acc = (BigInt::one(), BigInt::zero());
    let mut base = x.clone();
    let mut e = e.clone();
    let two = BigInt::from(2);
    while e.is_positive() {
        if e.is_odd() {
            acc = fp2_mul(acc, &base, p);
        }
        base = fp2_mul(base.clone(), &base, p);
        e /= &two;
    }
    acc
}

/// Quadratic character of the residue of `x` (a unit at the place).
fn residue_character(x: &Zsqrt2Elem, place: &PlaceOfQ1) -> Result<SymbolValue> {
    let PlaceOfQ1::OddPrime { p, prime_elem } = place else {
        return Err(Error::InvalidInput(format!("{place} is not an odd place")));
    };
    let op = OddPrime::new(*p)?;
    let pb = BigInt::from(*p);
    if prime_elem.is_rational() {
        // inert: residue field F_p[√2] with 2 a non-residue
        let base = (x.a.mod_floor(&pb), x.b.mod_floor(&pb));
        let e = (&pb * &pb - 1) / 2;
        let r = fp2_pow(&base, &e, &pb);
        if !r.1.is_zero() {
            return Err(Error::Internal(format!("character of {x} at {place} not in F_p")));
        }
        return match r.0.to_u64() {
            Some(1) => Ok(SymbolValue::PlusOne),
            Some(v) if v + 1 == *p => Ok(SymbolValue::MinusOne),
            _ => Err(Error::Internal(format!("{x} is not a unit at {place}"))),
        };
    }
    // split: √2 ↦ s with a + b s ≡ 0 (mod p)
    let binv = prime_elem
        .b
        .mod_floor(&pb)
        .modinv(&pb)
        .ok_or_else(|| Error::Internal(format!("bad prime element {prime_elem}")))?;
    let s = (-&prime_elem.a * binv).mod_floor(&pb);
    let r = (&x.a + &x.b * s).mod_floor(&pb);
    match legendre(&r, op) {
        SymbolValue::Zero => Err(Error::Internal(format!("{x} is not a unit at {place}"))),
        v => Ok(v),
    }
}

/// Tame symbol `(α, β)_P` at an odd place.
pub fn tame_symbol_q1(alpha: &Zsqrt2Elem, beta: &Zsqrt2Elem, place: &PlaceOfQ1) -> Result<SymbolValue> {
    let PlaceOfQ1::OddPrime { prime_elem, .. } = place else {
        return Err(Error::InvalidInput(format!("{place} is not an odd place")));
    };
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::InvalidInput("tame symbol of zero".into()));
    }
    let (u, a1) = valuation_q1(alpha, prime_elem);
    let (w, b1) = valuation_q1(beta, prime_elem);
    let mut val = SymbolValue::PlusOne;
    if u % 2 == 1 && w % 2 == 1 {
        val = val * residue_character(&Zsqrt2Elem::from_int(-1), place)?;
    }
    if w % 2 == 1 {
        val = val * residue_character(&a1, place)?;
    }
    if u % 2 == 1 {
        val = val * residue_character(&b1, place)?;
    }
    Ok(val)
}

/// `-1` exactly when both `α` and `β` are negative under the embedding.
pub fn real_symbol_q1(alpha: &Zsqrt2Elem, beta: &Zsqrt2Elem, embedding_sign: i8) -> SymbolValue {
    let neg = |x: &Zsqrt2Elem| x.embedding_sign(embedding_sign) == std::cmp::Ordering::Less;
    SymbolValue::from_bool(!(neg(alpha) && neg(beta)))
}

/// Odd places where `α` or `β` is not a unit, sorted.
fn odd_places_for(alpha: &Zsqrt2Elem, beta: &Zsqrt2Elem) -> Result<Vec<PlaceOfQ1>> {
    let mut primes: Vec<u64> = vec![];
    for x in [alpha, beta] {
        primes.extend(factor_big(&x.norm())?.into_iter().map(|(p, _)| p).filter(|&p| p != 2));
    }
    primes.sort_unstable();
    primes.dedup();
    let mut out = vec![];
    for p in primes {
        for place in PlaceOfQ1::above(p)? {
            let PlaceOfQ1::OddPrime { prime_elem, .. } = &place else { unreachable!() };
            if prime_elem.divides(alpha) || prime_elem.divides(beta) {
                out.push(place);
            }
        }
    }
    Ok(out)
}

/// All local symbols of `(α, β)`, the dyadic one by the product formula.
pub fn symbol_table(alpha: &Zsqrt2Elem, beta: &Zsqrt2Elem) -> Result<SymbolTable> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::InvalidInput("Hilbert symbol of zero".into()));
    }
    let mut entries = vec![];
    let mut others = SymbolValue::PlusOne;
    for place in odd_places_for(alpha, beta)? {
        let value = tame_symbol_q1(alpha, beta, &place)?;
        others = others * value;
        entries.push(SymbolEntry { place, value });
    }
    for place in PlaceOfQ1::real_places() {
        let PlaceOfQ1::RealEmbedding { embedding_sign } = place else { unreachable!() };
        let value = real_symbol_q1(alpha, beta, embedding_sign);
        others = others * value;
        entries.push(SymbolEntry { place, value });
    }
    // the dyadic value balances the product
    entries.push(SymbolEntry { place: PlaceOfQ1::Dyadic, value: others });
    entries.sort_by(|x, y| x.place.cmp(&y.place));
    let product = entries.iter().fold(SymbolValue::PlusOne, |acc, e| acc * e.value);
    Ok(SymbolTable { entries, product })
}

/// Symbol at `⟨√2⟩`, defined through the product formula.
pub fn dyadic_symbol_q1(alpha: &Zsqrt2Elem, beta: &Zsqrt2Elem) -> Result<SymbolValue> {
    Ok(symbol_table(alpha, beta)?.dyadic())
}

/// Whether `α` is a norm from `Q(√2, √d)` to `Q(√2)`; by the Hasse norm
/// theorem this holds iff every local symbol `(α, d)` is `+1`.
pub fn is_global_norm(alpha: &Zsqrt2Elem, d: i64) -> Result<(bool, SymbolTable)> {
    if !is_squarefree(d)? || d == 1 || d == 2 {
        return Err(Error::InvalidInput(format!("{d} is not a squarefree non-square in Q(√2)")));
    }
    if alpha.is_zero() {
        return Err(Error::InvalidInput("zero is not a norm".into()));
    }
    let table = symbol_table(alpha, &Zsqrt2Elem::from_int(d))?;
    Ok((table.all_plus(), table))
}
