//! Exact arithmetic in `Z[√2]`, the ring of integers of `Q(√2)`.
//!
//! Elements are plain integer pairs `a + b√2`; nothing is ever normalised by
//! units behind the caller's back.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{is_prime, isqrt_u64};
use crate::error::{Error, Result};

/// `a + b√2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Zsqrt2Elem {
    pub a: BigInt,
    pub b: BigInt,
}

impl Zsqrt2Elem {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Zsqrt2Elem { a: a.into(), b: b.into() }
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        Zsqrt2Elem { a: a.into(), b: BigInt::zero() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn sqrt2() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Zsqrt2Elem { a: self.a.clone(), b: -&self.b }
    }

    /// `a^2 - 2b^2`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(2) * &self.b * &self.b
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    /// Odd means coprime to `√2`, i.e. `a` odd.
    pub fn is_odd(&self) -> bool {
        self.a.is_odd()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Zsqrt2Elem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign of the image under `√2 ↦ sqrt2_sign · 1.414…`, decided exactly.
    pub fn embedding_sign(&self, sqrt2_sign: i8) -> Ordering {
        let b = if sqrt2_sign >= 0 { self.b.clone() } else { -&self.b };
        let sa = self.a.sign();
        let sb = b.sign();
        use num_bigint::Sign::*;
        match (sa, sb) {
            (NoSign, NoSign) => Ordering::Equal,
            (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
            (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
            _ => {
                // opposite signs: compare a^2 with 2b^2
                let a2 = &self.a * &self.a;
                let b2 = BigInt::from(2) * &b * &b;
                if a2 > b2 {
                    if sa == Plus { Ordering::Greater } else { Ordering::Less }
                } else if sb == Plus {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.embedding_sign(1) == Ordering::Greater && self.embedding_sign(-1) == Ordering::Greater
    }

    /// Euclidean division with `|N(r)| < |N(y)|`, quotient by coordinate rounding.
    pub fn divmod(&self, y: &Zsqrt2Elem) -> Result<(Zsqrt2Elem, Zsqrt2Elem)> {
        if y.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = y.norm();
        let num = self * &y.conjugate();
        let q = Zsqrt2Elem { a: round_div(&num.a, &n), b: round_div(&num.b, &n) };
        let r = self - &(&q * y);
        Ok((q, r))
    }

    /// `self / y` when `y` divides `self` exactly.
    pub fn exact_div(&self, y: &Zsqrt2Elem) -> Option<Zsqrt2Elem> {
        if y.is_zero() {
            return None;
        }
        let n = y.norm();
        let num = self * &y.conjugate();
        if num.a.is_multiple_of(&n) && num.b.is_multiple_of(&n) {
            Some(Zsqrt2Elem { a: num.a / &n, b: num.b / &n })
        } else {
            None
        }
    }

    pub fn divides(&self, x: &Zsqrt2Elem) -> bool {
        x.exact_div(self).is_some()
    }

    /// Square root in `Z[√2]` if one exists.
    pub fn sqrt_exact(&self) -> Option<Zsqrt2Elem> {
        if self.is_zero() {
            return Some(Zsqrt2Elem::zero());
        }
        let n = self.norm();
        if n.is_negative() {
            return None;
        }
        let w = n.sqrt();
        if &w * &w != n {
            return None;
        }
        for w in [w.clone(), -w] {
            let twice = &self.a + &w;
            if twice.is_odd() {
                continue;
            }
            // s^2 + 2t^2 = a, s^2 - 2t^2 = ±w
            let s2: BigInt = twice / 2;
            if s2.is_negative() {
                continue;
            }
            let s = s2.sqrt();
            if &s * &s != s2 {
                continue;
            }
            let cand = if s.is_zero() {
                let t2: BigInt = &self.a / 2;
                if self.a.is_odd() || t2.is_negative() {
                    continue;
                }
                let t = t2.sqrt();
                Zsqrt2Elem { a: BigInt::zero(), b: t }
            } else {
                let two_s = BigInt::from(2) * &s;
                if !self.b.is_multiple_of(&two_s) {
                    continue;
                }
                Zsqrt2Elem { a: s, b: &self.b / two_s }
            };
            if &(&cand * &cand) == self {
                return Some(cand);
            }
        }
        None
    }

    pub fn is_square(&self) -> bool {
        self.sqrt_exact().is_some()
    }
}

/// Nearest integer to `n / d` (halves rounded up).
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (n, d) = if d.is_negative() { (-n, -d) } else { (n.clone(), d.clone()) };
    (BigInt::from(2) * n + &d).div_floor(&(BigInt::from(2) * d))
}

/// Greatest common divisor up to units.
pub fn gcd(x: &Zsqrt2Elem, y: &Zsqrt2Elem) -> Zsqrt2Elem {
    let mut a = x.clone();
    let mut b = y.clone();
    while !b.is_zero() {
        let (_, r) = a.divmod(&b).expect("nonzero divisor");
        a = b;
        b = r;
    }
    a
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a Zsqrt2Elem> for &'a Zsqrt2Elem {
            type Output = Zsqrt2Elem;
            fn $method(self, rhs: &'a Zsqrt2Elem) -> Zsqrt2Elem {
                let f: fn(&Zsqrt2Elem, &Zsqrt2Elem) -> Zsqrt2Elem = $body;
                f(self, rhs)
            }
        }
        impl $tr<Zsqrt2Elem> for Zsqrt2Elem {
            type Output = Zsqrt2Elem;
            fn $method(self, rhs: Zsqrt2Elem) -> Zsqrt2Elem {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| Zsqrt2Elem { a: &x.a + &y.a, b: &x.b + &y.b });
forward_binop!(Sub, sub, |x, y| Zsqrt2Elem { a: &x.a - &y.a, b: &x.b - &y.b });
forward_binop!(Mul, mul, |x, y| Zsqrt2Elem {
    a: &x.a * &y.a + BigInt::from(2) * &x.b * &y.b,
    b: &x.a * &y.b + &x.b * &y.a,
});

impl Neg for &Zsqrt2Elem {
    type Output = Zsqrt2Elem;
    fn neg(self) -> Zsqrt2Elem {
        Zsqrt2Elem { a: -&self.a, b: -&self.b }
    }
}

impl Neg for Zsqrt2Elem {
    type Output = Zsqrt2Elem;
    fn neg(self) -> Zsqrt2Elem {
        -&self
    }
}

impl fmt::Display for Zsqrt2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeff = |b: &BigInt| -> String {
            if b.is_one() {
                "√2".to_string()
            } else {
                format!("{b}√2")
            }
        };
        match (self.a.is_zero(), self.b.sign()) {
            (_, num_bigint::Sign::NoSign) => write!(f, "{}", self.a),
            (true, num_bigint::Sign::Plus) => write!(f, "{}", coeff(&self.b)),
            (true, num_bigint::Sign::Minus) => write!(f, "-{}", coeff(&-&self.b)),
            (false, num_bigint::Sign::Plus) => write!(f, "{}+{}", self.a, coeff(&self.b)),
            (false, num_bigint::Sign::Minus) => write!(f, "{}-{}", self.a, coeff(&-&self.b)),
        }
    }
}

impl FromStr for Zsqrt2Elem {
    type Err = Error;

    /// Accepts `a,b` as well as the display form `a+b√2` (also `s2` or `r2` for `√2`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse Z[√2] element {s:?}"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once(',') {
            let a = a.trim().parse::<BigInt>().map_err(|_| bad())?;
            let b = b.trim().parse::<BigInt>().map_err(|_| bad())?;
            return Ok(Zsqrt2Elem::new(a, b));
        }
        let norm = s.replace("√2", "r").replace("s2", "r").replace("r2", "r").replace(' ', "");
        if !norm.contains('r') {
            return norm.parse::<BigInt>().map(Zsqrt2Elem::from_int).map_err(|_| bad());
        }
        let body = norm.strip_suffix('r').ok_or_else(bad)?;
        // split at the last sign that is not the leading character
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (a_str, b_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let a = a_str.parse::<BigInt>().map_err(|_| bad())?;
        let b = match b_str {
            "" | "+" => BigInt::one(),
            "-" => -BigInt::one(),
            other => other.parse::<BigInt>().map_err(|_| bad())?,
        };
        Ok(Zsqrt2Elem::new(a, b))
    }
}

impl Serialize for Zsqrt2Elem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Zsqrt2Elem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How a rational prime decomposes in `Z[√2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingType {
    pub kind: SplitKind,
    /// Primes above `p`; empty when `p` is inert.
    pub factors: Vec<Zsqrt2Elem>,
}

/// The fundamental unit `1 + √2`.
pub fn fundamental_unit_q1() -> Zsqrt2Elem {
    Zsqrt2Elem::new(1, 1)
}

/// Splitting of the rational prime `p` in `Z[√2]`.
///
/// Split factors are the two conjugate totally positive generators of norm `p`.
pub fn factor_rational_prime(p: u64) -> Result<SplittingType> {
    if !is_prime(p as u128) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if p == 2 {
        return Ok(SplittingType { kind: SplitKind::Ramified, factors: vec![Zsqrt2Elem::sqrt2()] });
    }
    match p % 8 {
        3 | 5 => Ok(SplittingType { kind: SplitKind::Inert, factors: vec![] }),
        _ => {
            let bound = isqrt_u64(p);
            for b in 0..=bound {
                let a2 = p as u128 + 2 * (b as u128) * (b as u128);
                let a = isqrt_u64(a2 as u64);
                if (a as u128) * (a as u128) == a2 {
                    let pi = totally_positive_associate(&Zsqrt2Elem::new(a, b))?;
                    let pi_bar = totally_positive_associate(&pi.conjugate())?;
                    return Ok(SplittingType { kind: SplitKind::Split, factors: vec![pi, pi_bar] });
                }
            }
            Err(Error::Internal(format!("no solution of a^2 - 2b^2 = {p} with b <= sqrt(p)")))
        }
    }
}

/// The totally positive associate of `x` with the smallest rational part.
///
/// Ties (`2+√2` versus `2-√2`) go to the element with positive `b`.
pub fn totally_positive_associate(x: &Zsqrt2Elem) -> Result<Zsqrt2Elem> {
    if x.norm() <= BigInt::zero() {
        return Err(Error::NoTotallyPositiveAssociate(x.to_string()));
    }
    let mut cur = if x.embedding_sign(1) == Ordering::Less { -x } else { x.clone() };
    // (1+√2)^2 and its inverse: the totally positive units up to powers
    let up = Zsqrt2Elem::new(3, 2);
    let down = Zsqrt2Elem::new(3, -2);
    let key = |e: &Zsqrt2Elem| (e.a.clone(), -e.b.clone());
    loop {
        let u = &cur * &up;
        let d = &cur * &down;
        if key(&u) < key(&cur) {
            cur = u;
        } else if key(&d) < key(&cur) {
            cur = d;
        } else {
            return Ok(cur);
        }
    }
}

/// Class of an element modulo `4√2`, i.e. `(a mod 8, b mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClass4Sqrt2 {
    pub a_mod8: u8,
    pub b_mod4: u8,
}

impl ResidueClass4Sqrt2 {
    /// Reduction further down to the class modulo `4`: `(a mod 4, b mod 4)`.
    pub fn mod4(self) -> (u8, u8) {
        (self.a_mod8 % 4, self.b_mod4)
    }

    /// Which of `±3, ±(1+2√2)` this class is, if any.
    pub fn named(self) -> Option<&'static str> {
        match (self.a_mod8, self.b_mod4) {
            (3, 0) => Some("3"),
            (5, 0) => Some("-3"),
            (1, 2) => Some("1+2√2"),
            (7, 2) => Some("-(1+2√2)"),
            _ => None,
        }
    }
}

impl fmt::Display for ResidueClass4Sqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} mod 8, {} mod 4)", self.a_mod8, self.b_mod4)
    }
}

pub fn residue_class_mod_4sqrt2(x: &Zsqrt2Elem) -> ResidueClass4Sqrt2 {
    let a = x.a.mod_floor(&BigInt::from(8)).to_u8().unwrap();
    let b = x.b.mod_floor(&BigInt::from(4)).to_u8().unwrap();
    ResidueClass4Sqrt2 { a_mod8: a, b_mod4: b }
}

/// Behaviour of the dyadic prime `⟨√2⟩` in `Q(√2)(√α)/Q(√2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sqrt2Behavior {
    Ramified,
    Inert,
    Split,
}

/// Decides ramified/inert/split for `⟨√2⟩` in `Q(√2, √α)` from the class of
/// `α` modulo 4 and modulo `4√2`.
pub fn classify_sqrt2_behavior(alpha: &Zsqrt2Elem) -> Result<Sqrt2Behavior> {
    if !alpha.is_odd() {
        return Err(Error::EvenElement(alpha.to_string()));
    }
    if alpha.is_square() {
        return Err(Error::SquareElement(alpha.to_string()));
    }
    let class = residue_class_mod_4sqrt2(alpha);
    let unramified = matches!(class.mod4(), (1, 0) | (3, 2));
    let split = matches!((class.a_mod8, class.b_mod4), (1, 0) | (3, 2));
    Ok(if split {
        Sqrt2Behavior::Split
    } else if unramified {
        Sqrt2Behavior::Inert
    } else {
        Sqrt2Behavior::Ramified
    })
}
