use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::isqrt_u64;
use crate::error::{Error, Result};

/// `a x^2 + b xy + c y^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryQuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl BinaryQuadForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        BinaryQuadForm { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == BigInt::from(1)
    }

    pub(crate) fn to_small(&self) -> Result<Form> {
        let conv = |x: &BigInt| x.to_i128().ok_or_else(|| Error::DiscriminantBound {
            disc: self.discriminant().to_string(),
            bound: super::HARD_DISC_LIMIT.to_string(),
        });
        Ok(Form { a: conv(&self.a)?, b: conv(&self.b)?, c: conv(&self.c)? })
    }
}

impl fmt::Display for BinaryQuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Machine-word form used internally; discriminants stay below the hard limit
/// so products of two reduced coefficients fit comfortably.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Form {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Form {
    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn to_big(self) -> BinaryQuadForm {
        BinaryQuadForm::new(self.a, self.b, self.c)
    }

    /// `0 < b < √D` and `√D - b < 2|a| < √D + b`, with `s = ⌊√D⌋`.
    pub fn is_reduced(&self, s: i128) -> bool {
        let a2 = 2 * self.a.abs();
        self.b > 0 && self.b <= s && a2 + self.b > s && a2 - self.b <= s
    }

    /// One step of the reduction operator `(a,b,c) ↦ (c, b', (b'^2-D)/4c)`.
    pub fn rho(&self, d: i128, s: i128) -> Form {
        let c = self.c;
        let m = 2 * c.abs();
        let target = if c.abs() as u128 * c.abs() as u128 > d as u128 {
            // b' in (-|c|, |c|]
            c.abs()
        } else {
            s
        };
        // largest b' <= target with b' ≡ -b (mod 2|c|)
        let r = (-self.b).mod_floor(&m);
        let b2 = target - (target - r).mod_floor(&m);
        let c2 = (b2 * b2 - d) / (4 * c);
        Form { a: c, b: b2, c: c2 }
    }

}

pub(crate) fn isqrt_i128(d: i128) -> i128 {
    isqrt_u64(d as u64) as i128
}

/// Reduces `f` by iterating the reduction operator.
pub(crate) fn reduce_small(f: Form) -> Form {
    let d = f.disc();
    let s = isqrt_i128(d);
    let mut g = f;
    while !g.is_reduced(s) {
        g = g.rho(d, s);
    }
    g
}

/// A reduced form equivalent to `f`.
pub fn reduce(f: &BinaryQuadForm) -> Result<BinaryQuadForm> {
    if !f.is_primitive() {
        return Err(Error::ImprimitiveForm(f.to_string()));
    }
    let disc = f.discriminant();
    let d = disc.to_u64().filter(|&d| d > 0 && d <= super::HARD_DISC_LIMIT).ok_or_else(|| {
        Error::DiscriminantBound { disc: disc.to_string(), bound: super::HARD_DISC_LIMIT.to_string() }
    })?;
    if crate::arith::is_square_u64(d) {
        return Err(Error::DiscriminantMismatch(format!("{f} has square discriminant {d}")));
    }
    // big coefficients first come down by a rho step in BigInt space
    let mut g = f.clone();
    while g.a.bits() > 60 || g.b.bits() > 60 || g.c.bits() > 60 {
        g = big_rho(&g, d);
    }
    Ok(reduce_small(g.to_small()?).to_big())
}

fn big_rho(f: &BinaryQuadForm, d: u64) -> BinaryQuadForm {
    let d = BigInt::from(d);
    let c_abs = f.c.abs();
    let m = BigInt::from(2) * &c_abs;
    let r = (-&f.b).mod_floor(&m);
    let b2 = &c_abs - (&c_abs - r).mod_floor(&m);
    let c2 = (&b2 * &b2 - &d) / (BigInt::from(4) * &f.c);
    BinaryQuadForm { a: f.c.clone(), b: b2, c: c2 }
}

/// Extended gcd: `(g, x, y)` with `x a + y b = g >= 0`.
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Dirichlet composition of two forms of the same discriminant with `a > 0`;
/// the result is not reduced.
pub(crate) fn compose_small(f1: Form, f2: Form) -> Result<Form> {
    let d = f1.disc();
    if f2.disc() != d {
        return Err(Error::DiscriminantMismatch(format!("{} vs {}", f1.disc(), f2.disc())));
    }
    let beta = (f1.b + f2.b) / 2;
    let (g1, x, y) = xgcd(f1.a, f2.a);
    let (e, z, w) = xgcd(g1, beta);
    let (u, v) = (z * x, z * y);
    let a3 = f1.a * f2.a / (e * e);
    let num = u * f1.a * f2.b + v * f2.a * f1.b + w * ((f1.b * f2.b + d) / 2);
    if num % e != 0 {
        return Err(Error::Internal("composition: non-integral middle coefficient".into()));
    }
    let m = 2 * a3.abs();
    let b3 = (num / e).mod_floor(&m);
    let top = b3 * b3 - d;
    if top % (4 * a3) != 0 {
        return Err(Error::Internal("composition: non-integral last coefficient".into()));
    }
    Ok(Form { a: a3, b: b3, c: top / (4 * a3) })
}

/// Reduced composite of `f1` and `f2`.
pub fn compose(f1: &BinaryQuadForm, f2: &BinaryQuadForm) -> Result<BinaryQuadForm> {
    let g1 = positive_lead(reduce(f1)?.to_small()?);
    let g2 = positive_lead(reduce(f2)?.to_small()?);
    Ok(reduce_small(compose_small(g1, g2)?).to_big())
}

/// An equivalent reduced form with positive first coefficient.
pub(crate) fn positive_lead(f: Form) -> Form {
    let d = f.disc();
    let s = isqrt_i128(d);
    let mut g = reduce_small(f);
    while g.a < 0 {
        g = g.rho(d, s);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        let f = reduce(&BinaryQuadForm::new(1, 2, -1)).unwrap();
        assert_eq!(f.discriminant(), BigInt::from(8));
        assert!(f.to_small().unwrap().is_reduced(2));
        let r = BinaryQuadForm::new(1, 71, (71 * 71 - 5289) / 4);
        let red = reduce(&r).unwrap();
        assert_eq!(red, r, "principal form of 5289 is already reduced");
        assert_eq!(reduce(&red).unwrap(), red);
        assert!(matches!(reduce(&BinaryQuadForm::new(2, 4, -2)), Err(Error::ImprimitiveForm(_))));
    }

    #[test]
    fn rho_preserves_discriminant() {
        let d = 5289;
        let s = isqrt_i128(d);
        let mut f = Form { a: 1, b: 71, c: (71 * 71 - 5289) / 4 };
        for _ in 0..50 {
            f = f.rho(d, s);
            assert_eq!(f.disc(), d);
            assert!(f.is_reduced(s));
        }
    }

    #[test]
    fn big_coefficients_reduce() {
        // (1, 2, -1) moved far away by x -> x + k y
        let k = BigInt::from(10).pow(30);
        let f = BinaryQuadForm::new(1, BigInt::from(2) + BigInt::from(2) * &k, &k * &k + BigInt::from(2) * &k - 1);
        assert_eq!(f.discriminant(), BigInt::from(8));
        let r = reduce(&f).unwrap();
        assert!(r.to_small().unwrap().is_reduced(2));
    }

    #[test]
    fn compose_with_principal_is_identity_class() {
        let d = 5289i128;
        let p = Form { a: 1, b: 71, c: (71 * 71 - d) / 4 };
        let f = Form { a: 3, b: 69, c: (69 * 69 - d) / 12 };
        assert_eq!(f.disc(), d);
        let g = reduce_small(compose_small(p, f).unwrap());
        // same cycle as f
        let s = isqrt_i128(d);
        let start = reduce_small(f);
        let mut cur = start;
        let mut found = cur == g;
        for _ in 0..1000 {
            cur = cur.rho(d, s);
            found |= cur == g;
            if cur == start {
                break;
            }
        }
        assert!(found);
    }
}
