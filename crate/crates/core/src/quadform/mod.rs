//! Real quadratic fields through indefinite binary quadratic forms.
//!
//! Forms of discriminant `D` model narrow ideal classes of `Q(√D)`. The wide
//! class group is the quotient by the class of `⟨√D⟩`, which is nontrivial
//! exactly when the fundamental unit has norm `+1`.

mod classgroup;
mod form;
mod unit;

pub use classgroup::{
    ideal_class_order, narrow_class_group, wide_class_group_2part, ClassGroup, DEFAULT_DISC_BOUND,
    HARD_DISC_LIMIT,
};
pub use form::{compose, reduce, BinaryQuadForm};
pub use unit::{fundamental_unit, FundamentalUnit};

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, is_square_u64};
use crate::error::{Error, Result};

/// A fundamental discriminant `D > 1` of a real quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct QuadDiscriminant(u64);

impl QuadDiscriminant {
    pub fn new(d: u64) -> Result<Self> {
        let bad = || Error::NotFundamental(d.to_string());
        if d < 5 || is_square_u64(d) {
            return Err(bad());
        }
        let squarefree = |m: u64| -> Result<bool> { Ok(factor_u64(m)?.iter().all(|&(_, e)| e == 1)) };
        match d % 4 {
            1 if squarefree(d)? => Ok(QuadDiscriminant(d)),
            0 if matches!((d / 4) % 4, 2 | 3) && squarefree(d / 4)? => Ok(QuadDiscriminant(d)),
            _ => Err(bad()),
        }
    }

    pub fn from_big(d: &BigInt) -> Result<Self> {
        let v = d.to_u64().ok_or_else(|| Error::NotFundamental(d.to_string()))?;
        Self::new(v)
    }

    /// Discriminant of `Q(√m)` for a squarefree `m > 1`.
    pub fn of_field(m: u64) -> Result<Self> {
        if m % 4 == 1 {
            Self::new(m)
        } else {
            Self::new(m.checked_mul(4).ok_or_else(|| Error::NotFundamental(format!("4*{m}")))?)
        }
    }

    pub fn get(&self) -> u64 {
        self.0
    }

    /// The squarefree `m` with `Q(√D) = Q(√m)`.
    pub fn radicand(&self) -> u64 {
        if self.0 % 4 == 0 {
            self.0 / 4
        } else {
            self.0
        }
    }

    /// Primes dividing `D`.
    pub fn ramified_primes(&self) -> Vec<u64> {
        factor_u64(self.0).expect("fundamental discriminants were factored on construction").into_iter().map(|(p, _)| p).collect()
    }

    /// Kronecker symbol `(D/ℓ)` for a prime `ℓ`: 1 split, -1 inert, 0 ramified.
    pub fn kronecker(&self, ell: u64) -> i8 {
        let d = self.0;
        if ell == 2 {
            return match d % 8 {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            };
        }
        if d % ell == 0 {
            return 0;
        }
        let r = crate::arith::pow_mod_u64(d % ell, (ell - 1) / 2, ell);
        if r == 1 {
            1
        } else {
            -1
        }
    }
}

impl TryFrom<u64> for QuadDiscriminant {
    type Error = Error;
    fn try_from(d: u64) -> Result<Self> {
        QuadDiscriminant::new(d)
    }
}

impl From<QuadDiscriminant> for u64 {
    fn from(d: QuadDiscriminant) -> u64 {
        d.0
    }
}

impl fmt::Display for QuadDiscriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_validation() {
        for d in [5, 8, 12, 13, 40, 5289, 42312] {
            assert!(QuadDiscriminant::new(d).is_ok(), "{d}");
        }
        for d in [1, 4, 9, 16, 20, 45, 7, 6, 32, 100] {
            assert!(QuadDiscriminant::new(d).is_err(), "{d}");
        }
        assert_eq!(QuadDiscriminant::of_field(2).unwrap().get(), 8);
        assert_eq!(QuadDiscriminant::of_field(5289).unwrap().get(), 5289);
        assert_eq!(QuadDiscriminant::new(42312).unwrap().radicand(), 10578);
    }

    #[test]
    fn kronecker_examples() {
        let d = QuadDiscriminant::new(5289).unwrap();
        assert_eq!(d.kronecker(2), 1);
        assert_eq!(d.kronecker(3), 0);
        assert_eq!(d.kronecker(13), -1);
        assert_eq!(d.kronecker(5), 1);
        let d8 = QuadDiscriminant::new(8).unwrap();
        assert_eq!(d8.kronecker(7), 1);
        assert_eq!(d8.kronecker(3), -1);
        assert_eq!(d8.kronecker(2), 0);
    }
}
