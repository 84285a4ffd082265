use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::QuadDiscriminant;
use crate::error::{Error, Result};

/// Fundamental unit `(x + y√D)/2 > 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    pub x: BigInt,
    pub y: BigInt,
    pub unit_norm: i8,
    /// Natural log of the unit, for display and size estimates only.
    pub regulator_estimate: f64,
}

impl FundamentalUnit {
    /// `x^2 - D y^2`, which is `4 · unit_norm`.
    pub fn pell_value(&self, d: &QuadDiscriminant) -> BigInt {
        &self.x * &self.x - BigInt::from(d.get()) * &self.y * &self.y
    }

    /// Coordinates `(u, v)` with unit `= u + v √m`, `m` the radicand, as
    /// numerator/denominator pairs over a common denominator `den`.
    pub fn in_radicand_basis(&self, d: &QuadDiscriminant) -> (BigInt, BigInt, BigInt) {
        if d.get() % 4 == 0 {
            // √D = 2√m
            (&self.x / 2, self.y.clone(), BigInt::one())
        } else {
            (self.x.clone(), self.y.clone(), BigInt::from(2))
        }
    }
}

/// Fundamental unit from the period of the continued fraction of
/// `(b0 + √D)/2`, where `b0` is the largest integer below `√D` with `b0 ≡ D (mod 2)`.
pub fn fundamental_unit(d: &QuadDiscriminant) -> Result<FundamentalUnit> {
    let dv = d.get() as i128;
    let s = crate::arith::isqrt_u64(d.get()) as i128;
    let b0 = if (s - dv) % 2 == 0 { s } else { s - 1 };
    let (p0, q0) = (b0, 2i128);
    let (mut p, mut q) = (p0, q0);
    // q_{i-2}, q_{i-1}
    let mut qm2 = BigInt::one();
    let mut qm1 = BigInt::zero();
    let mut len = 0usize;
    loop {
        let a = (p + s) / q;
        let qi = BigInt::from(a) * &qm1 + &qm2;
        qm2 = std::mem::replace(&mut qm1, qi);
        len += 1;
        let p_next = a * q - p;
        let q_next = (dv - p_next * p_next) / q;
        p = p_next;
        q = q_next;
        if (p, q) == (p0, q0) {
            break;
        }
        if len > 100_000_000 {
            return Err(Error::Internal("continued fraction period not found".into()));
        }
    }
    // ε = q_{l-1} θ + q_{l-2}
    let x = &qm1 * BigInt::from(b0) + BigInt::from(2) * &qm2;
    let y = qm1;
    let unit_norm: i8 = if len % 2 == 0 { 1 } else { -1 };
    let unit = FundamentalUnit { regulator_estimate: log_unit(&x, &y, d.get()), x, y, unit_norm };
    let pell = unit.pell_value(d);
    if pell != BigInt::from(4 * unit_norm as i64) || !unit.x.is_positive() || !unit.y.is_positive() {
        return Err(Error::Internal(format!("Pell identity fails for D = {d}")));
    }
    Ok(unit)
}

fn log_unit(x: &BigInt, y: &BigInt, d: u64) -> f64 {
    // (x + y√D)/2 ≈ x for large units; scale down to f64 range first
    let shift = x.bits().saturating_sub(900);
    let xs: f64 = (x >> shift).to_string().parse().unwrap_or(f64::MAX);
    let ys: f64 = (y >> shift).to_string().parse().unwrap_or(f64::MAX);
    ((xs + ys * (d as f64).sqrt()) / 2.0).ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: u64) -> FundamentalUnit {
        fundamental_unit(&QuadDiscriminant::new(d).unwrap()).unwrap()
    }

    #[test]
    fn unit_examples() {
        // (x + y√D)/2 with √8 = 2√2: 1+√2 = (2 + 1·√8)/2
        let u = unit(8);
        assert_eq!((u.x.clone(), u.y.clone(), u.unit_norm), (BigInt::from(2), BigInt::from(1), -1));
        let u = unit(12);
        assert_eq!((u.x.clone(), u.y.clone(), u.unit_norm), (BigInt::from(4), BigInt::from(1), 1));
        let u = unit(40);
        assert_eq!((u.x.clone(), u.y.clone(), u.unit_norm), (BigInt::from(6), BigInt::from(1), -1));
        let u = unit(5);
        assert_eq!((u.x.clone(), u.y.clone(), u.unit_norm), (BigInt::from(1), BigInt::from(1), -1));
        assert!((u.regulator_estimate - 0.4812118250596).abs() < 1e-9);
    }

    #[test]
    fn radicand_basis() {
        let d = QuadDiscriminant::new(12).unwrap();
        assert_eq!(unit(12).in_radicand_basis(&d), (BigInt::from(2), BigInt::from(1), BigInt::one()));
        let d = QuadDiscriminant::new(5).unwrap();
        assert_eq!(unit(5).in_radicand_basis(&d), (BigInt::from(1), BigInt::from(1), BigInt::from(2)));
    }

    #[test]
    fn large_period_unit() {
        // 94 has a famously large unit 2143295 + 221064√94
        let u = unit(376);
        assert_eq!(u.x, BigInt::from(2 * 2143295));
        assert_eq!(u.y, BigInt::from(221064));
        assert_eq!(u.unit_norm, 1);
    }
}
