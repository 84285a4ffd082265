//! Class numbers of real biquadratic fields `Q(√m, √n)`.
//!
//! The main route is Kuroda's formula `h = Q h1 h2 h3 / 4` with the unit index
//! `Q` decided by exact square roots in the field. A small Minkowski-bound
//! search serves as an independent check on tiny fields.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, primes_up_to};
use crate::error::{Error, Result};
use crate::quadform::{ClassGroup, FundamentalUnit, QuadDiscriminant};

/// `Q(√m, √n)` with `m ≠ n` squarefree and greater than 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiquadField {
    pub m: u64,
    pub n: u64,
}

impl BiquadField {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        let ok = |x: u64| x > 1 && is_squarefree(x as i64).unwrap_or(false);
        if !ok(m) || !ok(n) || m == n {
            return Err(Error::InvalidField(format!("Q(√{m}, √{n})")));
        }
        Ok(BiquadField { m, n })
    }

    /// `g = gcd(m, n)` with `√m √n = g √k`.
    pub fn gcd(&self) -> u64 {
        self.m.gcd(&self.n)
    }

    /// The third quadratic radicand `mn / gcd(m, n)^2`.
    pub fn k(&self) -> u64 {
        let g = self.gcd();
        (self.m / g) * (self.n / g)
    }

    pub fn subfield_radicands(&self) -> [u64; 3] {
        [self.m, self.n, self.k()]
    }

    pub fn subfield_discriminants(&self) -> Result<[QuadDiscriminant; 3]> {
        let [a, b, c] = self.subfield_radicands();
        Ok([QuadDiscriminant::of_field(a)?, QuadDiscriminant::of_field(b)?, QuadDiscriminant::of_field(c)?])
    }

    /// Field discriminant, the product of the three subfield discriminants.
    pub fn discriminant(&self) -> Result<u128> {
        let d = self.subfield_discriminants()?;
        Ok(d.iter().map(|x| x.get() as u128).product())
    }
}

impl fmt::Display for BiquadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{}, √{})", self.m, self.n)
    }
}

/// `c0 + c1 √m + c2 √n + c3 √m √n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticElem {
    pub m: u64,
    pub n: u64,
    pub c: [BigRational; 4],
}

impl QuarticElem {
    pub fn new(field: &BiquadField, c: [BigRational; 4]) -> Self {
        QuarticElem { m: field.m, n: field.n, c }
    }

    pub fn one(field: &BiquadField) -> Self {
        let z = BigRational::zero;
        Self::new(field, [BigRational::one(), z(), z(), z()])
    }

    pub fn neg(&self) -> Self {
        QuarticElem { m: self.m, n: self.n, c: self.c.clone().map(|x| -x) }
    }

    pub fn mul(&self, o: &QuarticElem) -> QuarticElem {
        let m = BigRational::from_integer(BigInt::from(self.m));
        let n = BigRational::from_integer(BigInt::from(self.n));
        let mn = &m * &n;
        let [a0, a1, a2, a3] = &self.c;
        let [b0, b1, b2, b3] = &o.c;
        let c0 = a0 * b0 + &m * (a1 * b1) + &n * (a2 * b2) + &mn * (a3 * b3);
        let c1 = a0 * b1 + a1 * b0 + &n * (a2 * b3 + a3 * b2);
        let c2 = a0 * b2 + a2 * b0 + &m * (a1 * b3 + a3 * b1);
        let c3 = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1;
        QuarticElem { m: self.m, n: self.n, c: [c0, c1, c2, c3] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl fmt::Display for QuarticElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, n) = (self.m, self.n);
        write!(f, "{} + ({})√{m} + ({})√{n} + ({})√{m}√{n}", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

/// An element of `L = Q(√m)`: `(p, q)` meaning `p + q√m`.
type LElem = (BigRational, BigRational);

fn l_mul(x: &LElem, y: &LElem, m: &BigRational) -> LElem {
    (&x.0 * &y.0 + m * (&x.1 * &y.1), &x.0 * &y.1 + &x.1 * &y.0)
}

fn l_sub(x: &LElem, y: &LElem) -> LElem {
    (&x.0 - &y.0, &x.1 - &y.1)
}

fn l_add(x: &LElem, y: &LElem) -> LElem {
    (&x.0 + &y.0, &x.1 + &y.1)
}

fn l_scale(x: &LElem, s: &BigRational) -> LElem {
    (&x.0 * s, &x.1 * s)
}

fn l_is_zero(x: &LElem) -> bool {
    x.0.is_zero() && x.1.is_zero()
}

fn l_inv(x: &LElem, m: &BigRational) -> Option<LElem> {
    let nrm = &x.0 * &x.0 - m * &x.1 * &x.1;
    if nrm.is_zero() {
        return None;
    }
    Some((&x.0 / &nrm, -&x.1 / &nrm))
}

/// Square root in `Q(√m)`.
fn l_sqrt(x: &LElem, m: &BigRational) -> Option<LElem> {
    let (a, b) = x;
    if b.is_zero() {
        if let Some(s) = rational_sqrt(a) {
            return Some((s, BigRational::zero()));
        }
        // a = m t^2
        let t = rational_sqrt(&(a / m))?;
        return Some((BigRational::zero(), t));
    }
    let c = rational_sqrt(&(a * a - m * b * b))?;
    let two = BigRational::from_integer(BigInt::from(2));
    for s2 in [(a + &c) / &two, (a - &c) / &two] {
        let Some(s) = rational_sqrt(&s2) else { continue };
        if s.is_zero() {
            continue;
        }
        let t = b / (&two * &s);
        let root = (s, t);
        if &l_mul(&root, &root, m) == x {
            return Some(root);
        }
    }
    None
}

/// Exact square root in `K = Q(√m)(√n)`, if any.
pub fn quartic_sqrt(z: &QuarticElem) -> Option<QuarticElem> {
    let m = BigRational::from_integer(BigInt::from(z.m));
    let n = BigRational::from_integer(BigInt::from(z.n));
    let x: LElem = (z.c[0].clone(), z.c[1].clone());
    let y: LElem = (z.c[2].clone(), z.c[3].clone());
    let from = |s: LElem, t: LElem| QuarticElem { m: z.m, n: z.n, c: [s.0, s.1, t.0, t.1] };
    if z.is_zero() {
        return Some(z.clone());
    }
    if l_is_zero(&y) {
        if let Some(s) = l_sqrt(&x, &m) {
            return Some(from(s, (BigRational::zero(), BigRational::zero())));
        }
        // x = n t^2
        let t = l_sqrt(&l_scale(&x, &n.recip()), &m)?;
        let root = from((BigRational::zero(), BigRational::zero()), t);
        return (root.mul(&root) == *z).then_some(root);
    }
    let nrm = l_sub(&l_mul(&x, &x, &m), &l_scale(&l_mul(&y, &y, &m), &n));
    let c = l_sqrt(&nrm, &m)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for s2 in [l_scale(&l_add(&x, &c), &half), l_scale(&l_sub(&x, &c), &half)] {
        let Some(s) = l_sqrt(&s2, &m) else { continue };
        let Some(inv) = l_inv(&l_scale(&s, &BigRational::from_integer(BigInt::from(2))), &m) else {
            continue;
        };
        let t = l_mul(&y, &inv, &m);
        let root = from(s, t);
        if root.mul(&root) == *z {
            return Some(root);
        }
    }
    None
}

/// A unit product found to be a square in the field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareWitness {
    /// Exponents of `ε1, ε2, ε3`.
    pub exponents: [u8; 3],
    /// Sign applied to the product (`-1` when it was totally negative).
    pub sign: i8,
    /// Coordinates of the square root in the basis `1, √m, √n, √m√n`.
    pub root: [String; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitIndexResult {
    pub q: u32,
    pub witnesses: Vec<SquareWitness>,
}

/// A real quadratic unit embedded in `K`.
fn embed_unit(field: &BiquadField, which: usize, u: &FundamentalUnit) -> Result<QuarticElem> {
    let radicands = field.subfield_radicands();
    let d = QuadDiscriminant::of_field(radicands[which])?;
    let (a, b, den) = u.in_radicand_basis(&d);
    let a = BigRational::new(a, den.clone());
    let b = BigRational::new(b, den);
    let z = BigRational::zero;
    Ok(match which {
        0 => QuarticElem::new(field, [a, b, z(), z()]),
        1 => QuarticElem::new(field, [a, z(), b, z()]),
        _ => {
            // √k = √m √n / g
            let g = BigRational::from_integer(BigInt::from(field.gcd()));
            QuarticElem::new(field, [a, z(), z(), b / g])
        }
    })
}

/// `Q = [E_K : ⟨-1, ε1, ε2, ε3⟩]`, counting the classes `±ε1^a ε2^b ε3^c`
/// that are squares in `K`.
pub fn unit_index(field: &BiquadField, units: [&FundamentalUnit; 3]) -> Result<UnitIndexResult> {
    let eps: Vec<QuarticElem> =
        (0..3).map(|i| embed_unit(field, i, units[i])).collect::<Result<_>>()?;
    let mut q = 1u32;
    let mut witnesses = vec![];
    for mask in 1u8..8 {
        let exps = [mask & 1, (mask >> 1) & 1, (mask >> 2) & 1];
        let mut prod = QuarticElem::one(field);
        for i in 0..3 {
            if exps[i] == 1 {
                prod = prod.mul(&eps[i]);
            }
        }
        for sign in [1i8, -1] {
            let z = if sign == 1 { prod.clone() } else { prod.neg() };
            if let Some(root) = quartic_sqrt(&z) {
                if root.mul(&root) != z {
                    return Err(Error::Internal("square root witness does not square back".into()));
                }
                q += 1;
                witnesses.push(SquareWitness { exponents: exps, sign, root: root.c.clone().map(|c| c.to_string()) });
                break;
            }
        }
    }
    if !matches!(q, 1 | 2 | 4 | 8) {
        return Err(Error::Internal(format!("unit squares do not form a group: {q} classes")));
    }
    Ok(UnitIndexResult { q, witnesses })
}

/// Class number data from Kuroda's formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KurodaResult {
    pub field: BiquadField,
    /// Wide class numbers of `Q(√m)`, `Q(√n)`, `Q(√k)`.
    pub subfield_class_numbers: [u64; 3],
    pub unit_index: UnitIndexResult,
    pub h: u64,
    pub h_2part: u64,
}

/// Kuroda's formula from already computed subfield class groups.
pub fn kuroda_from_subfields(field: &BiquadField, subfields: [&ClassGroup; 3]) -> Result<KurodaResult> {
    let radicands = field.subfield_radicands();
    for (cg, r) in subfields.iter().zip(radicands) {
        if cg.discriminant().radicand() != r {
            return Err(Error::InvalidField(format!("class group of {} does not belong to {field}", cg.discriminant())));
        }
    }
    let units = [subfields[0].unit(), subfields[1].unit(), subfields[2].unit()];
    let ui = unit_index(field, units)?;
    let hs = [subfields[0].wide().order(), subfields[1].wide().order(), subfields[2].wide().order()];
    let num = ui.q as u64 * hs[0] * hs[1] * hs[2];
    if num % 4 != 0 {
        return Err(Error::Internal(format!("Q h1 h2 h3 = {num} is not divisible by 4 for {field}")));
    }
    let h = num / 4;
    let h_2part = 1u64 << h.trailing_zeros();
    Ok(KurodaResult { field: *field, subfield_class_numbers: hs, unit_index: ui, h, h_2part })
}

/// Class number of a real biquadratic field by Kuroda's formula.
pub fn kuroda_class_number(field: &BiquadField, disc_bound: u64) -> Result<KurodaResult> {
    let discs = field.subfield_discriminants()?;
    let cgs: Vec<ClassGroup> = discs.iter().map(|d| ClassGroup::compute(d, disc_bound)).collect::<Result<_>>()?;
    kuroda_from_subfields(field, [&cgs[0], &cgs[1], &cgs[2]])
}

/// Evidence that all prime ideals below the Minkowski bound are principal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinkowskiCertificate {
    pub bound: String,
    /// `(ℓ, f, generator)`: an integral element of norm `±ℓ^f` generating a prime above `ℓ`.
    pub generators: Vec<(u64, u32, [String; 4])>,
    pub h: u64,
}

const MINKOWSKI_MAX_BOUND: f64 = 50.0;
const SEARCH_HEIGHT: i64 = 24;

type R = Ratio<i128>;

/// Ramification index and residue degree of `ℓ` in `K`.
fn decomposition(field: &BiquadField, ell: u64) -> Result<(u32, u32)> {
    let ks: Vec<i8> = field.subfield_discriminants()?.iter().map(|d| d.kronecker(ell)).collect();
    let ramified = ks.iter().filter(|&&k| k == 0).count();
    Ok(match ramified {
        0 => (1, if ks.iter().all(|&k| k == 1) { 1 } else { 2 }),
        3 => (4, 1),
        _ => {
            let unram = ks.iter().find(|&&k| k != 0).copied().unwrap_or(1);
            (2, if unram == 1 { 1 } else { 2 })
        }
    })
}

/// `(p + q√m)` integral in `Q(√m)` and its norm.
fn l_integral(p: R, q: R, m: i128) -> bool {
    let tr = p * 2;
    let nrm = p * p - q * q * m;
    tr.is_integer() && nrm.is_integer()
}

/// Integrality and absolute norm of `(a + b√m + c√n + d√m√n)/4`.
fn integral_norm(field: &BiquadField, coeffs: [i64; 4]) -> Option<i128> {
    let m = field.m as i128;
    let n = field.n as i128;
    let q = |x: i64| R::new(x as i128, 4);
    let (x0, x1, y0, y1) = (q(coeffs[0]), q(coeffs[1]), q(coeffs[2]), q(coeffs[3]));
    // relative trace 2x and relative norm x^2 - n y^2 over Q(√m)
    if !l_integral(x0 * 2, x1 * 2, m) {
        return None;
    }
    let nx0 = x0 * x0 + x1 * x1 * m - (y0 * y0 + y1 * y1 * m) * n;
    let nx1 = x0 * x1 * 2 - y0 * y1 * 2 * n;
    if !l_integral(nx0, nx1, m) {
        return None;
    }
    let norm = nx0 * nx0 - nx1 * nx1 * m;
    norm.is_integer().then(|| norm.to_integer())
}

/// Class number of a tiny real biquadratic field by showing that a prime
/// above every rational prime below the Minkowski bound is principal.
///
/// Refuses when the bound is too large or when no generator is found within
/// the search box; it never reports a class number above 1.
pub fn minkowski_class_number(field: &BiquadField) -> Result<MinkowskiCertificate> {
    let disc = field.discriminant()? as f64;
    let bound = 24.0 / 256.0 * disc.sqrt();
    if bound > MINKOWSKI_MAX_BOUND {
        return Err(Error::OracleRefused(format!("Minkowski bound {bound:.2} of {field} exceeds {MINKOWSKI_MAX_BOUND}")));
    }
    let mut generators = vec![];
    for ell in primes_up_to(bound.floor() as u64) {
        let (_, f) = decomposition(field, ell)?;
        let target = (ell as i128).pow(f);
        if target as f64 > bound {
            continue;
        }
        let found = search_norm(field, target).ok_or_else(|| {
            Error::OracleRefused(format!("no element of norm ±{target} found in {field}"))
        })?;
        generators.push((ell, f, found.map(|x| format!("{x}/4"))));
    }
    Ok(MinkowskiCertificate { bound: format!("{bound:.4}"), generators, h: 1 })
}

fn search_norm(field: &BiquadField, target: i128) -> Option<[i64; 4]> {
    for h in 0..=SEARCH_HEIGHT {
        // all coefficient vectors with max |c_i| = h, in a fixed order
        let range = -h..=h;
        for a in range.clone() {
            for b in range.clone() {
                for c in range.clone() {
                    for d in range.clone() {
                        let v = [a, b, c, d];
                        if v.iter().map(|x| x.abs()).max() != Some(h) {
                            continue;
                        }
                        if let Some(nrm) = integral_norm(field, v) {
                            if nrm.abs() == target {
                                return Some(v);
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::DEFAULT_DISC_BOUND;

    fn field(m: u64, n: u64) -> BiquadField {
        BiquadField::new(m, n).unwrap()
    }

    #[test]
    fn third_radicand() {
        assert_eq!(field(2, 3).k(), 6);
        assert_eq!(field(6, 10).k(), 15);
        assert_eq!(field(2, 5289).k(), 10578);
        assert!(BiquadField::new(2, 2).is_err());
        assert!(BiquadField::new(4, 3).is_err());
    }

    #[test]
    fn kuroda_small_fields() {
        let r = kuroda_class_number(&field(2, 3), DEFAULT_DISC_BOUND).unwrap();
        assert_eq!((r.unit_index.q, r.h), (4, 1));
        let r = kuroda_class_number(&field(2, 5), DEFAULT_DISC_BOUND).unwrap();
        assert_eq!(r.subfield_class_numbers, [1, 1, 2]);
        assert_eq!((r.unit_index.q, r.h), (2, 1));
        let r = kuroda_class_number(&field(3, 5), DEFAULT_DISC_BOUND).unwrap();
        assert_eq!(r.subfield_class_numbers, [1, 1, 2]);
        assert_eq!(r.h, 1);
    }

    #[test]
    fn kuroda_worked_field() {
        let r = kuroda_class_number(&field(2, 5289), DEFAULT_DISC_BOUND).unwrap();
        assert_eq!(r.unit_index.q, 2);
        assert_eq!(r.h_2part, 4);
    }

    #[test]
    fn witnesses_square_back() {
        let f = field(2, 3);
        let r = kuroda_class_number(&f, DEFAULT_DISC_BOUND).unwrap();
        assert_eq!(r.unit_index.witnesses.len(), 3);
        for w in &r.unit_index.witnesses {
            let c = w.root.clone().map(|s| s.parse::<BigRational>().unwrap());
            let root = QuarticElem::new(&f, c);
            assert!(!root.mul(&root).is_zero());
        }
    }

    #[test]
    fn exact_square_roots() {
        let f = field(2, 3);
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        // (√2 + √3)^2 = 5 + 2√6
        let z = QuarticElem::new(&f, [r(5, 1), r(0, 1), r(0, 1), r(2, 1)]);
        let s = quartic_sqrt(&z).unwrap();
        assert_eq!(s.mul(&s), z);
        // 2 + √3 = ((√2 + √6)/2)^2
        let z = QuarticElem::new(&f, [r(2, 1), r(0, 1), r(1, 1), r(0, 1)]);
        let s = quartic_sqrt(&z).unwrap();
        assert_eq!(s.mul(&s), z);
        let z = QuarticElem::new(&f, [r(1, 1), r(1, 1), r(0, 1), r(0, 1)]);
        assert!(quartic_sqrt(&z).is_none());
        let z = QuarticElem::new(&f, [r(3, 1), r(0, 1), r(0, 1), r(0, 1)]);
        assert!(quartic_sqrt(&z).is_some());
        let z = QuarticElem::new(&f, [r(5, 1), r(0, 1), r(0, 1), r(0, 1)]);
        assert!(quartic_sqrt(&z).is_none());
    }

    #[test]
    fn minkowski_small_fields() {
        for (m, n) in [(2, 3), (2, 5), (3, 5)] {
            let c = minkowski_class_number(&field(m, n)).unwrap();
            assert_eq!(c.h, 1);
        }
        assert!(matches!(minkowski_class_number(&field(2, 5289)), Err(Error::OracleRefused(_))));
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decomposition(&field(2, 3), 2).unwrap(), (4, 1));
        assert_eq!(decomposition(&field(2, 3), 3).unwrap(), (2, 2));
        assert_eq!(decomposition(&field(2, 5), 3).unwrap(), (1, 2));
    }
}
