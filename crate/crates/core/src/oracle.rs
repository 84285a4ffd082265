//! Slow brute-force procedures used to cross-check the fast code paths.
//!
//! Nothing here shares logic with the modules it checks: symbols come from
//! counting solutions modulo prime powers, units and principal ideals from
//! direct search.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{is_square_u64, isqrt_u64, pow_mod_u64, SymbolValue};
use crate::zsqrt2::{Sqrt2Behavior, Zsqrt2Elem};

/// Largest odd prime accepted by [`hilbert_symbol_q_brute`] (work is `p^3`).
pub const BRUTE_HILBERT_MAX_PRIME: u64 = 101;

fn strip_square_powers(mut a: i64, p: i64) -> i64 {
    while a % (p * p) == 0 {
        a /= p * p;
    }
    a
}

/// `(a, b)_p` by searching for a primitive solution of `z^2 = a x^2 + b y^2`
/// modulo `p^3` (odd `p`) or `2^6`, which suffices once `v_p(a), v_p(b) ≤ 1`.
///
/// A primitive solution has `x` or `y` a unit (if both were divisible by `p`,
/// so would be `z`), and scaling makes that coordinate 1.
pub fn hilbert_symbol_q_brute(a: i64, b: i64, p: u64) -> Option<SymbolValue> {
    if a == 0 || b == 0 || p > BRUTE_HILBERT_MAX_PRIME {
        return None;
    }
    let pi = p as i64;
    let a = strip_square_powers(a, pi);
    let b = strip_square_powers(b, pi);
    let m: i64 = if p == 2 { 64 } else { pi * pi * pi };
    let mut square = vec![false; m as usize];
    for z in 0..m {
        square[(z * z % m) as usize] = true;
    }
    let (am, bm) = (a.rem_euclid(m), b.rem_euclid(m));
    let form = |x: i64, y: i64| ((am * (x * x % m) + bm * (y * y % m)) % m) as usize;
    let x_unit = (0..m).any(|y| square[form(1, y)]);
    let y_unit = (0..m).step_by(p as usize).any(|x| square[form(x, 1)]);
    Some(SymbolValue::from_bool(x_unit || y_unit))
}

/// `(a, b)_∞`.
pub fn hilbert_symbol_real_brute(a: i64, b: i64) -> SymbolValue {
    SymbolValue::from_bool(a > 0 || b > 0)
}

/// `(2/p)_4` by looking for a fourth root of 2 modulo `p`.
pub fn quartic_two_brute(p: u64) -> SymbolValue {
    SymbolValue::from_bool((1..p).any(|x| pow_mod_u64(x, 4, p) == 2 % p))
}

/// Odd prime divisors of `n`, by trial division.
fn odd_prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n % 2 == 0 && n > 0 {
        n /= 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 2;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Whether the rational integer `a` is a norm from `Q(√2, √d)` to `Q(√2)`.
///
/// For rational arguments only places of `Q(√2)` of degree one over `Q` can
/// obstruct: the two real places and the places above primes `≡ ±1 (mod 8)`.
/// Local symbols there are the symbols over `Q`, computed by brute force.
/// Returns `None` when a needed prime exceeds the brute-force range.
pub fn rational_norm_from_q1_ext(a: i64, d: i64) -> Option<bool> {
    if hilbert_symbol_real_brute(a, d) != SymbolValue::PlusOne {
        return Some(false);
    }
    let n = a.unsigned_abs() * d.unsigned_abs();
    for p in odd_prime_divisors(n) {
        if p % 8 == 1 || p % 8 == 7 {
            if hilbert_symbol_q_brute(a, d, p)? != SymbolValue::PlusOne {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// A solution of `x^2 - d y^2 = α z^2` with `z ≠ 0` and all coordinates of
/// `x, y, z` in `[-height, height]`.
pub fn norm_search_q1(alpha: &Zsqrt2Elem, d: i64, height: i64) -> Option<[Zsqrt2Elem; 3]> {
    let range: Vec<i64> = (-height..=height).collect();
    let elems: Vec<Zsqrt2Elem> =
        range.iter().flat_map(|&a| range.iter().map(move |&b| Zsqrt2Elem::new(a, b))).collect();
    let dd = Zsqrt2Elem::from_int(d);
    let squares: Vec<Zsqrt2Elem> = elems.iter().map(|e| e * e).collect();
    for (zi, z2) in squares.iter().enumerate() {
        if elems[zi].is_zero() {
            continue;
        }
        let target = alpha * z2;
        for (yi, y2) in squares.iter().enumerate() {
            let x2 = &target + &(&dd * y2);
            if let Some(xi) = squares.iter().position(|s| *s == x2) {
                return Some([elems[xi].clone(), elems[yi].clone(), elems[zi].clone()]);
            }
        }
    }
    None
}

/// Smallest `(x, y)` with `y ≥ 1` and `x^2 - D y^2 = ±4`, searching `y ≤ y_max`.
pub fn brute_unit(d: u64, y_max: u64) -> Option<(u64, u64, i8)> {
    for y in 1..=y_max {
        let dy2 = (d as u128) * (y as u128) * (y as u128);
        for (t, sign) in [(dy2.checked_sub(4), -1i8), (Some(dy2 + 4), 1)] {
            if let Some(t) = t {
                let t = t.to_u64()?;
                if is_square_u64(t) {
                    return Some((isqrt_u64(t), y, sign));
                }
            }
        }
    }
    None
}

/// Whether a prime ideal above `ℓ` in `Q(√D)` is principal, by searching
/// `x^2 - D y^2 = ±4ℓ` inside the fundamental domain of the unit group.
pub fn principal_by_search(d: u64, ell: u64, y_max: u64) -> Option<bool> {
    let (ux, uy, _) = brute_unit(d, y_max)?;
    let eps = (ux as f64 + uy as f64 * (d as f64).sqrt()) / 2.0;
    let bound = ((ell as f64).sqrt() * (eps + 1.0) / (d as f64).sqrt()).ceil() as u64 + 1;
    for y in 0..=bound {
        let dy2 = (d as u128) * (y as u128) * (y as u128);
        let four_l = 4 * ell as u128;
        for t in [dy2.checked_add(four_l), dy2.checked_sub(four_l)].into_iter().flatten() {
            if is_square_u64(t.to_u64()?) {
                return Some(true);
            }
        }
    }
    Some(false)
}

/// Behaviour of `⟨√2⟩` in `Q(√2, √α)` from the local square classes: split
/// when `α` is a square modulo `4√2`, inert when it is a square times a unit
/// `≡ 1 (mod 4)` but not split, ramified otherwise. `α` must be odd and not a square.
pub fn sqrt2_behavior_brute(alpha: &Zsqrt2Elem) -> Sqrt2Behavior {
    let red = |x: &BigInt, m: i64| x.modpow(&BigInt::from(1), &BigInt::from(m)).to_i64().unwrap();
    let (a, b) = (red(&alpha.a, 8), red(&alpha.b, 4));
    let mut squares_4sqrt2 = Vec::new();
    let mut squares_4 = Vec::new();
    for x in (1..8).step_by(2) {
        for y in 0..4 {
            let s = Zsqrt2Elem::new(x, y).pow(2);
            squares_4sqrt2.push((red(&s.a, 8), red(&s.b, 4)));
            squares_4.push((red(&s.a, 4), red(&s.b, 4)));
        }
    }
    if squares_4sqrt2.contains(&(a, b)) {
        Sqrt2Behavior::Split
    } else if squares_4.contains(&(a % 4, b)) {
        Sqrt2Behavior::Inert
    } else {
        Sqrt2Behavior::Ramified
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_symbols() {
        // (-1, -1)_2 = -1, (2, 3)_3 = -1, (5, 7)_5 = -1, (3, 7)_2 = -1
        assert_eq!(hilbert_symbol_q_brute(-1, -1, 2), Some(SymbolValue::MinusOne));
        assert_eq!(hilbert_symbol_q_brute(2, 3, 3), Some(SymbolValue::MinusOne));
        assert_eq!(hilbert_symbol_q_brute(5, 7, 5), Some(SymbolValue::MinusOne));
        assert_eq!(hilbert_symbol_q_brute(3, 7, 2), Some(SymbolValue::MinusOne));
        assert_eq!(hilbert_symbol_q_brute(2, 7, 7), Some(SymbolValue::PlusOne));
        assert_eq!(quartic_two_brute(41), SymbolValue::MinusOne);
        assert_eq!(quartic_two_brute(73), SymbolValue::PlusOne);
    }

    #[test]
    fn brute_units_and_principal() {
        assert_eq!(brute_unit(5, 10), Some((1, 1, -1)));
        assert_eq!(brute_unit(12, 10), Some((4, 1, 1)));
        // Q(√10) has class number 2: the prime above 2 is not principal, above 3 neither
        assert_eq!(principal_by_search(40, 2, 100), Some(false));
        assert_eq!(principal_by_search(40, 3, 100), Some(false));
        assert_eq!(principal_by_search(40, 5, 100), Some(false));
        assert_eq!(principal_by_search(5, 11, 100), Some(true));
    }

    #[test]
    fn norm_search_finds_small_norms() {
        // 1 - 3·1 = -1·(√2)^2
        assert!(norm_search_q1(&Zsqrt2Elem::from_int(-1), 3, 1).is_some());
        assert_eq!(rational_norm_from_q1_ext(-1, 3), Some(true));
        assert_eq!(rational_norm_from_q1_ext(-1, 7), Some(false));
    }

    #[test]
    fn brute_sqrt2_behaviour() {
        assert_eq!(sqrt2_behavior_brute(&Zsqrt2Elem::new(7, 2)), Sqrt2Behavior::Inert);
        assert_eq!(sqrt2_behavior_brute(&Zsqrt2Elem::from_int(41)), Sqrt2Behavior::Split);
        assert_eq!(sqrt2_behavior_brute(&Zsqrt2Elem::from_int(3)), Sqrt2Behavior::Ramified);
    }
}
