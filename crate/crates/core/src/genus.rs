//! Genus theory for quadratic extensions: genus fields, the ambiguous class
//! formula, unit norm indices, and splitting of odd primes in the layers `Q_n`
//! of the cyclotomic `Z_2`-extension of `Q`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, is_squarefree, pow_mod_u64};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_places_q, is_global_norm, SymbolTable};
use crate::zsqrt2::{fundamental_unit_q1, Zsqrt2Elem};

/// Genus field of `Q(√base_d)` as a list of quadratic radicands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusFieldDescription {
    pub base_d: i64,
    /// Radicands of the prime discriminants dividing the field discriminant
    /// (`p*` for odd `p`, and one of `-1, 2, -2` for the dyadic part).
    pub prime_discriminants: Vec<i64>,
    /// Radicands generating the genus field over `Q` (its maximal real
    /// subfield when `real_subfield_flag` is set).
    pub generators: Vec<i64>,
    /// A minimal subset of quadratic radicands generating the genus field over `Q(√base_d)`.
    pub relative_generators: Vec<i64>,
    pub real_subfield_flag: bool,
}

impl GenusFieldDescription {
    /// Number of ramified primes of `Q(√base_d)/Q`.
    pub fn ramified_count(&self) -> usize {
        self.prime_discriminants.len()
    }
}

/// Exponent vector over GF(2) of a squarefree radicand, indexed by `-1` and primes.
fn gf2_vector(n: i64, primes: &[u64]) -> Vec<bool> {
    let mut v = vec![n < 0];
    for &p in primes {
        v.push(n.unsigned_abs() % p == 0);
    }
    v
}

/// Whether `target` lies in the GF(2) span of `basis` (rows already reduced).
fn reduce_against(mut v: Vec<bool>, basis: &[(usize, Vec<bool>)]) -> Vec<bool> {
    for (pivot, row) in basis {
        if v[*pivot] {
            for (x, y) in v.iter_mut().zip(row) {
                *x ^= *y;
            }
        }
    }
    v
}

fn squarefree_product(a: i64, b: i64) -> i64 {
    let g = num_integer::gcd(a.unsigned_abs(), b.unsigned_abs()) as i64;
    (a / g) * (b / g)
}

/// The genus field of `Q(√d)` for squarefree `d > 1`.
pub fn genus_field(d: i64) -> Result<GenusFieldDescription> {
    if d <= 1 || !is_squarefree(d)? {
        return Err(Error::InvalidInput(format!("{d} is not a squarefree integer > 1")));
    }
    let odd: Vec<u64> = factor_u64(d as u64)?.into_iter().map(|(p, _)| p).filter(|&p| p != 2).collect();
    let mut pstar: Vec<i64> = vec![];
    match d.rem_euclid(4) {
        1 => {}
        3 => pstar.push(-1),
        _ => {
            let half = d / 2;
            pstar.push(if half.rem_euclid(4) == 1 { 2 } else { -2 });
        }
    }
    for &p in &odd {
        pstar.push(if p % 4 == 1 { p as i64 } else { -(p as i64) });
    }
    let negatives: Vec<i64> = pstar.iter().copied().filter(|&x| x < 0).collect();
    let mut generators: Vec<i64> = pstar.iter().copied().filter(|&x| x > 0).collect();
    if let Some((&first, rest)) = negatives.split_first() {
        generators.extend(rest.iter().map(|&x| squarefree_product(first, x)));
    }
    let real_subfield_flag = !negatives.is_empty();

    let mut primes: Vec<u64> = vec![2];
    primes.extend(&odd);
    let mut basis: Vec<(usize, Vec<bool>)> = vec![];
    let insert = |v: Vec<bool>, basis: &mut Vec<(usize, Vec<bool>)>| -> bool {
        let r = reduce_against(v, basis);
        match r.iter().position(|&x| x) {
            Some(pivot) => {
                for (_, row) in basis.iter_mut() {
                    if row[pivot] {
                        for (x, y) in row.iter_mut().zip(&r) {
                            *x ^= *y;
                        }
                    }
                }
                basis.push((pivot, r));
                true
            }
            None => false,
        }
    };
    insert(gf2_vector(d, &primes), &mut basis);
    let mut relative_generators = vec![];
    for &g in &generators {
        if insert(gf2_vector(g, &primes), &mut basis) {
            relative_generators.push(g);
        }
    }
    Ok(GenusFieldDescription {
        base_d: d,
        prime_discriminants: pstar,
        generators,
        relative_generators,
        real_subfield_flag,
    })
}

/// The quantities entering the ambiguous class number formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusRankInput {
    /// Number of primes of `K` ramified in `L`.
    pub t: u32,
    /// `e` with `[E(K) : E(K) ∩ N L^×] = 2^e`.
    pub unit_norm_index_log: u32,
    /// `#A(K)`.
    pub base_class_order: u64,
}

/// `#A(L)^G = #A(K) · 2^(t-1) / 2^e`.
pub fn ambiguous_order(input: GenusRankInput) -> Result<u64> {
    if input.t == 0 || input.base_class_order == 0 {
        return Err(Error::GenusInconsistent(format!("{input:?}")));
    }
    let num = (input.base_class_order as u128) << (input.t - 1);
    let den = 1u128 << input.unit_norm_index_log;
    if num % den != 0 {
        return Err(Error::GenusInconsistent(format!(
            "#A(K) 2^(t-1) = {num} is not divisible by 2^e = {den}"
        )));
    }
    Ok((num / den) as u64)
}

/// `e ∈ {0, 1}`: whether `-1` fails to be a norm from `Q(√d)`.
pub fn norm_index_over_q(d: i64) -> Result<u32> {
    if d == 1 || !is_squarefree(d)? {
        return Err(Error::InvalidInput(format!("{d} is not a squarefree integer other than 1")));
    }
    let places = hilbert_places_q(&BigInt::from(-1), &BigInt::from(d))?;
    Ok(u32::from(places.iter().any(|(_, v)| !v.is_one())))
}

/// Unit norm data for `Q(√2, √d) / Q(√2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitNormIndex {
    /// `e` with `[E(Q_1) : E(Q_1) ∩ N] = 2^e`.
    pub e: u32,
    pub minus_one_is_norm: bool,
    pub unit_is_norm: bool,
    pub minus_unit_is_norm: bool,
    pub minus_one_table: SymbolTable,
    pub unit_table: SymbolTable,
    pub minus_unit_table: SymbolTable,
}

/// Index of the unit norms in `E(Q_1) = ⟨-1, 1+√2⟩`, from the global norm
/// status of `-1`, `1+√2` and `-(1+√2)`.
pub fn norm_index_over_q1(d: i64) -> Result<UnitNormIndex> {
    if d % 2 == 0 {
        return Err(Error::InvalidInput(format!("{d} must be odd")));
    }
    let eps = fundamental_unit_q1();
    let (m1, t1) = is_global_norm(&Zsqrt2Elem::from_int(-1), d)?;
    let (u, tu) = is_global_norm(&eps, d)?;
    let (mu, tmu) = is_global_norm(&-&eps, d)?;
    // norms modulo squares form a subgroup of E/E^2 ≅ (Z/2)^2
    let count = 1 + u32::from(m1) + u32::from(u) + u32::from(mu);
    let e = match count {
        1 => 2,
        2 => 1,
        4 => 0,
        _ => {
            return Err(Error::GenusInconsistent(format!(
                "unit norms for d = {d} do not form a subgroup: -1 {m1}, ε {u}, -ε {mu}"
            )))
        }
    };
    Ok(UnitNormIndex {
        e,
        minus_one_is_norm: m1,
        unit_is_norm: u,
        minus_unit_is_norm: mu,
        minus_one_table: t1,
        unit_table: tu,
        minus_unit_table: tmu,
    })
}

/// Decomposition of an odd prime in the layer `Q_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    pub g: u64,
    pub f: u64,
}

/// `f` = order of `p` in `(Z/2^(n+2))^× / {±1}` and `g = 2^n / f`.
pub fn splitting_in_qn(p: u64, n: u32) -> Result<Splitting> {
    if p % 2 == 0 || n > 4 {
        return Err(Error::InvalidInput(format!("splitting of {p} in Q_{n}")));
    }
    let m = 1u64 << (n + 2);
    let mut f = 1;
    let mut x = p % m;
    while x != 1 && x != m - 1 {
        x = x * (p % m) % m;
        f += 1;
    }
    debug_assert_eq!(pow_mod_u64(p % m, 2 * f, m), 1);
    Ok(Splitting { g: (1 << n) / f, f })
}

/// Number of primes of `Q_n` above `p`, `q`, `r`, i.e. the finite primes
/// ramified in `k_n / Q_n`.
pub fn ramified_count_kn_over_qn(p: u64, q: u64, r: u64, n: u32) -> Result<u64> {
    if n > 2 {
        return Err(Error::InvalidInput(format!("ramification counting is capped at level 2, got {n}")));
    }
    Ok(splitting_in_qn(p, n)?.g + splitting_in_qn(q, n)?.g + splitting_in_qn(r, n)?.g)
}

/// Whether 2 splits in both `Q(√p)` and `Q(√qr)`.
pub fn two_splits_completely_in_genus_field(p: u64, q: u64, r: u64) -> bool {
    p % 8 == 1 && (q * r) % 8 == 1
}
