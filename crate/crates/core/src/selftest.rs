//! Cross-validation of the fast code paths against the brute-force oracles.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, primes_up_to, quartic_symbol_of_two, OddPrime};
use crate::biquad::{kuroda_class_number, minkowski_class_number, BiquadField};
use crate::error::Result;
use crate::hilbert::{hilbert_symbol_q_int, is_global_norm, PlaceOfQ};
use crate::oracle;
use crate::quadform::{fundamental_unit, ClassGroup, QuadDiscriminant, DEFAULT_DISC_BOUND};
use crate::tower::{verify, Triple, VerifyOptions};
use crate::zsqrt2::{classify_sqrt2_behavior, Zsqrt2Elem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestCase {
    pub name: String,
    pub checked: usize,
    pub mismatches: usize,
    pub detail: String,
    pub pass: bool,
}

impl SelftestCase {
    fn new(name: &str, checked: usize, mismatches: Vec<String>) -> Self {
        let detail = mismatches.iter().take(5).cloned().collect::<Vec<_>>().join("; ");
        SelftestCase {
            name: name.to_string(),
            checked,
            mismatches: mismatches.len(),
            pass: mismatches.is_empty() && checked > 0,
            detail,
        }
    }
}

/// Hilbert symbols over `Q` against solution counting, `|a|, |b| ≤ 12`.
pub fn hilbert_q_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut n = 0;
    for a in (-12i64..=12).filter(|&x| x != 0) {
        for b in (-12i64..=12).filter(|&x| x != 0) {
            for p in [2u64, 3, 5, 7] {
                let fast = hilbert_symbol_q_int(&BigInt::from(a), &BigInt::from(b), PlaceOfQ::Prime(p))?;
                let slow = oracle::hilbert_symbol_q_brute(a, b, p);
                n += 1;
                if Some(fast) != slow {
                    bad.push(format!("({a}, {b})_{p}: {fast} vs {slow:?}"));
                }
            }
        }
    }
    Ok(SelftestCase::new("hilbert symbol over Q", n, bad))
}

/// `(2/p)_4` against a search for fourth roots, `p ≡ 1 (mod 8)`, `p < 5000`.
pub fn quartic_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut n = 0;
    for p in primes_up_to(5000).into_iter().filter(|p| p % 8 == 1) {
        let fast = quartic_symbol_of_two(OddPrime::new(p)?)?;
        let slow = oracle::quartic_two_brute(p);
        n += 1;
        if fast != slow {
            bad.push(format!("p = {p}: {fast} vs {slow}"));
        }
    }
    Ok(SelftestCase::new("quartic symbol of 2", n, bad))
}

/// Norm status of rational `a` from `Q(√2, √d)` against symbols over `Q`.
pub fn rational_norm_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut n = 0;
    let values = [-1i64, 3, -3, 5, -5, 7, -7, 15, -17, 21, 23, -23];
    for &a in &values {
        for d in (3i64..=400).step_by(2) {
            if !is_squarefree(d)? {
                continue;
            }
            let Some(slow) = oracle::rational_norm_from_q1_ext(a, d) else { continue };
            let (fast, table) = is_global_norm(&Zsqrt2Elem::from_int(a), d)?;
            n += 1;
            if fast != slow {
                bad.push(format!("{a} from d = {d}: {fast} ({}) vs {slow}", table.summary()));
            }
        }
    }
    Ok(SelftestCase::new("rational norms over Q(√2)", n, bad))
}

/// Every norm found by direct search is accepted by the symbol test.
pub fn norm_search_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut found = 0;
    for d in [3i64, 5, 7, 11, 15, 17] {
        for a in -3i64..=3 {
            for b in -2i64..=2 {
                let alpha = Zsqrt2Elem::new(a, b);
                if alpha.is_zero() {
                    continue;
                }
                if let Some(w) = oracle::norm_search_q1(&alpha, d, 2) {
                    found += 1;
                    let (fast, table) = is_global_norm(&alpha, d)?;
                    if !fast {
                        bad.push(format!("{alpha} from d = {d}: witness {w:?} but {}", table.summary()));
                    }
                }
            }
        }
    }
    Ok(SelftestCase::new("norm search over Q(√2)", found, bad))
}

/// Principality of small prime ideals against a bounded search.
pub fn principal_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut n = 0;
    for d in 5u64..400 {
        let Ok(disc) = QuadDiscriminant::new(d) else { continue };
        let cg = ClassGroup::compute(&disc, DEFAULT_DISC_BOUND)?;
        for ell in primes_up_to(30) {
            if disc.kronecker(ell) == -1 {
                continue;
            }
            let Some(slow) = oracle::principal_by_search(d, ell, 100_000) else { continue };
            let fast = cg.ideal_class_order(ell)? == 1;
            n += 1;
            if fast != slow {
                bad.push(format!("D = {d}, ℓ = {ell}: {fast} vs {slow}"));
            }
        }
    }
    Ok(SelftestCase::new("principal prime ideals", n, bad))
}

/// Fundamental units against the smallest solution of `x^2 - D y^2 = ±4`.
pub fn unit_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut n = 0;
    for d in 5u64..2000 {
        let Ok(disc) = QuadDiscriminant::new(d) else { continue };
        let Some((x, y, s)) = oracle::brute_unit(d, 200_000) else { continue };
        let u = fundamental_unit(&disc)?;
        n += 1;
        if (u.x.clone(), u.y.clone(), u.unit_norm) != (BigInt::from(x), BigInt::from(y), s) {
            bad.push(format!("D = {d}: ({}, {}, {}) vs ({x}, {y}, {s})", u.x, u.y, u.unit_norm));
        }
    }
    Ok(SelftestCase::new("fundamental units", n, bad))
}

/// Narrow class number from the group against the number of reduced cycles,
/// and narrow 2-rank against the number of ramified primes.
pub fn class_group_case(limit: u64) -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut n = 0;
    for d in 5..limit {
        let Ok(disc) = QuadDiscriminant::new(d) else { continue };
        let cg = ClassGroup::compute(&disc, DEFAULT_DISC_BOUND)?;
        let order = cg.narrow().order() as usize;
        let rank = cg.narrow_structure().two_rank();
        let t = disc.ramified_primes().len();
        n += 1;
        if order != cg.cycle_count() || rank + 1 != t {
            bad.push(format!("D = {d}: order {order}, cycles {}, 2-rank {rank}, t = {t}", cg.cycle_count()));
        }
    }
    Ok(SelftestCase::new("class groups against reduced cycles", n, bad))
}

/// Dyadic behaviour in `Q(√2, √α)` against local square classes.
pub fn sqrt2_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let mut n = 0;
    for a in (-21i64..=21).filter(|a| a % 2 != 0) {
        for b in -20i64..=20 {
            let alpha = Zsqrt2Elem::new(a, b);
            if alpha.is_square() {
                continue;
            }
            let fast = classify_sqrt2_behavior(&alpha)?;
            let slow = oracle::sqrt2_behavior_brute(&alpha);
            n += 1;
            if fast != slow {
                bad.push(format!("{alpha}: {fast:?} vs {slow:?}"));
            }
        }
    }
    Ok(SelftestCase::new("dyadic behaviour over Q(√2)", n, bad))
}

/// Kuroda's formula against the Minkowski-bound certificate on small fields.
pub fn kuroda_case() -> Result<SelftestCase> {
    let mut bad = Vec::new();
    let fields = [(2, 3), (2, 5), (3, 5)];
    for (m, k) in fields {
        let field = BiquadField::new(m, k)?;
        let kuroda = kuroda_class_number(&field, DEFAULT_DISC_BOUND)?;
        let mink = minkowski_class_number(&field)?;
        if kuroda.h != mink.h {
            bad.push(format!("{field}: Kuroda {} vs Minkowski {}", kuroda.h, mink.h));
        }
    }
    Ok(SelftestCase::new("Kuroda against Minkowski", fields.len(), bad))
}

/// The worked triple through the full pipeline.
pub fn worked_triple_case() -> Result<SelftestCase> {
    let rep = verify(Triple::new(41, 3, 43), &VerifyOptions::default())?;
    let bad = rep.first_failure().map(|f| vec![format!("(41, 3, 43) fails {f}")]).unwrap_or_default();
    Ok(SelftestCase::new("worked triple (41, 3, 43)", 1, bad))
}

pub fn run_all() -> Result<Vec<SelftestCase>> {
    Ok(vec![
        hilbert_q_case()?,
        quartic_case()?,
        rational_norm_case()?,
        norm_search_case()?,
        principal_case()?,
        unit_case()?,
        class_group_case(2000)?,
        sqrt2_case()?,
        kuroda_case()?,
        worked_triple_case()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_cases_pass() {
        for case in run_all().unwrap() {
            assert!(case.pass, "{case:?}");
        }
    }
}
