use std::collections::HashMap;

use crate::arith::{factor_u64, isqrt_u64, primes_up_to};
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GroupStructure, LabelledGroup};

use super::form::{compose_small, isqrt_i128, reduce_small, Form};
use super::{fundamental_unit, reduce, BinaryQuadForm, FundamentalUnit, QuadDiscriminant};

pub const DEFAULT_DISC_BOUND: u64 = 1_000_000_000;
/// Beyond this the machine-word form arithmetic is no longer safe.
pub const HARD_DISC_LIMIT: u64 = 1_000_000_000_000;
const MAX_CLASSES: usize = 1 << 20;

/// Narrow and wide class groups of `Q(√D)` with the data used to compute them.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    disc: QuadDiscriminant,
    reduced_count: usize,
    /// One reduced representative with positive first coefficient per cycle.
    reps: Vec<Form>,
    cycle_of: HashMap<Form, usize>,
    principal: usize,
    narrow: AbelianGroup,
    coords: Vec<Vec<i128>>,
    generators: Vec<usize>,
    kernel: Vec<i128>,
    wide: AbelianGroup,
    unit: FundamentalUnit,
}

impl ClassGroup {
    pub fn compute(disc: &QuadDiscriminant, bound: u64) -> Result<ClassGroup> {
        let d = disc.get();
        let bound = bound.min(HARD_DISC_LIMIT);
        if d > bound {
            return Err(Error::DiscriminantBound { disc: d.to_string(), bound: bound.to_string() });
        }
        let forms = reduced_forms(d)?;
        let reduced_count = forms.len();
        let di = d as i128;
        let s = isqrt_i128(di);
        let mut cycle_of: HashMap<Form, usize> = HashMap::with_capacity(forms.len());
        let mut reps = vec![];
        for f in &forms {
            if cycle_of.contains_key(f) {
                continue;
            }
            let id = reps.len();
            let mut cur = *f;
            let mut rep = *f;
            loop {
                cycle_of.insert(cur, id);
                if cur.a > 0 && (rep.a < 0 || cur < rep) {
                    rep = cur;
                }
                cur = cur.rho(di, s);
                if cur == *f {
                    break;
                }
                if cycle_of.contains_key(&cur) {
                    return Err(Error::Internal(format!("reduced cycles overlap for D = {d}")));
                }
            }
            reps.push(rep);
            if reps.len() > MAX_CLASSES {
                return Err(Error::ClassGroupTooLarge(reps.len()));
            }
        }
        let b0 = if (s - di) % 2 == 0 { s } else { s - 1 };
        let principal_form = Form { a: 1, b: b0, c: (b0 * b0 - di) / 4 };
        let principal = *cycle_of
            .get(&reduce_small(principal_form))
            .ok_or_else(|| Error::Internal("principal form missing".into()))?;
        let ids: Vec<usize> = (0..reps.len()).collect();
        let mul = |i: &usize, j: &usize| -> Result<usize> {
            let f = reduce_small(compose_small(reps[*i], reps[*j])?);
            cycle_of.get(&f).copied().ok_or_else(|| Error::Internal(format!("composite {f:?} not reduced")))
        };
        let labelled = LabelledGroup::build(principal, &ids, mul)?;
        let mut coords = vec![vec![]; reps.len()];
        for (id, c) in &labelled.coords {
            coords[*id] = c.clone();
        }
        let generators = generator_ids(&labelled, reps.len());
        let narrow = labelled.group;
        let unit = fundamental_unit(disc)?;
        let mut cg = ClassGroup {
            disc: disc.clone(),
            reduced_count,
            reps,
            cycle_of,
            principal,
            wide: narrow.clone(),
            narrow,
            coords,
            generators,
            kernel: vec![],
            unit,
        };
        // class of ⟨√m⟩ as the product of the ramified primes dividing the radicand
        let mut k = cg.principal;
        for ell in factor_u64(disc.radicand())?.into_iter().map(|(p, _)| p) {
            let f = cg.prime_form_small(ell)?;
            k = cg.mul(k, cg.class_of_small(f)?)?;
        }
        let kernel_trivial = k == cg.principal;
        if kernel_trivial != (cg.unit.unit_norm == -1) {
            return Err(Error::Internal(format!(
                "class of ⟨√D⟩ trivial = {kernel_trivial} but unit norm {} for D = {d}",
                cg.unit.unit_norm
            )));
        }
        cg.kernel = cg.coords[k].clone();
        cg.wide = cg.narrow.quotient(std::slice::from_ref(&cg.kernel))?;
        Ok(cg)
    }

    pub fn discriminant(&self) -> &QuadDiscriminant {
        &self.disc
    }

    /// Number of reduced forms of discriminant `D`.
    pub fn reduced_form_count(&self) -> usize {
        self.reduced_count
    }

    /// Number of reduced cycles, i.e. the narrow class number.
    pub fn cycle_count(&self) -> usize {
        self.reps.len()
    }

    pub fn narrow(&self) -> &AbelianGroup {
        &self.narrow
    }

    pub fn wide(&self) -> &AbelianGroup {
        &self.wide
    }

    pub fn narrow_structure(&self) -> GroupStructure {
        self.narrow.structure()
    }

    pub fn wide_structure(&self) -> GroupStructure {
        self.wide.structure()
    }

    pub fn unit(&self) -> &FundamentalUnit {
        &self.unit
    }

    pub fn principal_form(&self) -> BinaryQuadForm {
        self.reps[self.principal].to_big()
    }

    /// Forms whose classes generate the narrow class group.
    pub fn generator_forms(&self) -> Vec<BinaryQuadForm> {
        self.generators.iter().map(|&i| self.reps[i].to_big()).collect()
    }

    /// Representative forms of all narrow classes, principal first.
    pub fn class_representatives(&self) -> Vec<BinaryQuadForm> {
        let mut out = vec![self.reps[self.principal].to_big()];
        out.extend((0..self.reps.len()).filter(|&i| i != self.principal).map(|i| self.reps[i].to_big()));
        out
    }

    fn mul(&self, i: usize, j: usize) -> Result<usize> {
        self.class_of_small(compose_small(self.reps[i], self.reps[j])?)
    }

    fn class_of_small(&self, f: Form) -> Result<usize> {
        if f.disc() != self.disc.get() as i128 {
            return Err(Error::DiscriminantMismatch(format!("{f:?} vs {}", self.disc)));
        }
        let g = reduce_small(f);
        self.cycle_of.get(&g).copied().ok_or_else(|| Error::Internal(format!("{g:?} not enumerated")))
    }

    /// Narrow class index of an arbitrary form of discriminant `D`.
    pub fn class_of(&self, f: &BinaryQuadForm) -> Result<usize> {
        let g = reduce(f)?.to_small()?;
        self.class_of_small(g)
    }

    pub fn narrow_coords(&self, f: &BinaryQuadForm) -> Result<Vec<i128>> {
        Ok(self.coords[self.class_of(f)?].clone())
    }

    /// Order of the narrow class of `f` in the wide class group.
    pub fn wide_order_of(&self, f: &BinaryQuadForm) -> Result<u64> {
        Ok(self.wide.element_order(&self.narrow_coords(f)?))
    }

    pub fn narrow_order_of(&self, f: &BinaryQuadForm) -> Result<u64> {
        Ok(self.narrow.element_order(&self.narrow_coords(f)?))
    }

    /// Whether `f` lies in the kernel of narrow → wide.
    pub fn is_wide_principal(&self, f: &BinaryQuadForm) -> Result<bool> {
        Ok(self.wide_order_of(f)? == 1)
    }

    /// Whether `f` is in the principal narrow class.
    pub fn is_narrow_principal(&self, f: &BinaryQuadForm) -> Result<bool> {
        Ok(self.class_of(f)? == self.principal)
    }

    fn prime_form_small(&self, ell: u64) -> Result<Form> {
        let d = self.disc.get() as i128;
        let l = ell as i128;
        if self.disc.kronecker(ell) == -1 {
            return Err(Error::InertPrime { ell, disc: self.disc.to_string() });
        }
        let b = if d % l == 0 && ell != 2 {
            if d % 2 == 0 { 0 } else { l }
        } else {
            (0..2 * l)
                .find(|b| (b * b - d).rem_euclid(4 * l) == 0)
                .ok_or_else(|| Error::InertPrime { ell, disc: self.disc.to_string() })?
        };
        Ok(Form { a: l, b, c: (b * b - d) / (4 * l) })
    }

    /// A form `(ℓ, b, c)` representing a prime ideal above `ℓ`.
    pub fn prime_form(&self, ell: u64) -> Result<BinaryQuadForm> {
        Ok(self.prime_form_small(ell)?.to_big())
    }

    /// Order in the wide class group of a prime ideal above `ℓ`.
    pub fn ideal_class_order(&self, ell: u64) -> Result<u64> {
        self.wide_order_of(&self.prime_form(ell)?)
    }

    /// The form `(-1, b0, (D - b0^2)/4)` representing principal ideals with a
    /// generator of negative norm.
    pub fn negative_principal_form(&self) -> BinaryQuadForm {
        let d = self.disc.get() as i128;
        let s = isqrt_i128(d);
        let b0 = if (s - d) % 2 == 0 { s } else { s - 1 };
        BinaryQuadForm::new(-1, b0, (d - b0 * b0) / 4)
    }

    /// Narrow class of `⟨√D⟩` used as the narrow → wide kernel generator.
    pub fn kernel_coords(&self) -> &[i128] {
        &self.kernel
    }
}

fn generator_ids(g: &LabelledGroup<usize>, n: usize) -> Vec<usize> {
    // the k-th polycyclic generator has coordinates e_k
    let rank = g.group.rank();
    let mut out = vec![usize::MAX; rank];
    for (id, c) in &g.coords {
        let nonzero: Vec<usize> = (0..rank).filter(|&i| c[i] != 0).collect();
        if nonzero.len() == 1 && c[nonzero[0]] == 1 {
            out[nonzero[0]] = *id;
        }
    }
    debug_assert!(out.iter().all(|&i| i < n));
    out
}

/// All reduced forms of discriminant `d`, sorted.
fn reduced_forms(d: u64) -> Result<Vec<Form>> {
    let s = isqrt_u64(d);
    let primes = primes_up_to(isqrt_u64(d / 4) + 1);
    let mut out = vec![];
    let mut b = if (s % 2) == (d % 2) { s } else { s - 1 };
    while b >= 1 {
        let n = (d - b * b) / 4;
        let lo = (s + 1 - b).div_ceil(2);
        let hi = (s + b) / 2;
        for a in divisors_in_range(n, &primes, lo, hi) {
            let c = (n / a) as i128;
            out.push(Form { a: a as i128, b: b as i128, c: -c });
            out.push(Form { a: -(a as i128), b: b as i128, c });
        }
        if b < 2 {
            break;
        }
        b -= 2;
    }
    out.retain(|f| gcd3(f.a, f.b, f.c) == 1);
    out.sort();
    Ok(out)
}

fn gcd3(a: i128, b: i128, c: i128) -> i128 {
    use num_integer::Integer;
    a.gcd(&b).gcd(&c)
}

fn divisors_in_range(mut n: u64, primes: &[u64], lo: u64, hi: u64) -> Vec<u64> {
    if n == 0 || lo > hi {
        return vec![];
    }
    let mut fac: Vec<(u64, u32)> = vec![];
    for &p in primes {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            fac.push((p, e));
        }
    }
    if n > 1 {
        fac.push((n, 1));
    }
    let mut divs = vec![1u64];
    for (p, e) in fac {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                let v = divs[i] * pk;
                if v <= hi {
                    divs.push(v);
                }
            }
        }
    }
    divs.retain(|&x| x >= lo && x <= hi);
    divs
}

/// Narrow class group with the default discriminant bound.
pub fn narrow_class_group(d: &QuadDiscriminant) -> Result<ClassGroup> {
    ClassGroup::compute(d, DEFAULT_DISC_BOUND)
}

/// 2-Sylow subgroup of the wide class group.
pub fn wide_class_group_2part(d: &QuadDiscriminant) -> Result<GroupStructure> {
    Ok(GroupStructure(narrow_class_group(d)?.wide_structure().two_part()))
}

/// Order of a prime ideal above `ℓ` in the wide class group.
pub fn ideal_class_order(ell: u64, d: &QuadDiscriminant) -> Result<u64> {
    narrow_class_group(d)?.ideal_class_order(ell)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cg(d: u64) -> ClassGroup {
        narrow_class_group(&QuadDiscriminant::new(d).unwrap()).unwrap()
    }

    #[test]
    fn small_examples() {
        assert!(cg(5).narrow_structure().is_trivial());
        assert!(cg(8).wide_structure().is_trivial());
        assert_eq!(cg(12).narrow_structure().0, vec![2]);
        assert!(cg(12).wide_structure().is_trivial());
        assert_eq!(cg(40).narrow_structure().0, vec![2]);
        assert_eq!(cg(40).wide_structure().0, vec![2]);
    }

    #[test]
    fn worked_discriminants() {
        let k = cg(5289);
        assert_eq!(k.narrow_structure().two_part(), vec![2, 2]);
        assert_eq!(k.wide_structure().two_part(), vec![2]);
        assert_eq!(k.ideal_class_order(2).unwrap(), 1);
        let f = cg(42312);
        assert_eq!(f.narrow_structure().two_rank(), 3);
        assert_eq!(f.wide_structure().two_part(), vec![2, 2]);
        assert_eq!(f.ideal_class_order(3).unwrap(), 2);
        assert_eq!(f.ideal_class_order(41).unwrap(), 2);
        assert_eq!(f.ideal_class_order(43).unwrap(), 2);
    }

    #[test]
    fn inert_prime_rejected() {
        let k = cg(5289);
        assert!(matches!(k.ideal_class_order(13), Err(Error::InertPrime { .. })));
    }

    #[test]
    fn bound_enforced() {
        let d = QuadDiscriminant::new(5289).unwrap();
        assert!(matches!(ClassGroup::compute(&d, 1000), Err(Error::DiscriminantBound { .. })));
    }

    #[test]
    fn negative_principal_matches_kernel() {
        for d in [12u64, 21, 24, 28, 33, 44, 56, 60, 77, 5289, 42312] {
            let g = cg(d);
            let f = g.negative_principal_form();
            assert_eq!(g.narrow_coords(&f).unwrap().as_slice(), g.kernel_coords(), "D = {d}");
        }
    }
}
