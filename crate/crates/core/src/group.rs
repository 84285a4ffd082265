//! Finite abelian groups given by generators and relations.
//!
//! Class groups are built from a black-box multiplication on class labels by
//! a polycyclic sweep: repeatedly adjoin an element outside the current
//! subgroup and record its first power that lands inside. The resulting
//! relation matrix is diagonalised by Smith normal form.

use std::collections::HashMap;
use std::hash::Hash;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Z^k` modulo the row lattice of `relations`.
#[derive(Clone, Debug)]
pub struct AbelianGroup {
    rank: usize,
    relations: Vec<Vec<i128>>,
    /// Smith diagonal, one entry per coordinate (1 for trivial factors).
    diag: Vec<i128>,
    /// Column transform: coordinates `v` map to `v * transform` in the diagonal basis.
    transform: Vec<Vec<i128>>,
}

/// Invariant factors `d_1 | d_2 | ...`, all greater than 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupStructure(pub Vec<u64>);

impl GroupStructure {
    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    /// Cyclic factors of the `ell`-Sylow subgroup, ascending.
    pub fn sylow(&self, ell: u64) -> Vec<u64> {
        self.0
            .iter()
            .map(|&d| {
                let mut d = d;
                let mut part = 1;
                while d % ell == 0 {
                    d /= ell;
                    part *= ell;
                }
                part
            })
            .filter(|&x| x > 1)
            .collect()
    }

    pub fn two_part(&self) -> Vec<u64> {
        self.sylow(2)
    }

    pub fn two_rank(&self) -> usize {
        self.0.iter().filter(|&&d| d % 2 == 0).count()
    }

    /// Text like `Z/2 x Z/4`, or `1` for the trivial group.
    pub fn describe(factors: &[u64]) -> String {
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
        }
    }
}

impl std::fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&GroupStructure::describe(&self.0))
    }
}

impl AbelianGroup {
    pub fn from_relations(rank: usize, relations: Vec<Vec<i128>>) -> Result<Self> {
        if relations.iter().any(|r| r.len() != rank) {
            return Err(Error::Internal("relation of wrong length".into()));
        }
        let (diag, transform) = smith_diagonal(rank, &relations);
        if diag.iter().any(|&d| d == 0) {
            return Err(Error::Internal("relations do not define a finite group".into()));
        }
        Ok(AbelianGroup { rank, relations, diag, transform })
    }

    pub fn trivial() -> Self {
        AbelianGroup { rank: 0, relations: vec![], diag: vec![], transform: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u64 {
        self.diag.iter().map(|&d| d as u64).product()
    }

    pub fn structure(&self) -> GroupStructure {
        let mut f: Vec<u64> = self.diag.iter().map(|&d| d as u64).filter(|&d| d > 1).collect();
        f.sort_unstable();
        GroupStructure(f)
    }

    fn diagonal_coords(&self, v: &[i128]) -> Vec<i128> {
        (0..self.rank)
            .map(|j| (0..self.rank).map(|i| v[i] * self.transform[i][j]).sum::<i128>())
            .collect()
    }

    /// Order of the element with coordinates `v`.
    pub fn element_order(&self, v: &[i128]) -> u64 {
        let w = self.diagonal_coords(v);
        let mut ord: i128 = 1;
        for (x, &d) in w.iter().zip(&self.diag) {
            let x = x.mod_floor(&d);
            let o = d / x.gcd(&d).max(1);
            let o = if x == 0 { 1 } else { o };
            ord = ord.lcm(&o);
        }
        ord as u64
    }

    pub fn is_identity(&self, v: &[i128]) -> bool {
        self.element_order(v) == 1
    }

    /// Quotient by the subgroup generated by `gens`.
    pub fn quotient(&self, gens: &[Vec<i128>]) -> Result<AbelianGroup> {
        let mut rel = self.relations.clone();
        rel.extend(gens.iter().cloned());
        AbelianGroup::from_relations(self.rank, rel)
    }
}

/// A finite abelian group together with the coordinates of every labelled element.
pub struct LabelledGroup<T> {
    pub group: AbelianGroup,
    pub coords: HashMap<T, Vec<i128>>,
}

impl<T: Clone + Eq + Hash> LabelledGroup<T> {
    /// Builds the group structure on `elements` from `mul` and `identity`.
    ///
    /// Uses one multiplication per element plus the power computations for
    /// each new generator.
    pub fn build<F>(identity: T, elements: &[T], mul: F) -> Result<Self>
    where
        F: Fn(&T, &T) -> Result<T>,
    {
        let mut coords: HashMap<T, Vec<usize>> = HashMap::new();
        let mut members: Vec<T> = vec![identity.clone()];
        coords.insert(identity.clone(), vec![]);
        let mut rel_orders: Vec<usize> = vec![];
        let mut rel_tails: Vec<Vec<usize>> = vec![];
        for x in elements {
            if coords.contains_key(x) {
                continue;
            }
            let k = rel_orders.len();
            // powers of x until one lands in the current subgroup
            let mut powers = vec![identity.clone(), x.clone()];
            let mut m = 1;
            let tail = loop {
                if let Some(c) = coords.get(&powers[m]) {
                    break c.clone();
                }
                let next = mul(&powers[m], x)?;
                powers.push(next);
                m += 1;
                if m > elements.len() + 1 {
                    return Err(Error::Internal("element of unbounded order".into()));
                }
            };
            for c in coords.values_mut() {
                c.push(0);
            }
            let old: Vec<T> = members.clone();
            for (j, xj) in powers.iter().enumerate().take(m).skip(1) {
                for h in &old {
                    let y = mul(xj, h)?;
                    let mut c = coords[h].clone();
                    c[k] = j;
                    if coords.insert(y.clone(), c).is_some() {
                        return Err(Error::Internal("multiplication is not a group law".into()));
                    }
                    members.push(y);
                }
            }
            rel_orders.push(m);
            let mut t = tail;
            t.resize(k, 0);
            rel_tails.push(t);
        }
        let k = rel_orders.len();
        let relations: Vec<Vec<i128>> = (0..k)
            .map(|i| {
                let mut r = vec![0i128; k];
                for (j, &t) in rel_tails[i].iter().enumerate() {
                    r[j] = -(t as i128);
                }
                r[i] = rel_orders[i] as i128;
                r
            })
            .collect();
        let group = AbelianGroup::from_relations(k, relations)?;
        let coords = coords
            .into_iter()
            .map(|(t, c)| {
                let mut v: Vec<i128> = c.into_iter().map(|x| x as i128).collect();
                v.resize(k, 0);
                (t, v)
            })
            .collect();
        Ok(LabelledGroup { group, coords })
    }

    pub fn coords_of(&self, x: &T) -> Result<&Vec<i128>> {
        self.coords.get(x).ok_or_else(|| Error::Internal("element not in group".into()))
    }
}

/// Smith normal form diagonal of the `rows x rank` matrix, with the column transform.
fn smith_diagonal(rank: usize, relations: &[Vec<i128>]) -> (Vec<i128>, Vec<Vec<i128>>) {
    let mut a: Vec<Vec<i128>> = relations.to_vec();
    let rows = a.len();
    let mut v: Vec<Vec<i128>> = (0..rank)
        .map(|i| (0..rank).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut diag = vec![0i128; rank];
    for t in 0..rank.min(rows) {
        loop {
            // smallest nonzero entry in the lower-right block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (diag, v);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = Integer::div_floor(&a[i][t], &p);
                if q != 0 {
                    for j in t..rank {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..rank {
                let q = Integer::div_floor(&a[t][j], &p);
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let bad = (t + 1..rows).find(|&i| (t + 1..rank).any(|j| a[i][j] % p != 0));
            if let Some(i) = bad {
                for j in t..rank {
                    let x = a[i][j];
                    a[t][j] += x;
                }
                continue;
            }
            diag[t] = p.abs();
            break;
        }
    }
    (diag, v)
}
