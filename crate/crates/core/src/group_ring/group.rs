//! Finite abelian groups as products of cyclic factors, including
//! G_S = (Z/S)^x with discrete-log tables.

use crate::arith::{self, pow_mod};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicFactor {
    pub order: u64,
    /// The prime l when the factor is (part of) (Z/l^k)^x.
    pub label: Option<u64>,
}

/// Unit group data for one prime power q = p^k dividing S.
#[derive(Clone, Debug, PartialEq, Eq)]
struct UnitsPart {
    q: u64,
    /// Factor indices in the group (one for odd p, up to two for p = 2).
    factors: Vec<usize>,
    /// Generators (residues mod q) matching `factors`.
    gens: Vec<u64>,
    /// dlog[r] = exponents of r mod q, or None for non-units.
    dlog: Vec<Option<[u32; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub factors: Vec<CyclicFactor>,
    strides: Vec<u64>,
    order: u64,
    modulus: Option<u64>,
    units: Vec<UnitsPart>,
}

impl AbelianGroup {
    pub fn from_factors(factors: Vec<CyclicFactor>) -> Self {
        let mut strides = Vec::with_capacity(factors.len());
        let mut acc = 1u64;
        for f in &factors {
            assert!(f.order >= 1);
            strides.push(acc);
            acc = acc.checked_mul(f.order).expect("group order overflow");
        }
        AbelianGroup { factors, strides, order: acc, modulus: None, units: Vec::new() }
    }

    pub fn from_orders(orders: &[u64]) -> Self {
        Self::from_factors(
            orders.iter().map(|&o| CyclicFactor { order: o, label: None }).collect(),
        )
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_orders(&[n])
    }

    /// G_S = (Z/S)^x. Odd l^k contributes one cyclic factor generated by the
    /// least primitive root; 2^k contributes factors generated by -1 and 5.
    pub fn units_mod(s: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidCurve("modulus must be positive".into()));
        }
        let mut factors = Vec::new();
        let mut parts = Vec::new();
        for (p, k) in arith::factor(s) {
            let q = p.pow(k);
            let mut part = UnitsPart { q, factors: Vec::new(), gens: Vec::new(), dlog: vec![None; q as usize] };
            if p == 2 {
                if k == 2 {
                    part.factors.push(factors.len());
                    part.gens.push(3);
                    factors.push(CyclicFactor { order: 2, label: Some(2) });
                } else if k >= 3 {
                    part.factors.push(factors.len());
                    part.gens.push(q - 1);
                    factors.push(CyclicFactor { order: 2, label: Some(2) });
                    part.factors.push(factors.len());
                    part.gens.push(5);
                    factors.push(CyclicFactor { order: q / 4, label: Some(2) });
                }
                // k == 1: trivial group, no factor
            } else {
                let g = arith::primitive_root(p, k);
                part.factors.push(factors.len());
                part.gens.push(g);
                factors.push(CyclicFactor { order: q / p * (p - 1), label: Some(p) });
            }
            // discrete log table
            let orders: Vec<u64> = part.factors.iter().map(|&i| factors[i].order).collect();
            match orders.len() {
                0 => part.dlog[1 % q as usize] = Some([0, 0]),
                1 => {
                    let mut x = 1 % q;
                    for j in 0..orders[0] {
                        part.dlog[x as usize] = Some([j as u32, 0]);
                        x = x * part.gens[0] % q;
                    }
                }
                _ => {
                    let mut x0 = 1 % q;
                    for j0 in 0..orders[0] {
                        let mut x = x0;
                        for j1 in 0..orders[1] {
                            part.dlog[x as usize] = Some([j0 as u32, j1 as u32]);
                            x = x * part.gens[1] % q;
                        }
                        x0 = x0 * part.gens[0] % q;
                    }
                }
            }
            parts.push(part);
        }
        let mut g = Self::from_factors(factors);
        g.modulus = Some(s);
        g.units = parts;
        Ok(g)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn orders(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.order).collect()
    }

    pub fn exps(&self, idx: usize) -> Vec<u64> {
        let idx = idx as u64;
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(f, s)| idx / s % f.order)
            .collect()
    }

    pub fn index(&self, exps: &[u64]) -> usize {
        exps.iter()
            .zip(&self.factors)
            .zip(&self.strides)
            .map(|((e, f), s)| (e % f.order) * s)
            .sum::<u64>() as usize
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        let (ea, eb) = (self.exps(a), self.exps(b));
        let e: Vec<u64> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
        self.index(&e)
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        let e: Vec<u64> = self
            .exps(a)
            .iter()
            .zip(&self.factors)
            .map(|(x, f)| (f.order - x) % f.order)
            .collect();
        self.index(&e)
    }

    pub fn pow_idx(&self, a: usize, k: i64) -> usize {
        let e: Vec<u64> = self
            .exps(a)
            .iter()
            .zip(&self.factors)
            .map(|(x, f)| {
                let o = f.order as i128;
                ((*x as i128 * k as i128).rem_euclid(o)) as u64
            })
            .collect();
        self.index(&e)
    }

    /// The i-th factor generator.
    pub fn generator(&self, i: usize) -> usize {
        self.strides[i] as usize % self.order.max(1) as usize
    }

    /// Order of an element.
    pub fn element_order(&self, a: usize) -> u64 {
        self.exps(a)
            .iter()
            .zip(&self.factors)
            .map(|(x, f)| f.order / arith::gcd_u(*x, f.order))
            .fold(1, arith::lcm_u)
    }

    /// Factor index of the cyclic group (Z/l^k)^x for odd l.
    pub fn factor_for_prime(&self, l: u64) -> Option<usize> {
        self.factors.iter().position(|f| f.label == Some(l))
    }

    /// Element of G_S corresponding to a residue coprime to S.
    pub fn index_of_residue(&self, a: i64) -> Option<usize> {
        let s = self.modulus? as i64;
        let mut exps = vec![0u64; self.factors.len()];
        for part in &self.units {
            let r = a.rem_euclid(part.q as i64) as usize;
            let e = part.dlog[r]?;
            for (k, &fi) in part.factors.iter().enumerate() {
                exps[fi] = e[k] as u64;
            }
        }
        if arith::gcd(a.rem_euclid(s), s) != 1 && s != 1 {
            return None;
        }
        Some(self.index(&exps))
    }

    /// Residue mod S of an element of G_S (by CRT).
    pub fn residue_of_index(&self, idx: usize) -> Option<u64> {
        let s = self.modulus?;
        let exps = self.exps(idx);
        let mut acc = 0u64;
        let mut m = 1u64;
        for part in &self.units {
            let mut r = 1 % part.q;
            for (k, &fi) in part.factors.iter().enumerate() {
                r = r * pow_mod(part.gens[k], exps[fi], part.q) % part.q;
            }
            // combine acc mod m with r mod q
            let q = part.q;
            let inv = arith::mod_inv(m as i64 % q as i64, q as i64).unwrap_or(0) as u64;
            let diff = (r + q - acc % q) % q;
            let t = arith::mul_mod(diff, inv, q);
            acc += m * t;
            m *= q;
        }
        Some(acc % s.max(1))
    }

    /// All residues in [1, S) coprime to S, in index order.
    pub fn residues(&self) -> Option<Vec<u64>> {
        (0..self.order as usize).map(|i| self.residue_of_index(i)).collect()
    }

    /// p-Sylow quotient K = prod Z/p^{v_p(n_i)} together with the projection
    /// of indices G -> K (factor labels are kept).
    pub fn p_sylow_quotient(&self, p: u64) -> (AbelianGroup, Vec<usize>) {
        let kf: Vec<CyclicFactor> = self
            .factors
            .iter()
            .map(|f| CyclicFactor {
                order: p.pow(arith::valuation(f.order, p)),
                label: f.label,
            })
            .collect();
        let k = AbelianGroup::from_factors(kf);
        let map = (0..self.order as usize)
            .map(|i| {
                let e = self.exps(i);
                k.index(&e)
            })
            .collect();
        (k, map)
    }

    /// The map G_S -> G_T induced by reduction mod T for T | S.
    pub fn reduction_map(&self, target: &AbelianGroup) -> Result<Vec<usize>> {
        let t = match (self.modulus, target.modulus) {
            (Some(s), Some(t)) if s % t == 0 => t,
            _ => return Err(Error::GroupMismatch("reduction needs T | S".into())),
        };
        (0..self.order as usize)
            .map(|i| {
                let r = self.residue_of_index(i).unwrap();
                target
                    .index_of_residue((r % t) as i64)
                    .ok_or_else(|| Error::GroupMismatch("residue not a unit".into()))
            })
            .collect()
    }

    /// For G_S: (p, k, factor indices) for each p^k || S.
    pub fn prime_parts(&self) -> Vec<(u64, u32, Vec<usize>)> {
        self.units
            .iter()
            .map(|u| {
                let (p, k) = arith::factor(u.q)[0];
                (p, k, u.factors.clone())
            })
            .collect()
    }

    /// Exponent of the group (lcm of factor orders).
    pub fn exponent(&self) -> u64 {
        self.factors.iter().map(|f| f.order).fold(1, arith::lcm_u)
    }

    pub fn is_same(&self, other: &AbelianGroup) -> bool {
        self.factors == other.factors && self.modulus == other.modulus
    }
}
