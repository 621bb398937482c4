//! Characters of finite abelian groups, with Dirichlet conventions on G_S.

use super::element::IntegralElement;
use super::group::AbelianGroup;
use crate::arith;
use crate::precise::{Complex, Real};
use num_traits::Zero;
use std::sync::Arc;

/// chi(g_i) = zeta_{n_i}^{e_i} on the factor generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub group: Arc<AbelianGroup>,
    pub exps: Vec<u64>,
}

impl Character {
    pub fn new(group: Arc<AbelianGroup>, exps: Vec<u64>) -> Self {
        assert_eq!(exps.len(), group.rank());
        let exps = exps.iter().zip(group.orders()).map(|(e, n)| e % n).collect();
        Character { group, exps }
    }

    pub fn trivial(group: Arc<AbelianGroup>) -> Self {
        let r = group.rank();
        Character::new(group, vec![0; r])
    }

    /// All characters of the group.
    pub fn all(group: &Arc<AbelianGroup>) -> Vec<Character> {
        let dual = AbelianGroup::from_orders(&group.orders());
        (0..dual.order() as usize)
            .map(|i| Character::new(group.clone(), dual.exps(i)))
            .collect()
    }

    /// chi(g) = exp(2 pi i k / L) with L the group exponent; returns k.
    pub fn angle(&self, idx: usize) -> u64 {
        let l = self.group.exponent();
        let x = self.group.exps(idx);
        let mut k = 0u128;
        for ((e, xi), n) in self.exps.iter().zip(&x).zip(self.group.orders()) {
            k += (*e as u128) * (*xi as u128) * (l / n) as u128;
        }
        (k % l as u128) as u64
    }

    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.group.orders())
            .map(|(e, n)| n / arith::gcd_u(*e, n))
            .fold(1, arith::lcm_u)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn conj(&self) -> Character {
        let exps = self.exps.iter().zip(self.group.orders()).map(|(e, n)| (n - e) % n).collect();
        Character { group: self.group.clone(), exps }
    }

    pub fn value(&self, idx: usize, prec: usize) -> Complex {
        Complex::root_of_unity(self.angle(idx) as i64, self.group.exponent(), prec)
    }

    /// chi(a) for an integer a, zero when gcd(a, S) > 1.
    pub fn value_at(&self, a: i64, prec: usize) -> Complex {
        match self.group.index_of_residue(a) {
            Some(i) => self.value(i, prec),
            None => Complex::zero(prec),
        }
    }

    /// chi(-1) as +1 or -1.
    pub fn parity(&self) -> i64 {
        let m = self.group.index_of_residue(-1).expect("character of G_S");
        if self.angle(m) == 0 {
            1
        } else {
            -1
        }
    }

    /// Conductor of a Dirichlet character of G_S.
    pub fn conductor(&self) -> u64 {
        let mut f = 1u64;
        for (p, k, idxs) in self.group.prime_parts() {
            let ord_on = |i: usize| {
                let n = self.group.factors[i].order;
                n / arith::gcd_u(self.exps[i], n)
            };
            if p != 2 {
                let o = ord_on(idxs[0]);
                if o > 1 {
                    f *= p.pow(1 + arith::valuation(o, p));
                }
            } else if k == 2 {
                if ord_on(idxs[0]) > 1 {
                    f *= 4;
                }
            } else if k >= 3 {
                let o5 = ord_on(idxs[1]);
                if o5 > 1 {
                    f *= 1 << (2 + arith::valuation(o5, 2));
                } else if ord_on(idxs[0]) > 1 {
                    f *= 4;
                }
            }
        }
        f
    }

    pub fn is_primitive(&self) -> bool {
        self.group.modulus() == Some(self.conductor())
    }

    /// sum_{a in (Z/S)^x} chi(a) exp(2 pi i a / S).
    pub fn gauss_sum(&self, prec: usize) -> Complex {
        let s = self.group.modulus().expect("character of G_S");
        let mut acc = Complex::zero(prec);
        let res = self.group.residues().expect("G_S");
        for (i, &a) in res.iter().enumerate() {
            let z = Complex::root_of_unity(a as i64, s, prec);
            acc = &acc + &(&self.value(i, prec) * &z);
        }
        acc
    }

    /// chi applied to a group ring element.
    pub fn evaluate(&self, x: &IntegralElement, prec: usize) -> Complex {
        let l = self.group.exponent();
        // bucket coefficients by angle first
        let mut buckets = vec![num_bigint::BigInt::zero(); l as usize];
        for (i, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                buckets[self.angle(i) as usize] += c;
            }
        }
        let mut acc = Complex::zero(prec);
        for (k, c) in buckets.iter().enumerate() {
            if !c.is_zero() {
                let z = Complex::root_of_unity(k as i64, l, prec);
                acc = &acc + &z.scale(&Real::from_bigint(c, prec));
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precise::bits_for_digits;

    #[test]
    fn conductors_mod_40() {
        let g = Arc::new(AbelianGroup::units_mod(40).unwrap());
        let chars = Character::all(&g);
        assert_eq!(chars.len(), 16);
        let mut counts = std::collections::BTreeMap::new();
        for c in &chars {
            *counts.entry(c.conductor()).or_insert(0) += 1;
        }
        // primitive counts: f=1:1, 4:1, 5:3, 8:2, 20:3, 40:6
        let want: Vec<(u64, i32)> = vec![(1, 1), (4, 1), (5, 3), (8, 2), (20, 3), (40, 6)];
        assert_eq!(counts.into_iter().collect::<Vec<_>>(), want);
    }

    #[test]
    fn gauss_sum_abs_primitive() {
        let prec = bits_for_digits(30);
        for s in [5u64, 7, 8, 9, 12, 13] {
            let g = Arc::new(AbelianGroup::units_mod(s).unwrap());
            for c in Character::all(&g) {
                if c.is_primitive() {
                    let a = c.gauss_sum(prec).norm_sqr().to_f64();
                    assert!((a - s as f64).abs() < 1e-20, "s {s}");
                }
            }
        }
    }

    #[test]
    fn quadratic_mod_5_parity() {
        let g = Arc::new(AbelianGroup::units_mod(5).unwrap());
        let c = Character::new(g, vec![2]);
        assert_eq!(c.order(), 2);
        assert_eq!(c.parity(), 1);
        let p = bits_for_digits(20);
        assert!((c.value_at(4, p).re.to_f64() - 1.0).abs() < 1e-15);
        assert!((c.value_at(2, p).re.to_f64() + 1.0).abs() < 1e-15);
    }
}
