use super::group::AbelianGroup;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{NumAssign, One};
use std::fmt::Debug;
use std::ops::Neg;
use std::sync::Arc;

pub trait Coeff: Clone + Debug + PartialEq + NumAssign + Neg<Output = Self> + Send + Sync {}
impl<T: Clone + Debug + PartialEq + NumAssign + Neg<Output = Self> + Send + Sync> Coeff for T {}

/// Element of the group ring C[G], stored densely by group index.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRingElement<C> {
    pub group: Arc<AbelianGroup>,
    pub coeffs: Vec<C>,
}

pub type IntegralElement = GroupRingElement<BigInt>;
pub type RationalElement = GroupRingElement<BigRational>;

impl<C: Coeff> GroupRingElement<C> {
    pub fn zero(group: Arc<AbelianGroup>) -> Self {
        let n = group.order() as usize;
        GroupRingElement { group, coeffs: vec![C::zero(); n] }
    }

    pub fn delta(group: Arc<AbelianGroup>, idx: usize) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[idx] = C::one();
        e
    }

    pub fn one(group: Arc<AbelianGroup>) -> Self {
        Self::delta(group, 0)
    }

    pub fn from_coeffs(group: Arc<AbelianGroup>, coeffs: Vec<C>) -> Self {
        assert_eq!(coeffs.len(), group.order() as usize);
        GroupRingElement { group, coeffs }
    }

    /// sum_{j < n} f(j) g^j for a group element g.
    pub fn from_powers(group: Arc<AbelianGroup>, g: usize, weights: &[C]) -> Self {
        let mut e = Self::zero(group.clone());
        let mut x = group.identity();
        for w in weights {
            e.coeffs[x] += w.clone();
            x = group.mul_idx(x, g);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &o.group) || self.group.is_same(&o.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch("operands live in different group rings".into()))
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b.clone();
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a -= b.clone();
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> GroupRingElement<D> {
        GroupRingElement { group: self.group.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        let g = &self.group;
        let mut out = Self::zero(g.clone());
        let nz: Vec<usize> = (0..o.coeffs.len()).filter(|&j| !o.coeffs[j].is_zero()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &j in &nz {
                let k = g.mul_idx(i, j);
                out.coeffs[k] += a.clone() * o.coeffs[j].clone();
            }
        }
        Ok(out)
    }

    /// Multiplication by a group element.
    pub fn shift(&self, h: usize) -> Self {
        let g = &self.group;
        let mut out = Self::zero(g.clone());
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                out.coeffs[g.mul_idx(i, h)] = a.clone();
            }
        }
        out
    }

    pub fn augmentation(&self) -> C {
        self.coeffs.iter().fold(C::zero(), |acc, c| acc + c.clone())
    }

    /// The involution g -> g^{-1}.
    pub fn involution(&self) -> Self {
        let g = &self.group;
        let mut out = Self::zero(g.clone());
        for (i, a) in self.coeffs.iter().enumerate() {
            out.coeffs[g.inv_idx(i)] = a.clone();
        }
        out
    }

    /// Push forward along an index map G -> H.
    pub fn pushforward(&self, target: Arc<AbelianGroup>, map: &[usize]) -> Self {
        let mut out = Self::zero(target);
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                out.coeffs[map[i]] += a.clone();
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one(self.group.clone());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

impl RationalElement {
    /// Least common denominator of the coefficients.
    pub fn denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// (D, D * self) with D the least common denominator.
    pub fn clear_denominators(&self) -> (BigInt, IntegralElement) {
        let d = self.denominator();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(d.clone())).to_integer())
            .collect();
        (d, GroupRingElement { group: self.group.clone(), coeffs })
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

impl IntegralElement {
    pub fn to_rational(&self) -> RationalElement {
        self.map(|c| BigRational::from_integer(c.clone()))
    }
}

/// g - 1 for a group element g.
pub fn minus_one<C: Coeff>(group: Arc<AbelianGroup>, g: usize) -> GroupRingElement<C> {
    let mut e = GroupRingElement::<C>::delta(group, g);
    e.coeffs[0] -= C::one();
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_axioms_small() {
        let g = Arc::new(AbelianGroup::from_orders(&[2, 3]));
        let a = IntegralElement::from_coeffs(g.clone(), (0..6).map(BigInt::from).collect());
        let b = IntegralElement::from_coeffs(g.clone(), (0..6).map(|i| BigInt::from(i * i - 3)).collect());
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, b.mul(&a).unwrap());
        assert_eq!(ab.augmentation(), a.augmentation() * b.augmentation());
        assert_eq!(a.involution().involution(), a);
        assert_eq!(ab.involution(), a.involution().mul(&b.involution()).unwrap());
    }

    #[test]
    fn mismatched_groups_rejected() {
        let g1 = Arc::new(AbelianGroup::cyclic(3));
        let g2 = Arc::new(AbelianGroup::cyclic(4));
        let a = IntegralElement::one(g1);
        let b = IntegralElement::one(g2);
        assert!(a.add(&b).is_err());
    }
}
