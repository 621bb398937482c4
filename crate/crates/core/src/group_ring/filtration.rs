//! Powers of the augmentation ideal via Taylor coordinates.
//!
//! With y_i = g_i - 1 for the factor generators, Z[G] = Z[y]/(f_i) where
//! f_i = (1 + y_i)^{n_i} - 1, and I = (y). Hence Z[G]/I^t is the quotient of
//! the free module on monomials of degree < t by the truncations of
//! f_i y^delta, |delta| <= t - 2. The Taylor coordinate of sum c_g g at y^k
//! is sum_g c_g prod_i C(j_i(g), k_i).

use super::element::IntegralElement;
use super::group::AbelianGroup;
use crate::linalg::integer::{Hnf, Smith, ZVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex, OnceLock};

/// Monomials in `r` variables of total degree < t, graded then lexicographic.
pub fn monomials_below(r: usize, t: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..t {
        let mut cur = vec![0u32; r];
        push_degree(&mut out, &mut cur, 0, deg as u32);
    }
    out
}

fn push_degree(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == cur.len() - 1 {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[i] = k;
        push_degree(out, cur, i + 1, left - k);
    }
    cur[i] = 0;
}

pub(crate) fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Rows f_i y^delta truncated to degree < t, over the monomial basis of `monomials_below`.
pub fn relations_for(orders: &[u64], t: usize) -> Vec<ZVec> {
    let monomials = monomials_below(orders.len(), t);
    let mono_index: HashMap<Vec<u32>, usize> =
        monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let m = monomials.len();
    let mut relations = Vec::new();
    if t >= 2 {
        for (i, &n) in orders.iter().enumerate() {
            for delta in monomials.iter().filter(|d| d.iter().sum::<u32>() as usize <= t - 2) {
                let mut row = vec![BigInt::zero(); m];
                let deg = delta.iter().sum::<u32>() as usize;
                for k in 1..(t - deg) {
                    let mut mono = delta.clone();
                    mono[i] += k as u32;
                    let c = binomial_big(n, k as u64);
                    if !c.is_zero() {
                        row[mono_index[&mono]] += c;
                    }
                }
                relations.push(row);
            }
        }
    }
    relations
}

/// Presentation of Z[G]/I^t for G = prod Z/n_i (trivial factors dropped).
#[derive(Debug)]
pub struct TaylorPresentation {
    pub orders: Vec<u64>,
    pub t: usize,
    pub monomials: Vec<Vec<u32>>,
    pub mono_index: HashMap<Vec<u32>, usize>,
    pub relations: Vec<ZVec>,
    pub smith: Smith,
}

impl TaylorPresentation {
    pub fn new(orders: &[u64], t: usize) -> Self {
        let r = orders.len();
        let monomials = monomials_below(r, t);
        let mono_index: HashMap<Vec<u32>, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let m = monomials.len();
        let relations = relations_for(orders, t);
        let smith = Smith::new(relations.clone(), m);
        TaylorPresentation { orders: orders.to_vec(), t, monomials, mono_index, relations, smith }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    /// Invariant factors of Z[G]/I^t (0 for a free summand).
    pub fn invariants(&self) -> Vec<BigInt> {
        self.smith.quotient_invariants()
    }

    /// Taylor coordinates of x for monomials of degree < t.
    pub fn coordinates(&self, group: &AbelianGroup, x: &IntegralElement) -> ZVec {
        let nontrivial: Vec<usize> =
            (0..group.rank()).filter(|&i| group.factors[i].order > 1).collect();
        assert_eq!(
            nontrivial.iter().map(|&i| group.factors[i].order).collect::<Vec<_>>(),
            self.orders,
            "presentation built for a different group"
        );
        let t = self.t as u64;
        // binomial tables C(j, k) for j < n_i, k < t
        let tables: Vec<Vec<Vec<BigInt>>> = self
            .orders
            .iter()
            .map(|&n| {
                (0..n)
                    .map(|j| (0..t).map(|k| binomial_big(j, k)).collect())
                    .collect()
            })
            .collect();
        let mut out = vec![BigInt::zero(); self.dim()];
        for (idx, c) in x.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let exps = group.exps(idx);
            let js: Vec<usize> = nontrivial.iter().map(|&i| exps[i] as usize).collect();
            for (mi, mono) in self.monomials.iter().enumerate() {
                let mut prod = c.clone();
                for (v, &k) in mono.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    let b = &tables[v][js[v]][k as usize];
                    if b.is_zero() {
                        prod = BigInt::zero();
                        break;
                    }
                    prod *= b;
                }
                if !prod.is_zero() {
                    out[mi] += prod;
                }
            }
        }
        out
    }
}

type PresKey = (Vec<u64>, usize);

static PRESENTATIONS: LazyLock<Mutex<HashMap<PresKey, Arc<OnceLock<Arc<TaylorPresentation>>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Shared, write-once presentation for (G, t).
pub fn presentation(group: &AbelianGroup, t: usize) -> Arc<TaylorPresentation> {
    let orders: Vec<u64> = group.orders().into_iter().filter(|&o| o > 1).collect();
    let cell = {
        let mut map = PRESENTATIONS.lock().unwrap();
        map.entry((orders.clone(), t)).or_default().clone()
    };
    cell.get_or_init(|| Arc::new(TaylorPresentation::new(&orders, t))).clone()
}

/// x in I^t over Z.
pub fn contains(x: &IntegralElement, t: usize) -> bool {
    if t == 0 {
        return true;
    }
    let pres = presentation(&x.group, t);
    let v = pres.coordinates(&x.group, x);
    pres.smith.contains(&v)
}

/// x in Z_(p) tensor I^t.
pub fn contains_p_local(x: &IntegralElement, t: usize, p: u64) -> bool {
    if t == 0 {
        return true;
    }
    let pres = presentation(&x.group, t);
    let v = pres.coordinates(&x.group, x);
    pres.smith.contains_p_local(&v, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AugOrder {
    /// x in I^t but not in I^{t+1}.
    Exactly(usize),
    /// x in I^cap; higher powers not examined.
    AtLeast(usize),
}

impl AugOrder {
    pub fn lower_bound(&self) -> usize {
        match *self {
            AugOrder::Exactly(t) | AugOrder::AtLeast(t) => t,
        }
    }
}

fn ord_with(x: &IntegralElement, cap: usize, member: impl Fn(usize) -> bool) -> AugOrder {
    if x.is_zero() {
        return AugOrder::AtLeast(cap);
    }
    for t in 1..=cap {
        if !member(t) {
            return AugOrder::Exactly(t - 1);
        }
    }
    AugOrder::AtLeast(cap)
}

/// Largest t <= cap with x in I^t.
pub fn ord_aug(x: &IntegralElement, cap: usize) -> AugOrder {
    ord_with(x, cap, |t| contains(x, t))
}

/// Largest t <= cap with x in Z_(p) tensor I^t.
pub fn ord_aug_p(x: &IntegralElement, p: u64, cap: usize) -> AugOrder {
    ord_with(x, cap, |t| contains_p_local(x, t, p))
}

/// Image of x in I^t / I^{t+1}.
#[derive(Clone, Debug, Serialize)]
pub struct LeadingImage {
    pub t: usize,
    /// Invariant factors d_i of I^t / I^{t+1} (0 for free summands); only d_i != 1 kept.
    pub invariants: Vec<BigInt>,
    /// Class coordinates aligned with `invariants`.
    pub class: Vec<BigInt>,
}

impl LeadingImage {
    /// Requires x in I^t; returns None otherwise.
    pub fn compute(x: &IntegralElement, t: usize) -> Option<LeadingImage> {
        let pres = presentation(&x.group, t + 1);
        let v = pres.coordinates(&x.group, x);
        let m = pres.dim();
        let mut rows: Vec<ZVec> = pres
            .monomials
            .iter()
            .enumerate()
            .filter(|(_, mono)| mono.iter().sum::<u32>() as usize == t)
            .map(|(i, _)| {
                let mut e = vec![BigInt::zero(); m];
                e[i] = BigInt::one();
                e
            })
            .collect();
        rows.extend(pres.relations.iter().cloned());
        let lambda = Hnf::from_rows(m, rows);
        let c = lambda.coordinates(&v)?;
        let rel_coords: Vec<ZVec> = pres
            .relations
            .iter()
            .map(|r| lambda.coordinates(r).expect("relations lie in the lattice"))
            .collect();
        let smith = Smith::new(rel_coords, lambda.rank());
        let w = smith.transform(&c);
        let mut invariants = Vec::new();
        let mut class = Vec::new();
        for (i, wi) in w.iter().enumerate() {
            match smith.diag.get(i) {
                Some(d) if d.is_one() => {}
                Some(d) => {
                    invariants.push(d.clone());
                    class.push(wi.mod_floor(d));
                }
                None => {
                    invariants.push(BigInt::zero());
                    class.push(wi.clone());
                }
            }
        }
        Some(LeadingImage { t, invariants, class })
    }

    pub fn is_zero(&self) -> bool {
        self.class.iter().all(|c| c.is_zero())
    }

    /// Vanishing in Z/p tensor I^t/I^{t+1}.
    pub fn is_zero_mod_p(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.class.iter().zip(&self.invariants).all(|(c, d)| {
            let m = if d.is_zero() { p.clone() } else { p.gcd(d) };
            (c % m).is_zero()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::element::minus_one;

    fn cyc(n: u64) -> Arc<AbelianGroup> {
        Arc::new(AbelianGroup::cyclic(n))
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_below(2, 3).len(), 6);
        assert_eq!(monomials_below(3, 4).len(), 20);
        assert_eq!(monomials_below(0, 3).len(), 1);
    }

    #[test]
    fn order_two_example() {
        // G = Z/2: 4(g - 1) lies in I^3 but not in I^4.
        let g = cyc(2);
        let y: IntegralElement = minus_one(g.clone(), 1);
        let x = y.scale(&BigInt::from(4));
        assert!(contains(&x, 3));
        assert!(!contains(&x, 4));
        assert_eq!(ord_aug(&x, 10), AugOrder::Exactly(3));
    }

    #[test]
    fn quotient_invariants_cyclic() {
        // Z[Z/n]/I^2 = Z + Z/n
        let p = TaylorPresentation::new(&[6], 2);
        assert_eq!(p.invariants(), vec![BigInt::from(6), BigInt::zero()]);
    }

    #[test]
    fn non_normalized_orders_agree_with_lattice() {
        // orders not in invariant-factor form once drove the Smith step into coefficient blow-up
        let g = Arc::new(AbelianGroup::from_orders(&[5, 6, 2]));
        let pres = TaylorPresentation::new(&[5, 6, 2], 5);
        assert_eq!(pres.dim(), 35);
        let y0: IntegralElement = minus_one(g.clone(), g.generator(0));
        let y1: IntegralElement = minus_one(g.clone(), g.generator(1));
        let x = y0.mul(&y1).unwrap().mul(&y1).unwrap();
        for t in 0..=5 {
            assert_eq!(contains(&x, t), crate::group_ring::lattice::contains_hnf(&x, t), "t = {t}");
        }
        assert!(contains(&x, 3));
    }

    #[test]
    fn leading_image_of_generator_difference() {
        let g = cyc(5);
        let y: IntegralElement = minus_one(g.clone(), 1);
        let li = LeadingImage::compute(&y, 1).unwrap();
        assert_eq!(li.invariants, vec![BigInt::from(5)]);
        assert!(!li.is_zero());
        assert!(!li.is_zero_mod_p(5));
        assert!(li.is_zero_mod_p(3));
        assert!(LeadingImage::compute(&y, 2).is_none());
    }
}
