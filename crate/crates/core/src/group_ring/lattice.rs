//! Direct lattice descriptions of I^k inside Z^|G|, used to cross-check the
//! Taylor presentation on small groups.

use super::element::{minus_one, IntegralElement};
use super::group::AbelianGroup;
use crate::linalg::integer::{Hnf, ZVec};
use num_bigint::BigInt;
use std::sync::Arc;

fn combos(r: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for c in combos(r, k - 1) {
        let start = c.last().copied().unwrap_or(0);
        for i in start..r {
            let mut d = c.clone();
            d.push(i);
            out.push(d);
        }
    }
    out
}

/// HNF of span{ h prod_j (g_{i_j} - 1) : h in G, multisets of size k }.
pub fn generating_family_hnf(group: &Arc<AbelianGroup>, k: usize) -> Hnf {
    let n = group.order() as usize;
    let r = group.rank();
    let mut rows = Vec::new();
    for c in combos(r, k) {
        let mut prod = IntegralElement::one(group.clone());
        for &i in &c {
            let y: IntegralElement = minus_one(group.clone(), group.generator(i));
            prod = prod.mul(&y).expect("same group");
        }
        for h in 0..n {
            rows.push(prod.shift(h).coeffs);
        }
    }
    Hnf::from_rows(n, rows)
}

/// HNF of I^k built as I^{j+1} = I^j * I starting from I^0 = Z[G].
pub fn closure_hnf(group: &Arc<AbelianGroup>, k: usize) -> Hnf {
    let n = group.order() as usize;
    let mut cur = Hnf::from_rows(
        n,
        (0..n)
            .map(|i| {
                let mut e = vec![BigInt::from(0); n];
                e[i] = BigInt::from(1);
                e
            })
            .collect::<Vec<ZVec>>(),
    );
    for _ in 0..k {
        let mut rows: Vec<ZVec> = Vec::new();
        for b in cur.basis() {
            let x = IntegralElement::from_coeffs(group.clone(), b);
            for i in 0..group.rank() {
                let y: IntegralElement = minus_one(group.clone(), group.generator(i));
                rows.push(x.mul(&y).expect("same group").coeffs);
            }
        }
        cur = Hnf::from_rows(n, rows);
    }
    cur
}

/// Membership x in I^k through the generating-family HNF.
pub fn contains_hnf(x: &IntegralElement, k: usize) -> bool {
    generating_family_hnf(&x.group, k).contains(&x.coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_constructions_agree() {
        for orders in [vec![4u64], vec![2, 2], vec![3, 6], vec![2, 4]] {
            let g = Arc::new(AbelianGroup::from_orders(&orders));
            for k in 0..4 {
                let a = generating_family_hnf(&g, k);
                let b = closure_hnf(&g, k);
                assert!(a.same_lattice(&b), "orders {orders:?} k {k}");
            }
        }
    }
}
