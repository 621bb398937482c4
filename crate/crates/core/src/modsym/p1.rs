//! The projective line P^1(Z/N) indexing Manin symbols.

use crate::arith::{self, gcd};
use std::collections::HashMap;

/// Canonical representative of (c : d) in P^1(Z/N).
///
/// u = gcd(c, N) is kept as the first coordinate; among the scalar multiples
/// (u : s d) with s a unit fixing u, the least second coordinate is chosen.
pub fn normalize(c: i64, d: i64, n: i64) -> Option<(u32, u32)> {
    if n == 1 {
        return Some((0, 0));
    }
    let c = c.rem_euclid(n);
    let d = d.rem_euclid(n);
    let g = gcd(gcd(c, d), n);
    if g != 1 {
        return None;
    }
    let u = gcd(c, n);
    if u == n {
        return Some((0, 1));
    }
    // c = u c' with c' a unit mod N/u; scale so the first coordinate is u.
    let nu = n / u;
    let inv_mod_nu = arith::mod_inv(c / u, nu).expect("unit mod N/u");
    let d1 = (d * lift_unit(inv_mod_nu, nu, n)).rem_euclid(n);
    // Units t with t u = u mod n: t = 1 mod n/u. Minimize t*d1 over them.
    let mut best = d1;
    let mut t = 1 + nu;
    let steps = u;
    for _ in 1..steps {
        if gcd(t, n) == 1 {
            let cand = (t * d1).rem_euclid(n);
            if cand < best {
                best = cand;
            }
        }
        t += nu;
    }
    Some((u as u32, best as u32))
}

/// A unit mod n congruent to x mod m (m | n, gcd(x, m) = 1).
fn lift_unit(x: i64, m: i64, n: i64) -> i64 {
    let mut y = x.rem_euclid(m);
    if m == 1 {
        y = 1;
    }
    while gcd(y, n) != 1 {
        y += m;
    }
    y
}

#[derive(Clone, Debug)]
pub struct P1List {
    pub n: u64,
    pub reps: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), usize>,
}

impl P1List {
    pub fn new(n: u64) -> Self {
        let ni = n as i64;
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        if n == 1 {
            reps.push((0, 0));
            index.insert((0, 0), 0);
            return P1List { n, reps, index };
        }
        let mut divs = arith::divisors(n);
        divs.retain(|&d| d != n);
        divs.push(0);
        for u in divs {
            for d in 0..ni {
                if let Some(r) = normalize(u as i64, d, ni) {
                    if let std::collections::hash_map::Entry::Vacant(e) = index.entry(r) {
                        e.insert(reps.len());
                        reps.push(r);
                    }
                }
            }
        }
        P1List { n, reps, index }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        normalize(c, d, self.n as i64).and_then(|r| self.index.get(&r).copied())
    }

    /// Expected size N * prod (1 + 1/p).
    pub fn expected_len(n: u64) -> u64 {
        arith::factor(n)
            .iter()
            .fold(n, |acc, &(p, _)| acc / p * (p + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sizes() {
        for n in [1u64, 2, 11, 12, 37, 64, 389] {
            assert_eq!(P1List::new(n).len() as u64, P1List::expected_len(n), "N = {n}");
        }
    }

    #[test]
    fn normalization_is_a_class_invariant() {
        for n in [6i64, 12, 18, 25, 30] {
            let mut classes: HashMap<(u32, u32), HashSet<(i64, i64)>> = HashMap::new();
            for c in 0..n {
                for d in 0..n {
                    if let Some(r) = normalize(c, d, n) {
                        for s in 1..n {
                            if gcd(s, n) == 1 {
                                assert_eq!(normalize(s * c, s * d, n), Some(r));
                            }
                        }
                        classes.entry(r).or_default().insert((c, d));
                    }
                }
            }
            assert_eq!(classes.len() as u64, P1List::expected_len(n as u64));
        }
    }
}
