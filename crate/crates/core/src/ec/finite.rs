//! Reduction of curves and points modulo primes.

use super::curve::{RationalPoint, WeierstrassCurve};
use crate::arith::{self, legendre, mod_inv};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ReductionType {
    Good,
    SplitMultiplicative,
    NonSplitMultiplicative,
    Additive,
}

fn reduce_bigint(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Curve with coefficients reduced mod a prime p.
#[derive(Clone, Debug)]
pub struct ReducedCurve {
    pub p: u64,
    pub a: [u64; 5],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FpPoint {
    Infinity,
    Affine(u64, u64),
}

impl ReducedCurve {
    pub fn new(e: &WeierstrassCurve, p: u64) -> Self {
        ReducedCurve { p, a: e.a.clone().map(|x| reduce_bigint(&x, p)) }
    }

    fn m(&self, a: u64, b: u64) -> u64 {
        arith::mul_mod(a, b, self.p)
    }
    fn ad(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }
    fn sb(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }
    fn inv(&self, a: u64) -> u64 {
        mod_inv(a as i64, self.p as i64).expect("invertible") as u64
    }

    pub fn on_curve(&self, pt: FpPoint) -> bool {
        match pt {
            FpPoint::Infinity => true,
            FpPoint::Affine(x, y) => {
                let [a1, a2, a3, a4, a6] = self.a;
                let lhs = self.ad(self.ad(self.m(y, y), self.m(self.m(a1, x), y)), self.m(a3, y));
                let x2 = self.m(x, x);
                let rhs = self.ad(
                    self.ad(self.m(x2, x), self.m(a2, x2)),
                    self.ad(self.m(a4, x), a6),
                );
                lhs == rhs
            }
        }
    }

    /// All affine points, by solving for y for each x.
    pub fn points(&self) -> Vec<FpPoint> {
        let p = self.p;
        let [a1, a2, a3, a4, a6] = self.a;
        let mut out = vec![FpPoint::Infinity];
        if p == 2 {
            for x in 0..2 {
                for y in 0..2 {
                    let pt = FpPoint::Affine(x, y);
                    if self.on_curve(pt) {
                        out.push(pt);
                    }
                }
            }
            return out;
        }
        // y^2 + (a1 x + a3) y = f(x)  <=>  (2y + a1 x + a3)^2 = disc(x)
        let mut sqrt_table: HashMap<u64, Vec<u64>> = HashMap::new();
        for s in 0..p {
            sqrt_table.entry(self.m(s, s)).or_default().push(s);
        }
        let inv2 = self.inv(2);
        for x in 0..p {
            let b = self.ad(self.m(a1, x), a3);
            let x2 = self.m(x, x);
            let f = self.ad(self.ad(self.m(x2, x), self.m(a2, x2)), self.ad(self.m(a4, x), a6));
            let d = self.ad(self.m(b, b), self.m(4, f));
            if let Some(roots) = sqrt_table.get(&d) {
                for &s in roots {
                    let y = self.m(self.sb(s, b), inv2);
                    out.push(FpPoint::Affine(x, y));
                }
            }
        }
        out
    }

    /// #E(F_p) by a character sum over the discriminant of the quadratic in y
    /// (independent of `points`).
    pub fn count(&self) -> u64 {
        let p = self.p;
        if p == 2 {
            return self.points().len() as u64;
        }
        let [a1, a2, a3, a4, a6] = self.a;
        let mut is_square = vec![false; p as usize];
        for s in 1..p {
            is_square[self.m(s, s) as usize] = true;
        }
        let mut total: i64 = (p + 1) as i64;
        for x in 0..p {
            let b = self.ad(self.m(a1, x), a3);
            let x2 = self.m(x, x);
            let f = self.ad(self.ad(self.m(x2, x), self.m(a2, x2)), self.ad(self.m(a4, x), a6));
            let d = self.ad(self.m(b, b), self.m(4, f));
            if d != 0 {
                total += if is_square[d as usize] { 1 } else { -1 };
            }
        }
        total as u64
    }

    pub fn neg(&self, pt: FpPoint) -> FpPoint {
        match pt {
            FpPoint::Infinity => FpPoint::Infinity,
            FpPoint::Affine(x, y) => {
                let [a1, _, a3, _, _] = self.a;
                FpPoint::Affine(x, self.sb(self.sb(0, y), self.ad(self.m(a1, x), a3)))
            }
        }
    }

    pub fn add(&self, p1: FpPoint, p2: FpPoint) -> FpPoint {
        let (x1, y1, x2, y2) = match (p1, p2) {
            (FpPoint::Infinity, q) => return q,
            (q, FpPoint::Infinity) => return q,
            (FpPoint::Affine(a, b), FpPoint::Affine(c, d)) => (a, b, c, d),
        };
        let [a1, a2, a3, a4, a6] = self.a;
        let (lambda, nu);
        if x1 == x2 {
            let den = self.ad(self.ad(self.m(2, y1), self.m(a1, x1)), a3);
            if den == 0 || y1 != y2 {
                return FpPoint::Infinity;
            }
            let num = self.sb(
                self.ad(self.ad(self.m(3, self.m(x1, x1)), self.m(self.m(2, a2), x1)), a4),
                self.m(a1, y1),
            );
            let inv = self.inv(den);
            lambda = self.m(num, inv);
            let nnum = self.sb(
                self.ad(self.ad(self.sb(0, self.m(self.m(x1, x1), x1)), self.m(a4, x1)), self.m(2, a6)),
                self.m(a3, y1),
            );
            nu = self.m(nnum, inv);
        } else {
            let inv = self.inv(self.sb(x2, x1));
            lambda = self.m(self.sb(y2, y1), inv);
            nu = self.m(self.sb(self.m(y1, x2), self.m(y2, x1)), inv);
        }
        let x3 = self.sb(
            self.sb(self.sb(self.ad(self.m(lambda, lambda), self.m(a1, lambda)), a2), x1),
            x2,
        );
        let y3 = self.sb(self.sb(self.sb(0, self.m(self.ad(lambda, a1), x3)), nu), a3);
        FpPoint::Affine(x3, y3)
    }

    pub fn mul(&self, pt: FpPoint, n: u64) -> FpPoint {
        let mut acc = FpPoint::Infinity;
        let mut base = pt;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Order of a point given the group order.
    pub fn order(&self, pt: FpPoint, group_order: u64) -> u64 {
        let mut ord = group_order;
        for (q, _) in arith::factor(group_order) {
            while ord % q == 0 && self.mul(pt, ord / q) == FpPoint::Infinity {
                ord /= q;
            }
        }
        ord
    }
}

/// E(F_l) = Z/d1 x Z/d2 with d1 | d2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroupStructure {
    pub d1: u64,
    pub d2: u64,
}

impl FiniteGroupStructure {
    pub fn order(&self) -> u64 {
        self.d1 * self.d2
    }

    /// E(F_l)[p] is cyclic iff p does not divide d1.
    pub fn p_torsion_cyclic(&self, p: u64) -> bool {
        self.d1 % p != 0
    }
}

/// Explicit basis of E(F_l) with a discrete-log table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub curve: ReducedCurve,
    pub structure: FiniteGroupStructure,
    /// P of order d2 and Q of order d1 with E = <P> + <Q> (direct).
    pub basis: (FpPoint, FpPoint),
    pub dlog: HashMap<FpPoint, (u64, u64)>,
}

impl FiniteGroup {
    pub fn new(e: &WeierstrassCurve, l: u64) -> Result<Self> {
        check_good(e, l)?;
        let c = ReducedCurve::new(e, l);
        let pts = c.points();
        let n = pts.len() as u64;
        let exponent = pts.iter().fold(1u64, |acc, &pt| arith::lcm_u(acc, c.order(pt, n)));
        let d2 = exponent;
        let d1 = n / d2;
        let p_gen = *pts.iter().find(|&&pt| c.order(pt, n) == d2).unwrap();
        let mut p_multiples = Vec::with_capacity(d2 as usize);
        let mut acc = FpPoint::Infinity;
        for _ in 0..d2 {
            p_multiples.push(acc);
            acc = c.add(acc, p_gen);
        }
        for &q in pts.iter().filter(|&&pt| c.order(pt, n) % d1 == 0) {
            let q = c.mul(q, c.order(q, n) / d1);
            let mut table = HashMap::with_capacity(n as usize);
            let mut qj = FpPoint::Infinity;
            'fill: for j in 0..d1 {
                for (i, &pi) in p_multiples.iter().enumerate() {
                    let pt = c.add(pi, qj);
                    if table.insert(pt, (i as u64, j)).is_some() {
                        break 'fill;
                    }
                }
                qj = c.add(qj, q);
            }
            if table.len() as u64 == n {
                return Ok(FiniteGroup {
                    curve: c,
                    structure: FiniteGroupStructure { d1, d2 },
                    basis: (p_gen, q),
                    dlog: table,
                });
            }
        }
        Err(Error::Numerical(format!("no basis found for E(F_{l})")))
    }
}

fn check_good(e: &WeierstrassCurve, l: u64) -> Result<()> {
    if !arith::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    if !e.is_good(l) {
        return Err(Error::BadPrime(l));
    }
    Ok(())
}

/// a_l for any prime l: l + 1 - #E(F_l) if good, +-1 or 0 if bad.
pub fn trace_of_frobenius(e: &WeierstrassCurve, l: u64) -> Result<i64> {
    if !arith::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    if e.is_good(l) {
        let n = ReducedCurve::new(e, l).count();
        return Ok(l as i64 + 1 - n as i64);
    }
    Ok(match reduction_type(e, l)? {
        ReductionType::SplitMultiplicative => 1,
        ReductionType::NonSplitMultiplicative => -1,
        ReductionType::Additive => 0,
        ReductionType::Good => unreachable!(),
    })
}

pub fn count_points(e: &WeierstrassCurve, l: u64) -> Result<u64> {
    check_good(e, l)?;
    Ok(ReducedCurve::new(e, l).count())
}

pub fn group_structure_mod(e: &WeierstrassCurve, l: u64) -> Result<FiniteGroupStructure> {
    check_good(e, l)?;
    let c = ReducedCurve::new(e, l);
    let pts = c.points();
    let n = pts.len() as u64;
    let d2 = pts.iter().fold(1u64, |acc, &pt| arith::lcm_u(acc, c.order(pt, n)));
    Ok(FiniteGroupStructure { d1: n / d2, d2 })
}

/// Reduction type at l, assuming the model is minimal at l.
pub fn reduction_type(e: &WeierstrassCurve, l: u64) -> Result<ReductionType> {
    if !arith::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    let lb = BigInt::from(l);
    if !(&e.disc % &lb).is_zero() {
        return Ok(ReductionType::Good);
    }
    if (&e.c4 % &lb).is_zero() {
        return Ok(ReductionType::Additive);
    }
    let split = if l == 2 {
        split_by_tangents_brute_force(e, l)
    } else {
        let by_node = split_by_node(e, l);
        let by_c6 = legendre(reduce_bigint(&(-&e.c6), l) as i64, l) == 1;
        if by_node != by_c6 {
            return Err(Error::InvalidCurve(format!(
                "split test disagreement at {l}; is the model minimal?"
            )));
        }
        by_node
    };
    Ok(if split {
        ReductionType::SplitMultiplicative
    } else {
        ReductionType::NonSplitMultiplicative
    })
}

/// Odd l: the node x0 is the double root of x^3 + (b2/4)x^2 + (b4/2)x + b6/4;
/// the tangent slopes are rational iff 3 x0 + b2/4 is a nonzero square.
fn split_by_node(e: &WeierstrassCurve, l: u64) -> bool {
    let r = |x: &BigInt| reduce_bigint(x, l);
    let inv2 = mod_inv(2, l as i64).unwrap() as u64;
    let inv4 = arith::mul_mod(inv2, inv2, l);
    let c2 = arith::mul_mod(r(&e.b2), inv4, l);
    let c1 = arith::mul_mod(r(&e.b4), inv2, l);
    let c0 = arith::mul_mod(r(&e.b6), inv4, l);
    let g = |x: u64| {
        let x2 = arith::mul_mod(x, x, l);
        (arith::mul_mod(x2, x, l) + arith::mul_mod(c2, x2, l) + arith::mul_mod(c1, x, l) + c0) % l
    };
    let gp = |x: u64| {
        (arith::mul_mod(3, arith::mul_mod(x, x, l), l) + arith::mul_mod(2 * c2 % l, x, l) + c1) % l
    };
    let x0 = (0..l).find(|&x| g(x) == 0 && gp(x) == 0).expect("node exists");
    legendre((arith::mul_mod(3, x0, l) + c2) as i64, l) == 1
}

/// Brute force: find the singular point and test whether the tangent
/// quadratic splits over F_l.
fn split_by_tangents_brute_force(e: &WeierstrassCurve, l: u64) -> bool {
    let c = ReducedCurve::new(e, l);
    let [a1, a2, a3, a4, _] = c.a;
    let mm = |a: u64, b: u64| arith::mul_mod(a, b, l);
    for x in 0..l {
        for y in 0..l {
            if !c.on_curve(FpPoint::Affine(x, y)) {
                continue;
            }
            let fy = (2 * y + mm(a1, x) + a3) % l;
            let fx = (mm(3, mm(x, x)) + mm(2 * a2 % l, x) + a4 + l - mm(a1, y)) % l;
            if fy != 0 || fx != 0 {
                continue;
            }
            // quadratic form of the tangent cone: (dy)^2 + a1 dx dy - (3x + a2) dx^2
            let a = 1u64;
            let b = a1;
            let cc = (l - (mm(3, x) + a2) % l) % l;
            for t in 0..l {
                // slope t: a t^2 + b t - cc... roots of Y^2 + b Y X + cc X^2
                if (mm(a, mm(t, t)) + mm(b, t) + cc) % l == 0 {
                    return true;
                }
            }
            return false;
        }
    }
    false
}

/// Reduces a rational point with l-integral coordinates mod l.
pub fn reduce_point(pt: &RationalPoint, l: u64) -> Option<FpPoint> {
    match pt {
        RationalPoint::Infinity => Some(FpPoint::Infinity),
        RationalPoint::Affine { x, y } => {
            let lb = BigInt::from(l);
            if (x.denom() % &lb).is_zero() {
                return Some(FpPoint::Infinity);
            }
            let red = |q: &num_rational::BigRational| {
                let d = reduce_bigint(q.denom(), l);
                let n = reduce_bigint(q.numer(), l);
                arith::mul_mod(n, mod_inv(d as i64, l as i64).unwrap() as u64, l)
            };
            if (y.denom() % &lb).is_zero() {
                return None;
            }
            Some(FpPoint::Affine(red(x), red(y)))
        }
    }
}

/// s_p = #{l | S : l | N, a_l = 1} and b2 = #{l | S : l good, a_l = 2}.
pub fn sp_and_b2(e: &WeierstrassCurve, s: u64) -> Result<(u32, u32)> {
    let mut sp = 0;
    let mut b2 = 0;
    for l in arith::prime_divisors(s) {
        let a = trace_of_frobenius(e, l)?;
        if e.is_good(l) {
            if a == 2 {
                b2 += 1;
            }
        } else if a == 1 {
            sp += 1;
        }
    }
    Ok((sp, b2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e11() -> WeierstrassCurve {
        WeierstrassCurve::new([0, -1, 1, -10, -20], 11).unwrap()
    }

    #[test]
    fn traces_11a() {
        let e = e11();
        let want = [(2, -2), (3, -1), (5, 1), (7, -2), (13, 4), (17, -2), (19, 0), (23, -1)];
        for (l, a) in want {
            assert_eq!(trace_of_frobenius(&e, l).unwrap(), a, "a_{l}");
        }
        assert_eq!(trace_of_frobenius(&e, 11).unwrap(), 1);
        assert_eq!(reduction_type(&e, 11).unwrap(), ReductionType::SplitMultiplicative);
    }

    #[test]
    fn count_matches_enumeration() {
        let e = WeierstrassCurve::new([0, 1, 1, -2, 0], 389).unwrap();
        for l in arith::primes_up_to(200) {
            if !e.is_good(l) {
                continue;
            }
            let c = ReducedCurve::new(&e, l);
            let pts = c.points();
            assert!(pts.iter().all(|&p| c.on_curve(p)));
            assert_eq!(pts.len() as u64, c.count(), "l = {l}");
        }
    }

    #[test]
    fn hasse_bound_and_structure() {
        let e = e11();
        for l in arith::primes_up_to(300) {
            if l == 11 {
                continue;
            }
            let a = trace_of_frobenius(&e, l).unwrap();
            assert!((a * a) as u64 <= 4 * l);
            let g = group_structure_mod(&e, l).unwrap();
            assert_eq!(g.order() as i64, l as i64 + 1 - a);
            assert_eq!(g.d2 % g.d1, 0);
            // rational 5-torsion injects for l != 5, 11
            if l != 5 {
                assert_eq!(g.order() % 5, 0);
            }
        }
    }

    #[test]
    fn finite_group_basis_is_complete() {
        let e = e11();
        for l in [3u64, 7, 13, 19, 31, 61] {
            let g = FiniteGroup::new(&e, l).unwrap();
            assert_eq!(g.dlog.len() as u64, g.structure.order());
        }
    }

    #[test]
    fn bad_and_composite_inputs_rejected() {
        let e = e11();
        assert!(matches!(count_points(&e, 11), Err(Error::BadPrime(11))));
        assert!(matches!(count_points(&e, 15), Err(Error::NotPrime(15))));
    }

    #[test]
    fn split_test_at_two() {
        // 14a1 has non-split multiplicative reduction at 2.
        let e = WeierstrassCurve::new([1, 0, 1, 4, -6], 14).unwrap();
        assert_eq!(reduction_type(&e, 2).unwrap(), ReductionType::NonSplitMultiplicative);
        let via_count = trace_of_frobenius(&e, 2).unwrap();
        assert_eq!(via_count, -1);
        // For multiplicative reduction #E_ns(F_2) = 2 - a_2.
        let c = ReducedCurve::new(&e, 2);
        let nonsing = c.points().len() as i64 - 1;
        assert_eq!(nonsing, 2 - via_count);
    }
}
