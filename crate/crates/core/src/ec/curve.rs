use crate::error::{Error, Result};
use crate::arith;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6,
/// assumed globally minimal, together with its conductor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub a: [BigInt; 5],
    pub conductor: u64,
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
}

impl WeierstrassCurve {
    pub fn new(a: [i64; 5], conductor: u64) -> Result<Self> {
        Self::from_bigints(a.map(BigInt::from), conductor)
    }

    pub fn from_bigints(a: [BigInt; 5], conductor: u64) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = &a;
        let b2: BigInt = a1 * a1 + 4 * a2;
        let b4: BigInt = 2 * a4 + a1 * a3;
        let b6: BigInt = a3 * a3 + 4 * a6;
        let b8: BigInt = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let c4: BigInt = &b2 * &b2 - 24 * &b4;
        let c6: BigInt = -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * &b6;
        let disc: BigInt =
            -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(Error::Singular);
        }
        if conductor == 0 {
            return Err(Error::InvalidCurve("conductor must be positive".into()));
        }
        for p in arith::prime_divisors(conductor) {
            if !(&disc % BigInt::from(p)).is_zero() {
                return Err(Error::InvalidCurve(format!(
                    "prime {p} divides N but not the discriminant"
                )));
            }
        }
        Ok(WeierstrassCurve { a, conductor, b2, b4, b6, b8, c4, c6, disc })
    }

    pub fn a_i64(&self) -> [i64; 5] {
        self.a.clone().map(|x| x.to_i64().expect("coefficient fits in i64"))
    }

    pub fn is_good(&self, l: u64) -> bool {
        self.conductor % l != 0
    }

    /// epsilon(l) = 1 for good l, 0 for bad l.
    pub fn epsilon(&self, l: u64) -> i64 {
        if self.is_good(l) {
            1
        } else {
            0
        }
    }

    pub fn bad_primes(&self) -> Vec<u64> {
        arith::prime_divisors(self.conductor)
    }

    pub fn on_curve(&self, x: &BigRational, y: &BigRational) -> bool {
        let [a1, a2, a3, a4, a6] = self.a.clone().map(BigRational::from_integer);
        let lhs = y * y + &a1 * x * y + &a3 * y;
        let rhs = x * x * x + &a2 * x * x + &a4 * x + &a6;
        lhs == rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RationalPoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl RationalPoint {
    pub fn affine(x: i64, y: i64) -> Self {
        RationalPoint::Affine {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, RationalPoint::Infinity)
    }
}

impl WeierstrassCurve {
    pub fn neg_point(&self, p: &RationalPoint) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                let a1 = BigRational::from_integer(self.a[0].clone());
                let a3 = BigRational::from_integer(self.a[2].clone());
                RationalPoint::Affine { x: x.clone(), y: -y - a1 * x - a3 }
            }
        }
    }

    pub fn add_points(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (RationalPoint::Infinity, _) => return q.clone(),
            (_, RationalPoint::Infinity) => return p.clone(),
            (RationalPoint::Affine { x: x1, y: y1 }, RationalPoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let [a1, a2, a3, a4, _] = self.a.clone().map(BigRational::from_integer);
        let lambda;
        let nu;
        if x1 == x2 {
            let denom = BigRational::from_integer(2.into()) * y1 + &a1 * x1 + &a3;
            if denom.is_zero() || y1 != y2 {
                return RationalPoint::Infinity;
            }
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            lambda = (three * x1 * x1 + two * &a2 * x1 + &a4 - &a1 * y1) / &denom;
            nu = (-(x1 * x1 * x1) + &a4 * x1 + BigRational::from_integer(2.into()) * BigRational::from_integer(self.a[4].clone()) - &a3 * y1) / &denom;
        } else {
            lambda = (y2 - y1) / (x2 - x1);
            nu = (y1 * x2 - y2 * x1) / (x2 - x1);
        }
        let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - x1 - x2;
        let y3 = -(&lambda + &a1) * &x3 - &nu - &a3;
        RationalPoint::Affine { x: x3, y: y3 }
    }

    pub fn mul_point(&self, p: &RationalPoint, n: i64) -> RationalPoint {
        let mut base = if n < 0 { self.neg_point(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = RationalPoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_points(&acc, &base);
            }
            base = self.add_points(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Order of a torsion point (None if it has order > 16, hence infinite by Mazur).
    pub fn torsion_order_of(&self, p: &RationalPoint) -> Option<u64> {
        let mut q = p.clone();
        for n in 1..=16u64 {
            if q.is_infinity() {
                return Some(n);
            }
            q = self.add_points(&q, p);
            if let RationalPoint::Affine { x, .. } = &q {
                if x.denom().bits() > 256 {
                    return None;
                }
            }
        }
        if q.is_infinity() {
            Some(16)
        } else {
            None
        }
    }

    /// Rational torsion points by Nagell-Lutz on the model
    /// Y^2 = X^3 - 27 c4 X - 54 c6 with X = 36x + 3b2, Y = 108(2y + a1 x + a3).
    pub fn torsion_points(&self) -> Vec<RationalPoint> {
        let a = -27 * &self.c4;
        let b = -54 * &self.c6;
        let d: BigInt = 4 * &a * &a * &a + 27 * &b * &b;
        let mut out = vec![RationalPoint::Infinity];
        let mut ys: Vec<BigInt> = vec![BigInt::zero()];
        let dn = d.abs().to_u128();
        if let Some(dn) = dn {
            // y^2 | d
            let mut sq_divs: Vec<u128> = vec![1];
            let mut m = dn;
            let mut p: u128 = 2;
            let mut facs: Vec<(u128, u32)> = Vec::new();
            while p * p <= m && p < 10_000_000 {
                if m % p == 0 {
                    let mut e = 0;
                    while m % p == 0 {
                        m /= p;
                        e += 1;
                    }
                    facs.push((p, e));
                }
                p += 1;
            }
            if m > 1 {
                facs.push((m, 1));
            }
            for (p, e) in facs {
                let cur = sq_divs.clone();
                let mut pk = 1u128;
                for _ in 0..e / 2 {
                    pk *= p;
                    sq_divs.extend(cur.iter().map(|x| x * pk));
                }
            }
            for y in sq_divs {
                ys.push(BigInt::from(y));
                ys.push(-BigInt::from(y));
            }
        }
        let a1 = BigRational::from_integer(self.a[0].clone());
        let a3 = BigRational::from_integer(self.a[2].clone());
        let b2 = BigRational::from_integer(self.b2.clone());
        for yy in ys {
            // integer roots of X^3 + aX + b - yy^2
            let c = &b - &yy * &yy;
            for xx in integer_cubic_roots(&a, &c) {
                let x = (BigRational::from_integer(xx) - BigRational::from_integer(3.into()) * &b2)
                    / BigRational::from_integer(36.into());
                let y = (BigRational::from_integer(yy.clone()) / BigRational::from_integer(108.into())
                    - &a1 * &x
                    - &a3)
                    / BigRational::from_integer(2.into());
                if !self.on_curve(&x, &y) {
                    continue;
                }
                let pt = RationalPoint::Affine { x, y };
                if self.torsion_order_of(&pt).is_some() && !out.contains(&pt) {
                    out.push(pt);
                }
            }
        }
        out
    }
}

/// Integer roots of X^3 + aX + c, by bisection on the monotone pieces.
fn integer_cubic_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + a * x + c;
    let af = a.to_f64().unwrap_or(f64::MAX);
    let cf = c.to_f64().unwrap_or(f64::MAX);
    let g = |x: f64| x * x * x + af * x + cf;
    let bound = 2.0 + af.abs() + cf.abs();
    let mut breaks = vec![-bound];
    if af < 0.0 {
        let r = (-af / 3.0).sqrt();
        breaks.push(-r);
        breaks.push(r);
    }
    breaks.push(bound);
    let mut cands = Vec::new();
    for w in breaks.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (glo, ghi) = (g(lo), g(hi));
        if glo == 0.0 {
            cands.push(lo);
        }
        if ghi == 0.0 {
            cands.push(hi);
        }
        if glo.signum() == ghi.signum() {
            // a double root sits at a critical point
            cands.push(lo);
            cands.push(hi);
            continue;
        }
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == glo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        cands.push(0.5 * (lo + hi));
    }
    let mut out = Vec::new();
    for r in cands {
        let base = r.round() as i64;
        for d in -2..=2 {
            let x = BigInt::from(base + d);
            if f(&x).is_zero() && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Curve data record as read from the curve database.
#[derive(Clone, Debug)]
pub struct CurveProfile {
    pub label: String,
    pub curve: WeierstrassCurve,
    pub rank: u32,
    pub torsion_order: u64,
    pub generators: Vec<RationalPoint>,
    /// Tamagawa numbers m_l at bad primes.
    pub tamagawa: BTreeMap<u64, u64>,
    /// Manin constant assumed to be 1.
    pub manin_constant_one: bool,
    /// Primes where the mod-p Galois representation is known not to be surjective.
    pub nonsurjective_primes: BTreeSet<u64>,
}

impl CurveProfile {
    pub fn tamagawa_product(&self) -> u64 {
        self.tamagawa.values().product()
    }

    /// Checks torsion order against a Nagell-Lutz search and generators on the curve.
    pub fn validate(&self) -> Result<()> {
        for g in &self.generators {
            match g {
                RationalPoint::Affine { x, y } if self.curve.on_curve(x, y) => {}
                _ => {
                    return Err(Error::InvalidCurve(format!(
                        "{}: generator {:?} is not on the curve",
                        self.label, g
                    )))
                }
            }
        }
        if self.generators.len() != self.rank as usize && !self.generators.is_empty() {
            return Err(Error::InvalidCurve(format!(
                "{}: {} generators given for rank {}",
                self.label,
                self.generators.len(),
                self.rank
            )));
        }
        let t = self.curve.torsion_points().len() as u64;
        if t != self.torsion_order {
            return Err(Error::InvalidCurve(format!(
                "{}: torsion order {} but {} torsion points found",
                self.label, self.torsion_order, t
            )));
        }
        for &l in self.tamagawa.keys() {
            if self.curve.is_good(l) {
                return Err(Error::InvalidCurve(format!(
                    "{}: Tamagawa number given at good prime {l}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PointCoords {
    pub x: String,
    pub y: String,
}

impl From<&RationalPoint> for Option<PointCoords> {
    fn from(p: &RationalPoint) -> Self {
        match p {
            RationalPoint::Infinity => None,
            RationalPoint::Affine { x, y } => Some(PointCoords { x: x.to_string(), y: y.to_string() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e11() -> WeierstrassCurve {
        WeierstrassCurve::new([0, -1, 1, -10, -20], 11).unwrap()
    }

    #[test]
    fn invariants_11a() {
        let e = e11();
        assert_eq!(e.disc, BigInt::from(-161051));
        assert_eq!(e.c4, BigInt::from(496));
        assert_eq!(e.c6, BigInt::from(20008));
    }

    #[test]
    fn torsion_11a_is_cyclic_of_order_5() {
        let e = e11();
        let pts = e.torsion_points();
        assert_eq!(pts.len(), 5);
        let t = RationalPoint::affine(5, 5);
        assert!(pts.contains(&t));
        assert_eq!(e.torsion_order_of(&t), Some(5));
    }

    #[test]
    fn group_law_37a() {
        let e = WeierstrassCurve::new([0, 0, 1, -1, 0], 37).unwrap();
        let p = RationalPoint::affine(0, 0);
        let p2 = e.add_points(&p, &p);
        assert_eq!(p2, RationalPoint::affine(1, 0));
        let p3 = e.add_points(&p2, &p);
        assert_eq!(p3, RationalPoint::affine(-1, -1));
        assert_eq!(e.mul_point(&p, 3), p3);
        assert_eq!(e.add_points(&p, &e.neg_point(&p)), RationalPoint::Infinity);
        assert_eq!(e.torsion_points().len(), 1);
        assert_eq!(e.torsion_order_of(&p), None);
    }

    #[test]
    fn rejects_singular_and_inconsistent_conductor() {
        assert!(matches!(WeierstrassCurve::new([0, 0, 0, 0, 0], 1), Err(Error::Singular)));
        assert!(WeierstrassCurve::new([0, -1, 1, -10, -20], 13).is_err());
    }
}
