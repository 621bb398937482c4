//! J_T: the order of the cokernel of
//! E(Q) -> prod_{l | T} E(F_l) x prod_{l | N} E(Q_l)/E_0(Q_l).

use crate::arith;
use crate::ec::finite::{reduce_point, FiniteGroup};
use crate::ec::{reduction_type, CurveProfile, RationalPoint, ReductionType, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::linalg::integer::{vp, Smith, ZVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum JtResult {
    Order(BigInt),
    /// With a prime given: whether p divides J_T.
    PDivides(bool),
    /// The bad-prime block needs component-group data the tool does not compute.
    NeedsComponentData(Vec<u64>),
}

impl JtResult {
    pub fn order(&self) -> Option<&BigInt> {
        match self {
            JtResult::Order(n) => Some(n),
            _ => None,
        }
    }
}

/// One cyclic block of the target with the image of each source point.
struct Block {
    modulus: BigInt,
    images: Vec<BigInt>,
}

fn val_q(x: &BigRational, l: u64) -> i64 {
    if x.is_zero() {
        return i64::MAX;
    }
    vp(x.numer(), l) as i64 - vp(x.denom(), l) as i64
}

/// Unsigned component index in 0..=m/2 of a point on a curve with
/// multiplicative reduction I_m at l.
fn component_index(e: &WeierstrassCurve, pt: &RationalPoint, l: u64, m: u64) -> u64 {
    let RationalPoint::Affine { x, y } = pt else { return 0 };
    let [a1, a2, a3, a4, _] = e.a.clone().map(BigRational::from_integer);
    if val_q(x, l) < 0 {
        return 0;
    }
    let psi2 = BigRational::from_integer(2.into()) * y + &a1 * x + &a3;
    let fx = BigRational::from_integer(3.into()) * x * x + BigRational::from_integer(2.into()) * &a2 * x + &a4 - &a1 * y;
    if val_q(&psi2, l) <= 0 || val_q(&fx, l) <= 0 {
        return 0;
    }
    (val_q(&psi2, l).min(i64::MAX / 2) as u64).min(m / 2)
}

/// Images in Z/m for split I_m with signs made consistent across points:
/// the sign of each point is fixed against a reference point through the
/// index of their sum.
fn split_block(e: &WeierstrassCurve, pts: &[RationalPoint], l: u64, m: u64) -> Vec<BigInt> {
    let idx: Vec<u64> = pts.iter().map(|p| component_index(e, p, l, m)).collect();
    let generic = |k: u64| k != 0 && 2 * k != m;
    let Some(r) = idx.iter().position(|&k| generic(k)) else {
        return idx.iter().map(|&k| BigInt::from(k)).collect();
    };
    let unsigned = |v: i64| {
        let v = v.rem_euclid(m as i64) as u64;
        v.min(m - v)
    };
    idx.iter()
        .enumerate()
        .map(|(i, &k)| {
            if i == r || !generic(k) {
                return BigInt::from(k);
            }
            let s = component_index(e, &e.add_points(&pts[r], &pts[i]), l, m);
            if unsigned(idx[r] as i64 + k as i64) == s {
                BigInt::from(k)
            } else {
                BigInt::from(m - k)
            }
        })
        .collect()
}

fn source_points(profile: &CurveProfile) -> Result<Vec<RationalPoint>> {
    if profile.generators.len() != profile.rank as usize {
        return Err(Error::InvalidCurve(format!(
            "{}: {} generators for rank {}",
            profile.label,
            profile.generators.len(),
            profile.rank
        )));
    }
    let mut pts: Vec<RationalPoint> =
        profile.curve.torsion_points().into_iter().filter(|p| !p.is_infinity()).collect();
    pts.extend(profile.generators.iter().cloned());
    Ok(pts)
}

/// Cokernel order (or its p-part verdict) for T a product of good primes.
pub fn cokernel_order_jt(profile: &CurveProfile, t: u64, p: Option<u64>) -> Result<JtResult> {
    let e = &profile.curve;
    let pts = source_points(profile)?;
    let mut blocks: Vec<Block> = Vec::new();
    for l in arith::prime_divisors(t) {
        if !e.is_good(l) {
            return Err(Error::BadPrime(l));
        }
        let fg = FiniteGroup::new(e, l)?;
        let (d1, d2) = (fg.structure.d1, fg.structure.d2);
        let mut b2 = Block { modulus: d2.into(), images: Vec::new() };
        let mut b1 = Block { modulus: d1.into(), images: Vec::new() };
        for pt in &pts {
            let r = reduce_point(pt, l)
                .ok_or_else(|| Error::Unsupported(format!("point not l-integral at {l}")))?;
            let (i, j) = fg.dlog[&r];
            b2.images.push(i.into());
            b1.images.push(j.into());
        }
        blocks.push(b2);
        if d1 > 1 {
            blocks.push(b1);
        }
    }
    let mut missing = Vec::new();
    for (&l, &m) in &profile.tamagawa {
        if m == 1 {
            continue;
        }
        if let Some(p) = p {
            if m % p != 0 {
                continue;
            }
        }
        match reduction_type(e, l)? {
            ReductionType::SplitMultiplicative => {
                let v = vp(&e.disc, l) as u64;
                if v != m {
                    return Err(Error::InvalidCurve(format!(
                        "{}: m_{l} = {m} but split reduction of type I_{v}",
                        profile.label
                    )));
                }
                blocks.push(Block { modulus: m.into(), images: split_block(e, &pts, l, m) });
            }
            ReductionType::NonSplitMultiplicative => {
                let v = vp(&e.disc, l) as u64;
                let images = pts
                    .iter()
                    .map(|pt| {
                        let k = component_index(e, pt, l, v);
                        BigInt::from(u64::from(2 * k == v && k > 0))
                    })
                    .collect();
                blocks.push(Block { modulus: m.into(), images });
            }
            _ => missing.push(l),
        }
    }
    if !missing.is_empty() {
        return Ok(JtResult::NeedsComponentData(missing));
    }
    let order = cokernel_order(&blocks, pts.len());
    Ok(match p {
        Some(p) => JtResult::PDivides((&order % BigInt::from(p)).is_zero()),
        None => JtResult::Order(order),
    })
}

/// |prod Z/d_i / image| via Smith normal form of the relation matrix.
fn cokernel_order(blocks: &[Block], npts: usize) -> BigInt {
    let dim = blocks.len();
    if dim == 0 {
        return BigInt::one();
    }
    let mut rows: Vec<ZVec> = Vec::with_capacity(dim + npts);
    for (i, b) in blocks.iter().enumerate() {
        let mut r = vec![BigInt::zero(); dim];
        r[i] = b.modulus.clone();
        rows.push(r);
    }
    for k in 0..npts {
        rows.push(blocks.iter().map(|b| b.images[k].mod_floor(&b.modulus)).collect());
    }
    let smith = Smith::new(rows, dim);
    debug_assert_eq!(smith.rank(), dim);
    smith.diag.iter().fold(BigInt::one(), |acc, d| acc * d.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    fn p37() -> CurveProfile {
        CurveProfile {
            label: "37a1".into(),
            curve: WeierstrassCurve::new([0, 0, 1, -1, 0], 37).unwrap(),
            rank: 1,
            torsion_order: 1,
            generators: vec![RationalPoint::affine(0, 0)],
            tamagawa: BTreeMap::from([(37, 1)]),
            manin_constant_one: true,
            nonsurjective_primes: BTreeSet::new(),
        }
    }

    #[test]
    fn j3_for_37a() {
        assert_eq!(cokernel_order_jt(&p37(), 3, None).unwrap(), JtResult::Order(1.into()));
        assert_eq!(cokernel_order_jt(&p37(), 1, None).unwrap(), JtResult::Order(1.into()));
        assert!(cokernel_order_jt(&p37(), 37, None).is_err());
    }

    #[test]
    fn torsion_of_11a_against_component_group() {
        let prof = CurveProfile {
            label: "11a1".into(),
            curve: WeierstrassCurve::new([0, -1, 1, -10, -20], 11).unwrap(),
            rank: 0,
            torsion_order: 5,
            generators: vec![],
            tamagawa: BTreeMap::from([(11, 5)]),
            manin_constant_one: true,
            nonsurjective_primes: BTreeSet::from([5]),
        };
        // Z/5 torsion maps into E(F_3) x Phi_11 = (Z/5)^2 with image of order 5.
        assert_eq!(cokernel_order_jt(&prof, 3, None).unwrap(), JtResult::Order(5.into()));
        assert_eq!(cokernel_order_jt(&prof, 3, Some(5)).unwrap(), JtResult::PDivides(true));
        assert_eq!(cokernel_order_jt(&prof, 3, Some(7)).unwrap(), JtResult::PDivides(false));
    }
}
