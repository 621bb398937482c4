//! Mazur-Tate elements theta_S = sum_a ([a/S]^+ + [a/S]^-) delta_a and the
//! exact identities they satisfy.

use crate::arith::{self, gcd};
use crate::ec::{trace_of_frobenius, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::group_ring::filtration;
use crate::group_ring::{AbelianGroup, GroupRingElement, IntegralElement, RationalElement};
use crate::linalg::rational::Q;
use crate::modsym::EigenSymbol;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Largest |G_S| for which theta_S is built coefficient by coefficient.
pub const MAX_GROUP_ORDER: u64 = 5000;

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaElement {
    pub label: String,
    pub s: u64,
    pub element: RationalElement,
    pub denominator_primes: BTreeSet<u64>,
}

fn denominator_primes(x: &RationalElement) -> BTreeSet<u64> {
    let d = x.denominator();
    let d: u64 = d.try_into().unwrap_or(0);
    if d == 0 {
        return BTreeSet::new();
    }
    arith::prime_divisors(d).into_iter().collect()
}

/// theta_S over a given presentation of G_S.
pub fn theta_on(eig: &EigenSymbol, group: &Arc<AbelianGroup>) -> Result<RationalElement> {
    let s = group.modulus().ok_or_else(|| Error::GroupMismatch("group is not G_S".into()))? as i64;
    let residues = group.residues().expect("G_S");
    let coeffs: Vec<Q> = residues
        .par_iter()
        .map(|&a| {
            let (p, m) = eig.eval(a as i64, s)?;
            Ok(p + m)
        })
        .collect::<Result<_>>()?;
    Ok(GroupRingElement::from_coeffs(group.clone(), coeffs))
}

pub fn build_theta(eig: &EigenSymbol, label: &str, s: u64) -> Result<ThetaElement> {
    if s == 0 {
        return Err(Error::Unsupported("S must be positive".into()));
    }
    let order = arith::euler_phi(s);
    if order > MAX_GROUP_ORDER {
        return Err(Error::BoundExceeded(format!("|G_S| = {order} exceeds {MAX_GROUP_ORDER}")));
    }
    if !arith::is_square_free(s) {
        log::warn!("theta_{s}: S is not square-free");
    }
    let group = Arc::new(AbelianGroup::units_mod(s)?);
    let element = theta_on(eig, &group)?;
    let denominator_primes = denominator_primes(&element);
    Ok(ThetaElement { label: label.to_string(), s, element, denominator_primes })
}

/// Result of an exact identity check: lhs - rhs and whether it vanishes.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub holds: bool,
    pub residual: RationalElement,
}

impl IdentityCheck {
    fn from_sides(lhs: &RationalElement, rhs: &RationalElement) -> Result<Self> {
        let residual = lhs.sub(rhs)?;
        Ok(IdentityCheck { holds: residual.is_zero(), residual })
    }
}

/// eps(l) = 1 for l not dividing N, else 0.
pub fn eps_l(curve: &WeierstrassCurve, l: u64) -> i64 {
    curve.epsilon(l)
}

/// -Fr_l + a_l - eps(l) Fr_l^{-1} in Z[G_S], with Fr_l = delta_l.
pub fn euler_factor(group: &Arc<AbelianGroup>, l: u64, a_l: i64, eps: i64) -> Result<IntegralElement> {
    let fr = group
        .index_of_residue(l as i64)
        .ok_or_else(|| Error::NotCoprime(l))?;
    let mut e = IntegralElement::zero(group.clone());
    e.coeffs[fr] -= BigInt::one();
    e.coeffs[0] += BigInt::from(a_l);
    let inv = group.inv_idx(fr);
    e.coeffs[inv] -= BigInt::from(eps);
    Ok(e)
}

/// pi_{S l / S}(theta_{S l}) = (-Fr_l + a_l - eps(l) Fr_l^{-1}) theta_S.
pub fn check_norm_relation(eig: &EigenSymbol, curve: &WeierstrassCurve, s: u64, l: u64) -> Result<IdentityCheck> {
    if !arith::is_prime(l) {
        return Err(Error::NotPrime(l));
    }
    if s % l == 0 {
        return Err(Error::NotCoprime(l));
    }
    let big = build_theta(eig, "", s * l)?;
    let small = build_theta(eig, "", s)?;
    let map = big.element.group.reduction_map(&small.element.group)?;
    let lhs = big.element.pushforward(small.element.group.clone(), &map);
    let a_l = trace_of_frobenius(curve, l)?;
    let ef = euler_factor(&small.element.group, l, a_l, eps_l(curve, l))?.to_rational();
    let rhs = ef.mul(&small.element)?;
    IdentityCheck::from_sides(&lhs, &rhs)
}

/// theta_S = eps_f delta_{-N}^{-1} iota(theta_S), for gcd(S, N) = 1.
pub fn check_functional_equation(theta: &ThetaElement, eps: i64, n: u64) -> Result<IdentityCheck> {
    if gcd(theta.s as i64, n as i64) != 1 {
        return Err(Error::NotCoprime(n));
    }
    let g = &theta.element.group;
    let d = g.index_of_residue(-(n as i64)).expect("unit");
    let rhs = theta
        .element
        .involution()
        .shift(g.inv_idx(d))
        .scale(&Q::from_integer(BigInt::from(eps)));
    IdentityCheck::from_sides(&theta.element, &rhs)
}

/// a' with a' a N = -1 mod S.
pub fn atkin_lehner_partner(a: i64, s: i64, n: i64) -> Option<i64> {
    let x = (a as i128 * n as i128).rem_euclid(s as i128) as i64;
    arith::mod_inv(x, s).map(|inv| (-inv).rem_euclid(s))
}

/// prod_{l | S} (a_l - 1 - eps(l)): the factor with pi_{S/1}(theta_S) = factor * theta_1.
pub fn cascade_factor(curve: &WeierstrassCurve, s: u64) -> Result<i64> {
    let mut f = 1i64;
    for l in arith::prime_divisors(s) {
        f *= trace_of_frobenius(curve, l)? - 1 - eps_l(curve, l);
    }
    Ok(f)
}

/// Image of theta in Q[K] for the p-Sylow quotient K of G_S.
pub fn theta_p_part(theta: &RationalElement, p: u64) -> (Arc<AbelianGroup>, RationalElement) {
    let (k, map) = theta.group.p_sylow_quotient(p);
    let k = Arc::new(k);
    let img = theta.pushforward(k.clone(), &map);
    (k, img)
}

/// Split S = S1 S2 with S1 the product of l | S with p | l - 1.
pub fn p_split(s: u64, p: u64) -> (u64, u64) {
    let s1: u64 = arith::prime_divisors(s).into_iter().filter(|l| (l - 1) % p == 0).product();
    (s1, s / s1)
}

/// Largest |G_{S1}| used internally by the Sylow route.
pub const SYLOW_GROUP_LIMIT: u64 = 200_000;

/// Image of theta_{S1} in Q[Gamma_{S1}], the starting point of the Sylow route
/// for every S with the same S1.
#[derive(Clone, Debug)]
pub struct SylowBase {
    pub s1: u64,
    pub p: u64,
    pub g1: Arc<AbelianGroup>,
    pub k: Arc<AbelianGroup>,
    pub map: Vec<usize>,
    pub image: RationalElement,
}

impl SylowBase {
    pub fn new(eig: &EigenSymbol, s1: u64, p: u64) -> Result<Self> {
        let order = arith::euler_phi(s1);
        if order > SYLOW_GROUP_LIMIT {
            return Err(Error::BoundExceeded(format!("|G_S1| = {order} exceeds {SYLOW_GROUP_LIMIT}")));
        }
        let g1 = Arc::new(AbelianGroup::units_mod(s1)?);
        let theta = theta_on(eig, &g1)?;
        let (k, map) = g1.p_sylow_quotient(p);
        let k = Arc::new(k);
        let image = theta.pushforward(k.clone(), &map);
        Ok(SylowBase { s1, p, g1, k, map, image })
    }

    /// Image in Gamma_{S1 S2} = Gamma_{S1} of theta_{S1 S2}, via
    /// prod_{l | S2} (-Fr_l + a_l - eps(l) Fr_l^{-1}) applied to theta_{S1}.
    pub fn extend(&self, curve: &WeierstrassCurve, s2: u64) -> Result<RationalElement> {
        let mut acc = self.image.clone();
        for l in arith::prime_divisors(s2) {
            let a_l = trace_of_frobenius(curve, l)?;
            let fr = self.g1.index_of_residue(l as i64).ok_or(Error::NotCoprime(l))?;
            let mut ef = RationalElement::zero(self.k.clone());
            ef.coeffs[self.map[fr]] -= Q::one();
            ef.coeffs[0] += Q::from_integer(BigInt::from(a_l));
            ef.coeffs[self.map[self.g1.inv_idx(fr)]] -= Q::from_integer(BigInt::from(eps_l(curve, l)));
            acc = ef.mul(&acc)?;
        }
        Ok(acc)
    }
}

/// p-Sylow image of theta_S computed from theta_{S1} and Euler factors at S2,
/// which avoids building G_S when it is large.
pub fn theta_p_part_via_norms(
    eig: &EigenSymbol,
    curve: &WeierstrassCurve,
    s: u64,
    p: u64,
) -> Result<(Arc<AbelianGroup>, RationalElement)> {
    let (s1, s2) = p_split(s, p);
    let base = SylowBase::new(eig, s1, p)?;
    let img = base.extend(curve, s2)?;
    Ok((base.k, img))
}

/// Membership of a rational element in Z_(p) tensor I^t.
pub fn p_local_member(x: &RationalElement, t: usize, p: u64) -> bool {
    let (d, xi) = x.clear_denominators();
    if (&d % BigInt::from(p)).is_zero() {
        return false;
    }
    filtration::contains_p_local(&xi, t, p)
}

/// Denominator report against the bound t c(E) k (k = 2 when disc < 0).
#[derive(Clone, Debug, Serialize)]
pub struct IntegralityReport {
    pub denominator: String,
    pub plain_bound: u64,
    pub plain_ok: bool,
    pub lattice_bound: u64,
    pub lattice_ok: bool,
}

pub fn integrality(theta: &ThetaElement, torsion: u64, disc_negative: bool) -> IntegralityReport {
    let d = theta.element.denominator();
    let k = if disc_negative { 2 } else { 1 };
    let divides = |b: u64| (BigInt::from(b) % &d).is_zero();
    IntegralityReport {
        denominator: d.to_string(),
        plain_bound: torsion,
        plain_ok: divides(torsion),
        lattice_bound: torsion * k,
        lattice_ok: divides(torsion * k),
    }
}

pub const THETA_SCHEMA: &str = "mtlab.theta.v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaJson {
    pub schema: String,
    pub curve_label: String,
    #[serde(rename = "S")]
    pub s: u64,
    /// Residue a mod S -> exact coefficient "p/q".
    pub coefficients: BTreeMap<u64, String>,
}

impl ThetaElement {
    pub fn to_json(&self) -> ThetaJson {
        let residues = self.element.group.residues().expect("G_S");
        let coefficients = residues
            .iter()
            .zip(&self.element.coeffs)
            .map(|(&a, c)| (a, format!("{}/{}", c.numer(), c.denom())))
            .collect();
        ThetaJson { schema: THETA_SCHEMA.into(), curve_label: self.label.clone(), s: self.s, coefficients }
    }

    pub fn from_json(j: &ThetaJson) -> Result<ThetaElement> {
        if j.schema != THETA_SCHEMA {
            return Err(Error::Unsupported(format!("schema {}", j.schema)));
        }
        let group = Arc::new(AbelianGroup::units_mod(j.s)?);
        let mut coeffs = vec![Q::zero(); group.order() as usize];
        if j.coefficients.len() != coeffs.len() {
            return Err(Error::Unsupported("coefficient count does not match |G_S|".into()));
        }
        for (&a, v) in &j.coefficients {
            let i = group
                .index_of_residue(a as i64)
                .ok_or_else(|| Error::Unsupported(format!("{a} is not a unit mod {}", j.s)))?;
            let (n, d) = v.split_once('/').ok_or_else(|| Error::Unsupported(format!("bad rational {v}")))?;
            let n: BigInt = n.parse().map_err(|_| Error::Unsupported(format!("bad rational {v}")))?;
            let d: BigInt = d.parse().map_err(|_| Error::Unsupported(format!("bad rational {v}")))?;
            coeffs[i] = Q::new(n, d);
        }
        let element = GroupRingElement::from_coeffs(group, coeffs);
        let denominator_primes = denominator_primes(&element);
        Ok(ThetaElement { label: j.curve_label.clone(), s: j.s, element, denominator_primes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lseries::FourierCoefficients;
    use crate::modsym::ManinSymbolSpace;

    fn eig11() -> (WeierstrassCurve, EigenSymbol) {
        let e = WeierstrassCurve::new([0, -1, 1, -10, -20], 11).unwrap();
        let fc = FourierCoefficients::new(e.clone());
        let eig = EigenSymbol::for_curve(Arc::new(ManinSymbolSpace::new(11)), &fc, 30).unwrap();
        (e, eig)
    }

    #[test]
    fn theta_one_is_l_over_omega() {
        let (_, eig) = eig11();
        let t = build_theta(&eig, "11a1", 1).unwrap();
        assert_eq!(t.element.coeffs, vec![Q::new(1.into(), 5.into())]);
    }

    #[test]
    fn norm_relation_small() {
        let (e, eig) = eig11();
        let c = check_norm_relation(&eig, &e, 1, 3).unwrap();
        assert!(c.holds);
        let c = check_norm_relation(&eig, &e, 3, 11).unwrap();
        assert!(c.holds);
    }

    #[test]
    fn json_round_trip() {
        let (_, eig) = eig11();
        let t = build_theta(&eig, "11a1", 7).unwrap();
        let j = t.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: ThetaJson = serde_json::from_str(&text).unwrap();
        assert_eq!(ThetaElement::from_json(&back).unwrap(), t);
    }

    #[test]
    fn partner_satisfies_congruence() {
        for (a, s, n) in [(1, 5, 11), (3, 7, 37), (10, 21, 11)] {
            let b = atkin_lehner_partner(a, s, n).unwrap();
            assert_eq!((a * b * n).rem_euclid(s), s - 1);
        }
    }
}
