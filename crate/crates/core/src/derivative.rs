//! Derivative operators D^(k) = sum_j C(j, k) sigma^j, products over primes,
//! Taylor expansion of group-ring elements and the congruence criterion for
//! membership in powers of the augmentation ideal.

use crate::arith;
use crate::ec::{trace_of_frobenius, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::group_ring::filtration::{self, binomial_big};
use crate::group_ring::{AbelianGroup, IntegralElement, RationalElement};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Largest number of multi-indices enumerated by a Taylor expansion.
pub const MAX_TAYLOR_TERMS: u64 = 1_000_000;

/// Binomial weights C(j, k) for j < n; all zero when k < 0 or k >= n.
fn derivative_weights(n: u64, k: i64) -> Vec<BigInt> {
    let mut w = vec![BigInt::zero(); n as usize];
    if k < 0 || k as u64 >= n {
        return w;
    }
    let k = k as u64;
    let mut c = BigInt::one();
    for j in k..n {
        if j > k {
            c = c * BigInt::from(j) / BigInt::from(j - k);
        }
        w[j as usize] = c.clone();
    }
    w
}

/// D^(k) in Z[Z/n] for the standard generator.
pub fn single_derivative_element(n: u64, k: i64) -> IntegralElement {
    let g = Arc::new(AbelianGroup::cyclic(n.max(1)));
    let gen = if n > 1 { g.generator(0) } else { 0 };
    IntegralElement::from_powers(g.clone(), gen, &derivative_weights(n.max(1), k))
}

/// One factor D_l^(k) of a derivative: acts through cyclic factor `factor`
/// of the ambient group with sigma_l = g^generator_exp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivTerm {
    pub l: u64,
    pub k: u64,
    pub factor: usize,
    pub order: u64,
    pub generator_exp: u64,
}

#[derive(Clone, Debug)]
pub struct DerivativeDescriptor {
    pub group: Arc<AbelianGroup>,
    pub terms: Vec<DerivTerm>,
}

impl DerivativeDescriptor {
    /// Terms (l, k) located through the factor labels of G_S or Gamma_S.
    pub fn new(group: Arc<AbelianGroup>, terms: &[(u64, u64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for &(l, k) in terms {
            let factor = group
                .factor_for_prime(l)
                .ok_or_else(|| Error::GroupMismatch(format!("no factor Gamma_{l} in the group")))?;
            out.push((l, k, factor));
        }
        Self::build(group, out)
    }

    /// Terms (factor index, k) for groups without prime labels; l is the label
    /// when present and the factor index otherwise.
    pub fn on_factors(group: Arc<AbelianGroup>, terms: &[(usize, u64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for &(f, k) in terms {
            let fac = group
                .factors
                .get(f)
                .ok_or_else(|| Error::GroupMismatch(format!("no factor {f}")))?;
            out.push((fac.label.unwrap_or(f as u64), k, f));
        }
        Self::build(group, out)
    }

    fn build(group: Arc<AbelianGroup>, terms: Vec<(u64, u64, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(terms.len());
        for (l, k, factor) in terms {
            if !seen.insert(factor) {
                return Err(Error::Unsupported(format!("factor for {l} appears twice")));
            }
            let order = group.factors[factor].order;
            if k >= order {
                return Err(Error::BoundExceeded(format!("k = {k} >= |Gamma_{l}| = {order}")));
            }
            out.push(DerivTerm { l, k, factor, order, generator_exp: 1 });
        }
        Ok(DerivativeDescriptor { group, terms: out })
    }

    /// Replace sigma_l by g_l^e; e must be a unit mod |Gamma_l|.
    pub fn with_generator(mut self, l: u64, e: u64) -> Result<Self> {
        let t = self
            .terms
            .iter_mut()
            .find(|t| t.l == l)
            .ok_or_else(|| Error::GroupMismatch(format!("{l} is not in the support")))?;
        if arith::gcd_u(e % t.order.max(1), t.order) != 1 && t.order > 1 {
            return Err(Error::Unsupported(format!("{e} does not generate Gamma_{l}")));
        }
        t.generator_exp = e % t.order.max(1);
        Ok(self)
    }

    /// Product of two derivatives with disjoint supports.
    pub fn merge(&self, other: &DerivativeDescriptor) -> Result<Self> {
        if !self.group.is_same(&other.group) {
            return Err(Error::GroupMismatch("derivatives over different groups".into()));
        }
        let mut terms = self.terms.clone();
        for t in &other.terms {
            if terms.iter().any(|s| s.factor == t.factor) {
                return Err(Error::Unsupported(format!("supports overlap at {}", t.l)));
            }
            terms.push(t.clone());
        }
        Ok(DerivativeDescriptor { group: self.group.clone(), terms })
    }

    pub fn support(&self) -> u64 {
        self.terms.iter().map(|t| t.l).product()
    }

    pub fn conductor(&self) -> u64 {
        self.terms.iter().filter(|t| t.k > 0).map(|t| t.l).product()
    }

    pub fn order(&self) -> u64 {
        self.terms.iter().map(|t| t.k).sum()
    }

    /// n(D): the least |Gamma_l| over terms with k > 0, or 1.
    pub fn n(&self) -> u64 {
        self.terms.iter().filter(|t| t.k > 0).map(|t| t.order).min().unwrap_or(1)
    }

    pub fn e(&self, l: u64) -> u64 {
        self.terms.iter().find(|t| t.l == l).map_or(0, |t| t.k)
    }

    /// The product element prod D_l^(k_l) in Z[G].
    pub fn element(&self) -> IntegralElement {
        let mut acc = IntegralElement::one(self.group.clone());
        for t in &self.terms {
            acc = apply_axis(&acc, t.factor, t.generator_exp, t.k as i64);
        }
        acc
    }

    pub fn apply(&self, x: &IntegralElement) -> Result<IntegralElement> {
        self.check_group(&x.group)?;
        let mut acc = x.clone();
        for t in &self.terms {
            acc = apply_axis(&acc, t.factor, t.generator_exp, t.k as i64);
        }
        Ok(acc)
    }

    pub fn apply_rational(&self, x: &RationalElement) -> Result<RationalElement> {
        self.check_group(&x.group)?;
        x.mul(&self.element().to_rational())
    }

    fn check_group(&self, g: &AbelianGroup) -> Result<()> {
        if self.group.is_same(g) {
            Ok(())
        } else {
            Err(Error::GroupMismatch("derivative support does not match the group".into()))
        }
    }
}

fn stride_of(g: &AbelianGroup, factor: usize) -> u64 {
    g.factors[..factor].iter().map(|f| f.order).product()
}

/// Multiplication by D^(k) along one cyclic factor, sigma = g_factor^e.
fn apply_axis(x: &IntegralElement, factor: usize, e: u64, k: i64) -> IntegralElement {
    let g = &x.group;
    let n = g.factors[factor].order;
    let w = derivative_weights(n, k);
    let stride = stride_of(g, factor);
    let mut out = IntegralElement::zero(g.clone());
    for (idx, c) in x.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let idx = idx as u64;
        let pos = idx / stride % n;
        let base = idx - pos * stride;
        for (j, wj) in w.iter().enumerate() {
            if wj.is_zero() {
                continue;
            }
            let p = (pos + j as u64 * e) % n;
            out.coeffs[(base + p * stride) as usize] += c * wj;
        }
    }
    out
}

/// Multiplication by (sigma - 1)^k along one factor.
fn sigma_minus_one_axis(x: &IntegralElement, factor: usize, k: u64) -> IntegralElement {
    let g = &x.group;
    let n = g.factors[factor].order;
    let stride = stride_of(g, factor);
    let mut cur = x.clone();
    for _ in 0..k {
        let mut next = IntegralElement::zero(g.clone());
        for (idx, c) in cur.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = idx as u64;
            let pos = idx / stride % n;
            let base = idx - pos * stride;
            next.coeffs[(base + (pos + 1) % n * stride) as usize] += c;
            next.coeffs[idx as usize] -= c;
        }
        cur = next;
    }
    cur
}

fn multi_indices(bounds: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * b as usize);
        for v in &out {
            for k in 0..b {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Multi-indices k with k_i < n_i and sum k_i < bound.
fn multi_indices_below(bounds: &[u64], total: u64) -> Vec<Vec<u64>> {
    multi_indices(bounds)
        .into_iter()
        .filter(|k| k.iter().sum::<u64>() < total)
        .collect()
}

/// D_k a for every multi-index k over all factors, using the fixed factor
/// generators. Only nonzero coefficients are returned.
pub fn taylor_expansion(a: &IntegralElement) -> Result<BTreeMap<Vec<u64>, IntegralElement>> {
    let g = &a.group;
    if g.order() > MAX_TAYLOR_TERMS {
        return Err(Error::BoundExceeded(format!(
            "{} multi-indices exceed {MAX_TAYLOR_TERMS}",
            g.order()
        )));
    }
    let bounds = g.orders();
    let ks = multi_indices(&bounds);
    let coeffs: Vec<(Vec<u64>, IntegralElement)> = ks
        .into_par_iter()
        .map(|k| {
            let mut x = a.clone();
            for (f, &ki) in k.iter().enumerate() {
                x = apply_axis(&x, f, 1, ki as i64);
            }
            (k, x)
        })
        .filter(|(_, x)| !x.is_zero())
        .collect();
    Ok(coeffs.into_iter().collect())
}

/// Element of M tensor Z[G] with M = Z[G], stored as entry[m * |G| + g].
pub type Tensor = Vec<BigInt>;

/// sum_k (D_k a) tensor prod (sigma_i - 1)^{k_i}.
pub fn reconstruct(group: &Arc<AbelianGroup>, expansion: &BTreeMap<Vec<u64>, IntegralElement>) -> Tensor {
    let n = group.order() as usize;
    let mut out = vec![BigInt::zero(); n * n];
    for (k, dka) in expansion {
        let mut y = IntegralElement::one(group.clone());
        for (f, &ki) in k.iter().enumerate() {
            y = sigma_minus_one_axis(&y, f, ki);
        }
        for (m, c) in dka.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (gi, yc) in y.coeffs.iter().enumerate() {
                if !yc.is_zero() {
                    out[m * n + gi] += c * yc;
                }
            }
        }
    }
    out
}

/// sum_gamma (gamma a) tensor gamma.
pub fn diagonal_tensor(a: &IntegralElement) -> Tensor {
    let g = &a.group;
    let n = g.order() as usize;
    let mut out = vec![BigInt::zero(); n * n];
    for gamma in 0..n {
        for (h, c) in a.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[g.mul_idx(gamma, h) * n + gamma] += c;
            }
        }
    }
    out
}

/// Exact check of the Taylor reconstruction identity for a.
pub fn taylor_reconstruction_holds(a: &IntegralElement) -> Result<bool> {
    let exp = taylor_expansion(a)?;
    Ok(reconstruct(&a.group, &exp) == diagonal_tensor(a))
}

#[derive(Clone, Debug, Serialize)]
pub struct PremiseFailure {
    pub k: Vec<u64>,
    pub n_d: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub p: u64,
    pub t: usize,
    /// min(t, p): the power of I the conclusion lands in.
    pub target: usize,
    /// False when the group is not a p-group; nothing else is then evaluated.
    pub applicable: bool,
    pub premises_checked: usize,
    pub failures: Vec<PremiseFailure>,
    /// Set when every premise holds: membership of sum gamma a (x) gamma - N a (x) 1.
    pub conclusion: Option<bool>,
    /// Premises re-evaluated with sigma_l replaced by a second generator.
    pub premises_hold_alt_generator: Option<bool>,
}

fn premise_failures(a: &IntegralElement, target: usize, gens: &[u64]) -> (usize, Vec<PremiseFailure>) {
    let g = &a.group;
    let bounds = g.orders();
    let ks = multi_indices_below(&bounds, target as u64);
    let checked = ks.len();
    let mut failures: Vec<PremiseFailure> = ks
        .into_par_iter()
        .filter_map(|k| {
            let n_d = k
                .iter()
                .zip(&bounds)
                .filter(|(ki, _)| **ki > 0)
                .map(|(_, &n)| n)
                .min()
                .unwrap_or(1);
            if n_d == 1 {
                return None;
            }
            let mut x = a.clone();
            for (f, &ki) in k.iter().enumerate() {
                x = apply_axis(&x, f, gens[f], ki as i64);
            }
            let m = BigInt::from(n_d);
            if x.coeffs.iter().all(|c| c.mod_floor(&m).is_zero()) {
                None
            } else {
                Some(PremiseFailure { k, n_d })
            }
        })
        .collect();
    failures.sort_by(|x, y| x.k.cmp(&y.k));
    (checked, failures)
}

/// Components x_h of sum_gamma gamma a (x) gamma - N a (x) 1 = sum_h delta_h (x) x_h.
pub fn congruence_components(a: &IntegralElement) -> Vec<IntegralElement> {
    let g = &a.group;
    let n = g.order() as usize;
    let aug = a.augmentation();
    let mut comps = vec![IntegralElement::zero(g.clone()); n];
    for gamma in 0..n {
        for (h0, c) in a.coeffs.iter().enumerate() {
            if !c.is_zero() {
                comps[g.mul_idx(gamma, h0)].coeffs[gamma] += c;
            }
        }
    }
    for x in comps.iter_mut() {
        x.coeffs[0] -= &aug;
    }
    comps
}

/// The congruence criterion over a p-group: premises D a = 0 mod n(D) for all
/// D of full support with ord(D) < min(t, p), then the membership conclusion
/// checked independently.
pub fn congruence_filtration_check(a: &IntegralElement, t: usize, p: u64) -> CongruenceReport {
    let g = &a.group;
    let target = t.min(p as usize);
    let mut report = CongruenceReport {
        p,
        t,
        target,
        applicable: false,
        premises_checked: 0,
        failures: Vec::new(),
        conclusion: None,
        premises_hold_alt_generator: None,
    };
    if t == 0 || !arith::is_prime(p) || g.orders().iter().any(|&o| !is_power_of(o, p)) {
        return report;
    }
    report.applicable = true;
    let (checked, failures) = premise_failures(a, target, &vec![1; g.rank()]);
    report.premises_checked = checked;
    report.failures = failures;
    let alt: Vec<u64> = g.orders().iter().map(|&o| second_generator(o)).collect();
    report.premises_hold_alt_generator = Some(premise_failures(a, target, &alt).1.is_empty());
    if report.failures.is_empty() {
        let comps = congruence_components(a);
        report.conclusion = Some(comps.par_iter().all(|x| filtration::contains_p_local(x, target, p)));
    }
    report
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n > 1 && n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Least e > 1 coprime to n, or 1 when n <= 2.
fn second_generator(n: u64) -> u64 {
    if n <= 2 {
        return 1;
    }
    (2..n).find(|&e| arith::gcd_u(e, n) == 1).unwrap_or(1)
}

/// q and the Euler data (a_l, eps(l)) for the primes a weight is taken over.
#[derive(Clone, Debug)]
pub struct WeightContext {
    pub q: u64,
    pub euler: BTreeMap<u64, (i64, i64)>,
}

impl WeightContext {
    pub fn from_curve(curve: &WeierstrassCurve, q: u64, primes: &[u64]) -> Result<Self> {
        let mut euler = BTreeMap::new();
        for &l in primes {
            euler.insert(l, (trace_of_frobenius(curve, l)?, curve.epsilon(l)));
        }
        Ok(WeightContext { q, euler })
    }

    /// P_l(1) = 1 - a_l + eps(l).
    pub fn p_l_at_one(&self, l: u64) -> Option<i64> {
        self.euler.get(&l).map(|&(a, e)| 1 - a + e)
    }

    pub fn in_r_q(&self, l: u64) -> bool {
        (l - 1) % self.q == 0
    }

    pub fn in_r_eq(&self, l: u64) -> bool {
        self.in_r_q(l) && self.p_l_at_one(l).is_some_and(|v| v.rem_euclid(self.q as i64) == 0)
    }
}

/// w(D) = ord(D) - #{l in R_{E,q} : l | Supp(D)}.
pub fn weight(d: &DerivativeDescriptor, ctx: &WeightContext) -> Result<i64> {
    let mut count = 0i64;
    for t in &d.terms {
        if ctx.p_l_at_one(t.l).is_none() {
            return Err(Error::Unsupported(format!("no Euler data for {}", t.l)));
        }
        if ctx.in_r_eq(t.l) {
            count += 1;
        }
    }
    Ok(d.order() as i64 - count)
}

/// (sigma - 1) D^(k) - (C(n, k) - sigma D^(k-1)) in Z[Z/n].
pub fn lemma_residual(n: u64, k: i64) -> IntegralElement {
    let g = Arc::new(AbelianGroup::cyclic(n));
    let sigma = if n > 1 { g.generator(0) } else { 0 };
    let dk = single_derivative_element(n, k);
    let lhs = sigma_minus_one_axis(&dk, 0, 1);
    let mut rhs = single_derivative_element(n, k - 1).shift(sigma).neg();
    rhs.coeffs[0] += binomial_big(n, k.max(0) as u64);
    lhs.sub(&rhs).expect("same group")
}

/// Sum of the coefficients of D^(k) as a rational, for comparison with C(n, k+1).
pub fn derivative_coefficient_sum(n: u64, k: i64) -> BigRational {
    BigRational::from_integer(single_derivative_element(n, k).augmentation())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn small_derivatives() {
        assert_eq!(single_derivative_element(4, 0).coeffs, vec![z(1); 4]);
        assert!(single_derivative_element(3, 5).is_zero());
        assert!(single_derivative_element(3, -1).is_zero());
        assert_eq!(single_derivative_element(5, 2).coeffs, vec![z(0), z(0), z(1), z(3), z(6)]);
    }

    #[test]
    fn lemma_identity_and_hockey_stick() {
        for n in 1..=20u64 {
            for k in 1..n as i64 {
                assert!(lemma_residual(n, k).is_zero(), "n {n} k {k}");
                assert_eq!(
                    derivative_coefficient_sum(n, k).to_integer(),
                    binomial_big(n, k as u64 + 1)
                );
            }
        }
    }

    #[test]
    fn z2_expansion() {
        let g = Arc::new(AbelianGroup::cyclic(2));
        let a = IntegralElement::one(g.clone());
        let e = taylor_expansion(&a).unwrap();
        assert_eq!(e[&vec![0]].coeffs, vec![z(1), z(1)]);
        assert_eq!(e[&vec![1]].coeffs, vec![z(0), z(1)]);
        let r = reconstruct(&g, &e);
        assert_eq!(r, vec![z(1), z(0), z(0), z(1)]);
        assert!(taylor_expansion(&IntegralElement::zero(g)).unwrap().is_empty());
    }

    #[test]
    fn descriptor_statistics() {
        let g = Arc::new(AbelianGroup::units_mod(7 * 11 * 13).unwrap());
        let d = DerivativeDescriptor::new(g.clone(), &[(7, 2), (11, 0), (13, 1)]).unwrap();
        assert_eq!(d.support(), 1001);
        assert_eq!(d.conductor(), 91);
        assert_eq!(d.order(), 3);
        assert_eq!(d.n(), 6);
        assert_eq!(d.e(11), 0);
        assert!(DerivativeDescriptor::new(g.clone(), &[(5, 1)]).is_err());
        assert!(DerivativeDescriptor::new(g, &[(7, 6)]).is_err());
    }

    #[test]
    fn norm_kills_augmentation_zero() {
        let g = Arc::new(AbelianGroup::units_mod(11).unwrap());
        let d = DerivativeDescriptor::new(g.clone(), &[(11, 0)]).unwrap();
        let x = IntegralElement::delta(g.clone(), 3).sub(&IntegralElement::one(g.clone())).unwrap();
        assert!(d.apply(&x).unwrap().is_zero());
    }

    #[test]
    fn unit_at_identity_fails_premise() {
        let g = Arc::new(AbelianGroup::cyclic(5));
        let r = congruence_filtration_check(&IntegralElement::one(g), 5, 5);
        assert!(r.applicable);
        assert!(r.failures.iter().any(|f| f.k == vec![1] && f.n_d == 5));
        assert!(r.conclusion.is_none());
    }

    #[test]
    fn q_sigma_minus_one_in_i_p() {
        for q in [3u64, 9] {
            let g = Arc::new(AbelianGroup::cyclic(q));
            let a = IntegralElement::one(g.clone()).scale(&z(q as i64));
            let r = congruence_filtration_check(&a, 3, 3);
            assert!(r.failures.is_empty());
            assert_eq!(r.conclusion, Some(true));
            assert_eq!(r.premises_hold_alt_generator, Some(true));
        }
    }

    #[test]
    fn weight_counts_euler_primes() {
        let ctx = WeightContext { q: 5, euler: BTreeMap::from([(11, (2, 1)), (31, (0, 1))]) };
        assert!(ctx.in_r_eq(11));
        assert!(!ctx.in_r_eq(31));
        let g = Arc::new(AbelianGroup::units_mod(11 * 31).unwrap());
        let n11 = DerivativeDescriptor::new(g.clone(), &[(11, 0)]).unwrap();
        assert_eq!(weight(&n11, &ctx).unwrap(), -1);
        let d = DerivativeDescriptor::new(g, &[(31, 2)]).unwrap();
        assert_eq!(weight(&d, &ctx).unwrap(), 2);
    }
}
