//! The coefficient ring R = Z[1/m]: which primes are inverted and why.

use crate::arith;
use crate::ec::{count_points, CurveProfile};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Default bound on primes examined individually.
pub const DEFAULT_P_BOUND: u64 = 97;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Condition {
    /// p | 6 N |E(F_p)| prod m_l.
    Bad,
    /// The mod-p Galois representation is not surjective (input flag).
    NonSurjective,
    /// p < r_E.
    SmallerThanRank,
}

#[derive(Clone, Debug, Serialize)]
pub struct RingSpec {
    pub inverted: BTreeSet<u64>,
    pub reasons: BTreeMap<u64, Vec<(Condition, String)>>,
    pub p_bound: u64,
    /// Good primes p <= p_bound with p | |E(F_p)|.
    pub anomalous: Vec<u64>,
    pub caveats: Vec<String>,
}

impl RingSpec {
    pub fn is_inverted(&self, p: u64) -> bool {
        self.inverted.contains(&p)
    }

    pub fn m(&self) -> u128 {
        self.inverted.iter().map(|&p| p as u128).product()
    }

    fn add(&mut self, p: u64, c: Condition, why: String) {
        self.inverted.insert(p);
        let r = self.reasons.entry(p).or_default();
        if !r.iter().any(|(x, _)| *x == c) {
            r.push((c, why));
        }
    }
}

pub fn ring_spec(profile: &CurveProfile, p_bound: u64) -> RingSpec {
    let e = &profile.curve;
    let mut spec = RingSpec {
        inverted: BTreeSet::new(),
        reasons: BTreeMap::new(),
        p_bound,
        anomalous: Vec::new(),
        caveats: Vec::new(),
    };
    spec.add(2, Condition::Bad, "divides 6".into());
    spec.add(3, Condition::Bad, "divides 6".into());
    for l in e.bad_primes() {
        spec.add(l, Condition::Bad, "divides N".into());
    }
    for (&l, &m) in &profile.tamagawa {
        for q in arith::prime_divisors(m) {
            spec.add(q, Condition::Bad, format!("divides m_{l} = {m}"));
        }
    }
    for p in arith::primes_up_to(p_bound) {
        if !e.is_good(p) {
            continue;
        }
        if let Ok(n) = count_points(e, p) {
            if n % p == 0 {
                spec.anomalous.push(p);
                spec.add(p, Condition::Bad, format!("divides |E(F_{p})| = {n}"));
            }
        }
    }
    for &p in &profile.nonsurjective_primes {
        spec.add(p, Condition::NonSurjective, "mod-p image not surjective (curve data)".into());
    }
    for p in arith::primes_up_to((profile.rank as u64).saturating_sub(1)) {
        spec.add(p, Condition::SmallerThanRank, format!("p < r_E = {}", profile.rank));
    }
    spec.caveats.push(format!(
        "anomalous primes above {p_bound} are not searched; primes p > {p_bound} are reported unchecked"
    ));
    spec.caveats.push(
        "surjectivity of mod-p images is taken from the curve data, not computed".into(),
    );
    spec
}
