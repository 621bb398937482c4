//! Theorem-level checks on Mazur-Tate elements: vanishing to the rank,
//! trivial zeros, leading coefficients, J_T and batch scans.

pub mod checks;
pub mod jt;
pub mod report;
pub mod ring;
pub mod scan;

pub use checks::{check_rank_part, check_trivial_zeros, leading_coefficient_report};
pub use jt::{cokernel_order_jt, JtResult};
pub use report::{Hypothesis, HypothesisStatus, Prediction, PrimeResult, Verdict, VerificationReport};
pub use ring::{ring_spec, RingSpec, DEFAULT_P_BOUND};
pub use scan::{scan, CheckKind, ScanEntry, ScanOutput, ScanSummary};

use crate::arith;
use crate::ec::{group_structure_mod, CurveProfile, FiniteGroupStructure};
use crate::error::{Error, Result};
use crate::lseries::{epsilon_sign, FourierCoefficients};
use crate::modsym::{cache, EigenSymbol};
use crate::theta::SylowBase;
use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

pub const DEFAULT_T_MAX: usize = 8;

type SylowCell = Arc<OnceLock<std::result::Result<Arc<SylowBase>, String>>>;

/// Everything the checks need about one curve, built once and shared.
pub struct CurveContext {
    pub profile: CurveProfile,
    pub fc: FourierCoefficients,
    pub eig: EigenSymbol,
    pub spec: RingSpec,
    pub eps: i64,
    pub digits: u32,
    /// Upper limit for the order-of-vanishing search.
    pub t_max: usize,
    structures: RwLock<HashMap<u64, FiniteGroupStructure>>,
    sylow: Mutex<HashMap<(u64, u64), SylowCell>>,
}

impl CurveContext {
    pub fn new(profile: CurveProfile, digits: u32, cache_dir: Option<&Path>, p_bound: u64) -> Result<Self> {
        let space = Arc::new(cache::load_or_build(cache_dir, profile.curve.conductor)?);
        let fc = FourierCoefficients::new(profile.curve.clone());
        let eig = EigenSymbol::for_curve(space, &fc, digits)?;
        let eps = epsilon_sign(&fc, digits)?;
        let spec = ring_spec(&profile, p_bound);
        Ok(CurveContext {
            profile,
            fc,
            eig,
            spec,
            eps,
            digits,
            t_max: DEFAULT_T_MAX,
            structures: RwLock::new(HashMap::new()),
            sylow: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_t_max(mut self, t_max: usize) -> Self {
        self.t_max = t_max;
        self
    }

    /// Search cap for ord_aug, never below the order being tested.
    pub(crate) fn cap(&self, natural: usize, t: usize) -> usize {
        natural.min(self.t_max).max(t)
    }

    pub fn label(&self) -> &str {
        &self.profile.label
    }

    /// E(F_l) = Z/d1 x Z/d2, memoized.
    pub fn structure(&self, l: u64) -> Result<FiniteGroupStructure> {
        if let Some(s) = self.structures.read().unwrap().get(&l) {
            return Ok(*s);
        }
        let s = group_structure_mod(&self.profile.curve, l)?;
        self.structures.write().unwrap().insert(l, s);
        Ok(s)
    }

    /// theta_{S1} projected to its p-Sylow quotient, memoized per (S1, p).
    pub fn sylow_base(&self, s1: u64, p: u64) -> Result<Arc<SylowBase>> {
        let cell = self.sylow.lock().unwrap().entry((s1, p)).or_default().clone();
        cell.get_or_init(|| SylowBase::new(&self.eig, s1, p).map(Arc::new).map_err(|e| e.to_string()))
            .clone()
            .map_err(Error::Numerical)
    }
}

/// All square-free products of the good primes l <= bound (1 included), in
/// increasing order.
pub fn good_squarefree_family(profile: &CurveProfile, bound: u64) -> Vec<u64> {
    let primes: Vec<u64> = arith::primes_up_to(bound)
        .into_iter()
        .filter(|&l| profile.curve.is_good(l))
        .collect();
    let mut out = vec![1u64];
    for l in primes {
        let more: Vec<u64> = out.iter().map(|s| s * l).collect();
        out.extend(more);
    }
    out.sort_unstable();
    out
}
