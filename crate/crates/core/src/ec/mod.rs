//! Elliptic curves over Q: invariants, reduction mod primes, periods.

pub mod curve;
pub mod finite;
pub mod periods;

pub use curve::{CurveProfile, RationalPoint, WeierstrassCurve};
pub use finite::{
    count_points, group_structure_mod, reduction_type, sp_and_b2, trace_of_frobenius,
    FiniteGroupStructure, ReductionType,
};
pub use periods::{real_periods, Periods};
