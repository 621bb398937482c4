//! The curve's plus/minus eigen-functionals on Manin symbols, their
//! normalization against the periods, and exact evaluation of [a/S]^+-.

use super::space::ManinSymbolSpace;
use crate::arith::{self, gcd};
use crate::ec::{real_periods, trace_of_frobenius, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::linalg::integer::Hnf;
use crate::linalg::rational::{q, QMatrix, Q};
use crate::lseries::{eichler_integral, FourierCoefficients};
use crate::precise::Real;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::Arc;

/// Largest prime used when cutting out the eigenspaces.
pub const ISOLATION_BOUND: u64 = 400;

#[derive(Clone, Debug)]
pub struct EigenSymbol {
    pub space: Arc<ManinSymbolSpace>,
    /// Functionals on the quotient basis, integral on H_1(X_0(N), Z) after stage 1.
    pub plus_functional: Vec<Q>,
    pub minus_functional: Vec<Q>,
    /// Stage-2 reconciliation constants relative to the stage-1 lattice.
    pub scale_plus: Q,
    pub scale_minus: Q,
    /// Primes whose Hecke operators were used for isolation.
    pub isolation_primes: Vec<u64>,
    pub normalized: bool,
    plus_values: Vec<Q>,
    minus_values: Vec<Q>,
}

/// Values of a functional on every P^1 element.
fn values_on_p1(space: &ManinSymbolSpace, phi: &[Q]) -> Vec<Q> {
    space
        .coords
        .iter()
        .map(|c| {
            let mut acc = Q::zero();
            for (j, x) in c {
                if !phi[*j].is_zero() {
                    acc += x * &phi[*j];
                }
            }
            acc
        })
        .collect()
}

fn left_kernel(m: &QMatrix) -> Vec<Vec<Q>> {
    m.transpose().kernel()
}

/// Combine rows: new_i = sum_j u_ij phi_j.
fn combine(u: &[Vec<Q>], phi: &[Vec<Q>]) -> Vec<Vec<Q>> {
    u.iter()
        .map(|coef| {
            let d = phi[0].len();
            let mut out = vec![Q::zero(); d];
            for (c, row) in coef.iter().zip(phi) {
                if c.is_zero() {
                    continue;
                }
                for (o, x) in out.iter_mut().zip(row) {
                    *o += c * x;
                }
            }
            out
        })
        .collect()
}

fn primitive(v: Vec<Q>) -> Vec<Q> {
    // scale to coprime integers with positive first nonzero entry
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        g = -g;
    }
    ints.into_iter().map(|x| Q::new(x, g.clone())).collect()
}

/// Manin symbols (c : d) whose sum is the path {oo, a/s}.
pub fn manin_path(a: i64, s: i64) -> Vec<(i64, i64)> {
    let (mut x, mut y) = (a, s);
    let (mut q2, mut q1) = (1i64, 0i64);
    let mut out = Vec::new();
    let mut k = 0u32;
    while y != 0 {
        let t = x.div_euclid(y);
        let qk = t * q1 + q2;
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out.push((qk, sign * q1));
        q2 = q1;
        q1 = qk;
        let r = x - t * y;
        x = y;
        y = r;
        k += 1;
    }
    out
}

impl EigenSymbol {
    /// Cut out the curve's plus and minus eigenlines by intersecting kernels of
    /// T_l - a_l over good primes l.
    pub fn isolate(space: Arc<ManinSymbolSpace>, curve: &WeierstrassCurve) -> Result<EigenSymbol> {
        if space.level != curve.conductor {
            return Err(Error::Isolation(format!(
                "space level {} differs from conductor {}",
                space.level, curve.conductor
            )));
        }
        let d = space.dim();
        let star = space.star_matrix();
        let mut used = Vec::new();
        let mut lines = Vec::new();
        for sign in [1i64, -1] {
            let mut phi = left_kernel(&star.sub_scalar_identity(&q(sign)));
            let mut l = 1u64;
            while phi.len() > 1 {
                l += 1;
                if l > ISOLATION_BOUND {
                    return Err(Error::Isolation(format!(
                        "{}-eigenspace still has dimension {} after l <= {ISOLATION_BOUND}",
                        if sign > 0 { "plus" } else { "minus" },
                        phi.len()
                    )));
                }
                if !arith::is_prime(l) || curve.conductor % l == 0 {
                    continue;
                }
                let al = trace_of_frobenius(curve, l)?;
                let t = space.hecke(l)?.sub_scalar_identity(&q(al));
                let m = QMatrix::from_rows(phi.clone(), d).mul(&t);
                let u = left_kernel(&m);
                phi = combine(&u, &phi);
                if !used.contains(&l) {
                    used.push(l);
                }
            }
            if phi.is_empty() {
                return Err(Error::Isolation("eigenspace is empty; wrong curve data?".into()));
            }
            lines.push(primitive(phi.remove(0)));
        }
        used.sort();
        let minus = lines.pop().unwrap();
        let plus = lines.pop().unwrap();
        let plus_values = values_on_p1(&space, &plus);
        let minus_values = values_on_p1(&space, &minus);
        Ok(EigenSymbol {
            space,
            plus_functional: plus,
            minus_functional: minus,
            scale_plus: Q::one(),
            scale_minus: Q::one(),
            isolation_primes: used,
            normalized: false,
            plus_values,
            minus_values,
        })
    }

    /// Generator of phi(H_1(X_0(N), Z)) for the functional with P^1 values `vals`.
    fn cuspidal_value_generator(&self, vals: &[Q]) -> Result<Q> {
        let sp = &self.space;
        let nc = sp.cusps.len();
        let den = vals.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let rows = (0..vals.len()).map(|i| {
            let mut r: Vec<BigInt> = sp.boundary_vector(i).into_iter().map(BigInt::from).collect();
            r.push((&vals[i] * Q::from_integer(den.clone())).to_integer());
            r
        });
        let h = Hnf::from_rows(nc + 1, rows);
        let g = h
            .rows
            .get(&nc)
            .map(|r| r[nc].clone())
            .ok_or_else(|| Error::Normalization("functional vanishes on integral homology".into()))?;
        Ok(Q::new(g, den))
    }

    /// Stage 1: rescale so both functionals take exactly the values Z on H_1(X_0(N), Z).
    pub fn normalize_stage1(&mut self) -> Result<()> {
        let gp = self.cuspidal_value_generator(&self.plus_values.clone())?;
        let gm = self.cuspidal_value_generator(&self.minus_values.clone())?;
        for (phi, vals, g) in [
            (&mut self.plus_functional, &mut self.plus_values, &gp),
            (&mut self.minus_functional, &mut self.minus_values, &gm),
        ] {
            for x in phi.iter_mut().chain(vals.iter_mut()) {
                *x = &*x / g;
            }
        }
        Ok(())
    }

    /// Stage 2: match against the Eichler integral and the periods. Returns the
    /// observed (plus, minus) corrections, which must have height <= 4.
    pub fn normalize_stage2(&mut self, fc: &FourierCoefficients, digits: u32) -> Result<(Q, Q)> {
        let n = self.space.level as i64;
        let per = real_periods(&fc.curve, digits + 10)?;
        let tol = 10f64.powf(-(digits as f64) / 2.0);
        let mut found: [Vec<Q>; 2] = [Vec::new(), Vec::new()];
        let y = BigRational::new(BigInt::one(), BigInt::from(n));
        for a in 1..n.max(2) {
            if gcd(a, n) != 1 {
                continue;
            }
            if found[0].len() >= 2 && found[1].len() >= 2 {
                break;
            }
            // g = [a b; N d] in Gamma_0(N) maps (-d + i)/N to (a + i)/N
            let d = if n == 1 { 1 } else { arith::mod_inv(a, n).unwrap() };
            let (ep, em) = self.path_value_raw(a, n);
            if ep.is_zero() && em.is_zero() {
                continue;
            }
            let x1 = BigRational::new(BigInt::from(a), BigInt::from(n));
            let x0 = BigRational::new(BigInt::from(-d), BigInt::from(n));
            let v = &eichler_integral(fc, &x1, &y, digits + 10) - &eichler_integral(fc, &x0, &y, digits + 10);
            for (k, exact, num, omega) in [(0, &ep, &v.re, &per.omega_plus), (1, &em, &v.im, &per.omega_minus_im)] {
                if exact.is_zero() || found[k].len() >= 2 {
                    continue;
                }
                let ratio = (num / &(omega * &Real::from_ratio(exact, num.precision()))).to_f64();
                let c = recognize_small(ratio, tol).ok_or_else(|| {
                    Error::Normalization(format!("stage-2 ratio {ratio} is not a rational of height <= 4"))
                })?;
                found[k].push(c);
            }
        }
        for (k, f) in found.iter().enumerate() {
            if f.is_empty() {
                return Err(Error::Normalization(format!(
                    "no nonzero {} symbol of the form a/N",
                    if k == 0 { "plus" } else { "minus" }
                )));
            }
            if f.iter().any(|c| c != &f[0]) {
                return Err(Error::Normalization(format!("inconsistent stage-2 constants {f:?}")));
            }
        }
        let (cp, cm) = (found[0][0].clone(), found[1][0].clone());
        for x in self.plus_functional.iter_mut().chain(self.plus_values.iter_mut()) {
            *x = &*x * &cp;
        }
        for x in self.minus_functional.iter_mut().chain(self.minus_values.iter_mut()) {
            *x = &*x * &cm;
        }
        self.scale_plus = cp.clone();
        self.scale_minus = cm.clone();
        self.normalized = true;
        Ok((cp, cm))
    }

    /// Isolate and normalize in one step.
    pub fn for_curve(space: Arc<ManinSymbolSpace>, fc: &FourierCoefficients, digits: u32) -> Result<EigenSymbol> {
        let mut e = Self::isolate(space, &fc.curve)?;
        e.normalize_stage1()?;
        e.normalize_stage2(fc, digits)?;
        Ok(e)
    }

    fn path_value_raw(&self, a: i64, s: i64) -> (Q, Q) {
        let n = self.space.level as i64;
        let mut p = Q::zero();
        let mut m = Q::zero();
        for (c, d) in manin_path(a, s) {
            let i = self.space.index_of(c.rem_euclid(n.max(1)), d.rem_euclid(n.max(1))).expect("coprime pair");
            p += &self.plus_values[i];
            m += &self.minus_values[i];
        }
        (p, m)
    }

    /// ([a/S]^+, [a/S]^-) as exact rationals.
    pub fn eval(&self, a: i64, s: i64) -> Result<(Q, Q)> {
        if s < 1 {
            return Err(Error::Unsupported(format!("S = {s} must be positive")));
        }
        if s > 1 && gcd(a, s) != 1 {
            return Err(Error::NotCoprime(a.unsigned_abs()));
        }
        let a = if s == 1 { 0 } else { a.rem_euclid(s) };
        Ok(self.path_value_raw(a, s))
    }

    /// Values on the P^1 elements (plus, minus).
    pub fn p1_values(&self) -> (&[Q], &[Q]) {
        (&self.plus_values, &self.minus_values)
    }

    pub fn level(&self) -> u64 {
        self.space.level
    }
}

/// p/q with 1 <= q <= 4, 1 <= |p| <= 4 within tol of x.
pub fn recognize_small(x: f64, tol: f64) -> Option<Q> {
    for den in 1..=4i64 {
        for num in -4..=4i64 {
            if num == 0 || gcd(num, den) != 1 {
                continue;
            }
            if (x - num as f64 / den as f64).abs() < tol {
                return Some(Q::new(num.into(), den.into()));
            }
        }
    }
    None
}

/// Height of a rational: max(|p|, q).
pub fn height(x: &Q) -> u64 {
    x.numer().abs().max(x.denom().clone()).to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manin_path_of_zero() {
        assert_eq!(manin_path(0, 1), vec![(1, 0)]);
        // last symbol's first entry is the denominator
        let p = manin_path(7, 30);
        assert_eq!(p.last().unwrap().0, 30);
    }

    #[test]
    fn isolation_level_11_uses_two() {
        let e = WeierstrassCurve::new([0, -1, 1, -10, -20], 11).unwrap();
        let sp = Arc::new(ManinSymbolSpace::new(11));
        let eig = EigenSymbol::isolate(sp.clone(), &e).unwrap();
        assert!(eig.isolation_primes.iter().all(|l| [2, 3].contains(l)));
        let t5 = sp.hecke(5).unwrap().sub_scalar_identity(&q(1));
        let m = QMatrix::from_rows(vec![eig.plus_functional.clone()], sp.dim()).mul(&t5);
        assert!(m.data[0].iter().all(|x| x.is_zero()));
    }
}
