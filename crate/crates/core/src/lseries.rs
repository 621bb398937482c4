//! Fourier coefficients of the newform attached to E and rapidly convergent
//! series for L(E, 1), L(E, chi, 1) and the root number.

use crate::arith;
use crate::ec::{trace_of_frobenius, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::group_ring::Character;
use crate::precise::{bits_for_digits, Complex, Real};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::sync::RwLock;

/// a_n for n <= n_max, extended on demand.
#[derive(Debug)]
pub struct FourierCoefficients {
    pub curve: WeierstrassCurve,
    a: RwLock<Vec<i64>>,
}

impl FourierCoefficients {
    pub fn new(curve: WeierstrassCurve) -> Self {
        FourierCoefficients { curve, a: RwLock::new(vec![0, 1]) }
    }

    pub fn len(&self) -> usize {
        self.a.read().unwrap().len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Make a_n available for all n <= n_max.
    pub fn ensure(&self, n_max: usize) {
        if self.a.read().unwrap().len() > n_max {
            return;
        }
        let mut guard = self.a.write().unwrap();
        if guard.len() > n_max {
            return;
        }
        let target = n_max.max(2 * (guard.len() - 1));
        *guard = compute_coefficients(&self.curve, target);
    }

    /// a_1, ..., a_{n_max} as a vector indexed from 0 (a[0] = 0).
    pub fn upto(&self, n_max: usize) -> Vec<i64> {
        self.ensure(n_max);
        self.a.read().unwrap()[..=n_max].to_vec()
    }

    pub fn get(&self, n: usize) -> i64 {
        self.ensure(n);
        self.a.read().unwrap()[n]
    }
}

/// Sieve computation of a_n through the Euler product recursion.
pub fn compute_coefficients(e: &WeierstrassCurve, n_max: usize) -> Vec<i64> {
    let mut spf = vec![0usize; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut a = vec![0i64; n_max + 1];
    if n_max >= 1 {
        a[1] = 1;
    }
    for n in 2..=n_max {
        let p = spf[n];
        let mut m = n;
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        if m > 1 {
            a[n] = a[n / m] * a[m];
            continue;
        }
        // n = p^k
        if k == 1 {
            a[n] = trace_of_frobenius(e, p as u64).expect("prime");
        } else {
            let ap = a[p];
            let eps = e.epsilon(p as u64);
            a[n] = ap * a[n / p] - eps * p as i64 * a[n / p / p];
        }
    }
    a
}

/// Number of terms for a sum of exp(-2 pi n y) to fall below 10^-digits.
pub fn terms_needed(y: f64, digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LN_10 / (2.0 * std::f64::consts::PI * y)).ceil() as usize + 20
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// sum_{n <= n_max} w(n) a_n n^-s exp(-2 pi n y) with s in {0, 1}, where
/// w(n) = 1; the real coefficient version.
fn damped_sum(a: &[i64], y: &Real, divide_by_n: bool, n_max: usize) -> Real {
    let p = y.precision();
    let q = (&Real::pi(p).scale_i64(-2) * y).exp();
    let mut qn = Real::one(p);
    let mut acc = Real::zero(p);
    for (n, &an) in a.iter().enumerate().take(n_max + 1).skip(1) {
        qn = &qn * &q;
        if an == 0 {
            continue;
        }
        let term = if divide_by_n {
            &qn.scale_i64(an) / &Real::from_i64(n as i64, p)
        } else {
            qn.scale_i64(an)
        };
        acc = &acc + &term;
    }
    acc
}

/// Root number from f(i/(Nt)) = eps N t^2 f(it) at t = h / sqrt(N).
pub fn epsilon_sign_at(fc: &FourierCoefficients, digits: u32, h: &BigRational) -> Result<i64> {
    let n = fc.curve.conductor as i64;
    let prec = bits_for_digits(digits + 10);
    let sqrt_n = Real::from_i64(n, prec).sqrt();
    let hr = Real::from_ratio(h, prec);
    let t = &hr / &sqrt_n;
    let y_small = &Real::one(prec) / &(&Real::from_i64(n, prec) * &t);
    let y_min = y_small.to_f64().min(t.to_f64());
    let n_max = terms_needed(y_min, digits + 10);
    let a = fc.upto(n_max);
    let lhs = damped_sum(&a, &y_small, false, n_max);
    let rhs = &damped_sum(&a, &t, false, n_max) * &(&Real::from_i64(n, prec) * &(&t * &t));
    let r = (&lhs / &rhs).to_f64();
    let tol = 10f64.powf(-(digits as f64) / 2.0);
    if (r - 1.0).abs() < tol {
        Ok(1)
    } else if (r + 1.0).abs() < tol {
        Ok(-1)
    } else {
        Err(Error::Numerical(format!("root number ratio {r} is not close to +-1")))
    }
}

/// The root number eps_f, evaluated at t = 1.1 / sqrt(N).
pub fn epsilon_sign(fc: &FourierCoefficients, digits: u32) -> Result<i64> {
    epsilon_sign_at(fc, digits, &ratio(11, 10))
}

/// L(E, 1) = sum a_n/n e^{-2 pi n t/sqrt N} + eps sum a_n/n e^{-2 pi n /(t sqrt N)}.
pub fn l_value_at(fc: &FourierCoefficients, digits: u32, t: &BigRational, eps: i64) -> Real {
    let n = fc.curve.conductor as i64;
    let prec = bits_for_digits(digits + 10);
    let sqrt_n = Real::from_i64(n, prec).sqrt();
    let tr = Real::from_ratio(t, prec);
    let y1 = &tr / &sqrt_n;
    let y2 = &Real::one(prec) / &(&tr * &sqrt_n);
    let n_max = terms_needed(y1.to_f64().min(y2.to_f64()), digits + 10);
    let a = fc.upto(n_max);
    let s1 = damped_sum(&a, &y1, true, n_max);
    let s2 = damped_sum(&a, &y2, true, n_max);
    &s1 + &s2.scale_i64(eps)
}

pub fn l_value(fc: &FourierCoefficients, digits: u32) -> Result<Real> {
    let eps = epsilon_sign(fc, digits)?;
    Ok(l_value_at(fc, digits, &ratio(1, 1), eps))
}

/// Sign convention for the reflected sum of a twisted L-series:
/// W = sign * eps * chi(c N) * tau(chi)^2 / m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistConvention {
    pub sign: i64,
    pub c: i64,
}

impl TwistConvention {
    pub fn candidates() -> [TwistConvention; 4] {
        [
            TwistConvention { sign: 1, c: 1 },
            TwistConvention { sign: 1, c: -1 },
            TwistConvention { sign: -1, c: 1 },
            TwistConvention { sign: -1, c: -1 },
        ]
    }
}

/// Convention fixed by the calibration pair (level 11, quadratic character mod 5).
pub const FROZEN_TWIST: TwistConvention = TwistConvention { sign: 1, c: 1 };

fn twisted_sum(a: &[i64], chi_tab: &[Complex], y: &Real, n_max: usize) -> Complex {
    let p = y.precision();
    let m = chi_tab.len();
    let q = (&Real::pi(p).scale_i64(-2) * y).exp();
    let mut qn = Real::one(p);
    // accumulate per residue class, then combine with the character table
    let mut buckets = vec![Real::zero(p); m];
    for (n, &an) in a.iter().enumerate().take(n_max + 1).skip(1) {
        qn = &qn * &q;
        if an == 0 {
            continue;
        }
        let r = n % m;
        if chi_tab[r].re.is_zero() && chi_tab[r].im.is_zero() {
            continue;
        }
        let term = &qn.scale_i64(an) / &Real::from_i64(n as i64, p);
        buckets[r] = &buckets[r] + &term;
    }
    let mut acc = Complex::zero(p);
    for (r, b) in buckets.iter().enumerate() {
        acc = &acc + &chi_tab[r].scale(b);
    }
    acc
}

/// Twisted value with an explicit convention and cutoff parameter t.
pub fn twisted_l_value_with(
    fc: &FourierCoefficients,
    chi: &Character,
    digits: u32,
    conv: TwistConvention,
    t: &BigRational,
    eps: i64,
) -> Result<Complex> {
    let m = chi.group.modulus().ok_or_else(|| Error::Unsupported("not a Dirichlet character".into()))?;
    let n = fc.curve.conductor;
    if arith::gcd_u(m, n) != 1 {
        return Err(Error::NotCoprime(m));
    }
    if !chi.is_primitive() {
        return Err(Error::Unsupported(format!("character mod {m} is not primitive")));
    }
    let prec = bits_for_digits(digits + 10);
    let chi_tab: Vec<Complex> = (0..m.max(1) as i64).map(|r| chi.value_at(r, prec)).collect();
    let chib_tab: Vec<Complex> = chi_tab.iter().map(|z| z.conj()).collect();
    let big_a = &Real::from_i64(m as i64, prec) * &Real::from_i64(n as i64, prec).sqrt();
    let tr = Real::from_ratio(t, prec);
    let y1 = &tr / &big_a;
    let y2 = &Real::one(prec) / &(&tr * &big_a);
    let n_max = terms_needed(y1.to_f64().min(y2.to_f64()), digits + 10);
    let a = fc.upto(n_max);
    let s1 = twisted_sum(&a, &chi_tab, &y1, n_max);
    let s2 = twisted_sum(&a, &chib_tab, &y2, n_max);
    let tau = chi.gauss_sum(prec);
    let chi_cn = chi.value_at(conv.c * n as i64, prec);
    let w = (&(&tau * &tau) * &chi_cn).scale(&(&Real::from_i64(conv.sign * eps, prec) / &Real::from_i64(m as i64, prec)));
    Ok(&s1 + &(&w * &s2))
}

/// L(E, chi, 1) for a primitive character mod m with gcd(m, N) = 1, checked
/// for stability between two cutoffs.
pub fn twisted_l_value(fc: &FourierCoefficients, chi: &Character, digits: u32) -> Result<Complex> {
    let eps = epsilon_sign(fc, digits)?;
    let v1 = twisted_l_value_with(fc, chi, digits, FROZEN_TWIST, &ratio(1, 1), eps)?;
    let v2 = twisted_l_value_with(fc, chi, digits, FROZEN_TWIST, &ratio(6, 5), eps)?;
    let diff = (&v1 - &v2).abs().to_f64();
    if diff > 10f64.powi(-(digits as i32)) {
        return Err(Error::Numerical(format!("twisted L-value unstable across cutoffs ({diff:e})")));
    }
    Ok(v1)
}

/// Conventions whose value is independent of the cutoff for the given character.
pub fn stable_conventions(fc: &FourierCoefficients, chi: &Character, digits: u32) -> Result<Vec<TwistConvention>> {
    let eps = epsilon_sign(fc, digits)?;
    let mut out = Vec::new();
    for conv in TwistConvention::candidates() {
        let v1 = twisted_l_value_with(fc, chi, digits, conv, &ratio(1, 1), eps)?;
        let v2 = twisted_l_value_with(fc, chi, digits, conv, &ratio(6, 5), eps)?;
        if (&v1 - &v2).abs().to_f64() < 10f64.powi(-(digits as i32) / 2) {
            out.push(conv);
        }
    }
    Ok(out)
}

/// F(z) = sum a_n / n e^{2 pi i n z} at z = x + i y with x rational, y > 0.
pub fn eichler_integral(fc: &FourierCoefficients, x: &BigRational, y: &BigRational, digits: u32) -> Complex {
    let prec = bits_for_digits(digits + 10);
    let yr = Real::from_ratio(y, prec);
    let n_max = terms_needed(yr.to_f64(), digits + 10);
    let a = fc.upto(n_max);
    let q = (&Real::pi(prec).scale_i64(-2) * &yr).exp();
    let den: u64 = x.denom().try_into().expect("small denominator");
    let num: i64 = (x.numer() % BigInt::from(den)).try_into().expect("small numerator");
    let zeta: Vec<Complex> = (0..den as i64).map(|k| Complex::root_of_unity(k * num, den, prec)).collect();
    let mut buckets = vec![Real::zero(prec); den as usize];
    let mut qn = Real::one(prec);
    for (n, &an) in a.iter().enumerate().take(n_max + 1).skip(1) {
        qn = &qn * &q;
        if an == 0 {
            continue;
        }
        let r = n % den as usize;
        let term = &qn.scale_i64(an) / &Real::from_i64(n as i64, prec);
        buckets[r] = &buckets[r] + &term;
    }
    let mut acc = Complex::zero(prec);
    for (r, b) in buckets.iter().enumerate() {
        acc = &acc + &zeta[r].scale(b);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::AbelianGroup;
    use std::sync::Arc;

    fn curve11() -> WeierstrassCurve {
        WeierstrassCurve::new([0, -1, 1, -10, -20], 11).unwrap()
    }

    fn curve37() -> WeierstrassCurve {
        WeierstrassCurve::new([0, 0, 1, -1, 0], 37).unwrap()
    }

    #[test]
    fn coefficients_level_11() {
        let a = compute_coefficients(&curve11(), 30);
        // q prod (1-q^n)^2 (1-q^11n)^2
        let want = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4, 4, -1, -4, -2, 4, 0, 2];
        assert_eq!(&a[1..=20], &want);
        assert_eq!(a[6], a[2] * a[3]);
    }

    #[test]
    fn epsilon_signs() {
        let f11 = FourierCoefficients::new(curve11());
        let f37 = FourierCoefficients::new(curve37());
        for h in [ratio(21, 20), ratio(11, 10), ratio(6, 5)] {
            assert_eq!(epsilon_sign_at(&f11, 20, &h).unwrap(), 1);
            assert_eq!(epsilon_sign_at(&f37, 20, &h).unwrap(), -1);
        }
    }

    #[test]
    fn l_value_level_11() {
        let f = FourierCoefficients::new(curve11());
        let l = l_value(&f, 25).unwrap().to_f64();
        assert!((l - 0.2538418608559107).abs() < 1e-14, "{l}");
        let a = l_value_at(&f, 25, &ratio(1, 1), 1);
        let b = l_value_at(&f, 25, &ratio(5, 4), 1);
        assert!((&a - &b).abs().to_f64() < 1e-25);
        let f37 = FourierCoefficients::new(curve37());
        assert!(l_value(&f37, 20).unwrap().abs().to_f64() < 1e-10);
    }

    #[test]
    fn twist_is_cutoff_stable() {
        let f = FourierCoefficients::new(curve11());
        let g = Arc::new(AbelianGroup::units_mod(7).unwrap());
        for chi in Character::all(&g) {
            if chi.is_trivial() {
                continue;
            }
            assert!(twisted_l_value(&f, &chi, 20).is_ok());
        }
    }
}
