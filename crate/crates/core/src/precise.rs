//! Arbitrary-precision real and complex numbers over `astro_float`.
//!
//! Precision is carried per value in bits. Binary operations use the larger
//! precision of the two operands.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BSign};
use num_rational::BigRational;
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision in bits for `digits` significant decimal digits,
/// with a guard of 64 bits.
pub fn bits_for_digits(digits: u32) -> usize {
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
    bits.div_ceil(64) * 64
}

#[derive(Clone, Debug)]
pub struct Real {
    v: BigFloat,
    p: usize,
}

impl Real {
    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn zero(p: usize) -> Self {
        Real { v: BigFloat::from_i64(0, p), p }
    }

    pub fn one(p: usize) -> Self {
        Self::from_i64(1, p)
    }

    pub fn from_i64(x: i64, p: usize) -> Self {
        Real { v: BigFloat::from_i64(x, p), p }
    }

    pub fn from_f64(x: f64, p: usize) -> Self {
        Real { v: BigFloat::from_f64(x, p), p }
    }

    pub fn from_bigint(x: &BigInt, p: usize) -> Self {
        let (sign, digits) = x.to_u64_digits();
        let base = Real::from_i64(2, p).powi(64);
        let mut acc = Real::zero(p);
        for d in digits.iter().rev() {
            let w = Real { v: BigFloat::from_u64(*d, p), p };
            acc = &(&acc * &base) + &w;
        }
        if sign == BSign::Minus {
            -acc
        } else {
            acc
        }
    }

    pub fn from_ratio(x: &BigRational, p: usize) -> Self {
        &Real::from_bigint(x.numer(), p) / &Real::from_bigint(x.denom(), p)
    }

    pub fn pi(p: usize) -> Self {
        Real { v: with_cc(|cc| cc.pi(p, RM)), p }
    }

    pub fn with_precision(&self, p: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(p, RM).expect("set precision");
        Real { v, p }
    }

    pub fn sqrt(&self) -> Self {
        Real { v: self.v.sqrt(self.p, RM), p: self.p }
    }

    pub fn exp(&self) -> Self {
        Real { v: with_cc(|cc| self.v.exp(self.p, RM, cc)), p: self.p }
    }

    pub fn ln(&self) -> Self {
        Real { v: with_cc(|cc| self.v.ln(self.p, RM, cc)), p: self.p }
    }

    pub fn sin(&self) -> Self {
        Real { v: with_cc(|cc| self.v.sin(self.p, RM, cc)), p: self.p }
    }

    pub fn cos(&self) -> Self {
        Real { v: with_cc(|cc| self.v.cos(self.p, RM, cc)), p: self.p }
    }

    pub fn abs(&self) -> Self {
        Real { v: self.v.abs(), p: self.p }
    }

    pub fn powi(&self, n: usize) -> Self {
        Real { v: self.v.powi(n, self.p, RM), p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self * &Real::from_i64(k, self.p)
    }

    /// Approximate value as f64 (exact to double precision for finite values).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        let (words, _, sign, e, _) = self.v.as_raw_parts().expect("finite value");
        let top = *words.last().expect("nonempty mantissa");
        let next = if words.len() > 1 {
            words[words.len() - 2]
        } else {
            0
        };
        let m = top as f64 + next as f64 / 18446744073709551616.0;
        let mag = m * 2f64.powi(e - 64);
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let rounded = if self.v.is_zero() {
            self.v.clone()
        } else {
            let mut v = self.v.clone();
            let bits = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 8;
            v.set_precision(bits.max(64), RM).ok();
            v
        };
        with_cc(|cc| rounded.format(Radix::Dec, RM, cc))
            .unwrap_or_else(|_| format!("{}", self.to_f64()))
    }

    /// Nearest integer (ties away from zero).
    pub fn round_to_bigint(&self) -> BigInt {
        let half = Real::from_f64(0.5, self.p);
        let shifted = if self.is_negative() {
            self - &half
        } else {
            self + &half
        };
        let int = shifted.v.int();
        let s = with_cc(|cc| int.format(Radix::Dec, RM, cc)).unwrap_or_default();
        parse_formatted_integer(&s)
    }
}

/// Parses astro-float's decimal output for an integral value into a BigInt.
fn parse_formatted_integer(s: &str) -> BigInt {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let mut digits = format!("{int_part}{frac_part}");
    let shift = exp - frac_part.len() as i64;
    if shift >= 0 {
        digits.push_str(&"0".repeat(shift as usize));
    } else {
        let keep = (digits.len() as i64 + shift).max(0) as usize;
        digits.truncate(keep);
    }
    if digits.is_empty() {
        digits.push('0');
    }
    let v: BigInt = digits.parse().unwrap_or_default();
    if neg {
        -v
    } else {
        v
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $m(self, o: &'a Real) -> Real {
                let p = self.p.max(o.p);
                Real { v: BigFloat::$m(&self.v, &o.v, p, RM), p }
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                (&self).$m(&o)
            }
        }
    };
}
real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), p: self.p }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), p: self.p }
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(p: usize) -> Self {
        Complex::new(Real::zero(p), Real::zero(p))
    }

    pub fn one(p: usize) -> Self {
        Complex::new(Real::one(p), Real::zero(p))
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.precision();
        Complex::new(re, Real::zero(p))
    }

    pub fn i(p: usize) -> Self {
        Complex::new(Real::zero(p), Real::one(p))
    }

    /// exp(i * theta).
    pub fn cis(theta: &Real) -> Self {
        Complex::new(theta.cos(), theta.sin())
    }

    /// exp(2 pi i k / n).
    pub fn root_of_unity(k: i64, n: u64, p: usize) -> Self {
        let k = k.rem_euclid(n as i64);
        let theta = &Real::pi(p).scale_i64(2 * k) / &Real::from_i64(n as i64, p);
        Complex::cis(&theta)
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        let c = Complex::cis(&self.im);
        Complex::new(&r * &c.re, &r * &c.im)
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, r: &Real) -> Self {
        Complex::new(&self.re * r, &self.im * r)
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        Complex::new(self.re.scale_i64(k), self.im.scale_i64(k))
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, o: &'a Complex) -> Complex {
        Complex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, o: &'a Complex) -> Complex {
        Complex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, o: &'a Complex) -> Complex {
        Complex::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }
}

impl<'a> Div<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn div(self, o: &'a Complex) -> Complex {
        let d = o.norm_sqr();
        let n = self * &o.conj();
        Complex::new(&n.re / &d, &n.im / &d)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip() {
        for x in [1.0, -2.5, 1e-30, 123456.789, -3.0e20, 0.1] {
            let r = Real::from_f64(x, 128);
            assert!((r.to_f64() - x).abs() <= x.abs() * 1e-15, "{x}");
        }
        assert_eq!(Real::zero(64).to_f64(), 0.0);
    }

    #[test]
    fn pi_and_trig() {
        let p = bits_for_digits(40);
        let pi = Real::pi(p);
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let s = (&pi / &Real::from_i64(6, p)).sin();
        assert!((s.to_f64() - 0.5).abs() < 1e-15);
        let z = Complex::root_of_unity(1, 4, p);
        assert!(z.re.to_f64().abs() < 1e-30 && (z.im.to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn bigint_conversion_and_rounding() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let r = Real::from_bigint(&big, 256);
        assert_eq!(r.round_to_bigint(), big);
        assert_eq!(Real::from_f64(-2.6, 128).round_to_bigint(), BigInt::from(-3));
        assert_eq!(Real::from_f64(7.4, 128).round_to_bigint(), BigInt::from(7));
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!((Real::from_ratio(&q, 128).to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }
}
