//! Real and imaginary periods by the arithmetic-geometric mean.

use super::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::precise::{bits_for_digits, Complex, Real};
use num_traits::{Signed, ToPrimitive};

/// Period data. The lattice basis is (omega1, omega2) with omega1 real
/// and positive and Im(omega2) > 0.
#[derive(Clone, Debug)]
pub struct Periods {
    pub omega1: Real,
    pub omega2: Complex,
    /// Omega^+ : the real period used to normalize plus symbols.
    pub omega_plus: Real,
    /// Omega^- = i * omega_minus_im.
    pub omega_minus_im: Real,
    /// True when the real locus has two components (disc > 0).
    pub two_components: bool,
    pub precision_bits: usize,
}

impl Periods {
    /// Covolume of the period lattice: omega1 * Im(omega2).
    pub fn covolume(&self) -> Real {
        &self.omega1 * &self.omega2.im
    }
}

pub fn agm(a: &Real, b: &Real) -> Real {
    let p = a.precision().max(b.precision());
    let tol = Real::from_f64(2f64.powi(-(p as i32) + 8), p);
    let two = Real::from_i64(2, p);
    let (mut a, mut b) = (a.clone(), b.clone());
    for _ in 0..200 {
        let an = &(&a + &b) / &two;
        let bn = (&a * &b).sqrt();
        a = an;
        b = bn;
        if (&a - &b).abs() <= &tol * &a.abs() {
            break;
        }
    }
    a
}

/// Real roots of 4x^3 + b2 x^2 + 2 b4 x + b6, in decreasing order.
fn real_roots(e: &WeierstrassCurve, p: usize) -> Vec<Real> {
    let c = [
        Real::from_bigint(&e.b6, p),
        Real::from_bigint(&(2 * &e.b4), p),
        Real::from_bigint(&e.b2, p),
        Real::from_i64(4, p),
    ];
    let cf: Vec<f64> = [&e.b6, &(2 * &e.b4), &e.b2]
        .iter()
        .map(|x| x.to_f64().unwrap())
        .chain(std::iter::once(4.0))
        .collect();
    let f = |x: f64| ((cf[3] * x + cf[2]) * x + cf[1]) * x + cf[0];
    let bound = 2.0 + cf[..3].iter().map(|v| v.abs()).sum::<f64>();
    // critical points of the cubic
    let (qa, qb, qc) = (3.0 * cf[3], 2.0 * cf[2], cf[1]);
    let disc = qb * qb - 4.0 * qa * qc;
    let mut breaks = vec![-bound];
    if disc > 0.0 {
        let s = disc.sqrt();
        breaks.push((-qb - s) / (2.0 * qa));
        breaks.push((-qb + s) / (2.0 * qa));
    }
    breaks.push(bound);
    let mut approx = Vec::new();
    for w in breaks.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        approx.push(0.5 * (lo + hi));
    }
    let eval = |x: &Real| {
        let mut acc = c[3].clone();
        for k in (0..3).rev() {
            acc = &(&acc * x) + &c[k];
        }
        acc
    };
    let deriv = |x: &Real| {
        let three = Real::from_i64(3, p);
        let two = Real::from_i64(2, p);
        &(&(&(&c[3] * &three) * &(x * x)) + &(&(&c[2] * &two) * x)) + &c[1]
    };
    let mut roots: Vec<Real> = approx
        .into_iter()
        .map(|x0| {
            let mut x = Real::from_f64(x0, p);
            for _ in 0..(p / 32 + 8) {
                let d = deriv(&x);
                if d.is_zero() {
                    break;
                }
                let step = &eval(&x) / &d;
                x = &x - &step;
                if step.is_zero() {
                    break;
                }
            }
            x
        })
        .collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    roots
}

/// Periods to `digits` decimal digits.
///
/// Omega^+ is the least positive real period omega1 for both lattice shapes;
/// Omega^- is i times the imaginary part of omega2.
pub fn real_periods(e: &WeierstrassCurve, digits: u32) -> Result<Periods> {
    let p = bits_for_digits(digits);
    let pi = Real::pi(p);
    let roots = real_roots(e, p);
    let two = Real::from_i64(2, p);
    let (omega1, omega2, two_components) = if e.disc.is_positive() {
        if roots.len() != 3 {
            return Err(Error::Numerical("expected three real roots".into()));
        }
        let (e1, e2, e3) = (&roots[0], &roots[1], &roots[2]);
        let w1 = &pi / &agm(&(e1 - e3).sqrt(), &(e1 - e2).sqrt());
        let w2im = &pi / &agm(&(e1 - e3).sqrt(), &(e2 - e3).sqrt());
        (w1, Complex::new(Real::zero(p), w2im), true)
    } else {
        if roots.len() != 1 {
            return Err(Error::Numerical("expected one real root".into()));
        }
        let e1 = &roots[0];
        let b2 = Real::from_bigint(&e.b2, p);
        let b4 = Real::from_bigint(&e.b4, p);
        let a = &e1.scale_i64(3) + &(&b2 / &Real::from_i64(4, p));
        let b = (&(&(e1 * e1).scale_i64(3) + &(&(&b2 / &two) * e1)) + &(&b4 / &two)).sqrt();
        let two_sqrt_b = &two * &b.sqrt();
        let w1 = &(&two * &pi) / &agm(&two_sqrt_b, &(&(&two * &b) + &a).sqrt());
        let w2im = &pi / &agm(&two_sqrt_b, &(&(&two * &b) - &a).sqrt());
        let w2re = -(&w1 / &two);
        (w1, Complex::new(w2re, w2im), false)
    };
    let omega_minus_im = omega2.im.clone();
    Ok(Periods {
        omega_plus: omega1.clone(),
        omega1,
        omega2,
        omega_minus_im,
        two_components,
        precision_bits: p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periods_11a() {
        let e = WeierstrassCurve::new([0, -1, 1, -10, -20], 11).unwrap();
        let per = real_periods(&e, 40).unwrap();
        assert!((per.omega1.to_f64() - 1.26920930427955).abs() < 1e-13);
        assert!(!per.two_components);
        // Re(omega2) = -omega1/2 for a non-rectangular lattice
        assert!((per.omega2.re.to_f64() + 0.5 * per.omega1.to_f64()).abs() < 1e-14);
    }

    #[test]
    fn periods_37a_rectangular() {
        let e = WeierstrassCurve::new([0, 0, 1, -1, 0], 37).unwrap();
        let per = real_periods(&e, 40).unwrap();
        assert!(per.two_components);
        assert!((per.omega1.to_f64() - 2.99345864623196).abs() < 1e-12);
        assert!((per.omega_minus_im.to_f64() - 2.45138938198679).abs() < 1e-12);
    }

    #[test]
    fn agm_of_equal_arguments() {
        let p = 128;
        let x = Real::from_f64(3.5, p);
        assert!((agm(&x, &x).to_f64() - 3.5).abs() < 1e-30);
        // AGM(1, sqrt 2) = 1.19814023473559...
        let r = agm(&Real::one(p), &Real::from_i64(2, p).sqrt());
        assert!((r.to_f64() - 1.198140234735592).abs() < 1e-14);
    }
}
