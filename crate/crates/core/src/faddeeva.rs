//! Faddeeva function `w(z) = exp(-z^2) erfc(-iz)` for complex arguments.
//!
//! Upper half plane: Taylor series near the origin, Weideman's rational
//! expansion at moderate `|z|` and the Laplace continued fraction for large
//! `|z|`. The lower half plane follows from `w(-z) = 2 exp(-z^2) - w(z)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const SERIES_RADIUS: f64 = 0.5;
const CF_RADIUS: f64 = 8.0;
const CF_TERMS: usize = 60;
const WEIDEMAN_N: usize = 40;

/// `1 / sqrt(pi)`
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Series,
    Rational,
    ContinuedFraction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WValue {
    pub z: C64,
    pub w: C64,
    /// Scheme used for the upper-half-plane evaluation.
    pub regime: Regime,
}

/// `w(z)`; fails only when `2 exp(-z^2)` overflows in the lower half plane.
pub fn w(z: C64) -> Result<C64> {
    eval(z).map(|v| v.w)
}

pub fn eval(z: C64) -> Result<WValue> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "w(z) needs finite z, got {z}"
        )));
    }
    if z.im >= 0.0 {
        let (w, regime) = upper(z);
        return Ok(WValue { z, w, regime });
    }
    let e = exp_neg_sq(z)?;
    let (wm, regime) = upper(-z);
    Ok(WValue {
        z,
        w: 2.0 * e - wm,
        regime,
    })
}

/// Large-`|z|` form: `i / (sqrt(pi) z)`, plus `2 exp(-z^2)` below the real axis.
pub fn w_asymptotic(z: C64) -> Result<C64> {
    if z.norm() < 5.0 {
        return Err(Error::InvalidArgument(format!(
            "asymptotic w needs |z| >= 5, got |z| = {}",
            z.norm()
        )));
    }
    let lead = C64::i() * FRAC_1_SQRT_PI / z;
    if z.im > 0.0 {
        Ok(lead)
    } else {
        Ok(lead + 2.0 * exp_neg_sq(z)?)
    }
}

/// `w'(z) = -2 z w(z) + 2i / sqrt(pi)`
pub fn w_prime(z: C64) -> Result<C64> {
    Ok(-2.0 * z * w(z)? + C64::new(0.0, 2.0 * FRAC_1_SQRT_PI))
}

fn exp_neg_sq(z: C64) -> Result<C64> {
    let e = (-z * z).exp();
    if e.re.is_finite() && e.im.is_finite() {
        Ok(e)
    } else {
        Err(Error::Overflow { re: z.re, im: z.im })
    }
}

fn upper(z: C64) -> (C64, Regime) {
    let r = z.norm();
    let (mut w, regime) = if r < SERIES_RADIUS {
        (series(z), Regime::Series)
    } else if r < CF_RADIUS {
        (weideman(z), Regime::Rational)
    } else {
        (continued_fraction(z), Regime::ContinuedFraction)
    };
    if z.im == 0.0 {
        // Re w(x) = exp(-x^2) exactly; the schemes above only resolve it absolutely.
        w.re = (-z.re * z.re).exp();
    }
    (w, regime)
}

/// `sum_n (iz)^n / Gamma(n/2 + 1)`
fn series(z: C64) -> C64 {
    let iz = C64::i() * z;
    let iz2 = iz * iz;
    let mut even = C64::new(1.0, 0.0);
    let mut odd = iz * 2.0 * FRAC_1_SQRT_PI;
    let mut sum = even + odd;
    for k in 0..60 {
        let kf = k as f64;
        // Gamma(k + 2) = (k + 1) Gamma(k + 1); Gamma(k + 5/2) = (k + 3/2) Gamma(k + 3/2)
        even *= iz2 / (kf + 1.0);
        odd *= iz2 / (kf + 1.5);
        sum += even + odd;
        if even.norm() + odd.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn continued_fraction(z: C64) -> C64 {
    let mut tail = z;
    for n in (1..=CF_TERMS).rev() {
        tail = z - (n as f64 * 0.5) / tail;
    }
    C64::i() * FRAC_1_SQRT_PI / tail
}

struct Weideman {
    l: f64,
    /// Highest degree first.
    coeffs: Vec<f64>,
}

fn weideman_table() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_N;
        let m = 2 * n;
        let l = (n as f64 / 2f64.sqrt()).sqrt();
        let samples: Vec<(f64, f64)> = (-(m as i64) + 1..m as i64)
            .map(|k| {
                let theta = k as f64 * PI / m as f64;
                let t = l * (theta / 2.0).tan();
                (theta, (-t * t).exp() * (l * l + t * t))
            })
            .collect();
        let mut coeffs: Vec<f64> = (1..=n)
            .map(|j| {
                samples
                    .iter()
                    .map(|&(theta, f)| f * (j as f64 * theta).cos())
                    .sum::<f64>()
                    / (2 * m) as f64
            })
            .collect();
        coeffs.reverse();
        Weideman { l, coeffs }
    })
}

fn weideman(z: C64) -> C64 {
    let tab = weideman_table();
    let iz = C64::i() * z;
    let den = tab.l - iz;
    let zz = (tab.l + iz) / den;
    let p = tab
        .coeffs
        .iter()
        .fold(C64::new(0.0, 0.0), |acc, &a| acc * zz + a);
    2.0 * p / (den * den) + FRAC_1_SQRT_PI / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin() {
        assert_eq!(w(C64::new(0.0, 0.0)).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn imaginary_unit() {
        // e * erfc(1)
        let v = w(C64::new(0.0, 1.0)).unwrap();
        assert!((v.re - 0.427_583_576_155_807).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn asymptotic_form() {
        let z = C64::new(0.0, 10.0);
        let a = w_asymptotic(z).unwrap();
        assert!((a.re - 1.0 / (10.0 * PI.sqrt())).abs() < 1e-15);
        let exact = w(z).unwrap();
        assert!((exact.re - 0.056_140_992_743_822_6).abs() < 1e-13);
        // relative gap is O(|z|^-2) = O(1e-2)
        assert!((a - exact).norm() / exact.norm() < 1e-2);

        let z = C64::new(10.0, 0.0);
        let a = w_asymptotic(z).unwrap();
        let exact = w(z).unwrap();
        assert!((a - exact).norm() <= 1e-2 * exact.norm());

        let z = C64::new(0.5, -5.0);
        let a = w_asymptotic(z).unwrap();
        let e = 2.0 * (-z * z).exp();
        assert!(e.norm() > (C64::i() * FRAC_1_SQRT_PI / z).norm() * 10.0);
        assert!((a - w(z).unwrap()).norm() < 1e-2 * a.norm());

        assert!(w_asymptotic(C64::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            w(C64::new(0.0, -40.0)),
            Err(Error::Overflow { .. })
        ));
        assert!(w(C64::new(0.0, -20.0)).is_ok());
    }

    #[test]
    fn regimes_are_reported() {
        assert_eq!(eval(C64::new(0.1, 0.1)).unwrap().regime, Regime::Series);
        assert_eq!(eval(C64::new(2.0, 1.0)).unwrap().regime, Regime::Rational);
        assert_eq!(
            eval(C64::new(20.0, 1.0)).unwrap().regime,
            Regime::ContinuedFraction
        );
    }
}
