//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All evaluators are generic over a real floating type `T` and work on
//! `Complex<T>`. Exact coefficient tables live in `BigRational` and are
//! converted to `T` only at evaluation time.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn int<T: Real>(v: i64) -> T {
    T::from_i64(v).expect("integer representable in scalar type")
}

#[inline]
pub fn re<T: Real>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `i^n`, computed from `n mod 4` without going through logarithms.
pub fn i_pow<T: Real>(n: i64) -> Complex<T> {
    match n.rem_euclid(4) {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// `(-i)^n`.
pub fn neg_i_pow<T: Real>(n: i64) -> Complex<T> {
    i_pow(-n)
}

/// `(-1)^n` as an integer sign, the `⟨n⟩` symbol.
#[inline]
pub fn spin(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Integer part of `n / 2`, truncated toward zero.
#[inline]
pub fn half_trunc(n: i64) -> i64 {
    n / 2
}

/// `exp(πi·r)` for a rational exponent `r = num/den`, reduced mod 2 first.
pub fn exp_pi_i_rational<T: Real>(num: i64, den: i64) -> Complex<T> {
    assert!(den > 0, "denominator must be positive");
    let period = 2 * den;
    let n = num.rem_euclid(period);
    let angle = T::PI() * int::<T>(n) / int::<T>(den);
    Complex::new(angle.cos(), angle.sin())
}

pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(lit(z.re), lit(z.im))
}

/// Relative distance `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff<T: Real>(a: Complex<T>, b: Complex<T>, floor: T) -> T {
    let scale = a.norm().max(b.norm()).max(floor);
    (a - b).norm() / scale
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (no spaces; `i` alone means 1·i).
pub fn parse_complex(s: &str) -> Option<Complex<f64>> {
    let s = s.trim();
    if s.is_empty() || s.contains(char::is_whitespace) {
        return None;
    }
    let unit = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse::<f64>().ok().filter(|v| v.is_finite()),
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().filter(|v| v.is_finite()).map(|v| Complex::new(v, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().ok().filter(|v| v.is_finite())?;
            Some(Complex::new(re, unit(&body[k..])?))
        }
        None => Some(Complex::new(0.0, unit(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_powers_cycle() {
        for n in -9..9 {
            let direct = imag_unit::<f64>().powi(n as i32);
            assert!((i_pow::<f64>(n) - direct).norm() < 1e-15, "n={n}");
            assert!((neg_i_pow::<f64>(n) - (-imag_unit::<f64>()).powi(n as i32)).norm() < 1e-15);
        }
    }

    #[test]
    fn spin_and_half() {
        assert_eq!(spin(-3), -1);
        assert_eq!(spin(4), 1);
        assert_eq!(half_trunc(-3), -1);
        assert_eq!(half_trunc(3), 1);
    }

    #[test]
    fn rational_phase() {
        let z = exp_pi_i_rational::<f64>(-3, 4);
        let w = Complex::new(0.0, -3.0 * std::f64::consts::PI / 4.0).exp();
        assert!((z - w).norm() < 1e-15);
        assert!((exp_pi_i_rational::<f64>(25, 12) - exp_pi_i_rational::<f64>(1, 12)).norm() < 1e-15);
    }

    #[test]
    fn complex_literals() {
        let c = |re, im| Some(Complex::new(re, im));
        assert_eq!(parse_complex("0"), c(0.0, 0.0));
        assert_eq!(parse_complex("0+50i"), c(0.0, 50.0));
        assert_eq!(parse_complex("0.3-1.2i"), c(0.3, -1.2));
        assert_eq!(parse_complex("-0.4+0.9i"), c(-0.4, 0.9));
        assert_eq!(parse_complex("1.5i"), c(0.0, 1.5));
        assert_eq!(parse_complex("-i"), c(0.0, -1.0));
        assert_eq!(parse_complex("2+i"), c(2.0, 1.0));
        assert_eq!(parse_complex("1e-3-2e-2i"), c(1e-3, -2e-2));
        assert_eq!(parse_complex("-2.5e+1"), c(-25.0, 0.0));
        for bad in ["", "abc", "1 + 2i", "1+2j", "1+2i+3i", "i1", "nan", "1++2i"] {
            assert_eq!(parse_complex(bad), None, "{bad}");
        }
    }
}
