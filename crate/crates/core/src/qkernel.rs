//! Direct q-series evaluation of theta functions with integer
//! characteristics, their x- and τ-derivatives, the ϑ-constants, the
//! Hurwitz series for `g2`, `g3`, `η`, and the Dedekind `η̂`.
//!
//! The kernel never reduces τ; callers that need fast convergence compose
//! with [`crate::modular::reduce_to_fundamental`]. Inside the standard
//! fundamental domain `|q| ≤ e^{-π√3/2}` and fewer than 25 terms reach
//! double precision.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{imag_unit, int, lit, re, spin, to_c64, Real};

/// Modulus τ in the upper half plane together with its nome `q = e^{πiτ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tau<T: Real> {
    value: Complex<T>,
    nome: Complex<T>,
}

impl<T: Real> Tau<T> {
    pub fn new(value: Complex<T>) -> Result<Self> {
        if !(value.im > T::zero()) || !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain {
                im_tau: value.im.to_f64().unwrap_or(f64::NAN),
            });
        }
        let nome = (imag_unit::<T>() * T::PI() * value).exp();
        Ok(Self { value, nome })
    }

    pub fn from_parts(re_part: T, im_part: T) -> Result<Self> {
        Self::new(Complex::new(re_part, im_part))
    }

    #[inline]
    pub fn value(&self) -> Complex<T> {
        self.value
    }

    /// `q = e^{πiτ}`.
    #[inline]
    pub fn nome(&self) -> Complex<T> {
        self.nome
    }

    /// `q² = e^{2πiτ}`, the expansion variable of the Hurwitz series.
    #[inline]
    pub fn nome_squared(&self) -> Complex<T> {
        self.nome * self.nome
    }
}

/// Integer characteristic `(α, β)`.
///
/// `(α, β) mod 2` selects the classical function:
/// `(1,1) → −θ₁`, `(1,0) → θ₂`, `(0,0) → θ₃`, `(0,1) → θ₄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Characteristic {
    pub alpha: i64,
    pub beta: i64,
}

impl Characteristic {
    pub const fn new(alpha: i64, beta: i64) -> Self {
        Self { alpha, beta }
    }

    pub const THETA1_NEG: Self = Self::new(1, 1);
    pub const THETA2: Self = Self::new(1, 0);
    pub const THETA3: Self = Self::new(0, 0);
    pub const THETA4: Self = Self::new(0, 1);

    /// Characteristic of the classical `θ_k` (with `θ₁ = −θ₁₁`).
    pub fn classical(k: u8) -> Self {
        match k {
            1 => Self::THETA1_NEG,
            2 => Self::THETA2,
            3 => Self::THETA3,
            4 => Self::THETA4,
            _ => panic!("classical theta index must be 1..=4, got {k}"),
        }
    }

    /// Parity `ε = (⟨αβ⟩ + 1)/2`: 0 for the odd function, 1 for the even ones.
    pub fn parity(&self) -> u8 {
        if spin(self.alpha * self.beta) == 1 {
            1
        } else {
            0
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 0
    }

    /// Representative in `{0,1}²` and the exact sign relating the two:
    /// `θ_{αβ} = sign · θ_{α₀β₀}`.
    pub fn reduce(&self) -> (Self, i64) {
        let a0 = self.alpha.rem_euclid(2);
        let b0 = self.beta.rem_euclid(2);
        let b_shift = self.beta.div_euclid(2);
        (Self::new(a0, b0), spin(a0 * b_shift))
    }

    /// Index `k` and sign with `θ_{αβ} = sign · θ_k`.
    pub fn classical_index(&self) -> (u8, i64) {
        let (r, s) = self.reduce();
        match (r.alpha, r.beta) {
            (1, 1) => (1, -s),
            (1, 0) => (2, s),
            (0, 0) => (3, s),
            _ => (4, s),
        }
    }
}

impl std::fmt::Display for Characteristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-15,
            max_terms: 512,
        }
    }
}

impl EvalOptions {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must be > 0 and max_terms >= 1 (got {rel_tol}, {max_terms})"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

/// Result of a truncated series together with its truncation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue<T: Real> {
    pub value: Complex<T>,
    pub terms_used: usize,
    pub tail_estimate: T,
}

/// Sums `f(k) + f(-k-α₀)` pairwise outward from the centre index.
///
/// Stops once two consecutive pairs each fall below `rel_tol·|partial|`.
/// Near an exact zero of the sum the round-off floor `ε·max|term|` is used
/// as the scale instead, since no smaller tail is meaningful there.
fn paired_sum<T: Real, F>(odd_centre: bool, opts: &EvalOptions, mut term: F) -> Result<ThetaValue<T>>
where
    F: FnMut(i64) -> Complex<T>,
{
    let tol: T = lit(opts.rel_tol);
    let mut partial = Complex::new(T::zero(), T::zero());
    let mut max_term = T::zero();
    let mut terms = 0usize;
    let mut k: i64 = 0;
    if !odd_centre {
        partial = term(0);
        max_term = partial.norm();
        terms = 1;
        k = 1;
    }
    let mut quiet = 0;
    let mut last_pair = T::zero();
    loop {
        if terms + 2 > opts.max_terms.max(2) {
            return Err(Error::Truncation {
                partial: to_c64(partial),
                tail: last_pair.to_f64().unwrap_or(f64::NAN),
                terms,
            });
        }
        let mirror = if odd_centre { -k - 1 } else { -k };
        let a = term(k);
        let b = term(mirror);
        terms += 2;
        max_term = max_term.max(a.norm()).max(b.norm());
        let pair = a + b;
        partial = partial + pair;
        last_pair = pair.norm();
        let scale = partial.norm().max(T::epsilon() * max_term);
        let magnitude = a.norm() + b.norm();
        if magnitude <= tol * scale || magnitude == T::zero() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        k += 1;
    }
    Ok(ThetaValue {
        value: partial,
        terms_used: terms,
        tail_estimate: last_pair,
    })
}

/// Core series: `Σ_k (2πiκ)^dx (πiκ²)^dtau exp(πiκ²τ + 2πiκ(x + β/2))`
/// with `κ = k + α/2`, for an already reduced characteristic.
fn series_raw<T: Real>(
    ch: Characteristic,
    x: Complex<T>,
    tau: &Tau<T>,
    dx: u32,
    dtau: u32,
    opts: &EvalOptions,
) -> Result<ThetaValue<T>> {
    let (red, sign) = ch.reduce();
    let i = imag_unit::<T>();
    let pi = T::PI();
    let half: T = lit(0.5);
    let shift = x + re(int::<T>(red.beta) * half);
    let tau_v = tau.value();
    let mut out = paired_sum(red.alpha == 1, opts, |k| {
        let kappa = int::<T>(k) + int::<T>(red.alpha) * half;
        let phase = i * pi * (tau_v * (kappa * kappa) + shift * (kappa + kappa));
        let mut t = phase.exp();
        if dx > 0 {
            t = t * (i * (pi + pi) * kappa).powu(dx);
        }
        if dtau > 0 {
            t = t * (i * pi * kappa * kappa).powu(dtau);
        }
        t
    })?;
    if sign < 0 {
        out.value = -out.value;
    }
    Ok(out)
}

/// `θ_{αβ}(x|τ)` for an arbitrary integer characteristic.
pub fn theta<T: Real>(ch: Characteristic, x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<ThetaValue<T>> {
    series_raw(ch, x, tau, 0, 0, opts)
}

/// `∂^order θ_{αβ}/∂x^order`, term-wise.
pub fn theta_dx<T: Real>(
    ch: Characteristic,
    x: Complex<T>,
    tau: &Tau<T>,
    order: u32,
    opts: &EvalOptions,
) -> Result<Complex<T>> {
    if order == 0 {
        return Err(Error::InvalidArgument("derivative order must be >= 1".into()));
    }
    Ok(series_raw(ch, x, tau, order, 0, opts)?.value)
}

/// `∂θ_{αβ}/∂τ`, term-wise.
pub fn theta_dtau<T: Real>(ch: Characteristic, x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    Ok(series_raw(ch, x, tau, 0, 1, opts)?.value)
}

/// Mixed term-wise derivative `∂^{dx+dtau} θ / ∂x^{dx} ∂τ^{dtau}`; `dx = dtau = 0`
/// is the plain value.
pub fn theta_mixed<T: Real>(
    ch: Characteristic,
    x: Complex<T>,
    tau: &Tau<T>,
    dx: u32,
    dtau: u32,
    opts: &EvalOptions,
) -> Result<Complex<T>> {
    Ok(series_raw(ch, x, tau, dx, dtau, opts)?.value)
}

/// Classical `θ_k(x|τ)`, `k ∈ 1..=4`.
pub fn theta_k<T: Real>(k: u8, x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    let v = theta(Characteristic::classical(k), x, tau, opts)?.value;
    Ok(if k == 1 { -v } else { v })
}

/// Classical `∂^order θ_k / ∂x^order`.
pub fn theta_k_dx<T: Real>(k: u8, x: Complex<T>, tau: &Tau<T>, order: u32, opts: &EvalOptions) -> Result<Complex<T>> {
    let v = theta_dx(Characteristic::classical(k), x, tau, order, opts)?;
    Ok(if k == 1 { -v } else { v })
}

/// ϑ-constant `ϑ_kind(τ) = θ_kind(0|τ)` for `kind ∈ {2,3,4}`.
pub fn vartheta<T: Real>(kind: u8, tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    if !(2..=4).contains(&kind) {
        return Err(Error::InvalidArgument(format!("vartheta kind must be 2, 3 or 4, got {kind}")));
    }
    theta_k(kind, Complex::new(T::zero(), T::zero()), tau, opts)
}

/// ϑ-constant with an arbitrary characteristic, `θ_{αβ}(0|τ)`.
pub fn vartheta_char<T: Real>(ch: Characteristic, tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    if ch.is_odd() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    Ok(theta(ch, Complex::new(T::zero(), T::zero()), tau, opts)?.value)
}

/// The three ϑ-constants `(ϑ₂, ϑ₃, ϑ₄)`.
pub fn varthetas<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<[Complex<T>; 3]> {
    Ok([vartheta(2, tau, opts)?, vartheta(3, tau, opts)?, vartheta(4, tau, opts)?])
}

/// One-sided sum `Σ_{k≥1} term(k)` stopped when `weight(k)·|q²|^k` falls
/// below `rel_tol` times the accumulated magnitude.
fn hurwitz_sum<T: Real, F>(tau: &Tau<T>, base: Complex<T>, weight_pow: i32, opts: &EvalOptions, mut term: F) -> Result<ThetaValue<T>>
where
    F: FnMut(i64, Complex<T>) -> Complex<T>,
{
    let tol: T = lit(opts.rel_tol);
    let q2 = tau.nome_squared();
    let r = q2.norm();
    let mut acc = base;
    let mut qk = Complex::new(T::one(), T::zero());
    let mut last = T::zero();
    for k in 1..=opts.max_terms as i64 {
        qk = qk * q2;
        let t = term(k, qk);
        acc = acc + t;
        let kk = int::<T>(k);
        let bound = kk.powi(weight_pow.max(0)).max(T::one()) * r.powi(k as i32);
        last = t.norm();
        if bound <= tol * acc.norm().max(base.norm()) || qk.norm() == T::zero() {
            return Ok(ThetaValue {
                value: acc,
                terms_used: k as usize,
                tail_estimate: last,
            });
        }
    }
    Err(Error::Truncation {
        partial: to_c64(acc),
        tail: last.to_f64().unwrap_or(f64::NAN),
        terms: opts.max_terms,
    })
}

/// Hurwitz series `g₂(τ) = 20π⁴{1/240 + Σ k³q^{2k}/(1−q^{2k})}`.
pub fn g2<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    Ok(g2_value(tau, opts)?.value)
}

pub fn g2_value<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<ThetaValue<T>> {
    let base = re(T::one() / int::<T>(240));
    let mut s = hurwitz_sum(tau, base, 3, opts, |k, qk| {
        let k3 = int::<T>(k * k * k);
        qk * k3 / (re(T::one()) - qk)
    })?;
    let pi4 = T::PI().powi(4);
    s.value = s.value * (int::<T>(20) * pi4);
    s.tail_estimate = s.tail_estimate * int::<T>(20) * pi4;
    Ok(s)
}

/// Hurwitz series `g₃(τ) = (7/3)π⁶{1/504 − Σ k⁵q^{2k}/(1−q^{2k})}`.
pub fn g3<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    Ok(g3_value(tau, opts)?.value)
}

pub fn g3_value<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<ThetaValue<T>> {
    let base = re(T::one() / int::<T>(504));
    let mut s = hurwitz_sum(tau, base, 5, opts, |k, qk| {
        let k5 = int::<T>(k).powi(5);
        -(qk * k5 / (re(T::one()) - qk))
    })?;
    let c = int::<T>(7) / int::<T>(3) * T::PI().powi(6);
    s.value = s.value * c;
    s.tail_estimate = s.tail_estimate * c;
    Ok(s)
}

/// Weierstrass `η(τ) = ζ(1|1,τ) = 2π²{1/24 − Σ q^{2k}/(1−q^{2k})²}`.
pub fn eta_w<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    Ok(eta_w_value(tau, opts)?.value)
}

pub fn eta_w_value<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<ThetaValue<T>> {
    let base = re(T::one() / int::<T>(24));
    let mut s = hurwitz_sum(tau, base, 1, opts, |_, qk| {
        let d = re(T::one()) - qk;
        -(qk / (d * d))
    })?;
    let c = int::<T>(2) * T::PI() * T::PI();
    s.value = s.value * c;
    s.tail_estimate = s.tail_estimate * c;
    Ok(s)
}

/// `dg₂/dτ` by term-wise differentiation of the Hurwitz series.
pub fn g2_dtau<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    let two_pi_i = imag_unit::<T>() * (T::PI() + T::PI());
    let s = hurwitz_sum(tau, re(T::zero()), 4, opts, |k, qk| {
        let d = re(T::one()) - qk;
        qk * int::<T>(k.pow(4)) / (d * d)
    })?;
    Ok(s.value * two_pi_i * (int::<T>(20) * T::PI().powi(4)))
}

/// `dg₃/dτ` by term-wise differentiation.
pub fn g3_dtau<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    let two_pi_i = imag_unit::<T>() * (T::PI() + T::PI());
    let s = hurwitz_sum(tau, re(T::zero()), 6, opts, |k, qk| {
        let d = re(T::one()) - qk;
        -(qk * int::<T>(k).powi(6) / (d * d))
    })?;
    Ok(s.value * two_pi_i * (int::<T>(7) / int::<T>(3) * T::PI().powi(6)))
}

/// `dη/dτ` by term-wise differentiation.
pub fn eta_w_dtau<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    let two_pi_i = imag_unit::<T>() * (T::PI() + T::PI());
    let s = hurwitz_sum(tau, re(T::zero()), 1, opts, |k, qk| {
        let one = re(T::one());
        let d = one - qk;
        -(qk * int::<T>(k) * (one + qk) / (d * d * d))
    })?;
    Ok(s.value * two_pi_i * (int::<T>(2) * T::PI() * T::PI()))
}

/// Pentagonal-number series shared by `η̂` and its τ-derivative:
/// `Σ (−1)^k w(k) exp(πiτ(6k+1)²/12)`.
fn pentagonal<T: Real>(tau: &Tau<T>, dtau: u32, opts: &EvalOptions) -> Result<ThetaValue<T>> {
    let i = imag_unit::<T>();
    let pi = T::PI();
    let tv = tau.value();
    let pref = (i * pi * tv / int::<T>(12)).exp();
    let mut out = paired_sum(false, opts, |k| {
        let mut t = (i * pi * tv * int::<T>(3 * k * k + k)).exp();
        if dtau > 0 {
            let m = int::<T>(6 * k + 1);
            t = t * (i * pi * m * m / int::<T>(12)).powu(dtau);
        }
        if spin(k) < 0 {
            -t
        } else {
            t
        }
    })?;
    out.value = out.value * pref;
    out.tail_estimate = out.tail_estimate * pref.norm();
    Ok(out)
}

/// Dedekind `η̂(τ) = e^{πiτ/12} Σ (−1)^k e^{(3k²+k)πiτ}`.
pub fn etahat<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    Ok(pentagonal(tau, 0, opts)?.value)
}

pub fn etahat_value<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<ThetaValue<T>> {
    pentagonal(tau, 0, opts)
}

/// `dη̂/dτ`, term-wise.
pub fn etahat_dtau<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    Ok(pentagonal(tau, 1, opts)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tau(re: f64, im: f64) -> Tau<f64> {
        Tau::from_parts(re, im).unwrap()
    }

    /// Unpaired brute-force sum with a fixed term count.
    fn brute_theta(ch: Characteristic, x: Complex64, t: Complex64, n: i64) -> Complex64 {
        let i = Complex64::i();
        (-n..=n)
            .map(|k| {
                let kk = k as f64 + ch.alpha as f64 / 2.0;
                (i * PI * kk * kk * t + 2.0 * PI * i * kk * (x + ch.beta as f64 / 2.0)).exp()
            })
            .sum()
    }

    #[test]
    fn theta1_vanishes_at_origin() {
        let o = EvalOptions::default();
        for t in [tau(0.0, 1.0), tau(0.3, 0.9), tau(-0.4, 2.0)] {
            let v = theta(Characteristic::THETA1_NEG, c(0.0, 0.0), &t, &o).unwrap();
            assert!(v.value.norm() < 1e-15, "{:?}", v);
        }
    }

    #[test]
    fn theta3_cusp_limit() {
        let v = theta(Characteristic::THETA3, c(0.0, 0.0), &tau(0.0, 50.0), &EvalOptions::default()).unwrap();
        assert!((v.value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn theta3_matches_brute_force() {
        let x = c(0.1, 0.2);
        let t = tau(0.3, 1.1);
        let v = theta(Characteristic::THETA3, x, &t, &EvalOptions::default()).unwrap();
        let b = brute_theta(Characteristic::THETA3, x, t.value(), 200);
        assert!((v.value - b).norm() / b.norm() < 1e-13);
        assert!(v.tail_estimate <= 1e-15 * v.value.norm());
        assert!(v.terms_used < 25);
    }

    #[test]
    fn arbitrary_characteristics_match_brute_force() {
        let x = c(0.23, -0.11);
        let t = tau(-0.2, 0.95);
        for a in -3..=3 {
            for b in -3..=3 {
                let ch = Characteristic::new(a, b);
                let v = theta(ch, x, &t, &EvalOptions::default()).unwrap().value;
                let bf = brute_theta(ch, x, t.value(), 60);
                assert!((v - bf).norm() < 1e-13 * (1.0 + bf.norm()), "{ch}");
            }
        }
    }

    #[test]
    fn jacobi_derivative_formula() {
        let t = tau(0.0, 1.3);
        let o = EvalOptions::default();
        let d = theta_dx(Characteristic::THETA1_NEG, c(0.0, 0.0), &t, 1, &o).unwrap();
        let eh = etahat(&t, &o).unwrap();
        // θ₁₁ = −θ₁, so θ₁₁′(0) = −2πη̂³
        assert!((d + 2.0 * PI * eh.powu(3)).norm() < 1e-12 * d.norm());
        let d3 = theta_dx(Characteristic::THETA3, c(0.0, 0.0), &t, 1, &o).unwrap();
        assert!(d3.norm() < 1e-14);
    }

    #[test]
    fn second_x_derivative_vs_finite_difference() {
        let t = tau(0.1, 1.2);
        let o = EvalOptions::default();
        let ch = Characteristic::THETA2;
        let x = c(0.2, 0.0);
        let h = 1e-4;
        let f = |z: Complex64| theta(ch, z, &t, &o).unwrap().value;
        let fd = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        let d2 = theta_dx(ch, x, &t, 2, &o).unwrap();
        assert!((fd - d2).norm() / d2.norm() < 1e-7);
    }

    #[test]
    fn tau_derivative_examples() {
        let o = EvalOptions::default();
        let t = tau(0.2, 1.4);
        let x0 = c(0.0, 0.0);
        let dt = theta_dtau(Characteristic::THETA3, x0, &t, &o).unwrap();
        let dxx = theta_dx(Characteristic::THETA3, x0, &t, 2, &o).unwrap();
        let heat = dxx / (4.0 * PI * Complex64::i());
        assert!((dt - heat).norm() < 1e-12 * dt.norm());

        assert!(theta_dtau(Characteristic::THETA1_NEG, x0, &t, &o).unwrap().norm() < 1e-14);

        let ch = Characteristic::THETA4;
        let x = c(0.15, 0.0);
        let h = 1e-5;
        let f = |s: Complex64| theta(ch, x, &Tau::new(s).unwrap(), &o).unwrap().value;
        let fd = (f(t.value() + h) - f(t.value() - h)) / (2.0 * h);
        let d = theta_dtau(ch, x, &t, &o).unwrap();
        assert!((fd - d).norm() / d.norm() < 1e-8);
    }

    #[test]
    fn vartheta_cusp_and_quartic() {
        let o = EvalOptions::default();
        let t = tau(0.0, 50.0);
        assert!((vartheta(3, &t, &o).unwrap() - 1.0).norm() < 1e-15);
        assert!(vartheta(2, &t, &o).unwrap().norm() < 1e-15);
        let t = tau(0.31, 0.97);
        let [v2, v3, v4] = varthetas(&t, &o).unwrap();
        let r = v3.powu(4) - v2.powu(4) - v4.powu(4);
        assert!(r.norm() < 1e-13 * v3.powu(4).norm());
        assert!(vartheta(1, &t, &o).is_err());
    }

    #[test]
    fn hurwitz_cusp_limits() {
        let o = EvalOptions::default();
        let t = tau(0.0, 50.0);
        assert!((g2(&t, &o).unwrap() - PI.powi(4) / 12.0).norm() < 1e-14 * PI.powi(4) / 12.0);
        assert!((g3(&t, &o).unwrap() - PI.powi(6) / 216.0).norm() < 1e-14 * PI.powi(6) / 216.0);
        assert!((eta_w(&t, &o).unwrap() - PI * PI / 12.0).norm() < 1e-14);
    }

    #[test]
    fn symmetry_forced_zeros() {
        let o = EvalOptions::default();
        let sq = tau(0.0, 1.0);
        assert!(g3(&sq, &o).unwrap().norm() <= 1e-13 * g2(&sq, &o).unwrap().norm());
        let rho = Tau::new(Complex64::from_polar(1.0, PI / 3.0)).unwrap();
        assert!(g2(&rho, &o).unwrap().norm() <= 1e-13 * g3(&rho, &o).unwrap().norm());
    }

    #[test]
    fn eta_is_log_derivative_of_etahat() {
        let o = EvalOptions::default();
        let t = tau(0.3, 1.2);
        let h = 1e-5;
        let l = |s: Complex64| etahat(&Tau::new(s).unwrap(), &o).unwrap().ln();
        let dl = (l(t.value() + h) - l(t.value() - h)) / (2.0 * h);
        let e = eta_w(&t, &o).unwrap();
        assert!((e - PI / Complex64::i() * dl).norm() < 1e-10 * e.norm());
        // and the term-wise derivative agrees
        let exact = etahat_dtau(&t, &o).unwrap() / etahat(&t, &o).unwrap();
        assert!((e - PI / Complex64::i() * exact).norm() < 1e-13 * e.norm());
    }

    #[test]
    fn etahat_cusp_and_product_form() {
        let o = EvalOptions::default();
        let t = tau(0.0, 50.0);
        let pref = (Complex64::i() * PI * t.value() / 12.0).exp();
        assert!((etahat(&t, &o).unwrap() - pref).norm() < 1e-15 * pref.norm());

        let t = tau(0.0, 1.0);
        let q2 = t.nome_squared();
        let prod: Complex64 = (1..=60).map(|k| 1.0 - q2.powi(k)).product();
        let oracle = (Complex64::i() * PI * t.value() / 12.0).exp() * prod;
        assert!((etahat(&t, &o).unwrap() - oracle).norm() < 1e-14 * oracle.norm());
    }

    #[test]
    fn hurwitz_derivatives_vs_finite_difference() {
        let o = EvalOptions::default();
        let t = tau(0.3, 1.1);
        let h = 1e-5;
        type F = fn(&Tau<f64>, &EvalOptions) -> Result<Complex64>;
        let pairs: [(F, F); 3] = [(g2, g2_dtau), (g3, g3_dtau), (eta_w, eta_w_dtau)];
        for (f, df) in pairs {
            let v = |s: Complex64| f(&Tau::new(s).unwrap(), &o).unwrap();
            let fd = (v(t.value() + h) - v(t.value() - h)) / (2.0 * h);
            let d = df(&t, &o).unwrap();
            assert!((fd - d).norm() < 1e-7 * d.norm());
        }
    }

    #[test]
    fn domain_and_options_errors() {
        assert!(matches!(Tau::from_parts(0.3, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(Tau::from_parts(0.3, -1.0), Err(Error::Domain { .. })));
        assert!(EvalOptions::new(0.0, 10).is_err());
        assert!(EvalOptions::new(1e-15, 0).is_err());
    }

    #[test]
    fn truncation_error_carries_partial() {
        let o = EvalOptions::new(1e-15, 4).unwrap();
        let t = tau(0.0, 0.01);
        match theta(Characteristic::THETA3, c(0.0, 0.0), &t, &o) {
            Err(Error::Truncation { terms, .. }) => assert!(terms <= 4),
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn classical_index_mapping() {
        assert_eq!(Characteristic::new(1, 1).classical_index(), (1, -1));
        assert_eq!(Characteristic::new(1, 0).classical_index(), (2, 1));
        assert_eq!(Characteristic::new(0, 0).classical_index(), (3, 1));
        assert_eq!(Characteristic::new(0, 1).classical_index(), (4, 1));
        assert_eq!(Characteristic::new(1, 3).classical_index(), (1, 1));
        assert_eq!(Characteristic::new(1, 1).parity(), 0);
        assert_eq!(Characteristic::new(2, 4).parity(), 1);
    }

    #[test]
    fn single_precision_instantiation() {
        let t = Tau::<f32>::from_parts(0.0, 1.0).unwrap();
        let o = EvalOptions::new(1e-7, 64).unwrap();
        let v = theta(Characteristic::THETA3, Complex::new(0.0f32, 0.0), &t, &o).unwrap();
        let d = theta(Characteristic::THETA3, Complex64::new(0.0, 0.0), &tau(0.0, 1.0), &EvalOptions::default()).unwrap();
        assert!((v.value.re as f64 - d.value.re).abs() < 1e-6);
    }
}
