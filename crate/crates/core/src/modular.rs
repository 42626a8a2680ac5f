//! Modular group machinery: fundamental-domain reduction, the eighth-root
//! multiplier ε_θ, the transformation laws of θ₁, η̂, η and of θ with
//! characteristics, and the half-period shift formulas.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qkernel::{etahat, eta_w, theta, theta_dx, vartheta_char, Characteristic, EvalOptions, Tau};
use crate::scalar::{exp_pi_i_rational, i_pow, imag_unit, int, lit, neg_i_pow, spin, Real};

/// Integer matrix `(a b; c d)` with `ad − bc = 1`, acting by `τ ↦ (aτ+b)/(cτ+d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMap {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}, {c}, {d}) has determinant {} instead of 1",
                a * d - b * c
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };
    pub const T: Self = Self { a: 1, b: 1, c: 0, d: 1 };
    pub const S: Self = Self { a: 0, b: -1, c: 1, d: 0 };

    pub fn translation(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }
    }

    /// Representative with `c > 0`, or `c = 0, a = d = 1`.
    pub fn normalized(&self) -> Self {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            Self {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            *self
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.c > 0 || (self.c == 0 && self.a == 1 && self.d == 1)
    }

    pub fn is_translation(&self) -> bool {
        self.c == 0
    }

    /// Matrix product `self · other`; acting with it means acting with `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply<T: Real>(&self, tau: Complex<T>) -> Complex<T> {
        (tau * int::<T>(self.a) + int::<T>(self.b)) / (tau * int::<T>(self.c) + int::<T>(self.d))
    }

    pub fn apply_tau<T: Real>(&self, tau: &Tau<T>) -> Result<Tau<T>> {
        Tau::new(self.apply(tau.value()))
    }

    /// Automorphy factor `cτ + d`.
    pub fn cocycle<T: Real>(&self, tau: Complex<T>) -> Complex<T> {
        tau * int::<T>(self.c) + int::<T>(self.d)
    }

    fn require_normalized(&self) -> Result<Self> {
        let n = self.normalized();
        if n.c <= 0 {
            return Err(Error::Normalization {
                a: self.a,
                b: self.b,
                c: self.c,
                d: self.d,
            });
        }
        Ok(n)
    }
}

impl std::fmt::Display for UnimodularMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

/// Shift by `n/2 + mτ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfPeriodShift {
    pub n: i64,
    pub m: i64,
}

impl HalfPeriodShift {
    pub const fn new(n: i64, m: i64) -> Self {
        Self { n, m }
    }

    pub fn point<T: Real>(&self, tau: &Tau<T>) -> Complex<T> {
        let half: T = lit(0.5);
        tau.value() * (int::<T>(self.m) * half) + int::<T>(self.n) * half
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionResult<T: Real> {
    pub reduced_tau: Tau<T>,
    /// Satisfies `reduced_tau = map · tau`.
    pub map: UnimodularMap,
}

const REDUCTION_CAP: usize = 10_000;

/// Translate/invert until `|Re τ| ≤ 1/2` and `|τ| ≥ 1`.
pub fn reduce_to_fundamental<T: Real>(tau: &Tau<T>) -> Result<ReductionResult<T>> {
    let mut map = UnimodularMap::IDENTITY;
    let mut z = tau.value();
    let half: T = lit(0.5);
    // slack so that boundary points do not ping-pong under rounding
    let slack: T = lit(1e-14);
    for _ in 0..REDUCTION_CAP {
        let n = z.re.round();
        if n.abs() > T::zero() && z.re.abs() > half + slack {
            let ni = n.to_i64().ok_or_else(|| Error::Internal("translation out of range".into()))?;
            z.re = z.re - n;
            map = UnimodularMap::translation(-ni).compose(&map);
            continue;
        }
        if z.norm_sqr() < T::one() - slack {
            z = -z.inv();
            map = UnimodularMap::S.compose(&map);
            continue;
        }
        let map = map.normalized();
        // recompute from the integer map so the result is exactly the image
        let reduced = Tau::new(map.apply(tau.value()))?;
        return Ok(ReductionResult { reduced_tau: reduced, map });
    }
    Err(Error::Internal(format!(
        "fundamental-domain reduction did not terminate within {REDUCTION_CAP} steps"
    )))
}

/// Exponent `r` of `ε_θ = e^{3πi r}`, returned as an exact fraction `num/(12c)`.
///
/// The Dedekind-type sum uses the integer part of `dk/c` truncated toward
/// zero; `sign(0) = 0`.
pub fn multiplier_exponent(map: &UnimodularMap) -> Result<(i64, i64)> {
    let UnimodularMap { a, c, d, .. } = map.require_normalized()?;
    let s: i64 = (1..c).map(|k| k * ((d * k) / c)).sum();
    let sign_md = (-d).signum();
    // (a−d)/12c − d(2c−3)/6 − 1/4 − (c−1)sign(−d)/4 + s/c, over the denominator 12c
    let num = (a - d) - 2 * c * d * (2 * c - 3) - 3 * c - 3 * c * (c - 1) * sign_md + 12 * s;
    Ok((num, 12 * c))
}

/// `ε_θ(a, c, d)`, an eighth root of unity.
pub fn theta_multiplier<T: Real>(map: &UnimodularMap) -> Result<Complex<T>> {
    let (num, den) = multiplier_exponent(map)?;
    Ok(exp_pi_i_rational(3 * num, den))
}

/// Multiplier of η̂ under the map: `e^{πi r}` with the same exponent `r`.
pub fn etahat_multiplier<T: Real>(map: &UnimodularMap) -> Result<Complex<T>> {
    let n = map.normalized();
    if n.c == 0 {
        return Ok(exp_pi_i_rational(n.b, 12));
    }
    let (num, den) = multiplier_exponent(&n)?;
    Ok(exp_pi_i_rational(num, den))
}

/// `θ₁(x/(cτ+d) | Mτ)` computed from the right-hand side of the law.
pub fn transform_theta1<T: Real>(x: Complex<T>, tau: &Tau<T>, map: &UnimodularMap, opts: &EvalOptions) -> Result<Complex<T>> {
    let th1 = -theta(Characteristic::THETA1_NEG, x, tau, opts)?.value;
    Ok(theta1_factor(x, tau, map)? * th1)
}

/// The factor `P` with `θ₁(x/(cτ+d) | Mτ) = P·θ₁(x|τ)`.
pub fn theta1_factor<T: Real>(x: Complex<T>, tau: &Tau<T>, map: &UnimodularMap) -> Result<Complex<T>> {
    let m = map.normalized();
    if m.c == 0 {
        return Ok(exp_pi_i_rational(m.b, 4));
    }
    let z = m.cocycle(tau.value());
    let eps = theta_multiplier::<T>(&m)?;
    let gauss = (imag_unit::<T>() * T::PI() * int::<T>(m.c) * x * x / z).exp();
    Ok(eps * z.sqrt() * gauss)
}

/// `η̂(Mτ)` from the right-hand side `e^{πi r}·√(cτ+d)·η̂(τ)`.
pub fn transform_etahat<T: Real>(tau: &Tau<T>, map: &UnimodularMap, opts: &EvalOptions) -> Result<Complex<T>> {
    Ok(etahat_factor(tau, map)? * etahat(tau, opts)?)
}

pub fn etahat_factor<T: Real>(tau: &Tau<T>, map: &UnimodularMap) -> Result<Complex<T>> {
    let m = map.normalized();
    let mult = etahat_multiplier::<T>(&m)?;
    if m.c == 0 {
        return Ok(mult);
    }
    Ok(mult * m.cocycle(tau.value()).sqrt())
}

/// `η(Mτ) = (cτ+d)²η(τ) − (πi/2)c(cτ+d)`.
pub fn transform_eta_w<T: Real>(tau: &Tau<T>, map: &UnimodularMap, opts: &EvalOptions) -> Result<Complex<T>> {
    let e = eta_w(tau, opts)?;
    Ok(eta_w_forward(e, tau, map))
}

pub(crate) fn eta_w_forward<T: Real>(eta: Complex<T>, tau: &Tau<T>, map: &UnimodularMap) -> Complex<T> {
    let m = map.normalized();
    let z = m.cocycle(tau.value());
    let half: T = lit(0.5);
    z * z * eta - imag_unit::<T>() * T::PI() * half * int::<T>(m.c) * z
}

/// Inverse of [`eta_w_forward`]: recover `η(τ)` from `η(Mτ)`.
fn eta_w_backward<T: Real>(eta_mapped: Complex<T>, tau: &Tau<T>, map: &UnimodularMap) -> Complex<T> {
    let m = map.normalized();
    let z = m.cocycle(tau.value());
    let half: T = lit(0.5);
    (eta_mapped + imag_unit::<T>() * T::PI() * half * int::<T>(m.c) * z) / (z * z)
}

/// Image characteristic of `χ` under the map.
///
/// With `(α, β) = χ + (1, 1)` the image is `(α′ − 1, β′ − 1)` where
/// `α′ = dα − cβ`, `β′ = −bα + aβ`. Odd characteristics map to odd ones.
pub fn map_characteristic(ch: Characteristic, map: &UnimodularMap) -> Characteristic {
    let m = map.normalized();
    let (al, be) = (ch.alpha + 1, ch.beta + 1);
    Characteristic::new(m.d * al - m.c * be - 1, -m.b * al + m.a * be - 1)
}

/// The factor `P` with `θ[χ′](x/(cτ+d) | Mτ) = P·θ[χ](x|τ)`, `χ′ = map_characteristic(χ)`.
pub fn theta_char_factor<T: Real>(ch: Characteristic, x: Complex<T>, tau: &Tau<T>, map: &UnimodularMap) -> Result<Complex<T>> {
    let m = map.normalized();
    let (al, be) = (ch.alpha + 1, ch.beta + 1);
    if m.c == 0 {
        // θ[α,β](x|τ+N) = e^{πiNα²/4}·e^{−πiαδ/2}·θ[α,β+δ](x|τ) with δ = N(1+α)
        let a0 = ch.alpha;
        let n = m.b;
        return Ok(exp_pi_i_rational(n * a0 * a0 - 2 * a0 * n * al, 4));
    }
    let eps = theta_multiplier::<T>(&m)?;
    let phase = exp_pi_i_rational::<T>(
        2 * al * (m.b * m.c * be - m.d + 1) - m.c * be * (m.a * be - 2) - m.d * m.b * al * al,
        4,
    );
    let z = m.cocycle(tau.value());
    let gauss = (imag_unit::<T>() * T::PI() * int::<T>(m.c) * x * x / z).exp();
    Ok(eps * phase * z.sqrt() * gauss)
}

/// Transformed characteristic and the value of `θ[χ′](x/(cτ+d) | Mτ)` from the
/// right-hand side of the law.
pub fn transform_theta_char<T: Real>(
    ch: Characteristic,
    x: Complex<T>,
    tau: &Tau<T>,
    map: &UnimodularMap,
    opts: &EvalOptions,
) -> Result<(Characteristic, Complex<T>)> {
    let out = map_characteristic(ch, map);
    let rhs = theta(ch, x, tau, opts)?.value;
    Ok((out, theta_char_factor(ch, x, tau, map)? * rhs))
}

/// Evaluate `θ[χ](x|τ)` by moving to the reduced modulus first.
///
/// With `τ′ = Mτ` in the fundamental domain, the law is read backwards:
/// `θ[χ](x|τ) = θ[χ′](x/(cτ+d) | τ′) / P`.
pub fn theta_reduced<T: Real>(ch: Characteristic, x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<crate::qkernel::ThetaValue<T>> {
    let red = reduce_to_fundamental(tau)?;
    let m = red.map;
    let xp = x / m.cocycle(tau.value());
    let chp = map_characteristic(ch, &m);
    let mut v = theta(chp, xp, &red.reduced_tau, opts)?;
    let p = theta_char_factor(ch, x, tau, &m)?;
    v.value = v.value / p;
    v.tail_estimate = v.tail_estimate / p.norm();
    Ok(v)
}

/// Lattice constants `(g₂, g₃, η, η̂)` at τ, evaluated at the reduced modulus
/// and pulled back through their weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedConstants<T: Real> {
    pub g2: Complex<T>,
    pub g3: Complex<T>,
    pub eta_w: Complex<T>,
    pub etahat: Complex<T>,
}

pub fn constants_reduced<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<ReducedConstants<T>> {
    let red = reduce_to_fundamental(tau)?;
    let m = red.map;
    let tp = &red.reduced_tau;
    let z = m.cocycle(tau.value());
    let z2 = z * z;
    Ok(ReducedConstants {
        g2: crate::qkernel::g2(tp, opts)? / (z2 * z2),
        g3: crate::qkernel::g3(tp, opts)? / (z2 * z2 * z2),
        eta_w: eta_w_backward(eta_w(tp, opts)?, tau, &m),
        etahat: etahat(tp, opts)? / etahat_factor(tau, &m)?,
    })
}

/// `θ_{αβ}(x + n/2 + mτ/2 | τ) = θ_{α+m,β+n}(x)·e^{−πim(x + (β+n)/2 + mτ/4)}`.
pub fn shift_half_period<T: Real>(
    ch: Characteristic,
    shift: HalfPeriodShift,
    x: Complex<T>,
    tau: &Tau<T>,
    opts: &EvalOptions,
) -> Result<Complex<T>> {
    let target = Characteristic::new(ch.alpha + shift.m, ch.beta + shift.n);
    let v = theta(target, x, tau, opts)?.value;
    Ok(v * shift_exponential(ch, shift, x, tau))
}

fn shift_exponential<T: Real>(ch: Characteristic, shift: HalfPeriodShift, x: Complex<T>, tau: &Tau<T>) -> Complex<T> {
    let m = shift.m;
    if m == 0 {
        return Complex::new(T::one(), T::zero());
    }
    let quarter: T = lit(0.25);
    let i = imag_unit::<T>();
    let analytic = (-i * T::PI() * int::<T>(m) * (x + tau.value() * (int::<T>(m) * quarter))).exp();
    analytic * exp_pi_i_rational(-m * (ch.beta + shift.n), 2)
}

/// `θ_{αβ}(n/2 + mτ/2 | τ) = ϑ_{α+m,β+n}·e^{−πim((β+n)/2 + mτ/4)}`.
pub fn theta_value_at_half_period<T: Real>(
    ch: Characteristic,
    shift: HalfPeriodShift,
    tau: &Tau<T>,
    opts: &EvalOptions,
) -> Result<Complex<T>> {
    let target = Characteristic::new(ch.alpha + shift.m, ch.beta + shift.n);
    let v = vartheta_char(target, tau, opts)?;
    Ok(v * shift_exponential(ch, shift, Complex::new(T::zero(), T::zero()), tau))
}

/// `θ′_{αβ}(n/2 + mτ/2 | τ)`:
/// `(−i)^{m(β+n)}·πi·e^{−πim²τ/4}·{ i^{β+n}(1 − ⟨α+m⟩^{β+n})·η̂³ − m·ϑ_{α+m,β+n} }`.
pub fn theta_deriv_at_half_period<T: Real>(
    ch: Characteristic,
    shift: HalfPeriodShift,
    tau: &Tau<T>,
    opts: &EvalOptions,
) -> Result<Complex<T>> {
    let (n, m) = (shift.n, shift.m);
    let bn = ch.beta + n;
    let am = ch.alpha + m;
    let i = imag_unit::<T>();
    let pi = T::PI();
    let quarter: T = lit(0.25);
    let pref = neg_i_pow::<T>(m * bn) * i * pi * (-i * pi * int::<T>(m * m) * quarter * tau.value()).exp();
    let odd_weight = 1 - if bn.rem_euclid(2) == 0 { 1 } else { spin(am) };
    let mut bracket = Complex::new(T::zero(), T::zero());
    if odd_weight != 0 {
        let eh = etahat(tau, opts)?;
        bracket = i_pow::<T>(bn) * int::<T>(odd_weight) * eh * eh * eh;
    }
    if m != 0 {
        let v = vartheta_char(Characteristic::new(am, bn), tau, opts)?;
        bracket = bracket - v * int::<T>(m);
    }
    Ok(pref * bracket)
}

/// `θ′_{αβ}(x + n/2 + mτ/2 | τ)` assembled from `θ₁′/θ₁`, `ϑ²` and the two
/// cross factors; falls back to the half-period formula at `x = 0`.
pub fn theta_deriv_shifted<T: Real>(
    ch: Characteristic,
    shift: HalfPeriodShift,
    x: Complex<T>,
    tau: &Tau<T>,
    opts: &EvalOptions,
) -> Result<Complex<T>> {
    if x.norm() == T::zero() {
        return theta_deriv_at_half_period(ch, shift, tau, opts);
    }
    let (n, m) = (shift.n, shift.m);
    let am = ch.alpha + m;
    let bn = ch.beta + n;
    let i = imag_unit::<T>();
    let pi = T::PI();
    let quarter: T = lit(0.25);

    let th1 = -theta(Characteristic::THETA1_NEG, x, tau, opts)?.value;
    let th1p = -theta_dx(Characteristic::THETA1_NEG, x, tau, 1, opts)?;
    let guard = lit::<T>(1e-12) * pi * lit(2.0) * etahat(tau, opts)?.norm().powi(3);
    if th1.norm() < guard {
        return Err(Error::Pole { x: crate::scalar::to_c64(x) });
    }
    let target = Characteristic::new(am, bn);
    let th = theta(target, x, tau, opts)?.value;
    let v = vartheta_char(target, tau, opts)?;
    let cross_a = theta(Characteristic::new(1 - am, 0), x, tau, opts)?.value;
    let cross_b = theta(Characteristic::new(0, 1 - bn), x, tau, opts)?.value;
    let sign = if (bn / 2).rem_euclid(2) == 1 { spin(am) } else { 1 };

    let mi = i * pi * int::<T>(m);
    let body = (th1p / th1 - mi) * th - v * v * cross_a * cross_b * pi * int::<T>(sign) / th1;
    let pref = neg_i_pow::<T>(m * bn) * (-mi * (x + tau.value() * (int::<T>(m) * quarter))).exp();
    Ok(pref * body)
}

/// Twelve normalized maps with `1 ≤ c ≤ 7`, the fixed test set of the modular checks.
pub fn standard_maps() -> Vec<UnimodularMap> {
    [
        (1, 0, 1, 1),
        (2, 1, 1, 1),
        (1, -1, 1, 0),
        (0, -1, 1, 3),
        (1, 2, 2, 5),
        (1, 1, 2, 3),
        (2, -1, 3, -1),
        (-1, 0, 3, -1),
        (1, 0, 4, 1),
        (3, 1, 5, 2),
        (1, 0, 6, 1),
        (2, 1, 7, 4),
    ]
    .into_iter()
    .map(|(a, b, c, d)| UnimodularMap { a, b, c, d })
    .collect()
}
