//! Algebraic identities among θ-functions: quartic relations, logarithmic
//! derivative relations, integer multiplication by recursion, values at the
//! quarter period, and a genus-2 splitting check.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qkernel::{theta, theta_k, theta_k_dx, varthetas, Characteristic, EvalOptions, Tau};
use crate::scalar::{int, lit, rel_diff, to_c64, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub residual: f64,
    pub grid: String,
}

fn resid<T: Real>(lhs: Complex<T>, rhs: Complex<T>) -> f64 {
    to_c64(Complex::new(rel_diff(lhs, rhs, T::one()), T::zero())).re
}

fn grid_label<T: Real>(x: Complex<T>, tau: &Tau<T>) -> String {
    let (x, t) = (to_c64(x), to_c64(tau.value()));
    format!("x={}{:+}i tau={}{:+}i", x.re, x.im, t.re, t.im)
}

/// The classical θ₁..θ₄ at one point, index 0 unused.
fn thetas<T: Real>(x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<[Complex<T>; 5]> {
    let mut out = [Complex::new(T::zero(), T::zero()); 5];
    for k in 1..=4u8 {
        out[k as usize] = theta_k(k, x, tau, opts)?;
    }
    Ok(out)
}

fn consts<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<[Complex<T>; 5]> {
    let [v2, v3, v4] = varthetas(tau, opts)?;
    let z = Complex::new(T::zero(), T::zero());
    Ok([z, z, v2, v3, v4])
}

const TRIPLES: [(usize, usize, usize); 3] = [(2, 3, 4), (3, 4, 2), (4, 2, 3)];

fn sgn(n: usize, m: usize) -> i64 {
    if n > m {
        1
    } else {
        -1
    }
}

/// `θ₁⁴ + θ₃⁴ = θ₂⁴ + θ₄⁴`, `ϑ₃²θ₃² = ϑ₂²θ₂² + ϑ₄²θ₄²` and
/// `sign(n−m)·ϑ_k²θ₁² = ϑ_m²θ_n² − ϑ_n²θ_m²` over `{k,n,m} = {2,3,4}`.
pub fn check_quartic_identities<T: Real>(x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<IdentityResult> {
    let t = thetas(x, tau, opts)?;
    let v = consts(tau, opts)?;
    let sq = |z: Complex<T>| z * z;
    let mut r = resid(sq(sq(t[1])) + sq(sq(t[3])), sq(sq(t[2])) + sq(sq(t[4])));
    r = r.max(resid(sq(v[3]) * sq(t[3]), sq(v[2]) * sq(t[2]) + sq(v[4]) * sq(t[4])));
    for (k, n, m) in TRIPLES {
        for (n, m) in [(n, m), (m, n)] {
            let lhs = sq(v[k]) * sq(t[1]) * int::<T>(sgn(n, m));
            r = r.max(resid(lhs, sq(v[m]) * sq(t[n]) - sq(v[n]) * sq(t[m])));
        }
    }
    Ok(IdentityResult {
        name: "quartic".into(),
        residual: r,
        grid: grid_label(x, tau),
    })
}

/// Left and right sides of `θ_n′/θ_n − θ_m′/θ_m = sign(n−m)·πϑ_k²·θ₁θ_k/(θ_nθ_m)`.
pub fn log_derivative_sides<T: Real>(
    k: usize,
    n: usize,
    m: usize,
    x: Complex<T>,
    tau: &Tau<T>,
    opts: &EvalOptions,
) -> Result<(Complex<T>, Complex<T>)> {
    let mut ks = [k, n, m];
    ks.sort_unstable();
    if ks != [2, 3, 4] {
        return Err(Error::InvalidArgument(format!("({k},{n},{m}) is not a permutation of (2,3,4)")));
    }
    let t = thetas(x, tau, opts)?;
    let v = consts(tau, opts)?;
    let dn = theta_k_dx(n as u8, x, tau, 1, opts)?;
    let dm = theta_k_dx(m as u8, x, tau, 1, opts)?;
    let lhs = dn / t[n] - dm / t[m];
    let rhs = v[k] * v[k] * t[1] * t[k] / (t[n] * t[m]) * (T::PI() * int::<T>(sgn(n, m)));
    Ok((lhs, rhs))
}

pub fn check_log_derivative_identities<T: Real>(x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<IdentityResult> {
    let mut r = 0.0f64;
    for (k, n, m) in TRIPLES {
        let (l, rr) = log_derivative_sides(k, n, m, x, tau, opts)?;
        r = r.max(resid(l, rr));
    }
    Ok(IdentityResult {
        name: "log_derivative".into(),
        residual: r,
        grid: grid_label(x, tau),
    })
}

/// `θ_{αβ}(nx|τ)` for integer `n ≥ 2`, built only from θ₁..θ₄ at `x` and the
/// ϑ-constants. With `u = (j−1)x`, `v = x`:
///
/// ```text
/// θ₁(jx) = (θ₃²(u)θ₂²(v) − θ₂²(u)θ₃²(v)) / (ϑ₄² θ₁((j−2)x)),   θ₁(2x) = 2θ₁θ₂θ₃θ₄/(ϑ₂ϑ₃ϑ₄)
/// θ₂(jx) = (θ₃²(u)θ₃²(v) − θ₄²(u)θ₄²(v)) / (ϑ₂² θ₂((j−2)x))
/// θ₃(jx) = (θ₂²(u)θ₂²(v) + θ₄²(u)θ₄²(v)) / (ϑ₃² θ₃((j−2)x))
/// θ₄(jx) = (θ₃²(u)θ₃²(v) − θ₂²(u)θ₂²(v)) / (ϑ₄² θ₄((j−2)x))
/// ```
pub fn multiply_theta<T: Real>(ch: Characteristic, n: u32, x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("multiplier must be at least 2, got {n}")));
    }
    let v = consts(tau, opts)?;
    let base = thetas(x, tau, opts)?;
    // θ₁(y) ≈ θ₁′(0)·y near zero; θ₁′(0) = πϑ₂ϑ₃ϑ₄
    let scale1 = (v[2] * v[3] * v[4] * T::PI()).norm();
    let guard: T = lit(1e-12);
    let sq = |z: Complex<T>| z * z;

    let mut prev = [Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()), v[2], v[3], v[4]];
    let mut cur = base;
    for j in 2..=n {
        let mut next = [Complex::new(T::zero(), T::zero()); 5];
        for k in 1..=4usize {
            let scale = if k == 1 { scale1 } else { v[k].norm() };
            if j > 2 && prev[k].norm() < guard * scale {
                return Err(Error::Resonance {
                    n: j as i64,
                    x: to_c64(x),
                });
            }
        }
        next[1] = if j == 2 {
            base[1] * base[2] * base[3] * base[4] * int::<T>(2) / (v[2] * v[3] * v[4])
        } else {
            (sq(cur[3]) * sq(base[2]) - sq(cur[2]) * sq(base[3])) / (sq(v[4]) * prev[1])
        };
        next[2] = (sq(cur[3]) * sq(base[3]) - sq(cur[4]) * sq(base[4])) / (sq(v[2]) * prev[2]);
        next[3] = (sq(cur[2]) * sq(base[2]) + sq(cur[4]) * sq(base[4])) / (sq(v[3]) * prev[3]);
        next[4] = (sq(cur[3]) * sq(base[3]) - sq(cur[2]) * sq(base[2])) / (sq(v[4]) * prev[4]);
        prev = cur;
        cur = next;
    }
    let (k, sign) = ch.classical_index();
    Ok(cur[k as usize] * int::<T>(sign))
}

/// `θ₁..θ₄` at `x = ¼`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarterValues<T: Real> {
    pub theta1: Complex<T>,
    pub theta2: Complex<T>,
    pub theta3: Complex<T>,
    pub theta4: Complex<T>,
}

/// Fourth root of `w` on the branch nearest `hint`.
fn fourth_root_near<T: Real>(w: Complex<T>, hint: Complex<T>) -> Complex<T> {
    let r = w.powf(lit(0.25));
    let mut best = r;
    let mut rot = r;
    for _ in 0..3 {
        rot = Complex::new(-rot.im, rot.re);
        if (rot - hint).norm() < (best - hint).norm() {
            best = rot;
        }
    }
    best
}

/// Closed forms
///
/// ```text
/// 2θ₃⁴(¼) = ϑ₄ϑ₃³ + ϑ₃ϑ₄³,   2θ₂⁴(¼) = ϑ₄ϑ₃³ − ϑ₃ϑ₄³,
/// θ₄(¼) = θ₃(¼),            θ₁(¼) = ϑ₂²ϑ₃ϑ₄ / (2θ₂(¼)θ₃²(¼)).
/// ```
///
/// The fourth roots take the branch of the leading q-terms,
/// `θ₃(¼) ≈ 1` and `θ₂(¼) ≈ √2·e^{πiτ/4}`.
pub fn quarter_period_values<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<QuarterValues<T>> {
    let [_, _, v2, v3, v4] = consts(tau, opts)?;
    let half: T = lit(0.5);
    let a = v4 * v3 * v3 * v3;
    let b = v3 * v4 * v4 * v4;
    let t3 = fourth_root_near((a + b) * half, Complex::new(T::one(), T::zero()));
    let lead2 = (tau.value() * Complex::new(T::zero(), T::PI() * lit::<T>(0.25))).exp() * T::from(2.0).unwrap().sqrt();
    let t2 = fourth_root_near((a - b) * half, lead2);
    let t1 = v2 * v2 * v3 * v4 / (t2 * t3 * t3 * int::<T>(2));
    Ok(QuarterValues {
        theta1: t1,
        theta2: t2,
        theta3: t3,
        theta4: t3,
    })
}

/// Moduli `τ`, `μ` of the period matrix `[[τ, ½], [½, μ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Genus2Tau<T: Real> {
    pub tau: Tau<T>,
    pub mu: Tau<T>,
}

impl<T: Real> Genus2Tau<T> {
    pub fn new(tau: Tau<T>, mu: Tau<T>) -> Self {
        Self { tau, mu }
    }

    pub fn offdiag(&self) -> T {
        lit(0.5)
    }
}

const GENUS2_CUTOFF: i64 = 12;

/// `Θ(z₁, z₂)` by the symmetric double sum `|k₁|, |k₂| ≤ 12`.
pub fn genus2_theta<T: Real>(g: &Genus2Tau<T>, z1: Complex<T>, z2: Complex<T>) -> Result<Complex<T>> {
    let pi_i = Complex::new(T::zero(), T::PI());
    let (t, m) = (g.tau.value(), g.mu.value());
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut edge = T::zero();
    for k1 in -GENUS2_CUTOFF..=GENUS2_CUTOFF {
        for k2 in -GENUS2_CUTOFF..=GENUS2_CUTOFF {
            let (a, b) = (int::<T>(k1), int::<T>(k2));
            let e = pi_i * (t * a * a + m * b * b + Complex::new(a * b * g.offdiag() * int::<T>(2), T::zero()))
                + pi_i * (z1 * a + z2 * b) * int::<T>(2);
            let term = e.exp();
            if k1.abs() == GENUS2_CUTOFF || k2.abs() == GENUS2_CUTOFF {
                edge = edge.max(term.norm());
            }
            sum = sum + term;
        }
    }
    let tail = edge * int::<T>(8 * GENUS2_CUTOFF + 4);
    if tail > T::epsilon() * sum.norm().max(T::one()) {
        return Err(Error::Truncation {
            partial: to_c64(sum),
            tail: to_c64(Complex::new(tail, T::zero())).re,
            terms: ((2 * GENUS2_CUTOFF + 1) * (2 * GENUS2_CUTOFF + 1)) as usize,
        });
    }
    Ok(sum)
}

/// `½(θ₃(z₁|τ)+θ₄(z₁|τ))θ₃(z₂|μ) + ½(θ₃(z₁|τ)−θ₄(z₁|τ))θ₄(z₂|μ)`.
pub fn genus2_split<T: Real>(g: &Genus2Tau<T>, z1: Complex<T>, z2: Complex<T>, opts: &EvalOptions) -> Result<Complex<T>> {
    let th = |ch, z, t: &Tau<T>| theta(ch, z, t, opts).map(|v| v.value);
    let a3 = th(Characteristic::THETA3, z1, &g.tau)?;
    let a4 = th(Characteristic::THETA4, z1, &g.tau)?;
    let b3 = th(Characteristic::THETA3, z2, &g.mu)?;
    let b4 = th(Characteristic::THETA4, z2, &g.mu)?;
    let half: T = lit(0.5);
    Ok(((a3 + a4) * b3 + (a3 - a4) * b4) * half)
}

pub fn genus2_decomposition_residual<T: Real>(g: &Genus2Tau<T>, z1: Complex<T>, z2: Complex<T>, opts: &EvalOptions) -> Result<f64> {
    Ok(resid(genus2_theta(g, z1, z2)?, genus2_split(g, z1, z2, opts)?))
}
