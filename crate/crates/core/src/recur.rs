//! Exact recurrence tables and the power series built from them.
//!
//! Families:
//! - `A`: Weierstrass' coefficients of σ in (g₂, g₃).
//! - `C`: Halphen's polynomials `C_k(g₂, g₃)`, σ = Σ C_k x^{2k+1}/(2k+1)!.
//! - `B(ε)`: the universal coefficients for σ (ε = 0) and σ_λ (ε = 1) in (e_λ, g₂).
//! - `G`: θ₁ coefficients in (η, ϑ₂⁴, ϑ₄⁴).
//! - `G(α)`: θ_{2,3,4} coefficients; general (α, β) is reduced to these two.
//!
//! All arithmetic is over `BigRational`; integer families assert that every
//! entry has denominator 1. Tables are cached per family, grown on demand and
//! published as immutable snapshots.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{GaussRat, Poly};
use crate::qkernel::{eta_w, etahat, vartheta_char, Characteristic, EvalOptions, Tau};
use crate::scalar::{imag_unit, int, spin, Real};
use crate::weier::{halphen_op, HalphenRep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    C,
    /// `𝔅^(ε)`, ε ∈ {0, 1}.
    B(u8),
    G,
    /// `𝔊^(α)`, α ∈ {0, 1}.
    GAlpha(u8),
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::A => "A".into(),
            Family::C => "C".into(),
            Family::B(e) => format!("B{e}"),
            Family::G => "G".into(),
            Family::GAlpha(a) => format!("G{a}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" => Some(Family::A),
            "C" => Some(Family::C),
            "B0" => Some(Family::B(0)),
            "B1" => Some(Family::B(1)),
            "G" => Some(Family::G),
            "G0" => Some(Family::GAlpha(0)),
            "G1" => Some(Family::GAlpha(1)),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Family::B(e) | Family::GAlpha(e) if *e > 1 => Err(Error::InvalidArgument(format!(
                "family parameter must be 0 or 1, got {e}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Entries of one family. Integer families use `(m, n)` with `m + n ≤ extent`;
/// `C` stores one polynomial in `(g₂, g₃)` per `k ≤ extent`.
#[derive(Debug, Clone)]
pub struct RecurrenceTable {
    pub family: Family,
    pub extent: usize,
    grid: BTreeMap<(i64, i64), BigInt>,
    polys: Vec<Poly>,
}

impl RecurrenceTable {
    /// Entry `(m, n)`; zero for negative indices.
    ///
    /// Panics if `m + n` exceeds the extent the table was built for.
    pub fn get(&self, m: i64, n: i64) -> BigInt {
        if m < 0 || n < 0 {
            return BigInt::zero();
        }
        assert!(
            (m + n) as usize <= self.extent,
            "entry ({m}, {n}) beyond table extent {}",
            self.extent
        );
        self.grid.get(&(m, n)).cloned().unwrap_or_default()
    }

    /// `C_k` as a polynomial in `(g₂, g₃)`.
    pub fn poly(&self, k: usize) -> &Poly {
        &self.polys[k]
    }

    /// Rows `(m, n, value)` in increasing `(m + n, m)` order.
    pub fn rows(&self) -> Vec<(i64, i64, BigInt)> {
        let mut out: Vec<_> = self.grid.iter().map(|(&(m, n), v)| (m, n, v.clone())).collect();
        out.sort_by_key(|(m, n, _)| (m + n, *m));
        out
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }
}

type Cache = RwLock<HashMap<Family, Arc<RecurrenceTable>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Table of `family` covering at least `extent`; shared and immutable.
pub fn build_table(family: Family, extent: usize) -> Result<Arc<RecurrenceTable>> {
    family.validate()?;
    if let Some(t) = cache().read().expect("table cache poisoned").get(&family) {
        if t.extent >= extent {
            return Ok(t.clone());
        }
    }
    let mut guard = cache().write().expect("table cache poisoned");
    let prev = guard.get(&family).cloned();
    if let Some(t) = &prev {
        if t.extent >= extent {
            return Ok(t.clone());
        }
    }
    let table = Arc::new(extend(family, prev.as_deref(), extent)?);
    guard.insert(family, table.clone());
    Ok(table)
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn extend(family: Family, prev: Option<&RecurrenceTable>, extent: usize) -> Result<RecurrenceTable> {
    let mut t = match prev {
        Some(p) => p.clone(),
        None => RecurrenceTable {
            family,
            extent: 0,
            grid: BTreeMap::new(),
            polys: Vec::new(),
        },
    };
    if let Family::C = family {
        extend_c(&mut t, extent);
        return Ok(t);
    }
    let start = if prev.is_some() { t.extent as i64 + 1 } else { 0 };
    for s in start..=extent as i64 {
        // within one total, entries may depend on larger m at the same total
        for m in (0..=s).rev() {
            let n = s - m;
            let v = if s == 0 { q(1) } else { step(family, &t.grid, m, n) };
            if !v.is_integer() {
                return Err(Error::Integrality {
                    family: family.label(),
                    m,
                    n,
                    value: v.to_string(),
                });
            }
            let v = v.to_integer();
            if !v.is_zero() {
                t.grid.insert((m, n), v);
            }
        }
    }
    t.extent = extent.max(t.extent);
    Ok(t)
}

fn step(family: Family, grid: &BTreeMap<(i64, i64), BigInt>, m: i64, n: i64) -> BigRational {
    let g = |a: i64, b: i64| -> BigRational {
        if a < 0 || b < 0 {
            return BigRational::zero();
        }
        grid.get(&(a, b)).map(|v| BigRational::from_integer(v.clone())).unwrap_or_default()
    };
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    match family {
        Family::A => {
            q(16) * &third * q(n + 1) * g(m - 2, n + 1) + q(3 * (m + 1)) * g(m + 1, n - 1)
                - &third * q((2 * m + 3 * n - 1) * (4 * m + 6 * n - 1)) * g(m - 1, n)
        }
        Family::B(e) => {
            let e = e as i64;
            q(24 * (n + 1)) * g(m - 3, n + 1) + q(4 * m - 12 * n - 4 - e) * g(m - 1, n)
                - q(4) * &third * q(m + 1) * g(m + 1, n - 1)
                - &third * q((m + 2 * n - 1) * (2 * m + 4 * n - 1 - 2 * e)) * g(m, n - 1)
        }
        Family::G => {
            q(4 * (n - 2 * m - 1)) * g(m, n - 1) - q(4 * (m - 2 * n - 1)) * g(m - 1, n)
                - q(2 * (m + n - 1) * (2 * m + 2 * n - 1)) * (g(m - 2, n) + g(m - 1, n - 1) + g(m, n - 2))
        }
        Family::GAlpha(a) => {
            let sa = spin(a as i64);
            q(sa * (4 * n - 8 * m - 3)) * g(m, n - 1) - q(4 * m - 8 * n - 3) * g(m - 1, n)
                - q(2 * (m + n - 1) * (2 * m + 2 * n - 3)) * (g(m - 2, n) + q(sa) * g(m - 1, n - 1) + g(m, n - 2))
        }
        Family::C => unreachable!("C is polynomial-valued"),
    }
}

fn extend_c(t: &mut RecurrenceTable, extent: usize) {
    while t.polys.len() <= extent {
        let k = t.polys.len() as i64;
        let p = match k {
            0 => Poly::one(2),
            1 => Poly::zero(2),
            _ => {
                let d = halphen_op(&t.polys[(k - 1) as usize], HalphenRep::G).neg();
                let g2 = Poly::var(2, 0);
                let tail = g2.mul(&t.polys[(k - 2) as usize]).scale(&GaussRat::ratio((k - 1) * (2 * k - 1), 6));
                d.sub(&tail)
            }
        };
        t.polys.push(p);
    }
    t.extent = t.polys.len() - 1;
}

/// `𝔊^(α,β)_{m,n}` for an even characteristic, via the permutation relations.
pub fn g_alpha_beta(table0: &RecurrenceTable, table1: &RecurrenceTable, ch: Characteristic, m: i64, n: i64) -> Result<BigInt> {
    let (a, b) = (ch.alpha.rem_euclid(2), ch.beta.rem_euclid(2));
    match (a, b) {
        (0, 0) => Ok(table0.get(m, n)),
        (1, 0) => Ok(table1.get(m, n)),
        (0, 1) => Ok(table1.get(m, n) * spin(m + n)),
        _ => Err(Error::InvalidArgument(format!("{ch} is odd; use the θ₁ series"))),
    }
}

/// Which set of variables a [`SeriesPoly`] is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// Variables `(g₂, g₃)`.
    G,
    /// Variables `(e_λ, g₂)`.
    ELambdaG2,
    /// Variables `(π, η, P, Q)` with `P = ϑ_{α−1,0}⁴`, `Q = ϑ_{0,β−1}⁴`
    /// (for θ₁: `P = ϑ₂⁴`, `Q = ϑ₄⁴`), times a scalar prefactor.
    EtaTheta,
}

impl Representation {
    pub fn names(&self) -> &'static [&'static str] {
        match self {
            Representation::G => &["g2", "g3"],
            Representation::ELambdaG2 => &["e", "g2"],
            Representation::EtaTheta => &["pi", "eta", "P", "Q"],
        }
    }
}

/// Truncated power series in x with exact polynomial coefficients.
#[derive(Debug, Clone)]
pub struct SeriesPoly {
    pub representation: Representation,
    pub order: usize,
    /// `(power of x, coefficient)`.
    pub coefficients: Vec<(u32, Poly)>,
}

impl SeriesPoly {
    /// `Σ c_j(vars)·x^{p_j}`.
    pub fn eval<T: Real>(&self, x: Complex<T>, vars: &[Complex<T>]) -> Complex<T> {
        self.eval_dx(x, vars, 0)
    }

    /// `d^r/dx^r` of the series at `x`.
    pub fn eval_dx<T: Real>(&self, x: Complex<T>, vars: &[Complex<T>], r: u32) -> Complex<T> {
        // Horner would need contiguous powers; the series are short enough
        let mut acc = Complex::new(T::zero(), T::zero());
        for (p, c) in &self.coefficients {
            if *p < r {
                continue;
            }
            let falling: i64 = (0..r as i64).map(|j| *p as i64 - j).product();
            let xp = if *p == r { Complex::new(T::one(), T::zero()) } else { x.powu(p - r) };
            acc = acc + c.eval(vars) * xp * int::<T>(falling);
        }
        acc
    }

    /// Same series with each coefficient replaced by `∂/∂var`.
    pub fn partial(&self, var: usize) -> SeriesPoly {
        SeriesPoly {
            representation: self.representation,
            order: self.order,
            coefficients: self.coefficients.iter().map(|(p, c)| (*p, c.partial(var))).collect(),
        }
    }

    pub fn coefficient(&self, power: u32) -> Option<&Poly> {
        self.coefficients.iter().find(|(p, _)| *p == power).map(|(_, c)| c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SeriesKey {
    Sigma,
    Xi(u8),
    Theta1,
    ThetaEven(i64, i64),
}

fn series_cache() -> &'static RwLock<HashMap<(SeriesKey, usize), Arc<SeriesPoly>>> {
    static C: OnceLock<RwLock<HashMap<(SeriesKey, usize), Arc<SeriesPoly>>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached_series(key: SeriesKey, order: usize, build: impl FnOnce() -> Result<SeriesPoly>) -> Result<Arc<SeriesPoly>> {
    if let Some(s) = series_cache().read().expect("series cache poisoned").get(&(key, order)) {
        return Ok(s.clone());
    }
    let s = Arc::new(build()?);
    series_cache().write().expect("series cache poisoned").insert((key, order), s.clone());
    Ok(s)
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |a, b| a * b)
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

fn div_fact(c: BigRational, n: u32) -> BigRational {
    c / BigRational::from_integer(factorial(n))
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// σ in (g₂, g₃): `Σ_k {Σ_ν 2^{2k−5ν} A_{3ν−k,k−2ν} g₂^{3ν−k} g₃^{k−2ν}} x^{2k+1}/(2k+1)!`.
pub fn sigma_series_poly(order: usize) -> Result<Arc<SeriesPoly>> {
    cached_series(SeriesKey::Sigma, order, || {
        let a = build_table(Family::A, order / 2 + 1)?;
        let mut coefficients = Vec::new();
        for k in 0..=order as i64 {
            let mut c = Poly::zero(2);
            for nu in ceil_div(k, 3)..=k / 2 {
                let (m, n) = (3 * nu - k, k - 2 * nu);
                let v = pow2(2 * k - 5 * nu) * BigRational::from_integer(a.get(m, n));
                let coef = GaussRat::real(div_fact(v, (2 * k + 1) as u32));
                c = c.add(&Poly::monomial(2, &[(0, m as i32), (1, n as i32)], coef));
            }
            coefficients.push(((2 * k + 1) as u32, c));
        }
        Ok(SeriesPoly {
            representation: Representation::G,
            order,
            coefficients,
        })
    })
}

/// The same σ series from Halphen's `C_k`.
pub fn sigma_series_poly_halphen(order: usize) -> Result<SeriesPoly> {
    let c = build_table(Family::C, order)?;
    let coefficients = (0..=order)
        .map(|k| {
            let f = BigRational::new(BigInt::one(), factorial((2 * k + 1) as u32));
            ((2 * k + 1) as u32, c.poly(k).scale(&GaussRat::real(f)))
        })
        .collect();
    Ok(SeriesPoly {
        representation: Representation::G,
        order,
        coefficients,
    })
}

pub fn sigma_series_g<T: Real>(x: Complex<T>, g2: Complex<T>, g3: Complex<T>, order: usize) -> Result<Complex<T>> {
    if order < 1 {
        return Err(Error::InvalidArgument("series order must be >= 1".into()));
    }
    Ok(sigma_series_poly(order)?.eval(x, &[g2, g3]))
}

/// Ξ in (e_λ, g₂): `Σ_k {Σ_ν 2^{−ν} 𝔅^(ε)_{k−2ν,ν} e^{k−2ν} g₂^ν} x^{2k+1−ε}/(2k+1−ε)!`.
pub fn xi_series_poly(epsilon: u8, order: usize) -> Result<Arc<SeriesPoly>> {
    if epsilon > 1 {
        return Err(Error::InvalidArgument(format!("epsilon must be 0 or 1, got {epsilon}")));
    }
    cached_series(SeriesKey::Xi(epsilon), order, || {
        let b = build_table(Family::B(epsilon), order)?;
        let eps = epsilon as i64;
        let mut coefficients = Vec::new();
        for k in 0..=order as i64 {
            let mut c = Poly::zero(2);
            for nu in 0..=k / 2 {
                let v = pow2(-nu) * BigRational::from_integer(b.get(k - 2 * nu, nu));
                let coef = GaussRat::real(div_fact(v, (2 * k + 1 - eps) as u32));
                c = c.add(&Poly::monomial(2, &[(0, (k - 2 * nu) as i32), (1, nu as i32)], coef));
            }
            coefficients.push(((2 * k + 1 - eps) as u32, c));
        }
        Ok(SeriesPoly {
            representation: Representation::ELambdaG2,
            order,
            coefficients,
        })
    })
}

pub fn xi_series<T: Real>(epsilon: u8, x: Complex<T>, e_lam: Complex<T>, g2: Complex<T>, order: usize) -> Result<Complex<T>> {
    Ok(xi_series_poly(epsilon, order)?.eval(x, &[e_lam, g2]))
}

/// Grouped θ-type series: `Σ_k (−2)^k {Σ_ν (−6)^{−ν}π^{2ν}/((k−ν)!(2ν+δ)!) η^{k−ν} 𝒩_ν} x^{2k+δ}`
/// with `δ = 1` for θ₁ and `δ = 0` for the even functions.
fn grouped_theta_series(order: usize, odd: bool, coeff: impl Fn(i64, i64) -> BigInt) -> SeriesPoly {
    let delta = odd as i64;
    let mut coefficients = Vec::new();
    for k in 0..=order as i64 {
        let mut c = Poly::zero(4);
        for nu in 0..=k {
            let r = BigRational::new(
                BigInt::from(-2).pow(k as u32),
                factorial((k - nu) as u32) * factorial((2 * nu + delta) as u32) * BigInt::from(-6).pow(nu as u32),
            );
            for s in 0..=nu {
                let g = coeff(nu - s, s);
                if g.is_zero() {
                    continue;
                }
                let v = &r * BigRational::from_integer(g);
                let mono = [(0, 2 * nu as i32), (1, (k - nu) as i32), (2, (nu - s) as i32), (3, s as i32)];
                c = c.add(&Poly::monomial(4, &mono, GaussRat::real(v)));
            }
        }
        coefficients.push(((2 * k + delta) as u32, c));
    }
    SeriesPoly {
        representation: Representation::EtaTheta,
        order,
        coefficients,
    }
}

/// θ₁ series divided by `2πη̂³`, in `(π, η, ϑ₂⁴, ϑ₄⁴)`.
pub fn theta1_series_poly(order: usize) -> Result<Arc<SeriesPoly>> {
    cached_series(SeriesKey::Theta1, order, || {
        let g = build_table(Family::G, order)?;
        Ok(grouped_theta_series(order, true, |m, n| g.get(m, n)))
    })
}

/// Even θ series divided by `ϑ_{αβ}`, in `(π, η, ϑ_{α−1,0}⁴, ϑ_{0,β−1}⁴)`.
pub fn theta_even_series_poly(ch: Characteristic, order: usize) -> Result<Arc<SeriesPoly>> {
    if ch.is_odd() {
        return Err(Error::InvalidArgument(format!("{ch} is odd; use the θ₁ series")));
    }
    let key = SeriesKey::ThetaEven(ch.alpha.rem_euclid(2), ch.beta.rem_euclid(2));
    cached_series(key, order, || {
        let t0 = build_table(Family::GAlpha(0), order)?;
        let t1 = build_table(Family::GAlpha(1), order)?;
        Ok(grouped_theta_series(order, false, |m, n| {
            g_alpha_beta(&t0, &t1, ch, m, n).expect("even characteristic checked above")
        }))
    })
}

/// `(π, η, ϑ₂⁴, ϑ₄⁴)` and the prefactor `2πη̂³` at τ.
fn theta1_point<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<(Complex<T>, [Complex<T>; 4])> {
    let eh = etahat(tau, opts)?;
    let e = eta_w(tau, opts)?;
    let v2 = vartheta_char(Characteristic::THETA2, tau, opts)?;
    let v4 = vartheta_char(Characteristic::THETA4, tau, opts)?;
    let pi = T::PI();
    Ok((eh * eh * eh * (pi + pi), [Complex::new(pi, T::zero()), e, v2.powu(4), v4.powu(4)]))
}

fn even_point<T: Real>(ch: Characteristic, tau: &Tau<T>, opts: &EvalOptions) -> Result<(Complex<T>, [Complex<T>; 4])> {
    let v = vartheta_char(ch, tau, opts)?;
    let e = eta_w(tau, opts)?;
    let p = vartheta_char(Characteristic::new(ch.alpha - 1, 0), tau, opts)?;
    let q = vartheta_char(Characteristic::new(0, ch.beta - 1), tau, opts)?;
    Ok((v, [Complex::new(T::PI(), T::zero()), e, p.powu(4), q.powu(4)]))
}

/// θ₁(x|τ) by the grouped 𝔊 series through `x^{2·order+1}`.
pub fn theta1_series<T: Real>(x: Complex<T>, tau: &Tau<T>, order: usize) -> Result<Complex<T>> {
    let s = theta1_series_poly(order)?;
    let (pref, vars) = theta1_point(tau, &EvalOptions::default())?;
    Ok(pref * s.eval(x, &vars))
}

/// Even θ_{αβ}(x|τ) by the grouped 𝔊^(α,β) series through `x^{2·order}`.
pub fn theta_series_char<T: Real>(ch: Characteristic, x: Complex<T>, tau: &Tau<T>, order: usize) -> Result<Complex<T>> {
    let s = theta_even_series_poly(ch, order)?;
    let (pref, vars) = even_point(ch, tau, &EvalOptions::default())?;
    Ok(pref * s.eval(x, &vars))
}

/// k-th τ-derivative of `ϑ_{αβ}`, read off from the `x^{2k}` coefficient:
/// `ϑ^{(k)} = (2k)!/(4πi)^k · [x^{2k}]`.
pub fn vartheta_deriv<T: Real>(ch: Characteristic, k: usize, tau: &Tau<T>) -> Result<Complex<T>> {
    let s = theta_even_series_poly(ch, k)?;
    let (pref, vars) = even_point(ch, tau, &EvalOptions::default())?;
    let c = s.coefficient(2 * k as u32).expect("series holds every even power").eval(&vars);
    let fact: T = (1..=2 * k).fold(T::one(), |a, j| a * int::<T>(j as i64));
    let four_pi_i = imag_unit::<T>() * T::PI() * int::<T>(4);
    Ok(pref * c * fact / four_pi_i.powu(k as u32))
}
