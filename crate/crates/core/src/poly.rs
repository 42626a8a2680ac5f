//! Exact multivariate Laurent polynomials with Gaussian-rational coefficients.
//!
//! Used wherever a derivation has to be applied symbolically: the Halphen
//! operator on (g₂, g₃) or ϑ-monomials, the C_k recurrence, and repeated
//! τ-differentiation along the ϑ/η flow. A factor of π is just another
//! variable; it is never differentiated.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{lit, Real};

/// `re + i·im` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn real(r: BigRational) -> Self {
        Self {
            re: r,
            im: BigRational::zero(),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: -&self.re,
            im: -&self.im,
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self {
            re: &self.re * &k,
            im: &self.im * &k,
        }
    }

    pub fn to_complex<T: Real>(&self) -> Complex<T> {
        Complex::new(lit(rat_to_f64(&self.re)), lit(rat_to_f64(&self.im)))
    }
}

/// Nearest `f64` to an exact rational, robust to numerators beyond `f64` range.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            let shift = n.bits().max(d.bits()) as i64 - 900;
            let (n2, d2) = if shift > 0 {
                (n >> shift as usize, d >> shift as usize)
            } else {
                (n.clone(), d.clone())
            };
            n2.to_f64().unwrap_or(f64::NAN) / d2.to_f64().unwrap_or(f64::NAN)
        }
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}i", fmt_rat(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{}i)", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
            }
        }
    }
}

type Exponents = Vec<i32>;

/// Polynomial in `nvars` variables; exponents may be negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, GaussRat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: GaussRat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussRat::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        Self::monomial(nvars, &[(idx, 1)], GaussRat::one())
    }

    /// `c · Π x_idx^pow`.
    pub fn monomial(nvars: usize, powers: &[(usize, i32)], c: GaussRat) -> Self {
        let mut e = vec![0; nvars];
        for &(i, p) in powers {
            e[i] += p;
        }
        let mut out = Self::zero(nvars);
        out.add_term(e, c);
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &GaussRat)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Coefficient of the monomial with the given exponents (zero if absent).
    pub fn coeff(&self, exps: &[i32]) -> GaussRat {
        self.terms.get(exps).cloned().unwrap_or_else(GaussRat::zero)
    }

    fn add_term(&mut self, e: Exponents, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&GaussRat::int(-1))
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.mul(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// `∂p/∂x_idx`.
    pub fn partial(&self, idx: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let p = e[idx];
            if p != 0 {
                let mut e2 = e.clone();
                e2[idx] -= 1;
                out.add_term(e2, c.scale_int(p as i64));
            }
        }
        out
    }

    /// Derivation `D` with `D x_i = images[i]`; a `None` image means `D x_i = 0`.
    pub fn derive(&self, images: &[Option<Poly>]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (i, img) in images.iter().enumerate() {
            if let Some(img) = img {
                let d = self.partial(i);
                if !d.is_zero() {
                    out = out.add(&d.mul(img));
                }
            }
        }
        out
    }

    /// Numeric value at the given point.
    pub fn eval<T: Real>(&self, at: &[Complex<T>]) -> Complex<T> {
        self.eval_terms(at).into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// Value of each monomial, in a fixed order; used for scale-free residuals.
    pub fn eval_terms<T: Real>(&self, at: &[Complex<T>]) -> Vec<Complex<T>> {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.to_complex::<T>();
                for (x, &p) in at.iter().zip(e) {
                    if p != 0 {
                        v = v * x.powi(p);
                    }
                }
                v
            })
            .collect()
    }

    /// Human-readable form with the given variable names.
    pub fn render(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut mono = Vec::new();
            for (name, &p) in names.iter().zip(e) {
                match p {
                    0 => {}
                    1 => mono.push(name.to_string()),
                    _ => mono.push(format!("{name}^{p}")),
                }
            }
            let cs = c.to_string();
            let term = if mono.is_empty() {
                cs
            } else if cs == "1" {
                mono.join("*")
            } else if cs == "-1" {
                format!("-{}", mono.join("*"))
            } else {
                format!("{cs}*{}", mono.join("*"))
            };
            parts.push(term);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}
