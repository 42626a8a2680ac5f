//! Residuals of the differential systems satisfied by θ, σ and the ϑ/η
//! constants.
//!
//! Every left side is a term-wise derivative of a convergent series; every
//! right side is assembled from function values. Each equation is reported as
//! `|lhs − Σ terms|` together with the largest modulus among `lhs` and the
//! terms, so that `residual/scale` is scale-free.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::UnimodularMap;
use crate::poly::{GaussRat, Poly};
use crate::qkernel::{
    eta_w, eta_w_dtau, etahat, g2 as g2_series, g2_dtau, g3 as g3_series, g3_dtau, theta_mixed, vartheta_char, Characteristic,
    EvalOptions, Tau,
};
use crate::recur::{sigma_series_poly, xi_series_poly};
use crate::scalar::{half_trunc, imag_unit, int, lit, spin, to_c64, Real};
use crate::weier::{branch_point, g_polys_theta, halphen_op, rescale_periods, HalphenRep, Lattice, PeriodPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    ThetaX,
    ThetaTau,
    ThetaHeat,
    WeierTau,
    SigmaHeat,
    SigmaPdeS12,
    XiEpsilon,
    VarthetaFlow,
    GFlow,
    JacobiThetaOde,
    LogderivOde,
    LambdaOde,
    GeneralSolutionX,
    GeneralSolutionTau,
    VarthetaFlowAb,
}

impl SystemKind {
    pub const ALL: [SystemKind; 15] = [
        SystemKind::ThetaX,
        SystemKind::ThetaTau,
        SystemKind::ThetaHeat,
        SystemKind::WeierTau,
        SystemKind::SigmaHeat,
        SystemKind::SigmaPdeS12,
        SystemKind::XiEpsilon,
        SystemKind::VarthetaFlow,
        SystemKind::GFlow,
        SystemKind::JacobiThetaOde,
        SystemKind::LogderivOde,
        SystemKind::LambdaOde,
        SystemKind::GeneralSolutionX,
        SystemKind::GeneralSolutionTau,
        SystemKind::VarthetaFlowAb,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SystemKind::ThetaX => "theta_x",
            SystemKind::ThetaTau => "theta_tau",
            SystemKind::ThetaHeat => "theta_heat",
            SystemKind::WeierTau => "weier_tau",
            SystemKind::SigmaHeat => "sigma_heat",
            SystemKind::SigmaPdeS12 => "sigma_pde_s12",
            SystemKind::XiEpsilon => "xi_epsilon",
            SystemKind::VarthetaFlow => "vartheta_flow",
            SystemKind::GFlow => "g_flow",
            SystemKind::JacobiThetaOde => "jacobi_theta_ode",
            SystemKind::LogderivOde => "logderiv_ode",
            SystemKind::LambdaOde => "lambda_ode",
            SystemKind::GeneralSolutionX => "general_solution_x",
            SystemKind::GeneralSolutionTau => "general_solution_tau",
            SystemKind::VarthetaFlowAb => "vartheta_flow_ab",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.label() == s)
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationResidual {
    pub label: String,
    pub residual: f64,
    pub scale: f64,
}

impl EquationResidual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else if self.residual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub system: SystemKind,
    pub per_equation: Vec<EquationResidual>,
    pub grid: String,
    pub max_rel: f64,
    /// Size of the first dropped series term, for truncated-series systems.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
}

impl ResidualReport {
    pub fn new(system: SystemKind, grid: impl Into<String>) -> Self {
        Self {
            system,
            per_equation: Vec::new(),
            grid: grid.into(),
            max_rel: 0.0,
            tail_estimate: None,
        }
    }

    /// Records `lhs = Σ terms`.
    pub fn push<T: Real>(&mut self, label: impl Into<String>, lhs: Complex<T>, terms: &[Complex<T>]) {
        let mut sum = Complex::new(T::zero(), T::zero());
        let mut scale = lhs.norm();
        for t in terms {
            sum = sum + *t;
            scale = scale.max(t.norm());
        }
        let r = EquationResidual {
            label: label.into(),
            residual: to_c64(lhs - sum).norm(),
            scale: to_c64(Complex::new(scale, T::zero())).re,
        };
        self.max_rel = self.max_rel.max(r.relative());
        self.per_equation.push(r);
    }

    /// Records a polynomial residual `Σ terms = 0`.
    fn push_zero<T: Real>(&mut self, label: impl Into<String>, terms: &[Complex<T>]) {
        self.push(label, Complex::new(T::zero(), T::zero()), terms);
    }

    pub fn worst(&self) -> Option<&EquationResidual> {
        self.per_equation.iter().max_by(|a, b| a.relative().total_cmp(&b.relative()))
    }

    pub fn get(&self, label: &str) -> Option<&EquationResidual> {
        self.per_equation.iter().find(|e| e.label == label)
    }

    /// Appends another report's equations under a label prefix.
    pub fn absorb(&mut self, prefix: &str, other: ResidualReport) {
        for mut e in other.per_equation {
            e.label = format!("{prefix}{}", e.label);
            self.max_rel = self.max_rel.max(e.relative());
            self.per_equation.push(e);
        }
        self.tail_estimate = match (self.tail_estimate, other.tail_estimate) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
}

fn cx<T: Real>(z: Complex<T>) -> String {
    let z = to_c64(z);
    format!("{}{:+}i", z.re, z.im)
}

fn grid_x<T: Real>(x: Complex<T>, tau: &Tau<T>) -> String {
    format!("x={} tau={}", cx(x), cx(tau.value()))
}

fn grid_tau<T: Real>(tau: &Tau<T>) -> String {
    format!("tau={}", cx(tau.value()))
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn pi<T: Real>() -> T {
    T::PI()
}

/// Characteristics used for the general (α,β) forms.
pub const CHAR_GRID: [Characteristic; 16] = {
    let mut out = [Characteristic::new(0, 0); 16];
    let mut i = 0;
    while i < 16 {
        out[i] = Characteristic::new(i as i64 / 4 - 1, i as i64 % 4 - 1);
        i += 1;
    }
    out
};

/// ϑ₂, ϑ₃, ϑ₄ and η at τ.
#[derive(Debug, Clone, Copy)]
struct Consts<T: Real> {
    v: [Complex<T>; 5],
    eta: Complex<T>,
}

impl<T: Real> Consts<T> {
    fn at(tau: &Tau<T>, opts: &EvalOptions) -> Result<Self> {
        let z = zero();
        Ok(Self {
            v: [
                z,
                z,
                vartheta_char(Characteristic::THETA2, tau, opts)?,
                vartheta_char(Characteristic::THETA3, tau, opts)?,
                vartheta_char(Characteristic::THETA4, tau, opts)?,
            ],
            eta: eta_w(tau, opts)?,
        })
    }

    /// `ϑ_{αβ}²`; zero for odd characteristics.
    fn sq(&self, ch: Characteristic) -> Complex<T> {
        if ch.is_odd() {
            return zero();
        }
        let (k, _) = ch.classical_index();
        self.v[k as usize] * self.v[k as usize]
    }

    fn theta1_prime_zero(&self) -> Complex<T> {
        self.v[2] * self.v[3] * self.v[4] * pi::<T>()
    }
}

/// Solution families of the x- and τ-systems. The identity members reproduce
/// the θ-functions themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneralSolution<T: Real> {
    /// `θ_{αβ} = a·θ_{αβ}(x+b|τ)e^{cx}`, `θ₁′ = a{θ₁′(x+b) − cθ₁₁(x+b)}e^{cx}`.
    X { a: Complex<T>, b: Complex<T>, c: Complex<T> },
    /// `θ_{αβ} = a·θ_{αβ}(b|τ)`, `θ₁′ = −a′θ₁₁(b) + aθ₁′(b)`, with `a, a′, b`
    /// frozen at the test point.
    Tau { a: Complex<T>, b: Complex<T>, a_prime: Complex<T> },
    /// `ϑ = (cτ+d)^{−1/2}ϑ(Mτ)`, `η = (cτ+d)^{−2}η(Mτ) + ½πic/(cτ+d)` in the ϑ/η flow.
    Last { map: UnimodularMap },
}

/// Value and derivative (x or τ, by family) of one member of the θ-state.
struct ThetaState<'a, T: Real> {
    family: GeneralSolution<T>,
    x: Complex<T>,
    tau: &'a Tau<T>,
    opts: &'a EvalOptions,
}

impl<T: Real> ThetaState<'_, T> {
    fn point(&self) -> Complex<T> {
        match self.family {
            GeneralSolution::X { b, .. } => self.x + b,
            GeneralSolution::Tau { b, .. } => b,
            GeneralSolution::Last { .. } => self.x,
        }
    }

    fn raw(&self, ch: Characteristic, dx: u32, dtau: u32) -> Result<Complex<T>> {
        theta_mixed(ch, self.point(), self.tau, dx, dtau, self.opts)
    }

    /// `(θ_{αβ}, ∂θ_{αβ})`.
    fn get(&self, ch: Characteristic) -> Result<(Complex<T>, Complex<T>)> {
        match self.family {
            GeneralSolution::X { a, c, .. } => {
                let w = a * (c * self.x).exp();
                let v = self.raw(ch, 0, 0)?;
                Ok((w * v, w * (self.raw(ch, 1, 0)? + c * v)))
            }
            GeneralSolution::Tau { a, .. } => Ok((a * self.raw(ch, 0, 0)?, a * self.raw(ch, 0, 1)?)),
            GeneralSolution::Last { .. } => Err(Error::Internal("the (last) family has no θ-state".into())),
        }
    }

    /// `(θ₁′, ∂θ₁′)` with classical `θ₁ = −θ₁₁`.
    fn th1p(&self) -> Result<(Complex<T>, Complex<T>)> {
        let ch = Characteristic::THETA1_NEG;
        match self.family {
            GeneralSolution::X { a, c, .. } => {
                let w = a * (c * self.x).exp();
                let (t0, t1, t2) = (self.raw(ch, 0, 0)?, self.raw(ch, 1, 0)?, self.raw(ch, 2, 0)?);
                Ok((-w * (t1 + c * t0), -w * (t2 + c * t1 * int::<T>(2) + c * c * t0)))
            }
            GeneralSolution::Tau { a, a_prime, .. } => {
                let v = -(a * self.raw(ch, 1, 0)? + a_prime * self.raw(ch, 0, 0)?);
                let d = -(a * self.raw(ch, 1, 1)? + a_prime * self.raw(ch, 0, 1)?);
                Ok((v, d))
            }
            GeneralSolution::Last { .. } => Err(Error::Internal("the (last) family has no θ-state".into())),
        }
    }

    fn classical(&self, k: u8) -> Result<(Complex<T>, Complex<T>)> {
        let (v, d) = self.get(Characteristic::classical(k))?;
        Ok(if k == 1 { (-v, -d) } else { (v, d) })
    }

    fn guard(&self, consts: &Consts<T>, system: &str) -> Result<()> {
        let t1 = theta_mixed(Characteristic::THETA1_NEG, self.point(), self.tau, 0, 0, self.opts)?;
        if t1.norm() < lit::<T>(1e-12) * consts.theta1_prime_zero().norm() {
            return Err(Error::Singular {
                equation: format!("{system}: θ₁ vanishes at x = {}", cx(self.point())),
            });
        }
        Ok(())
    }
}

fn x_system<T: Real>(st: &ThetaState<'_, T>, kind: SystemKind) -> Result<ResidualReport> {
    let c = Consts::at(st.tau, st.opts)?;
    st.guard(&c, kind.label())?;
    let mut rep = ResidualReport::new(kind, grid_x(st.x, st.tau));
    let (t1, d1) = st.classical(1)?;
    let (p, dp) = st.th1p()?;
    let t = [zero(), t1, st.classical(2)?.0, st.classical(3)?.0, st.classical(4)?.0];
    let pi = pi::<T>();
    let v = c.v;

    rep.push("th1", d1, &[p]);
    for (k, n, m) in [(2usize, 3usize, 4usize), (3, 2, 4), (4, 2, 3)] {
        let (_, dk) = st.classical(k as u8)?;
        rep.push(format!("th{k}"), dk, &[p / t1 * t[k], -(v[k] * v[k] * t[n] * t[m] / t1) * pi]);
    }
    let four_eta = c.eta * int::<T>(4);
    let quartic = (v[3].powu(4) + v[4].powu(4)) * (pi * pi / int::<T>(3));
    rep.push(
        "th1p",
        dp,
        &[p * p / t1, -(v[3] * v[3] * v[4] * v[4] * t[2] * t[2] / t1) * (pi * pi), -four_eta * t1, -quartic * t1],
    );

    for ch in CHAR_GRID {
        let (val, der) = st.get(ch)?;
        let (a, b) = (ch.alpha, ch.beta);
        let s = int::<T>(spin(a * half_trunc(b).rem_euclid(2)));
        let u = st.get(Characteristic::new(1 - a, 0))?.0;
        let w = st.get(Characteristic::new(0, 1 - b))?.0;
        rep.push(format!("char{ch}"), der, &[p / t1 * val, -(c.sq(ch) * u * w / t1) * (s * pi)]);
    }
    Ok(rep)
}

fn tau_system<T: Real>(st: &ThetaState<'_, T>, kind: SystemKind) -> Result<ResidualReport> {
    let c = Consts::at(st.tau, st.opts)?;
    st.guard(&c, kind.label())?;
    let mut rep = ResidualReport::new(kind, grid_x(st.x, st.tau));
    let i = imag_unit::<T>();
    let pi = pi::<T>();
    let v = c.v;
    let (p, dp) = st.th1p()?;
    let mut t = [zero(); 5];
    let mut d = [zero(); 5];
    for k in 1..=4u8 {
        let (a, b) = st.classical(k)?;
        t[k as usize] = a;
        d[k as usize] = b;
    }
    let t1 = t[1];
    let t1s = t1 * t1;
    let a = -i / (pi * int::<T>(4));
    let b = i * (pi / int::<T>(4));
    let ce = i * c.eta / pi;
    let cq = i * (pi / int::<T>(12)) * (v[3].powu(4) + v[4].powu(4));
    let sq = |z: Complex<T>| z * z;

    rep.push("th1", d[1], &[a * p * p / t1, b * sq(v[3]) * sq(v[4]) * sq(t[2]) / t1, ce * t1, cq * t1]);
    let inner = p / t1 - v[2] * v[2] * t[3] * t[4] / (t1 * t[2]) * pi;
    rep.push("th2", d[2], &[a * sq(inner) * t[2], b * sq(v[3]) * sq(v[4]) * sq(t1) / t[2], ce * t[2], cq * t[2]]);
    for (k, n, m) in [(3usize, 2usize, 4usize), (4, 2, 3)] {
        let terms = [
            a * p * p / t1s * t[k],
            i * lit::<T>(0.5) * sq(v[k]) * t[n] * t[m] * p / t1s,
            -b * sq(v[2]) * sq(v[k]) * sq(t[m]) / t1s * t[k],
            ce * t[k],
            cq * t[k],
        ];
        rep.push(format!("th{k}"), d[k], &terms);
    }
    rep.push(
        "th1p",
        dp,
        &[
            a * p * p * p / t1s,
            b * sq(v[3]) * sq(v[4]) * sq(t[2]) / t1s * p * int::<T>(3),
            ce * p * int::<T>(3),
            cq * p * int::<T>(3),
            -i * (pi * pi / int::<T>(2)) * sq(v[2]) * sq(v[3]) * sq(v[4]) * t[2] * t[3] * t[4] / t1s,
        ],
    );

    let prod = sq(v[2]) * sq(v[3]) * sq(v[4]);
    for ch in CHAR_GRID {
        let (al, be) = (ch.alpha, ch.beta);
        let (val, der) = st.get(ch)?;
        let s = int::<T>(spin(al * half_trunc(be).rem_euclid(2)));
        let cu = Characteristic::new(1 - al, 0);
        let cw = Characteristic::new(0, 1 - be);
        let u = st.get(cu)?.0;
        let w = st.get(cw)?.0;
        let half_sym = lit::<T>(0.5) * int::<T>(1 + spin(al * be));
        let terms = [
            a * p * p / t1s * val,
            i * lit::<T>(0.5) * s * c.sq(ch) * u * w / t1s * p,
            b * prod * sq(t[2]) / sq(v[2]) / t1s * val,
            -b * prod * (sq(u) / c.sq(cu) + sq(w) / c.sq(cw)) * half_sym / t1s * val,
            ce * val,
            cq * val,
        ];
        rep.push(format!("char{ch}"), der, &terms);
    }
    Ok(rep)
}

/// x-system, τ-system or heat identity for θ at one point.
pub fn residual_theta_system<T: Real>(kind: SystemKind, x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<ResidualReport> {
    let one = Complex::new(T::one(), T::zero());
    match kind {
        SystemKind::ThetaX => {
            let st = ThetaState {
                family: GeneralSolution::X { a: one, b: zero(), c: zero() },
                x,
                tau,
                opts,
            };
            x_system(&st, kind)
        }
        SystemKind::ThetaTau => {
            let st = ThetaState {
                family: GeneralSolution::Tau { a: one, b: x, a_prime: zero() },
                x,
                tau,
                opts,
            };
            tau_system(&st, kind)
        }
        SystemKind::ThetaHeat => {
            let mut rep = ResidualReport::new(kind, grid_x(x, tau));
            let four_pi_i = imag_unit::<T>() * pi::<T>() * int::<T>(4);
            for ch in CHAR_GRID {
                let xx = theta_mixed(ch, x, tau, 2, 0, opts)?;
                let tt = theta_mixed(ch, x, tau, 0, 1, opts)?;
                rep.push(format!("char{ch}"), xx, &[four_pi_i * tt]);
            }
            Ok(rep)
        }
        _ => Err(Error::InvalidArgument(format!("{kind} is not a θ-system"))),
    }
}

/// The τ-system for σ, ζ, ℘, ℘′ (which never reads g₃), its ω-partners at
/// `(ω, ω′) = (1, τ)`, and the algebraic integral for g₃.
///
/// The ω-derivatives come from weight homogeneity, `xf_x + ωf_ω + ω′f_ω′ = w·f`
/// with weights 1, −1, −2, −3, and `η′ = ζ(τ|1,τ)`.
pub fn residual_weier_tau<T: Real>(x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<ResidualReport> {
    let l = Lattice::new(*tau, *opts)?;
    let v = l.values(x)?;
    let dt = l.tau_derivatives(x)?;
    let (s, z, p, pp, eta, g2) = (v.sigma, v.zeta, v.wp, v.wp_prime, l.eta, l.g2);
    let ip = imag_unit::<T>() / pi::<T>();
    let n = |k: i64| int::<T>(k);
    let mut rep = ResidualReport::new(SystemKind::WeierTau, grid_x(x, tau));

    rep.push(
        "sigma_tau",
        dt.sigma,
        &[ip * p * s, -ip * z * z * s, ip * eta * x * z * s * n(2), -ip * eta * s * n(2), -ip * g2 * x * x * s / n(12)],
    );
    rep.push(
        "zeta_tau",
        dt.zeta,
        &[ip * pp, ip * eta * z * n(2), ip * p * z * n(2), -ip * p * x * eta * n(2), -ip * g2 * x / n(6)],
    );
    let m2 = -ip * n(2);
    rep.push("wp_tau", dt.wp, &[m2 * p * p * n(2), m2 * pp * z, -m2 * pp * x * eta, -m2 * eta * p * n(2), -m2 * g2 / n(3)]);
    let m6 = -ip * n(6);
    rep.push(
        "wp_prime_tau",
        dt.wp_prime,
        &[
            m6 * pp * p,
            -m6 * pp * eta,
            m6 * p * p * z * n(2),
            -m6 * p * p * x * eta * n(2),
            -m6 * g2 * z / n(6),
            m6 * g2 * x * eta / n(6),
        ],
    );

    let t = tau.value();
    let eta_p = l.zeta(t)?;
    let pxx = p * p * n(6) - g2 / n(2);
    rep.push(
        "sigma_omega",
        s - x * z * s - t * dt.sigma,
        &[-ip * t * (p - z * z - g2 * x * x / n(12)) * s, -ip * eta_p * (x * z - n(1)) * s * n(2)],
    );
    rep.push(
        "zeta_omega",
        -z + x * p - t * dt.zeta,
        &[-ip * t * (pp + z * p * n(2) - g2 * x / n(6)), -ip * eta_p * (z - x * p) * n(2)],
    );
    rep.push(
        "wp_omega",
        -p * n(2) - x * pp - t * dt.wp,
        &[ip * n(2) * t * (p * p * n(2) + z * pp - g2 / n(3)), -ip * n(2) * eta_p * (p * n(2) + x * pp)],
    );
    rep.push(
        "wp_prime_omega",
        -pp * n(3) - x * pxx - t * dt.wp_prime,
        &[
            ip * t * (p * pp * n(6) + z * p * p * n(12) - g2 * z),
            -ip * eta_p * (pp * n(6) + x * p * p * n(12) - g2 * x),
        ],
    );

    rep.push("g3_integral", l.g3, &[p * p * p * n(4), -g2 * p, -pp * pp]);
    Ok(rep)
}

/// `σ_xx − 2xησ_x − πiσ_τ + (2η + g₂x²/12)σ = 0`.
pub fn residual_sigma_heat<T: Real>(x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<ResidualReport> {
    let l = Lattice::new(*tau, *opts)?;
    let v = l.values(x)?;
    let dt = l.tau_derivatives(x)?;
    let sxx = (v.zeta * v.zeta - v.wp) * v.sigma;
    let sx = v.zeta * v.sigma;
    let pi_i = imag_unit::<T>() * pi::<T>();
    let mut rep = ResidualReport::new(SystemKind::SigmaHeat, grid_x(x, tau));
    rep.push(
        "sigma_heat",
        sxx,
        &[
            x * l.eta * sx * int::<T>(2),
            pi_i * dt.sigma,
            -l.eta * v.sigma * int::<T>(2),
            -l.g2 * x * x * v.sigma / int::<T>(12),
        ],
    );
    Ok(rep)
}

/// Weierstrass' two linear equations on σ(x; g₂, g₃), with σ and its
/// `g₂, g₃` partials taken from the exact series through `x^{2·order+1}`.
pub fn residual_s12<T: Real>(x: Complex<T>, tau: &Tau<T>, order: usize, opts: &EvalOptions) -> Result<ResidualReport> {
    let g2 = g2_series(tau, opts)?;
    let g3 = g3_series(tau, opts)?;
    let s = sigma_series_poly(order)?;
    let vars = [g2, g3];
    let sig = s.eval(x, &vars);
    let sx = s.eval_dx(x, &vars, 1);
    let sxx = s.eval_dx(x, &vars, 2);
    let s2 = s.partial(0).eval(x, &vars);
    let s3 = s.partial(1).eval(x, &vars);
    let n = |k: i64| int::<T>(k);
    let mut rep = ResidualReport::new(SystemKind::SigmaPdeS12, format!("{} order={order}", grid_x(x, tau)));
    rep.push("euler", x * sx, &[g2 * s2 * n(4), g3 * s3 * n(6), sig]);
    rep.push("halphen", sxx, &[g3 * s2 * n(12), g2 * g2 * s3 * lit::<T>(2.0 / 3.0), -g2 * x * x * sig / n(12)]);

    let next = sigma_series_poly(order + 1)?;
    let (pw, c) = next.coefficients.last().expect("series is non-empty");
    let pw = *pw as i64;
    let tail = c.eval(&vars) * x.powi((pw - 2) as i32) * n(pw * (pw - 1));
    rep.tail_estimate = Some(to_c64(tail).norm());
    Ok(rep)
}

/// Variables of the ϑ-representation polynomials: `(π, A, B)` with
/// `A = ϑ⁴_{α0}`, `B = ϑ⁴_{0β}`; returns `ϑ₂⁴, ϑ₃⁴, ϑ₄⁴` in those variables.
fn fourth_powers_in_rep(alpha: i64, beta: i64) -> [Poly; 3] {
    let a = Poly::var(3, 1);
    let b = Poly::var(3, 2);
    match (alpha.rem_euclid(2), beta.rem_euclid(2)) {
        (1, 1) => [a.clone(), a.add(&b), b],
        (1, 0) => [a.clone(), b.clone(), b.sub(&a)],
        (0, 1) => [a.sub(&b), a, b],
        _ => unreachable!("representation (0,0) is rejected by callers"),
    }
}

/// `e_{γδ}` as a polynomial in `(π, A, B)`.
fn branch_poly(gd: Characteristic, alpha: i64, beta: i64) -> Poly {
    let f = fourth_powers_in_rep(alpha, beta);
    let pick = |ch: Characteristic| -> Poly {
        if ch.is_odd() {
            return Poly::zero(3);
        }
        f[(ch.classical_index().0 - 2) as usize].clone()
    };
    let (g, d) = (gd.alpha, gd.beta);
    let inner = pick(Characteristic::new(g - 1, 0))
        .scale(&GaussRat::int(spin(d)))
        .sub(&pick(Characteristic::new(0, d - 1)).scale(&GaussRat::int(spin(g))));
    inner.mul(&Poly::monomial(3, &[(0, 2)], GaussRat::ratio(1, 12)))
}

/// Both equations for Ξ(x; e_λ, g₂) plus the ϑ-represented second equation in
/// each admissible representation. `branch` selects `e_λ = e_{γδ}`; for
/// `ε = 1` it also selects which σ_λ the series is.
pub fn residual_xi_epsilon<T: Real>(
    epsilon: u8,
    branch: Characteristic,
    x: Complex<T>,
    tau: &Tau<T>,
    order: usize,
    opts: &EvalOptions,
) -> Result<ResidualReport> {
    let s = xi_series_poly(epsilon, order)?;
    let e = branch_point(branch, tau, opts)?;
    let g2 = g2_series(tau, opts)?;
    let vars = [e, g2];
    let xi = s.eval(x, &vars);
    let xx = s.eval_dx(x, &vars, 2);
    let xe = s.partial(0).eval(x, &vars);
    let xg = s.partial(1).eval(x, &vars);
    let eps = int::<T>(epsilon as i64);
    let n = |k: i64| int::<T>(k);
    let mut rep = ResidualReport::new(
        SystemKind::XiEpsilon,
        format!("{} epsilon={epsilon} branch={branch} order={order}", grid_x(x, tau)),
    );
    rep.push("euler", x * s.eval_dx(x, &vars, 1), &[e * xe * n(2), g2 * xg * n(4), xi * (n(1) - eps)]);
    rep.push(
        "halphen",
        xx,
        &[
            (e * e * n(4) - g2 * lit::<T>(2.0 / 3.0)) * xe,
            (e * e * e * n(4) - g2 * e) * xg * n(12),
            -(e * xi) * eps,
            -g2 * x * x * xi / n(12),
        ],
    );

    for (al, be) in [(1i64, 0i64), (0, 1), (1, 1)] {
        let op = HalphenRep::Theta { alpha: al, beta: be };
        let (g2p, _) = g_polys_theta(al, be);
        let ep = branch_poly(branch, al, be);
        let a = vartheta_char(Characteristic::new(al, 0), tau, opts)?.powu(4);
        let b = vartheta_char(Characteristic::new(0, be), tau, opts)?.powu(4);
        let pv = [Complex::new(pi::<T>(), T::zero()), a, b];
        let de = halphen_op(&ep, op).eval(&pv);
        let dg = halphen_op(&g2p, op).eval(&pv);
        let quad = (a * a + a * b * int::<T>(spin(al + be)) + b * b) * (pi::<T>().powi(4) / n(144));
        rep.push(
            format!("theta_form[{al},{be}]"),
            xx,
            &[-xe * de, -xg * dg, -(ep.eval(&pv) * xi) * eps, -quad * x * x * xi],
        );
    }
    Ok(rep)
}

/// Dispatch with default orders (σ series order 20, Ξ series order 18, ε = 1, e₂).
pub fn residual_weier_system<T: Real>(kind: SystemKind, x: Complex<T>, tau: &Tau<T>, opts: &EvalOptions) -> Result<ResidualReport> {
    match kind {
        SystemKind::WeierTau => residual_weier_tau(x, tau, opts),
        SystemKind::SigmaHeat => residual_sigma_heat(x, tau, opts),
        SystemKind::SigmaPdeS12 => residual_s12(x, tau, 20, opts),
        SystemKind::XiEpsilon => residual_xi_epsilon(1, Characteristic::new(0, 0), x, tau, 18, opts),
        _ => Err(Error::InvalidArgument(format!("{kind} is not a Weierstrass system"))),
    }
}

const PI: usize = 0;
const ETA: usize = 1;
const X2: usize = 2;
const X3: usize = 3;
const X4: usize = 4;
const NV: usize = 5;

fn gi(num: i64, den: i64) -> GaussRat {
    GaussRat::i().mul(&GaussRat::ratio(num, den))
}

/// Right sides of the ϑ/η flow
///
/// ```text
/// ϑ₂′/ϑ₂ = iη/π + (πi/12)(ϑ₃⁴ + ϑ₄⁴)
/// ϑ₃′/ϑ₃ = iη/π + (πi/12)(ϑ₂⁴ − ϑ₄⁴)
/// ϑ₄′/ϑ₄ = iη/π − (πi/12)(ϑ₂⁴ + ϑ₃⁴)
/// η′     = (i/π)(2η² − (π⁴/144)(ϑ₂⁸ + ϑ₃⁸ + ϑ₄⁸))
/// ```
///
/// as polynomials in `(π, η, ϑ₂⁴, ϑ₃⁴, ϑ₄⁴)`. A single term can be negated to
/// build a deliberately wrong flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VarFlow {
    flip: Option<(usize, usize)>,
}

type Term = (&'static [(usize, i32)], (i64, i64));

const VAR_TERMS: [&[Term]; 4] = [
    &[(&[(PI, -1), (ETA, 1)], (1, 1)), (&[(PI, 1), (X3, 1)], (1, 12)), (&[(PI, 1), (X4, 1)], (1, 12))],
    &[(&[(PI, -1), (ETA, 1)], (1, 1)), (&[(PI, 1), (X2, 1)], (1, 12)), (&[(PI, 1), (X4, 1)], (-1, 12))],
    &[(&[(PI, -1), (ETA, 1)], (1, 1)), (&[(PI, 1), (X2, 1)], (-1, 12)), (&[(PI, 1), (X3, 1)], (-1, 12))],
    &[
        (&[(PI, -1), (ETA, 2)], (2, 1)),
        (&[(PI, 3), (X2, 2)], (-1, 144)),
        (&[(PI, 3), (X3, 2)], (-1, 144)),
        (&[(PI, 3), (X4, 2)], (-1, 144)),
    ],
];

/// Equation labels of the ϑ/η flow, in [`VarFlow`] order.
pub const VAR_LABELS: [&str; 4] = ["vartheta2", "vartheta3", "vartheta4", "eta"];

impl VarFlow {
    pub fn standard() -> Self {
        Self::default()
    }

    /// Negates term `term` of equation `equation` (0..3 = ϑ₂, ϑ₃, ϑ₄, η).
    pub fn with_sign_flip(equation: usize, term: usize) -> Result<Self> {
        if equation >= 4 || term >= VAR_TERMS[equation].len() {
            return Err(Error::InvalidArgument(format!("no flow term ({equation},{term})")));
        }
        Ok(Self {
            flip: Some((equation, term)),
        })
    }

    pub fn is_standard(&self) -> bool {
        self.flip.is_none()
    }

    fn poly(&self, eq: usize) -> Poly {
        let mut p = Poly::zero(NV);
        for (j, (mono, (num, den))) in VAR_TERMS[eq].iter().enumerate() {
            let sign = if self.flip == Some((eq, j)) { -1 } else { 1 };
            p = p.add(&Poly::monomial(NV, mono, gi(sign * num, *den)));
        }
        p
    }

    /// `ϑ_k′/ϑ_k` for `k = 2, 3, 4`.
    pub fn log_derivative(&self, k: u8) -> Poly {
        self.poly((k - 2) as usize)
    }

    pub fn eta_prime(&self) -> Poly {
        self.poly(3)
    }

    /// `d/dτ` acting on polynomials in `(π, η, ϑ₂⁴, ϑ₃⁴, ϑ₄⁴)`.
    pub fn derive(&self, p: &Poly) -> Poly {
        let x4 = |k: u8, idx: usize| Some(self.log_derivative(k).mul(&Poly::monomial(NV, &[(idx, 1)], GaussRat::int(4))));
        p.derive(&[None, Some(self.eta_prime()), x4(2, X2), x4(3, X3), x4(4, X4)])
    }

    /// `ϑ_k^{(n)}/ϑ_k` for `n = 0..=order`.
    pub fn vartheta_chain(&self, k: u8, order: usize) -> Vec<Poly> {
        let l = self.log_derivative(k);
        let mut out = vec![Poly::one(NV)];
        for n in 0..order {
            let next = self.derive(&out[n]).add(&out[n].mul(&l));
            out.push(next);
        }
        out
    }
}

fn flow_vars<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<([Complex<T>; NV], Consts<T>)> {
    let c = Consts::at(tau, opts)?;
    let v = [Complex::new(pi::<T>(), T::zero()), c.eta, c.v[2].powu(4), c.v[3].powu(4), c.v[4].powu(4)];
    Ok((v, c))
}

fn scaled<T: Real>(terms: Vec<Complex<T>>, by: Complex<T>) -> Vec<Complex<T>> {
    terms.into_iter().map(|t| t * by).collect()
}

/// The ϑ/η flow, the g-flow, or the (α,β)-form of the flow.
pub fn residual_constant_flow<T: Real>(
    kind: SystemKind,
    tau: &Tau<T>,
    flow: &VarFlow,
    rep: Characteristic,
    opts: &EvalOptions,
) -> Result<ResidualReport> {
    let (vars, c) = flow_vars(tau, opts)?;
    let z = Complex::new(T::zero(), T::zero());
    let i = imag_unit::<T>();
    let pi = pi::<T>();
    let eta_t = eta_w_dtau(tau, opts)?;
    match kind {
        SystemKind::VarthetaFlow => {
            let mut out = ResidualReport::new(kind, grid_tau(tau));
            for k in 2..=4u8 {
                let lhs = theta_mixed(Characteristic::classical(k), z, tau, 0, 1, opts)?;
                let terms = scaled(flow.log_derivative(k).eval_terms(&vars), c.v[k as usize]);
                out.push(VAR_LABELS[(k - 2) as usize], lhs, &terms);
            }
            out.push("eta", eta_t, &flow.eta_prime().eval_terms(&vars));
            Ok(out)
        }
        SystemKind::GFlow => {
            let (g2, g3) = (g2_series(tau, opts)?, g3_series(tau, opts)?);
            let ip = i / pi;
            let n = |k: i64| int::<T>(k);
            let mut out = ResidualReport::new(kind, grid_tau(tau));
            out.push("g2", g2_dtau(tau, opts)?, &[ip * g2 * c.eta * n(8), -ip * g3 * n(12)]);
            out.push("g3", g3_dtau(tau, opts)?, &[ip * g3 * c.eta * n(12), -ip * g2 * g2 * lit::<T>(2.0 / 3.0)]);
            out.push("eta", eta_t, &[ip * c.eta * c.eta * n(2), -ip * g2 / n(6)]);
            Ok(out)
        }
        SystemKind::VarthetaFlowAb => {
            if rep.alpha.rem_euclid(2) == 0 && rep.beta.rem_euclid(2) == 0 {
                return Err(Error::InvalidRepresentation {
                    alpha: rep.alpha,
                    beta: rep.beta,
                });
            }
            let mut out = ResidualReport::new(kind, format!("{} rep={rep}", grid_tau(tau)));
            let v4 = |ch: Characteristic| -> Result<Complex<T>> { Ok(vartheta_char(ch, tau, opts)?.powu(4)) };
            let mut chars = vec![Characteristic::THETA2, Characteristic::THETA3, Characteristic::THETA4];
            if !rep.is_odd() && !chars.contains(&rep) {
                chars.push(rep);
            }
            for ch in chars {
                let (a, b) = (ch.alpha, ch.beta);
                let v = vartheta_char(ch, tau, opts)?;
                let lhs = theta_mixed(ch, z, tau, 0, 1, opts)?;
                let q = i * (pi / int::<T>(12));
                let terms = [
                    v * i * c.eta / pi,
                    v * q * int::<T>(spin(b)) * v4(Characteristic::new(1 - a, 0))?,
                    -v * q * int::<T>(spin(a)) * v4(Characteristic::new(0, 1 - b))?,
                ];
                out.push(format!("vartheta{ch}"), lhs, &terms);
            }
            let a4 = v4(Characteristic::new(rep.alpha, 0))?;
            let b4 = v4(Characteristic::new(0, rep.beta))?;
            let k = -(i / pi) * (pi.powi(4) / int::<T>(72));
            out.push(
                "eta",
                eta_t,
                &[i / pi * c.eta * c.eta * int::<T>(2), k * a4 * a4, k * b4 * b4, k * a4 * b4 * int::<T>(spin(rep.alpha + rep.beta))],
            );
            Ok(out)
        }
        _ => Err(Error::InvalidArgument(format!("{kind} is not a constant flow"))),
    }
}

/// Jacobi's third-order equation on a ϑ-constant, the equation on its
/// logarithmic derivative, or the equation on `Λ = ln η̂`. Higher derivatives
/// come from repeated symbolic application of the flow. `which` selects ϑ₂, ϑ₃
/// or ϑ₄ (all three when absent; ignored for Λ).
pub fn residual_scalar_ode<T: Real>(
    kind: SystemKind,
    which: Option<u8>,
    tau: &Tau<T>,
    flow: &VarFlow,
    opts: &EvalOptions,
) -> Result<ResidualReport> {
    let (vars, _) = flow_vars(tau, opts)?;
    let mut out = ResidualReport::new(kind, grid_tau(tau));
    let ks: Vec<u8> = match which {
        Some(k @ 2..=4) => vec![k],
        Some(k) => return Err(Error::InvalidArgument(format!("vartheta index must be 2, 3 or 4, got {k}"))),
        None => vec![2, 3, 4],
    };
    let c = |k: i64| Poly::constant(NV, GaussRat::int(k));
    match kind {
        SystemKind::JacobiThetaOde => {
            for k in ks {
                let p = flow.vartheta_chain(k, 3);
                let a = p[3].sub(&p[1].mul(&p[2]).mul(&c(15))).add(&p[1].pow(3).mul(&c(30)));
                let b = p[2].sub(&p[1].pow(2).mul(&c(3)));
                let xk = Poly::monomial(NV, &[(PI, 2), (X2 + (k - 2) as usize, 2)], GaussRat::one());
                let r = a.pow(2).add(&b.pow(3).mul(&c(32))).add(&xk.mul(&b.pow(2)));
                out.push_zero(format!("vartheta{k}"), &r.eval_terms(&vars));
            }
        }
        SystemKind::LogderivOde => {
            for k in ks {
                let f0 = flow.log_derivative(k);
                let f1 = flow.derive(&f0);
                let f2 = flow.derive(&f1);
                let f3 = flow.derive(&f2);
                let ff = f0.pow(2);
                let r = f1
                    .sub(&ff.mul(&c(2)))
                    .mul(&f3)
                    .sub(&f2.pow(2))
                    .add(&f0.pow(3).mul(&f2).mul(&c(16)))
                    .add(&f1.pow(2).mul(&f1.sub(&ff.mul(&c(6)))).mul(&c(4)));
                out.push_zero(format!("vartheta{k}"), &r.eval_terms(&vars));
            }
        }
        SystemKind::LambdaOde => {
            let l1 = Poly::monomial(NV, &[(PI, -1), (ETA, 1)], GaussRat::i());
            let l2 = flow.derive(&l1);
            let l3 = flow.derive(&l2);
            let a = l3.sub(&l2.mul(&l1).mul(&c(12))).add(&l1.pow(3).mul(&c(16)));
            let b = l2.sub(&l1.pow(2).mul(&c(2)));
            let lhs = a.pow(2).add(&b.pow(3).mul(&c(32)));
            let eh = etahat(tau, opts)?;
            let rhs = eh.powu(24) * pi::<T>().powi(6) * lit::<T>(4.0 / 27.0);
            let mut terms = lhs.eval_terms(&vars);
            terms.push(-rhs);
            out.push_zero("lambda", &terms);
        }
        _ => return Err(Error::InvalidArgument(format!("{kind} is not a scalar ODE"))),
    }
    Ok(out)
}

/// Substitutes a solution family into its system.
pub fn verify_general_solution<T: Real>(
    solution: GeneralSolution<T>,
    x: Complex<T>,
    tau: &Tau<T>,
    opts: &EvalOptions,
) -> Result<ResidualReport> {
    match solution {
        GeneralSolution::X { .. } => {
            let st = ThetaState {
                family: solution,
                x,
                tau,
                opts,
            };
            x_system(&st, SystemKind::GeneralSolutionX)
        }
        GeneralSolution::Tau { .. } => {
            let st = ThetaState {
                family: solution,
                x,
                tau,
                opts,
            };
            tau_system(&st, SystemKind::GeneralSolutionTau)
        }
        GeneralSolution::Last { map } => last_solution(&map, tau, opts),
    }
}

fn last_solution<T: Real>(map: &UnimodularMap, tau: &Tau<T>, opts: &EvalOptions) -> Result<ResidualReport> {
    let m = map.normalized();
    let mt = m.apply_tau(tau)?;
    let j = m.cocycle(tau.value());
    let cc = int::<T>(m.c);
    let z = zero::<T>();
    let half: T = lit(0.5);
    let w = j.powf(-half);
    let flow = VarFlow::standard();
    let mut vals = [z; 5];
    let mut ders = [z; 5];
    for k in 2..=4u8 {
        let ch = Characteristic::classical(k);
        let v = theta_mixed(ch, z, &mt, 0, 0, opts)?;
        let d = theta_mixed(ch, z, &mt, 0, 1, opts)?;
        vals[k as usize] = w * v;
        ders[k as usize] = -w / j * v * cc * half + w * d / (j * j);
    }
    let pi_i = imag_unit::<T>() * pi::<T>();
    let e0 = eta_w(&mt, opts)?;
    let e0t = eta_w_dtau(&mt, opts)?;
    let eta = e0 / (j * j) + pi_i * cc * half / j;
    let eta_t = -e0 * cc * int::<T>(2) / (j * j * j) + e0t / j.powu(4) - pi_i * cc * cc * half / (j * j);

    let vars = [Complex::new(pi::<T>(), T::zero()), eta, vals[2].powu(4), vals[3].powu(4), vals[4].powu(4)];
    let mut out = ResidualReport::new(SystemKind::GeneralSolutionTau, format!("{} last map={m}", grid_tau(tau)));
    for k in 2..=4u8 {
        let terms = scaled(flow.log_derivative(k).eval_terms(&vars), vals[k as usize]);
        out.push(VAR_LABELS[(k - 2) as usize], ders[k as usize], &terms);
    }
    out.push("eta", eta_t, &flow.eta_prime().eval_terms(&vars));
    Ok(out)
}

/// τ-derivatives of the coefficients of the x-system (`ϑ_k²` and
/// `4η + (π²/3)(ϑ₃⁴+ϑ₄⁴)`) through the flow versus term-wise series.
pub fn compatibility_report<T: Real>(tau: &Tau<T>, opts: &EvalOptions) -> Result<ResidualReport> {
    let (vars, c) = flow_vars(tau, opts)?;
    let flow = VarFlow::standard();
    let z = zero::<T>();
    let mut out = ResidualReport::new(SystemKind::VarthetaFlow, format!("{} compatibility", grid_tau(tau)));
    let mut d = [z; 5];
    for k in 2..=4u8 {
        d[k as usize] = theta_mixed(Characteristic::classical(k), z, tau, 0, 1, opts)?;
        let v = c.v[k as usize];
        let terms = scaled(flow.log_derivative(k).eval_terms(&vars), v * v * int::<T>(2));
        out.push(format!("vartheta{k}^2"), v * d[k as usize] * int::<T>(2), &terms);
    }
    let coef = Poly::monomial(NV, &[(ETA, 1)], GaussRat::int(4))
        .add(&Poly::monomial(NV, &[(PI, 2), (X3, 1)], GaussRat::ratio(1, 3)))
        .add(&Poly::monomial(NV, &[(PI, 2), (X4, 1)], GaussRat::ratio(1, 3)));
    let pi2 = pi::<T>() * pi::<T>() / int::<T>(3);
    let series = eta_w_dtau(tau, opts)? * int::<T>(4)
        + (c.v[3].powu(3) * d[3] + c.v[4].powu(3) * d[4]) * pi2 * int::<T>(4);
    out.push("x_coefficient", series, &flow.derive(&coef).eval_terms(&vars));
    Ok(out)
}

/// Central difference of `f` along `dir` at `z` with one Richardson level.
pub fn richardson<F>(f: F, z: Complex64, dir: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let d = |h: f64| -> Result<Complex64> { Ok((f(z + dir * h)? - f(z - dir * h)?) / (2.0 * h)) };
    Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
}

/// Step used by the finite-difference cross-checks.
pub const FD_STEP: f64 = 1e-5;

/// Term-wise derivatives against finite differences (step [`FD_STEP`]):
/// `∂ₓθ_k`, `∂_τθ_k`, `∂_τ` of η, η̂, g₂, g₃ and of σ, ζ, ℘, ℘′.
/// Returns `(label, relative gap)`; the gaps are only expected to be ≲ 1e−6.
pub fn finite_difference_crosscheck(x: Complex64, tau: &Tau<f64>, opts: &EvalOptions) -> Result<Vec<(String, f64)>> {
    let one = Complex64::new(1.0, 0.0);
    let gap = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(b.norm()).max(1e-300);
    let at = |z: Complex64| Tau::new(z);
    let t0 = tau.value();
    let mut out = Vec::new();
    for k in 1..=4u8 {
        let ch = Characteristic::classical(k);
        let fx = richardson(|z| theta_mixed(ch, z, tau, 0, 0, opts), x, one, FD_STEP)?;
        out.push((format!("dx theta{k}"), gap(fx, theta_mixed(ch, x, tau, 1, 0, opts)?)));
        let ft = richardson(|z| theta_mixed(ch, x, &at(z)?, 0, 0, opts), t0, one, FD_STEP)?;
        out.push((format!("dtau theta{k}"), gap(ft, theta_mixed(ch, x, tau, 0, 1, opts)?)));
    }
    let consts: [(&str, fn(&Tau<f64>, &EvalOptions) -> Result<Complex64>, fn(&Tau<f64>, &EvalOptions) -> Result<Complex64>); 4] = [
        ("eta", eta_w, eta_w_dtau),
        ("etahat", etahat, crate::qkernel::etahat_dtau),
        ("g2", g2_series, g2_dtau),
        ("g3", g3_series, g3_dtau),
    ];
    for (name, f, df) in consts {
        let fd = richardson(|z| f(&at(z)?, opts), t0, one, FD_STEP)?;
        out.push((format!("dtau {name}"), gap(fd, df(tau, opts)?)));
    }
    let dt = Lattice::new(*tau, *opts)?.tau_derivatives(x)?;
    let weier: [(&str, fn(&crate::weier::WeierValues<f64>) -> Complex64, Complex64); 4] = [
        ("sigma", |v| v.sigma, dt.sigma),
        ("zeta", |v| v.zeta, dt.zeta),
        ("wp", |v| v.wp, dt.wp),
        ("wp_prime", |v| v.wp_prime, dt.wp_prime),
    ];
    for (name, pick, analytic) in weier {
        let fd = richardson(|z| Ok(pick(&Lattice::new(at(z)?, *opts)?.values(x)?)), t0, one, FD_STEP)?;
        out.push((format!("dtau {name}"), gap(fd, analytic)));
    }
    Ok(out)
}

/// ℘ at general half-periods `(ω, ω′)`, with `(g₂, ζ, ℘′, η, η′)` alongside.
fn wp_general(x: Complex64, periods: &PeriodPair<f64>, opts: &EvalOptions) -> Result<[Complex64; 6]> {
    let (u, tau, w) = rescale_periods(x, periods)?;
    let l = Lattice::new(tau, *opts)?;
    let v = l.values(u)?;
    let eta_p = l.zeta(tau.value())?;
    Ok([v.wp / (w * w), v.zeta / w, v.wp_prime / (w * w * w), l.g2 / w.powu(4), l.eta / w, eta_p / w])
}

/// `∂℘/∂ω` and `∂℘/∂ω′` at general half-periods by finite differences of the
/// rescaled evaluation, against the closed forms in `(℘, ζ, ℘′, g₂, η, η′)`.
/// Returns the relative gaps `(ω, ω′)`.
pub fn wp_period_derivative_smoke(x: Complex64, periods: &PeriodPair<f64>, opts: &EvalOptions) -> Result<(f64, f64)> {
    let [p, z, pp, g2, eta, eta_p] = wp_general(x, periods, opts)?;
    let (w, wp_) = (periods.omega, periods.omega_prime);
    let ip = Complex64::new(0.0, 1.0 / std::f64::consts::PI);
    let common = p * p * 2.0 + z * pp - g2 / 3.0;
    let lin = p * 2.0 + x * pp;
    let d_omega = ip * 2.0 * (wp_ * common - eta_p * lin);
    let d_omega_p = -ip * 2.0 * (w * common - eta * lin);
    let one = Complex64::new(1.0, 0.0);
    let f_w = richardson(|o| Ok(wp_general(x, &PeriodPair { omega: o, omega_prime: wp_ }, opts)?[0]), w, one, FD_STEP)?;
    let f_wp = richardson(|o| Ok(wp_general(x, &PeriodPair { omega: w, omega_prime: o }, opts)?[0]), wp_, one, FD_STEP)?;
    let gap = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(b.norm());
    Ok((gap(f_w, d_omega), gap(f_wp, d_omega_p)))
}
