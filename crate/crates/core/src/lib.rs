//! Theta functions with integer characteristics, their modular and
//! half-period transformation laws, the Weierstrass σ/ζ/℘ layer built on
//! them, exact coefficient recurrences for the power series, and residual
//! checks for the associated differential systems.

pub mod dynsys;
pub mod error;
pub mod modular;
pub mod poly;
pub mod qkernel;
pub mod recur;
pub mod scalar;
pub mod thetalg;
pub mod verify;
pub mod weier;

pub use error::{Error, Result};
pub use num_complex::{Complex, Complex64};
pub use modular::{HalfPeriodShift, ReductionResult, UnimodularMap};
pub use qkernel::{Characteristic, EvalOptions, Tau, ThetaValue};
pub use scalar::Real;
pub use weier::{Lattice, PeriodPair, WeierstrassInvariants};

pub type C64 = Complex<f64>;
pub type Tau64 = Tau<f64>;
pub type Tau32 = Tau<f32>;
