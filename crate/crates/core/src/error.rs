use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus outside the upper half plane: Im(tau) = {im_tau}")]
    Domain { im_tau: f64 },

    #[error("series did not converge within {terms} terms (partial {partial}, tail estimate {tail:e})")]
    Truncation {
        partial: Complex64,
        tail: f64,
        terms: usize,
    },

    #[error("x = {x} is at or near a lattice point (pole)")]
    Pole { x: Complex64 },

    #[error("invalid representation ({alpha}, {beta}): characteristic must not be even-even")]
    InvalidRepresentation { alpha: i64, beta: i64 },

    #[error("unimodular map ({a}, {b}, {c}, {d}) is not normalized with c > 0")]
    Normalization { a: i64, b: i64, c: i64, d: i64 },

    #[error("resonance: theta((n-2)x) vanishes for n = {n} at x = {x}")]
    Resonance { n: i64, x: Complex64 },

    #[error("recurrence {family} produced non-integral entry at ({m}, {n}): {value}")]
    Integrality {
        family: String,
        m: i64,
        n: i64,
        value: String,
    },

    #[error("equation {equation} is singular at this point")]
    Singular { equation: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
