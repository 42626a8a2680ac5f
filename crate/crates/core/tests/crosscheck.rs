//! Finite-difference cross-checks of the term-wise derivatives.

use ellipticore::dynsys::{finite_difference_crosscheck, wp_period_derivative_smoke};
use ellipticore::{Complex64, EvalOptions, PeriodPair, Tau};

const TOL: f64 = 1e-6;

#[test]
fn termwise_derivatives_match_finite_differences() {
    let opts = EvalOptions::default();
    for (x, t) in [
        (Complex64::new(0.3, 0.0), Tau::from_parts(0.0, 1.2).unwrap()),
        (Complex64::new(0.21, 0.13), Tau::from_parts(0.3, 1.1).unwrap()),
        (Complex64::new(-0.4, 0.05), Tau::from_parts(-0.45, 0.9).unwrap()),
    ] {
        let gaps = finite_difference_crosscheck(x, &t, &opts).unwrap();
        assert_eq!(gaps.len(), 16);
        for (label, g) in gaps {
            assert!(g <= TOL, "{label} at x={x} tau={}: {g:e}", t.value());
        }
    }
}

#[test]
fn wp_period_derivatives_at_general_periods() {
    let opts = EvalOptions::default();
    for (w, wp, x) in [
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.2), Complex64::new(0.3, 0.1)),
        (Complex64::new(0.8, 0.3), Complex64::new(-0.2, 1.1), Complex64::new(0.25, -0.1)),
        (Complex64::new(1.7, -0.4), Complex64::new(0.6, 2.0), Complex64::new(0.5, 0.2)),
    ] {
        let (gw, gwp) = wp_period_derivative_smoke(x, &PeriodPair { omega: w, omega_prime: wp }, &opts).unwrap();
        assert!(gw <= TOL, "omega at ({w}, {wp}): {gw:e}");
        assert!(gwp <= TOL, "omega' at ({w}, {wp}): {gwp:e}");
    }
}
