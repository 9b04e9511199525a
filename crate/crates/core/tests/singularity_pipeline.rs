use borelsum_core::singularities::{
    approach_singularity, eta_seed, eta_singularities, eta_singularity, fit_singularity_exponent, fit_stokes_constant,
    solve_u, FitReference, Provenance, StokesConstant,
};
use borelsum_core::{Error, SolverConfig};
use num_complex::Complex64 as C;
use proptest::prelude::*;

#[test]
fn fitted_stokes_constant_is_stable_across_windows() {
    let cfg = SolverConfig::default();
    let a = fit_stokes_constant(8.0, 14.0, 0.25, &cfg).unwrap();
    let b = fit_stokes_constant(14.0, 20.0, 0.25, &cfg).unwrap();
    assert_eq!(a.provenance, Provenance::Fitted);
    let rel = (a.c - b.c).norm() / b.c.norm();
    assert!(rel < 0.02, "{} vs {} ({rel:e})", a.c, b.c);
    assert!(a.c.re < 0.0 && a.c.im < 0.0);
}

#[test]
fn predicted_singularity_is_found_with_two_thirds_exponent() {
    let cfg = SolverConfig::default();
    let c = fit_stokes_constant(8.0, 20.0, 0.25, &cfg).unwrap();
    let rec = eta_singularity(2, &c, &cfg).unwrap();
    assert!(rec.newton_residual < 1e-10);
    assert!(rec.in_wedge);
    let a = approach_singularity(rec.eta_s, &cfg).unwrap();
    let rel = (a.eta_s - rec.eta_s).norm() / a.eta_s.norm();
    assert!(rel < 0.02, "predicted {} numerical {} ({rel:e})", rec.eta_s, a.eta_s);
    assert!((a.fitted_exponent - 2.0 / 3.0).abs() < 0.05, "{}", a.fitted_exponent);
}

#[test]
fn seed_error_shrinks_and_modulus_grows() {
    let cfg = SolverConfig::default();
    let c = StokesConstant::user(C::new(-2.44, -2.41)).unwrap();
    let mut last_err = f64::INFINITY;
    let mut last_mod = 0.0;
    for n in (10..=100).step_by(10) {
        let r = eta_singularity(n, &c, &cfg).unwrap();
        let err = (eta_seed(n, c.c) - r.eta_s).norm() / r.eta_s.norm();
        assert!(err < last_err, "n = {n}: {err} ≥ {last_err}");
        assert!(err < 3.0 * (n as f64).ln() / n as f64);
        assert!(r.eta_s.norm() > last_mod);
        last_err = err;
        last_mod = r.eta_s.norm();
    }
}

#[test]
fn records_are_ordered_and_reproducible() {
    let cfg = SolverConfig::default();
    let c = StokesConstant::user(C::new(-2.44, -2.41)).unwrap();
    let a = eta_singularities(1..=40, &c, &cfg);
    let b = eta_singularities(1..=40, &c, &cfg);
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
        assert_eq!(x.n, i as i64 + 1);
        assert_eq!(x, y);
        assert!(x.newton_residual < 1e-10);
    }
}

#[test]
fn exponent_fit_rejects_thin_sampling() {
    let s: Vec<(C, C)> = (0..8).map(|i| (C::new(1.0 + 0.01 * i as f64, 0.0), C::new(1.0, 0.0))).collect();
    let r = fit_singularity_exponent(&s, C::new(0.0, 0.0), FitReference::Zero);
    assert!(matches!(r, Err(Error::Sampling(_))));
}

proptest! {
    #[test]
    fn solve_u_residual_and_periodicity(re in -1.0f64..2.0, im in -3.0f64..3.0) {
        let cfg = SolverConfig::default();
        let z = C::new(re, im);
        let seed = borelsum_core::singularities::u_seed(z);
        let u = solve_u(z, seed, &cfg);
        let w = solve_u(z + C::new(0.0, 2.0 * std::f64::consts::PI), seed, &cfg);
        if let (Ok(u), Ok(w)) = (u, w) {
            let f = |u: C| {
                let v = u.sqrt();
                0.25 * (z + 2.0).exp() - (-2.0 * v).exp() * (v + 1.0) / (v - 1.0)
            };
            prop_assert!(f(u).norm() < 1e-12);
            prop_assert!(f(w).norm() < 1e-12);
        }
    }
}
