//! `f_t = f_xx`: the divergent small-`t` series and two integral
//! representations of its sum (Borel-plane and heat-kernel forms).
//!
//! Both integrals keep the normalisation `t^{-1/2}∫…`, i.e. they are `2√π`
//! times the unit-mass heat evolution.

use std::fmt;
use std::sync::Arc;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::quadrature::integrate_real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayClass {
    Bounded,
    /// Polynomial growth; still integrable against the Gaussian kernel.
    Polynomial,
    Gaussian,
    PolyGaussian,
    /// No decay information: the integral representations are refused.
    None,
}

#[derive(Clone)]
pub struct InitialDatum {
    pub u0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub decay: DecayClass,
    pub name: String,
}

impl fmt::Debug for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialDatum")
            .field("name", &self.name)
            .field("decay", &self.decay)
            .finish()
    }
}

impl InitialDatum {
    pub fn new(name: &str, decay: DecayClass, u0: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        InitialDatum {
            u0: Arc::new(u0),
            decay,
            name: name.to_string(),
        }
    }

    pub fn constant() -> Self {
        Self::new("const", DecayClass::Bounded, |_| 1.0)
    }

    pub fn linear() -> Self {
        Self::new("linear", DecayClass::Polynomial, |s| s)
    }

    pub fn gaussian() -> Self {
        Self::new("gaussian", DecayClass::Gaussian, |s| (-s * s).exp())
    }

    /// `s²·e^{−s²}`.
    pub fn poly_gaussian() -> Self {
        Self::new("polygaussian", DecayClass::PolyGaussian, |s| s * s * (-s * s).exp())
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "const" | "constant" => Ok(Self::constant()),
            "linear" => Ok(Self::linear()),
            "gaussian" => Ok(Self::gaussian()),
            "polygaussian" | "poly-gaussian" => Ok(Self::poly_gaussian()),
            other => Err(Error::Config(format!("unknown initial datum {other:?}"))),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.u0)(s)
    }
}

/// `F_k = F_0^{(2k)}/k!` for `k = 0..=order`, from the even derivatives
/// `derivs[m] = F_0^{(m)}(x)`.
pub fn heat_series(derivs: &[f64], order: usize) -> Result<Vec<f64>> {
    if derivs.len() < 2 * order + 1 {
        return Err(Error::Config(format!(
            "order {order} needs {} derivatives, got {}",
            2 * order + 1,
            derivs.len()
        )));
    }
    let mut fact = 1.0;
    Ok((0..=order)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            derivs[2 * k] / fact
        })
        .collect())
}

/// `e^{−50}` cut-off for the Gaussian weight.
const EXPONENT_CUTOFF: f64 = 50.0;

fn check_inputs(u: &InitialDatum, t: f64, x: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("t must be positive, got {t}")));
    }
    if !x.is_finite() {
        return Err(Error::Config(format!("x must be finite, got {x}")));
    }
    if u.decay == DecayClass::None {
        return Err(Error::Divergence(format!(
            "datum {:?} has no decay class; the integral may not exist",
            u.name
        )));
    }
    Ok(())
}

fn finish(
    q: crate::quadrature::QuadResult,
    scale: f64,
    cfg: &SolverConfig,
    edge: f64,
    peak: f64,
) -> Result<f64> {
    if let Some(s) = q.nonfinite_at {
        return Err(Error::Divergence(format!("integrand not finite at {s}")));
    }
    // the weight is e^{-50} at the edge; anything visible there means u₀ outgrows it
    if !edge.is_finite() || edge > cfg.quad_tol * peak.max(1.0) {
        return Err(Error::Divergence(format!(
            "integrand does not decay: {edge:e} at the cut-off"
        )));
    }
    let v = q.value.re * scale;
    let err = q.error * scale;
    let want = cfg.quad_tol * v.abs().max(1.0);
    if !q.converged && err > want {
        return Err(Error::Quadrature {
            estimate: err,
            tolerance: want,
        });
    }
    Ok(v)
}

/// Adaptive quadrature over unit-width panels, so that features of `u₀` much
/// narrower than the kernel are not stepped over by the first Kronrod rule.
fn integrate_panels(g: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_subdiv: usize) -> crate::quadrature::QuadResult {
    let n = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / n as f64;
    let tol = tol / n as f64;
    let mut acc = integrate_real(&g, a, a + h, tol, tol, max_subdiv);
    for i in 1..n {
        let q = integrate_real(&g, a + i as f64 * h, a + (i + 1) as f64 * h, tol, tol, max_subdiv);
        acc.value += q.value;
        acc.error += q.error;
        acc.evals += q.evals;
        acc.converged &= q.converged;
        acc.nonfinite_at = acc.nonfinite_at.or(q.nonfinite_at);
    }
    acc
}

/// `t^{−1/2}∫ u₀(s) e^{−(x−s)²/(4t)} ds`.
pub fn heat_kernel_solution(u: &InitialDatum, t: f64, x: f64, cfg: &SolverConfig) -> Result<f64> {
    check_inputs(u, t, x)?;
    let l = (4.0 * EXPONENT_CUTOFF * t).sqrt();
    let g = |s: f64| u.eval(s) * (-(x - s) * (x - s) / (4.0 * t)).exp();
    let scale = t.powf(-0.5);
    let tol = cfg.quad_tol / scale;
    let q = integrate_panels(g, x - l, x + l, tol, cfg.quad_max_subdiv);
    let edge = g(x - l).abs().max(g(x + l).abs());
    let peak = g(x).abs().max(u.eval(x).abs());
    finish(q, scale, cfg, edge, peak)
}

/// `t^{−1/2}∫_0^∞ y^{−1/2}[u₀(x+2√y) + u₀(x−2√y)] e^{−y/t} dy`, evaluated as
/// `2t^{−1/2}∫_0^∞ [u₀(x+2w) + u₀(x−2w)] e^{−w²/t} dw` after `y = w²`.
pub fn heat_borel_solution(u: &InitialDatum, t: f64, x: f64, cfg: &SolverConfig) -> Result<f64> {
    check_inputs(u, t, x)?;
    let w_max = (EXPONENT_CUTOFF * t).sqrt();
    let g = |w: f64| (u.eval(x + 2.0 * w) + u.eval(x - 2.0 * w)) * (-w * w / t).exp();
    let scale = 2.0 * t.powf(-0.5);
    let tol = cfg.quad_tol / scale;
    let q = integrate_panels(g, 0.0, w_max, tol, cfg.quad_max_subdiv);
    let edge = g(w_max).abs();
    let peak = g(0.0).abs().max(u.eval(x).abs());
    finish(q, scale, cfg, edge, peak)
}

/// `√(4π/(1+4t))·e^{−x²/(1+4t)}`: both representations for `u₀ = e^{−s²}`.
pub fn gaussian_closed_form(t: f64, x: f64) -> f64 {
    let a = 1.0 + 4.0 * t;
    (4.0 * std::f64::consts::PI / a).sqrt() * (-x * x / a).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SQRT_PI: f64 = 3.544_907_701_811_032;

    #[test]
    fn series_of_quadratic_terminates() {
        // F0 = x² at x = 1: derivatives 1, 2, 2, 0, 0, …
        let f = heat_series(&[1.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(f, vec![1.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn series_of_exponential() {
        let e = 1f64.exp();
        let f = heat_series(&[e; 9], 4).unwrap();
        assert!((f[3] - e / 6.0).abs() < 1e-15);
        assert!(heat_series(&[e; 3], 2).is_err());
    }

    #[test]
    fn constant_datum() {
        let cfg = SolverConfig::default();
        let u = InitialDatum::constant();
        for &(t, x) in &[(0.1, -2.0), (1.0, 0.3), (10.0, 3.0)] {
            assert!((heat_kernel_solution(&u, t, x, &cfg).unwrap() - TWO_SQRT_PI).abs() < 1e-11);
            assert!((heat_borel_solution(&u, t, x, &cfg).unwrap() - TWO_SQRT_PI).abs() < 1e-11);
        }
    }

    #[test]
    fn linear_datum() {
        let cfg = SolverConfig::default();
        let v = heat_kernel_solution(&InitialDatum::linear(), 0.7, 1.3, &cfg).unwrap();
        assert!((v - TWO_SQRT_PI * 1.3).abs() < 1e-10);
    }

    #[test]
    fn growing_datum_is_rejected() {
        let cfg = SolverConfig::default();
        let u = InitialDatum::new("growing", DecayClass::Bounded, |s| (s * s).exp());
        assert!(matches!(
            heat_kernel_solution(&u, 1.0, 0.0, &cfg),
            Err(Error::Divergence(_))
        ));
        let none = InitialDatum::new("opaque", DecayClass::None, |_| 1.0);
        assert!(heat_borel_solution(&none, 1.0, 0.0, &cfg).is_err());
        assert!(heat_borel_solution(&InitialDatum::constant(), 0.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn borel_form_is_even_for_even_data() {
        let cfg = SolverConfig::default();
        let u = InitialDatum::poly_gaussian();
        let a = heat_borel_solution(&u, 0.4, 1.7, &cfg).unwrap();
        let b = heat_borel_solution(&u, 0.4, -1.7, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
