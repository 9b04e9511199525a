//! Borel transform, Padé continuation in the Borel plane and the Laplace
//! integral back to the original variable.
//!
//! Convention: `Σ_{k≥1} a_k t^k ↦ Σ_{j≥0} a_{j+1} p^j / j!`, so that
//! `∫_0^∞ e^{−p/t} p^j/j! dp = t^{j+1}` inverts it term by term. The
//! caller chooses the variable `t` in which the series is summed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::quadrature::integrate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelSeries {
    pub coeffs: Vec<Complex64>,
    /// Reciprocal of the root-test limit over the trailing coefficients.
    pub radius_estimate: f64,
}

impl BorelSeries {
    pub fn eval(&self, p: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * p + c)
    }
}

fn root_test_radius(b: &[Complex64]) -> f64 {
    // sup of |b_j|^{1/j} over the trailing half of the nonzero coefficients
    let tail = b.len() / 2;
    let limit = b
        .iter()
        .enumerate()
        .skip(tail.max(1))
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| c.norm().powf(1.0 / j as f64))
        .fold(0.0, f64::max);
    if limit > 0.0 {
        1.0 / limit
    } else {
        f64::INFINITY
    }
}

/// `a[k−1]` is the coefficient of `t^k`; the constant term is the caller's.
pub fn borel_transform(a: &[Complex64]) -> BorelSeries {
    let mut fact = 1.0;
    let coeffs: Vec<Complex64> = a
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if j > 0 {
                fact *= j as f64;
            }
            c / fact
        })
        .collect();
    let radius_estimate = root_test_radius(&coeffs);
    BorelSeries {
        coeffs,
        radius_estimate,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PadeApproximant {
    pub num: Vec<Complex64>,
    /// Denominator coefficients with `den[0] = 1`.
    pub den: Vec<Complex64>,
}

fn horner(c: &[Complex64], p: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, x| acc * p + x)
}

impl PadeApproximant {
    pub fn eval(&self, p: Complex64) -> Complex64 {
        horner(&self.num, p) / horner(&self.den, p)
    }

    /// Taylor coefficients of `num/den` through `p^order`.
    pub fn taylor(&self, order: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(order + 1);
        for i in 0..=order {
            let mut v = self.num.get(i).copied().unwrap_or_default();
            for j in 1..self.den.len().min(i + 1) {
                v -= self.den[j] * out[i - j];
            }
            out.push(v);
        }
        out
    }

    /// Roots of the denominator.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        let mut den = self.den.clone();
        while den.len() > 1 && den.last().is_some_and(|c| c.norm() == 0.0) {
            den.pop();
        }
        let n = den.len() - 1;
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = den[n];
        let mut companion = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            companion[(i, n - 1)] = -den[i] / lead;
        }
        let ev = companion
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::Degenerate("companion eigenvalues did not converge".into()))?;
        Ok(ev.iter().copied().collect())
    }
}

// Relative size below which a singular value counts as zero.
const SINGULAR_RTOL: f64 = 1e-13;

/// `[m/n]` Padé approximant; lowers `n` while the matching system is
/// singular.
pub fn pade_approximant(b: &BorelSeries, m: usize, n: usize) -> Result<PadeApproximant> {
    if m + n + 1 > b.coeffs.len() {
        return Err(Error::Config(format!(
            "[{m}/{n}] Padé needs {} coefficients, have {}",
            m + n + 1,
            b.coeffs.len()
        )));
    }
    if b.coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::Degenerate("non-finite Borel coefficient".into()));
    }
    let c = |i: isize| -> Complex64 {
        if i < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            b.coeffs[i as usize]
        }
    };
    for nn in (0..=n).rev() {
        let mut den = vec![Complex64::new(1.0, 0.0)];
        if nn > 0 {
            // Σ_{j=1..nn} q_j c_{m+i−j} = −c_{m+i}, i = 1..nn
            let a = DMatrix::from_fn(nn, nn, |i, j| c(m as isize + i as isize + 1 - (j as isize + 1)));
            let rhs = DVector::from_fn(nn, |i, _| -c(m as isize + i as isize + 1));
            let sv = a.clone().svd(false, false).singular_values;
            let smax = sv.max();
            let smin = sv.min();
            if smax == 0.0 || smin <= SINGULAR_RTOL * smax {
                continue;
            }
            let q = match a.lu().solve(&rhs) {
                Some(q) => q,
                None => continue,
            };
            den.extend(q.iter().copied());
        }
        let num = (0..=m)
            .map(|i| {
                (0..den.len().min(i + 1))
                    .map(|j| den[j] * c(i as isize - j as isize))
                    .sum()
            })
            .collect();
        return Ok(PadeApproximant { num, den });
    }
    Err(Error::Degenerate(format!("[{m}/{n}] system singular at every denominator degree")))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceResult {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// `∫_0^∞ e^{−p/t} B(p) dp` along the ray `arg p = arg t`.
///
/// The ray is covered by panels `[0, |t|], [|t|, 2|t|], [2|t|, 4|t|], …`,
/// each integrated adaptively, until the integrand at the panel end
/// implies a negligible tail; that tail bound is added to the error.
pub fn laplace_sum<B: Fn(Complex64) -> Complex64>(
    b: B,
    t: Complex64,
    cfg: &SolverConfig,
) -> Result<LaplaceResult> {
    let r = t.norm();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Config(format!("laplace_sum needs a finite nonzero t, got {t}")));
    }
    let dir = t / r;
    let g = |s: f64| (-s / r).exp() * b(dir * s) * dir;
    let tol = cfg.quad_tol;
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let (mut a, mut e) = (0.0, r);
    let mut growth = 0;
    let mut last_end = f64::INFINITY;
    loop {
        let q = integrate(g, a, e, tol / 16.0, tol / 16.0, cfg.quad_max_subdiv);
        if let Some(s) = q.nonfinite_at {
            return Err(Error::Contour { p: dir * s });
        }
        value += q.value;
        error += q.error;
        let end = g(e).norm();
        if !end.is_finite() {
            return Err(Error::Divergence(format!("integrand overflows at |p| = {e}")));
        }
        let tail = 2.0 * end * r;
        let scale = value.norm().max(1.0);
        if e >= 4.0 * r && tail < 1e-2 * tol * scale {
            error += tail;
            break;
        }
        if e >= 8.0 * r && end > last_end {
            growth += 1;
            if growth >= 3 {
                return Err(Error::Divergence(format!(
                    "integrand grows along the ray (|e^(-p/t) B(p)| = {end:e} at |p| = {e})"
                )));
            }
        } else {
            growth = 0;
        }
        if e > 1e6 * r {
            return Err(Error::Divergence(format!("no decay up to |p| = {e}")));
        }
        last_end = end;
        a = e;
        e *= 2.0;
    }
    let want = tol * value.norm().max(1.0);
    if error > want {
        return Err(Error::Quadrature {
            estimate: error,
            tolerance: want,
        });
    }
    Ok(LaplaceResult {
        value,
        error_estimate: error,
    })
}

/// Laplace integral of a Padé approximant; a pole on (or within
/// `1e-8·|p|` of) the ray is a contour error.
pub fn laplace_sum_pade(
    pade: &PadeApproximant,
    t: Complex64,
    cfg: &SolverConfig,
) -> Result<LaplaceResult> {
    let dir = t / t.norm();
    for p in pade.poles()? {
        let rotated = p / dir;
        if rotated.re >= 0.0 && rotated.im.abs() <= 1e-8 * p.norm().max(1.0) {
            return Err(Error::Contour { p });
        }
    }
    laplace_sum(|p| pade.eval(p), t, cfg)
}

/// Borel–Padé–Laplace sum of `Σ_{k≥1} a_k t^k` (constant term excluded).
pub fn borel_pade_sum(
    a: &[Complex64],
    t: Complex64,
    m: usize,
    n: usize,
    cfg: &SolverConfig,
) -> Result<LaplaceResult> {
    let b = borel_transform(a);
    if b.coeffs.iter().all(|c| c.norm() == 0.0) {
        return Ok(LaplaceResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
        });
    }
    let pade = pade_approximant(&b, m, n)?;
    laplace_sum_pade(&pade, t, cfg)
}
