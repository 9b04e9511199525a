//! Laplace-convolution algebra on a uniform `p`-grid and the
//! integrating-factor Picard iteration for
//!
//! `F_t + p³F = Σ_{j,k} (−1)^j B_{j,k} * (p^j F) * F^{*k} + R`,
//!
//! written as `F = e^{−p³t}F_I + ∫_0^t e^{−p³(t−τ)}[R + Σ …](τ) dτ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};

/// Samples on the nodes `p_i = i·h`, `i = 0..=M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub h: f64,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_fn(p_max: f64, m: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let h = p_max / m as f64;
        GridFunction {
            h,
            values: (0..=m).map(|i| f(i as f64 * h)).collect(),
        }
    }

    pub fn constant(p_max: f64, m: usize, c: Complex64) -> Self {
        Self::from_fn(p_max, m, |_| c)
    }

    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn p_max(&self) -> f64 {
        self.h * self.m() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    fn check_same_grid(&self, o: &GridFunction) -> Result<()> {
        if self.values.len() != o.values.len() || self.h != o.h {
            return Err(Error::Config(format!(
                "grid mismatch: ({} nodes, h = {}) vs ({} nodes, h = {})",
                self.values.len(),
                self.h,
                o.values.len(),
                o.h
            )));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            h: self.h,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| f(self.node(i), *v))
                .collect(),
        }
    }

    pub fn zip_with(
        &self,
        o: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<GridFunction> {
        self.check_same_grid(o)?;
        Ok(GridFunction {
            h: self.h,
            values: self.values.iter().zip(&o.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    /// `sup_p |F(p)|·e^{−αp}`.
    pub fn weighted_sup(&self, alpha: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm() * (-alpha * self.node(i)).exp())
            .fold(0.0, f64::max)
    }

    /// Finite values only.
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Trapezoidal `(f*g)(p_n) = ∫_0^{p_n} f(s)g(p_n−s) ds`.
///
/// Products are paired as `f_i g_{n−i} + f_{n−i} g_i`, which makes the
/// result bitwise symmetric in `f` and `g`.
pub fn laplace_convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.check_same_grid(g)?;
    let (a, b) = (&f.values, &g.values);
    let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let mut acc = (a[0] * b[n] + a[n] * b[0]) * 0.5;
        let (mut i, mut j) = (1, n - 1);
        while i < j {
            acc += a[i] * b[j] + a[j] * b[i];
            i += 1;
            j -= 1;
        }
        if i == j {
            acc += a[i] * b[i];
        }
        *slot = acc * f.h;
    }
    Ok(GridFunction { h: f.h, values: out })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearTerm {
    pub j: u32,
    pub k: u32,
    pub kernel: GridFunction,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub terms: Vec<NonlinearTerm>,
    /// `R(p, τ_m)` on the output time grid (`steps + 1` entries), if any.
    pub forcing: Option<Vec<GridFunction>>,
}

impl NonlinearitySpec {
    fn validate(&self, grid: &GridFunction, steps: usize) -> Result<()> {
        for t in &self.terms {
            if t.j > 3 {
                return Err(Error::Config(format!("j = {} outside 0..=3", t.j)));
            }
            t.kernel.check_same_grid(grid)?;
        }
        if let Some(r) = &self.forcing {
            if r.len() != steps + 1 {
                return Err(Error::Config(format!(
                    "forcing has {} time slices, expected {}",
                    r.len(),
                    steps + 1
                )));
            }
            for g in r {
                g.check_same_grid(grid)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardSolution {
    pub times: Vec<f64>,
    pub values: Vec<GridFunction>,
    /// Weighted-sup distance between successive iterates.
    pub diffs: Vec<f64>,
    /// `diffs[i] / diffs[i−1]`.
    pub ratios: Vec<f64>,
}

impl PicardSolution {
    pub fn at_final(&self) -> &GridFunction {
        self.values.last().expect("at least one time slice")
    }
}

// Σ_{j,k} (−1)^j B_{j,k} * (p^j F) * F^{*k} at one time slice
fn nonlinearity(f: &GridFunction, spec: &NonlinearitySpec) -> Result<GridFunction> {
    let zero = GridFunction {
        h: f.h,
        values: vec![Complex64::new(0.0, 0.0); f.values.len()],
    };
    let kmax = spec.terms.iter().map(|t| t.k).max().unwrap_or(0) as usize;
    let mut powers = Vec::with_capacity(kmax + 1);
    if kmax >= 1 {
        powers.push(f.clone());
        for _ in 1..kmax {
            let next = laplace_convolve(powers.last().expect("non-empty"), f)?;
            powers.push(next);
        }
    }
    let mut out = zero;
    for t in &spec.terms {
        let pj = f.map(|p, v| v * p.powi(t.j as i32));
        let mut term = laplace_convolve(&pj, &t.kernel)?;
        if t.k >= 1 {
            term = laplace_convolve(&term, &powers[t.k as usize - 1])?;
        }
        let sign = if t.j % 2 == 0 { 1.0 } else { -1.0 };
        out = out.zip_with(&term, |a, b| a + b * sign)?;
    }
    Ok(out)
}

// ∫_0^{t_m} e^{−p³(t_m−τ)} S(p,τ) dτ by the trapezoid rule on the time grid
fn duhamel(slices: &[GridFunction], dt: f64, m: usize) -> GridFunction {
    let g = &slices[0];
    let mut values = vec![Complex64::new(0.0, 0.0); g.values.len()];
    if m == 0 {
        return GridFunction { h: g.h, values };
    }
    for (i, v) in values.iter_mut().enumerate() {
        let p3 = g.node(i).powi(3);
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, s) in slices.iter().enumerate().take(m + 1) {
            let w = if l == 0 || l == m { 0.5 } else { 1.0 };
            acc += s.values[i] * (w * (-p3 * dt * (m - l) as f64).exp());
        }
        *v = acc * dt;
    }
    GridFunction { h: g.h, values }
}

fn free_evolution(fi: &GridFunction, spec: &NonlinearitySpec, dt: f64, steps: usize) -> Vec<GridFunction> {
    (0..=steps)
        .map(|m| {
            let t = m as f64 * dt;
            let mut f = fi.map(|p, v| v * (-p.powi(3) * t).exp());
            if let Some(r) = &spec.forcing {
                let d = duhamel(r, dt, m);
                f = f.zip_with(&d, |a, b| a + b).expect("same grid");
            }
            f
        })
        .collect()
}

/// One application of the Picard map to a time-indexed iterate.
pub fn picard_apply(
    fi: &GridFunction,
    spec: &NonlinearitySpec,
    iterate: &[GridFunction],
    t_final: f64,
) -> Result<Vec<GridFunction>> {
    let steps = iterate.len() - 1;
    let dt = t_final / steps as f64;
    let base = free_evolution(fi, spec, dt, steps);
    if spec.terms.is_empty() {
        return Ok(base);
    }
    let n: Vec<GridFunction> = iterate
        .iter()
        .map(|f| nonlinearity(f, spec))
        .collect::<Result<_>>()?;
    base.into_iter()
        .enumerate()
        .map(|(m, b)| b.zip_with(&duhamel(&n, dt, m), |a, c| a + c))
        .collect()
}

fn distance(a: &[GridFunction], b: &[GridFunction], alpha: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            x.zip_with(y, |u, v| u - v)
                .expect("same grid")
                .weighted_sup(alpha)
        })
        .fold(0.0, f64::max)
}

/// Iterates the Picard map from the free evolution until successive
/// iterates differ by less than `tol` in the weighted sup norm
/// (weight `e^{−αp}`, `α = cfg.norm_alpha`).
pub fn picard_solve(
    fi: &GridFunction,
    spec: &NonlinearitySpec,
    t_final: f64,
    steps: usize,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<PicardSolution> {
    if !(tol > 0.0) || !(t_final > 0.0) || steps == 0 {
        return Err(Error::Config("need tol > 0, t_final > 0 and steps ≥ 1".into()));
    }
    spec.validate(fi, steps)?;
    let dt = t_final / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|m| m as f64 * dt).collect();
    let mut cur = free_evolution(fi, spec, dt, steps);
    let mut diffs = Vec::new();
    let mut ratios = Vec::new();
    let mut bad = 0;
    for _ in 0..cfg.picard_max_iter {
        let next = picard_apply(fi, spec, &cur, t_final)?;
        if next.iter().any(|g| !g.is_finite()) {
            return Err(Error::NoContraction { ratios });
        }
        let d = distance(&next, &cur, cfg.norm_alpha);
        if let Some(&prev) = diffs.last() {
            let r: f64 = if prev > 0.0 { d / prev } else { 0.0 };
            ratios.push(r);
            bad = if r >= 1.0 { bad + 1 } else { 0 };
            if bad >= 3 {
                return Err(Error::NoContraction { ratios });
            }
        }
        diffs.push(d);
        cur = next;
        if d < tol {
            return Ok(PicardSolution {
                times,
                values: cur,
                diffs,
                ratios,
            });
        }
    }
    Err(Error::PicardBudget {
        iterations: cfg.picard_max_iter,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceEval {
    pub value: Complex64,
    /// Bound on the neglected `∫_{P_max}^∞` contribution.
    pub tail_bound: f64,
}

// ∫_0^1 (1−s)e^{−zs} ds and ∫_0^1 s e^{−zs} ds
fn filon_weights(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.1 {
        let (mut a, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 2.0; // (n+2)!
        for n in 0..14 {
            a += pow / fact;
            b += pow * (n as f64 + 1.0) / fact;
            pow *= -z;
            fact *= n as f64 + 3.0;
        }
        (a, b)
    } else {
        let e = (-z).exp();
        let z2 = z * z;
        ((z - 1.0 + e) / z2, (1.0 - e * (1.0 + z)) / z2)
    }
}

/// `∫_0^{P_max} F(p) e^{−py} dp` for the piecewise-linear interpolant of
/// `F` (exact weights), with the tail bounded by `|F(P_max)|e^{−P_max Re y}/Re y`.
pub fn laplace_evaluate(f: &GridFunction, y: Complex64, tol: f64) -> Result<LaplaceEval> {
    if !(y.re > 0.0) {
        return Err(Error::Config(format!("laplace_evaluate needs Re y > 0, got {y}")));
    }
    let h = f.h;
    let (a, b) = filon_weights(y * h);
    let mut value = Complex64::new(0.0, 0.0);
    for i in 0..f.m() {
        let e = (-y * f.node(i)).exp();
        value += e * (f.values[i] * a + f.values[i + 1] * b);
    }
    value *= h;
    let p = f.p_max();
    let last = f.values[f.m()].norm();
    let tail_bound = last * (-p * y.re).exp() / y.re;
    if tail_bound > tol {
        let required_p_max = (last / (tol * y.re)).ln() / y.re;
        return Err(Error::LaplaceTruncation {
            bound: tail_bound,
            required_p_max,
        });
    }
    Ok(LaplaceEval { value, tail_bound })
}
