//! The inner hierarchy `G = Σ τᵏ G_k(η)`:
//!
//! ```text
//! G_0 + 2ηG_0' + 9G_0³G_0''' = 0
//! G_0³G_k''' + (2/9)ηG_k' + (3G_0²G_0''' − (7k−1)/9)G_k = R_k,   k ≥ 1
//! R_k = ½ Σ_{k1+k2+k3=k−1} G_{k1}G_{k2}G_{k3} − Σ_{kj<k, Σkj=k} G_{k1}G_{k2}G_{k3}G_{k4}'''
//! ```
//!
//! All orders are integrated together as one first-order system so that
//! `R_k` is available at every Runge–Kutta stage rather than interpolated
//! from the node values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::outer::hd_outer_coeffs;
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeFailure, OdeOptions};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

/// Far-field terms used per order when seeding at `η_max`.
const FAR_FIELD_TERMS: usize = 4;

/// `4√2/27`, the growth rate of the oscillatory modes in `η^{9/4}`.
pub const MODE_RATE: f64 = 0.209_513_968_180_115_4;

/// `(G, G', G'', G''')` at one node.
pub type Jet = [C; 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerSolution {
    /// Ray angle in radians.
    pub phi: f64,
    /// `|η|` at the nodes, decreasing from `η_max` to `η_min`.
    pub radii: Vec<f64>,
    /// `g[k][i]` is the jet of `G_k` at node `i`.
    pub g: Vec<Vec<Jet>>,
}

impl InnerSolution {
    pub fn orders(&self) -> usize {
        self.g.len()
    }

    pub fn ray(&self) -> C {
        C::from_polar(1.0, self.phi)
    }

    pub fn eta(&self, i: usize) -> C {
        self.ray() * self.radii[i]
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn values(&self, k: usize) -> Vec<C> {
        self.g[k].iter().map(|j| j[0]).collect()
    }
}

/// `(½T_{k−1}, S_k)` from values `v[j]` and third derivatives `d3[j]`, `j < k`.
fn tuple_sums(k: usize, v: &[C], d3: &[C]) -> (C, C) {
    let mut t = ZERO;
    for a in 0..k {
        for b in 0..k - a {
            let c = k - 1 - a - b;
            t += v[a] * v[b] * v[c];
        }
    }
    let mut s = ZERO;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let used = a + b + c;
                if used > k || k - used >= k {
                    continue;
                }
                s += v[a] * v[b] * v[c] * d3[k - used];
            }
        }
    }
    (t * 0.5, s)
}

fn rk_value(k: usize, v: &[C], d3: &[C]) -> C {
    let (half_t, s) = tuple_sums(k, v, d3);
    half_t - s
}

/// `R_k` nodewise from the jets of `G_0 … G_{k−1}`.
pub fn assemble_rk(k: usize, lower: &[Vec<Jet>]) -> Result<Vec<C>> {
    if k == 0 {
        return Err(Error::Config("R_k is defined for k ≥ 1".into()));
    }
    if lower.len() < k {
        return Err(Error::Config(format!(
            "R_{k} needs G_0…G_{}, got {} orders",
            k - 1,
            lower.len()
        )));
    }
    let n = lower[0].len();
    if lower[..k].iter().any(|g| g.len() != n) {
        return Err(Error::Config("lower orders live on different grids".into()));
    }
    let mut v = vec![ZERO; k];
    let mut d3 = vec![ZERO; k];
    Ok((0..n)
        .map(|i| {
            for j in 0..k {
                v[j] = lower[j][i][0];
                d3[j] = lower[j][i][3];
            }
            rk_value(k, &v, &d3)
        })
        .collect())
}

/// Third derivatives of every order from `(G, G', G'')`, laid out as
/// `y[3k..3k+3]`.
fn third_derivatives(eta: C, y: &[C], out: &mut [C]) {
    let orders = y.len() / 3;
    let g0 = y[0];
    let g0sq = g0 * g0;
    let g0cube = g0sq * g0;
    out[0] = -(g0 + 2.0 * eta * y[1]) / (9.0 * g0cube);
    if orders == 1 {
        return;
    }
    let v: Vec<C> = (0..orders).map(|k| y[3 * k]).collect();
    for k in 1..orders {
        let r = rk_value(k, &v, out);
        let gk = y[3 * k];
        let gk1 = y[3 * k + 1];
        let lin = (2.0 / 9.0) * eta * gk1 + (3.0 * g0sq * out[0] - (7 * k - 1) as f64 / 9.0) * gk;
        out[k] = (r - lin) / g0cube;
    }
}

fn hierarchy_rhs(eta: C, deta: C, y: &[C], dy: &mut [C], d3: &mut [C]) {
    third_derivatives(eta, y, d3);
    let orders = y.len() / 3;
    for k in 0..orders {
        dy[3 * k] = deta * y[3 * k + 1];
        dy[3 * k + 1] = deta * y[3 * k + 2];
        dy[3 * k + 2] = deta * d3[k];
    }
}

fn proximity(eta: C) -> Error {
    Error::SingularityProximity { last_reliable: eta }
}

/// Advances the state along the straight segment `a → b`. `h` is the step
/// guess in the segment parameter `s ∈ [0, 1]`.
pub fn advance(y: &mut [C], a: C, b: C, h: &mut f64, opts: &OdeOptions) -> Result<()> {
    let deta = b - a;
    let mut d3 = vec![ZERO; y.len() / 3];
    let f = |s: f64, y: &[C], dy: &mut [C]| hierarchy_rhs(a + deta * s, deta, y, dy, &mut d3);
    match integrate(f, 0.0, 1.0, y, h, opts) {
        Ok(_) => Ok(()),
        Err(OdeFailure::StepUnderflow { s, .. }) | Err(OdeFailure::NonFinite { s, .. }) => {
            Err(proximity(a + deta * s))
        }
        Err(OdeFailure::MaxSteps { s }) => Err(Error::NoConvergence {
            iterations: opts.max_steps,
            residual: f64::NAN,
            trajectory: vec![a + deta * s],
        }),
    }
}

/// Far-field jets `(G_k, G_k', G_k'')` for `k = 0..orders` at `η`, from the
/// outer coefficients.
pub fn far_field_state(eta: C, orders: usize) -> Result<Vec<C>> {
    let outer = hd_outer_coeffs(orders + FAR_FIELD_TERMS)?;
    let mut y = Vec::with_capacity(3 * orders);
    let ln = eta.ln();
    for k in 0..orders {
        let ff = outer.inner_far_field(k);
        let lead = -(k as f64 + 0.5);
        match ff.first() {
            Some((e, _)) if (e.to_f64() - lead).abs() < 1e-12 => {}
            _ => {
                return Err(Error::Matching(format!(
                    "far field of G_{k} does not start at η^{lead}"
                )))
            }
        }
        let (mut v, mut d1, mut d2) = (ZERO, ZERO, ZERO);
        for (e, a) in ff.iter().take(FAR_FIELD_TERMS) {
            let e = e.to_f64();
            let p = (ln * e).exp() * *a;
            v += p;
            d1 += p * e / eta;
            d2 += p * e * (e - 1.0) / (eta * eta);
        }
        y.extend([v, d1, d2]);
    }
    Ok(y)
}

/// `ln` of the worst-case growth of the oscillatory modes between the two
/// radii on a ray at angle `phi`.
pub fn mode_amplification(phi: f64, r_hi: f64, r_lo: f64) -> f64 {
    MODE_RATE * (2.25 * phi).sin().abs() * (r_hi.powf(2.25) - r_lo.powf(2.25)).abs()
}

fn check_ray(phi: f64, eta_max: f64, eta_min: f64, cfg: &SolverConfig) -> Result<()> {
    let wedge = 2.0 * std::f64::consts::PI / 9.0;
    if !(phi.abs() < wedge) {
        return Err(Error::Config(format!(
            "ray angle {:.4} rad lies outside the wedge |arg η| < 2π/9",
            phi
        )));
    }
    if !(eta_min > 0.0 && eta_max > eta_min) {
        return Err(Error::Config(format!(
            "need eta_max > eta_min > 0, got {eta_max} and {eta_min}"
        )));
    }
    // inward integration off the real axis amplifies round-off in the modes
    // e^{±iKη^{9/4}}; refuse once the amplified tolerance is visible
    let amp = mode_amplification(phi, eta_max, eta_min);
    if amp + cfg.ode_rel_tol.ln() > (1e-3f64).ln() {
        return Err(Error::Unstable(format!(
            "inward integration along arg η = {phi:.4} amplifies errors by e^{amp:.1}; \
             integrate along the real axis and continue at small |η| instead"
        )));
    }
    Ok(())
}

pub fn ode_options(cfg: &SolverConfig) -> OdeOptions {
    OdeOptions {
        rtol: cfg.ode_rel_tol,
        atol: cfg.ode_abs_tol,
        ..OdeOptions::default()
    }
}

/// Integrates `G_0 … G_{orders−1}` inward along `arg η = phi` and stores the
/// jets on a uniform `|η|` grid with spacing at most `cfg.eta_step`.
pub fn solve_hierarchy(
    phi: f64,
    eta_max: f64,
    eta_min: f64,
    orders: usize,
    cfg: &SolverConfig,
) -> Result<InnerSolution> {
    if orders == 0 {
        return Err(Error::Config("need at least one order".into()));
    }
    check_ray(phi, eta_max, eta_min, cfg)?;
    let m = ((eta_max - eta_min) / cfg.eta_step).ceil().max(8.0) as usize;
    let dr = (eta_max - eta_min) / m as f64;
    let radii: Vec<f64> = (0..=m)
        .map(|i| if i == m { eta_min } else { eta_max - i as f64 * dr })
        .collect();
    let ray = C::from_polar(1.0, phi);
    let opts = ode_options(cfg);
    let mut y = far_field_state(ray * eta_max, orders)?;
    let mut g: Vec<Vec<Jet>> = vec![Vec::with_capacity(m + 1); orders];
    let mut d3 = vec![ZERO; orders];
    let mut store = |y: &[C], eta: C, g: &mut Vec<Vec<Jet>>| -> Result<()> {
        if y[0].norm() < 1e-300 {
            return Err(proximity(eta));
        }
        third_derivatives(eta, y, &mut d3);
        for k in 0..orders {
            g[k].push([y[3 * k], y[3 * k + 1], y[3 * k + 2], d3[k]]);
        }
        if !(y[1].norm() <= cfg.blowup_threshold) {
            return Err(proximity(eta));
        }
        Ok(())
    };
    store(&y, ray * eta_max, &mut g)?;
    let mut h = 0.0;
    for w in radii.windows(2) {
        let (a, b) = (ray * w[0], ray * w[1]);
        advance(&mut y, a, b, &mut h, &opts)?;
        store(&y, b, &mut g)?;
    }
    Ok(InnerSolution { phi, radii, g })
}

/// `G_0` alone.
pub fn solve_g0(phi: f64, eta_max: f64, eta_min: f64, cfg: &SolverConfig) -> Result<InnerSolution> {
    solve_hierarchy(phi, eta_max, eta_min, 1, cfg)
}

/// Extends `lower` (which must hold `G_0 … G_{k−1}`) by `G_k`, re-integrating
/// the coupled system on the same grid.
pub fn solve_gk(k: usize, lower: &InnerSolution, cfg: &SolverConfig) -> Result<InnerSolution> {
    if k == 0 || lower.orders() < k {
        return Err(Error::Config(format!(
            "G_{k} needs G_0…G_{} on the grid",
            k.saturating_sub(1)
        )));
    }
    if lower.g[0].iter().any(|j| j[0].norm() < 1e-300) {
        return Err(Error::Division("G_0 vanishes on the grid"));
    }
    let n = lower.len();
    let (hi, lo) = (lower.radii[0], lower.radii[n - 1]);
    let step = (hi - lo) / (n - 1) as f64;
    let mut c = cfg.clone();
    c.eta_step = step * (1.0 + 1e-12);
    solve_hierarchy(lower.phi, hi, lo, k + 1, &c)
}

fn hermite(r0: f64, r1: f64, f0: C, d0: C, f1: C, d1: C, r: f64) -> C {
    let h = r1 - r0;
    let s = (r - r0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    f0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + d0 * (h * (s3 - 2.0 * s2 + s))
        + f1 * (-2.0 * s3 + 3.0 * s2)
        + d1 * (h * (s3 - s2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerEval {
    pub value: C,
    /// `|τ^{K+1}G_{K+1}(η)|`, or `NaN` when the solution stops at `K`.
    pub error_proxy: f64,
    /// `τᵏG_k(η)` for the summed orders.
    pub terms: Vec<C>,
    /// Set when the terms stop decreasing.
    pub warning: Option<String>,
}

impl InnerSolution {
    /// `G_k(η)` by cubic Hermite interpolation in `|η|`.
    pub fn interpolate(&self, k: usize, eta: C) -> Result<C> {
        let r = eta.norm();
        if r > 0.0 {
            let off = (eta / (self.ray() * r)).arg().abs();
            if off > 1e-9 {
                return Err(Error::Config(format!("η = {eta} is not on the stored ray")));
            }
        }
        let n = self.len();
        let (hi, lo) = (self.radii[0], self.radii[n - 1]);
        if !(r <= hi * (1.0 + 1e-14) && r >= lo * (1.0 - 1e-14)) {
            return Err(Error::Config(format!("|η| = {r} outside [{lo}, {hi}]")));
        }
        // radii decrease uniformly except possibly the last gap
        let dr = (hi - self.radii[1]).max(f64::MIN_POSITIVE);
        let mut i = (((hi - r) / dr).floor() as usize).min(n - 2);
        while i + 1 < n - 1 && self.radii[i + 1] > r {
            i += 1;
        }
        while i > 0 && self.radii[i] < r {
            i -= 1;
        }
        let ray = self.ray();
        let (a, b) = (&self.g[k][i], &self.g[k][i + 1]);
        Ok(hermite(
            self.radii[i],
            self.radii[i + 1],
            a[0],
            a[1] * ray,
            b[0],
            b[1] * ray,
            r,
        ))
    }

    /// `Σ_{k≤K} τᵏG_k(η)` with `K = orders − 2` when at least two orders are
    /// stored (the top one is kept for the error proxy), else `G_0`.
    pub fn eval(&self, eta: C, tau: f64) -> Result<InnerEval> {
        let summed = if self.orders() >= 2 { self.orders() - 1 } else { 1 };
        let mut terms = Vec::with_capacity(summed);
        let mut tk = 1.0;
        for k in 0..summed {
            terms.push(self.interpolate(k, eta)? * tk);
            tk *= tau;
        }
        let error_proxy = if summed < self.orders() {
            (self.interpolate(summed, eta)? * tk).norm()
        } else {
            f64::NAN
        };
        let mut warning = None;
        let mut prev = terms[0].norm();
        for (k, t) in terms.iter().enumerate().skip(1).chain(std::iter::empty()) {
            if tau != 0.0 && t.norm() >= prev {
                warning = Some(format!("term {k} does not decrease at η = {eta}, τ = {tau}"));
                break;
            }
            prev = t.norm();
        }
        if warning.is_none() && error_proxy >= prev && tau != 0.0 {
            warning = Some(format!("first neglected term does not decrease at η = {eta}, τ = {tau}"));
        }
        Ok(InnerEval {
            value: terms.iter().sum(),
            error_proxy,
            terms,
            warning,
        })
    }

    /// Per-node residual of each equation with every third derivative taken
    /// by a sixth-order central difference of the stored `G''`; the first
    /// and last three nodes are skipped. Returns `(|η|, residuals per k)`.
    pub fn residuals(&self) -> Vec<(f64, Vec<f64>)> {
        let n = self.len();
        let orders = self.orders();
        if n < 8 {
            return Vec::new();
        }
        let h = self.radii[1] - self.radii[0];
        let conj_ray = self.ray().conj();
        const W: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
        let mut out = Vec::new();
        // the final gap may be shorter than the rest
        for i in 3..n - 4 {
            let eta = self.eta(i);
            let d3: Vec<C> = (0..orders)
                .map(|k| {
                    let g = &self.g[k];
                    let mut acc = ZERO;
                    for (j, w) in W.iter().enumerate() {
                        acc += (g[i + j + 1][2] - g[i - j - 1][2]) * *w;
                    }
                    acc / h * conj_ray
                })
                .collect();
            let v: Vec<C> = (0..orders).map(|k| self.g[k][i][0]).collect();
            let g0 = v[0];
            let g0cube = g0 * g0 * g0;
            let mut res = Vec::with_capacity(orders);
            res.push((g0cube * d3[0] + (2.0 / 9.0) * eta * self.g[0][i][1] + g0 / 9.0).norm());
            for k in 1..orders {
                let lhs = g0cube * d3[k]
                    + (2.0 / 9.0) * eta * self.g[k][i][1]
                    + (3.0 * g0 * g0 * d3[0] - (7 * k - 1) as f64 / 9.0) * v[k];
                res.push((lhs - rk_value(k, &v, &d3)).norm());
            }
            out.push((self.radii[i], res));
        }
        out
    }

    /// Least-squares slope of `ln|G_k|` against `ln|η|` over nodes with
    /// `|η| ≥ r_min`.
    pub fn far_field_slope(&self, k: usize, r_min: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .radii
            .iter()
            .zip(&self.g[k])
            .filter(|(r, _)| **r >= r_min)
            .map(|(r, j)| (r.ln(), j[0].norm().ln()))
            .collect();
        least_squares_slope(&pts)
    }
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `Σ_{k≤K} τᵏG_k(η)`.
pub fn inner_eval(sol: &InnerSolution, eta: C, tau: f64) -> Result<InnerEval> {
    sol.eval(eta, tau)
}

/// `−G/9 − (2/9)ηG_η + (7/9)τG_τ + (τ/2)G³ − G³G_ηηη` with fourth-order
/// central differences; `h_eta` steps along `ray`, `h_tau` in `τ`.
pub fn inner_residual<F>(g: F, eta: C, tau: f64, ray: C, h_eta: f64, h_tau: f64) -> C
where
    F: Fn(C, f64) -> C,
{
    let at = |j: i32| g(eta + ray * (h_eta * j as f64), tau);
    let (m3, m2, m1, p1, p2, p3) = (at(-3), at(-2), at(-1), at(1), at(2), at(3));
    let g0 = g(eta, tau);
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h_eta) * ray.conj();
    let d3 = (-p3 + 8.0 * p2 - 13.0 * p1 + 13.0 * m1 - 8.0 * m2 + m3) / (8.0 * h_eta.powi(3)) * ray.conj().powi(3);
    let gt = if h_tau > 0.0 {
        let f = |j: f64| g(eta, tau + h_tau * j);
        (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h_tau)
    } else {
        ZERO
    };
    let g3 = g0 * g0 * g0;
    -g0 / 9.0 - (2.0 / 9.0) * eta * d1 + (7.0 / 9.0) * tau * gt + 0.5 * tau * g3 - g3 * d3
}
