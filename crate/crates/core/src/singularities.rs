//! Movable singularities of `G_0` near the anti-Stokes line `arg η = −4π/9`.
//!
//! Close to that line `G_0 ≈ η^{−1/2}U(ζ)` with
//! `¼e^{ζ+2} = e^{−2√U}(√U+1)/(√U−1)` and
//! `ζ = −ln C + (9/8)ln η + iKη^{9/4}`, `K = 4√2/27`. Singular points of
//! `U(ζ)` translate into a lattice of `η_s` indexed by `n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Orientation, SolverConfig};
use crate::error::{Error, Result};
use crate::harrydym::inner::{advance, far_field_state, least_squares_slope, MODE_RATE};
use crate::ode::OdeOptions;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Centre of the singularity wedge (lower orientation).
pub const ANTI_STOKES_ARG: f64 = -4.0 * PI / 9.0;

fn ln4_minus_2() -> f64 {
    4f64.ln() - 2.0
}

/// `e^{−2v}(v+1)/(v−1)` with `v = √U`.
fn branch_rhs(v: C) -> C {
    (-2.0 * v).exp() * (v + 1.0) / (v - 1.0)
}

/// `ζ(U) = ln 4 − 2 − 2√U + Log((√U+1)/(√U−1))`, principal branches.
pub fn zeta_of_u(u: C) -> C {
    let v = u.sqrt();
    ln4_minus_2() - 2.0 * v + ((v + 1.0) / (v - 1.0)).ln()
}

/// `dζ/dU = −√U/(U−1)`.
pub fn dzeta_du(u: C) -> C {
    -u.sqrt() / (u - 1.0)
}

/// Newton on `F(U) = ¼e^{ζ+2} − e^{−2√U}(√U+1)/(√U−1)` in `v = √U`.
pub fn solve_u(zeta: C, seed: C, cfg: &SolverConfig) -> Result<C> {
    let lhs = 0.25 * (zeta + 2.0).exp();
    let mut v = seed.sqrt();
    if (v - 1.0).norm() < 1e-8 {
        return Err(Error::BranchCollision);
    }
    let f = |v: C| lhs - branch_rhs(v);
    let mut fv = f(v);
    let mut trajectory = vec![v * v];
    for _ in 0..cfg.newton_max_iter {
        if fv.norm() < cfg.newton_tol {
            return Ok(v * v);
        }
        let df = 2.0 * v * v * (-2.0 * v).exp() / ((v - 1.0) * (v - 1.0));
        let step = fv / df;
        let mut lambda = 1.0;
        let (mut vn, mut fn_) = (v, fv);
        for _ in 0..30 {
            vn = v - step * lambda;
            fn_ = f(vn);
            if fn_.norm().is_finite() && fn_.norm() < fv.norm() {
                break;
            }
            lambda *= 0.5;
        }
        if (vn - 1.0).norm() < 1e-8 {
            return Err(Error::BranchCollision);
        }
        v = vn;
        fv = fn_;
        trajectory.push(v * v);
    }
    let keep = trajectory.len().saturating_sub(16);
    trajectory.drain(..keep);
    if fv.norm() < cfg.newton_tol {
        return Ok(v * v);
    }
    Err(Error::NoConvergence {
        iterations: cfg.newton_max_iter,
        residual: fv.norm(),
        trajectory,
    })
}

/// Leading seed for `solve_u` when `|e^{−ζ}|` is small: `√U ≈ 1 + 8e^{−4−ζ}`.
pub fn u_seed(zeta: C) -> C {
    let v = 1.0 + 8.0 * (-4.0 - zeta).exp();
    v * v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaSingularity {
    pub n: i64,
    /// `−ln 4 + 2 − (2n−1)iπ`.
    pub displayed: C,
    /// `ln 4 − 2 − (2n−1)iπ`, the other sign.
    pub mirrored: C,
    /// Where `dζ/dU = 0` was found numerically, moved onto this lattice row.
    pub criterion: C,
    /// Which candidate the numerical criterion picks.
    pub selected: ZetaCandidate,
    /// Set when `displayed` disagrees with the criterion.
    pub flagged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZetaCandidate {
    Displayed,
    Mirrored,
    Neither,
}

/// Newton for `dζ/dU = 0` in `v = √U`: `h(v) = −v/(v²−1)` has its simple
/// root at `v = 0`. Returns `(U*, ζ(U*))`.
pub fn critical_point(seed: C, tol: f64, max_iter: usize) -> Result<(C, C)> {
    let mut v = seed.sqrt();
    let h = |v: C| -v / (v * v - 1.0);
    let dh = |v: C| (v * v + 1.0) / ((v * v - 1.0) * (v * v - 1.0));
    let mut trajectory = vec![v * v];
    for _ in 0..max_iter {
        let hv = h(v);
        if hv.norm() < tol {
            let u = v * v;
            // ζ at the limit point: Log((v+1)/(v−1)) → iπ as v → 0 from Re v ≥ 0
            let z = ln4_minus_2() - 2.0 * v + ((v + 1.0) / (v - 1.0)).ln();
            return Ok((u, z));
        }
        v -= hv / dh(v);
        trajectory.push(v * v);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: h(v).norm(),
        trajectory,
    })
}

/// The branch lattice `ζ_n` for `n` in `ns`, each cross-checked against the
/// numerical `dζ/dU = 0` point.
pub fn zeta_singularities(ns: std::ops::RangeInclusive<i64>) -> Result<Vec<ZetaSingularity>> {
    let (_, z_star) = critical_point(C::new(0.05, 0.01), 1e-14, 100)?;
    let tol = 1e-9;
    Ok(ns
        .map(|n| {
            let lattice = -((2 * n - 1) as f64) * PI * I;
            let displayed = -ln4_minus_2() + lattice;
            let mirrored = ln4_minus_2() + lattice;
            // move z* onto row n: shift by the multiple of 2πi closest to `mirrored`
            let m = ((mirrored.im - z_star.im) / (2.0 * PI)).round();
            let criterion = z_star + 2.0 * PI * m * I;
            let selected = if (criterion - displayed).norm() < tol {
                ZetaCandidate::Displayed
            } else if (criterion - mirrored).norm() < tol {
                ZetaCandidate::Mirrored
            } else {
                ZetaCandidate::Neither
            };
            ZetaSingularity {
                n,
                displayed,
                mirrored,
                criterion,
                selected,
                flagged: selected != ZetaCandidate::Displayed,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    UserSupplied,
    Fitted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesConstant {
    pub c: C,
    pub provenance: Provenance,
    /// RMS misfit of `ln C(η)` for fitted constants.
    pub fit_residual: Option<f64>,
}

impl StokesConstant {
    pub fn user(c: C) -> Result<Self> {
        if c.norm() == 0.0 || !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Config(format!("Stokes constant must be finite and nonzero, got {c}")));
        }
        Ok(StokesConstant {
            c,
            provenance: Provenance::UserSupplied,
            fit_residual: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityRecord {
    pub n: i64,
    pub eta_s: C,
    pub newton_residual: f64,
    pub iterations: usize,
    pub fitted_exponent: Option<f64>,
    pub stokes_c: C,
    /// `arg η_s` within the configured wedge about the anti-Stokes line.
    pub in_wedge: bool,
}

/// `iKη^{9/4} + (9/8)Log η − rhs`.
fn eta_equation(eta: C, rhs: C) -> C {
    I * MODE_RATE * (2.25 * eta.ln()).exp() + 1.125 * eta.ln() - rhs
}

fn eta_equation_derivative(eta: C) -> C {
    I * MODE_RATE * 2.25 * (1.25 * eta.ln()).exp() + 1.125 / eta
}

/// Right-hand side `−2 + ln 4 − (2n−1)iπ + Log C`.
pub fn eta_rhs(n: i64, c: C) -> C {
    ln4_minus_2() - ((2 * n - 1) as f64) * PI * I + c.ln()
}

/// Leading-order inversion `(rhs/(iK))^{4/9}` with the argument of the base
/// taken in `(−2π, 0]` so that the seed lands in the lower half plane.
pub fn eta_seed(n: i64, c: C) -> C {
    let b = eta_rhs(n, c) / (I * MODE_RATE);
    let mut a = b.arg();
    if a > 0.0 {
        a -= 2.0 * PI;
    }
    C::from_polar(b.norm().powf(4.0 / 9.0), a * 4.0 / 9.0)
}

fn wedge_contains(eta: C, orientation: Orientation, cfg: &SolverConfig) -> bool {
    let centre = match orientation {
        Orientation::Lower => ANTI_STOKES_ARG,
        Orientation::Upper => -ANTI_STOKES_ARG,
    };
    (eta.arg() - centre).abs() <= PI / 9.0 - cfg.wedge_delta
}

/// Damped Newton for the `η_s` equation. The upper orientation solves the
/// conjugate problem and mirrors the result.
pub fn eta_singularity(n: i64, c: &StokesConstant, cfg: &SolverConfig) -> Result<SingularityRecord> {
    if n < cfg.n_min {
        return Err(Error::Config(format!("n = {n} is below n_min = {}", cfg.n_min)));
    }
    if c.c.norm() == 0.0 {
        return Err(Error::Config("Stokes constant must be nonzero".into()));
    }
    let cc = match cfg.orientation {
        Orientation::Lower => c.c,
        Orientation::Upper => c.c.conj(),
    };
    let rhs = eta_rhs(n, cc);
    let mut eta = eta_seed(n, cc);
    let mut f = eta_equation(eta, rhs);
    let mut trajectory = vec![eta];
    let mut iterations = 0;
    while f.norm() >= cfg.newton_tol.min(1e-10) {
        if iterations == cfg.newton_max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: f.norm(),
                trajectory,
            });
        }
        let step = f / eta_equation_derivative(eta);
        let mut lambda = 1.0;
        let (mut e1, mut f1) = (eta, f);
        for _ in 0..40 {
            e1 = eta - step * lambda;
            f1 = eta_equation(e1, rhs);
            if f1.norm() < f.norm() {
                break;
            }
            lambda *= 0.5;
        }
        if f1.norm() >= f.norm() {
            // stalled at round-off level
            if f.norm() < 1e-10 {
                break;
            }
            return Err(Error::NoConvergence {
                iterations,
                residual: f.norm(),
                trajectory,
            });
        }
        eta = e1;
        f = f1;
        trajectory.push(eta);
        iterations += 1;
    }
    let eta_s = match cfg.orientation {
        Orientation::Lower => eta,
        Orientation::Upper => eta.conj(),
    };
    Ok(SingularityRecord {
        n,
        eta_s,
        newton_residual: f.norm(),
        iterations,
        fitted_exponent: None,
        stokes_c: c.c,
        in_wedge: wedge_contains(eta_s, cfg.orientation, cfg),
    })
}

/// Records for every `n` in `ns`, computed in parallel, ordered by `n`.
pub fn eta_singularities(
    ns: std::ops::RangeInclusive<i64>,
    c: &StokesConstant,
    cfg: &SolverConfig,
) -> Vec<Result<SingularityRecord>> {
    let ns: Vec<i64> = ns.collect();
    ns.par_iter().map(|&n| eta_singularity(n, c, cfg)).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FitReference {
    /// `log|G|`: the singular part vanishes at `η_s`.
    #[default]
    Zero,
    /// `log|G − G(farthest sample)|`.
    Farthest,
}

/// Slope of `log|G − ref|` against `log|η − η_s|` by least squares.
pub fn fit_singularity_exponent(samples: &[(C, C)], eta_s: C, reference: FitReference) -> Result<f64> {
    if samples.len() < 8 {
        return Err(Error::Sampling(format!("need at least 8 samples, got {}", samples.len())));
    }
    let dist: Vec<f64> = samples.iter().map(|(e, _)| (e - eta_s).norm()).collect();
    let decreasing = dist.windows(2).all(|w| w[1] < w[0]);
    let increasing = dist.windows(2).all(|w| w[1] > w[0]);
    if !(decreasing || increasing) {
        return Err(Error::Sampling("sample distances to η_s are not monotone".into()));
    }
    let (lo, hi) = (dist.iter().cloned().fold(f64::INFINITY, f64::min), dist.iter().cloned().fold(0.0, f64::max));
    if !(lo > 0.0 && hi / lo >= 10.0 * (1.0 - 1e-12)) {
        return Err(Error::Sampling(format!(
            "distances must span a decade, got [{lo:e}, {hi:e}]"
        )));
    }
    let far = if decreasing { 0 } else { samples.len() - 1 };
    let r = match reference {
        FitReference::Zero => C::new(0.0, 0.0),
        FitReference::Farthest => samples[far].1,
    };
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .zip(&dist)
        .enumerate()
        .filter(|(i, _)| reference == FitReference::Zero || *i != far)
        .map(|(_, ((_, g), d))| (d.ln(), (g - r).norm().ln()))
        .collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::Sampling("a sample coincides with the reference value".into()));
    }
    Ok(least_squares_slope(&pts))
}

/// The path used to reach the anti-Stokes ray: real axis from `start` down
/// to `arc_radius`, an arc to the ray in `arc_segments` chords, then outward.
#[derive(Clone, Debug)]
pub struct AntiStokesPath {
    pub start: f64,
    pub arc_radius: f64,
    pub arc_segments: usize,
    pub opts: OdeOptions,
    pub orientation: Orientation,
}

impl AntiStokesPath {
    pub fn new(cfg: &SolverConfig) -> Self {
        AntiStokesPath {
            start: 50.0,
            arc_radius: 6.0,
            arc_segments: 200,
            // the arc amplifies errors by ~e^{12}; keep the path tight
            opts: OdeOptions {
                rtol: cfg.ode_rel_tol.min(1e-12),
                atol: cfg.ode_abs_tol.min(1e-14),
                ..OdeOptions::default()
            },
            orientation: cfg.orientation,
        }
    }

    pub fn ray(&self) -> C {
        match self.orientation {
            Orientation::Lower => C::from_polar(1.0, ANTI_STOKES_ARG),
            Orientation::Upper => C::from_polar(1.0, -ANTI_STOKES_ARG),
        }
    }

    /// `(G_0, G_0', G_0'')` at `arc_radius` on the ray.
    pub fn ray_origin(&self) -> Result<Vec<C>> {
        let mut y = far_field_state(C::new(self.start, 0.0), 1)?;
        let mut h = 0.0;
        advance(&mut y, C::new(self.start, 0.0), C::new(self.arc_radius, 0.0), &mut h, &self.opts)?;
        let end = self.ray().arg();
        let mut prev = C::new(self.arc_radius, 0.0);
        for i in 1..=self.arc_segments {
            let next = C::from_polar(self.arc_radius, end * i as f64 / self.arc_segments as f64);
            advance(&mut y, prev, next, &mut h, &self.opts)?;
            prev = next;
        }
        Ok(y)
    }

    /// `(η, G_0(η))` at the given increasing radii on the ray.
    pub fn sample_ray(&self, radii: &[f64]) -> Result<Vec<(C, Vec<C>)>> {
        let mut y = self.ray_origin()?;
        let ray = self.ray();
        let mut pos = ray * self.arc_radius;
        let mut h = 0.0;
        let mut out = Vec::with_capacity(radii.len());
        for &r in radii {
            let next = ray * r;
            advance(&mut y, pos, next, &mut h, &self.opts)?;
            pos = next;
            out.push((pos, y.clone()));
        }
        Ok(out)
    }
}

/// `ln C(η) = (9/8)Log η + iKη^{9/4} − ζ(U)` with `U = η^{1/2}G_0`.
pub fn local_log_stokes(eta: C, g0: C) -> C {
    let u = g0 * eta.sqrt();
    1.125 * eta.ln() + I * MODE_RATE * (2.25 * eta.ln()).exp() - zeta_of_u(u)
}

/// Fits `ln C(η) = ln C + b·η^{−9/4}` to samples on a ray where the
/// exponential correction is small. `G_0` values are for the lower
/// orientation; pass conjugated data for the upper one.
pub fn estimate_stokes_constant(samples: &[(C, C)]) -> Result<StokesConstant> {
    if samples.len() < 3 {
        return Err(Error::Sampling("need at least 3 samples".into()));
    }
    // correction left after the algebraic series (four terms)
    let alg = |eta: C| -> C {
        
        far_field_state(eta, 1).map(|y| y[0]).unwrap_or(C::new(f64::NAN, 0.0))
    };
    let signal = samples
        .iter()
        .map(|(e, g)| ((g - alg(*e)) * e.sqrt()).norm())
        .fold(0.0, f64::max);
    if !(signal > 1e-9) {
        return Err(Error::IndeterminateConstant(format!(
            "exponential correction {signal:e} is below the noise floor; supply C"
        )));
    }
    let mut logs: Vec<C> = samples.iter().map(|(e, g)| local_log_stokes(*e, *g)).collect();
    for i in 1..logs.len() {
        let jump = ((logs[i].im - logs[i - 1].im) / (2.0 * PI)).round();
        logs[i].im -= 2.0 * PI * jump;
    }
    if logs.iter().any(|l| !(l.re.is_finite() && l.im.is_finite())) {
        return Err(Error::IndeterminateConstant("non-finite local estimate".into()));
    }
    // complex linear least squares for (a, b) in a + b·x
    let xs: Vec<C> = samples.iter().map(|(e, _)| (-2.25 * e.ln()).exp()).collect();
    let n = xs.len() as f64;
    let sx: C = xs.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x.norm_sqr()).sum();
    let sy: C = logs.iter().sum();
    let sxy: C = xs.iter().zip(&logs).map(|(x, y)| x.conj() * y).sum();
    let det = n * sxx - sx.norm_sqr();
    let (a, b) = if det.abs() > 1e-300 {
        ((sy * sxx - sx * sxy) / det, (sxy * n - sx.conj() * sy) / det)
    } else {
        (sy / n, C::new(0.0, 0.0))
    };
    let rms = (xs
        .iter()
        .zip(&logs)
        .map(|(x, y)| (y - a - b * x).norm_sqr())
        .sum::<f64>()
        / n)
        .sqrt();
    let c = a.exp();
    if c.norm() == 0.0 || !c.norm().is_finite() {
        return Err(Error::IndeterminateConstant(format!("fit produced C = {c}")));
    }
    Ok(StokesConstant {
        c,
        provenance: Provenance::Fitted,
        fit_residual: Some(rms),
    })
}

/// Samples `G_0` on the anti-Stokes ray for `|η| ∈ [r_lo, r_hi]` and fits C.
pub fn fit_stokes_constant(r_lo: f64, r_hi: f64, step: f64, cfg: &SolverConfig) -> Result<StokesConstant> {
    let path = AntiStokesPath::new(cfg);
    if !(r_lo >= path.arc_radius && r_hi > r_lo && step > 0.0) {
        return Err(Error::Config(format!("bad window [{r_lo}, {r_hi}] step {step}")));
    }
    let m = ((r_hi - r_lo) / step).round() as usize;
    let radii: Vec<f64> = (0..=m).map(|i| r_lo + (r_hi - r_lo) * i as f64 / m as f64).collect();
    let mut samples: Vec<(C, C)> = path
        .sample_ray(&radii)?
        .into_iter()
        .map(|(e, y)| (e, y[0]))
        .collect();
    if cfg.orientation == Orientation::Upper {
        for s in &mut samples {
            *s = (s.0.conj(), s.1.conj());
        }
    }
    let mut c = estimate_stokes_constant(&samples)?;
    if cfg.orientation == Orientation::Upper {
        c.c = c.c.conj();
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approach {
    /// Numerical singularity from the local `(2/3)`-power model.
    pub eta_s: C,
    /// Samples `(η, G_0)` with `|η − η_s|` decreasing over `[1e−2, 1e−5]`.
    pub samples: Vec<(C, C)>,
    pub fitted_exponent: f64,
}

/// Walks from the ray toward `target`, re-estimating the singularity from
/// `η − (3/2)G/G'` (exact for a `(η − η_s)^{2/3}` branch point), then
/// samples `G_0` on a straight line into it and fits the exponent.
pub fn approach_singularity(target: C, cfg: &SolverConfig) -> Result<Approach> {
    let path = AntiStokesPath::new(cfg);
    let r0 = target.norm().max(path.arc_radius);
    let start_state = path.sample_ray(&[r0])?.pop().map(|s| s.1).unwrap_or_default();
    let start = path.ray() * r0;
    let mut y = start_state.clone();
    let mut pos = start;
    let mut est = target;
    let mut h = 0.0;
    let mut converged = false;
    for _ in 0..60 {
        let next = pos + 0.7 * (est - pos);
        advance(&mut y, pos, next, &mut h, &path.opts)?;
        pos = next;
        est = pos - 1.5 * y[0] / y[1];
        if (est - pos).norm() < 1e-8 * est.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: 60,
            residual: (est - pos).norm(),
            trajectory: vec![est],
        });
    }
    let u = (start - est) / (start - est).norm();
    let mut y = start_state;
    let mut pos = start;
    let mut h = 0.0;
    let mut samples = Vec::new();
    for i in 0..12 {
        let d = 10f64.powf(-2.0 - 3.0 * i as f64 / 11.0);
        let q = est + u * d;
        advance(&mut y, pos, q, &mut h, &path.opts)?;
        pos = q;
        samples.push((pos, y[0]));
    }
    let fitted_exponent = fit_singularity_exponent(&samples, est, FitReference::Zero)?;
    Ok(Approach {
        eta_s: est,
        samples,
        fitted_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_forward_oracle() {
        let cfg = SolverConfig::default();
        let z = C::new(12f64.ln() - 6.0, 0.0);
        let u = solve_u(z, C::new(3.5, 0.2), &cfg).unwrap();
        assert!((u - 4.0).norm() < 1e-10, "{u}");
        assert!(matches!(solve_u(z, C::new(1.0, 0.0), &cfg), Err(Error::BranchCollision)));
    }

    #[test]
    fn criterion_selects_the_mirrored_sign() {
        let z = zeta_singularities(1..=3).unwrap();
        assert_eq!(z.len(), 3);
        for w in z.windows(2) {
            assert!((w[0].displayed - w[1].displayed - 2.0 * PI * I).norm() < 1e-12);
        }
        assert!(z.iter().all(|r| r.selected == ZetaCandidate::Mirrored && r.flagged));
        let (u, _) = critical_point(C::new(0.05, 0.01), 1e-14, 100).unwrap();
        assert!(u.norm() < 1e-12);
    }

    #[test]
    fn eta_newton_residual() {
        let cfg = SolverConfig::default();
        let c = StokesConstant::user(C::new(-2.44, -2.41)).unwrap();
        let r = eta_singularity(3, &c, &cfg).unwrap();
        assert!(r.newton_residual < 1e-10);
        assert!(r.eta_s.im < 0.0);
        let mut up = cfg.clone();
        up.orientation = Orientation::Upper;
        let u = eta_singularity(3, &StokesConstant::user(c.c.conj()).unwrap(), &up).unwrap();
        assert!((u.eta_s - r.eta_s.conj()).norm() < 1e-12);
    }

    #[test]
    fn synthetic_exponents() {
        let eta_s = C::new(3.0, -7.0);
        let dir = C::from_polar(1.0, 0.4);
        for &p in &[1.0 / 3.0, 2.0 / 3.0, 1.0, 1.5] {
            let s: Vec<(C, C)> = (0..10)
                .map(|i| {
                    let e = eta_s + dir * 10f64.powf(-1.0 - 0.4 * i as f64);
                    (e, (e - eta_s).powf(p))
                })
                .collect();
            let f = fit_singularity_exponent(&s, eta_s, FitReference::Zero).unwrap();
            assert!((f - p).abs() < 1e-3);
        }
    }

    #[test]
    fn sampling_errors() {
        let eta_s = C::new(0.0, 0.0);
        let mut s: Vec<(C, C)> = (0..9).map(|i| (C::new(1.0 / (i + 1) as f64, 0.0), C::new(1.0, 0.0))).collect();
        s.swap(2, 5);
        assert!(matches!(fit_singularity_exponent(&s, eta_s, FitReference::Zero), Err(Error::Sampling(_))));
        assert!(fit_singularity_exponent(&s[..4], eta_s, FitReference::Zero).is_err());
    }

    #[test]
    fn synthetic_stokes_round_trip() {
        let cfg = SolverConfig::default();
        let c = C::new(1.0, 0.0);
        let ray = C::from_polar(1.0, ANTI_STOKES_ARG);
        let samples: Vec<(C, C)> = (0..20)
            .map(|i| {
                let eta = ray * (8.0 + 0.5 * i as f64);
                let zeta = -c.ln() + 1.125 * eta.ln() + I * MODE_RATE * (2.25 * eta.ln()).exp();
                let u = solve_u(zeta, u_seed(zeta), &cfg).unwrap();
                (eta, u / eta.sqrt())
            })
            .collect();
        let fit = estimate_stokes_constant(&samples).unwrap();
        assert!((fit.c - c).norm() < 1e-3, "{}", fit.c);
        let flat: Vec<(C, C)> = samples.iter().map(|(e, _)| (*e, far_field_state(*e, 1).unwrap()[0])).collect();
        assert!(matches!(estimate_stokes_constant(&flat), Err(Error::IndeterminateConstant(_))));
    }
}
