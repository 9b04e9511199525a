//! Adaptive Dormand–Prince 5(4) for complex first-order systems
//! `dy/ds = f(s, y)` with a real path parameter `s`.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step (relative to the interval length) before giving up.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-13,
            h_min_rel: 1e-12,
            max_steps: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OdeFailure {
    /// Step size collapsed; carries the last accepted point.
    StepUnderflow { s: f64, y: Vec<Complex64> },
    /// The right-hand side produced a non-finite value.
    NonFinite { s: f64, y: Vec<Complex64> },
    MaxSteps { s: f64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn finite(y: &[Complex64]) -> bool {
    y.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Integrates from `s0` to `s1` (either direction), updating `y` in place.
/// `h` carries the step-size guess between calls; pass `0.0` to start.
pub fn integrate<F>(
    mut f: F,
    s0: f64,
    s1: f64,
    y: &mut [Complex64],
    h: &mut f64,
    opts: &OdeOptions,
) -> Result<usize, OdeFailure>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    let span = s1 - s0;
    if span == 0.0 {
        return Ok(0);
    }
    let dir = span.signum();
    let h_min = span.abs() * opts.h_min_rel;
    let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut ynew = vec![Complex64::new(0.0, 0.0); n];
    let mut s = s0;
    f(s, y, &mut k[0]);
    if !finite(&k[0]) {
        return Err(OdeFailure::NonFinite { s, y: y.to_vec() });
    }
    let mut step = if *h > 0.0 { h.min(span.abs()) } else { span.abs() * 1e-3 };
    let mut steps = 0;
    loop {
        let remaining = (s1 - s).abs();
        if remaining <= 1e-14 * span.abs() {
            break;
        }
        if steps >= opts.max_steps {
            return Err(OdeFailure::MaxSteps { s });
        }
        let last = step >= remaining;
        let hh = if last { remaining } else { step } * dir;
        let stage = |coef: &[(usize, f64)], k: &Vec<Vec<Complex64>>, out: &mut [Complex64]| {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(j, a) in coef {
                    acc += k[j][i] * a;
                }
                out[i] = y[i] + acc * hh;
            }
        };
        stage(&[(0, A21)], &k, &mut tmp);
        f(s + C2 * hh, &tmp, &mut k[1]);
        stage(&[(0, A31), (1, A32)], &k, &mut tmp);
        f(s + C3 * hh, &tmp, &mut k[2]);
        stage(&[(0, A41), (1, A42), (2, A43)], &k, &mut tmp);
        f(s + C4 * hh, &tmp, &mut k[3]);
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &mut tmp);
        f(s + C5 * hh, &tmp, &mut k[4]);
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &mut tmp);
        f(s + hh, &tmp, &mut k[5]);
        stage(&[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)], &k, &mut ynew);
        f(s + hh, &ynew, &mut k[6]);
        steps += 1;

        let ok_values = finite(&ynew) && finite(&k[6]);
        let mut err = 0.0;
        if ok_values {
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * hh;
                let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            err = (err / n as f64).sqrt();
        } else {
            err = f64::INFINITY;
        }
        if err <= 1.0 {
            s = if last { s1 } else { s + hh };
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                step *= fac;
            }
            *h = step;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            step *= fac;
            if step < h_min {
                return Err(if ok_values {
                    OdeFailure::StepUnderflow { s, y: y.to_vec() }
                } else {
                    OdeFailure::NonFinite { s, y: y.to_vec() }
                });
            }
        }
    }
    Ok(steps)
}
