//! Small-time series `H = Σ tⁿ cₙ(y)`, `y = x − t`, with `c₀ = y^{−1/2}`.
//!
//! In the characteristic variable the transport part collapses to
//! `H_t + H_x = Σ (n+1)c_{n+1} tⁿ`, giving the exact recurrence
//! `(n+1)c_{n+1} = [tⁿ](H³H_yyy − ½H³)`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rational, Scalar};
use crate::series::{Direction, HalfInt, PuiseuxSeries};

pub const VARIABLE: &str = "y";

/// Coefficients are rational; the extension only labels the series.
pub fn theta_squared() -> BigRational {
    rational(-1, 1)
}

/// Term budget per coefficient; `c_n` has `n + 1` terms, so this only trips
/// on absurd orders.
pub const DEFAULT_MAX_TERMS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct OuterSeries {
    /// `c_0 … c_N`, each exact.
    pub coeffs: Vec<PuiseuxSeries>,
}

fn zero() -> PuiseuxSeries {
    PuiseuxSeries::zero(VARIABLE, &theta_squared(), Direction::Small, None)
}

pub fn hd_outer_coeffs(order: usize) -> Result<OuterSeries> {
    hd_outer_coeffs_with_budget(order, DEFAULT_MAX_TERMS)
}

pub fn hd_outer_coeffs_with_budget(order: usize, max_terms: usize) -> Result<OuterSeries> {
    let d = theta_squared();
    let c0 = PuiseuxSeries::monomial(VARIABLE, Direction::Small, HalfInt::new(-1, 2)?, Scalar::one(&d));
    let mut c = vec![c0];
    // t-coefficients of H², H³ and H_yyy, grown alongside c
    let mut h2: Vec<PuiseuxSeries> = Vec::new();
    let mut h3: Vec<PuiseuxSeries> = Vec::new();
    let mut d3: Vec<PuiseuxSeries> = Vec::new();
    for n in 0..order {
        let mut sq = zero();
        for i in 0..=n {
            sq = sq.try_add(&c[i].try_mul(&c[n - i])?)?;
        }
        h2.push(sq);
        let mut cube = zero();
        for i in 0..=n {
            cube = cube.try_add(&h2[i].try_mul(&c[n - i])?)?;
        }
        h3.push(cube);
        d3.push(c[n].nth_derivative(3));
        let mut acc = zero();
        for i in 0..=n {
            acc = acc.try_add(&h3[i].try_mul(&d3[n - i])?)?;
        }
        acc = acc.try_sub(&h3[n].scale_rational(&rational(1, 2)))?;
        let next = acc.scale_rational(&rational(1, n as i64 + 1));
        if next.len() > max_terms {
            return Err(Error::Budget(format!(
                "c_{} has {} terms, budget is {max_terms}",
                n + 1,
                next.len()
            )));
        }
        c.push(next);
    }
    Ok(OuterSeries { coeffs: c })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterEval {
    pub value: Complex64,
    /// `|t^{N+1} c_{N+1}(y)|`, the first neglected term.
    pub error_proxy: f64,
    /// `tⁿ cₙ(y)` for `n = 0..=N`.
    pub terms: Vec<Complex64>,
}

impl OuterSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Partial sum through `t^{N−1}`; `c_N` only feeds the error proxy and
    /// the decreasing-terms check.
    pub fn eval(&self, x: Complex64, t: Complex64) -> Result<OuterEval> {
        let y = x - t;
        if y.norm() < 1e-300 {
            return Err(Error::OutOfRegime("y = x − t vanishes".into()));
        }
        let all: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| t.powu(n as u32) * c.eval(y))
            .collect();
        let n = all.len() - 1;
        for w in all.windows(2) {
            if w[1].norm() >= w[0].norm() && w[0].norm() > 0.0 {
                return Err(Error::OutOfRegime(format!(
                    "terms stop decreasing at y = {y}, t = {t} (|{}| ≥ |{}|)",
                    w[1], w[0]
                )));
            }
        }
        Ok(OuterEval {
            value: all[..n].iter().sum(),
            error_proxy: all[n].norm(),
            terms: all[..n].to_vec(),
        })
    }

    /// Far-field coefficients `(e, a_e)` of the inner function `G_k`: a term
    /// `tⁿ y^e` of the outer series lands in `G_k` when `9n + 2e + 1 = 7k`.
    pub fn inner_far_field(&self, k: usize) -> Vec<(HalfInt, f64)> {
        let mut out = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate().skip(k) {
            let twice_e = 7 * k as i64 - 1 - 9 * n as i64;
            let e = HalfInt::from_twice(twice_e);
            if let Ok(v) = c.coeff(e) {
                if !v.is_zero() {
                    out.push((e, v.a().to_f64().unwrap_or(f64::NAN)));
                }
            }
        }
        out
    }
}

/// `Σ_{n≤N} tⁿ cₙ(x − t)` with the first neglected term as error proxy.
pub fn hd_outer_eval(x: Complex64, t: Complex64, order: usize) -> Result<OuterEval> {
    hd_outer_coeffs(order + 1)?.eval(x, t)
}
