//! Formal large-`x` solution of `y'' = 6y² + x` by fixed-point iteration
//! `y ← ±(θ/6)·√(x − y'')` with `θ² = −6`.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{rational, Scalar};
use crate::series::{Branch, Direction, HalfInt, PuiseuxSeries};

pub const VARIABLE: &str = "x";

/// `θ² = −6`, so that `θ/6 = i/√6`.
pub fn theta_squared() -> BigRational {
    rational(-6, 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Series {
    pub series: PuiseuxSeries,
    pub n_terms: usize,
}

impl P1Series {
    /// Exponent of the first term that is not retained: `1/2 − (5/2)·n`.
    pub fn budget(n_terms: usize) -> HalfInt {
        HalfInt::from_twice(1 - 5 * n_terms as i64)
    }

    /// Every term of the exact residual of the retained polynomial sits at
    /// or below this exponent.
    pub fn residual_threshold(&self) -> HalfInt {
        Self::budget(self.n_terms) + HalfInt::from_twice(1)
    }
}

fn x_series() -> PuiseuxSeries {
    PuiseuxSeries::monomial(VARIABLE, Direction::Large, HalfInt::int(1), Scalar::one(&theta_squared()))
}

/// One application of the recurrence, truncated at `budget`.
pub fn recurrence_step(y: &PuiseuxSeries, branch: Branch, budget: HalfInt) -> Result<PuiseuxSeries> {
    let d = theta_squared();
    let rhs = x_series().try_sub(&y.nth_derivative(2))?;
    let root = rhs.sqrt_series_to(Branch::Principal, Some(budget))?;
    let mut factor = Scalar::theta(&d).scale(&rational(1, 6));
    if branch == Branch::Negative {
        factor = -factor;
    }
    Ok(root.scale(&factor)?.truncate(budget))
}

pub fn p1_formal_series(n_terms: usize) -> Result<P1Series> {
    p1_formal_series_with(n_terms, Branch::Principal)
}

/// Iterates from `y = 0` until two consecutive iterates agree exactly.
pub fn p1_formal_series_with(n_terms: usize, branch: Branch) -> Result<P1Series> {
    if n_terms == 0 {
        return Err(Error::Config("p1 series needs at least one term".into()));
    }
    let budget = P1Series::budget(n_terms);
    let max_iter = n_terms + 3;
    let mut y = PuiseuxSeries::zero(VARIABLE, &theta_squared(), Direction::Large, Some(budget));
    for _ in 0..max_iter {
        let next = recurrence_step(&y, branch, budget)?;
        if next == y {
            return Ok(P1Series { series: y, n_terms });
        }
        y = next;
    }
    Err(Error::IterationDepth { iterations: max_iter })
}

/// Exact `y'' − 6y² − x` of the retained (finite) polynomial.
pub fn p1_residual(s: &PuiseuxSeries) -> Result<PuiseuxSeries> {
    let mut poly = PuiseuxSeries::zero(VARIABLE, s.theta_squared(), Direction::Large, None);
    for (e, c) in s.terms() {
        poly = poly.with_term(e, c.clone())?;
    }
    let d = poly.theta_squared().clone();
    let x = PuiseuxSeries::monomial(VARIABLE, Direction::Large, HalfInt::int(1), Scalar::one(&d));
    let six_y2 = poly.try_mul(&poly)?.scale_rational(&rational(6, 1));
    poly.nth_derivative(2).try_sub(&six_y2)?.try_sub(&x)
}
