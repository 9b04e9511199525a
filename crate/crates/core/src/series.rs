//! Truncated Laurent–Puiseux series over the half-integer lattice.
//!
//! A series expands either around `0` ([`Direction::Small`], ascending
//! exponents) or around `∞` ([`Direction::Large`], descending exponents).
//! Internally every comparison goes through a *rank* (`e` or `−e`), so the
//! truncation rules are written once: terms of rank `≥ trunc_rank` are
//! unknown.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fmt_rational, parse_rational, rational, Scalar};

/// An exponent on the lattice ½ℤ, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    /// `num/den`, rejected unless the value lies on ½ℤ.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 || (2 * num) % den != 0 {
            return Err(Error::Lattice(format!("{num}/{den}")));
        }
        Ok(HalfInt {
            twice: 2 * num / den,
        })
    }

    pub fn from_rational(r: &BigRational) -> Result<Self> {
        let t = r * BigRational::from_integer(BigInt::from(2));
        if !t.is_integer() {
            return Err(Error::Lattice(fmt_rational(r)));
        }
        let twice = t
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Lattice(fmt_rational(r)))?;
        Ok(HalfInt { twice })
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn to_rational(self) -> BigRational {
        rational(self.twice, 2)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Half of an integer exponent.
    pub fn half(self) -> Result<Self> {
        if !self.is_integer() {
            return Err(Error::Lattice(format!("{}/4", self.twice)));
        }
        Ok(HalfInt {
            twice: self.twice / 2,
        })
    }

    pub fn scale(self, k: i64) -> Self {
        HalfInt {
            twice: self.twice * k,
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.to_rational()))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + o.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - o.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Expansion around 0; higher exponents are smaller.
    #[default]
    Small,
    /// Expansion around ∞; lower exponents are smaller.
    Large,
}

impl Direction {
    fn rank(self, e: HalfInt) -> HalfInt {
        match self {
            Direction::Small => e,
            Direction::Large => -e,
        }
    }
}

/// Sign of the leading coefficient of a square root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Principal,
    Negative,
}

// rank-space helpers: `None` stands for +∞ (exact)
fn rmin(a: Option<HalfInt>, b: Option<HalfInt>) -> Option<HalfInt> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn radd(a: Option<HalfInt>, b: Option<HalfInt>) -> Option<HalfInt> {
    Some(a? + b?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    variable: String,
    d: BigRational,
    direction: Direction,
    /// Truncation exponent; `None` means the series is exact.
    trunc: Option<HalfInt>,
    terms: BTreeMap<HalfInt, Scalar>,
}

impl PuiseuxSeries {
    pub fn zero(variable: &str, d: &BigRational, direction: Direction, trunc: Option<HalfInt>) -> Self {
        PuiseuxSeries {
            variable: variable.to_string(),
            d: d.clone(),
            direction,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// Exact single term `c·var^e`.
    pub fn monomial(variable: &str, direction: Direction, e: HalfInt, c: Scalar) -> Self {
        let mut s = PuiseuxSeries::zero(variable, c.theta_squared(), direction, None);
        if !c.is_zero() {
            s.terms.insert(e, c);
        }
        s
    }

    pub fn constant(variable: &str, direction: Direction, c: Scalar) -> Self {
        PuiseuxSeries::monomial(variable, direction, HalfInt::ZERO, c)
    }

    /// Adds `c·var^e` to the series.
    pub fn with_term(mut self, e: HalfInt, c: Scalar) -> Result<Self> {
        self.check_scalar(&c)?;
        if !self.is_known(e) {
            return Err(Error::Truncated {
                exponent: e.to_string(),
                trunc: self.trunc.map(|t| t.to_string()).unwrap_or_default(),
            });
        }
        let v = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
        Ok(self)
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn theta_squared(&self) -> &BigRational {
        &self.d
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn trunc(&self) -> Option<HalfInt> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// No known nonzero coefficient (the series may still be truncated).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn rank(&self, e: HalfInt) -> HalfInt {
        self.direction.rank(e)
    }

    fn trunc_rank(&self) -> Option<HalfInt> {
        self.trunc.map(|t| self.rank(t))
    }

    /// Whether the coefficient at `e` is determined by the series.
    pub fn is_known(&self, e: HalfInt) -> bool {
        match self.trunc_rank() {
            None => true,
            Some(t) => self.rank(e) < t,
        }
    }

    /// Terms from dominant to subdominant.
    pub fn terms(&self) -> Box<dyn DoubleEndedIterator<Item = (HalfInt, &Scalar)> + '_> {
        let it = self.terms.iter().map(|(e, c)| (*e, c));
        match self.direction {
            Direction::Small => Box::new(it),
            Direction::Large => Box::new(it.rev()),
        }
    }

    /// Dominant term.
    pub fn leading(&self) -> Option<(HalfInt, &Scalar)> {
        self.terms().next()
    }

    /// Exponent of the dominant term.
    pub fn ord(&self) -> Option<HalfInt> {
        self.leading().map(|(e, _)| e)
    }

    // order in rank space, with empty truncated series bounded by the truncation
    fn ord_rank(&self) -> Option<HalfInt> {
        match self.leading() {
            Some((e, _)) => Some(self.rank(e)),
            None => self.trunc_rank(),
        }
    }

    /// Coefficient at `e`; an error if `e` lies at or beyond the truncation.
    pub fn coeff(&self, e: HalfInt) -> Result<Scalar> {
        if !self.is_known(e) {
            return Err(Error::Truncated {
                exponent: e.to_string(),
                trunc: self.trunc.map(|t| t.to_string()).unwrap_or_default(),
            });
        }
        Ok(self
            .terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(&self.d)))
    }

    fn check_scalar(&self, c: &Scalar) -> Result<()> {
        if c.theta_squared() != &self.d {
            return Err(Error::Config(format!(
                "coefficient from θ² = {} in a series over θ² = {}",
                fmt_rational(c.theta_squared()),
                fmt_rational(&self.d)
            )));
        }
        Ok(())
    }

    fn check_compatible(&self, o: &PuiseuxSeries) -> Result<()> {
        if self.variable != o.variable {
            return Err(Error::Config(format!(
                "series in different variables ({} vs {})",
                self.variable, o.variable
            )));
        }
        if self.d != o.d {
            return Err(Error::Config(format!(
                "series over different extensions (θ² = {} vs {})",
                fmt_rational(&self.d),
                fmt_rational(&o.d)
            )));
        }
        if self.direction != o.direction {
            return Err(Error::Config("series expanded in opposite directions".into()));
        }
        Ok(())
    }

    fn with_trunc_rank(&self, t: Option<HalfInt>) -> Option<HalfInt> {
        t.map(|t| self.direction.rank(t))
    }

    /// Lowers the truncation to `e` (if that is more restrictive) and drops
    /// terms that are no longer known.
    pub fn truncate(mut self, e: HalfInt) -> Self {
        let t = rmin(self.trunc_rank(), Some(self.rank(e)));
        self.set_trunc_rank(t);
        self
    }

    fn set_trunc_rank(&mut self, t: Option<HalfInt>) {
        self.trunc = self.with_trunc_rank(t);
        if let Some(t) = t {
            let dir = self.direction;
            self.terms.retain(|e, _| dir.rank(*e) < t);
        }
    }

    pub fn try_add(&self, o: &PuiseuxSeries) -> Result<PuiseuxSeries> {
        self.check_compatible(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            let v = match out.terms.remove(e) {
                Some(a) => &a + c,
                None => c.clone(),
            };
            if !v.is_zero() {
                out.terms.insert(*e, v);
            }
        }
        out.set_trunc_rank(rmin(self.trunc_rank(), o.trunc_rank()));
        Ok(out)
    }

    pub fn try_sub(&self, o: &PuiseuxSeries) -> Result<PuiseuxSeries> {
        self.try_add(&-o)
    }

    pub fn scale(&self, c: &Scalar) -> Result<PuiseuxSeries> {
        self.check_scalar(c)?;
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(e, v)| (*e, v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Ok(out)
    }

    pub fn scale_rational(&self, r: &BigRational) -> PuiseuxSeries {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(e, v)| (*e, v.scale(r)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }

    /// Cauchy product; the result is known below
    /// `min(trunc(a) + ord(b), trunc(b) + ord(a))` in rank order.
    pub fn try_mul(&self, o: &PuiseuxSeries) -> Result<PuiseuxSeries> {
        self.check_compatible(o)?;
        let t = rmin(
            radd(self.trunc_rank(), o.ord_rank()),
            radd(o.trunc_rank(), self.ord_rank()),
        );
        let exact_zero = (self.is_exact() && self.is_empty()) || (o.is_exact() && o.is_empty());
        let mut out = PuiseuxSeries::zero(&self.variable, &self.d, self.direction, None);
        if exact_zero {
            return Ok(out);
        }
        let dir = self.direction;
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = *ea + *eb;
                if let Some(t) = t {
                    if dir.rank(e) >= t {
                        continue;
                    }
                }
                let p = ca * cb;
                let v = match out.terms.remove(&e) {
                    Some(a) => &a + &p,
                    None => p,
                };
                if !v.is_zero() {
                    out.terms.insert(e, v);
                }
            }
        }
        out.set_trunc_rank(t);
        Ok(out)
    }

    /// Termwise `d/dvar`; the truncation exponent drops by one.
    pub fn derivative(&self) -> PuiseuxSeries {
        let mut out = PuiseuxSeries::zero(
            &self.variable,
            &self.d,
            self.direction,
            self.trunc.map(|t| t - HalfInt::int(1)),
        );
        for (e, c) in &self.terms {
            if e.twice == 0 {
                continue;
            }
            out.terms.insert(*e - HalfInt::int(1), c.scale(&e.to_rational()));
        }
        out
    }

    pub fn nth_derivative(&self, k: usize) -> PuiseuxSeries {
        (0..k).fold(self.clone(), |s, _| s.derivative())
    }

    /// Multiplies by `var^e` (exact shift of exponents and truncation).
    pub fn shift(&self, e: HalfInt) -> PuiseuxSeries {
        let mut out = self.clone();
        out.trunc = self.trunc.map(|t| t + e);
        out.terms = self.terms.iter().map(|(x, c)| (*x + e, c.clone())).collect();
        out
    }

    // Splits `self = c·var^o·(1 + u)` and returns (o, c, u) with u of positive rank.
    fn factor_leading(&self) -> Result<(HalfInt, Scalar, PuiseuxSeries)> {
        let (o, c) = self
            .leading()
            .map(|(e, c)| (e, c.clone()))
            .ok_or(Error::Division("series"))?;
        let cinv = c.inv()?;
        let normalized = self.shift(-o).scale(&cinv)?;
        let one = PuiseuxSeries::constant(&self.variable, self.direction, Scalar::one(&self.d));
        let u = normalized.try_sub(&one)?;
        Ok((o, c, u))
    }

    // Σ_k coeff(k)·u^k known below rank `t` (rank space), for ord(u) > 0.
    fn compose_1pu(
        u: &PuiseuxSeries,
        t: HalfInt,
        coeff: impl Fn(usize, &BigRational) -> BigRational,
    ) -> Result<PuiseuxSeries> {
        let mut sum = PuiseuxSeries::constant(&u.variable, u.direction, Scalar::one(&u.d)).truncate(t);
        let mut power = sum.clone();
        let mut c = BigRational::one();
        let mut k = 0;
        loop {
            power = power.try_mul(u)?.truncate(t);
            c = coeff(k, &c);
            k += 1;
            if power.is_empty() {
                break;
            }
            sum = sum.try_add(&power.scale_rational(&c))?;
        }
        Ok(sum.truncate(t))
    }

    // Truncation rank of a derived series: the natural one capped by an
    // optional caller budget (given as an exponent).
    fn target_rank(&self, natural: Option<HalfInt>, budget: Option<HalfInt>) -> Result<HalfInt> {
        rmin(natural, budget.map(|b| self.rank(b))).ok_or_else(|| {
            Error::Budget(format!(
                "{} terms of an exact non-monomial series requested without a truncation budget",
                self.variable
            ))
        })
    }

    /// Reciprocal, known below `budget` (an exponent) if given.
    pub fn inv_to(&self, budget: Option<HalfInt>) -> Result<PuiseuxSeries> {
        let (o, c, u) = self.factor_leading()?;
        let cinv = c.inv()?;
        let or = self.rank(o);
        if u.is_exact() && u.is_empty() {
            let mono = PuiseuxSeries::monomial(&self.variable, self.direction, -o, cinv);
            return Ok(match budget {
                Some(b) => mono.truncate(b),
                None => mono,
            });
        }
        let natural = self.trunc_rank().map(|t| t - or - or);
        let tr = self.target_rank(natural, budget)?;
        // s = Σ (−u)^k, needed below rank tr + or
        let s = Self::compose_1pu(&u, self.direction.rank(tr + or), |_, c| -c)?;
        s.scale(&cinv).map(|s| s.shift(-o))
    }

    /// Integer power; negative powers need a nonzero leading coefficient and,
    /// for exact non-monomial input, a truncation `budget`.
    pub fn pow_int_to(&self, k: i64, budget: Option<HalfInt>) -> Result<PuiseuxSeries> {
        let base = if k < 0 { self.inv_to(budget)? } else { self.clone() };
        let mut n = k.unsigned_abs();
        let mut acc = PuiseuxSeries::constant(&self.variable, self.direction, Scalar::one(&self.d));
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.try_mul(&sq)?;
            }
            n >>= 1;
            if n > 0 {
                sq = sq.try_mul(&sq)?;
            }
        }
        Ok(match budget {
            Some(b) => acc.truncate(b),
            None => acc,
        })
    }

    pub fn pow_int(&self, k: i64) -> Result<PuiseuxSeries> {
        self.pow_int_to(k, None)
    }

    /// Square root with the leading coefficient fixed by `branch`.
    pub fn sqrt_series_to(&self, branch: Branch, budget: Option<HalfInt>) -> Result<PuiseuxSeries> {
        let (o, c, u) = self.factor_leading()?;
        let half_o = o.half()?;
        let mut root = c.sqrt().ok_or_else(|| {
            Error::UnsupportedScalar(format!("no square root of {c} in the extension"))
        })?;
        if branch == Branch::Negative {
            root = -root;
        }
        if u.is_exact() && u.is_empty() {
            let mono = PuiseuxSeries::monomial(&self.variable, self.direction, half_o, root);
            return Ok(match budget {
                Some(b) => mono.truncate(b),
                None => mono,
            });
        }
        let hr = self.rank(half_o);
        let natural = self.trunc_rank().map(|t| t - hr);
        let tr = self.target_rank(natural, budget)?;
        // binomial(1/2, k+1) = binomial(1/2, k)·(1/2 − k)/(k + 1)
        let s = Self::compose_1pu(&u, self.direction.rank(tr - hr), |k, c| {
            let k = k as i64;
            c * rational(1 - 2 * k, 2 * (k + 1))
        })?;
        s.scale(&root).map(|s| s.shift(half_o))
    }

    pub fn sqrt_series(&self, branch: Branch) -> Result<PuiseuxSeries> {
        self.sqrt_series_to(branch, None)
    }

    /// Numerical value of the known terms, principal branch of `z^e`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let lz = z.ln();
        self.terms
            .iter()
            .map(|(e, c)| c.to_complex() * (lz * e.to_f64()).exp())
            .sum()
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            variable: self.variable.clone(),
            theta_squared: fmt_rational(&self.d),
            trunc: self
                .trunc
                .map(|t| t.to_string())
                .unwrap_or_else(|| "inf".to_string()),
            direction: Some(self.direction),
            terms: self
                .terms()
                .map(|(e, c)| TermJson {
                    exp: e.to_string(),
                    a: fmt_rational(c.a()),
                    b: fmt_rational(c.b()),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let d = parse_rational(&j.theta_squared)?;
        let trunc = match j.trunc.trim() {
            "inf" => None,
            t => Some(HalfInt::from_rational(&parse_rational(t)?)?),
        };
        let mut s = PuiseuxSeries::zero(&j.variable, &d, j.direction.unwrap_or_default(), trunc);
        for t in &j.terms {
            let e = HalfInt::from_rational(&parse_rational(&t.exp)?)?;
            let c = Scalar::new(parse_rational(&t.a)?, parse_rational(&t.b)?, d.clone());
            if c.is_zero() {
                return Err(Error::Parse(format!("stored zero coefficient at {e}")));
            }
            if s.terms.contains_key(&e) {
                return Err(Error::Parse(format!("duplicate exponent {e}")));
            }
            s = s.with_term(e, c)?;
        }
        Ok(s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("series JSON is always serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: SeriesJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&j)
    }
}

/// Wire format: every rational is a `"p/q"` string; an exact series has
/// `trunc = "inf"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub variable: String,
    pub theta_squared: String,
    pub trunc: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: String,
    pub a: String,
    pub b: String,
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let ar = c.a();
            let br = c.b();
            match (ar.is_zero(), br.is_zero()) {
                (false, true) => write!(f, "({})", ar)?,
                (true, false) => write!(f, "({}θ)", br)?,
                _ => write!(f, "({} + {}θ)", ar, br)?,
            }
            write!(f, "·{}^{}", self.variable, e)?;
        }
        if first {
            f.write_str("0")?;
        }
        if let Some(t) = self.trunc {
            write!(f, " + O({}^{})", self.variable, t)?;
        }
        Ok(())
    }
}

impl Add for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, o: &PuiseuxSeries) -> PuiseuxSeries {
        self.try_add(o).expect("incompatible series")
    }
}

impl Sub for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, o: &PuiseuxSeries) -> PuiseuxSeries {
        self.try_sub(o).expect("incompatible series")
    }
}

impl Mul for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, o: &PuiseuxSeries) -> PuiseuxSeries {
        self.try_mul(o).expect("incompatible series")
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        let mut out = self.clone();
        out.terms = self.terms.iter().map(|(e, c)| (*e, -c)).collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> BigRational {
        rational(-1, 1)
    }

    fn q(n: i64, m: i64) -> Scalar {
        Scalar::from_ratio(n, m, &d())
    }

    fn h(n: i64, m: i64) -> HalfInt {
        HalfInt::new(n, m).unwrap()
    }

    fn mono(e: HalfInt, c: Scalar) -> PuiseuxSeries {
        PuiseuxSeries::monomial("y", Direction::Small, e, c)
    }

    #[test]
    fn lattice_is_enforced() {
        assert!(HalfInt::new(1, 3).is_err());
        assert_eq!(h(-19, 2).to_string(), "-19/2");
        assert_eq!(h(6, 1).to_string(), "6/1");
    }

    #[test]
    fn difference_of_squares() {
        let one = mono(HalfInt::ZERO, q(1, 1));
        let r = mono(h(1, 2), q(1, 1));
        let a = &one - &r;
        let b = &one + &r;
        let p = &a * &b;
        let want = &one - &mono(h(1, 1), q(1, 1));
        assert_eq!(p, want);
    }

    #[test]
    fn monomial_products() {
        let m = mono(h(-1, 2), q(1, 1));
        assert_eq!(&(&m * &m) * &m, mono(h(-3, 2), q(1, 1)));
        let a = mono(h(-3, 2), q(1, 1));
        let b = mono(h(-7, 2), q(-15, 8));
        assert_eq!(&a * &b, mono(h(-5, 1), q(-15, 8)));
    }

    #[test]
    fn derivatives_of_inverse_root() {
        let m = mono(h(-1, 2), q(1, 1));
        assert_eq!(m.derivative(), mono(h(-3, 2), q(-1, 2)));
        assert_eq!(m.nth_derivative(3), mono(h(-7, 2), q(-15, 8)));
    }

    #[test]
    fn truncation_propagates_through_products() {
        let a = PuiseuxSeries::zero("y", &d(), Direction::Small, Some(h(3, 1)))
            .with_term(HalfInt::int(1), q(1, 1))
            .unwrap();
        let b = PuiseuxSeries::zero("y", &d(), Direction::Small, Some(h(5, 2)))
            .with_term(h(1, 2), q(2, 1))
            .unwrap();
        let p = &a * &b;
        // min(3 + 1/2, 5/2 + 1)
        assert_eq!(p.trunc(), Some(h(7, 2)));
        assert!(p.coeff(h(7, 2)).is_err());
        assert_eq!(p.coeff(h(3, 2)).unwrap(), q(2, 1));
    }

    #[test]
    fn sqrt_of_perfect_square() {
        let one = mono(HalfInt::ZERO, q(1, 1));
        let y = mono(h(1, 1), q(1, 1));
        let a = &(&one - &y.scale_rational(&rational(2, 1))) + &(&y * &y);
        let s = a.sqrt_series_to(Branch::Principal, Some(h(6, 1))).unwrap();
        assert_eq!(s, (&one - &y).truncate(h(6, 1)));
        let x = mono(h(1, 1), q(1, 1));
        assert_eq!(x.sqrt_series(Branch::Principal).unwrap(), mono(h(1, 2), q(1, 1)));
        assert_eq!(x.sqrt_series(Branch::Negative).unwrap(), mono(h(1, 2), q(-1, 1)));
    }

    #[test]
    fn sqrt_needs_representable_root() {
        let two = mono(HalfInt::ZERO, q(2, 1));
        assert!(matches!(
            two.sqrt_series(Branch::Principal),
            Err(Error::UnsupportedScalar(_))
        ));
        let odd = mono(h(1, 2), q(1, 1));
        assert!(matches!(odd.sqrt_series(Branch::Principal), Err(Error::Lattice(_))));
    }

    #[test]
    fn integer_powers() {
        let m = mono(h(-1, 2), q(1, 1));
        assert_eq!(m.pow_int(-2).unwrap(), mono(h(1, 1), q(1, 1)));
        let a = &m + &mono(h(1, 1), q(1, 1));
        let cube = a.pow_int(3).unwrap();
        assert_eq!(cube.ord(), Some(h(-3, 2)));
        let inv = a.pow_int_to(-3, Some(h(6, 1))).unwrap();
        let one = &cube * &inv;
        assert_eq!(one.coeff(HalfInt::ZERO).unwrap(), q(1, 1));
        assert!(one.terms().all(|(e, _)| e == HalfInt::ZERO));
        assert!(one.trunc().is_some());
    }

    #[test]
    fn reciprocal_of_zero_is_an_error() {
        let z = PuiseuxSeries::zero("y", &d(), Direction::Small, None);
        assert!(matches!(z.pow_int(-1), Err(Error::Division(_))));
    }

    #[test]
    fn exact_reciprocal_needs_budget() {
        let a = &mono(HalfInt::ZERO, q(1, 1)) + &mono(h(1, 1), q(1, 1));
        assert!(matches!(a.inv_to(None), Err(Error::Budget(_))));
        let r = a.inv_to(Some(h(4, 1))).unwrap();
        for k in 0..4 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(r.coeff(HalfInt::int(k)).unwrap(), q(sign, 1));
        }
    }

    #[test]
    fn mismatched_variables_rejected() {
        let a = mono(HalfInt::ZERO, q(1, 1));
        let b = PuiseuxSeries::monomial("x", Direction::Small, HalfInt::ZERO, q(1, 1));
        assert!(matches!(a.try_mul(&b), Err(Error::Config(_))));
        let c = PuiseuxSeries::monomial("y", Direction::Small, HalfInt::ZERO, Scalar::one(&rational(-6, 1)));
        assert!(matches!(a.try_add(&c), Err(Error::Config(_))));
    }

    #[test]
    fn large_direction_truncation() {
        // x^{1/2} + O(x^{-2}) around infinity
        let a = PuiseuxSeries::zero("x", &d(), Direction::Large, Some(h(-2, 1)))
            .with_term(h(1, 2), q(1, 1))
            .unwrap();
        assert!(a.coeff(h(-2, 1)).is_err());
        assert!(a.coeff(h(-3, 2)).is_ok());
        let sq = &a * &a;
        // known above -2 + 1/2
        assert_eq!(sq.trunc(), Some(h(-3, 2)));
        assert_eq!(a.derivative().trunc(), Some(h(-3, 1)));
    }

    #[test]
    fn json_roundtrip() {
        let a = PuiseuxSeries::zero("y", &d(), Direction::Small, Some(h(7, 2)))
            .with_term(h(-19, 2), q(25875, 128))
            .unwrap()
            .with_term(h(-5, 2), Scalar::new(rational(3, 8), rational(1, 7), d()))
            .unwrap();
        let s = a.to_json_string();
        assert!(s.contains("\"exp\":\"-19/2\""));
        assert_eq!(PuiseuxSeries::from_json_str(&s).unwrap(), a);
        let exact = mono(h(1, 2), q(1, 1));
        assert!(exact.to_json_string().contains("\"trunc\":\"inf\""));
        assert_eq!(PuiseuxSeries::from_json_str(&exact.to_json_string()).unwrap(), exact);
    }

    #[test]
    fn evaluation_uses_principal_branch() {
        let m = mono(h(-1, 2), q(1, 1));
        let v = m.eval(Complex64::new(4.0, 0.0));
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let w = m.eval(Complex64::new(-4.0, 0.0));
        assert!((w - Complex64::new(0.0, -0.5)).norm() < 1e-15);
    }
}
