//! Exact elements of a quadratic extension ℚ(θ), θ² = d.
//!
//! A [`Scalar`] carries its own `d`. Mixing scalars from different
//! extensions is a configuration error in the checked operations and a
//! panic in the operator impls; series code always checks up front.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `a + b·θ` with `θ² = d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    d: BigRational,
}

pub fn rational(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

/// Formats a rational as `p/q`, always with an explicit denominator.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

impl Scalar {
    pub fn new(a: BigRational, b: BigRational, d: BigRational) -> Self {
        Scalar { a, b, d }
    }

    pub fn from_rational(a: BigRational, d: &BigRational) -> Self {
        Scalar::new(a, BigRational::zero(), d.clone())
    }

    pub fn from_ratio(n: i64, m: i64, d: &BigRational) -> Self {
        Scalar::from_rational(rational(n, m), d)
    }

    pub fn zero(d: &BigRational) -> Self {
        Scalar::from_rational(BigRational::zero(), d)
    }

    pub fn one(d: &BigRational) -> Self {
        Scalar::from_rational(BigRational::one(), d)
    }

    /// The generator θ itself.
    pub fn theta(d: &BigRational) -> Self {
        Scalar::new(BigRational::zero(), BigRational::one(), d.clone())
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn theta_squared(&self) -> &BigRational {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn check_field(&self, other: &Scalar) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Config(format!(
                "scalars from different extensions (θ² = {} vs {})",
                fmt_rational(&self.d),
                fmt_rational(&other.d)
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_field(other)?;
        Ok(Scalar::new(
            &self.a + &other.a,
            &self.b + &other.b,
            self.d.clone(),
        ))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_field(other)?;
        let a = &self.a * &other.a + &self.d * &self.b * &other.b;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Scalar::new(a, b, self.d.clone()))
    }

    pub fn scale(&self, r: &BigRational) -> Scalar {
        Scalar::new(&self.a * r, &self.b * r, self.d.clone())
    }

    /// Field norm `a² − d·b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.d * &self.b * &self.b
    }

    pub fn conj(&self) -> Scalar {
        Scalar::new(self.a.clone(), -&self.b, self.d.clone())
    }

    pub fn inv(&self) -> Result<Scalar> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Division("scalar"));
        }
        Ok(Scalar::new(&self.a / &n, -&self.b / &n, self.d.clone()))
    }

    /// Image under the embedding θ ↦ √d (θ ↦ i√|d| when d < 0).
    pub fn to_complex(&self) -> Complex64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        if d >= 0.0 {
            Complex64::new(a + b * d.sqrt(), 0.0)
        } else {
            Complex64::new(a, b * (-d).sqrt())
        }
    }

    /// Exact square root inside the extension, choosing the root whose
    /// complex image is the principal square root. `None` if no root exists
    /// in ℚ(θ).
    pub fn sqrt(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let mut candidates = Vec::new();
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                candidates.push(Scalar::from_rational(r, &self.d));
            }
            // a = d·q²  =>  sqrt(a) = q·θ
            if !self.d.is_zero() {
                if let Some(q) = rational_sqrt(&(&self.a / &self.d)) {
                    candidates.push(Scalar::new(BigRational::zero(), q, self.d.clone()));
                }
            }
        } else {
            // (p + qθ)² = p² + d q² + 2pqθ  =>  p⁴ − a p² + d b²/4 = 0
            let disc = &self.a * &self.a - &self.d * &self.b * &self.b;
            if let Some(s) = rational_sqrt(&disc) {
                let two = rational(2, 1);
                for p2 in [(&self.a + &s) / &two, (&self.a - &s) / &two] {
                    if let Some(p) = rational_sqrt(&p2) {
                        if p.is_zero() {
                            continue;
                        }
                        let q = &self.b / (&two * &p);
                        candidates.push(Scalar::new(p, q, self.d.clone()));
                    }
                }
            }
        }
        let root = candidates.into_iter().find(|c| {
            c.checked_mul(c).map(|sq| &sq == self).unwrap_or(false)
        })?;
        let z = root.to_complex();
        if z.re > 0.0 || (z.re == 0.0 && z.im >= 0.0) {
            Some(root)
        } else {
            Some(-root)
        }
    }
}

impl fmt::Display for Scalar {
    /// `a,b;d` with every rational written as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{};{}",
            fmt_rational(&self.a),
            fmt_rational(&self.b),
            fmt_rational(&self.d)
        )
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ab, d) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("scalar {s:?} lacks ';d'")))?;
        let (a, b) = ab
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("scalar {s:?} lacks ',b'")))?;
        Ok(Scalar::new(
            parse_rational(a)?,
            parse_rational(b)?,
            parse_rational(d)?,
        ))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).expect("scalar extension mismatch")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.checked_add(&-rhs).expect("scalar extension mismatch")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("scalar extension mismatch")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-&self.a, -&self.b, self.d.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
