//! Binary quadratic forms.
//!
//! Two encodings are used. [`Bqf`] is the rational tuple `(q11, q22, q12)` for
//! `q11 x² + q12 xy + q22 y²`, the coordinates in which cones live. [`IntBqf`]
//! is the integer form `a x² + b xy + c y²` used for reduction and counting.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, Zero};

use crate::geometry::{IntVec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuadformError {
    #[error("form {0} is not positive definite")]
    NotPositiveDefinite(String),
    #[error("representation number undefined for m = 0 in the Moebius formula")]
    ZeroArgument,
    #[error("cannot parse form {0:?}: expected \"a,b,c\"")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bqf {
    pub q11: Rational,
    pub q22: Rational,
    pub q12: Rational,
}

impl Bqf {
    pub fn new(q11: Rational, q22: Rational, q12: Rational) -> Bqf {
        Bqf { q11, q22, q12 }
    }

    pub fn from_ints(q11: i64, q22: i64, q12: i64) -> Bqf {
        let r = |x: i64| Rational::from_integer(x.into());
        Bqf::new(r(q11), r(q22), r(q12))
    }

    /// Reads a tuple `(q11, q22, q12)` from a vector of length 3.
    pub fn from_slice(v: &[BigInt]) -> Bqf {
        let r = |x: &BigInt| Rational::from_integer(x.clone());
        Bqf::new(r(&v[0]), r(&v[1]), r(&v[2]))
    }

    pub fn evaluate(&self, x: i64, y: i64) -> Rational {
        let row = coeff_row(x, y);
        let r = |i: usize| Rational::from_integer(row[i].clone());
        &self.q11 * r(0) + &self.q22 * r(1) + &self.q12 * r(2)
    }

    pub fn is_positive_definite(&self) -> bool {
        let four = Rational::from_integer(4.into());
        self.q11.is_positive()
            && four * &self.q11 * &self.q22 - &self.q12 * &self.q12 > Rational::zero()
    }

    /// Membership in the reduction domain: `q22 >= q11`, `q12 >= 0`,
    /// `q11 >= q12` and `q11 > 0`.
    pub fn in_v(&self) -> bool {
        self.in_vbar() && self.q11.is_positive()
    }

    /// Membership in the closure of the reduction domain.
    pub fn in_vbar(&self) -> bool {
        self.q22 >= self.q11 && !self.q12.is_negative() && self.q11 >= self.q12
    }
}

/// `(x², y², xy)`, so that `Q(x, y) = coeff_row(x, y) · (q11, q22, q12)`.
pub fn coeff_row(x: i64, y: i64) -> IntVec {
    vec![
        BigInt::from(x * x),
        BigInt::from(y * y),
        BigInt::from(x * y),
    ]
}

/// `a x² + b xy + c y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntBqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

impl IntBqf {
    pub const fn new(a: i64, b: i64, c: i64) -> IntBqf {
        IntBqf { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.disc() < 0
    }

    pub fn evaluate(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// The tuple `(q11, q22, q12) = (a, c, b)`.
    pub fn to_bqf(&self) -> Bqf {
        Bqf::from_ints(self.a, self.c, self.b)
    }

    pub fn scale(&self, k: i64) -> IntBqf {
        IntBqf::new(k * self.a, k * self.b, k * self.c)
    }

    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    /// The form `v ↦ Q(U v)`.
    pub fn transform(&self, u: &Mat2) -> IntBqf {
        let [[p, q], [r, s]] = *u;
        IntBqf::new(
            self.evaluate(p, r),
            2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            self.evaluate(q, s),
        )
    }

    fn require_pd(&self) -> Result<(), QuadformError> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(QuadformError::NotPositiveDefinite(self.to_string()))
        }
    }
}

impl fmt::Display for IntBqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl FromStr for IntBqf {
    type Err = QuadformError;

    fn from_str(s: &str) -> Result<IntBqf, QuadformError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || QuadformError::Parse(s.to_string());
        if parts.len() != 3 {
            return Err(bad());
        }
        let n = |t: &str| t.parse::<i64>().map_err(|_| bad());
        Ok(IntBqf::new(n(parts[0])?, n(parts[1])?, n(parts[2])?))
    }
}

fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

/// Returns the reduced form `Q'` in the reduction domain together with a
/// unimodular `U` such that `Q'(v) = Q(U v)`.
pub fn reduce_gl2(q: &IntBqf) -> Result<(IntBqf, Mat2), QuadformError> {
    q.require_pd()?;
    let mut f = *q;
    let mut u = IDENTITY;
    loop {
        // Translate so that -a < b <= a.
        let k = Integer::div_floor(&(f.a - f.b), &(2 * f.a));
        if k != 0 {
            let t = [[1, k], [0, 1]];
            f = f.transform(&t);
            u = mat_mul(&u, &t);
        }
        if f.a > f.c || (f.a == f.c && f.b < 0) {
            let s = [[0, -1], [1, 0]];
            f = f.transform(&s);
            u = mat_mul(&u, &s);
            continue;
        }
        break;
    }
    if f.b < 0 {
        let m = [[1, 0], [0, -1]];
        f = f.transform(&m);
        u = mat_mul(&u, &m);
    }
    Ok((f, u))
}

/// Integer solutions of `Q(x, y) = m`.
pub fn rep_number(q: &IntBqf, m: u64) -> Result<u64, QuadformError> {
    q.require_pd()?;
    Ok(count_solutions(q, m, |_, _| true))
}

/// Strongly primitive solutions of `Q(x, y) = m`: `gcd(x, y) = 1` and the last
/// nonzero coordinate positive.
pub fn sp_rep_number(q: &IntBqf, m: u64) -> Result<u64, QuadformError> {
    q.require_pd()?;
    Ok(count_solutions(q, m, is_strongly_primitive))
}

pub fn is_strongly_primitive(x: i64, y: i64) -> bool {
    x.gcd(&y) == 1 && (y > 0 || (y == 0 && x > 0))
}

fn count_solutions(q: &IntBqf, m: u64, keep: impl Fn(i64, i64) -> bool) -> u64 {
    let (a, b) = (q.a as i128, q.b as i128);
    let d = -(q.disc() as i128);
    let m = m as i128;
    // 4a Q(x, y) = (2ax + by)² + d y².
    let ymax = (4 * a * m / d).sqrt();
    let mut count = 0;
    for y in -ymax..=ymax {
        let rest = 4 * a * m - d * y * y;
        if rest < 0 {
            continue;
        }
        let s = rest.sqrt();
        if s * s != rest {
            continue;
        }
        let roots: &[i128] = if s == 0 { &[0] } else { &[s, -s] };
        for &t in roots {
            let num = t - b * y;
            if num % (2 * a) == 0 {
                let x = (num / (2 * a)) as i64;
                if keep(x, y as i64) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// The Moebius function.
pub fn mobius(n: u64) -> i64 {
    assert!(n > 0, "mobius(0) is undefined");
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Strongly primitive count recovered from ordinary counts by Moebius
/// inversion over square divisors: `r̃*(m) = ½ Σ_{d² | m} μ(d) r(m / d²)`.
pub fn sp_from_rep_moebius(q: &IntBqf, m: u64) -> Result<u64, QuadformError> {
    if m == 0 {
        return Err(QuadformError::ZeroArgument);
    }
    q.require_pd()?;
    let mut total: i64 = 0;
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d * d) {
            let mu = mobius(d);
            if mu != 0 {
                total += mu * rep_number(q, m / (d * d))? as i64;
            }
        }
        d += 1;
    }
    debug_assert!(total >= 0 && total % 2 == 0);
    Ok((total / 2) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaVariant {
    Ordinary,
    StronglyPrimitive,
}

/// Coefficients `r(0), …, r(M)` from one enumeration of `{Q <= M}`.
pub fn theta_coeffs(
    q: &IntBqf,
    max: u64,
    variant: ThetaVariant,
) -> Result<Vec<u64>, QuadformError> {
    q.require_pd()?;
    let mut out = vec![0u64; max as usize + 1];
    let (a, b) = (q.a as i128, q.b as i128);
    let d = -(q.disc() as i128);
    let mm = max as i128;
    let ymax = (4 * a * mm / d).sqrt();
    for y in -ymax..=ymax {
        let rest = 4 * a * mm - d * y * y;
        if rest < 0 {
            continue;
        }
        let s = rest.sqrt();
        // 2ax + by lies in [-s, s].
        let lo = Integer::div_ceil(&(-s - b * y), &(2 * a));
        let hi = Integer::div_floor(&(s - b * y), &(2 * a));
        for x in lo..=hi {
            let v = a * x * x + b * x * y + q.c as i128 * y * y;
            if v > mm {
                continue;
            }
            let keep = match variant {
                ThetaVariant::Ordinary => true,
                ThetaVariant::StronglyPrimitive => is_strongly_primitive(x as i64, y as i64),
            };
            if keep {
                out[v as usize] += 1;
            }
        }
    }
    Ok(out)
}
