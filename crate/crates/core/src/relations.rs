//! Three-term relations `α1 θ(Q1) + α2 θ(Q2) + α3 θ(Q3) = 0` between theta
//! series of positive definite binary forms.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::geometry::Rational;
use crate::quadform::{reduce_gl2, theta_coeffs, IntBqf, QuadformError, ThetaVariant};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationsError {
    #[error("coefficients sum to {0}, but the constant terms force a zero sum")]
    Obstruction(Rational),
    #[error("all non-zero coefficients have the same sign")]
    NoRelation,
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(i64),
    #[error("verified to m = {bound} but the forms match no known case")]
    Unclassified { bound: u64 },
    #[error(transparent)]
    Form(#[from] QuadformError),
}

/// `a/(a+b) θ(Q[sigma[0]]) + b/(a+b) θ(Q[sigma[1]]) = θ(Q[sigma[2]])`, with
/// zero-based form indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizedRelation {
    pub a: u64,
    pub b: u64,
    pub sigma: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalized {
    /// All coefficients vanish.
    Degenerate,
    /// `θ(Q[i]) = θ(Q[j])`.
    TwoTerm {
        i: usize,
        j: usize,
    },
    ThreeTerm(NormalizedRelation),
}

pub fn normalize(alphas: &[Rational; 3]) -> Result<Normalized, RelationsError> {
    let nonzero: Vec<usize> = (0..3).filter(|&i| !alphas[i].is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(Normalized::Degenerate);
    }
    let neg = nonzero.iter().filter(|&&i| alphas[i].is_negative()).count();
    if neg == 0 || neg == nonzero.len() {
        return Err(RelationsError::NoRelation);
    }
    let sum: Rational = alphas.iter().sum();
    if !sum.is_zero() {
        return Err(RelationsError::Obstruction(sum));
    }
    if nonzero.len() == 2 {
        return Ok(Normalized::TwoTerm {
            i: nonzero[0],
            j: nonzero[1],
        });
    }
    // Exactly one coefficient has the odd sign; it goes on the right.
    let odd_negative = neg == 1;
    let k = (0..3)
        .find(|&i| alphas[i].is_negative() == odd_negative)
        .expect("one sign occurs once");
    let rest: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let beta = -&alphas[rest[0]] / &alphas[k];
    let a = beta
        .numer()
        .to_u64()
        .expect("positive numerator fits in u64");
    let c = beta.denom().to_u64().expect("denominator fits in u64");
    Ok(Normalized::ThreeTerm(NormalizedRelation {
        a,
        b: c - a,
        sigma: [rest[0], rest[1], k],
    }))
}

/// Coefficients `(c1, c2, c3) >= 0` with `triple = c1 L1 + c2 L2 + c3 L3`, or
/// `None` when `a x + b y != (a + b) z`.
pub fn linset_decompose(a: u64, b: u64, triple: [u64; 3]) -> Option<[u64; 3]> {
    if a == 0 && b == 0 {
        return None;
    }
    let g = a.gcd(&b);
    let (a, b) = (a / g, b / g);
    let [x, y, z] = triple;
    if a as u128 * x as u128 + b as u128 * y as u128 != (a + b) as u128 * z as u128 {
        return None;
    }
    if a == 0 {
        // L2 = (1, 0, 0), L3 = (0, 1, 1)
        return Some([0, x, y]);
    }
    if b == 0 {
        // L2 = (1, 0, 1), L3 = (0, 1, 0)
        return Some([0, x, y]);
    }
    let s = a + b;
    if x <= y {
        Some([x, 0, (y - x) / s])
    } else {
        Some([y, (x - y) / s, 0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationCheck {
    pub bound: u64,
    /// First `m` where the identity fails.
    pub first_failure: Option<u64>,
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn check_with(
    q: [&IntBqf; 3],
    a: u64,
    b: u64,
    max: u64,
    variant: ThetaVariant,
) -> Result<RelationCheck, RelationsError> {
    let r1 = theta_coeffs(q[0], max, variant)?;
    let r2 = theta_coeffs(q[1], max, variant)?;
    let r3 = theta_coeffs(q[2], max, variant)?;
    let (a, b) = (a as u128, b as u128);
    let first_failure = (0..=max as usize)
        .find(|&m| a * r1[m] as u128 + b * r2[m] as u128 != (a + b) * r3[m] as u128)
        .map(|m| m as u64);
    Ok(RelationCheck {
        bound: max,
        first_failure,
    })
}

/// `a r1(m) + b r2(m) = (a + b) r3(m)` for `0 <= m <= max`.
pub fn verify_relation(
    q1: &IntBqf,
    q2: &IntBqf,
    q3: &IntBqf,
    a: u64,
    b: u64,
    max: u64,
) -> Result<RelationCheck, RelationsError> {
    check_with([q1, q2, q3], a, b, max, ThetaVariant::Ordinary)
}

/// Same identity on strongly primitive counts; `m = 0` holds trivially.
pub fn verify_sp_relation(
    q1: &IntBqf,
    q2: &IntBqf,
    q3: &IntBqf,
    a: u64,
    b: u64,
    max: u64,
) -> Result<RelationCheck, RelationsError> {
    check_with([q1, q2, q3], a, b, max, ThetaVariant::StronglyPrimitive)
}

/// `(c(x²+xy+y²), 4c(x²+xy+y²), c(x²+3y²))`.
pub fn nontrivial_family(c: i64) -> Result<[IntBqf; 3], RelationsError> {
    if c <= 0 {
        return Err(RelationsError::NonPositiveScale(c));
    }
    Ok([
        IntBqf::new(c, c, c),
        IntBqf::new(4 * c, 4 * c, 4 * c),
        IntBqf::new(c, 0, 3 * c),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    Degenerate,
    TrivialTwoTerm,
    TrivialThreeTerm,
    NonTrivial,
    NoRelationDetected,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Degenerate => "degenerate",
            CaseLabel::TrivialTwoTerm => "trivial-2-term",
            CaseLabel::TrivialThreeTerm => "trivial-3-term",
            CaseLabel::NonTrivial => "non-trivial",
            CaseLabel::NoRelationDetected => "no-relation-detected",
        })
    }
}

/// A case label backed by exact verification up to `bound`, not a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub label: CaseLabel,
    pub bound: u64,
    pub first_failure: Option<u64>,
}

fn reduced(q: &IntBqf) -> Result<IntBqf, RelationsError> {
    Ok(reduce_gl2(q)?.0)
}

pub fn classify(
    alphas: &[Rational; 3],
    forms: &[IntBqf; 3],
    max: u64,
) -> Result<Classification, RelationsError> {
    let result = |label, check: Option<RelationCheck>| Classification {
        label,
        bound: max,
        first_failure: check.and_then(|c| c.first_failure),
    };
    let red = [
        reduced(&forms[0])?,
        reduced(&forms[1])?,
        reduced(&forms[2])?,
    ];
    match normalize(alphas)? {
        Normalized::Degenerate => Ok(result(CaseLabel::Degenerate, None)),
        Normalized::TwoTerm { i, j } => {
            let check = verify_relation(&forms[i], &forms[j], &forms[j], 1, 0, max)?;
            if !check.holds() {
                return Ok(result(CaseLabel::NoRelationDetected, Some(check)));
            }
            if red[i] == red[j] {
                Ok(result(CaseLabel::TrivialTwoTerm, Some(check)))
            } else {
                Err(RelationsError::Unclassified { bound: max })
            }
        }
        Normalized::ThreeTerm(rel) => {
            let [s1, s2, s3] = rel.sigma;
            let check = verify_relation(&forms[s1], &forms[s2], &forms[s3], rel.a, rel.b, max)?;
            if !check.holds() {
                return Ok(result(CaseLabel::NoRelationDetected, Some(check)));
            }
            if red[0] == red[1] && red[1] == red[2] {
                return Ok(result(CaseLabel::TrivialThreeTerm, Some(check)));
            }
            // Weight 1/3 on c·hex, 2/3 on 4c·hex, right side c(x²+3y²).
            let (light, heavy) = match (rel.a, rel.b) {
                (1, 2) => (s1, s2),
                (2, 1) => (s2, s1),
                _ => return Err(RelationsError::Unclassified { bound: max }),
            };
            let c = red[light].content();
            let fam = nontrivial_family(c)?;
            if red[light] == reduced(&fam[0])?
                && red[heavy] == reduced(&fam[1])?
                && red[s3] == reduced(&fam[2])?
            {
                Ok(result(CaseLabel::NonTrivial, Some(check)))
            } else {
                Err(RelationsError::Unclassified { bound: max })
            }
        }
    }
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| format!("{s:?}: {e}"))
}
