//! The partial order on strongly primitive vectors, minimal subsets `MIN` of
//! cofinite sets, and `MIN_n`.
//!
//! `u ≼ v` holds iff `Q(u) <= Q(v)` for every reduced form `Q`; it is decided
//! on the three edge forms `y²`, `x² + y²` and `x² + xy + y²`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive};

use crate::geometry::Rational;
use crate::quadform::{is_strongly_primitive, Bqf};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MinimaError {
    #[error("({0},{1}) is not strongly primitive")]
    NotStronglyPrimitive(i64, i64),
    #[error("form is not in the reduction domain")]
    NotReduced,
    #[error("sets are not pairwise disjoint")]
    Overlap,
    #[error("cannot parse vector list {0:?}")]
    Parse(String),
}

/// A strongly primitive vector: `gcd(x, y) = 1` and `y > 0`, or `y = 0, x = 1`.
///
/// Ordered by `(y, |x|, x)`, which lists `(1,0), (0,1), (-1,1), (1,1), (-2,1), …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpVec {
    x: i64,
    y: i64,
}

impl SpVec {
    pub fn new(x: i64, y: i64) -> Result<SpVec, MinimaError> {
        if is_strongly_primitive(x, y) {
            Ok(SpVec { x, y })
        } else {
            Err(MinimaError::NotStronglyPrimitive(x, y))
        }
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }

    pub fn pair(&self) -> (i64, i64) {
        (self.x, self.y)
    }

    fn key(&self) -> (i64, i64, i64) {
        (self.y, self.x.abs(), self.x)
    }
}

impl Ord for SpVec {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for SpVec {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Shorthand for literal vectors known to be strongly primitive.
pub fn sp(x: i64, y: i64) -> SpVec {
    SpVec::new(x, y).expect("strongly primitive literal")
}

impl FromStr for SpVec {
    type Err = MinimaError;

    fn from_str(s: &str) -> Result<SpVec, MinimaError> {
        let bad = || MinimaError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (x, y) = inner.split_once(',').ok_or_else(bad)?;
        let x = x.trim().parse().map_err(|_| bad())?;
        let y = y.trim().parse().map_err(|_| bad())?;
        SpVec::new(x, y)
    }
}

/// Parses `"(x1,y1);(x2,y2);…"`; the empty string is the empty list.
pub fn parse_vec_list(s: &str) -> Result<Vec<SpVec>, MinimaError> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// Formats a set as `{(x1,y1),(x2,y2)}`.
pub fn format_set(v: &[SpVec]) -> String {
    let inner: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

pub type ExclusionSet = BTreeSet<SpVec>;

fn edge_values((x, y): (i64, i64)) -> [i64; 3] {
    [y * y, x * x + y * y, x * x + x * y + y * y]
}

pub fn preceq(u: (i64, i64), v: (i64, i64)) -> bool {
    let (eu, ev) = (edge_values(u), edge_values(v));
    eu.iter().zip(&ev).all(|(a, b)| a <= b)
}

/// Elements of `xs` not dominated by another element.
pub fn min_of_finite(xs: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = xs
        .iter()
        .filter(|&&x| !xs.iter().any(|&y| y != x && preceq(y, x)))
        .copied()
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The vector `(a, 1)` not in `excluded` with `a` scanned as `0, -1, 1, -2, 2, …`.
pub fn witness(excluded: &ExclusionSet) -> SpVec {
    (0..)
        .flat_map(|k: i64| if k == 0 { vec![0] } else { vec![-k, k] })
        .map(|a| sp(a, 1))
        .find(|v| !excluded.contains(v))
        .expect("excluded set is finite")
}

/// Box radius `ceil(sqrt(2(a² + max(a, 0) + 1)))` containing every vector not above `(a, 1)`.
pub fn witness_box(a: i64) -> i64 {
    let s = 2 * (a * a + a.max(0) + 1);
    let r = s.sqrt();
    if r * r == s {
        r
    } else {
        r + 1
    }
}

type MinMemo = Mutex<HashMap<Vec<SpVec>, Arc<Vec<SpVec>>>>;
type MinNMemo = Mutex<HashMap<(Vec<SpVec>, usize), Arc<Vec<Vec<SpVec>>>>>;

fn min_memo() -> &'static MinMemo {
    static MEMO: OnceLock<MinMemo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn min_n_memo() -> &'static MinNMemo {
    static MEMO: OnceLock<MinNMemo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `MIN` of the strongly primitive vectors outside `excluded`, sorted.
pub fn min_complement(excluded: &ExclusionSet) -> Vec<SpVec> {
    let key: Vec<SpVec> = excluded.iter().copied().collect();
    if let Some(hit) = min_memo().lock().expect("memo lock").get(&key) {
        return hit.as_ref().clone();
    }
    let w = witness(excluded);
    let r = witness_box(w.x);
    let mut cands = vec![w.pair()];
    for y in 0..=r {
        for x in -r..=r {
            if !is_strongly_primitive(x, y) {
                continue;
            }
            let v = SpVec { x, y };
            if v != w && !excluded.contains(&v) && !preceq(w.pair(), v.pair()) {
                cands.push(v.pair());
            }
        }
    }
    let mut out: Vec<SpVec> = min_of_finite(&cands)
        .into_iter()
        .map(|(x, y)| SpVec { x, y })
        .collect();
    out.sort();
    min_memo()
        .lock()
        .expect("memo lock")
        .insert(key, Arc::new(out.clone()));
    out
}

/// All `n`-element sets `{x1, …, xn}` with `x_{i+1} ∈ MIN(complement of excluded ∪ {x1..xi})`,
/// each sorted, deduplicated, in sorted order.
pub fn min_n(excluded: &ExclusionSet, n: usize) -> Vec<Vec<SpVec>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let key = (excluded.iter().copied().collect::<Vec<_>>(), n);
    if let Some(hit) = min_n_memo().lock().expect("memo lock").get(&key) {
        return hit.as_ref().clone();
    }
    let mut out = BTreeSet::new();
    for w in min_complement(excluded) {
        let mut next = excluded.clone();
        next.insert(w);
        for mut rest in min_n(&next, n - 1) {
            rest.push(w);
            rest.sort();
            out.insert(rest);
        }
    }
    let out: Vec<Vec<SpVec>> = out.into_iter().collect();
    min_n_memo()
        .lock()
        .expect("memo lock")
        .insert(key, Arc::new(out.clone()));
    out
}

fn sqrt_bound(r: &Rational) -> i64 {
    // An integer k with k² >= r.
    let c: BigInt = r.ceil().to_integer();
    let s = c.sqrt();
    (s + BigInt::from(1))
        .to_i64()
        .expect("enumeration bound fits in i64")
}

/// Strongly primitive vectors with `Q(v) < bound`, for positive-definite `Q`.
pub(crate) fn sp_vectors_below(q: &Bqf, bound: &Rational) -> Vec<SpVec> {
    let four = Rational::from_integer(4.into());
    let d = &four * &q.q11 * &q.q22 - &q.q12 * &q.q12;
    assert!(
        d.is_positive() && q.q11.is_positive(),
        "form must be positive definite"
    );
    let bound_pos = if bound.is_positive() {
        bound.clone()
    } else {
        return Vec::new();
    };
    let ymax = sqrt_bound(&(&four * &q.q11 * &bound_pos / &d));
    let xmax = sqrt_bound(&(&four * &q.q22 * &bound_pos / &d));
    let mut out = Vec::new();
    for y in 0..=ymax {
        for x in -xmax..=xmax {
            if is_strongly_primitive(x, y) && &q.evaluate(x, y) < bound {
                out.push(SpVec { x, y });
            }
        }
    }
    out.sort();
    out
}

/// Checks that `sets` is the start of a successive minima sequence of `Q`:
/// each set has a single value, values never decrease, and every strongly
/// primitive vector of value below the largest attained value is covered.
pub fn is_successive_minima_prefix(q: &Bqf, sets: &[Vec<SpVec>]) -> Result<bool, MinimaError> {
    if !q.in_v() {
        return Err(MinimaError::NotReduced);
    }
    prefix_check(q, sets)
}

pub(crate) fn prefix_check(q: &Bqf, sets: &[Vec<SpVec>]) -> Result<bool, MinimaError> {
    let mut seen = BTreeSet::new();
    for v in sets.iter().flatten() {
        if !seen.insert(*v) {
            return Err(MinimaError::Overlap);
        }
    }
    let mut last: Option<Rational> = None;
    for set in sets {
        let vals: BTreeSet<Rational> = set.iter().map(|v| q.evaluate(v.x, v.y)).collect();
        if vals.len() > 1 {
            return Ok(false);
        }
        if let Some(m) = vals.into_iter().next() {
            if last.as_ref().is_some_and(|l| &m < l) {
                return Ok(false);
            }
            last = Some(m);
        }
    }
    let Some(top) = last else {
        return Ok(true);
    };
    Ok(sp_vectors_below(q, &top).iter().all(|v| seen.contains(v)))
}
