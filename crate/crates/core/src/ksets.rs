//! K-sets: cones of forms in the closed reduction domain whose successive
//! minima start with a prescribed sequence of vector sets.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::geometry::{int_vec, Cone, IntVec};
use crate::minima::{min_complement, SpVec};
use crate::quadform::coeff_row;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KsetError {
    #[error("vector {0} appears more than once")]
    Repeated(SpVec),
}

/// Closed rows of the reduction domain: `q22 - q11`, `q11 - q12`, `q12`.
pub fn vbar_rows() -> Vec<IntVec> {
    vec![
        int_vec(&[-1, 1, 0]),
        int_vec(&[1, 0, -1]),
        int_vec(&[0, 0, 1]),
    ]
}

/// The reduction domain with its strict row `q11 > 0`.
pub fn reduction_domain() -> Cone {
    Cone::from_int_rows(3, &vbar_rows(), &[int_vec(&[1, 0, 0])]).expect("rows have length 3")
}

/// The closed reduction domain.
pub fn closed_domain() -> Cone {
    Cone::from_int_rows(3, &vbar_rows(), &[]).expect("rows have length 3")
}

fn row(v: &SpVec) -> IntVec {
    coeff_row(v.x(), v.y())
}

fn diff(a: &IntVec, b: &IntVec) -> IntVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_distinct<'a>(vs: impl IntoIterator<Item = &'a SpVec>) -> Result<(), KsetError> {
    let mut seen = BTreeSet::new();
    for v in vs {
        if !seen.insert(*v) {
            return Err(KsetError::Repeated(*v));
        }
    }
    Ok(())
}

fn chain_rows(vectors: &[SpVec]) -> Vec<IntVec> {
    let mut rows = vbar_rows();
    for pair in vectors.windows(2) {
        rows.push(diff(&row(&pair[1]), &row(&pair[0])));
    }
    if let Some(last) = vectors.last() {
        let excluded = vectors.iter().copied().collect();
        let last_row = row(last);
        for w in min_complement(&excluded) {
            rows.push(diff(&row(&w), &last_row));
        }
    }
    rows
}

/// `Q(x1) <= … <= Q(xk) <= Q(w)` for every `w` in `MIN` of the complement.
pub fn kset_chain(vectors: &[SpVec]) -> Result<Cone, KsetError> {
    check_distinct(vectors)?;
    Ok(Cone::from_int_rows(3, &chain_rows(vectors), &[]).expect("rows have length 3"))
}

/// Rows of `K(X1, …, Xk)`: the chain on the flattened sequence followed by
/// `Q(x_{i,1}) = Q(x_{i,j})` within each set, as opposite row pairs.
pub fn kset_rows(sets: &[Vec<SpVec>]) -> Result<Vec<IntVec>, KsetError> {
    let flat: Vec<SpVec> = sets.iter().flatten().copied().collect();
    check_distinct(&flat)?;
    let mut rows = chain_rows(&flat);
    for set in sets {
        if let Some((first, rest)) = set.split_first() {
            let r0 = row(first);
            for v in rest {
                let eq = diff(&r0, &row(v));
                let neg: IntVec = eq.iter().map(|x| -x).collect();
                rows.push(eq);
                rows.push(neg);
            }
        }
    }
    Ok(rows)
}

pub fn kset(sets: &[Vec<SpVec>]) -> Result<Cone, KsetError> {
    Ok(Cone::from_int_rows(3, &kset_rows(sets)?, &[]).expect("rows have length 3"))
}

pub fn kset_zero_test(sets: &[Vec<SpVec>]) -> Result<bool, KsetError> {
    Ok(kset(sets)?
        .is_zero_cone()
        .expect("subcones of the closed domain are pointed"))
}

/// Whether some form of the K-set lies in the reduction domain itself
/// (`q11 > 0`), i.e. whether a refinement through it can be non-empty.
pub fn kset_meets_domain(sets: &[Vec<SpVec>]) -> Result<bool, KsetError> {
    let c = kset(sets)?
        .intersect(&reduction_domain())
        .expect("both cones have dimension 3");
    Ok(!c.is_member_empty())
}

/// Parses `"{(1,0),(0,1)};{};{(-1,1)}"`.
pub fn parse_sets(s: &str) -> Result<Vec<Vec<SpVec>>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|part| {
            let part = part.trim();
            let inner = part
                .strip_prefix('{')
                .and_then(|t| t.strip_suffix('}'))
                .ok_or_else(|| format!("expected {{…}}, found {part:?}"))?;
            let mut out = Vec::new();
            let mut rest = inner.trim();
            while !rest.is_empty() {
                let end = rest
                    .find(')')
                    .ok_or_else(|| format!("unclosed vector in {part:?}"))?;
                let v: SpVec = rest[..=end].trim().parse().map_err(|e| format!("{e}"))?;
                out.push(v);
                rest = rest[end + 1..]
                    .trim_start()
                    .trim_start_matches(',')
                    .trim_start();
            }
            Ok(out)
        })
        .collect()
}

/// Evaluates `Q` on a 3-vector of rationals given as integers.
pub fn form_value(q: &[BigInt], v: &SpVec) -> BigInt {
    crate::geometry::dot(q, &row(v))
}
