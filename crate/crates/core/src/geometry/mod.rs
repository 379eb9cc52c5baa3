//! Polyhedral cones `P(A, B) = {x | a·x >= 0 for a in A, b·x > 0 for b in B}`
//! over the rationals.
//!
//! Rows and rays are stored as primitive integer vectors. Extreme rays of the
//! closed cone (the one cut out by `A` alone) are computed on demand by double
//! description and memoized; a cone produced by [`Cone::intersect`] resumes the
//! computation from its first operand's generators instead of starting over.

mod dd;
mod io;

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use dd::Generators;
pub use io::{parse_cone_json, ConeJson};

pub type Rational = BigRational;
pub type IntVec = Vec<BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("closed cone has a lineality space of dimension {0}")]
    UnsupportedCone(usize),
    #[error("invalid cone data: {0}")]
    Parse(String),
}

#[derive(Clone, Debug)]
pub struct Cone {
    dim: usize,
    closed: Vec<IntVec>,
    strict: Vec<IntVec>,
    seed: Option<(usize, Arc<Generators>)>,
    gens: OnceLock<Arc<Generators>>,
}

impl Cone {
    /// Builds `P(A, B)` from rational rows. Rows are scaled to primitive
    /// integer vectors and duplicates are dropped.
    pub fn new(
        dim: usize,
        a: &[Vec<Rational>],
        b: &[Vec<Rational>],
    ) -> Result<Cone, GeometryError> {
        let to_int = |rows: &[Vec<Rational>]| -> Result<Vec<IntVec>, GeometryError> {
            rows.iter()
                .map(|r| {
                    check_len(dim, r.len())?;
                    Ok(clear_denominators(r))
                })
                .collect()
        };
        Ok(Cone::from_parts(dim, to_int(a)?, to_int(b)?))
    }

    /// Builds `P(A, B)` from integer rows.
    pub fn from_int_rows(dim: usize, a: &[IntVec], b: &[IntVec]) -> Result<Cone, GeometryError> {
        for r in a.iter().chain(b) {
            check_len(dim, r.len())?;
        }
        Ok(Cone::from_parts(dim, a.to_vec(), b.to_vec()))
    }

    /// Convenience constructor for small literal matrices.
    pub fn from_i64(dim: usize, a: &[&[i64]], b: &[&[i64]]) -> Result<Cone, GeometryError> {
        let conv = |rows: &[&[i64]]| -> Vec<IntVec> {
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect()
        };
        Cone::from_int_rows(dim, &conv(a), &conv(b))
    }

    fn from_parts(dim: usize, closed: Vec<IntVec>, strict: Vec<IntVec>) -> Cone {
        Cone {
            dim,
            closed: dedup_rows(closed, &mut HashSet::new()),
            strict: dedup_rows(strict, &mut HashSet::new()),
            seed: None,
            gens: OnceLock::new(),
        }
    }

    /// The whole space `R^dim`.
    pub fn full(dim: usize) -> Cone {
        Cone::from_parts(dim, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn closed_rows(&self) -> &[IntVec] {
        &self.closed
    }

    pub fn strict_rows(&self) -> &[IntVec] {
        &self.strict
    }

    /// Whether the generators have already been computed.
    pub fn has_cached_rays(&self) -> bool {
        self.gens.get().is_some()
    }

    /// Generators of the closed cone, computed once and cached.
    pub fn generators(&self) -> &Arc<Generators> {
        self.gens.get_or_init(|| {
            let (start, mut g) = match &self.seed {
                Some((n, g)) => (*n, Generators::clone(g)),
                None => (0, Generators::whole_space(self.dim)),
            };
            for row in &self.closed[start..] {
                g.insert(row);
            }
            g.canonicalize();
            Arc::new(g)
        })
    }

    /// Canonical extreme rays of the closed cone, sorted lexicographically.
    pub fn edges(&self) -> Result<&[IntVec], GeometryError> {
        let g = self.generators();
        if !g.is_pointed() {
            return Err(GeometryError::UnsupportedCone(g.lineality.len()));
        }
        Ok(&g.rays)
    }

    /// Intersection with `A = A1 ∪ A2`, `B = B1 ∪ B2`. Generators of `self`
    /// (or the seed it was itself built from) are reused.
    pub fn intersect(&self, other: &Cone) -> Result<Cone, GeometryError> {
        check_len(self.dim, other.dim)?;
        let mut seen: HashSet<IntVec> = self.closed.iter().cloned().collect();
        let mut closed = self.closed.clone();
        closed.extend(dedup_rows(other.closed.clone(), &mut seen));
        let mut seen: HashSet<IntVec> = self.strict.iter().cloned().collect();
        let mut strict = self.strict.clone();
        strict.extend(dedup_rows(other.strict.clone(), &mut seen));

        let seed = match self.gens.get() {
            Some(g) => Some((self.closed.len(), Arc::clone(g))),
            None => self.seed.clone(),
        };
        Ok(Cone {
            dim: self.dim,
            closed,
            strict,
            seed,
            gens: OnceLock::new(),
        })
    }

    /// Adds closed rows, reusing cached generators as in [`Cone::intersect`].
    pub fn with_closed_rows(&self, rows: Vec<IntVec>) -> Result<Cone, GeometryError> {
        let extra = Cone::from_int_rows(self.dim, &rows, &[])?;
        self.intersect(&extra)
    }

    /// Cartesian product of three cones, with rows zero-padded into blocks.
    pub fn product3(c1: &Cone, c2: &Cone, c3: &Cone) -> Cone {
        let dims = [c1.dim, c2.dim, c3.dim];
        let total: usize = dims.iter().sum();
        let mut closed = Vec::new();
        let mut strict = Vec::new();
        let mut offset = 0;
        for (c, d) in [c1, c2, c3].into_iter().zip(dims) {
            let pad = |r: &IntVec| -> IntVec {
                let mut v = vec![BigInt::zero(); total];
                v[offset..offset + d].clone_from_slice(r);
                v
            };
            closed.extend(c.closed.iter().map(pad));
            strict.extend(c.strict.iter().map(pad));
            offset += d;
        }
        Cone::from_parts(total, closed, strict)
    }

    /// True iff no point satisfies all closed and strict rows.
    pub fn is_member_empty(&self) -> bool {
        if self.strict.is_empty() {
            return false;
        }
        if self.strict.iter().any(|b| b.iter().all(Zero::is_zero)) {
            return true;
        }
        let g = self.generators();
        let strict_nonneg = self.strict.iter().all(|b| {
            g.rays.iter().all(|r| !dd::dot(b, r).is_negative())
                && g.lineality.iter().all(|l| dd::dot(b, l).is_zero())
        });
        let witness_of = |g: &Generators| -> IntVec {
            let mut w = vec![BigInt::zero(); self.dim];
            for r in &g.rays {
                for (x, y) in w.iter_mut().zip(r) {
                    *x += y;
                }
            }
            w
        };
        let w = if strict_nonneg {
            witness_of(g)
        } else {
            // Work in the closure of the member set instead.
            let closure = self
                .with_closed_rows(self.strict.clone())
                .expect("rows have the cone's dimension");
            witness_of(closure.generators())
        };
        !self.strict.iter().all(|b| dd::dot(b, &w).is_positive())
    }

    /// A point of the member set, if there is one.
    pub fn interior_witness(&self) -> Option<IntVec> {
        if self.is_member_empty() {
            return None;
        }
        let closure = self
            .with_closed_rows(self.strict.clone())
            .expect("rows have the cone's dimension");
        let g = closure.generators();
        let mut w = vec![BigInt::zero(); self.dim];
        for r in &g.rays {
            for (x, y) in w.iter_mut().zip(r) {
                *x += y;
            }
        }
        Some(w)
    }

    /// True iff the closed cone is `{0}`.
    pub fn is_zero_cone(&self) -> Result<bool, GeometryError> {
        Ok(self.edges()?.is_empty())
    }

    /// True iff every generator of the closed cone lies on all the given hyperplanes.
    pub fn is_subset_of(&self, equalities: &[IntVec]) -> bool {
        let g = self.generators();
        equalities.iter().all(|e| {
            g.rays
                .iter()
                .chain(&g.lineality)
                .all(|r| dd::dot(e, r).is_zero())
        })
    }

    /// Membership of an integer point in the closed cone.
    pub fn contains_closed(&self, x: &[BigInt]) -> bool {
        self.closed.iter().all(|a| !dd::dot(a, x).is_negative())
    }

    /// Membership of an integer point in `P(A, B)`.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.contains_closed(x) && self.strict.iter().all(|b| dd::dot(b, x).is_positive())
    }

    /// Mutual containment of the closed cones, decided on generators.
    pub fn same_closed_cone(&self, other: &Cone) -> bool {
        self.dim == other.dim && self.closed_within(other) && other.closed_within(self)
    }

    fn closed_within(&self, other: &Cone) -> bool {
        let g = self.generators();
        g.rays.iter().all(|r| other.contains_closed(r))
            && g.lineality.iter().all(|l| {
                let neg: IntVec = l.iter().map(|x| -x).collect();
                other.contains_closed(l) && other.contains_closed(&neg)
            })
    }

    /// Equality of member sets. A non-empty member set is its closure minus
    /// the faces on which some strict row vanishes, so two of them agree iff
    /// the closures agree and each removed face lies in a face removed by the
    /// other side.
    pub fn same_member_set(&self, other: &Cone) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let (e1, e2) = (self.is_member_empty(), other.is_member_empty());
        if e1 || e2 {
            return e1 && e2;
        }
        let c1 = self
            .with_closed_rows(self.strict.clone())
            .expect("same dim");
        let c2 = other
            .with_closed_rows(other.strict.clone())
            .expect("same dim");
        if !c1.same_closed_cone(&c2) {
            return false;
        }
        strict_rows_implied(self, &c2, other) && strict_rows_implied(other, &c1, self)
    }
}

/// Every face of `closure` cut away by a strict row of `from` is also cut
/// away by a strict row of `target`.
fn strict_rows_implied(from: &Cone, closure: &Cone, target: &Cone) -> bool {
    let g = closure.generators();
    from.strict.iter().all(|b| {
        let mut w = vec![BigInt::zero(); closure.dim];
        for r in g.rays.iter().filter(|r| dd::dot(b, r).is_zero()) {
            for (x, y) in w.iter_mut().zip(r.iter()) {
                *x += y;
            }
        }
        // Strict rows of `target` are nonnegative on the closure, so vanishing
        // on the face sum means vanishing on the whole face.
        target.strict.iter().any(|t| dd::dot(t, &w).is_zero())
    })
}

fn check_len(expected: usize, found: usize) -> Result<(), GeometryError> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, found })
    }
}

fn dedup_rows(rows: Vec<IntVec>, seen: &mut HashSet<IntVec>) -> Vec<IntVec> {
    let mut out = Vec::with_capacity(rows.len());
    for mut r in rows {
        dd::make_primitive(&mut r);
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    out
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn clear_denominators(v: &[Rational]) -> IntVec {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut out: IntVec = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    dd::make_primitive(&mut out);
    out
}

/// Primitive integer multiple of an integer vector (positive scaling only).
pub fn primitive(v: &[BigInt]) -> IntVec {
    let mut out = v.to_vec();
    dd::make_primitive(&mut out);
    out
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    dd::dot(a, b)
}

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
