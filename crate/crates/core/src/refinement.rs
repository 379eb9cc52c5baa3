//! Refinement of coverings of the solution set of
//! `a/(a+b) θ(Q1) + b/(a+b) θ(Q2) = θ(Q3)` by polyhedral cones in `V × V × V`.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Cone, ConeJson, IntVec};
use crate::ksets::{kset, reduction_domain, vbar_rows};
use crate::minima::{min_n, SpVec};
use crate::quadform::coeff_row;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefinementError {
    #[error("(a, b) = (0, 0) has no linset")]
    ZeroPair,
    #[error("shape {0:?} does not match the set sizes {1:?}")]
    ShapeMismatch([usize; 3], [usize; 3]),
    #[error("covering parameter sequences have different lengths")]
    RaggedParameter,
    #[error("invalid pair data: {0}")]
    Parse(String),
}

/// Set-size triples allowed at each refinement step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linset {
    pub a: u64,
    pub b: u64,
    pub l1: [usize; 3],
    pub l2: [usize; 3],
    pub l3: [usize; 3],
    /// `{L2, L3}` only; set when `a * b == 0`, where `L1 = L2 + L3`.
    pub minimal_variant: bool,
}

impl Linset {
    pub fn new(a: u64, b: u64) -> Result<Linset, RefinementError> {
        if a == 0 && b == 0 {
            return Err(RefinementError::ZeroPair);
        }
        let g = a.gcd(&b);
        let s = ((a + b) / g) as usize;
        Ok(Linset {
            a,
            b,
            l1: [1, 1, 1],
            l2: [s, 0, (a / g) as usize],
            l3: [0, s, (b / g) as usize],
            minimal_variant: a == 0 || b == 0,
        })
    }

    /// Shapes in refinement order.
    pub fn shapes(&self) -> Vec<[usize; 3]> {
        if self.minimal_variant {
            vec![self.l2, self.l3]
        } else {
            vec![self.l1, self.l2, self.l3]
        }
    }
}

/// Three sequences of vector sets, one per form. Every set is kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoveringParameter {
    pub x: Vec<Vec<SpVec>>,
    pub y: Vec<Vec<SpVec>>,
    pub z: Vec<Vec<SpVec>>,
}

impl CoveringParameter {
    pub fn new(
        x: Vec<Vec<SpVec>>,
        y: Vec<Vec<SpVec>>,
        z: Vec<Vec<SpVec>>,
    ) -> Result<CoveringParameter, RefinementError> {
        if x.len() != y.len() || y.len() != z.len() {
            return Err(RefinementError::RaggedParameter);
        }
        let sorted = |seq: Vec<Vec<SpVec>>| {
            seq.into_iter()
                .map(|mut s| {
                    s.sort();
                    s
                })
                .collect()
        };
        Ok(CoveringParameter {
            x: sorted(x),
            y: sorted(y),
            z: sorted(z),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn sequences(&self) -> [&Vec<Vec<SpVec>>; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Set sizes at step `i`.
    pub fn shape_at(&self, i: usize) -> [usize; 3] {
        [self.x[i].len(), self.y[i].len(), self.z[i].len()]
    }

    fn extended(&self, next: [&Vec<SpVec>; 3]) -> CoveringParameter {
        let push = |seq: &Vec<Vec<SpVec>>, s: &Vec<SpVec>| {
            let mut out = seq.clone();
            out.push(s.clone());
            out
        };
        CoveringParameter {
            x: push(&self.x, next[0]),
            y: push(&self.y, next[1]),
            z: push(&self.z, next[2]),
        }
    }

    /// Matching triples of sequences, as printed by the CLI.
    pub fn encode(&self) -> String {
        let seq = |s: &Vec<Vec<SpVec>>| {
            let parts: Vec<String> = s.iter().map(|v| crate::minima::format_set(v)).collect();
            format!("({})", parts.join(","))
        };
        format!("({}, {}, {})", seq(&self.x), seq(&self.y), seq(&self.z))
    }
}

impl fmt::Display for CoveringParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn used(seq: &[Vec<SpVec>]) -> BTreeSet<SpVec> {
    seq.iter().flatten().copied().collect()
}

/// A cone in `R^9` together with the parameter it admits.
#[derive(Debug, Clone)]
pub struct RefinementPair {
    pub cone: Cone,
    pub param: CoveringParameter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    pub cone: ConeJson,
    pub x: Vec<Vec<[i64; 2]>>,
    pub y: Vec<Vec<[i64; 2]>>,
    pub z: Vec<Vec<[i64; 2]>>,
}

impl RefinementPair {
    /// `(V × V × V, ((), (), ()))`.
    pub fn initial() -> RefinementPair {
        let v = reduction_domain();
        RefinementPair {
            cone: Cone::product3(&v, &v, &v),
            param: CoveringParameter::default(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cone.is_member_empty()
    }

    pub fn to_json(&self) -> PairJson {
        let seq = |s: &Vec<Vec<SpVec>>| -> Vec<Vec<[i64; 2]>> {
            s.iter()
                .map(|set| set.iter().map(|v| [v.x(), v.y()]).collect())
                .collect()
        };
        PairJson {
            cone: self.cone.to_json(true),
            x: seq(&self.param.x),
            y: seq(&self.param.y),
            z: seq(&self.param.z),
        }
    }

    pub fn from_json(data: &PairJson) -> Result<RefinementPair, RefinementError> {
        let cone =
            Cone::from_json(&data.cone).map_err(|e| RefinementError::Parse(e.to_string()))?;
        let seq = |s: &Vec<Vec<[i64; 2]>>| -> Result<Vec<Vec<SpVec>>, RefinementError> {
            s.iter()
                .map(|set| {
                    set.iter()
                        .map(|&[x, y]| {
                            SpVec::new(x, y).map_err(|e| RefinementError::Parse(e.to_string()))
                        })
                        .collect()
                })
                .collect()
        };
        let param = CoveringParameter::new(seq(&data.x)?, seq(&data.y)?, seq(&data.z)?)?;
        Ok(RefinementPair { cone, param })
    }
}

fn block_row(block: usize, row: &IntVec) -> IntVec {
    let mut v = vec![BigInt::zero(); 9];
    v[3 * block..3 * block + 3].clone_from_slice(row);
    v
}

/// `K` for the three extended sequences and the cross-equalities `Q`.
///
/// `Q` equates the value at the first vector of each non-empty new set; the
/// remaining equalities inside each set are already rows of `K`.
pub fn aux_cones(
    param: &CoveringParameter,
    next: [&Vec<SpVec>; 3],
    shape: [usize; 3],
) -> Result<(Cone, Cone), RefinementError> {
    let sizes = [next[0].len(), next[1].len(), next[2].len()];
    if sizes != shape {
        return Err(RefinementError::ShapeMismatch(shape, sizes));
    }
    let ext = param.extended(next);
    let k = |seq: &Vec<Vec<SpVec>>| {
        kset(seq).expect("sets drawn from MIN of the complement are disjoint")
    };
    let kcone = Cone::product3(&k(&ext.x), &k(&ext.y), &k(&ext.z));

    let reps: Vec<(usize, IntVec)> = next
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            s.first()
                .map(|v| (i, block_row(i, &coeff_row(v.x(), v.y()))))
        })
        .collect();
    let mut rows = Vec::new();
    if let Some((_, first)) = reps.first() {
        for (_, other) in &reps[1..] {
            let eq: IntVec = first.iter().zip(other).map(|(p, q)| p - q).collect();
            let neg: IntVec = eq.iter().map(|x| -x).collect();
            rows.push(eq);
            rows.push(neg);
        }
    }
    let qcone = Cone::from_int_rows(9, &rows, &[]).expect("rows have length 9");
    Ok((kcone, qcone))
}

/// All children of `pair`, empty ones included, ordered by shape and then by
/// the new sets.
pub fn refine_pair(pair: &RefinementPair, ls: &Linset) -> Vec<RefinementPair> {
    let excl = [
        used(&pair.param.x),
        used(&pair.param.y),
        used(&pair.param.z),
    ];
    let mut out = Vec::new();
    for shape in ls.shapes() {
        let xs = min_n(&excl[0], shape[0]);
        let ys = min_n(&excl[1], shape[1]);
        let zs = min_n(&excl[2], shape[2]);
        for x in &xs {
            for y in &ys {
                for z in &zs {
                    let next = [x, y, z];
                    let (kc, qc) =
                        aux_cones(&pair.param, next, shape).expect("sizes follow the shape");
                    let cone = pair
                        .cone
                        .intersect(&kc)
                        .and_then(|c| c.intersect(&qc))
                        .expect("all cones have dimension 9");
                    out.push(RefinementPair {
                        cone,
                        param: pair.param.extended(next),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopSet {
    /// `Q1 = Q2 = Q3`.
    Diagonal,
    /// `Q1 = Q3`.
    Q1EqQ3,
}

impl std::str::FromStr for StopSet {
    type Err = String;

    fn from_str(s: &str) -> Result<StopSet, String> {
        match s {
            "diagonal" => Ok(StopSet::Diagonal),
            "q1q3" | "q1_eq_q3" => Ok(StopSet::Q1EqQ3),
            other => Err(format!("unknown stop set {other:?}")),
        }
    }
}

impl fmt::Display for StopSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopSet::Diagonal => "diagonal",
            StopSet::Q1EqQ3 => "q1q3",
        })
    }
}

fn block_equalities(b1: usize, b2: usize) -> Vec<IntVec> {
    (0..3)
        .map(|j| {
            let mut v = vec![BigInt::zero(); 9];
            v[3 * b1 + j] = BigInt::from(1);
            v[3 * b2 + j] = BigInt::from(-1);
            v
        })
        .collect()
}

/// Hyperplanes whose intersection is the stop set.
pub fn stop_set(kind: StopSet) -> Vec<IntVec> {
    match kind {
        StopSet::Diagonal => {
            let mut rows = block_equalities(0, 1);
            rows.extend(block_equalities(1, 2));
            rows
        }
        StopSet::Q1EqQ3 => block_equalities(0, 2),
    }
}

/// `T ⊆ STOP_SET`. An empty member set is contained in anything; otherwise the
/// closure is compared, which is exact because the stop set is closed.
pub fn within_stop_set(cone: &Cone, stop: &[IntVec]) -> bool {
    cone.is_member_empty() || cone.is_subset_of(stop)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub total: usize,
    pub nonempty: usize,
    /// Pairs with `T ⊄ STOP_SET`; only these are refined.
    pub kept: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IterationLog {
    pub records: Vec<IterationRecord>,
}

impl IterationLog {
    pub fn totals(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.total).collect()
    }

    pub fn nonempty(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.nonempty).collect()
    }

    pub fn kept(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.kept).collect()
    }

    /// Aligned table with one column per iteration.
    pub fn table(&self) -> String {
        let col = |f: fn(&IterationRecord) -> usize| -> Vec<String> {
            self.records.iter().map(|r| f(r).to_string()).collect()
        };
        let rows: Vec<(&str, Vec<String>)> = vec![
            ("i", col(|r| r.iteration)),
            ("#S_i", col(|r| r.total)),
            ("#kept", col(|r| r.kept)),
            ("#nonempty", col(|r| r.nonempty)),
        ];
        let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        let cols = self.records.len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| rows.iter().map(|(_, v)| v[c].len()).max().unwrap_or(1))
            .collect();
        let mut out = String::new();
        for (label, vals) in &rows {
            out.push_str(&format!("{label:<label_w$}"));
            for (v, w) in vals.iter().zip(&widths) {
                out.push_str(&format!("  {v:>w$}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub a: u64,
    pub b: u64,
    pub stop: StopSet,
    pub max_iter: usize,
}

/// Receives every generation as soon as it is complete.
pub trait GenerationSink {
    fn generation(&mut self, index: usize, pairs: &[RefinementPair]);
}

impl GenerationSink for () {
    fn generation(&mut self, _: usize, _: &[RefinementPair]) {}
}

pub fn run_algorithm(
    a: u64,
    b: u64,
    stop: StopSet,
    max_iter: usize,
) -> Result<(Vec<RefinementPair>, IterationLog), RefinementError> {
    run_algorithm_with(
        &RunConfig {
            a,
            b,
            stop,
            max_iter,
        },
        &mut (),
    )
}

/// Removes stop-set subsets, refines the survivors, and repeats until the
/// generation is empty or `max_iter` generations have been produced.
pub fn run_algorithm_with(
    cfg: &RunConfig,
    sink: &mut dyn GenerationSink,
) -> Result<(Vec<RefinementPair>, IterationLog), RefinementError> {
    let ls = Linset::new(cfg.a, cfg.b)?;
    let stop = stop_set(cfg.stop);
    let mut log = IterationLog::default();
    let mut current = vec![RefinementPair::initial()];
    let mut started = Instant::now();
    let mut i = 0;
    loop {
        let flags: Vec<(bool, bool)> = current
            .par_iter()
            .map(|p| {
                let empty = p.cone.is_member_empty();
                (empty, empty || p.cone.is_subset_of(&stop))
            })
            .collect();
        sink.generation(i, &current);
        let done = current.is_empty() || i >= cfg.max_iter;
        log.records.push(IterationRecord {
            iteration: i,
            total: current.len(),
            nonempty: flags.iter().filter(|f| !f.0).count(),
            kept: flags.iter().filter(|f| !f.1).count(),
            elapsed: started.elapsed(),
        });
        if done {
            return Ok((current, log));
        }
        started = Instant::now();
        let survivors: Vec<RefinementPair> = current
            .into_iter()
            .zip(&flags)
            .filter(|(_, f)| !f.1)
            .map(|(p, _)| p)
            .collect();
        let mut next: Vec<RefinementPair> = survivors
            .par_iter()
            .flat_map_iter(|p| refine_pair(p, &ls))
            .collect();
        next.sort_by(|p, q| p.param.cmp(&q.param));
        current = next;
        i += 1;
    }
}

/// Every pair outside `Q1 = Q3` picked at least one non-empty `Y` set.
pub fn check_y_projection_argument(pairs: &[RefinementPair], stop: &[IntVec]) -> bool {
    pairs
        .iter()
        .filter(|p| !within_stop_set(&p.cone, stop))
        .all(|p| p.param.y.iter().any(|s| !s.is_empty()))
}

/// Closed rows of `V̄ × V̄ × V̄`.
pub fn vbar3_rows() -> Vec<IntVec> {
    (0..3)
        .flat_map(|b| vbar_rows().into_iter().map(move |r| block_row(b, &r)))
        .collect()
}
