//! Property suites shared by the core property tests and the acceptance run.
//! Each suite returns `Err` with a description of the first failure.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};

use theta_refine::geometry::{int_vec, primitive, Cone, IntVec};
use theta_refine::ksets::{kset, kset_chain, reduction_domain};
use theta_refine::minima::{
    is_successive_minima_prefix, min_complement, min_n, min_of_finite, preceq, ExclusionSet, SpVec,
};
use theta_refine::quadform::{
    reduce_gl2, rep_number, sp_from_rep_moebius, sp_rep_number, theta_coeffs, Bqf, IntBqf, Mat2,
    ThetaVariant,
};
use theta_refine::refinement::{
    run_algorithm_with, CoveringParameter, GenerationSink, Linset, RefinementPair, RunConfig,
    StopSet,
};
use theta_refine::relations::linset_decompose;

pub type SuiteResult = Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn sp_box(r: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for y in 0..=r {
        for x in -r..=r {
            if SpVec::new(x, y).is_ok() {
                out.push((x, y));
            }
        }
    }
    out
}

/// Random forms in the reduction domain: positive combinations of `y²`,
/// `x² + y²` and `x² + xy + y²` with the last two weights non-zero.
fn reduced_form() -> impl Strategy<Value = Bqf> {
    (0i64..50, 1i64..50, 1i64..50)
        .prop_map(|(l1, l2, l3)| Bqf::from_ints(l2 + l3, l1 + l2 + l3, l3))
}

fn pd_form(max: i64) -> impl Strategy<Value = IntBqf> {
    (1..=max, -max..=max, 1..=max)
        .prop_map(|(a, b, c)| IntBqf::new(a, b, c))
        .prop_filter("positive definite", |q| q.is_positive_definite())
}

// ---------------------------------------------------------------------------
// Partial order

pub fn partial_order_axioms() -> SuiteResult {
    let pts = sp_box(12);
    for &u in &pts {
        if !preceq(u, u) {
            return Err(format!("not reflexive at {u:?}"));
        }
    }
    let below: Vec<Vec<usize>> = pts
        .iter()
        .map(|&u| (0..pts.len()).filter(|&j| preceq(u, pts[j])).collect())
        .collect();
    for (i, up) in below.iter().enumerate() {
        for &j in up {
            if j != i && preceq(pts[j], pts[i]) {
                return Err(format!("not antisymmetric at {:?}, {:?}", pts[i], pts[j]));
            }
            for &k in &below[j] {
                if !preceq(pts[i], pts[k]) {
                    return Err(format!(
                        "not transitive at {:?}, {:?}, {:?}",
                        pts[i], pts[j], pts[k]
                    ));
                }
            }
        }
    }
    Ok(())
}

pub fn order_soundness() -> SuiteResult {
    let pts = sp_box(6);
    let n = pts.len();
    runner(400)
        .run(&(0..n, 0..n, reduced_form()), |(i, j, q)| {
            let (u, v) = (pts[i], pts[j]);
            if preceq(u, v) && q.evaluate(u.0, u.1) > q.evaluate(v.0, v.1) {
                return Err(fail(format!("{u:?} precedes {v:?} but not under {q:?}")));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// MIN

pub fn min_attains_minimum() -> SuiteResult {
    let pts = sp_box(6);
    let n = pts.len();
    let subset = proptest::collection::btree_set(0..n, 1..40);
    runner(300)
        .run(&(subset, reduced_form()), |(idx, q)| {
            let xs: Vec<(i64, i64)> = idx.iter().map(|&i| pts[i]).collect();
            let value = |v: &(i64, i64)| q.evaluate(v.0, v.1);
            let all = xs.iter().map(value).min().unwrap();
            let mins = min_of_finite(&xs);
            let on_min = mins.iter().map(value).min();
            prop_assert_eq!(Some(all), on_min);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn replayable(set: &BTreeSet<SpVec>, excluded: &ExclusionSet) -> bool {
    if set.is_empty() {
        return true;
    }
    let next = min_complement(excluded);
    next.iter().filter(|v| set.contains(v)).any(|v| {
        let mut rest = set.clone();
        rest.remove(v);
        let mut e = excluded.clone();
        e.insert(*v);
        replayable(&rest, &e)
    })
}

pub fn min_complement_and_min_n() -> SuiteResult {
    let pts: Vec<SpVec> = sp_box(5)
        .into_iter()
        .map(|(x, y)| SpVec::new(x, y).unwrap())
        .collect();
    let n = pts.len();
    runner(200)
        .run(
            &(proptest::collection::btree_set(0..n, 0..30), 0usize..5),
            |(idx, k)| {
                let excl: ExclusionSet = idx.iter().map(|&i| pts[i]).collect();
                let next = min_complement(&excl);
                prop_assert!(!next.is_empty());
                prop_assert!(next.iter().all(|v| !excl.contains(v)));
                let small: ExclusionSet = excl.iter().take(4).copied().collect();
                for set in min_n(&small, k) {
                    prop_assert_eq!(set.len(), k);
                    let s: BTreeSet<SpVec> = set.iter().copied().collect();
                    if !replayable(&s, &small) {
                        return Err(fail(format!("{set:?} cannot be replayed after {small:?}")));
                    }
                }
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Representation numbers

fn brute_rep(q: &IntBqf, m: u64) -> u64 {
    let d = 4 * q.a * q.c - q.b * q.b;
    let r = (((4 * q.a.max(q.c) * m as i64) as f64 / d as f64).sqrt() as i64) + 2;
    let mut n = 0;
    for x in -r..=r {
        for y in -r..=r {
            if q.evaluate(x, y) == m as i64 {
                n += 1;
            }
        }
    }
    n
}

pub fn moebius_and_divisor_identities() -> SuiteResult {
    runner(24)
        .run(&pd_form(6), |q| {
            for m in 1..=200u64 {
                let sp = sp_rep_number(&q, m).unwrap();
                prop_assert_eq!(sp_from_rep_moebius(&q, m).unwrap(), sp, "m = {}", m);
                let mut sum = 0;
                let mut d = 1u64;
                while d * d <= m {
                    if m % (d * d) == 0 {
                        sum += 2 * sp_rep_number(&q, m / (d * d)).unwrap();
                    }
                    d += 1;
                }
                let r = rep_number(&q, m).unwrap();
                prop_assert_eq!(r, sum, "m = {}", m);
                if m <= 60 {
                    prop_assert_eq!(r, brute_rep(&q, m), "m = {}", m);
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn unimodular() -> impl Strategy<Value = Mat2> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_map(|(p, q, r, s)| [[p, q], [r, s]])
        .prop_filter("det ±1", |u| {
            (u[0][0] * u[1][1] - u[0][1] * u[1][0]).abs() == 1
        })
}

pub fn reduction_properties() -> SuiteResult {
    runner(300)
        .run(&(pd_form(12), unimodular()), |(q, u)| {
            let (r, _) = reduce_gl2(&q).unwrap();
            prop_assert!(r.to_bqf().in_v());
            prop_assert_eq!(reduce_gl2(&r).unwrap().0, r);
            prop_assert_eq!(reduce_gl2(&q.transform(&u)).unwrap().0, r);
            prop_assert_eq!(
                theta_coeffs(&q, 60, ThetaVariant::Ordinary).unwrap(),
                theta_coeffs(&r, 60, ThetaVariant::Ordinary).unwrap()
            );
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// With integer weights summing to zero, the relation on all counts holds
/// up to `M` exactly when it holds on strongly primitive counts.
pub fn ordinary_and_sp_relations_agree() -> SuiteResult {
    const M: u64 = 300;
    let hex = |c: i64| IntBqf::new(c, c, c);
    let triple = prop_oneof![
        (pd_form(5), pd_form(5), pd_form(5)).prop_map(|(a, b, c)| ([a, b, c], [1i64, 1, -2])),
        (1i64..4).prop_map(move |c| ([hex(c), hex(4 * c), IntBqf::new(c, 0, 3 * c)], [1, 2, -3])),
        (pd_form(5), unimodular()).prop_map(|(q, u)| ([q, q.transform(&u), q], [2, 1, -3])),
        (pd_form(5), pd_form(5)).prop_map(|(p, q)| ([p, q, p], [1, -1, 0])),
    ];
    runner(60)
        .run(&triple, |(forms, w)| {
            let holds = |variant| {
                let r: Vec<Vec<u64>> = forms
                    .iter()
                    .map(|q| theta_coeffs(q, M, variant).unwrap())
                    .collect();
                (1..=M as usize).all(|m| (0..3).map(|i| w[i] * r[i][m] as i64).sum::<i64>() == 0)
            };
            prop_assert_eq!(
                holds(ThetaVariant::Ordinary),
                holds(ThetaVariant::StronglyPrimitive),
                "{:?} with weights {:?}",
                forms,
                w
            );
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn reps(q: &IntBqf, m: i64) -> BTreeSet<(i64, i64)> {
    let r = ((4.0 * m as f64).sqrt() as i64) + 2;
    let mut out = BTreeSet::new();
    for x in -r..=r {
        for y in -r..=r {
            if q.evaluate(x, y) == m {
                out.insert((x, y));
            }
        }
    }
    out
}

/// The explicit maps between representations of `x² + 3y²`, `x² + xy + y²`
/// and `4(x² + xy + y²)` behind the weights 1/3, 2/3.
pub fn hexagonal_bijections() -> SuiteResult {
    let q1 = IntBqf::new(1, 1, 1);
    let q2 = IntBqf::new(4, 4, 4);
    let q3 = IntBqf::new(1, 0, 3);
    for m in 1..=2000i64 {
        let r1 = reps(&q1, m);
        let r2 = reps(&q2, m);
        let r3 = reps(&q3, m);
        if m % 2 == 0 {
            let to2: BTreeSet<_> = r3.iter().map(|&(a, b)| ((a - b) / 2, b)).collect();
            let to1: BTreeSet<_> = r3.iter().map(|&(a, b)| (a - b, 2 * b)).collect();
            if r3.iter().any(|&(a, b)| (a - b) % 2 != 0) || to2 != r2 || to1 != r1 {
                return Err(format!("even case fails at m = {m}"));
            }
            let back: BTreeSet<_> = r1.iter().map(|&(u, v)| (u + v / 2, v / 2)).collect();
            if back != r3 {
                return Err(format!("inverse map fails at m = {m}"));
            }
        } else {
            if !r2.is_empty() {
                return Err(format!("4(x²+xy+y²) represents odd m = {m}"));
            }
            let mut seen = BTreeSet::new();
            for &(a, b) in &r3 {
                // The third image is (2b, -a-b); (2b, -a+b) is not a representation.
                let img = [(a - b, 2 * b), (-a + b, a + b), (2 * b, -a - b)];
                let even: Vec<_> = img.iter().filter(|p| p.1 % 2 == 0).collect();
                if even.len() != 1 || (even[0].0 + even[0].1 / 2, even[0].1 / 2) != (a, b) {
                    return Err(format!("left inverse fails at m = {m}, {:?}", (a, b)));
                }
                for p in img {
                    if !r1.contains(&p) || !seen.insert(p) {
                        return Err(format!("images overlap or leave the target at m = {m}"));
                    }
                }
            }
            if seen != r1 {
                return Err(format!("images do not cover at m = {m}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cones

fn rows(max_rows: usize) -> impl Strategy<Value = Vec<IntVec>> {
    proptest::collection::vec(proptest::collection::vec(-2i64..=2, 3), 1..=max_rows)
        .prop_map(|rs| rs.iter().map(|r| int_vec(r)).collect())
}

fn cross(a: &IntVec, b: &IntVec) -> IntVec {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn full_rank(rs: &[IntVec]) -> bool {
    let zero = BigInt::from(0);
    rs.iter().any(|a| {
        rs.iter()
            .any(|b| rs.iter().any(|c| dot(a, &cross(b, c)) != zero))
    })
}

/// Extreme rays of a pointed cone in R^3: every direction where two
/// independent rows are tight and all rows hold.
fn oracle_rays(rs: &[IntVec]) -> BTreeSet<IntVec> {
    let zero = BigInt::from(0);
    let mut out = BTreeSet::new();
    for (i, a) in rs.iter().enumerate() {
        for b in &rs[i + 1..] {
            let c = cross(a, b);
            if c.iter().all(|x| *x == zero) {
                continue;
            }
            for dir in [c.clone(), c.iter().map(|x| -x).collect()] {
                if rs.iter().all(|r| dot(r, &dir) >= zero) {
                    out.insert(primitive(&dir));
                }
            }
        }
    }
    out
}

fn edge_set(c: &Cone) -> Option<BTreeSet<IntVec>> {
    c.edges().ok().map(|e| e.iter().cloned().collect())
}

pub fn dd_matches_brute_force() -> SuiteResult {
    runner(500)
        .run(&rows(8), |rs| {
            let c = Cone::from_int_rows(3, &rs, &[]).unwrap();
            if !full_rank(&rs) {
                prop_assert!(
                    c.edges().is_err(),
                    "cone with lineality reported as pointed: {:?}",
                    rs
                );
                return Ok(());
            }
            let got = edge_set(&c).ok_or_else(|| fail(format!("pointed cone rejected: {rs:?}")))?;
            prop_assert_eq!(got, oracle_rays(&rs), "rows {:?}", rs);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn dd_round_trip() -> SuiteResult {
    let weights = proptest::collection::vec(0i64..5, 16);
    runner(300)
        .run(&(rows(8), weights), |(rs, w)| {
            let c = Cone::from_int_rows(3, &rs, &[]).unwrap();
            let Ok(edges) = c.edges() else { return Ok(()) };
            let zero = BigInt::from(0);
            for e in edges {
                prop_assert!(rs.iter().all(|r| dot(r, e) >= zero));
            }
            let mut x = vec![zero.clone(); 3];
            for (e, k) in edges.iter().zip(&w) {
                for (xi, ei) in x.iter_mut().zip(e) {
                    *xi += ei * k;
                }
            }
            prop_assert!(rs.iter().all(|r| dot(r, &x) >= zero));
            let back = Cone::from_json(&c.to_json(true)).unwrap();
            prop_assert!(back.same_member_set(&c));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn intersection_laws() -> SuiteResult {
    runner(200)
        .run(&(rows(4), rows(4), rows(4)), |(a, b, c)| {
            let mk = |r: &[IntVec]| Cone::from_int_rows(3, r, &[]).unwrap();
            let (ca, cb, cc) = (mk(&a), mk(&b), mk(&c));
            // Cache the parent's rays first so the intersections start from them.
            let _ = ca.edges();
            let ab = ca.intersect(&cb).unwrap();
            let ba = cb.intersect(&ca).unwrap();
            prop_assert_eq!(edge_set(&ab), edge_set(&ba));
            let left = ab.intersect(&cc).unwrap();
            let right = ca.intersect(&cb.intersect(&cc).unwrap()).unwrap();
            prop_assert_eq!(edge_set(&left), edge_set(&right));
            let merged: Vec<IntVec> = a.iter().chain(&b).cloned().collect();
            prop_assert_eq!(edge_set(&ab), edge_set(&mk(&merged)));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn emptiness_witness() -> SuiteResult {
    runner(400)
        .run(&(rows(5), rows(3)), |(a, b)| {
            let c = Cone::from_int_rows(3, &a, &b).unwrap();
            let zero = BigInt::from(0);
            let empty = c.is_member_empty();
            if !empty {
                let w = c
                    .interior_witness()
                    .ok_or_else(|| fail("no witness".into()))?;
                prop_assert!(a.iter().all(|r| dot(r, &w) >= zero));
                prop_assert!(b.iter().all(|r| dot(r, &w) > zero));
            }
            for x in -3i64..=3 {
                for y in -3i64..=3 {
                    for z in -3i64..=3 {
                        let p = int_vec(&[x, y, z]);
                        if a.iter().all(|r| dot(r, &p) >= zero)
                            && b.iter().all(|r| dot(r, &p) > zero)
                        {
                            prop_assert!(!empty, "{:?} is a member of {:?} / {:?}", p, a, b);
                        }
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// K-sets

/// A random start of a successive minima sequence, built by repeatedly
/// choosing among the next minimal sets.
fn minima_sequence() -> impl Strategy<Value = Vec<Vec<SpVec>>> {
    proptest::collection::vec((0usize..3, 0usize..8), 1..4).prop_map(|steps| {
        let mut excl = ExclusionSet::new();
        let mut out = Vec::new();
        for (n, pick) in steps {
            let choices = min_n(&excl, n);
            let set = choices[pick % choices.len()].clone();
            excl.extend(set.iter().copied());
            out.push(set);
        }
        out
    })
}

pub fn kset_properties() -> SuiteResult {
    runner(120)
        .run(&(minima_sequence(), any::<u64>()), |(sets, seed)| {
            let k = kset(&sets).unwrap();
            // Equalities inside each set cut the chain down to the K-set.
            let flat: Vec<SpVec> = sets.iter().flatten().copied().collect();
            let mut eq = Vec::new();
            for s in &sets {
                for v in s.iter().skip(1) {
                    let d: IntVec = theta_refine::quadform::coeff_row(s[0].x(), s[0].y())
                        .iter()
                        .zip(theta_refine::quadform::coeff_row(v.x(), v.y()))
                        .map(|(p, q)| p - q)
                        .collect();
                    eq.push(d.iter().map(|x| -x).collect());
                    eq.push(d);
                }
            }
            let chain = kset_chain(&flat).unwrap().with_closed_rows(eq).unwrap();
            prop_assert!(chain.same_member_set(&k));
            // Reordering inside a set changes nothing.
            let shuffled: Vec<Vec<SpVec>> = sets
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    if !s.is_empty() {
                        let n = s.len();
                        s.rotate_left(seed as usize % n);
                    }
                    s
                })
                .collect();
            prop_assert!(kset(&shuffled).unwrap().same_member_set(&k));
            // A form from the inside has these sets as its first minima.
            let inside = k.intersect(&reduction_domain()).unwrap();
            if let Some(w) = inside.interior_witness() {
                let q = Bqf::from_slice(&w);
                prop_assert!(
                    is_successive_minima_prefix(&q, &sets).unwrap(),
                    "{:?} for {:?}",
                    w,
                    sets
                );
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Linset decomposition

fn recombine(ls: &Linset, c: [u64; 3]) -> [u64; 3] {
    let mut out = [0u64; 3];
    for (k, l) in c.iter().zip([ls.l1, ls.l2, ls.l3]) {
        for i in 0..3 {
            out[i] += k * l[i] as u64;
        }
    }
    out
}

fn weight_pairs() -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for s in 1..=6u64 {
        for a in 0..=s {
            if a.gcd(&(s - a)) == 1 {
                out.push((a, s - a));
            }
        }
    }
    out
}

pub fn linset_decomposition_complete() -> SuiteResult {
    for (a, b) in weight_pairs() {
        let ls = Linset::new(a, b).map_err(|e| e.to_string())?;
        for x in 0..=60u64 {
            for y in 0..=60u64 {
                let lhs = a * x + b * y;
                if lhs % (a + b) != 0 {
                    continue;
                }
                let z = lhs / (a + b);
                if z > 60 {
                    continue;
                }
                match linset_decompose(a, b, [x, y, z]) {
                    Some(c) if recombine(&ls, c) == [x, y, z] => {}
                    other => {
                        return Err(format!("({a},{b}) at {:?}: got {other:?}", [x, y, z]));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn linset_combinations_on_plane() -> SuiteResult {
    for (a, b) in weight_pairs() {
        let ls = Linset::new(a, b).map_err(|e| e.to_string())?;
        for c1 in 0..=10 {
            for c2 in 0..=10 {
                for c3 in 0..=10 {
                    let [x, y, z] = recombine(&ls, [c1, c2, c3]);
                    if a * x + b * y != (a + b) * z {
                        return Err(format!("({a},{b}): {:?} is off the plane", [c1, c2, c3]));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Refinement

struct Generations(Vec<Vec<RefinementPair>>);

impl GenerationSink for Generations {
    fn generation(&mut self, _: usize, pairs: &[RefinementPair]) {
        self.0.push(pairs.to_vec());
    }
}

fn parent_param(p: &CoveringParameter) -> CoveringParameter {
    let drop = |s: &Vec<Vec<SpVec>>| s[..s.len() - 1].to_vec();
    CoveringParameter {
        x: drop(&p.x),
        y: drop(&p.y),
        z: drop(&p.z),
    }
}

/// For (1,2): each child's closed cone lies in its parent's, every child's
/// last step has a linset shape, and `(x²+xy+y², 4(x²+xy+y²), x²+3y²)`
/// stays inside some surviving cone.
pub fn refinement_nesting_and_coverage(max_iter: usize) -> SuiteResult {
    let cfg = RunConfig {
        a: 1,
        b: 2,
        stop: StopSet::Diagonal,
        max_iter,
    };
    let mut sink = Generations(Vec::new());
    run_algorithm_with(&cfg, &mut sink).map_err(|e| e.to_string())?;
    let shapes = Linset::new(1, 2).unwrap().shapes();
    let v = int_vec(&[1, 1, 1, 4, 4, 4, 1, 3, 0]);
    for (i, gen) in sink.0.iter().enumerate() {
        if !gen.iter().any(|p| p.cone.contains(&v)) {
            return Err(format!("generation {i} has no cone containing v"));
        }
        if i == 0 {
            continue;
        }
        let parents: BTreeMap<&CoveringParameter, &RefinementPair> =
            sink.0[i - 1].iter().map(|p| (&p.param, p)).collect();
        for child in gen {
            let pp = parent_param(&child.param);
            let parent = parents
                .get(&pp)
                .ok_or_else(|| format!("generation {i}: orphan {}", child.param))?;
            if !shapes.contains(&child.param.shape_at(i - 1)) {
                return Err(format!("generation {i}: shape outside the linset"));
            }
            let edges = child.cone.edges().map_err(|e| e.to_string())?;
            if !edges.iter().all(|e| parent.cone.contains_closed(e)) {
                return Err(format!("generation {i}: {} leaves its parent", child.param));
            }
        }
    }
    Ok(())
}
