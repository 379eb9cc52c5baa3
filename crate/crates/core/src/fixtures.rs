//! Worked examples with known answers, checked against the library.
//!
//! The golden file is a JSON list of tagged entries. Cones use the same
//! encoding as [`ConeJson`]; vectors are `[x, y]` pairs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{Cone, ConeJson};
use crate::ksets::{kset, reduction_domain};
use crate::minima::{min_n, ExclusionSet, SpVec};
use crate::refinement::{
    aux_cones, refine_pair, run_algorithm_with, vbar3_rows, CoveringParameter, GenerationSink,
    Linset, RefinementPair, RunConfig, StopSet,
};

pub const DEFAULT_GOLDEN: &str = include_str!("../golden/fixtures.json");

type Set = Vec<[i64; 2]>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamJson {
    pub x: Vec<Set>,
    pub y: Vec<Set>,
    pub z: Vec<Set>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fixture {
    Min {
        name: String,
        excluded: Set,
        n: usize,
        expect: Vec<Set>,
    },
    Kset {
        name: String,
        sets: Vec<Set>,
        cone: ConeJson,
        /// Compare only the forms inside the reduction domain.
        within_domain: bool,
    },
    Refinement {
        name: String,
        a: u64,
        b: u64,
        parent: ConeJson,
        param: ParamJson,
        shape: [usize; 3],
        next: [Set; 3],
        k: ConeJson,
        q: ConeJson,
        /// A longer list of equalities that must cut out the same cone with `k`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_full: Option<ConeJson>,
        child: ConeJson,
    },
    Chain {
        name: String,
        a: u64,
        b: u64,
        cones: Vec<ConeJson>,
        params: Vec<ParamJson>,
    },
}

impl Fixture {
    pub fn name(&self) -> &str {
        match self {
            Fixture::Min { name, .. }
            | Fixture::Kset { name, .. }
            | Fixture::Refinement { name, .. }
            | Fixture::Chain { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Fixture::Min { .. } => "min",
            Fixture::Kset { .. } => "kset",
            Fixture::Refinement { .. } => "refinement",
            Fixture::Chain { .. } => "chain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub name: String,
    pub kind: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn load(text: &str) -> Result<Vec<Fixture>, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn run_all(text: &str) -> Result<Vec<Outcome>, String> {
    Ok(load(text)?.iter().map(check).collect())
}

pub fn check(f: &Fixture) -> Outcome {
    let (passed, detail) = match run_one(f) {
        Ok(failures) if failures.is_empty() => (true, String::new()),
        Ok(failures) => (false, failures.join("; ")),
        Err(e) => (false, e),
    };
    Outcome {
        name: f.name().to_string(),
        kind: f.kind(),
        passed,
        detail,
    }
}

fn vecs(s: &Set) -> Result<Vec<SpVec>, String> {
    s.iter()
        .map(|&[x, y]| SpVec::new(x, y).map_err(|e| e.to_string()))
        .collect()
}

fn seqs(s: &[Set]) -> Result<Vec<Vec<SpVec>>, String> {
    s.iter().map(vecs).collect()
}

fn param(p: &ParamJson) -> Result<CoveringParameter, String> {
    CoveringParameter::new(seqs(&p.x)?, seqs(&p.y)?, seqs(&p.z)?).map_err(|e| e.to_string())
}

fn cone(j: &ConeJson) -> Result<Cone, String> {
    Cone::from_json(j).map_err(|e| e.to_string())
}

fn in_vbar3(c: &Cone) -> Cone {
    c.with_closed_rows(vbar3_rows())
        .expect("rows have length 9")
}

fn run_one(f: &Fixture) -> Result<Vec<String>, String> {
    let mut failures = Vec::new();
    match f {
        Fixture::Min {
            excluded,
            n,
            expect,
            ..
        } => {
            let excl: ExclusionSet = vecs(excluded)?.into_iter().collect();
            let got: BTreeSet<BTreeSet<SpVec>> = min_n(&excl, *n)
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect();
            let want: BTreeSet<BTreeSet<SpVec>> = expect
                .iter()
                .map(|s| vecs(s).map(|v| v.into_iter().collect()))
                .collect::<Result<_, _>>()?;
            if got != want {
                failures.push(format!("got {got:?}"));
            }
        }
        Fixture::Kset {
            sets,
            cone: golden,
            within_domain,
            ..
        } => {
            let ours = kset(&seqs(sets)?).map_err(|e| e.to_string())?;
            let golden = cone(golden)?;
            if *within_domain {
                let v = reduction_domain();
                let a = ours.intersect(&v).map_err(|e| e.to_string())?;
                let b = golden.intersect(&v).map_err(|e| e.to_string())?;
                if !a.same_member_set(&b) {
                    failures.push("differs inside the reduction domain".into());
                }
            } else if !ours.same_closed_cone(&golden) {
                failures.push(format!("got {}", ours.to_matrix_text()));
            }
        }
        Fixture::Refinement {
            a,
            b,
            parent,
            param: p,
            shape,
            next,
            k,
            q,
            q_full,
            child,
            ..
        } => {
            let p = param(p)?;
            let next = [vecs(&next[0])?, vecs(&next[1])?, vecs(&next[2])?];
            let (kc, qc) =
                aux_cones(&p, [&next[0], &next[1], &next[2]], *shape).map_err(|e| e.to_string())?;
            let gk = cone(k)?;
            let gq = cone(q)?;
            if !in_vbar3(&kc).same_closed_cone(&in_vbar3(&gk)) {
                failures.push("K differs on the closed domain".into());
            }
            if !in_vbar3(&qc).same_closed_cone(&in_vbar3(&gq)) {
                failures.push("Q differs on the closed domain".into());
            }
            if let Some(full) = q_full {
                let with_full = gk.intersect(&cone(full)?).map_err(|e| e.to_string())?;
                let with_q = gk.intersect(&gq).map_err(|e| e.to_string())?;
                if !with_full.same_closed_cone(&with_q) {
                    failures.push("the short and long Q disagree on K".into());
                }
            }
            let ls = Linset::new(*a, *b).map_err(|e| e.to_string())?;
            let pair = RefinementPair {
                cone: cone(parent)?,
                param: p.clone(),
            };
            let mut ext = p;
            for (seq, s) in [&mut ext.x, &mut ext.y, &mut ext.z].into_iter().zip(&next) {
                let mut s = s.clone();
                s.sort();
                seq.push(s);
            }
            match refine_pair(&pair, &ls).into_iter().find(|c| c.param == ext) {
                None => failures.push(format!("no child with parameter {ext}")),
                Some(c) => {
                    if !c.cone.same_member_set(&cone(child)?) {
                        failures.push("child cone differs".into());
                    }
                }
            }
        }
        Fixture::Chain {
            a,
            b,
            cones,
            params,
            ..
        } => {
            let want: Vec<(Cone, CoveringParameter)> = cones
                .iter()
                .zip(params)
                .map(|(c, p)| Ok((cone(c)?, param(p)?)))
                .collect::<Result<_, String>>()?;
            let mut sink = Collect(Vec::new());
            let cfg = RunConfig {
                a: *a,
                b: *b,
                stop: StopSet::Diagonal,
                max_iter: want.len().saturating_sub(1),
            };
            run_algorithm_with(&cfg, &mut sink).map_err(|e| e.to_string())?;
            for (i, (c, p)) in want.iter().enumerate() {
                let Some(generation) = sink.0.get(i) else {
                    failures.push(format!("generation {i} missing"));
                    continue;
                };
                let nonempty: Vec<&RefinementPair> =
                    generation.iter().filter(|q| !q.is_empty()).collect();
                match nonempty.as_slice() {
                    [only] if only.param == *p => {
                        if !only.cone.same_member_set(c) {
                            failures.push(format!("T{i} differs"));
                        }
                    }
                    [only] => failures.push(format!("P{i}: got {}", only.param)),
                    many => {
                        failures.push(format!("generation {i} has {} non-empty pairs", many.len()))
                    }
                }
            }
        }
    }
    Ok(failures)
}

struct Collect(Vec<Vec<RefinementPair>>);

impl GenerationSink for Collect {
    fn generation(&mut self, _: usize, pairs: &[RefinementPair]) {
        self.0.push(pairs.to_vec());
    }
}
