//! Text and JSON encodings of cones. JSON integers are decimal strings.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{clear_denominators, Cone, GeometryError, IntVec};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConeJson {
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rays: Option<Vec<Vec<String>>>,
}

fn encode(rows: &[IntVec]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

fn decode(dim: usize, rows: &[Vec<String>]) -> Result<Vec<IntVec>, GeometryError> {
    rows.iter()
        .map(|r| {
            if r.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            let vals = r
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(clear_denominators(&vals))
        })
        .collect()
}

fn parse_rational(s: &str) -> Result<BigRational, GeometryError> {
    let s = s.trim();
    let bad = || GeometryError::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Cone {
    pub fn to_json(&self, with_rays: bool) -> ConeJson {
        let rays = with_rays.then(|| match self.edges() {
            Ok(r) => encode(r),
            Err(_) => encode(&self.generators().rays),
        });
        ConeJson {
            dim: self.dim(),
            a: encode(self.closed_rows()),
            b: encode(self.strict_rows()),
            rays,
        }
    }

    /// Rebuilds a cone from its JSON form. Cached rays, when present, are
    /// validated against the closed rows but otherwise recomputed.
    pub fn from_json(j: &ConeJson) -> Result<Cone, GeometryError> {
        let a = decode(j.dim, &j.a)?;
        let b = decode(j.dim, &j.b)?;
        let cone = Cone::from_int_rows(j.dim, &a, &b)?;
        if let Some(rays) = &j.rays {
            for r in decode(j.dim, rays)? {
                if !cone.contains_closed(&r) {
                    return Err(GeometryError::Parse(
                        "cached ray violates a closed row".to_string(),
                    ));
                }
            }
        }
        Ok(cone)
    }

    /// Matrix form: `A` then `B`, one right-aligned row per line.
    pub fn to_matrix_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "A =");
        out.push_str(&matrix_text(self.closed_rows()));
        let _ = writeln!(out, "B =");
        out.push_str(&matrix_text(self.strict_rows()));
        out
    }
}

pub fn parse_cone_json(text: &str) -> Result<Cone, GeometryError> {
    let j: ConeJson =
        serde_json::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))?;
    Cone::from_json(&j)
}

pub(crate) fn matrix_text(rows: &[IntVec]) -> String {
    if rows.is_empty() {
        return "[ ]\n".to_string();
    }
    let width = rows
        .iter()
        .flat_map(|r| r.iter().map(|x| x.to_string().len()))
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:>width$}")).collect();
        let _ = writeln!(out, "[{}]", cells.join(" "));
    }
    out
}
