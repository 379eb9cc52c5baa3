//! Incremental double description over primitive integer vectors.
//!
//! The state tracks a lineality basis and the extreme rays of the pointed
//! part, each ray tagged with the set of inserted rows it lies on. Rows are
//! inserted one at a time in the given order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntVec;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn full(len: usize) -> Self {
        let mut words = vec![u64::MAX; len / 64];
        if !len.is_multiple_of(64) {
            words.push((1u64 << (len % 64)) - 1);
        }
        BitSet { words }
    }

    pub(crate) fn insert(&mut self, i: usize) {
        let w = i / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << (i % 64);
    }

    pub(crate) fn intersection(&self, other: &BitSet) -> BitSet {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        BitSet { words }
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().enumerate().all(|(i, w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }
}

/// Generators of a closed cone: `cone(rays) + span(lineality)`.
#[derive(Clone, Debug, Default)]
pub struct Generators {
    pub lineality: Vec<IntVec>,
    pub rays: Vec<IntVec>,
    pub(crate) zeros: Vec<BitSet>,
    pub(crate) rows_seen: usize,
}

impl Generators {
    pub(crate) fn whole_space(dim: usize) -> Self {
        let lineality = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Generators {
            lineality,
            rays: Vec::new(),
            zeros: Vec::new(),
            rows_seen: 0,
        }
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    /// Inserts the closed halfspace `row · x >= 0`.
    pub(crate) fn insert(&mut self, row: &[BigInt]) {
        let idx = self.rows_seen;
        self.rows_seen += 1;

        let pivot = self.lineality.iter().position(|l| !dot(row, l).is_zero());
        if let Some(p) = pivot {
            let mut l = self.lineality.swap_remove(p);
            let mut al = dot(row, &l);
            if al.is_negative() {
                negate(&mut l);
                al = -al;
            }
            for other in &mut self.lineality {
                let ao = dot(row, other);
                if !ao.is_zero() {
                    *other = combine(&al, other, &ao, &l);
                }
            }
            for (ray, zero) in self.rays.iter_mut().zip(&mut self.zeros) {
                let ar = dot(row, ray);
                if !ar.is_zero() {
                    *ray = combine(&al, ray, &ar, &l);
                }
                zero.insert(idx);
            }
            // `l` vanished on every earlier row and is strictly positive on this one.
            self.rays.push(l);
            self.zeros.push(BitSet::full(idx));
            return;
        }

        let vals: Vec<BigInt> = self.rays.iter().map(|r| dot(row, r)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            for (zero, v) in self.zeros.iter_mut().zip(&vals) {
                if v.is_zero() {
                    zero.insert(idx);
                }
            }
            return;
        }

        let pos: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_negative()).collect();
        let dim = row.len();
        let min_common = (dim - self.lineality.len()).saturating_sub(2);

        let mut new_rays = Vec::new();
        let mut new_zeros = Vec::new();
        for &i in &pos {
            for &j in &neg {
                let common = self.zeros[i].intersection(&self.zeros[j]);
                if common.count() < min_common {
                    continue;
                }
                let blocked = (0..self.rays.len())
                    .any(|k| k != i && k != j && common.is_subset(&self.zeros[k]));
                if blocked {
                    continue;
                }
                let ray = combine(&vals[i], &self.rays[j], &vals[j], &self.rays[i]);
                let mut zero = common;
                zero.insert(idx);
                new_rays.push(ray);
                new_zeros.push(zero);
            }
        }

        let mut rays = Vec::new();
        let mut zeros = Vec::new();
        for (k, v) in vals.iter().enumerate() {
            if v.is_negative() {
                continue;
            }
            let mut zero = std::mem::take(&mut self.zeros[k]);
            if v.is_zero() {
                zero.insert(idx);
            }
            rays.push(std::mem::take(&mut self.rays[k]));
            zeros.push(zero);
        }
        rays.extend(new_rays);
        zeros.extend(new_zeros);
        self.rays = rays;
        self.zeros = zeros;
    }

    /// Sorts rays lexicographically and puts lineality vectors in a sign-normal form.
    pub(crate) fn canonicalize(&mut self) {
        let mut paired: Vec<(IntVec, BitSet)> = std::mem::take(&mut self.rays)
            .into_iter()
            .zip(std::mem::take(&mut self.zeros))
            .collect();
        paired.sort_by(|a, b| a.0.cmp(&b.0));
        for (r, z) in paired {
            self.rays.push(r);
            self.zeros.push(z);
        }
        for l in &mut self.lineality {
            if l.iter()
                .find(|x| !x.is_zero())
                .is_some_and(|x| x.is_negative())
            {
                negate(l);
            }
        }
        self.lineality.sort();
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

fn negate(v: &mut [BigInt]) {
    for x in v {
        *x = -std::mem::take(x);
    }
}

/// `make_primitive(s * u - t * w)`.
fn combine(s: &BigInt, u: &[BigInt], t: &BigInt, w: &[BigInt]) -> IntVec {
    let mut out: IntVec = u.iter().zip(w).map(|(x, y)| s * x - t * y).collect();
    make_primitive(&mut out);
    out
}

/// Divides by the gcd of the entries; the sign is kept.
pub(crate) fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        *x = &*x / &g;
    }
}
