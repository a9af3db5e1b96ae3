//! Weight algebra.
//!
//! Arc weights are sparse feature vectors ([`FeatureWeight`]) in the tropical
//! sparse-tuple semiring. Features stay separated (NMT score, Hiero score and
//! the three edit counters) until they are compared, at which point they are
//! scalarized with a [`ParamVector`] into an ordinary [`TropicalWeight`].
//!
//! The parameter vector is supplied per operation and never stored inside a
//! weight, so the same machine can be searched under several settings.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Index into a feature vector.
pub type FeatureId = u32;

/// Reserved feature ids.
pub mod feature {
    use super::FeatureId;

    pub const NMT_SCORE: FeatureId = 0;
    pub const HIERO_SCORE: FeatureId = 1;
    /// Type III edits: every edit that is not a UNK substitution.
    pub const EDIT_COUNT: FeatureId = 2;
    /// Type II edits: UNK replaced by an in-vocabulary word.
    pub const SUB_COUNT: FeatureId = 3;
    /// Extra UNK tokens produced by the UNK-insertion transducer.
    pub const UNK_EXT_COUNT: FeatureId = 4;

    pub const COUNT: usize = 5;

    pub fn name(id: FeatureId) -> Option<&'static str> {
        Some(match id {
            NMT_SCORE => "nmt_score",
            HIERO_SCORE => "hiero_score",
            EDIT_COUNT => "edit_count",
            SUB_COUNT => "sub_count",
            UNK_EXT_COUNT => "unk_ext_count",
            _ => return None,
        })
    }
}

/// Entries with magnitude below this are dropped during canonicalization.
pub const CANONICAL_EPSILON: f64 = 1e-15;

/// Scalar tropical weight: `⊕ = min`, `⊗ = +`, zero is `+∞`, one is `0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct TropicalWeight(pub f64);

impl TropicalWeight {
    pub const ZERO: TropicalWeight = TropicalWeight(f64::INFINITY);
    pub const ONE: TropicalWeight = TropicalWeight(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn plus(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn times(self, other: Self) -> Self {
        TropicalWeight(self.0 + other.0)
    }
}

impl fmt::Display for TropicalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("INF")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Per-feature multipliers used to scalarize a [`FeatureWeight`].
///
/// Features without an explicit multiplier contribute nothing.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    /// Build from the five reserved multipliers.
    pub fn new(nmt: f64, hiero: f64, edit: f64, sub: f64, ins: f64) -> Self {
        ParamVector {
            values: vec![nmt, hiero, edit, sub, ins],
        }
    }

    /// Every reserved feature weighted by `value`.
    pub fn uniform(value: f64) -> Self {
        ParamVector {
            values: vec![value; feature::COUNT],
        }
    }

    pub fn get(&self, id: FeatureId) -> f64 {
        self.values.get(id as usize).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, id: FeatureId, value: f64) {
        let idx = id as usize;
        if idx >= self.values.len() {
            self.values.resize(idx + 1, 0.0);
        }
        self.values[idx] = value;
    }

    pub fn with(mut self, id: FeatureId, value: f64) -> Self {
        self.set(id, value);
        self
    }

    /// Multiply every entry by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ParamVector {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0)
    }
}

/// Sparse feature vector weight.
///
/// The canonical form keeps entries sorted by id with no (near-)zero values.
/// The empty vector is the semiring one; a separate flag marks the semiring
/// zero (an impossible path).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FeatureWeight {
    entries: Vec<(FeatureId, f64)>,
    infinite: bool,
}

impl FeatureWeight {
    pub fn zero() -> Self {
        FeatureWeight {
            entries: Vec::new(),
            infinite: true,
        }
    }

    pub fn one() -> Self {
        FeatureWeight::default()
    }

    pub fn single(id: FeatureId, value: f64) -> Self {
        Self::from_pairs([(id, value)])
    }

    /// Build a canonical weight; repeated ids are summed.
    pub fn from_pairs<I: IntoIterator<Item = (FeatureId, f64)>>(pairs: I) -> Self {
        let mut entries: Vec<(FeatureId, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|&(id, _)| id);
        let mut merged: Vec<(FeatureId, f64)> = Vec::with_capacity(entries.len());
        for (id, v) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == id => *acc += v,
                _ => merged.push((id, v)),
            }
        }
        merged.retain(|&(_, v)| v.abs() >= CANONICAL_EPSILON);
        FeatureWeight {
            entries: merged,
            infinite: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.infinite
    }

    pub fn is_one(&self) -> bool {
        !self.infinite && self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(FeatureId, f64)] {
        &self.entries
    }

    /// Value of feature `id`; absent ids read as `0.0`.
    pub fn get(&self, id: FeatureId) -> f64 {
        self.entries
            .binary_search_by_key(&id, |&(i, _)| i)
            .map(|idx| self.entries[idx].1)
            .unwrap_or(0.0)
    }

    /// `⊗`: componentwise sum.
    pub fn times(&self, other: &Self) -> Self {
        if self.infinite || other.infinite {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&(ia, va)), Some(&(ib, vb))) => match ia.cmp(&ib) {
                    Ordering::Less => {
                        i += 1;
                        (ia, va)
                    }
                    Ordering::Greater => {
                        j += 1;
                        (ib, vb)
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (ia, va + vb)
                    }
                },
                (Some(&e), None) => {
                    i += 1;
                    e
                }
                (None, Some(&e)) => {
                    j += 1;
                    e
                }
                (None, None) => unreachable!(),
            };
            if next.1.abs() >= CANONICAL_EPSILON {
                out.push(next);
            }
        }
        FeatureWeight {
            entries: out,
            infinite: false,
        }
    }

    /// `⊕`: the operand that is smaller under [`FeatureWeight::compare`].
    pub fn plus(&self, other: &Self, params: &ParamVector) -> Self {
        if self.compare(other, params) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Inner product with `params`; the semiring zero maps to `+∞`.
    pub fn scalarize(&self, params: &ParamVector) -> TropicalWeight {
        if self.infinite {
            return TropicalWeight::ZERO;
        }
        TropicalWeight(self.entries.iter().map(|&(id, v)| params.get(id) * v).sum())
    }

    /// Total order used by `⊕`: scalarized cost first, then [`tie_order`].
    pub fn compare(&self, other: &Self, params: &ParamVector) -> Ordering {
        match (self.infinite, other.infinite) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
        let a = self.scalarize(params).0;
        let b = other.scalarize(params).0;
        a.total_cmp(&b).then_with(|| tie_order(self, other))
    }

    /// Multiply feature `id` by `factor`.
    pub fn scale_feature(&self, id: FeatureId, factor: f64) -> Self {
        if self.infinite {
            return self.clone();
        }
        Self::from_pairs(
            self.entries
                .iter()
                .map(|&(i, v)| if i == id { (i, v * factor) } else { (i, v) }),
        )
    }

    /// Componentwise equality up to `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.infinite || other.infinite {
            return self.infinite == other.infinite;
        }
        let ids = self.entries.iter().chain(other.entries.iter()).map(|&(id, _)| id);
        ids.into_iter().all(|id| (self.get(id) - other.get(id)).abs() <= tol)
    }
}

/// Deterministic tie rule between equally-scored finite weights.
///
/// Walks feature ids in ascending order, treating absent ids as `0.0`, and
/// orders by the first differing value. Working on the dense extension
/// (rather than on raw `(id, value)` tuples) keeps the rule compatible
/// with `⊗`, so distributivity survives ties.
pub fn tie_order(a: &FeatureWeight, b: &FeatureWeight) -> Ordering {
    let (x, y) = (&a.entries, &b.entries);
    let (mut i, mut j) = (0, 0);
    loop {
        let (va, vb) = match (x.get(i), y.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(&(ia, va)), Some(&(ib, vb))) => match ia.cmp(&ib) {
                Ordering::Less => {
                    i += 1;
                    (va, 0.0)
                }
                Ordering::Greater => {
                    j += 1;
                    (0.0, vb)
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (va, vb)
                }
            },
            (Some(&(_, va)), None) => {
                i += 1;
                (va, 0.0)
            }
            (None, Some(&(_, vb))) => {
                j += 1;
                (0.0, vb)
            }
        };
        match va.total_cmp(&vb) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
}

impl fmt::Display for FeatureWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.infinite {
            return f.write_str("INF");
        }
        for (k, (id, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}:{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("malformed weight {text:?}: {reason}")]
pub struct ParseWeightError {
    pub text: String,
    pub reason: String,
}

impl FromStr for FeatureWeight {
    type Err = ParseWeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ParseWeightError {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::one());
        }
        if s == "INF" {
            return Ok(Self::zero());
        }
        let mut pairs = Vec::new();
        let mut last: Option<FeatureId> = None;
        for item in s.split(',') {
            let (id, value) = item.split_once(':').ok_or_else(|| err("expected id:value"))?;
            let id: FeatureId = id.trim().parse().map_err(|_| err("bad feature id"))?;
            let value: f64 = value.trim().parse().map_err(|_| err("bad feature value"))?;
            if !value.is_finite() {
                return Err(err("feature values must be finite"));
            }
            if last.is_some_and(|l| l >= id) {
                return Err(err("feature ids must be strictly increasing"));
            }
            last = Some(id);
            pairs.push((id, value));
        }
        Ok(Self::from_pairs(pairs))
    }
}
