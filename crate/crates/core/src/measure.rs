//! The Keisler measure on the home sort: length on intervals, zero on small
//! sets, concentrated on `(0, 1)`.
//!
//! The reference model is archimedean, so the standard part map is the
//! identity and measures are exact model elements.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decomposition::{decompose, Endpoint};
use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, HomeTerm, Var};
use crate::model::{Assignment, ModelElement};
use crate::scalar::Scalar;

/// An exact value in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(bound = "", transparent)]
pub struct MeasureValue<S: Scalar> {
    pub value: ModelElement<S>,
}

impl<S: Scalar> MeasureValue<S> {
    pub fn to_decimal(&self, digits: usize) -> String {
        self.value.to_decimal(digits)
    }
}

impl<S: Scalar> fmt::Display for MeasureValue<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `μ({m : f(m)})`: the total length of the large pieces of the set
/// intersected with `(0, 1)`.
pub fn measure<S: Scalar>(f: &Formula<S>, v: Var, sigma: &Assignment<S>) -> Result<MeasureValue<S>> {
    if f.uses_prec() {
        return Err(Error::Mode("the measure is defined without the quotient order".into()));
    }
    let x = HomeTerm::var(v);
    let unit = Formula::and([
        Formula::Atom(Atom::lt(&HomeTerm::zero(), &x)),
        Formula::Atom(Atom::lt(&x, &HomeTerm::constant(ModelElement::one()))),
    ]);
    let d = decompose(&Formula::and([f.clone(), unit]), v, sigma)?;
    let mut total = ModelElement::zero();
    for piece in d.pieces.iter().filter(|p| p.is_large()) {
        match (&piece.a, &piece.b) {
            (Endpoint::Value(a), Endpoint::Value(b)) => total = &total + &(b - a),
            _ => return Err(Error::Internal("unbounded piece inside (0, 1)".into())),
        }
    }
    Ok(MeasureValue { value: total })
}

/// One parameter tuple with its measure and bucket.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BucketEntry<S: Scalar> {
    pub params: Assignment<S>,
    pub bucket: u64,
    pub measure: MeasureValue<S>,
}

/// Measures of a family of sets sorted into `k` buckets of width `1/k`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BucketReport<S: Scalar> {
    pub k: u64,
    pub entries: Vec<BucketEntry<S>>,
}

impl<S: Scalar> BucketReport<S> {
    /// Whether any two entries in the same bucket differ by at most `2/k`.
    pub fn within_bound(&self) -> bool {
        let bound = ModelElement::rational(S::from_i64(2) / S::from_i64(self.k as i64));
        self.entries.iter().all(|a| {
            self.entries
                .iter()
                .filter(|b| b.bucket == a.bucket)
                .all(|b| (&a.measure.value - &b.measure.value) <= bound && (&b.measure.value - &a.measure.value) <= bound)
        })
    }
}

/// The bucket `j ∈ 1..=k` with `μ ∈ [(j-1)/k, j/k]`; a value on a boundary
/// goes to the lower bucket.
pub fn bucket_of<S: Scalar>(mu: &ModelElement<S>, k: u64) -> u64 {
    let scaled = mu.scale(&S::from_i64(k as i64));
    let j = scaled.ceil();
    let j: u64 = j.try_into().unwrap_or(0);
    j.clamp(1, k)
}

pub fn bucket_partition<S: Scalar>(f: &Formula<S>, v: Var, params: &[Assignment<S>], k: u64) -> Result<BucketReport<S>> {
    if k == 0 {
        return Err(Error::Arity("bucket count must be positive".into()));
    }
    let mut entries = Vec::with_capacity(params.len());
    for sigma in params {
        let mu = measure(f, v, sigma)?;
        entries.push(BucketEntry { params: sigma.clone(), bucket: bucket_of(&mu.value, k), measure: mu });
    }
    Ok(BucketReport { k, entries })
}
