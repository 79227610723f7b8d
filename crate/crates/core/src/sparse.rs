use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Neg, Sub};

use crate::scalar::Scalar;

/// Finitely supported map `K -> S` with zero entries never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SparseVec<K: Ord, S> {
    entries: BTreeMap<K, S>,
}

impl<K: Ord, S> Default for SparseVec<K, S> {
    fn default() -> Self {
        SparseVec { entries: BTreeMap::new() }
    }
}

impl<K: Ord + Clone + Debug, S: Scalar> SparseVec<K, S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(key: K, value: S) -> Self {
        let mut v = Self::new();
        v.add_at(key, value);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &K) -> Option<&S> {
        self.entries.get(key)
    }

    pub fn coefficient(&self, key: &K) -> S {
        self.entries.get(key).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &S)> + '_ {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> + '_ {
        self.entries.keys()
    }

    pub fn first(&self) -> Option<(&K, &S)> {
        self.entries.iter().next()
    }

    pub fn add_at(&mut self, key: K, value: S) {
        if value.is_zero() {
            return;
        }
        let sum = match self.entries.remove(&key) {
            Some(old) => old + value,
            None => value,
        };
        if !sum.is_zero() {
            self.entries.insert(key, sum);
        }
    }

    pub fn remove(&mut self, key: &K) -> Option<S> {
        self.entries.remove(key)
    }

    pub fn scale(&self, factor: &S) -> Self {
        if factor.is_zero() {
            return Self::new();
        }
        SparseVec { entries: self.entries.iter().map(|(k, v)| (k.clone(), v.clone() * factor.clone())).collect() }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        for (k, v) in other.iter() {
            self.add_at(k.clone(), v.clone() * factor.clone());
        }
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&K) -> bool) {
        self.entries.retain(|k, _| keep(k));
    }

    /// Lexicographic sign: the sign of the entry with the least key.
    pub fn leading_sign(&self) -> std::cmp::Ordering {
        match self.first() {
            None => std::cmp::Ordering::Equal,
            Some((_, v)) if v.is_positive() => std::cmp::Ordering::Greater,
            Some(_) => std::cmp::Ordering::Less,
        }
    }
}

impl<K: Ord + Clone + Debug, S: Scalar> FromIterator<(K, S)> for SparseVec<K, S> {
    fn from_iter<I: IntoIterator<Item = (K, S)>>(iter: I) -> Self {
        let mut v = Self::new();
        for (k, s) in iter {
            v.add_at(k, s);
        }
        v
    }
}

impl<K: Ord + Clone + Debug, S: Scalar> Add for &SparseVec<K, S> {
    type Output = SparseVec<K, S>;
    fn add(self, rhs: Self) -> SparseVec<K, S> {
        let mut out = self.clone();
        out.add_scaled(rhs, &S::one());
        out
    }
}

impl<K: Ord + Clone + Debug, S: Scalar> Sub for &SparseVec<K, S> {
    type Output = SparseVec<K, S>;
    fn sub(self, rhs: Self) -> SparseVec<K, S> {
        let mut out = self.clone();
        out.add_scaled(rhs, &-S::one());
        out
    }
}

impl<K: Ord + Clone + Debug, S: Scalar> Neg for &SparseVec<K, S> {
    type Output = SparseVec<K, S>;
    fn neg(self) -> SparseVec<K, S> {
        self.scale(&-S::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        Scalar::from_i64(n)
    }

    #[test]
    fn zero_entries_vanish() {
        let mut v: SparseVec<u32, BigRational> = SparseVec::unit(3, q(2));
        v.add_at(3, q(-2));
        assert!(v.is_zero());
        v.add_at(1, q(0));
        assert!(v.is_zero());
    }

    #[test]
    fn leading_sign_uses_least_key() {
        let v: SparseVec<u32, BigRational> = [(5, q(7)), (2, q(-1))].into_iter().collect();
        assert_eq!(v.leading_sign(), std::cmp::Ordering::Less);
        assert_eq!((&v - &v).leading_sign(), std::cmp::Ordering::Equal);
    }
}
