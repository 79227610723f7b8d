use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{ModelElement, QuotientElement};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Exactly the listed cosets.
    Finite,
    /// Every coset except the listed ones.
    Cofinite,
}

/// A finite or cofinite set of cosets of `Q`, i.e. of quotient elements.
/// Members are kept in `≺` order, which is lexicographic on coefficient
/// vectors.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CosetSet<S: Scalar> {
    pub polarity: Polarity,
    pub members: BTreeSet<QuotientElement<S>>,
}

impl<S: Scalar> CosetSet<S> {
    pub fn empty() -> Self {
        CosetSet { polarity: Polarity::Finite, members: BTreeSet::new() }
    }

    pub fn all() -> Self {
        CosetSet { polarity: Polarity::Cofinite, members: BTreeSet::new() }
    }

    pub fn single(c: QuotientElement<S>) -> Self {
        CosetSet { polarity: Polarity::Finite, members: BTreeSet::from([c]) }
    }

    pub fn is_empty(&self) -> bool {
        self.polarity == Polarity::Finite && self.members.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.polarity == Polarity::Cofinite && self.members.is_empty()
    }

    pub fn contains(&self, c: &QuotientElement<S>) -> bool {
        self.members.contains(c) == (self.polarity == Polarity::Finite)
    }

    pub fn complement(&self) -> Self {
        let polarity = match self.polarity {
            Polarity::Finite => Polarity::Cofinite,
            Polarity::Cofinite => Polarity::Finite,
        };
        CosetSet { polarity, members: self.members.clone() }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        use Polarity::*;
        let (polarity, members) = match (self.polarity, other.polarity) {
            (Finite, Finite) => (Finite, self.members.intersection(&other.members).cloned().collect()),
            (Finite, Cofinite) => (Finite, self.members.difference(&other.members).cloned().collect()),
            (Cofinite, Finite) => (Finite, other.members.difference(&self.members).cloned().collect()),
            (Cofinite, Cofinite) => (Cofinite, self.members.union(&other.members).cloned().collect()),
        };
        CosetSet { polarity, members }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.complement().intersect(&other.complement()).complement()
    }
}

/// A subset of the home sort in cell form: sorted breakpoints `b_1 < … < b_n`,
/// a coset set on each of the `n + 1` open cells between them, and a
/// membership bit for each breakpoint.
///
/// Cosets are dense, so the coset set of a cell is determined by the set
/// itself; after [`UnarySet::minimize`] the representation is canonical.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnarySet<S: Scalar> {
    pub(crate) breaks: Vec<ModelElement<S>>,
    pub(crate) cells: Vec<CosetSet<S>>,
    pub(crate) members: Vec<bool>,
}

impl<S: Scalar> UnarySet<S> {
    pub fn empty() -> Self {
        UnarySet { breaks: vec![], cells: vec![CosetSet::empty()], members: vec![] }
    }

    pub fn all() -> Self {
        UnarySet { breaks: vec![], cells: vec![CosetSet::all()], members: vec![] }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::all()
        } else {
            Self::empty()
        }
    }

    pub fn point(p: ModelElement<S>) -> Self {
        UnarySet { breaks: vec![p], cells: vec![CosetSet::empty(), CosetSet::empty()], members: vec![true] }
    }

    /// `(-∞, p)`.
    pub fn below(p: ModelElement<S>) -> Self {
        UnarySet { breaks: vec![p], cells: vec![CosetSet::all(), CosetSet::empty()], members: vec![false] }
    }

    /// `(p, ∞)`.
    pub fn above(p: ModelElement<S>) -> Self {
        UnarySet { breaks: vec![p], cells: vec![CosetSet::empty(), CosetSet::all()], members: vec![false] }
    }

    /// `π⁻¹(c)`.
    pub fn coset(c: QuotientElement<S>) -> Self {
        UnarySet { breaks: vec![], cells: vec![CosetSet::single(c)], members: vec![] }
    }

    pub fn breakpoints(&self) -> &[ModelElement<S>] {
        &self.breaks
    }

    pub fn cells(&self) -> &[CosetSet<S>] {
        &self.cells
    }

    pub fn breakpoint_members(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, x: &ModelElement<S>) -> bool {
        match self.breaks.binary_search(x) {
            Ok(i) => self.members[i],
            Err(i) => self.cells[i].contains(&x.project()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(CosetSet::is_empty) && self.members.iter().all(|m| !m)
    }

    pub fn complement(&self) -> Self {
        UnarySet {
            breaks: self.breaks.clone(),
            cells: self.cells.iter().map(CosetSet::complement).collect(),
            members: self.members.iter().map(|m| !m).collect(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip(other, CosetSet::intersect, |a, b| a && b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, CosetSet::union, |a, b| a || b)
    }

    /// Cell coset set and breakpoint membership of `self` over a refined
    /// breakpoint list containing all of `self.breaks`.
    fn refine(&self, breaks: &[ModelElement<S>]) -> (Vec<CosetSet<S>>, Vec<bool>) {
        let mut cells = Vec::with_capacity(breaks.len() + 1);
        let mut members = Vec::with_capacity(breaks.len());
        let mut i = 0; // index of the own cell currently covering
        cells.push(self.cells[0].clone());
        for b in breaks {
            if i < self.breaks.len() && self.breaks[i] == *b {
                members.push(self.members[i]);
                i += 1;
            } else {
                members.push(self.cells[i].contains(&b.project()));
            }
            cells.push(self.cells[i].clone());
        }
        (cells, members)
    }

    fn zip(
        &self,
        other: &Self,
        cell_op: impl Fn(&CosetSet<S>, &CosetSet<S>) -> CosetSet<S>,
        member_op: impl Fn(bool, bool) -> bool,
    ) -> Self {
        let mut breaks: Vec<ModelElement<S>> = self.breaks.iter().chain(&other.breaks).cloned().collect();
        breaks.sort();
        breaks.dedup();
        let (c1, m1) = self.refine(&breaks);
        let (c2, m2) = other.refine(&breaks);
        let mut out = UnarySet {
            breaks,
            cells: c1.iter().zip(&c2).map(|(a, b)| cell_op(a, b)).collect(),
            members: m1.into_iter().zip(m2).map(|(a, b)| member_op(a, b)).collect(),
        };
        out.minimize();
        out
    }

    /// Drops every breakpoint that separates nothing: equal cells on both
    /// sides and a membership bit that agrees with their coset pattern.
    pub fn minimize(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut cells = vec![self.cells[0].clone()];
        let mut members = Vec::with_capacity(self.members.len());
        for (i, b) in self.breaks.iter().enumerate() {
            let left = cells.last().unwrap();
            let right = &self.cells[i + 1];
            if left == right && left.contains(&b.project()) == self.members[i] {
                continue;
            }
            breaks.push(b.clone());
            members.push(self.members[i]);
            cells.push(right.clone());
        }
        self.breaks = breaks;
        self.cells = cells;
        self.members = members;
    }
}
