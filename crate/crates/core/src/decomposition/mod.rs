//! Canonical decomposition of unary definable sets into finitely many points
//! and disjoint near-intervals `(a, b) ∩ π⁻¹(C)` or `(a, b) ∖ π⁻¹(C)` with
//! `C` finite.

mod cells;

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use cells::{CosetSet, Polarity, UnarySet};

use crate::error::{Error, Result};
use crate::formula::{fresh_var, substitute, Atom, Formula, HomeTerm, QuotientTerm, Term, TheoryMode, Var};
use crate::model::{eval_home_term, eval_quotient_term, prec_cmp, Assignment, ModelElement, QuotientElement, Value};
use crate::qe::qe;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Endpoint<S: Scalar> {
    NegInf,
    Value(ModelElement<S>),
    PosInf,
}

impl<S: Scalar> Endpoint<S> {
    pub fn value(&self) -> Option<&ModelElement<S>> {
        match self {
            Endpoint::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl<S: Scalar> PartialOrd for Endpoint<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Endpoint<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        use Endpoint::*;
        match (self, other) {
            (Value(a), Value(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
        }
    }
}

impl<S: Scalar> fmt::Display for Endpoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::Value(v) => write!(f, "{v}"),
            Endpoint::PosInf => f.write_str("+inf"),
        }
    }
}

impl<S: Scalar> Serialize for Endpoint<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        match self {
            Endpoint::NegInf => serializer.serialize_str("-inf"),
            Endpoint::PosInf => serializer.serialize_str("+inf"),
            Endpoint::Value(v) => v.serialize(serializer),
        }
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Endpoint<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged, bound = "")]
        enum Raw<S: Scalar> {
            Inf(String),
            Value(ModelElement<S>),
        }
        match Raw::<S>::deserialize(deserializer)? {
            Raw::Inf(s) if s == "-inf" => Ok(Endpoint::NegInf),
            Raw::Inf(s) if s == "+inf" => Ok(Endpoint::PosInf),
            Raw::Inf(s) => Err(D::Error::custom(format!("bad endpoint {s:?}"))),
            Raw::Value(v) => Ok(Endpoint::Value(v)),
        }
    }
}

/// `(a, b) ∩ π⁻¹(C)` for a finite coset set, or `(a, b) ∖ π⁻¹(C)` for a
/// cofinite one. Finite pieces are small, cofinite pieces large.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NearInterval<S: Scalar> {
    pub a: Endpoint<S>,
    pub b: Endpoint<S>,
    pub polarity: Polarity,
    pub cosets: Vec<QuotientElement<S>>,
}

impl<S: Scalar> NearInterval<S> {
    pub fn coset_set(&self) -> CosetSet<S> {
        CosetSet { polarity: self.polarity, members: self.cosets.iter().cloned().collect() }
    }

    pub fn is_large(&self) -> bool {
        self.polarity == Polarity::Cofinite
    }

    pub fn interval_contains(&self, x: &ModelElement<S>) -> bool {
        let x = Endpoint::Value(x.clone());
        self.a < x && x < self.b
    }

    pub fn contains(&self, x: &ModelElement<S>) -> bool {
        self.interval_contains(x) && self.coset_set().contains(&x.project())
    }
}

/// A finite set of points together with pairwise disjoint near-intervals,
/// sorted left to right. Points are disjoint from the pieces.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Decomposition<S: Scalar> {
    pub points: Vec<ModelElement<S>>,
    pub pieces: Vec<NearInterval<S>>,
}

impl<S: Scalar> Decomposition<S> {
    pub fn empty() -> Self {
        Decomposition { points: vec![], pieces: vec![] }
    }

    pub fn contains(&self, x: &ModelElement<S>) -> bool {
        self.points.contains(x) || self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.pieces.is_empty()
    }

    /// The cell form of the denoted set.
    pub fn to_unary_set(&self) -> UnarySet<S> {
        let mut s = UnarySet::empty();
        for p in &self.points {
            s = s.union(&UnarySet::point(p.clone()));
        }
        for piece in &self.pieces {
            let mut part = UnarySet::all();
            if let Some(a) = piece.a.value() {
                part = part.intersect(&UnarySet::above(a.clone()));
            }
            if let Some(b) = piece.b.value() {
                part = part.intersect(&UnarySet::below(b.clone()));
            }
            let mut cosets = UnarySet::empty();
            for c in &piece.cosets {
                cosets = cosets.union(&UnarySet::coset(c.clone()));
            }
            if piece.polarity == Polarity::Cofinite {
                cosets = cosets.complement();
            }
            s = s.union(&part.intersect(&cosets));
        }
        s
    }

    /// Structural well-formedness: sorted points, sorted disjoint nonempty
    /// pieces, and no point inside a piece. A point may lie in a piece's
    /// interval when its coset is outside the piece's pattern.
    pub fn check_structure(&self) -> bool {
        let sorted_points = self.points.windows(2).all(|w| w[0] < w[1]);
        let pieces_ok = self.pieces.iter().all(|p| p.a < p.b && !(p.polarity == Polarity::Finite && p.cosets.is_empty()));
        let disjoint = self.pieces.windows(2).all(|w| w[0].b <= w[1].a);
        let cosets_sorted = self.pieces.iter().all(|p| p.cosets.windows(2).all(|w| prec_cmp(&w[0], &w[1]).is_lt()));
        let points_outside = self.points.iter().all(|x| self.pieces.iter().all(|p| !p.contains(x)));
        sorted_points && pieces_ok && disjoint && cosets_sorted && points_outside
    }
}

impl<S: Scalar> From<&UnarySet<S>> for Decomposition<S> {
    /// Maximal runs of equal cells become pieces. In minimized form two
    /// equal neighbouring cells are separated either by a member outside the
    /// coset pattern (a point; the piece continues across it) or by a
    /// non-member inside the pattern (the piece must stop there).
    fn from(u: &UnarySet<S>) -> Self {
        let n = u.breaks.len();
        let mut d = Decomposition::empty();
        let mut start = Endpoint::NegInf;
        for i in 0..=n {
            let cell = &u.cells[i];
            let continues = i < n && u.cells[i + 1] == *cell && u.members[i];
            if continues {
                continue;
            }
            let end = if i == n { Endpoint::PosInf } else { Endpoint::Value(u.breaks[i].clone()) };
            if !cell.is_empty() {
                d.pieces.push(NearInterval {
                    a: start,
                    b: end.clone(),
                    polarity: cell.polarity,
                    cosets: cell.members.iter().cloned().collect(),
                });
            }
            start = end;
        }
        d.points = u.breaks.iter().zip(&u.members).filter(|(_, m)| **m).map(|(b, _)| b.clone()).collect();
        d
    }
}

impl<S: Scalar> fmt::Display for NearInterval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cosets: Vec<String> = self.cosets.iter().map(|c| c.to_string()).collect();
        let rel = match self.polarity {
            Polarity::Finite => "in",
            Polarity::Cofinite => "not in",
        };
        write!(f, "({}, {}) with pi {rel} {{{}}}", self.a, self.b, cosets.join(", "))
    }
}

impl<S: Scalar> fmt::Display for Decomposition<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.points.iter().map(|p| format!("{{{p}}}")).collect();
        parts.extend(self.pieces.iter().map(NearInterval::to_string));
        if parts.is_empty() {
            f.write_str("empty")
        } else {
            f.write_str(&parts.join(" U "))
        }
    }
}

fn unbound_error(v: &Var, others: Vec<Var>) -> Error {
    let names: Vec<String> = others.iter().map(Var::to_string).collect();
    Error::Arity(format!("expected {v} as the only free variable, also found {}", names.join(", ")))
}

/// Grounds every free variable other than `v` with its value in `sigma` and
/// eliminates quantifiers, leaving a quantifier-free formula in `v` alone.
pub(crate) fn ground_unary<S: Scalar>(f: &Formula<S>, v: Var, sigma: &Assignment<S>) -> Result<Formula<S>> {
    let mut g = f.clone();
    for w in f.free_vars() {
        if w == v {
            continue;
        }
        let t = match sigma.get(&w) {
            Some(Value::Home(e)) => Term::Home(HomeTerm::constant(e.clone())),
            Some(Value::Quotient(e)) => Term::Quotient(QuotientTerm::constant(e.clone())),
            None => continue,
        };
        g = substitute(&g, w, &t)?;
    }
    let unbound: Vec<Var> = g.free_vars().into_iter().filter(|w| *w != v).collect();
    if !unbound.is_empty() {
        return Err(unbound_error(&v, unbound));
    }
    let mode = if g.uses_prec() { TheoryMode::PovsPrec } else { TheoryMode::Povs };
    qe(&g, mode)
}

/// The subset of the home sort defined by a quantifier-free formula whose
/// only variable is `v`.
pub fn unary_set<S: Scalar>(f: &Formula<S>, v: Var) -> Result<UnarySet<S>> {
    Ok(match f {
        Formula::True => UnarySet::all(),
        Formula::False => UnarySet::empty(),
        Formula::Atom(a) => atom_set(a, v)?,
        Formula::Not(g) => unary_set(g, v)?.complement(),
        Formula::And(gs) => {
            let mut acc = UnarySet::all();
            for g in gs {
                acc = acc.intersect(&unary_set(g, v)?);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Formula::Or(gs) => {
            let mut acc = UnarySet::empty();
            for g in gs {
                acc = acc.union(&unary_set(g, v)?);
            }
            acc
        }
        Formula::Exists(..) | Formula::Forall(..) => return Err(Error::QuantifiedInput),
    })
}

fn atom_set<S: Scalar>(a: &Atom<S>, v: Var) -> Result<UnarySet<S>> {
    let empty = Assignment::new();
    let not_ground = |e: Error| match e {
        Error::UnboundVariable(w) => Error::NotGround(w),
        other => other,
    };
    if !a.mentions(&v) {
        return Ok(UnarySet::from_bool(crate::model::eval_atom(a, &empty).map_err(not_ground)?));
    }
    Ok(match a {
        Atom::HomeEq(t) | Atom::HomeLt(t) | Atom::InQ(t) => {
            let (c, rest) = t.split_off(&v);
            let p = eval_home_term(&rest, &empty).map_err(not_ground)?.scale(&(-S::one() / c.clone()));
            match a {
                Atom::HomeEq(_) => UnarySet::point(p),
                Atom::HomeLt(_) if c.is_positive() => UnarySet::below(p),
                Atom::HomeLt(_) => UnarySet::above(p),
                _ => UnarySet::coset(p.project()),
            }
        }
        Atom::QuotEq(s) => {
            let (c, rest) = s.split_off(&v);
            let p = eval_quotient_term(&rest, &empty).map_err(not_ground)?.scale(&(-S::one() / c));
            UnarySet::coset(p)
        }
        Atom::QuotPrec(_) => return Err(Error::Mode("decomposition does not support prec constraints on the decomposed variable".into())),
    })
}

/// The canonical decomposition of `{m : f(m)}` where `v` is the only free
/// variable of `f` left unbound by `sigma`.
pub fn decompose<S: Scalar>(f: &Formula<S>, v: Var, sigma: &Assignment<S>) -> Result<Decomposition<S>> {
    if !v.is_home() {
        return Err(Error::Sort(format!("{v} is not a home variable")));
    }
    let g = ground_unary(f, v, sigma)?;
    Ok(Decomposition::from(&unary_set(&g, v)?))
}

/// Splits `d` into its near-interior (the pieces) and its near-frontier
/// (the isolated points). In canonical form every listed point is a place
/// where the set is not locally a near-interval.
pub fn near_interior<S: Scalar>(d: &Decomposition<S>) -> (Decomposition<S>, Vec<ModelElement<S>>) {
    (Decomposition { points: vec![], pieces: d.pieces.clone() }, d.points.clone())
}

/// Small sets are those covered by finitely many cosets of `Q` and finitely
/// many points.
pub fn is_small<S: Scalar>(d: &Decomposition<S>) -> bool {
    d.pieces.iter().all(|p| p.polarity == Polarity::Finite)
}

/// Whether the generic type of the quotient sort contains `f(v)`, that is,
/// whether the pullback `{x : f(π(x))}` is large.
pub fn generic_type_contains<S: Scalar>(f: &Formula<S>, v: Var, sigma: &Assignment<S>) -> Result<bool> {
    if v.is_home() {
        return Err(Error::Sort(format!("{v} is not a quotient variable")));
    }
    if f.uses_prec() {
        return Err(Error::Mode("the generic type lives in the unordered quotient".into()));
    }
    let mut used = f.all_vars();
    used.extend(sigma.vars().copied());
    let x = fresh_var(Var::home(0), &used);
    let pullback = substitute(f, v, &Term::Quotient(QuotientTerm::pi(&HomeTerm::var(x))))?;
    let mut sigma = sigma.clone();
    sigma.remove(&v);
    Ok(!is_small(&decompose(&pullback, x, &sigma)?))
}
