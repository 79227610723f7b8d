//! The computable reference model: exact evaluation of formulas and direct
//! witness-construction oracles for a single existential quantifier.

mod element;

use std::collections::BTreeMap;

pub(crate) use element::{basis_name, write_signed_sum};
pub use element::{compare, first_primes, is_prime, prec_cmp, rationals_between, ModelElement, QuotientElement, UNIT};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, HomeTerm, Literal, QuotientTerm, Sort, Var};
use crate::scalar::Scalar;

/// A value of either sort.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value<S: Scalar> {
    Home(ModelElement<S>),
    Quotient(QuotientElement<S>),
}

impl<S: Scalar> Value<S> {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Home(_) => Sort::Home,
            Value::Quotient(_) => Sort::Quotient,
        }
    }
}

/// Sort-respecting values for variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Assignment<S: Scalar> {
    values: BTreeMap<Var, Value<S>>,
}

impl<S: Scalar> Default for Assignment<S> {
    fn default() -> Self {
        Assignment::new()
    }
}

impl<S: Scalar> Assignment<S> {
    pub fn new() -> Self {
        Assignment { values: BTreeMap::new() }
    }

    pub fn insert(&mut self, v: Var, value: Value<S>) -> Result<()> {
        if v.sort != value.sort() {
            return Err(Error::Sort(format!("{v} cannot take a value of the other sort")));
        }
        self.values.insert(v, value);
        Ok(())
    }

    /// Builder form of [`Assignment::insert`] for a home variable.
    ///
    /// # Panics
    /// If `v` is not home-sorted.
    pub fn with_home(mut self, v: Var, e: ModelElement<S>) -> Self {
        self.insert(v, Value::Home(e)).expect("home variable");
        self
    }

    /// # Panics
    /// If `v` is not quotient-sorted.
    pub fn with_quotient(mut self, v: Var, e: QuotientElement<S>) -> Self {
        self.insert(v, Value::Quotient(e)).expect("quotient variable");
        self
    }

    pub fn remove(&mut self, v: &Var) -> Option<Value<S>> {
        self.values.remove(v)
    }

    pub fn get(&self, v: &Var) -> Option<&Value<S>> {
        self.values.get(v)
    }

    pub fn home(&self, v: &Var) -> Option<&ModelElement<S>> {
        match self.values.get(v) {
            Some(Value::Home(e)) => Some(e),
            _ => None,
        }
    }

    pub fn quotient(&self, v: &Var) -> Option<&QuotientElement<S>> {
        match self.values.get(v) {
            Some(Value::Quotient(e)) => Some(e),
            _ => None,
        }
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.values.contains_key(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> + '_ {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Value<S>)> + '_ {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Scalar> FromIterator<(Var, Value<S>)> for Assignment<S> {
    /// # Panics
    /// On a sort mismatch.
    fn from_iter<I: IntoIterator<Item = (Var, Value<S>)>>(iter: I) -> Self {
        let mut a = Assignment::new();
        for (v, val) in iter {
            a.insert(v, val).expect("sort-respecting assignment");
        }
        a
    }
}

// JSON form: {"x1": melem, "u1": qelem}.
impl<S: Scalar> serde::Serialize for Assignment<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (v, val) in &self.values {
            match val {
                Value::Home(e) => map.serialize_entry(&v.to_string(), e)?,
                Value::Quotient(e) => map.serialize_entry(&v.to_string(), e)?,
            }
        }
        map.end()
    }
}

impl<'de, S: Scalar> serde::Deserialize<'de> for Assignment<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor<S>(std::marker::PhantomData<S>);

        impl<'de, S: Scalar> serde::de::Visitor<'de> for Visitor<S> {
            type Value = Assignment<S>;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a map from variables to elements")
            }

            fn visit_map<A: serde::de::MapAccess<'de>>(self, mut map: A) -> std::result::Result<Assignment<S>, A::Error> {
                let mut out = Assignment::new();
                while let Some(v) = map.next_key::<Var>()? {
                    let value = if v.is_home() { Value::Home(map.next_value()?) } else { Value::Quotient(map.next_value()?) };
                    out.values.insert(v, value);
                }
                Ok(out)
            }
        }

        deserializer.deserialize_map(Visitor(std::marker::PhantomData))
    }
}

pub fn eval_home_term<S: Scalar>(t: &HomeTerm<S>, sigma: &Assignment<S>) -> Result<ModelElement<S>> {
    let mut acc = t.constant_part().clone();
    for (v, c) in t.linear().iter() {
        let e = sigma.home(v).ok_or(Error::UnboundVariable(*v))?;
        acc.add_scaled(e, c);
    }
    Ok(acc)
}

pub fn eval_quotient_term<S: Scalar>(s: &QuotientTerm<S>, sigma: &Assignment<S>) -> Result<QuotientElement<S>> {
    let mut acc = s.constant_part().clone();
    for (v, c) in s.linear().iter() {
        let e = sigma.quotient(v).ok_or(Error::UnboundVariable(*v))?;
        acc.add_scaled(e, c);
    }
    for (v, c) in s.pushed().iter() {
        let e = sigma.home(v).ok_or(Error::UnboundVariable(*v))?;
        acc.add_scaled(&e.project(), c);
    }
    Ok(acc)
}

pub fn eval_atom<S: Scalar>(a: &Atom<S>, sigma: &Assignment<S>) -> Result<bool> {
    Ok(match a {
        Atom::HomeEq(t) => eval_home_term(t, sigma)?.is_zero(),
        Atom::HomeLt(t) => eval_home_term(t, sigma)?.is_negative(),
        Atom::InQ(t) => eval_home_term(t, sigma)?.is_rational(),
        Atom::QuotEq(s) => eval_quotient_term(s, sigma)?.is_zero(),
        Atom::QuotPrec(s) => prec_cmp(&eval_quotient_term(s, sigma)?, &QuotientElement::zero()).is_lt(),
    })
}

pub fn eval_literal<S: Scalar>(l: &Literal<S>, sigma: &Assignment<S>) -> Result<bool> {
    Ok(eval_atom(&l.atom, sigma)? == l.positive)
}

/// Truth of a quantifier-free formula under `sigma`.
pub fn eval<S: Scalar>(f: &Formula<S>, sigma: &Assignment<S>) -> Result<bool> {
    if !f.is_quantifier_free() {
        return Err(Error::QuantifiedInput);
    }
    eval_qf(f, sigma)
}

fn eval_qf<S: Scalar>(f: &Formula<S>, sigma: &Assignment<S>) -> Result<bool> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => eval_atom(a, sigma)?,
        Formula::Not(g) => !eval_qf(g, sigma)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_qf(g, sigma)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_qf(g, sigma)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Exists(..) | Formula::Forall(..) => return Err(Error::QuantifiedInput),
    })
}

fn not_ground(e: Error) -> Error {
    match e {
        Error::UnboundVariable(v) => Error::NotGround(v),
        other => other,
    }
}

fn from_big<S: Scalar>(q: &BigRational) -> Result<S> {
    S::from_big_rational(q).ok_or(Error::Overflow)
}

/// A bound `x ⋈ value` with `closed` telling `≤`/`≥` from `<`/`>`.
#[derive(Clone, Debug)]
struct Bound<T> {
    value: T,
    closed: bool,
}

/// Tightens `slot` to the bound `b`; `upper` selects min instead of max.
fn tighten<T: Ord + Clone>(slot: &mut Option<Bound<T>>, b: Bound<T>, upper: bool) {
    let replace = match slot {
        None => true,
        Some(cur) => {
            let ord = b.value.cmp(&cur.value);
            let ord = if upper { ord.reverse() } else { ord };
            ord.is_gt() || (ord.is_eq() && !b.closed)
        }
    };
    if replace {
        *slot = Some(b);
    }
}

/// The reference model `M_d`: the `Q`-span of `1` and the square roots of the
/// first `d - 1` primes, with `Q` the rational line.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Model {
    dim: usize,
    primes: Vec<u32>,
}

impl Default for Model {
    fn default() -> Self {
        Model::new(3)
    }
}

impl Model {
    /// # Panics
    /// If `dim < 2`; the distinguished subspace must be proper.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2, "model dimension must be at least 2");
        Model { dim, primes: first_primes(dim - 1) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Radicands of the irrational basis elements.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn eval<S: Scalar>(&self, f: &Formula<S>, sigma: &Assignment<S>) -> Result<bool> {
        eval(f, sigma)
    }

    /// Decides `∃v ⋀literals` for a home variable `v` by building a witness.
    ///
    /// Every literal is first reduced to a condition on `v` alone: a point
    /// equation, an order bound, a coset condition `π(v) = c` or `π(v) ≠ c`,
    /// or a `≺`-bound on `π(v)`. Cosets are dense, so a witness is a rational
    /// translate of a chosen coset representative inside the interval.
    pub fn oracle_exists_home<S: Scalar>(
        &self,
        literals: &[Literal<S>],
        v: Var,
        sigma: &Assignment<S>,
    ) -> Result<(bool, Option<ModelElement<S>>)> {
        if !v.is_home() {
            return Err(Error::Sort(format!("{v} is not a home variable")));
        }
        let mut sigma = sigma.clone();
        sigma.remove(&v);

        let mut points = Vec::new();
        let mut avoid_points = Vec::new();
        let mut lower: Option<Bound<ModelElement<S>>> = None;
        let mut upper: Option<Bound<ModelElement<S>>> = None;
        let mut required: Vec<QuotientElement<S>> = Vec::new();
        let mut excluded: Vec<QuotientElement<S>> = Vec::new();
        let mut q_lower: Option<Bound<QuotientElement<S>>> = None;
        let mut q_upper: Option<Bound<QuotientElement<S>>> = None;

        for lit in literals {
            match &lit.atom {
                Atom::HomeEq(t) | Atom::HomeLt(t) | Atom::InQ(t) => {
                    let (a, rest) = t.split_off(&v);
                    let c = eval_home_term(&rest, &sigma).map_err(not_ground)?;
                    if a.is_zero() {
                        if eval_literal(lit, &sigma).map_err(not_ground)? {
                            continue;
                        }
                        return Ok((false, None));
                    }
                    // a·v + c ⋈ 0  with  v ⋈' p := -c/a
                    let p = c.scale(&(-S::one() / a.clone()));
                    match (&lit.atom, lit.positive) {
                        (Atom::HomeEq(_), true) => points.push(p),
                        (Atom::HomeEq(_), false) => avoid_points.push(p),
                        (Atom::HomeLt(_), pos) => {
                            // positive: a·v < -c ; negative: a·v ≥ -c
                            let below = a.is_positive() == pos;
                            let b = Bound { value: p, closed: !pos };
                            if below {
                                tighten(&mut upper, b, true);
                            } else {
                                tighten(&mut lower, b, false);
                            }
                        }
                        (Atom::InQ(_), pos) => {
                            if pos {
                                required.push(p.project());
                            } else {
                                excluded.push(p.project());
                            }
                        }
                        _ => unreachable!(),
                    }
                }
                Atom::QuotEq(s) | Atom::QuotPrec(s) => {
                    let b = s.pushed().get(&v).cloned().unwrap_or_else(S::zero);
                    let rest = QuotientTerm::from_parts(
                        s.linear().clone(),
                        {
                            let mut p = s.pushed().clone();
                            p.remove(&v);
                            p
                        },
                        s.constant_part().clone(),
                    );
                    let d = eval_quotient_term(&rest, &sigma).map_err(not_ground)?;
                    if b.is_zero() {
                        if eval_literal(lit, &sigma).map_err(not_ground)? {
                            continue;
                        }
                        return Ok((false, None));
                    }
                    let p = d.scale(&(-S::one() / b.clone()));
                    match (&lit.atom, lit.positive) {
                        (Atom::QuotEq(_), true) => required.push(p),
                        (Atom::QuotEq(_), false) => excluded.push(p),
                        (Atom::QuotPrec(_), pos) => {
                            let below = b.is_positive() == pos;
                            let bd = Bound { value: p, closed: !pos };
                            if below {
                                tighten(&mut q_upper, bd, true);
                            } else {
                                tighten(&mut q_lower, bd, false);
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }

        let check = |cand: &ModelElement<S>| -> Result<bool> {
            let s = sigma.clone().with_home(v, cand.clone());
            for lit in literals {
                if !eval_literal(lit, &s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };

        if let Some(p) = points.first() {
            return Ok(if check(p)? { (true, Some(p.clone())) } else { (false, None) });
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            match l.value.cmp(&u.value) {
                std::cmp::Ordering::Greater => return Ok((false, None)),
                std::cmp::Ordering::Equal => {
                    return Ok(if l.closed && u.closed && check(&l.value)? { (true, Some(l.value.clone())) } else { (false, None) })
                }
                std::cmp::Ordering::Less => {}
            }
        }

        // coset of the witness
        let coset = match required.split_first() {
            Some((r, others)) => {
                if others.iter().any(|o| o != r) || excluded.contains(r) {
                    return Ok((false, None));
                }
                if !quotient_within(r, &q_lower, &q_upper) {
                    return Ok((false, None));
                }
                r.clone()
            }
            None => {
                let pinned = match (&q_lower, &q_upper) {
                    (Some(l), Some(u)) if l.value >= u.value => {
                        if l.value == u.value && l.closed && u.closed && !excluded.contains(&l.value) {
                            Some(l.value.clone())
                        } else {
                            return Ok((false, None));
                        }
                    }
                    _ => None,
                };
                match pinned {
                    Some(c) => c,
                    None => self
                        .first_free_candidate(&q_lower, &q_upper, &excluded)?
                        .ok_or_else(|| Error::Internal("no coset candidate".into()))?,
                }
            }
        };

        // a rational translate of the coset section inside (lower, upper)
        let section = coset.section();
        let shift = |b: &Option<Bound<ModelElement<S>>>| b.as_ref().map(|b| &b.value - &section);
        let (lo, hi) = (shift(&lower), shift(&upper));
        for q in rationals_between(lo.as_ref(), hi.as_ref(), avoid_points.len() + 1) {
            let cand = &section + &ModelElement::rational(from_big(&q)?);
            if check(&cand)? {
                return Ok((true, Some(cand)));
            }
        }
        Err(Error::Internal("home oracle failed to realize a consistent constraint set".into()))
    }

    /// Decides `∃v ⋀literals` for a quotient variable `v`. With `ordered`,
    /// `≺`-literals on `v` are honoured as bounds in a dense order without
    /// endpoints; otherwise they are rejected.
    pub fn oracle_exists_quotient<S: Scalar>(
        &self,
        literals: &[Literal<S>],
        v: Var,
        sigma: &Assignment<S>,
        ordered: bool,
    ) -> Result<(bool, Option<QuotientElement<S>>)> {
        if v.is_home() {
            return Err(Error::Sort(format!("{v} is not a quotient variable")));
        }
        let mut sigma = sigma.clone();
        sigma.remove(&v);

        let mut points = Vec::new();
        let mut excluded = Vec::new();
        let mut lower: Option<Bound<QuotientElement<S>>> = None;
        let mut upper: Option<Bound<QuotientElement<S>>> = None;

        for lit in literals {
            let s = match &lit.atom {
                Atom::QuotEq(s) | Atom::QuotPrec(s) if s.linear().get(&v).is_some() => s,
                _ => {
                    if eval_literal(lit, &sigma).map_err(not_ground)? {
                        continue;
                    }
                    return Ok((false, None));
                }
            };
            let (b, rest) = s.split_off(&v);
            let d = eval_quotient_term(&rest, &sigma).map_err(not_ground)?;
            let p = d.scale(&(-S::one() / b.clone()));
            match (&lit.atom, lit.positive) {
                (Atom::QuotEq(_), true) => points.push(p),
                (Atom::QuotEq(_), false) => excluded.push(p),
                (Atom::QuotPrec(_), pos) => {
                    if !ordered {
                        return Err(Error::Mode("the order on the quotient sort is not available".into()));
                    }
                    let below = b.is_positive() == pos;
                    let bd = Bound { value: p, closed: !pos };
                    if below {
                        tighten(&mut upper, bd, true);
                    } else {
                        tighten(&mut lower, bd, false);
                    }
                }
                _ => unreachable!(),
            }
        }

        let check = |cand: &QuotientElement<S>| -> Result<bool> {
            let s = sigma.clone().with_quotient(v, cand.clone());
            for lit in literals {
                if !eval_literal(lit, &s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };

        if let Some(p) = points.first() {
            return Ok(if check(p)? { (true, Some(p.clone())) } else { (false, None) });
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            match prec_cmp(&l.value, &u.value) {
                std::cmp::Ordering::Greater => return Ok((false, None)),
                std::cmp::Ordering::Equal => {
                    return Ok(if l.closed && u.closed && check(&l.value)? { (true, Some(l.value.clone())) } else { (false, None) })
                }
                std::cmp::Ordering::Less => {}
            }
        }
        for cand in self.quotient_candidates(&lower, &upper, excluded.len() + 1)? {
            if !excluded.contains(&cand) && check(&cand)? {
                return Ok((true, Some(cand)));
            }
        }
        Err(Error::Internal("quotient oracle failed to realize a consistent constraint set".into()))
    }

    /// Some element strictly inside a nonempty `≺`-interval and outside
    /// `excluded`.
    fn first_free_candidate<S: Scalar>(
        &self,
        lower: &Option<Bound<QuotientElement<S>>>,
        upper: &Option<Bound<QuotientElement<S>>>,
        excluded: &[QuotientElement<S>],
    ) -> Result<Option<QuotientElement<S>>> {
        let cands = self.quotient_candidates(lower, upper, excluded.len() + 1)?;
        Ok(cands.into_iter().find(|c| !excluded.contains(c)))
    }

    /// At least `count` distinct quotient elements strictly inside the
    /// `≺`-interval given by the bounds (unbounded sides allowed).
    fn quotient_candidates<S: Scalar>(
        &self,
        lower: &Option<Bound<QuotientElement<S>>>,
        upper: &Option<Bound<QuotientElement<S>>>,
        count: usize,
    ) -> Result<Vec<QuotientElement<S>>> {
        // The first basis vector is ≺-positive.
        let e = QuotientElement::sqrt(self.primes[0]);
        let k = |j: usize| S::from_i64(j as i64);
        Ok(match (lower, upper) {
            (None, None) => (0..count).map(|j| e.scale(&k(j))).collect(),
            (Some(l), None) => (1..=count).map(|j| &l.value + &e.scale(&k(j))).collect(),
            (None, Some(u)) => (1..=count).map(|j| &u.value - &e.scale(&k(j))).collect(),
            (Some(l), Some(u)) => {
                let gap = &u.value - &l.value;
                let n = k(count + 1);
                (1..=count).map(|j| &l.value + &gap.scale(&(k(j) / n.clone()))).collect()
            }
        })
    }
}

fn quotient_within<S: Scalar>(
    x: &QuotientElement<S>,
    lower: &Option<Bound<QuotientElement<S>>>,
    upper: &Option<Bound<QuotientElement<S>>>,
) -> bool {
    let above = lower.as_ref().is_none_or(|l| {
        let o = prec_cmp(x, &l.value);
        o.is_gt() || (o.is_eq() && l.closed)
    });
    let below = upper.as_ref().is_none_or(|u| {
        let o = prec_cmp(x, &u.value);
        o.is_lt() || (o.is_eq() && u.closed)
    });
    above && below
}
