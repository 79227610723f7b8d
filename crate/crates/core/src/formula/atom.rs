use std::fmt;

use crate::formula::term::{HomeTerm, Linear, QuotientTerm};
use crate::formula::var::Var;
use crate::model::{ModelElement, QuotientElement};
use crate::scalar::Scalar;

/// An atomic formula, normalized against zero:
///
/// | variant      | meaning      |
/// |--------------|--------------|
/// | `HomeEq(t)`  | `t = 0`      |
/// | `HomeLt(t)`  | `t < 0`      |
/// | `InQ(t)`     | `t ∈ Q`      |
/// | `QuotEq(s)`  | `s = 0_Q`    |
/// | `QuotPrec(s)`| `s ≺ 0_Q`    |
///
/// Relations are stored as written, `lhs - rhs ⋈ 0`; [`Atom::canonical`]
/// removes the remaining freedom of a positive (or nonzero) scalar factor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom<S: Scalar> {
    HomeEq(HomeTerm<S>),
    HomeLt(HomeTerm<S>),
    InQ(HomeTerm<S>),
    QuotEq(QuotientTerm<S>),
    QuotPrec(QuotientTerm<S>),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AtomKind {
    HomeEq,
    HomeLt,
    InQ,
    QuotEq,
    QuotPrec,
}

impl AtomKind {
    pub const ALL: [AtomKind; 5] = [AtomKind::HomeEq, AtomKind::HomeLt, AtomKind::InQ, AtomKind::QuotEq, AtomKind::QuotPrec];
}

fn scaled<T: Clone, S: Scalar>(t: &T, lead: Option<S>, keep_sign: bool, scale: fn(&T, &S) -> T) -> T {
    let Some(lead) = lead else { return t.clone() };
    let lead = if keep_sign { lead.abs() } else { lead };
    if lead.is_one() {
        t.clone()
    } else {
        scale(t, &(S::one() / lead))
    }
}

impl<S: Scalar> Atom<S> {
    pub fn home_eq(t: HomeTerm<S>) -> Self {
        Atom::HomeEq(t)
    }

    pub fn home_lt(t: HomeTerm<S>) -> Self {
        Atom::HomeLt(t)
    }

    pub fn in_q(t: HomeTerm<S>) -> Self {
        Atom::InQ(t)
    }

    pub fn quot_eq(s: QuotientTerm<S>) -> Self {
        Atom::QuotEq(s)
    }

    pub fn quot_prec(s: QuotientTerm<S>) -> Self {
        Atom::QuotPrec(s)
    }

    /// `lhs < rhs`.
    pub fn lt(lhs: &HomeTerm<S>, rhs: &HomeTerm<S>) -> Self {
        Self::home_lt(lhs - rhs)
    }

    /// `lhs = rhs` in the home sort.
    pub fn eq(lhs: &HomeTerm<S>, rhs: &HomeTerm<S>) -> Self {
        Self::home_eq(lhs - rhs)
    }

    /// `lhs = rhs` in the quotient sort.
    pub fn quot_equal(lhs: &QuotientTerm<S>, rhs: &QuotientTerm<S>) -> Self {
        Self::quot_eq(lhs - rhs)
    }

    /// `lhs ≺ rhs`.
    pub fn prec(lhs: &QuotientTerm<S>, rhs: &QuotientTerm<S>) -> Self {
        Self::quot_prec(lhs - rhs)
    }

    /// The same atom scaled so that its leading coefficient is `1`
    /// (equations, membership) or `±1` (strict orders). Two atoms are
    /// syntactically equivalent exactly when their canonical forms are equal.
    pub fn canonical(&self) -> Self {
        match self {
            Atom::HomeEq(t) => Atom::HomeEq(scaled(t, t.lead(), false, HomeTerm::scale)),
            Atom::HomeLt(t) => Atom::HomeLt(scaled(t, t.lead(), true, HomeTerm::scale)),
            Atom::InQ(t) => Atom::InQ(scaled(t, t.lead(), false, HomeTerm::scale)),
            Atom::QuotEq(s) => Atom::QuotEq(scaled(s, s.lead(), false, QuotientTerm::scale)),
            Atom::QuotPrec(s) => Atom::QuotPrec(scaled(s, s.lead(), true, QuotientTerm::scale)),
        }
    }

    pub fn kind(&self) -> AtomKind {
        match self {
            Atom::HomeEq(_) => AtomKind::HomeEq,
            Atom::HomeLt(_) => AtomKind::HomeLt,
            Atom::InQ(_) => AtomKind::InQ,
            Atom::QuotEq(_) => AtomKind::QuotEq,
            Atom::QuotPrec(_) => AtomKind::QuotPrec,
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        match self {
            Atom::HomeEq(t) | Atom::HomeLt(t) | Atom::InQ(t) => t.vars().collect(),
            Atom::QuotEq(s) | Atom::QuotPrec(s) => s.vars().collect(),
        }
    }

    pub fn mentions(&self, v: &Var) -> bool {
        match self {
            Atom::HomeEq(t) | Atom::HomeLt(t) | Atom::InQ(t) => t.mentions(v),
            Atom::QuotEq(s) | Atom::QuotPrec(s) => s.mentions(v),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Atom::HomeEq(t) | Atom::HomeLt(t) | Atom::InQ(t) => t.is_ground(),
            Atom::QuotEq(s) | Atom::QuotPrec(s) => s.is_ground(),
        }
    }

    pub fn uses_prec(&self) -> bool {
        matches!(self, Atom::QuotPrec(_))
    }

    pub fn uses_quotient_structure(&self) -> bool {
        !matches!(self, Atom::HomeEq(_) | Atom::HomeLt(_))
    }

    pub fn substitute_home(&self, v: &Var, t: &HomeTerm<S>) -> Self {
        match self {
            Atom::HomeEq(a) => Self::home_eq(a.substitute(v, t)),
            Atom::HomeLt(a) => Self::home_lt(a.substitute(v, t)),
            Atom::InQ(a) => Self::in_q(a.substitute(v, t)),
            Atom::QuotEq(s) => Self::quot_eq(s.substitute_home(v, t)),
            Atom::QuotPrec(s) => Self::quot_prec(s.substitute_home(v, t)),
        }
    }

    pub fn substitute_quotient(&self, v: &Var, t: &QuotientTerm<S>) -> Self {
        match self {
            Atom::QuotEq(s) => Self::quot_eq(s.substitute_quotient(v, t)),
            Atom::QuotPrec(s) => Self::quot_prec(s.substitute_quotient(v, t)),
            other => other.clone(),
        }
    }

    /// Evaluates a ground atom without an assignment.
    pub fn eval_ground(&self) -> Option<bool> {
        if !self.is_ground() {
            return None;
        }
        Some(match self {
            Atom::HomeEq(t) => t.constant_part().is_zero(),
            Atom::HomeLt(t) => t.constant_part().is_negative(),
            Atom::InQ(t) => t.constant_part().is_rational(),
            Atom::QuotEq(s) => s.constant_part().is_zero(),
            Atom::QuotPrec(s) => s.constant_part().cmp(&QuotientElement::zero()).is_lt(),
        })
    }
}

fn split_linear<S: Scalar>(l: &Linear<S>) -> (Linear<S>, Linear<S>) {
    let pos = l.iter().filter(|(_, c)| c.is_positive()).map(|(k, c)| (*k, c.clone())).collect();
    let neg = l.iter().filter(|(_, c)| c.is_negative()).map(|(k, c)| (*k, -c.clone())).collect();
    (pos, neg)
}

type Terms<S> = Vec<(u32, S)>;

fn split_terms<S: Scalar>(terms: Terms<S>) -> (Terms<S>, Terms<S>) {
    let (pos, neg): (Vec<_>, Vec<_>) = terms.into_iter().partition(|(_, c)| c.is_positive());
    (pos, neg.into_iter().map(|(k, c)| (k, -c)).collect())
}

fn split_home<S: Scalar>(t: &HomeTerm<S>) -> (HomeTerm<S>, HomeTerm<S>) {
    let (lp, ln) = split_linear(t.linear());
    let (cp, cn) = split_terms(t.constant_part().terms().map(|(k, c)| (k, c.clone())).collect());
    (HomeTerm::from_parts(lp, ModelElement::from_terms(cp)), HomeTerm::from_parts(ln, ModelElement::from_terms(cn)))
}

fn split_quotient<S: Scalar>(s: &QuotientTerm<S>) -> (QuotientTerm<S>, QuotientTerm<S>) {
    let (lp, ln) = split_linear(s.linear());
    let (pp, pn) = split_linear(s.pushed());
    let (cp, cn) = split_terms(s.constant_part().terms().map(|(k, c)| (k, c.clone())).collect());
    (QuotientTerm::from_parts(lp, pp, QuotientElement::from_terms(cp)), QuotientTerm::from_parts(ln, pn, QuotientElement::from_terms(cn)))
}

/// Both sides rendered; `0_Q` marks the sort when neither side would.
fn quotient_sides<S: Scalar>(s: &QuotientTerm<S>) -> (String, String) {
    let (p, n) = split_quotient(s);
    let (p, n) = (p.to_string(), n.to_string());
    if p == "0" && n == "0" {
        ("0_Q".into(), "0_Q".into())
    } else {
        (p, n)
    }
}

impl<S: Scalar> fmt::Display for Atom<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::HomeEq(t) => {
                let (p, n) = split_home(t);
                write!(f, "{p} = {n}")
            }
            Atom::HomeLt(t) => {
                let (p, n) = split_home(t);
                write!(f, "{p} < {n}")
            }
            Atom::InQ(t) => write!(f, "Q({t})"),
            Atom::QuotEq(s) => {
                let (p, n) = quotient_sides(s);
                write!(f, "{p} = {n}")
            }
            Atom::QuotPrec(s) => {
                let (p, n) = quotient_sides(s);
                write!(f, "{p} prec {n}")
            }
        }
    }
}
