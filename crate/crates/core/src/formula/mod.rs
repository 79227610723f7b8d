//! Two-sorted first-order formulas: representation, parsing, rendering,
//! substitution and normal forms.

mod atom;
mod dnf;
mod parse;
mod subst;
mod term;
mod var;

use std::collections::BTreeSet;
use std::fmt;

pub use atom::{Atom, AtomKind};
pub(crate) use dnf::dnf_clauses;
pub use dnf::{desugar_negated_orders, literals_of, to_dnf, to_nnf, Literal};
pub use parse::{parse, parse_model_element};
pub use subst::{fresh_var, rename_apart, substitute};
pub use term::{HomeTerm, Linear, QuotientTerm, Term};
pub use var::{Sort, TheoryMode, Var};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula<S: Scalar> {
    True,
    False,
    Atom(Atom<S>),
    Not(Box<Formula<S>>),
    And(Vec<Formula<S>>),
    Or(Vec<Formula<S>>),
    Exists(Var, Box<Formula<S>>),
    Forall(Var, Box<Formula<S>>),
}

impl<S: Scalar> From<Atom<S>> for Formula<S> {
    fn from(a: Atom<S>) -> Self {
        Formula::Atom(a)
    }
}

impl<S: Scalar> Formula<S> {
    pub fn atom(a: Atom<S>) -> Self {
        Formula::Atom(a)
    }

    /// Conjunction that flattens, drops `True`, short-circuits on `False` and
    /// collapses zero or one operands.
    pub fn and(parts: impl IntoIterator<Item = Formula<S>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Dual of [`Formula::and`].
    pub fn or(parts: impl IntoIterator<Item = Formula<S>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula<S>) -> Self {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn implies(a: Formula<S>, b: Formula<S>) -> Self {
        Formula::or([Formula::not(a), b])
    }

    pub fn exists(v: Var, body: Formula<S>) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula<S>) -> Self {
        Formula::Forall(v, Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.extend(a.vars().into_iter().filter(|v| !bound.contains(v))),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(*v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn bound_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Exists(v, _) | Formula::Forall(v, _) = f {
                out.insert(*v);
            }
        });
        out
    }

    /// Every variable occurring anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = self.bound_vars();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.extend(a.vars());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, visitor: &mut impl FnMut(&'a Formula<S>)) {
        visitor(self);
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.visit(visitor),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.visit(visitor)),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom<S>> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Exists(..) | Formula::Forall(..)) {
                qf = false;
            }
        });
        qf
    }

    pub fn uses_prec(&self) -> bool {
        self.atoms().iter().any(|a| a.uses_prec())
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.free_vars().contains(v)
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom<S>) -> Formula<S>) -> Formula<S> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::Not(Box::new(g.map_atoms(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Exists(v, g) => Formula::Exists(*v, Box::new(g.map_atoms(f))),
            Formula::Forall(v, g) => Formula::Forall(*v, Box::new(g.map_atoms(f))),
        }
    }

    /// Number of nodes; a size measure for tests and diagnostics.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Or(_) => 1,
            Formula::And(_) => 2,
            Formula::Not(_) => 3,
            _ => 4,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl<S: Scalar> fmt::Display for Formula<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => {
                f.write_str("!")?;
                g.write_child(f, 3)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let (sep, min) = if matches!(self, Formula::And(_)) { (" & ", 3) } else { (" | ", 2) };
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    g.write_child(f, min)?;
                }
                Ok(())
            }
            Formula::Exists(v, g) => write!(f, "E {v}. {g}"),
            Formula::Forall(v, g) => write!(f, "A {v}. {g}"),
        }
    }
}
