use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::atom::Atom;
use crate::formula::Formula;
use crate::scalar::Scalar;

/// An atom or a negated atom.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Literal<S: Scalar> {
    pub atom: Atom<S>,
    pub positive: bool,
}

impl<S: Scalar> Literal<S> {
    pub fn pos(atom: Atom<S>) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom<S>) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negated(&self) -> Self {
        Literal { atom: self.atom.clone(), positive: !self.positive }
    }

    pub fn to_formula(&self) -> Formula<S> {
        let a = Formula::Atom(self.atom.clone());
        if self.positive {
            a
        } else {
            Formula::Not(Box::new(a))
        }
    }

    pub fn eval_ground(&self) -> Option<bool> {
        self.atom.eval_ground().map(|b| b == self.positive)
    }

    pub(crate) fn key(&self) -> (String, bool) {
        (format!("{:?}", self.atom.canonical()), self.positive)
    }
}

/// Negation normal form: negations only directly above atoms. Quantifiers
/// are dualized as negations pass through them.
pub fn to_nnf<S: Scalar>(f: &Formula<S>) -> Formula<S> {
    nnf(f, true)
}

fn nnf<S: Scalar>(f: &Formula<S>, positive: bool) -> Formula<S> {
    match (f, positive) {
        (Formula::True, true) | (Formula::False, false) => Formula::True,
        (Formula::True, false) | (Formula::False, true) => Formula::False,
        (Formula::Atom(_), true) => f.clone(),
        (Formula::Atom(_), false) => Formula::Not(Box::new(f.clone())),
        (Formula::Not(g), _) => nnf(g, !positive),
        (Formula::And(gs), true) | (Formula::Or(gs), false) => Formula::and(gs.iter().map(|g| nnf(g, positive))),
        (Formula::Or(gs), true) | (Formula::And(gs), false) => Formula::or(gs.iter().map(|g| nnf(g, positive))),
        (Formula::Exists(v, g), true) | (Formula::Forall(v, g), false) => Formula::exists(*v, nnf(g, positive)),
        (Formula::Forall(v, g), true) | (Formula::Exists(v, g), false) => Formula::forall(*v, nnf(g, positive)),
    }
}

/// Rewrites negated strict orders into positive atoms, on an NNF formula:
/// `¬(t < 0)` becomes `-t < 0 ∨ t = 0` and `¬(s ≺ 0)` becomes
/// `-s ≺ 0 ∨ s = 0`. Afterwards the only negated atoms are equations and
/// `Q`-memberships.
pub fn desugar_negated_orders<S: Scalar>(f: &Formula<S>) -> Formula<S> {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Atom(Atom::HomeLt(t)) => Formula::or([Formula::Atom(Atom::home_lt(-t)), Formula::Atom(Atom::home_eq(t.clone()))]),
            Formula::Atom(Atom::QuotPrec(s)) => Formula::or([Formula::Atom(Atom::quot_prec(-s)), Formula::Atom(Atom::quot_eq(s.clone()))]),
            Formula::Atom(_) => f.clone(),
            _ => desugar_negated_orders(&to_nnf(f)),
        },
        Formula::And(gs) => Formula::and(gs.iter().map(desugar_negated_orders)),
        Formula::Or(gs) => Formula::or(gs.iter().map(desugar_negated_orders)),
        Formula::Exists(v, g) => Formula::exists(*v, desugar_negated_orders(g)),
        Formula::Forall(v, g) => Formula::forall(*v, desugar_negated_orders(g)),
        _ => f.clone(),
    }
}

/// Disjunctive normal form as a list of conjunctions of literals, pruned:
/// ground literals are folded, duplicate literals dropped, clauses with a
/// complementary pair removed, and clauses subsumed by a smaller clause
/// absorbed.
pub(crate) fn dnf_clauses<S: Scalar>(f: &Formula<S>) -> Result<Vec<Vec<Literal<S>>>> {
    if !f.is_quantifier_free() {
        return Err(Error::QuantifiedInput);
    }
    let raw = clauses(&to_nnf(f));
    Ok(prune(raw))
}

fn clauses<S: Scalar>(f: &Formula<S>) -> Vec<Vec<Literal<S>>> {
    match f {
        Formula::True => vec![vec![]],
        Formula::False => vec![],
        Formula::Atom(a) => vec![vec![Literal::pos(a.clone())]],
        Formula::Not(g) => match &**g {
            Formula::Atom(a) => vec![vec![Literal::neg(a.clone())]],
            _ => clauses(&to_nnf(f)),
        },
        Formula::Or(gs) => gs.iter().flat_map(|g| clauses(g)).collect(),
        Formula::And(gs) => {
            let mut acc: Vec<Vec<Literal<S>>> = vec![vec![]];
            for g in gs {
                let rhs = prune(clauses(g));
                if rhs.is_empty() {
                    return vec![];
                }
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for left in &acc {
                    for right in &rhs {
                        let mut c = left.clone();
                        c.extend(right.iter().cloned());
                        next.push(c);
                    }
                }
                acc = prune(next);
                if acc.is_empty() {
                    return acc;
                }
            }
            acc
        }
        Formula::Exists(..) | Formula::Forall(..) => unreachable!("checked quantifier-free"),
    }
}

/// A clause with the keys of its literals.
type Keyed<S> = (Vec<Literal<S>>, BTreeSet<(String, bool)>);

fn prune<S: Scalar>(raw: Vec<Vec<Literal<S>>>) -> Vec<Vec<Literal<S>>> {
    let mut cleaned: Vec<Keyed<S>> = Vec::new();
    'clause: for clause in raw {
        let mut keys = BTreeSet::new();
        let mut lits = Vec::new();
        for lit in clause {
            match lit.eval_ground() {
                Some(true) => continue,
                Some(false) => continue 'clause,
                None => {}
            }
            let (k, pol) = lit.key();
            if keys.contains(&(k.clone(), !pol)) {
                continue 'clause;
            }
            if keys.insert((k, pol)) {
                lits.push(lit);
            }
        }
        cleaned.push((lits, keys));
    }
    // absorption: a clause implied by a strictly smaller one is redundant
    cleaned.sort_by_key(|(l, _)| l.len());
    let mut kept: Vec<Keyed<S>> = Vec::new();
    for (lits, keys) in cleaned {
        if kept.iter().any(|(_, k)| k.is_subset(&keys)) {
            continue;
        }
        kept.push((lits, keys));
    }
    kept.into_iter().map(|(l, _)| l).collect()
}

fn clauses_to_formula<S: Scalar>(cs: Vec<Vec<Literal<S>>>) -> Formula<S> {
    Formula::or(cs.into_iter().map(|c| Formula::and(c.iter().map(Literal::to_formula))))
}

/// An equivalent disjunction of conjunctions of literals.
pub fn to_dnf<S: Scalar>(f: &Formula<S>) -> Result<Formula<S>> {
    Ok(clauses_to_formula(dnf_clauses(f)?))
}

/// Reads a conjunction of literals (possibly a single literal or `True`).
pub fn literals_of<S: Scalar>(f: &Formula<S>) -> Result<Vec<Literal<S>>> {
    fn lit<S: Scalar>(f: &Formula<S>) -> Result<Literal<S>> {
        match f {
            Formula::Atom(a) => Ok(Literal::pos(a.clone())),
            Formula::Not(g) => match &**g {
                Formula::Atom(a) => Ok(Literal::neg(a.clone())),
                _ => Err(Error::NotConjunction),
            },
            _ => Err(Error::NotConjunction),
        }
    }
    match f {
        Formula::True => Ok(vec![]),
        Formula::And(gs) => gs.iter().map(lit).collect(),
        other => Ok(vec![lit(other)?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, TheoryMode};
    use num_rational::BigRational;

    type F = Formula<BigRational>;

    fn p(text: &str) -> F {
        parse(text, TheoryMode::PovsPrec).unwrap()
    }

    #[test]
    fn de_morgan() {
        assert_eq!(to_dnf(&p("!(x1 < 0 & Q(x2))")).unwrap(), p("!(x1 < 0) | !Q(x2)"));
    }

    #[test]
    fn literal_is_fixed_point() {
        let a = p("Q(x1 - x2)");
        assert_eq!(to_dnf(&a).unwrap(), a);
        let n = p("!Q(x1)");
        assert_eq!(to_dnf(&n).unwrap(), n);
    }

    #[test]
    fn distribution() {
        assert_eq!(to_dnf(&p("(x1 < 0 | Q(x1)) & x2 = 1")).unwrap(), p("x1 < 0 & x2 = 1 | Q(x1) & x2 = 1"));
    }

    #[test]
    fn pruning() {
        assert_eq!(to_dnf(&p("Q(x1) & !Q(x1)")).unwrap(), F::False);
        assert_eq!(to_dnf(&p("Q(x1) | Q(x1) & x1 < 0")).unwrap(), p("Q(x1)"));
        assert_eq!(to_dnf(&p("Q(2*x1) & 1 < 2")).unwrap(), p("Q(2*x1)"));
        assert_eq!(to_dnf(&p("Q(2*x1) & Q(x1)")).unwrap(), p("Q(2*x1)"));
        assert_eq!(to_dnf(&p("Q(r2)")).unwrap(), F::False);
    }

    #[test]
    fn quantified_input_is_rejected() {
        assert_eq!(to_dnf(&p("E x1. x1 < 0")), Err(Error::QuantifiedInput));
    }

    #[test]
    fn negated_orders_become_positive() {
        let f = desugar_negated_orders(&to_nnf(&p("!(x1 < x2) & !(u1 prec u2)")));
        let lits: Vec<_> = f.atoms().into_iter().cloned().collect();
        assert_eq!(lits.len(), 4);
        assert!(!format!("{f}").contains('!'), "{f}");
    }

    #[test]
    fn conjunction_reading() {
        assert_eq!(literals_of(&p("x1 < 0 & !Q(x1)")).unwrap().len(), 2);
        assert_eq!(literals_of(&F::True).unwrap().len(), 0);
        assert_eq!(literals_of(&p("x1 < 0 | Q(x1)")), Err(Error::NotConjunction));
    }
}
