use std::collections::BTreeSet;

use crate::formula::{Formula, Literal};
use crate::scalar::Scalar;

/// A cheap equivalence-preserving cleanup: folds ground atoms, removes double
/// negations, flattens, drops duplicate operands (compared up to canonical
/// atom scaling) and detects `a ∧ ¬a` / `a ∨ ¬a`.
pub fn simplify<S: Scalar>(f: &Formula<S>) -> Formula<S> {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => match a.eval_ground() {
            Some(true) => Formula::True,
            Some(false) => Formula::False,
            None => f.clone(),
        },
        Formula::Not(g) => Formula::not(simplify(g)),
        Formula::And(gs) => junction(gs, true),
        Formula::Or(gs) => junction(gs, false),
        Formula::Exists(v, g) => {
            let body = simplify(g);
            if body.mentions(v) {
                Formula::exists(*v, body)
            } else {
                body
            }
        }
        Formula::Forall(v, g) => {
            let body = simplify(g);
            if body.mentions(v) {
                Formula::forall(*v, body)
            } else {
                body
            }
        }
    }
}

fn literal_of<S: Scalar>(f: &Formula<S>) -> Option<Literal<S>> {
    match f {
        Formula::Atom(a) => Some(Literal::pos(a.clone())),
        Formula::Not(g) => match &**g {
            Formula::Atom(a) => Some(Literal::neg(a.clone())),
            _ => None,
        },
        _ => None,
    }
}

fn junction<S: Scalar>(gs: &[Formula<S>], conjunction: bool) -> Formula<S> {
    let parts = gs.iter().map(simplify);
    let flat = if conjunction { Formula::and(parts) } else { Formula::or(parts) };
    let children = match &flat {
        Formula::And(cs) if conjunction => cs,
        Formula::Or(cs) if !conjunction => cs,
        _ => return flat,
    };
    let mut keys = BTreeSet::new();
    let mut others = BTreeSet::new();
    let mut out = Vec::with_capacity(children.len());
    for c in children {
        match literal_of(c) {
            Some(lit) => {
                let (k, pol) = lit.key();
                if keys.contains(&(k.clone(), !pol)) {
                    return if conjunction { Formula::False } else { Formula::True };
                }
                if keys.insert((k, pol)) {
                    out.push(c.clone());
                }
            }
            None => {
                if others.insert(format!("{c:?}")) {
                    out.push(c.clone());
                }
            }
        }
    }
    if conjunction {
        Formula::and(out)
    } else {
        Formula::or(out)
    }
}
