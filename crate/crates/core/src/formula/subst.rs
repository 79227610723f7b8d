use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::term::{HomeTerm, QuotientTerm, Term};
use crate::formula::var::Var;
use crate::formula::Formula;
use crate::scalar::Scalar;

/// Replaces every free occurrence of `v` in `f` by `t`.
pub fn substitute<S: Scalar>(f: &Formula<S>, v: Var, t: &Term<S>) -> Result<Formula<S>> {
    match (v.is_home(), t) {
        (true, Term::Home(_)) | (false, Term::Quotient(_)) => {}
        _ => return Err(Error::Sort(format!("cannot substitute a term of the other sort for {v}"))),
    }
    let bound = f.bound_vars();
    if let Some(clash) = t.vars().into_iter().find(|w| bound.contains(w)) {
        return Err(Error::Capture(clash));
    }
    Ok(subst_unchecked(f, v, t))
}

pub(crate) fn subst_unchecked<S: Scalar>(f: &Formula<S>, v: Var, t: &Term<S>) -> Formula<S> {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) if !a.mentions(&v) => f.clone(),
        Formula::Atom(a) => Formula::Atom(match t {
            Term::Home(h) => a.substitute_home(&v, h),
            Term::Quotient(q) => a.substitute_quotient(&v, q),
        }),
        Formula::Not(g) => Formula::Not(Box::new(subst_unchecked(g, v, t))),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| subst_unchecked(g, v, t)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| subst_unchecked(g, v, t)).collect()),
        Formula::Exists(w, _) | Formula::Forall(w, _) if *w == v => f.clone(),
        Formula::Exists(w, g) => Formula::Exists(*w, Box::new(subst_unchecked(g, v, t))),
        Formula::Forall(w, g) => Formula::Forall(*w, Box::new(subst_unchecked(g, v, t))),
    }
}

pub(crate) fn var_term<S: Scalar>(v: Var) -> Term<S> {
    if v.is_home() {
        Term::Home(HomeTerm::var(v))
    } else {
        Term::Quotient(QuotientTerm::var(v))
    }
}

/// A variable of the same sort as `like`, with an index above every index in
/// `used`.
pub fn fresh_var(like: Var, used: &BTreeSet<Var>) -> Var {
    let max = used.iter().filter(|w| w.sort == like.sort).map(|w| w.index).max().unwrap_or(0);
    Var { sort: like.sort, index: max + 1 }
}

/// Renames bound variables so that they are pairwise distinct and distinct
/// from the free variables. Formulas that already satisfy this are returned
/// unchanged.
pub fn rename_apart<S: Scalar>(f: &Formula<S>) -> Formula<S> {
    let mut used = f.all_vars();
    let mut seen = f.free_vars();
    rename_rec(f, &mut seen, &mut used)
}

fn rename_rec<S: Scalar>(f: &Formula<S>, seen: &mut BTreeSet<Var>, used: &mut BTreeSet<Var>) -> Formula<S> {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::Not(Box::new(rename_rec(g, seen, used))),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_rec(g, seen, used)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_rec(g, seen, used)).collect()),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let (v2, body) = if seen.contains(v) {
                let w = fresh_var(*v, used);
                used.insert(w);
                (w, subst_unchecked(g, *v, &var_term(w)))
            } else {
                (*v, (**g).clone())
            };
            seen.insert(v2);
            let body = rename_rec(&body, seen, used);
            match f {
                Formula::Exists(..) => Formula::Exists(v2, Box::new(body)),
                _ => Formula::Forall(v2, Box::new(body)),
            }
        }
    }
}
