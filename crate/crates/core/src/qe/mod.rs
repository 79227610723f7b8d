//! Quantifier elimination and sentence decision.
//!
//! Elimination works one existential at a time on conjunctions of literals.
//! For a home variable the conjunction describes an interval intersected with
//! a set of cosets of `Q`; since every coset is dense, the quantifier can be
//! dropped once the interval is known to be nonempty and the coset
//! constraints are consistent. For a quotient variable the quotient is a
//! (possibly ordered) vector space with no endpoints, so only equations and
//! order bounds leave a trace.

mod simplify;
mod split;

pub use simplify::simplify;
pub use split::{split_atom, SplitAtom};

use crate::error::{Error, Result};
use crate::formula::{dnf_clauses, rename_apart, to_nnf, Atom, Formula, HomeTerm, Literal, QuotientTerm, TheoryMode, Var};
use crate::model::{eval, Assignment};
use crate::scalar::Scalar;

/// The constraints a home-variable conjunction places on that variable,
/// each solved for it: `v > l`, `v < u`, `π(v) = s`, `π(v) ≠ e`, and
/// `π(v) ≻ l'`, `π(v) ≺ u'`. `residue` holds the literals without `v`.
#[derive(Clone, Debug)]
pub struct HomeBoundSet<S: Scalar> {
    pub lowers: Vec<HomeTerm<S>>,
    pub uppers: Vec<HomeTerm<S>>,
    pub equalities: Vec<HomeTerm<S>>,
    pub required_cosets: Vec<QuotientTerm<S>>,
    pub excluded_cosets: Vec<QuotientTerm<S>>,
    pub prec_lowers: Vec<QuotientTerm<S>>,
    pub prec_uppers: Vec<QuotientTerm<S>>,
    pub residue: Vec<Literal<S>>,
}

impl<S: Scalar> Default for HomeBoundSet<S> {
    fn default() -> Self {
        HomeBoundSet {
            lowers: vec![],
            uppers: vec![],
            equalities: vec![],
            required_cosets: vec![],
            excluded_cosets: vec![],
            prec_lowers: vec![],
            prec_uppers: vec![],
            residue: vec![],
        }
    }
}

/// Fails with a mode error when `f` uses symbols outside `mode`.
pub fn check_mode<S: Scalar>(f: &Formula<S>, mode: TheoryMode) -> Result<()> {
    if !mode.has_quotient() {
        if f.all_vars().iter().any(|v| !v.is_home()) {
            return Err(Error::Mode(format!("quotient variables are not available in {mode}")));
        }
        if f.atoms().iter().any(|a| a.uses_quotient_structure()) {
            return Err(Error::Mode(format!("Q and pi are not available in {mode}")));
        }
    }
    if !mode.has_prec() && f.uses_prec() {
        return Err(Error::Mode(format!("prec is not available in {mode}")));
    }
    Ok(())
}

fn lit_formula<S: Scalar>(lits: &[Literal<S>]) -> Formula<S> {
    Formula::and(lits.iter().map(Literal::to_formula))
}

/// Splits off the first negated strict order mentioning `v`, if any, into
/// its two positive alternatives.
fn split_negated_order<S: Scalar>(conj: &[Literal<S>], v: &Var) -> Option<[Vec<Literal<S>>; 2]> {
    let i = conj.iter().position(|l| !l.positive && matches!(l.atom, Atom::HomeLt(_) | Atom::QuotPrec(_)) && l.atom.mentions(v))?;
    let (gt, eq) = match &conj[i].atom {
        Atom::HomeLt(t) => (Atom::home_lt(-t), Atom::home_eq(t.clone())),
        Atom::QuotPrec(s) => (Atom::quot_prec(-s), Atom::quot_eq(s.clone())),
        _ => unreachable!(),
    };
    let mut a = conj.to_vec();
    a[i] = Literal::pos(gt);
    let mut b = conj.to_vec();
    b[i] = Literal::pos(eq);
    Some([a, b])
}

fn substitute_all<S: Scalar>(conj: &[Literal<S>], sub: impl Fn(&Atom<S>) -> Atom<S>) -> Formula<S> {
    simplify(&Formula::and(conj.iter().map(|l| Literal { atom: sub(&l.atom), positive: l.positive }.to_formula())))
}

/// Collects the constraints on the home variable `v`. Negated strict orders
/// on `v` must have been split beforehand.
pub fn home_bounds<S: Scalar>(conj: &[Literal<S>], v: &Var) -> HomeBoundSet<S> {
    let mut b = HomeBoundSet::default();
    for lit in conj {
        if !lit.atom.mentions(v) {
            b.residue.push(lit.clone());
            continue;
        }
        match &lit.atom {
            Atom::HomeEq(t) | Atom::HomeLt(t) | Atom::InQ(t) => {
                let (a, rest) = t.split_off(v);
                // a·v + rest ⋈ 0  ⇔  v ⋈' p
                let p = rest.scale(&(-S::one() / a.clone()));
                match (&lit.atom, lit.positive) {
                    (Atom::HomeEq(_), true) => b.equalities.push(p),
                    // a point removed from a dense set: no trace
                    (Atom::HomeEq(_), false) => {}
                    (Atom::HomeLt(_), true) if a.is_positive() => b.uppers.push(p),
                    (Atom::HomeLt(_), true) => b.lowers.push(p),
                    (Atom::InQ(_), true) => b.required_cosets.push(QuotientTerm::pi(&p)),
                    (Atom::InQ(_), false) => b.excluded_cosets.push(QuotientTerm::pi(&p)),
                    _ => unreachable!("negated order on the eliminated variable"),
                }
            }
            Atom::QuotEq(s) | Atom::QuotPrec(s) => {
                let (a, rest) = s.split_off(v);
                let p = rest.scale(&(-S::one() / a.clone()));
                match (&lit.atom, lit.positive) {
                    (Atom::QuotEq(_), true) => b.required_cosets.push(p),
                    (Atom::QuotEq(_), false) => b.excluded_cosets.push(p),
                    (Atom::QuotPrec(_), true) if a.is_positive() => b.prec_uppers.push(p),
                    (Atom::QuotPrec(_), true) => b.prec_lowers.push(p),
                    _ => unreachable!("negated order on the eliminated variable"),
                }
            }
        }
    }
    b
}

/// `∃v ⋀conj` for a home variable `v`, as a quantifier-free formula.
pub fn eliminate_exists_home<S: Scalar>(conj: &[Literal<S>], v: Var, mode: TheoryMode) -> Result<Formula<S>> {
    if !v.is_home() {
        return Err(Error::Sort(format!("{v} is not a home variable")));
    }
    check_mode(&lit_formula(conj), mode)?;
    Ok(eliminate_home(conj, &v))
}

fn eliminate_home<S: Scalar>(conj: &[Literal<S>], v: &Var) -> Formula<S> {
    if let Some([a, b]) = split_negated_order(conj, v) {
        return simplify(&Formula::or([eliminate_home(&a, v), eliminate_home(&b, v)]));
    }
    let b = home_bounds(conj, v);
    if let Some(p) = b.equalities.first() {
        return substitute_all(conj, |a| a.substitute_home(v, p));
    }
    let mut out: Vec<Formula<S>> = b.residue.iter().map(Literal::to_formula).collect();
    for l in &b.lowers {
        for u in &b.uppers {
            out.push(Atom::lt(l, u).into());
        }
    }
    match b.required_cosets.split_first() {
        Some((s0, others)) => {
            for s in others {
                out.push(Atom::quot_equal(s0, s).into());
            }
            for e in &b.excluded_cosets {
                out.push(Formula::not(Atom::quot_equal(s0, e).into()));
            }
            for l in &b.prec_lowers {
                out.push(Atom::prec(l, s0).into());
            }
            for u in &b.prec_uppers {
                out.push(Atom::prec(s0, u).into());
            }
        }
        None => {
            // A nonempty open ≺-interval holds infinitely many cosets, and
            // each of them is dense; excluded cosets leave no trace.
            for l in &b.prec_lowers {
                for u in &b.prec_uppers {
                    out.push(Atom::prec(l, u).into());
                }
            }
        }
    }
    simplify(&Formula::and(out))
}

/// `∃v ⋀conj` for a quotient variable `v`.
pub fn eliminate_exists_quotient<S: Scalar>(conj: &[Literal<S>], v: Var, mode: TheoryMode) -> Result<Formula<S>> {
    if v.is_home() {
        return Err(Error::Sort(format!("{v} is not a quotient variable")));
    }
    check_mode(&lit_formula(conj), mode)?;
    if !mode.has_quotient() {
        return Err(Error::Mode(format!("no quotient sort in {mode}")));
    }
    Ok(eliminate_quotient(conj, &v))
}

fn eliminate_quotient<S: Scalar>(conj: &[Literal<S>], v: &Var) -> Formula<S> {
    if let Some([a, b]) = split_negated_order(conj, v) {
        return simplify(&Formula::or([eliminate_quotient(&a, v), eliminate_quotient(&b, v)]));
    }
    let mut residue = Vec::new();
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for lit in conj {
        let s = match &lit.atom {
            Atom::QuotEq(s) | Atom::QuotPrec(s) if s.mentions(v) => s,
            _ => {
                residue.push(lit.to_formula());
                continue;
            }
        };
        let (a, rest) = s.split_off(v);
        let p = rest.scale(&(-S::one() / a.clone()));
        match (&lit.atom, lit.positive) {
            (Atom::QuotEq(_), true) => return substitute_all(conj, |at| at.substitute_quotient(v, &p)),
            // finitely many excluded points in an infinite (dense) set
            (Atom::QuotEq(_), false) => {}
            (Atom::QuotPrec(_), _) if a.is_positive() => uppers.push(p),
            (Atom::QuotPrec(_), _) => lowers.push(p),
            _ => unreachable!(),
        }
    }
    for l in &lowers {
        for u in &uppers {
            residue.push(Atom::prec(l, u).into());
        }
    }
    simplify(&Formula::and(residue))
}

/// Eliminates `∃v` in front of a quantifier-free `body`.
fn eliminate_exists<S: Scalar>(v: Var, body: &Formula<S>) -> Result<Formula<S>> {
    let body = simplify(body);
    if !body.mentions(&v) {
        return Ok(body);
    }
    match to_nnf(&body) {
        Formula::Or(parts) => {
            let mut out = Vec::with_capacity(parts.len());
            for p in &parts {
                let r = eliminate_exists(v, p)?;
                if r == Formula::True {
                    return Ok(r);
                }
                out.push(r);
            }
            Ok(simplify(&Formula::or(out)))
        }
        nnf => {
            let conjuncts = match nnf {
                Formula::And(cs) => cs,
                other => vec![other],
            };
            let (with_v, without_v): (Vec<_>, Vec<_>) = conjuncts.into_iter().partition(|c| c.mentions(&v));
            let mut disjuncts = Vec::new();
            for clause in dnf_clauses(&Formula::and(with_v))? {
                let r = if v.is_home() { eliminate_home(&clause, &v) } else { eliminate_quotient(&clause, &v) };
                if r == Formula::True {
                    disjuncts = vec![r];
                    break;
                }
                disjuncts.push(r);
            }
            Ok(simplify(&Formula::and(without_v.into_iter().chain([Formula::or(disjuncts)]))))
        }
    }
}

fn qe_rec<S: Scalar>(f: &Formula<S>) -> Result<Formula<S>> {
    Ok(match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(qe_rec(g)?),
        Formula::And(gs) => Formula::and(gs.iter().map(qe_rec).collect::<Result<Vec<_>>>()?),
        Formula::Or(gs) => Formula::or(gs.iter().map(qe_rec).collect::<Result<Vec<_>>>()?),
        Formula::Exists(v, g) => eliminate_exists(*v, &qe_rec(g)?)?,
        Formula::Forall(v, g) => Formula::not(eliminate_exists(*v, &Formula::not(qe_rec(g)?))?),
    })
}

/// A quantifier-free formula equivalent to `f` in every model of the theory
/// selected by `mode`.
pub fn qe<S: Scalar>(f: &Formula<S>, mode: TheoryMode) -> Result<Formula<S>> {
    check_mode(f, mode)?;
    Ok(simplify(&qe_rec(&rename_apart(f))?))
}

/// Truth value of a sentence. The theories are complete, so truth in the
/// reference model is truth in every model.
pub fn decide_sentence<S: Scalar>(f: &Formula<S>, mode: TheoryMode) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        let names: Vec<String> = free.iter().map(Var::to_string).collect();
        return Err(Error::FreeVariable(names.join(", ")));
    }
    let g = qe(f, mode)?;
    eval(&g, &Assignment::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{literals_of, parse};
    use crate::model::{Model, ModelElement};
    use crate::sample::random_element;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type R = BigRational;

    fn p(text: &str, mode: TheoryMode) -> Formula<R> {
        parse(text, mode).unwrap()
    }

    fn body(text: &str, mode: TheoryMode) -> Vec<Literal<R>> {
        literals_of(&p(text, mode)).unwrap()
    }

    #[test]
    fn home_elimination_examples() {
        let m = TheoryMode::Povs;
        let c = body("0 < x1 & x1 < x2 & Q(x1)", m);
        let out = eliminate_exists_home(&c, Var::home(1), m).unwrap();
        assert_eq!(out.to_string(), "0 < x2");

        let model = Model::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a: ModelElement<R> = random_element(&mut rng, &model);
            let s = Assignment::new().with_home(Var::home(2), a);
            let (expected, _) = model.oracle_exists_home(&c, Var::home(1), &s).unwrap();
            assert_eq!(eval(&out, &s).unwrap(), expected);
        }

        let out = eliminate_exists_home(&body("x1 = x2 + 1 & Q(x1)", m), Var::home(1), m).unwrap();
        assert_eq!(out, p("Q(x2 + 1)", m));

        let out = eliminate_exists_home(&body("pi(x1) = u1 & pi(x1) != u2", m), Var::home(1), m).unwrap();
        assert_eq!(out, p("u1 != u2", m));
    }

    #[test]
    fn quotient_elimination_examples() {
        let m = TheoryMode::Povs;
        let out = eliminate_exists_quotient(&body("u1 != pi(x1) & u1 != pi(x2)", m), Var::quotient(1), m).unwrap();
        assert_eq!(out, Formula::True);
        let out = eliminate_exists_quotient(&body("u1 = pi(x1) & u1 != pi(x2)", m), Var::quotient(1), m).unwrap();
        assert_eq!(out, p("pi(x1) != pi(x2)", m));
        let o = TheoryMode::PovsPrec;
        let out = eliminate_exists_quotient(&body("pi(x1) prec u1 & u1 prec pi(x2)", o), Var::quotient(1), o).unwrap();
        assert_eq!(out, p("pi(x1) prec pi(x2)", o));
        let err = eliminate_exists_quotient(&body("pi(x1) prec u1", o), Var::quotient(1), m).unwrap_err();
        assert!(matches!(err, Error::Mode(_)));
    }

    #[test]
    fn qe_examples() {
        let m = TheoryMode::Povs;
        assert_eq!(qe(&p("E x1. pi(x1) = u1", m), m).unwrap(), Formula::True);
        assert_eq!(qe(&p("A x1. (Q(x1) -> x1 >= 0)", m), m).unwrap(), Formula::False);
        assert_eq!(qe(&p("E x1. E x2. (x1 < x2 & Q(x2 - x1))", m), m).unwrap(), Formula::True);
        let f = qe(&p("A x1. (x1 < x2 | x1 > x2 | Q(x1 - x3))", m), m).unwrap();
        assert_eq!(f, p("Q(x2 - x3)", m));
    }

    #[test]
    fn decide_examples() {
        let m = TheoryMode::Povs;
        assert!(!decide_sentence(&p("E x1. (Q(x1) & !Q(x1))", m), m).unwrap());
        assert!(decide_sentence(&p("E x1. (0 < x1 & x1 < 1 & !Q(x1))", m), m).unwrap());
        assert!(decide_sentence(&p("A u1. E x1. (pi(x1) = u1 & 0 < x1 & x1 < 1)", m), m).unwrap());
        assert!(matches!(decide_sentence(&p("x1 < 0", m), m), Err(Error::FreeVariable(_))));
    }

    #[test]
    fn mode_is_enforced() {
        let f = p("E u1. u1 prec 0", TheoryMode::PovsPrec);
        assert!(matches!(qe(&f, TheoryMode::Povs), Err(Error::Mode(_))));
        let g = p("E x1. Q(x1)", TheoryMode::Povs);
        assert!(matches!(qe(&g, TheoryMode::Ovs), Err(Error::Mode(_))));
    }

    #[test]
    fn split_examples() {
        let m = TheoryMode::PovsPrec;
        let atom = |t: &str| match p(t, m) {
            Formula::Atom(a) => a,
            other => panic!("{other}"),
        };
        let s = split_atom(&atom("Q(2*x1 - x2)"));
        assert!(s.home.is_none());
        assert_eq!(s.quotient.unwrap().to_string(), "2*u1 = u2");
        assert_eq!(s.images, vec![(Var::quotient(1), Var::home(1)), (Var::quotient(2), Var::home(2))]);
        let s = split_atom(&atom("x1 < x2"));
        assert_eq!(s.home, Some(p("x1 < x2", m)));
        assert!(s.quotient.is_none());
        let s = split_atom(&atom("pi(x1) prec u1"));
        assert_eq!(s.quotient.unwrap().to_string(), "u2 prec u1");
    }
}
