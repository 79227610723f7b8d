//! Canonical codes for unary definable sets and for definable partial
//! functions of one variable.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decomposition::{decompose, near_interior, unary_set, Decomposition, NearInterval, UnarySet};
use crate::error::{Error, Result};
use crate::formula::{fresh_var, substitute, Atom, Formula, HomeTerm, Term, TheoryMode, Var};
use crate::model::{Assignment, ModelElement};
use crate::qe::decide_sentence;
use crate::scalar::Scalar;

/// The near-frontier and near-interior pieces of a unary set. Equal sets
/// have equal codes.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct UnarySetCode<S: Scalar> {
    pub frontier: Vec<ModelElement<S>>,
    pub pieces: Vec<NearInterval<S>>,
}

impl<S: Scalar> UnarySetCode<S> {
    pub fn from_decomposition(d: &Decomposition<S>) -> Self {
        let (interior, frontier) = near_interior(d);
        UnarySetCode { frontier, pieces: interior.pieces }
    }

    /// The coded set.
    pub fn decomposition(&self) -> Decomposition<S> {
        Decomposition { points: self.frontier.clone(), pieces: self.pieces.clone() }
    }

    pub fn contains(&self, x: &ModelElement<S>) -> bool {
        self.frontier.contains(x) || self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn is_empty(&self) -> bool {
        self.frontier.is_empty() && self.pieces.is_empty()
    }
}

pub fn code_unary_set<S: Scalar>(f: &Formula<S>, v: Var, sigma: &Assignment<S>) -> Result<UnarySetCode<S>> {
    Ok(UnarySetCode::from_decomposition(&decompose(f, v, sigma)?))
}

pub fn codes_equal<S: Scalar>(a: &UnarySetCode<S>, b: &UnarySetCode<S>) -> bool {
    a == b
}

impl<S: Scalar> fmt::Display for UnarySetCode<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frontier: Vec<String> = self.frontier.iter().map(|p| p.to_string()).collect();
        let pieces: Vec<String> = self.pieces.iter().map(|p| p.to_string()).collect();
        let pieces = if pieces.is_empty() { "none".to_string() } else { pieces.join(" U ") };
        write!(f, "frontier {{{}}}; pieces {pieces}", frontier.join(", "))
    }
}

fn scalar_ser<S: Scalar, Ser: Serializer>(s: &S, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
    serializer.collect_str(s)
}

fn scalar_de<'de, S: Scalar, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<S, D::Error> {
    let s = String::deserialize(deserializer)?;
    s.parse().map_err(|_| serde::de::Error::custom(format!("bad rational {s:?}")))
}

/// `y = slope·x + intercept` on `domain`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FunctionPiece<S: Scalar> {
    #[serde(serialize_with = "scalar_ser", deserialize_with = "scalar_de")]
    pub slope: S,
    pub intercept: ModelElement<S>,
    pub domain: UnarySetCode<S>,
}

/// A partial function given by finitely many graph points and linear pieces
/// with pairwise disjoint domains.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FunctionCode<S: Scalar> {
    pub exceptional: Vec<(ModelElement<S>, ModelElement<S>)>,
    pub pieces: Vec<FunctionPiece<S>>,
}

impl<S: Scalar> fmt::Display for FunctionCode<S> {
    /// One line per exceptional point, then one per piece.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exceptional.is_empty() && self.pieces.is_empty() {
            return f.write_str("empty function");
        }
        let mut lines = Vec::new();
        for (x, y) in &self.exceptional {
            lines.push(format!("x = {x} -> y = {y}"));
        }
        for p in &self.pieces {
            let pieces: Vec<String> = p.domain.pieces.iter().map(|q| q.to_string()).collect();
            lines.push(format!("y = {}*x + {} on {}", p.slope, p.intercept, pieces.join(" U ")));
        }
        f.write_str(&lines.join("\n"))
    }
}

impl<S: Scalar> FunctionCode<S> {
    /// The value at `x`, or `None` outside the domain.
    pub fn apply(&self, x: &ModelElement<S>) -> Option<ModelElement<S>> {
        if let Some((_, y)) = self.exceptional.iter().find(|(a, _)| a == x) {
            return Some(y.clone());
        }
        self.pieces.iter().find(|p| p.domain.contains(x)).map(|p| {
            let mut y = p.intercept.clone();
            y.add_scaled(x, &p.slope);
            y
        })
    }

    /// Piece domains pairwise disjoint, exceptional points outside all of
    /// them.
    pub fn check_structure(&self) -> bool {
        let sets: Vec<UnarySet<S>> = self.pieces.iter().map(|p| p.domain.decomposition().to_unary_set()).collect();
        let disjoint = (0..sets.len()).all(|i| (i + 1..sets.len()).all(|j| sets[i].intersect(&sets[j]).is_empty()));
        let outside = self.exceptional.iter().all(|(x, _)| sets.iter().all(|s| !s.contains(x)));
        disjoint && outside
    }
}

/// Candidate lines `y = α·x + c` read off the order atoms of `g` that
/// mention `y`.
fn candidate_lines<S: Scalar>(g: &Formula<S>, x: Var, y: Var) -> BTreeSet<(S, ModelElement<S>)> {
    let mut out = BTreeSet::new();
    for atom in g.atoms() {
        let (Atom::HomeEq(t) | Atom::HomeLt(t)) = atom else { continue };
        let (a, rest) = t.split_off(&y);
        if a.is_zero() {
            continue;
        }
        let (b, c) = rest.split_off(&x);
        if !c.is_ground() {
            continue;
        }
        let k = -S::one() / a;
        out.insert((b * k.clone(), c.constant_part().scale(&k)));
    }
    out
}

/// Codes the graph of the partial function `x ↦ y` defined by `f`, whose
/// free variables other than `x`, `y` are bound by `sigma`.
pub fn code_function<S: Scalar>(f: &Formula<S>, x: Var, y: Var, sigma: &Assignment<S>) -> Result<FunctionCode<S>> {
    if !x.is_home() || !y.is_home() || x == y {
        return Err(Error::Sort("a function code needs two distinct home variables".into()));
    }
    let mut sigma = sigma.clone();
    sigma.remove(&x);
    sigma.remove(&y);
    let g = ground_pair(f, x, y, &sigma)?;

    let mut used = g.all_vars();
    used.insert(x);
    used.insert(y);
    let y2 = fresh_var(y, &used);
    let g2 = substitute(&g, y, &Term::Home(HomeTerm::var(y2)))?;
    let functional = Formula::forall(
        x,
        Formula::forall(
            y,
            Formula::forall(
                y2,
                Formula::implies(Formula::and([g.clone(), g2]), Formula::Atom(Atom::eq(&HomeTerm::var(y), &HomeTerm::var(y2)))),
            ),
        ),
    );
    if !decide_sentence(&functional, TheoryMode::Povs)? {
        return Err(Error::NotFunctional(format!("some {x} has two {y}-values")));
    }

    let mut pieces = Vec::new();
    let mut covered = UnarySet::empty();
    for (slope, intercept) in candidate_lines(&g, x, y) {
        let mut line = HomeTerm::scaled_var(x, slope.clone());
        line = &line + &HomeTerm::constant(intercept.clone());
        let on_line = substitute(&g, y, &Term::Home(line))?;
        let domain = UnarySetCode::from_decomposition(&decompose(&on_line, x, &Assignment::new())?);
        let domain = UnarySetCode { frontier: vec![], pieces: domain.pieces };
        if domain.is_empty() {
            continue;
        }
        covered = covered.union(&domain.decomposition().to_unary_set());
        pieces.push(FunctionPiece { slope, intercept, domain });
    }

    let dom = unary_set(&crate::qe::qe(&Formula::exists(y, g.clone()), TheoryMode::Povs)?, x)?;
    let residual = Decomposition::from(&dom.intersect(&covered.complement()));
    if !residual.pieces.is_empty() {
        return Err(Error::InfiniteResidual);
    }
    let mut exceptional = Vec::new();
    for x0 in residual.points {
        let fibre = substitute(&g, x, &Term::Home(HomeTerm::constant(x0.clone())))?;
        let d = decompose(&fibre, y, &Assignment::new())?;
        match (d.points.as_slice(), d.pieces.is_empty()) {
            ([y0], true) => exceptional.push((x0, y0.clone())),
            _ => return Err(Error::Internal(format!("fibre over {x0} is not a single point"))),
        }
    }
    Ok(FunctionCode { exceptional, pieces })
}

/// Grounds `f` in everything but `x` and `y` and eliminates quantifiers.
fn ground_pair<S: Scalar>(f: &Formula<S>, x: Var, y: Var, sigma: &Assignment<S>) -> Result<Formula<S>> {
    let mut g = f.clone();
    for (w, value) in sigma.iter() {
        if !g.free_vars().contains(w) {
            continue;
        }
        let t = match value {
            crate::model::Value::Home(e) => Term::Home(HomeTerm::constant(e.clone())),
            crate::model::Value::Quotient(e) => Term::Quotient(crate::formula::QuotientTerm::constant(e.clone())),
        };
        g = substitute(&g, *w, &t)?;
    }
    let extra: Vec<String> = g.free_vars().into_iter().filter(|w| *w != x && *w != y).map(|w| w.to_string()).collect();
    if !extra.is_empty() {
        return Err(Error::Arity(format!("expected free variables {x}, {y}, also found {}", extra.join(", "))));
    }
    let mode = if g.uses_prec() { TheoryMode::PovsPrec } else { TheoryMode::Povs };
    crate::qe::qe(&g, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_model_element};
    use num_rational::BigRational;

    type R = BigRational;

    fn p(text: &str) -> Formula<R> {
        parse(text, TheoryMode::Povs).unwrap()
    }

    fn code(text: &str) -> UnarySetCode<R> {
        code_unary_set(&p(text), Var::home(1), &Assignment::new()).unwrap()
    }

    fn el(text: &str) -> ModelElement<R> {
        parse_model_element(text).unwrap()
    }

    fn fcode(text: &str) -> Result<FunctionCode<R>> {
        code_function(&p(text), Var::home(1), Var::home(2), &Assignment::new())
    }

    #[test]
    fn set_code_examples() {
        let q = code("Q(x1)");
        assert!(q.frontier.is_empty());
        assert_eq!(q.pieces.len(), 1);
        assert_eq!(q, code("Q(x1) | (Q(x1) & x1 = x1)"));
        let z = code("x1 = 0");
        assert_eq!(z.frontier, vec![el("0")]);
        assert!(z.pieces.is_empty());
        assert!(!codes_equal(&code("Q(x1)"), &code("!Q(x1)")));
        assert!(codes_equal(&code("0 < x1 & x1 < 1 & Q(x1)"), &code("0 < x1 & x1 < 1 & pi(x1) = 0_Q")));
    }

    #[test]
    fn function_code_examples() {
        let c = fcode("(Q(x1) & x2 = 2*x1) | (!Q(x1) & x2 = x1)").unwrap();
        assert!(c.exceptional.is_empty());
        let slopes: Vec<_> = c.pieces.iter().map(|p| (p.slope.clone(), p.intercept.clone())).collect();
        assert_eq!(slopes, vec![(R::from_i64(1), el("0")), (R::from_i64(2), el("0"))]);
        assert_eq!(c.pieces[0].domain, code("!Q(x1)"));
        assert_eq!(c.pieces[1].domain, code("Q(x1)"));
        assert!(c.check_structure());

        let id = fcode("x2 = x1").unwrap();
        assert_eq!(id.pieces.len(), 1);
        assert_eq!(id.pieces[0].domain, code("true"));

        let finite = fcode("x1 = 1 & x2 = 5").unwrap();
        assert!(finite.pieces.is_empty());
        assert_eq!(finite.exceptional, vec![(el("1"), el("5"))]);
    }

    #[test]
    fn function_code_errors() {
        assert!(matches!(fcode("x2 < x1"), Err(Error::NotFunctional(_))));
        assert!(matches!(fcode("x2 = x1 + x3"), Err(Error::Arity(_))));
    }

    #[test]
    fn piecewise_with_points() {
        let c = fcode("(x1 < 0 & x2 = -x1) | (x1 >= 0 & !(x1 = 7) & x2 = x1 + 1) | (x1 = 7 & x2 = 0)").unwrap();
        assert_eq!(c.exceptional, vec![(el("0"), el("1")), (el("7"), el("0"))]);
        assert_eq!(c.pieces.len(), 2);
        assert_eq!(c.apply(&el("7")), Some(el("0")));
        for (x, y) in [("-2", "2"), ("0", "1"), ("3/2", "5/2"), ("r2", "r2 + 1")] {
            assert_eq!(c.apply(&el(x)), Some(el(y)), "{x}");
        }
        assert!(c.check_structure());
    }
}
