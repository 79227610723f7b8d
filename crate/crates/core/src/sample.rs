//! Seeded random generation of elements, terms, literals, formulas and
//! assignments, used by the self-check harness and the test suites.
//!
//! Constants are drawn from a small grid (numerators in `-2..=2`,
//! denominators in `{1, 2}`) so that coincidences between cosets, which are
//! the interesting cases, happen with noticeable probability.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::decomposition::{Decomposition, Polarity};
use crate::formula::{rename_apart, Atom, Formula, HomeTerm, Linear, Literal, QuotientTerm, TheoryMode, Var};
use crate::model::{rationals_between, Assignment, Model, ModelElement, QuotientElement, Value};
use crate::scalar::Scalar;

/// Shape of generated formulas.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub mode: TheoryMode,
    /// Coefficients on variables are drawn from `-coeff_bound..=coeff_bound`.
    pub coeff_bound: i64,
    pub max_literals: usize,
    pub home_vars: Vec<Var>,
    pub quotient_vars: Vec<Var>,
}

impl GenConfig {
    pub fn new(mode: TheoryMode) -> Self {
        let quotient_vars = if mode.has_quotient() { vec![Var::quotient(1), Var::quotient(2)] } else { vec![] };
        GenConfig { mode, coeff_bound: 3, max_literals: 6, home_vars: vec![Var::home(1), Var::home(2), Var::home(3)], quotient_vars }
    }
}

pub fn small_rational<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    S::ratio(rng.gen_range(-2..=2), rng.gen_range(1..=2))
}

fn nonzero_coefficient<S: Scalar, R: Rng + ?Sized>(rng: &mut R, bound: i64) -> S {
    let c = rng.gen_range(1..=bound.max(1));
    S::from_i64(if rng.gen_bool(0.5) { c } else { -c })
}

pub fn random_element<S: Scalar, R: Rng + ?Sized>(rng: &mut R, model: &Model) -> ModelElement<S> {
    let mut terms = vec![(0, small_rational(rng))];
    for &p in model.primes() {
        if rng.gen_bool(0.5) {
            terms.push((p, small_rational(rng)));
        }
    }
    ModelElement::from_terms(terms)
}

pub fn random_quotient_element<S: Scalar, R: Rng + ?Sized>(rng: &mut R, model: &Model) -> QuotientElement<S> {
    random_element(rng, model).project()
}

/// Values for every variable in `vars`.
pub fn random_assignment<S: Scalar, R: Rng + ?Sized>(rng: &mut R, model: &Model, vars: impl IntoIterator<Item = Var>) -> Assignment<S> {
    vars.into_iter()
        .map(|v| {
            let value =
                if v.is_home() { Value::Home(random_element(rng, model)) } else { Value::Quotient(random_quotient_element(rng, model)) };
            (v, value)
        })
        .collect()
}

fn random_linear<S: Scalar, R: Rng + ?Sized>(rng: &mut R, vars: &[Var], focus: Option<Var>, bound: i64) -> Linear<S> {
    let mut l = Linear::new();
    for v in vars {
        let p = if Some(*v) == focus { 0.85 } else { 0.35 };
        if rng.gen_bool(p) {
            l.add_at(*v, nonzero_coefficient(rng, bound));
        }
    }
    l
}

/// A home term over `cfg.home_vars`; `focus` is included with high
/// probability.
pub fn random_home_term<S: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, model: &Model, focus: Option<Var>) -> HomeTerm<S> {
    let linear = random_linear(rng, &cfg.home_vars, focus, cfg.coeff_bound);
    let constant = if rng.gen_bool(0.6) { random_element(rng, model) } else { ModelElement::zero() };
    HomeTerm::from_parts(linear, constant)
}

pub fn random_quotient_term<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GenConfig,
    model: &Model,
    focus: Option<Var>,
) -> QuotientTerm<S> {
    let linear = random_linear(rng, &cfg.quotient_vars, focus, cfg.coeff_bound);
    let pushed = random_linear(rng, &cfg.home_vars, focus, cfg.coeff_bound);
    let constant = if rng.gen_bool(0.4) { random_quotient_element(rng, model) } else { QuotientElement::zero() };
    QuotientTerm::from_parts(linear, pushed, constant)
}

/// A random atom legal in `cfg.mode`, biased towards mentioning `focus`.
pub fn random_atom<S: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, model: &Model, focus: Option<Var>) -> Atom<S> {
    let mut kinds = vec![0, 0, 1, 1, 1];
    if cfg.mode.has_quotient() {
        kinds.extend([2, 2, 3, 3]);
    }
    if cfg.mode.has_prec() {
        kinds.extend([4, 4]);
    }
    match *kinds.choose(rng).unwrap() {
        0 => Atom::home_eq(random_home_term(rng, cfg, model, focus)),
        1 => Atom::home_lt(random_home_term(rng, cfg, model, focus)),
        2 => Atom::in_q(random_home_term(rng, cfg, model, focus)),
        3 => Atom::quot_eq(random_quotient_term(rng, cfg, model, focus)),
        _ => Atom::quot_prec(random_quotient_term(rng, cfg, model, focus)),
    }
}

pub fn random_literal<S: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, model: &Model, focus: Option<Var>) -> Literal<S> {
    Literal { atom: random_atom(rng, cfg, model, focus), positive: rng.gen_bool(0.7) }
}

/// Between one and `cfg.max_literals` literals, most of them mentioning
/// `focus`.
pub fn random_conjunction<S: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, model: &Model, focus: Option<Var>) -> Vec<Literal<S>> {
    let n = rng.gen_range(1..=cfg.max_literals.max(1));
    (0..n).map(|_| random_literal(rng, cfg, model, focus)).collect()
}

/// A quantifier-free formula of the given Boolean depth.
pub fn random_qf_formula<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GenConfig,
    model: &Model,
    focus: Option<Var>,
    depth: usize,
) -> Formula<S> {
    if depth == 0 || rng.gen_bool(0.3) {
        return Literal::to_formula(&random_literal(rng, cfg, model, focus));
    }
    let n = rng.gen_range(2..=3);
    let parts: Vec<_> = (0..n).map(|_| random_qf_formula(rng, cfg, model, focus, depth - 1)).collect();
    match rng.gen_range(0..5) {
        0 | 1 => Formula::and(parts),
        2 | 3 => Formula::or(parts),
        _ => Formula::not(Formula::and(parts)),
    }
}

/// A disjunction of up to `clauses` random conjunctions of up to `literals`
/// literals each, optionally negated as a whole.
pub fn random_dnf<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GenConfig,
    model: &Model,
    focus: Option<Var>,
    clauses: usize,
    literals: usize,
) -> Formula<S> {
    let n = rng.gen_range(1..=clauses.max(1));
    let f = Formula::or((0..n).map(|_| {
        let m = rng.gen_range(1..=literals.max(1));
        Formula::and((0..m).map(|_| random_literal(rng, cfg, model, focus).to_formula()))
    }));
    if rng.gen_bool(0.25) {
        Formula::not(f)
    } else {
        f
    }
}

/// A quantifier-free formula whose only variable is the home variable `v`.
pub fn random_unary_formula<S: Scalar, R: Rng + ?Sized>(rng: &mut R, mode: TheoryMode, model: &Model, v: Var) -> Formula<S> {
    let mode = if mode.has_prec() { TheoryMode::Povs } else { mode };
    let cfg = GenConfig { home_vars: vec![v], quotient_vars: vec![], ..GenConfig::new(mode) };
    random_dnf(rng, &cfg, model, Some(v), 3, 3)
}

/// `E v.` followed by a random conjunction.
pub fn random_single_quantifier<S: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, model: &Model, v: Var) -> Formula<S> {
    let lits = random_conjunction(rng, cfg, model, Some(v));
    Formula::exists(v, Formula::and(lits.iter().map(Literal::to_formula)))
}

/// A formula with `quantifiers` nested quantifiers whose kinds alternate and
/// whose bound variables are drawn from both sorts when available.
pub fn random_nested<S: Scalar, R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig, model: &Model, quantifiers: usize) -> Formula<S> {
    let mut pool: Vec<Var> = cfg.home_vars.clone();
    pool.extend(cfg.quotient_vars.iter().copied());
    pool.shuffle(rng);
    let bound: Vec<Var> = pool.into_iter().take(quantifiers).collect();
    let mut f = random_qf_formula(rng, cfg, model, bound.first().copied(), 2);
    let mut universal = rng.gen_bool(0.5);
    for v in bound {
        f = if universal { Formula::forall(v, f) } else { Formula::exists(v, f) };
        universal = !universal;
        if rng.gen_bool(0.5) {
            let extra = random_qf_formula(rng, cfg, model, None, 1);
            f = if rng.gen_bool(0.5) { Formula::and([extra, f]) } else { Formula::or([extra, f]) };
        }
    }
    rename_apart(&f)
}

/// Points chosen to stress a decomposition: its points, finite endpoints,
/// elements of every listed coset inside each piece, elements of unlisted
/// cosets inside large pieces, elements of the gaps, and `extra` random
/// elements.
pub fn probe_points<S: Scalar, R: Rng + ?Sized>(rng: &mut R, model: &Model, d: &Decomposition<S>, extra: usize) -> Vec<ModelElement<S>> {
    let mut out: Vec<ModelElement<S>> = d.points.clone();
    let mut boundaries: Vec<ModelElement<S>> = d.points.clone();
    for piece in &d.pieces {
        let (a, b) = (piece.a.value(), piece.b.value());
        boundaries.extend(a.cloned());
        boundaries.extend(b.cloned());
        let mut cosets = piece.cosets.clone();
        if piece.polarity == Polarity::Cofinite {
            cosets.extend(unlisted_cosets(rng, model, &piece.cosets, 2));
        }
        for c in cosets {
            out.extend(in_coset_between(&c, a, b, 2));
        }
    }
    boundaries.sort();
    boundaries.dedup();
    out.extend(boundaries.iter().cloned());
    let nudges = [ModelElement::rational(S::ratio(1, 997)), ModelElement::sqrt(model.primes()[0]).scale(&S::ratio(1, 1009))];
    for b in &boundaries {
        for n in &nudges {
            out.push(b + n);
            out.push(b - n);
        }
    }
    let mut edges: Vec<Option<&ModelElement<S>>> = vec![None];
    edges.extend(boundaries.iter().map(Some));
    edges.push(None);
    for w in edges.windows(2) {
        for q in rationals_between(w[0], w[1], 1) {
            out.extend(S::from_big_rational(&q).map(ModelElement::rational));
        }
        if let (Some(a), Some(b)) = (w[0], w[1]) {
            let mid = (a + b).scale(&S::ratio(1, 2));
            out.push(mid);
        }
    }
    out.extend((0..extra).map(|_| random_element(rng, model)));
    out.sort();
    out.dedup();
    out
}

/// Up to `count` cosets outside `listed`, the rational coset first.
fn unlisted_cosets<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    model: &Model,
    listed: &[QuotientElement<S>],
    count: usize,
) -> Vec<QuotientElement<S>> {
    let mut out = Vec::new();
    let zero = QuotientElement::zero();
    if !listed.contains(&zero) {
        out.push(zero);
    }
    for _ in 0..50 {
        if out.len() >= count {
            break;
        }
        let c = random_quotient_element(rng, model);
        if !listed.contains(&c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// `count` elements of the coset `c` strictly between `a` and `b`.
fn in_coset_between<S: Scalar>(
    c: &QuotientElement<S>,
    a: Option<&ModelElement<S>>,
    b: Option<&ModelElement<S>>,
    count: usize,
) -> Vec<ModelElement<S>> {
    let section = c.section();
    let lo = a.map(|a| a - &section);
    let hi = b.map(|b| b - &section);
    rationals_between(lo.as_ref(), hi.as_ref(), count)
        .iter()
        .filter_map(S::from_big_rational)
        .map(|q| &section + &ModelElement::rational(q))
        .collect()
}
