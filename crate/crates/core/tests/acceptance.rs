//! Acceptance criteria 1 to 9. Runs without the libtest harness and prints
//! one `PASS`/`FAIL` line per criterion; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::One;
use pairqe::decomposition::{decompose, is_small};
use pairqe::formula::{literals_of, parse, to_dnf, to_nnf, Atom, Formula as F, HomeTerm, Literal, QuotientTerm, TheoryMode, Var};
use pairqe::imaginaries::{code_function, code_unary_set};
use pairqe::measure::{bucket_partition, measure};
use pairqe::model::{eval, Model};
use pairqe::qe::{decide_sentence, qe, split_atom};
use pairqe::sample::{
    probe_points, random_assignment, random_dnf, random_element, random_home_term, random_nested, random_qf_formula,
    random_quotient_element, random_quotient_term, random_single_quantifier, random_unary_formula, GenConfig,
};
use pairqe::{Assignment, Formula, ModelElement, QuotientElement, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn ok<T>(r: pairqe::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn x(i: u32) -> Var {
    Var::home(i)
}

fn u(i: u32) -> Var {
    Var::quotient(i)
}

fn at(v: Var, e: &ModelElement) -> Assignment {
    Assignment::new().with_home(v, e.clone())
}

fn oracle(model: &Model, f: &Formula, sigma: &Assignment, ordered: bool) -> Result<bool, String> {
    let F::Exists(v, body) = f else { return Err("expected an existential".into()) };
    let lits: Vec<Literal<Rational>> = ok(literals_of(body), "literals")?;
    if v.is_home() {
        Ok(ok(model.oracle_exists_home(&lits, *v, sigma), "oracle")?.0)
    } else {
        Ok(ok(model.oracle_exists_quotient(&lits, *v, sigma, ordered), "oracle")?.0)
    }
}

fn c1_qe_vs_oracle() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let modes = [TheoryMode::Ovs, TheoryMode::Povs, TheoryMode::PovsPrec];
    let start = Instant::now();
    let mut checks = 0;
    for i in 0..500 {
        let mode = modes[i % 3];
        let cfg = GenConfig::new(mode);
        let v = if mode.has_quotient() && rng.gen_bool(0.35) { u(1) } else { x(1) };
        let f: Formula = random_single_quantifier(&mut rng, &cfg, &model, v);
        let g = ok(qe(&f, mode), "qe")?;
        for _ in 0..20 {
            let s = random_assignment(&mut rng, &model, f.free_vars());
            let expected = oracle(&model, &f, &s, mode.has_prec())?;
            ensure!(ok(eval(&g, &s), "eval")? == expected, "{f} ~> {g} disagrees with the oracle at {s:?}");
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "{checks} checks took {elapsed:?}");
    Ok(format!("{checks}/10000 checks agree in {:.2}s", elapsed.as_secs_f64()))
}

fn c2_nested() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        let mode = if i % 2 == 0 { TheoryMode::Povs } else { TheoryMode::PovsPrec };
        let cfg = GenConfig::new(mode);
        let n = rng.gen_range(2..=3);
        let f: Formula = random_nested(&mut rng, &cfg, &model, n);
        let g = ok(qe(&f, mode), "qe")?;
        ensure!(g.is_quantifier_free(), "qe({f}) = {g} has a quantifier");
        let h = ok(qe(&g, mode), "re-qe")?;
        for _ in 0..10 {
            let s = random_assignment(&mut rng, &model, f.free_vars());
            ensure!(ok(eval(&g, &s), "eval")? == ok(eval(&h, &s), "eval")?, "re-elimination of {g} changed it at {s:?}");
        }
    }
    Ok("200 formulas quantifier-free and idempotent".into())
}

fn c3_sentence_table() -> Outcome {
    use TheoryMode::*;
    let table: [(&str, TheoryMode, bool); 12] = [
        ("E x1. (Q(x1) & !Q(x1))", Povs, false),
        ("E x1. (0 < x1 & x1 < 1 & !Q(x1))", Povs, true),
        ("A u1. E x1. (pi(x1) = u1 & 0 < x1 & x1 < 1)", Povs, true),
        ("A x1. A x2. (x1 < x2 -> E x3. (x1 < x3 & x3 < x2 & Q(x3)))", Povs, true),
        ("A x1. A x2. (x1 < x2 -> E x3. (x1 < x3 & x3 < x2 & !Q(x3)))", Povs, true),
        ("A x1. (Q(x1) -> x1 >= 0)", Povs, false),
        ("E x1. E x2. (x1 < x2 & Q(x2 - x1))", Povs, true),
        ("A x1. (Q(x1) | Q(x1 - r2))", Povs, false),
        ("E u1. u1 != pi(1)", Povs, true),
        ("E x1. A x2. x2 <= x1", Ovs, false),
        ("A u1. A u2. (u1 prec u2 -> E u3. (u1 prec u3 & u3 prec u2))", PovsPrec, true),
        ("E u1. A u2. (u2 prec u1 | u2 = u1)", PovsPrec, false),
    ];
    for (text, mode, expected) in table {
        let f: Formula = ok(parse(text, mode), text)?;
        ensure!(ok(decide_sentence(&f, mode), text)? == expected, "{text} should be {expected}");
    }
    Ok("12/12 sentences decided as expected".into())
}

fn c4_decomposition() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = GenConfig { home_vars: vec![x(1), x(2)], quotient_vars: vec![u(1)], ..GenConfig::new(TheoryMode::Povs) };
    let mut samples = 0;
    for _ in 0..100 {
        let f: Formula = random_dnf(&mut rng, &cfg, &model, Some(x(1)), 3, 3);
        let params = random_assignment(&mut rng, &model, f.free_vars().into_iter().filter(|v| *v != x(1)));
        let d = ok(decompose(&f, x(1), &params), "decompose")?;
        ensure!(d.check_structure(), "{f}: malformed decomposition {d}");
        let mut probes = probe_points(&mut rng, &model, &d, 0);
        probes.truncate(1000);
        while probes.len() < 1000 {
            probes.push(random_element(&mut rng, &model));
        }
        for p in &probes {
            let mut s = params.clone();
            ok(s.insert(x(1), pairqe::Value::Home(p.clone())), "assign")?;
            ensure!(d.contains(p) == ok(eval(&f, &s), "eval")?, "{f} at x1 = {p} under {params:?}: decomposition {d}");
            samples += 1;
        }
    }
    Ok(format!("{samples} probes, zero discrepancies"))
}

/// A Boolean combination of atoms in which `x1` occurs only under `pi`.
fn random_pullback(rng: &mut ChaCha8Rng, model: &Model, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let k = Rational::from_integer(rng.gen_range(1..=3).into());
        let c = if rng.gen_bool(0.3) { QuotientElement::zero() } else { random_quotient_element(rng, model) };
        let lhs = QuotientTerm::pi(&HomeTerm::scaled_var(x(1), k));
        let a = Atom::quot_equal(&lhs, &QuotientTerm::constant(c));
        return if rng.gen_bool(0.6) { F::Atom(a) } else { F::not(F::Atom(a)) };
    }
    let parts: Vec<Formula> = (0..rng.gen_range(2..=3)).map(|_| random_pullback(rng, model, depth - 1)).collect();
    match rng.gen_range(0..3) {
        0 => F::and(parts),
        1 => F::or(parts),
        _ => F::not(F::or(parts)),
    }
}

fn c5_ultrafilter() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let none = Assignment::new();
    for _ in 0..100 {
        let g = random_pullback(&mut rng, &model, 3);
        let a = ok(decompose(&g, x(1), &none), "decompose")?;
        let b = ok(decompose(&F::not(g.clone()), x(1), &none), "decompose")?;
        ensure!(is_small(&a) != is_small(&b), "{g}: small(set) = {}, small(complement) = {}", is_small(&a), is_small(&b));
    }
    Ok("100 pullback sets, exactly one side small each time".into())
}

fn mu(f: &Formula) -> Result<ModelElement, String> {
    Ok(ok(measure(f, x(1), &Assignment::new()), "measure")?.value)
}

fn c6_measure() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = |t: &str| -> Result<Formula, String> { ok(parse(t, TheoryMode::Povs), t) };
    ensure!(mu(&p("0 < x1 & x1 < 1")?)? == ModelElement::one(), "normalization");
    ensure!(mu(&p("Q(x1)")?)?.is_zero(), "Q is null");

    for _ in 0..100 {
        let f: Formula = random_unary_formula(&mut rng, TheoryMode::Povs, &model, x(1));
        let g0: Formula = random_unary_formula(&mut rng, TheoryMode::Povs, &model, x(1));
        let g = F::and([g0, F::not(f.clone())]);
        let overlap = F::and([f.clone(), g.clone(), p("0 < x1 & x1 < 1")?]);
        ensure!(ok(decompose(&overlap, x(1), &Assignment::new()), "decompose")?.is_empty(), "pair not disjoint");
        let lhs = mu(&F::or([f.clone(), g.clone()]))?;
        let rhs = &mu(&f)? + &mu(&g)?;
        ensure!(lhs == rhs, "additivity fails for {f} and {g}: {lhs} vs {rhs}");
    }

    for _ in 0..100 {
        let f: Formula = random_unary_formula(&mut rng, TheoryMode::Povs, &model, x(1));
        let h: Formula = random_unary_formula(&mut rng, TheoryMode::Povs, &model, x(1));
        let (a, b) = if rng.gen_bool(0.5) { (F::and([f.clone(), h]), f) } else { (f.clone(), F::or([f, h])) };
        let counter = F::exists(x(1), F::and([a.clone(), F::not(b.clone())]));
        ensure!(!ok(decide_sentence(&counter, TheoryMode::Povs), "decide")?, "{a} does not imply {b}");
        let (ma, mb) = (mu(&a)?, mu(&b)?);
        ensure!(ma <= mb, "monotonicity fails: {a} has {ma} > {mb}");
    }

    let cfg = GenConfig { home_vars: vec![x(1), x(2)], quotient_vars: vec![], ..GenConfig::new(TheoryMode::Povs) };
    let mut pairs = 0;
    for k in [5u64, 10, 100] {
        let kk = Rational::from_integer(k.into());
        for _ in 0..200 {
            let f: Formula = random_qf_formula(&mut rng, &cfg, &model, Some(x(1)), 2);
            let params: Vec<Assignment> = (0..2).map(|_| at(x(2), &random_element(&mut rng, &model))).collect();
            let report = ok(bucket_partition(&f, x(1), &params, k), "buckets")?;
            for e in &report.entries {
                let j = Rational::from_integer(e.bucket.into());
                let upper = ModelElement::rational(&j / &kk);
                let lower = ModelElement::rational((&j - Rational::one()) / &kk);
                ensure!(e.measure.value <= upper, "bucket {} too low for {}", e.bucket, e.measure.value);
                ensure!(e.bucket == 1 || e.measure.value > lower, "bucket {} too high for {}", e.bucket, e.measure.value);
            }
            let (a, b) = (&report.entries[0], &report.entries[1]);
            if a.bucket == b.bucket {
                let gap = &a.measure.value - &b.measure.value;
                let bound = ModelElement::rational(Rational::from_integer(2.into()) / &kk);
                ensure!(gap <= bound && gap.scale(&-Rational::one()) <= bound, "same bucket but |{gap}| > 2/{k}");
            }
            ensure!(report.within_bound(), "report disagrees with its own bound");
            pairs += 1;
        }
    }
    Ok(format!("normalization, 100 additivity, 100 monotonicity, {pairs} bucket pairs"))
}

/// A randomly chosen Boolean rewriting of `f` into an equivalent formula.
fn rewrite(rng: &mut ChaCha8Rng, f: &Formula, g: &Formula) -> Formula {
    match rng.gen_range(0..6) {
        0 => to_nnf(f),
        1 => to_dnf(f).unwrap(),
        2 => F::not(F::not(f.clone()).negate_inside()),
        3 => F::or([f.clone(), F::and([f.clone(), g.clone()])]),
        4 => F::or([F::and([f.clone(), g.clone()]), F::and([f.clone(), F::not(g.clone())])]),
        _ => shuffle(rng, f),
    }
}

trait NegateInside {
    fn negate_inside(self) -> Self;
}

impl NegateInside for Formula {
    /// `!f` pushed one level down by De Morgan.
    fn negate_inside(self) -> Self {
        match self {
            F::Not(inner) => match *inner {
                F::And(parts) => F::or(parts.into_iter().map(F::not)),
                F::Or(parts) => F::and(parts.into_iter().map(F::not)),
                other => F::not(other),
            },
            other => other,
        }
    }
}

fn shuffle(rng: &mut ChaCha8Rng, f: &Formula) -> Formula {
    match f {
        F::And(parts) | F::Or(parts) => {
            let mut parts: Vec<Formula> = parts.iter().map(|p| shuffle(rng, p)).collect();
            parts.shuffle(rng);
            if matches!(f, F::And(_)) {
                F::And(parts)
            } else {
                F::Or(parts)
            }
        }
        F::Not(inner) => F::Not(Box::new(shuffle(rng, inner))),
        other => other.clone(),
    }
}

/// Pointwise line `y = a x + b` on the region where `cond` holds.
struct Branch {
    cond: Formula,
    slope: Rational,
    intercept: ModelElement,
}

fn c7_codes() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let none = Assignment::new();
    let unary = |rng: &mut ChaCha8Rng| -> Formula { random_unary_formula(rng, TheoryMode::Povs, &model, x(1)) };

    for _ in 0..100 {
        let f = unary(&mut rng);
        let g = unary(&mut rng);
        let mut h = rewrite(&mut rng, &f, &g);
        h = rewrite(&mut rng, &h, &g);
        let (cf, ch) = (ok(code_unary_set(&f, x(1), &none), "code")?, ok(code_unary_set(&h, x(1), &none), "code")?);
        ensure!(cf == ch, "{f} and its rewriting {h} have different codes");
    }

    let mut distinct = 0;
    let mut attempts = 0;
    while distinct < 100 {
        attempts += 1;
        ensure!(attempts < 10_000, "could not find 100 inequivalent pairs");
        let f = unary(&mut rng);
        let g = if rng.gen_bool(0.5) { unary(&mut rng) } else { F::and([f.clone(), unary(&mut rng)]) };
        let (cf, cg) = (ok(code_unary_set(&f, x(1), &none), "code")?, ok(code_unary_set(&g, x(1), &none), "code")?);
        let mut probes = probe_points(&mut rng, &model, &cf.decomposition(), 50);
        probes.extend(probe_points(&mut rng, &model, &cg.decomposition(), 50));
        let mut witness = None;
        for p in probes {
            if ok(eval(&f, &at(x(1), &p)), "eval")? != ok(eval(&g, &at(x(1), &p)), "eval")? {
                witness = Some(p);
                break;
            }
        }
        if let Some(p) = witness {
            ensure!(cf != cg, "{f} and {g} differ at {p} but share a code");
            distinct += 1;
        }
    }

    let mut samples = 0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let exceptional: Vec<(ModelElement, ModelElement)> =
            (0..rng.gen_range(0..=2)).map(|_| (random_element(&mut rng, &model), random_element(&mut rng, &model))).collect();
        let mut branches: Vec<Branch> = Vec::new();
        let mut taken: Vec<Formula> =
            exceptional.iter().map(|(a, _)| F::Atom(Atom::eq(&HomeTerm::var(x(1)), &HomeTerm::constant(a.clone())))).collect();
        for _ in 0..n {
            let c = unary(&mut rng);
            let cond = F::and(std::iter::once(c.clone()).chain(taken.iter().map(|t| F::not(t.clone()))));
            taken.push(c);
            let slope = Rational::from_integer(rng.gen_range(-3..=3).into());
            branches.push(Branch { cond, slope, intercept: random_element(&mut rng, &model) });
        }
        let line = |slope: &Rational, intercept: &ModelElement| -> HomeTerm<Rational> {
            let mut t = HomeTerm::scaled_var(x(1), slope.clone());
            t.add_scaled(&HomeTerm::constant(intercept.clone()), &Rational::one());
            t
        };
        let y = HomeTerm::var(x(2));
        let mut disjuncts: Vec<Formula> =
            branches.iter().map(|b| F::and([b.cond.clone(), F::Atom(Atom::eq(&y, &line(&b.slope, &b.intercept)))])).collect();
        for (a, b) in &exceptional {
            disjuncts.push(F::and([
                F::Atom(Atom::eq(&HomeTerm::var(x(1)), &HomeTerm::constant(a.clone()))),
                F::Atom(Atom::eq(&y, &HomeTerm::constant(b.clone()))),
            ]));
        }
        let f = F::or(disjuncts);
        let code = ok(code_function(&f, x(1), x(2), &none), "code_function")?;
        ensure!(code.check_structure(), "{f}: overlapping pieces");
        let dom = ok(decompose(&F::or(taken.clone()), x(1), &none), "decompose")?;
        let mut probes = probe_points(&mut rng, &model, &dom, 0);
        for p in &code.pieces {
            probes.extend(probe_points(&mut rng, &model, &p.domain.decomposition(), 0));
        }
        probes.sort();
        probes.dedup();
        probes.truncate(1000);
        while probes.len() < 1000 {
            probes.push(random_element(&mut rng, &model));
        }
        for p in &probes {
            let expected = match exceptional.iter().find(|(a, _)| a == p) {
                Some((_, b)) => Some(b.clone()),
                None => {
                    let mut hit = None;
                    for b in &branches {
                        if ok(eval(&b.cond, &at(x(1), p)), "eval")? {
                            let mut v = b.intercept.clone();
                            v.add_scaled(p, &b.slope);
                            hit = Some(v);
                            break;
                        }
                    }
                    hit
                }
            };
            ensure!(code.apply(p) == expected, "{f} at {p}: code gives {:?}, expected {expected:?}", code.apply(p));
            samples += 1;
        }
    }
    Ok(format!("100 equal codes, 100 distinct codes ({attempts} tries), {samples} function samples"))
}

fn c8_split_atom() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = GenConfig::new(TheoryMode::PovsPrec);
    let kinds: [fn(&mut ChaCha8Rng, &GenConfig, &Model) -> pairqe::Atom; 5] = [
        |r, c, m| Atom::home_eq(random_home_term(r, c, m, None)),
        |r, c, m| Atom::home_lt(random_home_term(r, c, m, None)),
        |r, c, m| Atom::in_q(random_home_term(r, c, m, None)),
        |r, c, m| Atom::quot_eq(random_quotient_term(r, c, m, None)),
        |r, c, m| Atom::quot_prec(random_quotient_term(r, c, m, None)),
    ];
    for make in kinds {
        for _ in 0..1000 {
            let a = make(&mut rng, &cfg, &model);
            let parts = split_atom(&a);
            ensure!(parts.home.is_some() != parts.quotient.is_some(), "{a}: exactly one part expected");
            let s = random_assignment(&mut rng, &model, a.vars());
            let t = ok(parts.image_assignment(&s), "images")?;
            ensure!(ok(eval(&F::Atom(a.clone()), &s), "eval")? == ok(eval(&parts.conjunction(), &t), "eval")?, "{a} at {s:?}");
        }
    }
    Ok("5000/5000 ground instances agree".into())
}

fn c9_expansion() -> Outcome {
    let model = Model::new(3);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = GenConfig::new(TheoryMode::Povs);
    for _ in 0..200 {
        let n = rng.gen_range(1..=2);
        let f: Formula = random_nested(&mut rng, &cfg, &model, n);
        let a = ok(qe(&f, TheoryMode::Povs), "qe")?;
        let b = ok(qe(&f, TheoryMode::PovsPrec), "qe")?;
        for _ in 0..10 {
            let s = random_assignment(&mut rng, &model, f.free_vars());
            ensure!(ok(eval(&a, &s), "eval")? == ok(eval(&b, &s), "eval")?, "{f} differs between modes at {s:?}");
        }
    }
    let cfg = GenConfig::new(TheoryMode::PovsPrec);
    let mut found = 0;
    while found < 200 {
        let v = if rng.gen_bool(0.5) { x(1) } else { u(1) };
        let f: Formula = random_single_quantifier(&mut rng, &cfg, &model, v);
        if !f.uses_prec() {
            continue;
        }
        found += 1;
        let g = ok(qe(&f, TheoryMode::PovsPrec), "qe")?;
        for _ in 0..10 {
            let s = random_assignment(&mut rng, &model, f.free_vars());
            ensure!(ok(eval(&g, &s), "eval")? == oracle(&model, &f, &s, true)?, "{f} ~> {g} disagrees at {s:?}");
        }
    }
    Ok("200 conservative, 200 ordered instances agree with the oracle".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 qe agrees with the oracle", c1_qe_vs_oracle),
        ("2 nested qe", c2_nested),
        ("3 sentence table", c3_sentence_table),
        ("4 decomposition partition", c4_decomposition),
        ("5 ultrafilter property", c5_ultrafilter),
        ("6 measure suite", c6_measure),
        ("7 code invariance", c7_codes),
        ("8 split_atom soundness", c8_split_atom),
        ("9 expansion conservativity", c9_expansion),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}; {secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}; {secs:.2}s)");
            }
        }
    }
    println!("{} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
