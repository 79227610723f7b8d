//! Recursive-descent parser for the surface syntax.
//!
//! ```text
//! formula  := 'true' | 'false' | atom | '!' formula
//!           | formula ('&' | '|' | '->' | '<->') formula
//!           | ('E' | 'A') var '.' formula | '(' formula ')'
//! atom     := term rel term | 'Q(' term ')'
//! rel      := '=' | '!=' | '<' | '<=' | '>' | '>=' | 'prec' | 'preceq'
//! term     := signed sum of [rational '*'] (xN | uN | rP | rational | 'pi(' term ')' | '0_Q')
//! ```
//!
//! Precedence is `!` > `&` > `|` > `->` > `<->`; a quantifier's scope extends
//! as far right as possible. `->`, `<->`, `<=`, `>=`, `!=` and `preceq` are
//! desugared on the spot.

use crate::error::{Error, Result};
use crate::formula::atom::Atom;
use crate::formula::subst::rename_apart;
use crate::formula::term::{HomeTerm, Linear, QuotientTerm};
use crate::formula::var::{Sort, TheoryMode, Var};
use crate::formula::Formula;
use crate::model::is_prime;
use crate::model::{ModelElement, QuotientElement};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    QuotZero,
    Slash,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    Dot,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Iff,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if text[i..].starts_with("_Q") && &text[start..i] == "0" {
                i += 2;
                out.push((Tok::QuotZero, start));
            } else {
                out.push((Tok::Number(text[start..i].to_string()), start));
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let three = text.get(i..i + 3).unwrap_or("");
        let (tok, len) = if three == "<->" {
            (Tok::Iff, 3)
        } else {
            match two {
                "->" => (Tok::Arrow, 2),
                "<=" => (Tok::Le, 2),
                ">=" => (Tok::Ge, 2),
                "!=" => (Tok::Neq, 2),
                "&&" => (Tok::Amp, 2),
                "||" => (Tok::Pipe, 2),
                _ => match c {
                    '/' => (Tok::Slash, 1),
                    '*' => (Tok::Star, 1),
                    '+' => (Tok::Plus, 1),
                    '-' => (Tok::Minus, 1),
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    '.' => (Tok::Dot, 1),
                    '=' => (Tok::Eq, 1),
                    '<' => (Tok::Lt, 1),
                    '>' => (Tok::Gt, 1),
                    '!' | '~' => (Tok::Bang, 1),
                    '&' => (Tok::Amp, 1),
                    '|' => (Tok::Pipe, 1),
                    _ => return Err(Error::parse(i, format!("unexpected character {c:?}"))),
                },
            }
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

/// A term before its sort is known.
struct RawTerm<S: Scalar> {
    home: Linear<S>,
    quot: Linear<S>,
    pushed: Linear<S>,
    constant: ModelElement<S>,
    pi_constant: QuotientElement<S>,
    /// Mentions a home variable or an irrational constant outside `π`.
    home_marked: bool,
    /// Mentions a quotient variable, `π` or `0_Q`.
    quot_marked: bool,
    position: usize,
}

impl<S: Scalar> RawTerm<S> {
    fn new(position: usize) -> Self {
        RawTerm {
            home: Linear::new(),
            quot: Linear::new(),
            pushed: Linear::new(),
            constant: ModelElement::zero(),
            pi_constant: QuotientElement::zero(),
            home_marked: false,
            quot_marked: false,
            position,
        }
    }

    fn sort_hint(&self) -> Result<Option<Sort>> {
        match (self.home_marked, self.quot_marked) {
            (true, true) => Err(Error::Sort(format!("term at byte {} mixes home-sort and quotient-sort summands", self.position))),
            (true, false) => Ok(Some(Sort::Home)),
            (false, true) => Ok(Some(Sort::Quotient)),
            (false, false) => Ok(None),
        }
    }

    fn into_home(self) -> Result<HomeTerm<S>> {
        if self.quot_marked {
            return Err(Error::Sort(format!("expected a home-sort term at byte {}", self.position)));
        }
        Ok(HomeTerm::from_parts(self.home, self.constant))
    }

    fn into_quotient(self) -> Result<QuotientTerm<S>> {
        if self.home_marked || !self.constant.is_zero() {
            return Err(Error::Sort(format!(
                "expected a quotient-sort term at byte {} (home elements must appear under pi)",
                self.position
            )));
        }
        Ok(QuotientTerm::from_parts(self.quot, self.pushed, self.pi_constant))
    }
}

struct Parser<'a, S: Scalar> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    mode: TheoryMode,
    _text: &'a str,
    _marker: std::marker::PhantomData<S>,
}

enum Rel {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Prec,
    PrecEq,
}

/// Parses `text` as a formula of the given theory.
pub fn parse<S: Scalar>(text: &str, mode: TheoryMode) -> Result<Formula<S>> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, mode, _text: text, _marker: std::marker::PhantomData };
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(rename_apart(&f))
}

impl<S: Scalar> Parser<'_, S> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.offset(), msg))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expect_eof(&self) -> Result<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => self.err(format!("unexpected {} after end of formula", describe(t))),
        }
    }

    fn formula(&mut self) -> Result<Formula<S>> {
        let lhs = self.implication()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::Or(vec![
                Formula::And(vec![lhs.clone(), rhs.clone()]),
                Formula::And(vec![Formula::Not(Box::new(lhs)), Formula::Not(Box::new(rhs))]),
            ]));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula<S>> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Or(vec![Formula::Not(Box::new(lhs)), rhs]));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula<S>> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<Formula<S>> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula<S>> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::Ident(name) if (name == "E" || name == "A") && matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.bump();
                let at = self.offset();
                let v = match self.bump() {
                    Tok::Ident(v) => parse_var(&v).ok_or_else(|| Error::parse(at, format!("expected a variable, found {v:?}")))?,
                    _ => unreachable!(),
                };
                if v.sort == Sort::Quotient && !self.mode.has_quotient() {
                    return Err(Error::Mode(format!("quotient variable {v} is not available in theory {}", self.mode)));
                }
                self.expect(Tok::Dot, "'.' after quantified variable")?;
                let body = self.formula()?;
                Ok(if name == "E" { Formula::Exists(v, Box::new(body)) } else { Formula::Forall(v, Box::new(body)) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula<S>> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if name == "Q" && *self.peek_at(1) == Tok::LParen => {
                if !self.mode.has_quotient() {
                    return Err(Error::Mode(format!("predicate Q is not available in theory {}", self.mode)));
                }
                self.bump();
                self.bump();
                let t = self.term()?.into_home()?;
                self.expect(Tok::RParen, "')' closing Q(")?;
                Ok(Formula::Atom(Atom::in_q(t)))
            }
            Tok::Eof => self.err("unexpected end of input"),
            _ => self.relation(),
        }
    }

    fn relation(&mut self) -> Result<Formula<S>> {
        let lhs = self.term()?;
        let at = self.offset();
        let rel = match self.bump() {
            Tok::Eq => Rel::Eq,
            Tok::Neq => Rel::Neq,
            Tok::Lt => Rel::Lt,
            Tok::Le => Rel::Le,
            Tok::Gt => Rel::Gt,
            Tok::Ge => Rel::Ge,
            Tok::Ident(w) if w == "prec" => Rel::Prec,
            Tok::Ident(w) if w == "preceq" => Rel::PrecEq,
            t => return Err(Error::parse(at, format!("expected a relation, found {}", describe(&t)))),
        };
        let rhs = self.term()?;
        let hint = match (lhs.sort_hint()?, rhs.sort_hint()?) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Sort(format!("relation at byte {at} compares a home-sort term with a quotient-sort term")))
            }
            (Some(a), _) | (_, Some(a)) => Some(a),
            (None, None) => None,
        };
        match rel {
            Rel::Prec | Rel::PrecEq => {
                if !self.mode.has_prec() {
                    return Err(Error::Mode(format!("'prec' requires theory povs-prec, not {}", self.mode)));
                }
                let (l, r) = (lhs.into_quotient()?, rhs.into_quotient()?);
                let lt = Formula::Atom(Atom::prec(&l, &r));
                Ok(match rel {
                    Rel::Prec => lt,
                    _ => Formula::Or(vec![lt, Formula::Atom(Atom::quot_equal(&l, &r))]),
                })
            }
            Rel::Eq | Rel::Neq if hint == Some(Sort::Quotient) => {
                let (l, r) = (lhs.into_quotient()?, rhs.into_quotient()?);
                let eq = Formula::Atom(Atom::quot_equal(&l, &r));
                Ok(if matches!(rel, Rel::Eq) { eq } else { Formula::Not(Box::new(eq)) })
            }
            _ => {
                if hint == Some(Sort::Quotient) {
                    return Err(Error::Sort(format!("order relation at byte {at} needs home-sort terms; use prec on the quotient")));
                }
                let (l, r) = (lhs.into_home()?, rhs.into_home()?);
                Ok(match rel {
                    Rel::Eq => Formula::Atom(Atom::eq(&l, &r)),
                    Rel::Neq => Formula::Not(Box::new(Formula::Atom(Atom::eq(&l, &r)))),
                    Rel::Lt => Formula::Atom(Atom::lt(&l, &r)),
                    Rel::Gt => Formula::Atom(Atom::lt(&r, &l)),
                    Rel::Le => Formula::Or(vec![Formula::Atom(Atom::lt(&l, &r)), Formula::Atom(Atom::eq(&l, &r))]),
                    Rel::Ge => Formula::Or(vec![Formula::Atom(Atom::lt(&r, &l)), Formula::Atom(Atom::eq(&l, &r))]),
                    Rel::Prec | Rel::PrecEq => unreachable!(),
                })
            }
        }
    }

    fn term(&mut self) -> Result<RawTerm<S>> {
        let mut raw = RawTerm::new(self.offset());
        let mut sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -S::one()
            }
            Tok::Plus => {
                self.bump();
                S::one()
            }
            _ => S::one(),
        };
        loop {
            self.summand(&mut raw, sign)?;
            sign = match self.peek() {
                Tok::Plus => S::one(),
                Tok::Minus => -S::one(),
                _ => break,
            };
            self.bump();
        }
        Ok(raw)
    }

    fn rational(&mut self) -> Result<Option<S>> {
        let Tok::Number(n) = self.peek().clone() else { return Ok(None) };
        let at = self.offset();
        self.bump();
        let mut text = n;
        if *self.peek() == Tok::Slash {
            self.bump();
            match self.bump() {
                Tok::Number(d) if d.bytes().any(|b| b != b'0') => {
                    text.push('/');
                    text.push_str(&d);
                }
                _ => return Err(Error::parse(at, "expected a nonzero denominator")),
            }
        }
        text.parse::<S>().map(Some).map_err(|_| Error::parse(at, format!("rational {text} out of range")))
    }

    fn summand(&mut self, raw: &mut RawTerm<S>, sign: S) -> Result<()> {
        let at = self.offset();
        let coefficient = match self.rational()? {
            Some(q) => {
                if *self.peek() != Tok::Star {
                    raw.constant.add_scaled(&ModelElement::one(), &(sign * q));
                    return Ok(());
                }
                self.bump();
                sign * q
            }
            None => sign,
        };
        let at_atom = self.offset();
        match self.bump() {
            Tok::QuotZero => {
                raw.quot_marked = true;
            }
            Tok::Ident(name) if name == "pi" => {
                if !self.mode.has_quotient() {
                    return Err(Error::Mode(format!("pi is not available in theory {}", self.mode)));
                }
                self.expect(Tok::LParen, "'(' after pi")?;
                let inner = self.term()?;
                self.expect(Tok::RParen, "')' closing pi(")?;
                let inner = inner.into_home()?;
                raw.pushed.add_scaled(inner.linear(), &coefficient);
                raw.pi_constant.add_scaled(&inner.constant_part().project(), &coefficient);
                raw.quot_marked = true;
            }
            Tok::Ident(name) => {
                if let Some(v) = parse_var(&name) {
                    if v.is_home() {
                        raw.home.add_at(v, coefficient);
                        raw.home_marked = true;
                    } else {
                        if !self.mode.has_quotient() {
                            return Err(Error::Mode(format!("quotient variable {v} is not available in theory {}", self.mode)));
                        }
                        raw.quot.add_at(v, coefficient);
                        raw.quot_marked = true;
                    }
                } else if let Some(p) = name.strip_prefix('r').and_then(|d| d.parse::<u32>().ok()) {
                    if !is_prime(p) {
                        return Err(Error::parse(at_atom, format!("basis constant r{p} needs a prime radicand")));
                    }
                    raw.constant.add_scaled(&ModelElement::sqrt(p), &coefficient);
                    raw.home_marked = true;
                } else {
                    return Err(Error::parse(at_atom, format!("unexpected identifier {name:?} in term")));
                }
            }
            t => return Err(Error::parse(if at_atom == at { at } else { at_atom }, format!("expected a term, found {}", describe(&t)))),
        }
        Ok(())
    }
}

fn parse_var(name: &str) -> Option<Var> {
    let (first, digits) = name.split_at_checked(1)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let index = digits.parse().ok()?;
    match first {
        "x" => Some(Var::home(index)),
        "u" => Some(Var::quotient(index)),
        _ => None,
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("{s:?}"),
        Tok::Number(n) => format!("number {n}"),
        Tok::Eof => "end of input".to_string(),
        other => {
            let sym = match other {
                Tok::QuotZero => "0_Q",
                Tok::Slash => "/",
                Tok::Star => "*",
                Tok::Plus => "+",
                Tok::Minus => "-",
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::Dot => ".",
                Tok::Eq => "=",
                Tok::Neq => "!=",
                Tok::Lt => "<",
                Tok::Le => "<=",
                Tok::Gt => ">",
                Tok::Ge => ">=",
                Tok::Bang => "!",
                Tok::Amp => "&",
                Tok::Pipe => "|",
                Tok::Arrow => "->",
                Tok::Iff => "<->",
                Tok::Ident(_) | Tok::Number(_) | Tok::Eof => unreachable!(),
            };
            format!("'{sym}'")
        }
    }
}

/// Parses a model element literal such as `3/2 + 1/3*r2 - r5`.
pub fn parse_model_element<S: Scalar>(text: &str) -> Result<ModelElement<S>> {
    let toks = lex(text)?;
    let mut p: Parser<'_, S> = Parser { toks, pos: 0, mode: TheoryMode::Povs, _text: text, _marker: std::marker::PhantomData };
    let raw = p.term()?;
    p.expect_eof()?;
    if raw.quot_marked || !raw.home.is_zero() {
        return Err(Error::parse(0, "a model element literal may only contain rationals and rP constants"));
    }
    Ok(raw.constant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type F = Formula<BigRational>;

    fn p(text: &str) -> F {
        parse(text, TheoryMode::PovsPrec).unwrap()
    }

    fn q(n: i64) -> BigRational {
        Scalar::from_i64(n)
    }

    #[test]
    fn exists_positive_rational() {
        let f = parse::<BigRational>("E x1. (x1 > 0 & Q(x1))", TheoryMode::Povs).unwrap();
        let x1 = Var::home(1);
        let expected = Formula::Exists(
            x1,
            Box::new(Formula::And(vec![
                Formula::Atom(Atom::HomeLt(HomeTerm::scaled_var(x1, q(-1)))),
                Formula::Atom(Atom::InQ(HomeTerm::var(x1))),
            ])),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn pi_equation_normalizes() {
        let f = p("pi(x1) = u1");
        let Formula::Atom(Atom::QuotEq(s)) = f else { panic!("expected QuotEq") };
        assert_eq!(s.coefficient(&Var::home(1)), q(1));
        assert_eq!(s.coefficient(&Var::quotient(1)), q(-1));
        assert!(s.constant_part().is_zero());
    }

    #[test]
    fn prec_requires_expansion() {
        let err = parse::<BigRational>("x1 prec 0", TheoryMode::Povs).unwrap_err();
        assert!(matches!(err, Error::Mode(_)), "{err:?}");
        let err = parse::<BigRational>("u1 prec 0", TheoryMode::Povs).unwrap_err();
        assert!(matches!(err, Error::Mode(_)), "{err:?}");
    }

    #[test]
    fn sort_errors() {
        for text in ["x1 = u1", "pi(x1) < x2", "pi(u1) = u2", "u1 = 1", "u1 = r2", "Q(u1)", "x1 + u1 = 0"] {
            let err = parse::<BigRational>(text, TheoryMode::PovsPrec).unwrap_err();
            assert!(matches!(err, Error::Sort(_)), "{text}: {err:?}");
        }
    }

    #[test]
    fn mode_errors_in_ovs() {
        for text in ["Q(x1)", "E u1. true", "pi(x1) = pi(x2)"] {
            let err = parse::<BigRational>(text, TheoryMode::Ovs).unwrap_err();
            assert!(matches!(err, Error::Mode(_)), "{text}: {err:?}");
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse::<BigRational>("x1 < ", TheoryMode::Povs).unwrap_err() {
            Error::Parse { position, .. } => assert_eq!(position, 5),
            e => panic!("{e:?}"),
        }
        match parse::<BigRational>("x1 < 2 )", TheoryMode::Povs).unwrap_err() {
            Error::Parse { position, .. } => assert_eq!(position, 7),
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse::<BigRational>("x1 < r4", TheoryMode::Povs), Err(Error::Parse { .. })));
        assert!(matches!(parse::<BigRational>("x1 < 1/0", TheoryMode::Povs), Err(Error::Parse { .. })));
    }

    #[test]
    fn precedence_and_scope() {
        let f = p("!Q(x1) & x1 < 1 | x1 = 2 -> x2 = 0");
        let Formula::Or(parts) = &f else { panic!("{f:?}") };
        assert!(matches!(parts[0], Formula::Not(_)));
        assert!(matches!(parts[1], Formula::Atom(Atom::HomeEq(_))));
        let g = p("x2 = 0 & E x1. x1 < x2 | x1 = x2");
        let Formula::And(parts) = &g else { panic!("{g:?}") };
        assert!(matches!(&parts[1], Formula::Exists(_, body) if matches!(**body, Formula::Or(_))));
    }

    #[test]
    fn constants_and_zero_q() {
        let f = p("u1 = 0_Q");
        assert_eq!(f.to_string(), "u1 = 0");
        let g = p("x1 < 3/2 + 1/3*r2 - r5");
        assert_eq!(g.to_string(), "x1 + r5 < 3/2 + 1/3*r2");
        assert_eq!(p("pi(x1 + 7) = pi(r2)").to_string(), "pi(x1) = pi(r2)");
    }

    #[test]
    fn model_element_literals() {
        let e: ModelElement<BigRational> = parse_model_element("3/2 + 1/3*r2 - r5").unwrap();
        assert_eq!(e.coefficient(5), q(-1));
        assert!(parse_model_element::<BigRational>("x1").is_err());
    }
}
