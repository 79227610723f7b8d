//! Terms in linear normal form.
//!
//! A home term is `Σ a_i·x_i + c` with `c` a model element (a rational
//! multiple of `1` when the term is purely symbolic). A quotient term is
//! `Σ b_j·u_j + π(Σ a_i·x_i) + e`: by linearity of `π` every application is
//! aggregated into one, and the constant part of its argument is projected
//! into the quotient constant `e`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::formula::var::Var;
use crate::model::{ModelElement, QuotientElement};
use crate::scalar::Scalar;
use crate::sparse::SparseVec;

pub type Linear<S> = SparseVec<Var, S>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HomeTerm<S: Scalar> {
    linear: Linear<S>,
    constant: ModelElement<S>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuotientTerm<S: Scalar> {
    linear: Linear<S>,
    pushed: Linear<S>,
    constant: QuotientElement<S>,
}

/// A term of either sort, as accepted by substitution.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term<S: Scalar> {
    Home(HomeTerm<S>),
    Quotient(QuotientTerm<S>),
}

impl<S: Scalar> HomeTerm<S> {
    pub fn zero() -> Self {
        HomeTerm { linear: Linear::new(), constant: ModelElement::zero() }
    }

    /// Panics if `v` is not home-sorted.
    pub fn var(v: Var) -> Self {
        Self::scaled_var(v, S::one())
    }

    pub fn scaled_var(v: Var, coefficient: S) -> Self {
        assert!(v.is_home(), "{v} is not a home-sort variable");
        HomeTerm { linear: Linear::unit(v, coefficient), constant: ModelElement::zero() }
    }

    pub fn constant(c: ModelElement<S>) -> Self {
        HomeTerm { linear: Linear::new(), constant: c }
    }

    pub fn rational(q: S) -> Self {
        Self::constant(ModelElement::rational(q))
    }

    pub fn from_parts(linear: Linear<S>, constant: ModelElement<S>) -> Self {
        assert!(linear.keys().all(Var::is_home), "home term with quotient variables");
        HomeTerm { linear, constant }
    }

    pub fn linear(&self) -> &Linear<S> {
        &self.linear
    }

    pub fn constant_part(&self) -> &ModelElement<S> {
        &self.constant
    }

    pub fn coefficient(&self, v: &Var) -> S {
        self.linear.coefficient(v)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.linear.keys().copied()
    }

    pub fn is_ground(&self) -> bool {
        self.linear.is_zero()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.linear.get(v).is_some()
    }

    /// Removes the `v` summand, returning its coefficient and the rest.
    pub fn split_off(&self, v: &Var) -> (S, HomeTerm<S>) {
        let mut rest = self.clone();
        let a = rest.linear.remove(v).unwrap_or_else(S::zero);
        (a, rest)
    }

    pub fn scale(&self, factor: &S) -> Self {
        HomeTerm { linear: self.linear.scale(factor), constant: self.constant.scale(factor) }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        self.linear.add_scaled(&other.linear, factor);
        self.constant.add_scaled(&other.constant, factor);
    }

    pub fn substitute(&self, v: &Var, t: &HomeTerm<S>) -> Self {
        let (a, mut rest) = self.split_off(v);
        rest.add_scaled(t, &a);
        rest
    }

    /// Coefficient used to put atoms in canonical form: the first variable
    /// coefficient, else the leading constant coefficient.
    pub(crate) fn lead(&self) -> Option<S> {
        self.linear.first().map(|(_, c)| c.clone()).or_else(|| self.constant.terms().next().map(|(_, c)| c.clone()))
    }
}

impl<S: Scalar> QuotientTerm<S> {
    pub fn zero() -> Self {
        QuotientTerm { linear: Linear::new(), pushed: Linear::new(), constant: QuotientElement::zero() }
    }

    /// Panics if `v` is not quotient-sorted.
    pub fn var(v: Var) -> Self {
        assert!(!v.is_home(), "{v} is not a quotient-sort variable");
        QuotientTerm { linear: Linear::unit(v, S::one()), ..Self::zero() }
    }

    /// `π(t)`.
    pub fn pi(t: &HomeTerm<S>) -> Self {
        QuotientTerm { linear: Linear::new(), pushed: t.linear.clone(), constant: t.constant.project() }
    }

    pub fn constant(e: QuotientElement<S>) -> Self {
        QuotientTerm { constant: e, ..Self::zero() }
    }

    pub fn from_parts(linear: Linear<S>, pushed: Linear<S>, constant: QuotientElement<S>) -> Self {
        assert!(linear.keys().all(|v| !v.is_home()), "quotient term with home variables outside pi");
        assert!(pushed.keys().all(Var::is_home), "pi applied to quotient variables");
        QuotientTerm { linear, pushed, constant }
    }

    pub fn linear(&self) -> &Linear<S> {
        &self.linear
    }

    /// The linear part of the aggregated `π` argument.
    pub fn pushed(&self) -> &Linear<S> {
        &self.pushed
    }

    pub fn constant_part(&self) -> &QuotientElement<S> {
        &self.constant
    }

    pub fn coefficient(&self, v: &Var) -> S {
        if v.is_home() {
            self.pushed.coefficient(v)
        } else {
            self.linear.coefficient(v)
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.linear.keys().chain(self.pushed.keys()).copied()
    }

    pub fn is_ground(&self) -> bool {
        self.linear.is_zero() && self.pushed.is_zero()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.linear.get(v).is_some() || self.pushed.get(v).is_some()
    }

    /// Removes the summand of `v` (either `b·v` or `a·π(v)`), returning its
    /// coefficient and the rest.
    pub fn split_off(&self, v: &Var) -> (S, QuotientTerm<S>) {
        let mut rest = self.clone();
        let a = if v.is_home() { rest.pushed.remove(v) } else { rest.linear.remove(v) };
        (a.unwrap_or_else(S::zero), rest)
    }

    pub fn scale(&self, factor: &S) -> Self {
        QuotientTerm { linear: self.linear.scale(factor), pushed: self.pushed.scale(factor), constant: self.constant.scale(factor) }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        self.linear.add_scaled(&other.linear, factor);
        self.pushed.add_scaled(&other.pushed, factor);
        self.constant.add_scaled(&other.constant, factor);
    }

    /// Replaces the home variable `v` (which can only occur under `π`).
    pub fn substitute_home(&self, v: &Var, t: &HomeTerm<S>) -> Self {
        let (a, mut rest) = self.split_off(v);
        rest.add_scaled(&QuotientTerm::pi(t), &a);
        rest
    }

    pub fn substitute_quotient(&self, v: &Var, t: &QuotientTerm<S>) -> Self {
        let (a, mut rest) = self.split_off(v);
        rest.add_scaled(t, &a);
        rest
    }

    pub(crate) fn lead(&self) -> Option<S> {
        self.linear
            .first()
            .or_else(|| self.pushed.first())
            .map(|(_, c)| c.clone())
            .or_else(|| self.constant.terms().next().map(|(_, c)| c.clone()))
    }
}

impl<S: Scalar> Term<S> {
    pub fn vars(&self) -> BTreeSet<Var> {
        match self {
            Term::Home(t) => t.vars().collect(),
            Term::Quotient(t) => t.vars().collect(),
        }
    }
}

macro_rules! linear_ops {
    ($ty:ident) => {
        impl<S: Scalar> Add for &$ty<S> {
            type Output = $ty<S>;
            fn add(self, rhs: Self) -> $ty<S> {
                let mut out = self.clone();
                out.add_scaled(rhs, &S::one());
                out
            }
        }

        impl<S: Scalar> Sub for &$ty<S> {
            type Output = $ty<S>;
            fn sub(self, rhs: Self) -> $ty<S> {
                let mut out = self.clone();
                out.add_scaled(rhs, &-S::one());
                out
            }
        }

        impl<S: Scalar> Neg for &$ty<S> {
            type Output = $ty<S>;
            fn neg(self) -> $ty<S> {
                self.scale(&-S::one())
            }
        }
    };
}

linear_ops!(HomeTerm);
linear_ops!(QuotientTerm);

use crate::model::{basis_name, write_signed_sum};

fn write_home_sum<S: Scalar>(f: &mut fmt::Formatter<'_>, linear: &Linear<S>, constant: &ModelElement<S>) -> fmt::Result {
    if linear.is_zero() && constant.is_zero() {
        return f.write_str("0");
    }
    let mut first = true;
    write_signed_sum(f, linear.iter().map(|(v, c)| (v.to_string(), c)), &mut first)?;
    write_signed_sum(f, constant.terms().map(|(k, c)| (basis_name(k), c)), &mut first)
}

impl<S: Scalar> fmt::Display for HomeTerm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_home_sum(f, &self.linear, &self.constant)
    }
}

impl<S: Scalar> fmt::Display for QuotientTerm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let has_pi = !self.pushed.is_zero() || !self.constant.is_zero();
        if self.linear.is_zero() && !has_pi {
            return f.write_str("0");
        }
        let mut first = true;
        write_signed_sum(f, self.linear.iter().map(|(v, c)| (v.to_string(), c)), &mut first)?;
        if has_pi {
            if !first {
                f.write_str(" + ")?;
            }
            f.write_str("pi(")?;
            write_home_sum(f, &self.pushed, &self.constant.section())?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for Term<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Home(t) => t.fmt(f),
            Term::Quotient(t) => t.fmt(f),
        }
    }
}
