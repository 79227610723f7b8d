use std::collections::BTreeSet;

use crate::error::Result;
use crate::formula::{fresh_var, Atom, Formula, Linear, QuotientTerm, Var};
use crate::model::{eval_home_term, Assignment, Value};
use crate::scalar::Scalar;

/// An atom separated into its pure order part and its pure quotient part.
/// The quotient part is stated over fresh quotient variables, `images`
/// recording which home variable each one is the `π`-image of.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitAtom<S: Scalar> {
    pub home: Option<Formula<S>>,
    pub quotient: Option<Formula<S>>,
    pub images: Vec<(Var, Var)>,
}

impl<S: Scalar> SplitAtom<S> {
    /// Extends `sigma` with the `π`-images of the home values.
    pub fn image_assignment(&self, sigma: &Assignment<S>) -> Result<Assignment<S>> {
        let mut out = sigma.clone();
        for (image, x) in &self.images {
            let e = eval_home_term(&crate::formula::HomeTerm::var(*x), sigma)?;
            out.insert(*image, Value::Quotient(e.project()))?;
        }
        Ok(out)
    }

    /// The conjunction of both parts.
    pub fn conjunction(&self) -> Formula<S> {
        Formula::and(self.home.iter().chain(&self.quotient).cloned())
    }
}

fn over_images<S: Scalar>(s: &QuotientTerm<S>, used: &mut BTreeSet<Var>, images: &mut Vec<(Var, Var)>) -> QuotientTerm<S> {
    let mut linear: Linear<S> = s.linear().clone();
    for (x, c) in s.pushed().iter() {
        let image = fresh_var(Var::quotient(0), used);
        used.insert(image);
        images.push((image, *x));
        linear.add_at(image, c.clone());
    }
    QuotientTerm::from_parts(linear, Linear::new(), s.constant_part().clone())
}

/// Splits an atom into an order atom or a quotient atom over `π`-images.
/// `t ∈ Q` becomes `π(t) = 0_Q`.
pub fn split_atom<S: Scalar>(a: &Atom<S>) -> SplitAtom<S> {
    let mut used: BTreeSet<Var> = a.vars().into_iter().collect();
    let mut images = Vec::new();
    match a {
        Atom::HomeEq(_) | Atom::HomeLt(_) => SplitAtom { home: Some(a.clone().into()), quotient: None, images },
        Atom::InQ(t) => {
            let s = over_images(&QuotientTerm::pi(t), &mut used, &mut images);
            SplitAtom { home: None, quotient: Some(Atom::quot_eq(s).into()), images }
        }
        Atom::QuotEq(s) => {
            let s = over_images(s, &mut used, &mut images);
            SplitAtom { home: None, quotient: Some(Atom::quot_eq(s).into()), images }
        }
        Atom::QuotPrec(s) => {
            let s = over_images(s, &mut used, &mut images);
            SplitAtom { home: None, quotient: Some(Atom::quot_prec(s).into()), images }
        }
    }
}
