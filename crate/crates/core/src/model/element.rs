//! Elements of the reference model `M_d = Q + Q·√2 + Q·√3 + …` and of its
//! quotient `M_d / Q`.
//!
//! A [`ModelElement`] is stored as a finitely supported map from radicands to
//! rational coefficients. Key `0` is the unit `1`; any other key is a prime `p`
//! standing for `√p`. Square roots of distinct primes are linearly independent
//! over `Q`, so an element is zero exactly when its map is empty and equality
//! is structural. The order is the real order, decided exactly by interval
//! refinement.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;
use crate::sparse::SparseVec;

/// Radicand key for the rational unit.
pub const UNIT: u32 = 0;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u32> {
    (2u32..).filter(|&n| is_prime(n)).take(count).collect()
}

/// An element of the home sort of the reference model.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModelElement<S: Scalar> {
    coeffs: SparseVec<u32, S>,
}

/// An element of the quotient sort `M / Q`; the rational part is gone.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuotientElement<S: Scalar> {
    coeffs: SparseVec<u32, S>,
}

fn check_radicand(key: u32) {
    assert!(key == UNIT || is_prime(key), "radicand {key} is neither 0 nor a prime");
}

impl<S: Scalar> ModelElement<S> {
    pub fn zero() -> Self {
        ModelElement { coeffs: SparseVec::new() }
    }

    pub fn one() -> Self {
        Self::rational(S::one())
    }

    pub fn rational(q: S) -> Self {
        ModelElement { coeffs: SparseVec::unit(UNIT, q) }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::rational(S::from_i64(n))
    }

    /// `√p` for a prime `p`.
    ///
    /// Panics if `p` is not prime.
    pub fn sqrt(p: u32) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        ModelElement { coeffs: SparseVec::unit(p, S::one()) }
    }

    /// Builds an element from `(radicand, coefficient)` pairs.
    ///
    /// Panics on a radicand that is neither `0` nor prime.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, S)>) -> Self {
        let coeffs: SparseVec<u32, S> = terms.into_iter().inspect(|(k, _)| check_radicand(*k)).collect();
        ModelElement { coeffs }
    }

    pub fn coefficient(&self, radicand: u32) -> S {
        self.coeffs.coefficient(&radicand)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &S)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn radicands(&self) -> impl Iterator<Item = u32> + '_ {
        self.coeffs.keys().copied().filter(|&k| k != UNIT)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    /// Membership in the distinguished subspace `Q(M) = Q·1`.
    pub fn is_rational(&self) -> bool {
        self.coeffs.keys().all(|&k| k == UNIT)
    }

    pub fn rational_part(&self) -> S {
        self.coefficient(UNIT)
    }

    /// The natural quotient map `π : M → M/Q`.
    pub fn project(&self) -> QuotientElement<S> {
        let mut coeffs = self.coeffs.clone();
        coeffs.remove(&UNIT);
        QuotientElement { coeffs }
    }

    pub fn scale(&self, factor: &S) -> Self {
        ModelElement { coeffs: self.coeffs.scale(factor) }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        self.coeffs.add_scaled(&other.coeffs, factor);
    }

    /// Exact sign under the real embedding.
    pub fn signum(&self) -> Ordering {
        if self.coeffs.len() <= 1 {
            return self.coeffs.leading_sign();
        }
        let (ints, _) = self.integer_form();
        let mut bits = 32u32;
        loop {
            let (lo, hi) = scaled_enclosure(&ints, bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            // Nonzero by linear independence, so refinement terminates.
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Integer coefficients `n_k` and a positive denominator `D` with
    /// `self = (Σ n_k √k) / D`.
    fn integer_form(&self) -> (Vec<(u32, BigInt)>, BigInt) {
        let qs: Vec<(u32, BigRational)> = self.terms().map(|(k, v)| (k, v.to_big_rational())).collect();
        let den = qs.iter().fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
        let ints = qs.into_iter().map(|(k, q)| (k, q.numer() * (&den / q.denom()))).collect();
        (ints, den)
    }

    /// Rational enclosure `lo ≤ self ≤ hi` of width at most `Σ|c_k| · 2^-bits`.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let (ints, den) = self.integer_form();
        let (lo, hi) = scaled_enclosure(&ints, bits);
        let scale = den << bits as usize;
        (BigRational::new(lo, scale.clone()), BigRational::new(hi, scale))
    }

    /// Midpoint of a tight enclosure.
    pub fn approx(&self, bits: u32) -> BigRational {
        let (lo, hi) = self.enclosure(bits);
        (lo + hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.approx(64);
        crate::scalar::approx_f64(&q)
    }

    /// Greatest integer not exceeding the element.
    pub fn floor(&self) -> BigInt {
        let guess = self.approx(16).floor().to_integer();
        let mut n = guess;
        let big = |n: &BigInt| ModelElement::<BigRational>::rational(BigRational::from_integer(n.clone()));
        let me = self.to_big();
        while big(&n) > me {
            n -= 1;
        }
        while big(&(&n + 1)) <= me {
            n += 1;
        }
        n
    }

    /// Least integer not below the element.
    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// The same element with arbitrary-precision coefficients.
    pub fn to_big(&self) -> ModelElement<BigRational> {
        ModelElement { coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.to_big_rational())).collect() }
    }

    pub fn from_big(e: &ModelElement<BigRational>) -> Option<Self> {
        let mut coeffs = SparseVec::new();
        for (k, v) in e.terms() {
            coeffs.add_at(k, S::from_big_rational(v)?);
        }
        Some(ModelElement { coeffs })
    }

    /// Decimal rendering with `digits` fractional digits (truncated toward
    /// negative infinity at the last digit).
    pub fn to_decimal(&self, digits: usize) -> String {
        let factor = num_traits::pow(BigInt::from(10), digits);
        let n = self.to_big().scale(&BigRational::from_integer(factor.clone())).floor();
        let negative = n.is_negative();
        let (int, frac) = n.abs().div_rem(&factor);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&int.to_string());
        if digits > 0 {
            out.push('.');
            out.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
        }
        out
    }
}

/// Enclosure of `Σ n_k √k` scaled by `2^bits`, as integers.
fn scaled_enclosure(ints: &[(u32, BigInt)], bits: u32) -> (BigInt, BigInt) {
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for (k, n) in ints {
        if *k == UNIT {
            let v = n << bits as usize;
            lo += &v;
            hi += &v;
            continue;
        }
        let s = (BigInt::from(*k) << (2 * bits) as usize).sqrt();
        let s1 = &s + 1;
        if n.is_positive() {
            lo += n * &s;
            hi += n * &s1;
        } else {
            lo += n * &s1;
            hi += n * &s;
        }
    }
    (lo, hi)
}

/// `count` distinct rationals strictly between `lower` and `upper`
/// (`None` meaning unbounded). Requires `lower < upper`.
pub fn rationals_between<S: Scalar>(lower: Option<&ModelElement<S>>, upper: Option<&ModelElement<S>>, count: usize) -> Vec<BigRational> {
    let one = BigRational::one();
    let step = |j: usize| BigRational::from_integer(BigInt::from(j as u64));
    match (lower, upper) {
        (None, None) => (0..count).map(|j| step(j) / BigRational::from_integer(BigInt::from(2))).collect(),
        (Some(a), None) => {
            let base = BigRational::from_integer(a.floor()) + &one;
            (0..count).map(|j| &base + step(j)).collect()
        }
        (None, Some(b)) => {
            let base = BigRational::from_integer(b.ceil()) - &one;
            (0..count).map(|j| &base - step(j)).collect()
        }
        (Some(a), Some(b)) => {
            debug_assert!(a < b);
            let mut bits = 8u32;
            let (a_hi, b_lo) = loop {
                let (_, a_hi) = a.enclosure(bits);
                let (b_lo, _) = b.enclosure(bits);
                if a_hi < b_lo {
                    break (a_hi, b_lo);
                }
                bits *= 2;
            };
            let width = &b_lo - &a_hi;
            let parts = BigRational::from_integer(BigInt::from(count as u64 + 1));
            (1..=count).map(|j| &a_hi + &width * step(j) / &parts).collect()
        }
    }
}

/// Exact sign of `a - b` in the real embedding; the same as `a.cmp(b)`.
pub fn compare<S: Scalar>(a: &ModelElement<S>, b: &ModelElement<S>) -> Ordering {
    a.cmp(b)
}

impl<S: Scalar> PartialOrd for ModelElement<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for ModelElement<S> {
    /// The real order.
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<S: Scalar> Add for &ModelElement<S> {
    type Output = ModelElement<S>;
    fn add(self, rhs: Self) -> ModelElement<S> {
        ModelElement { coeffs: &self.coeffs + &rhs.coeffs }
    }
}

impl<S: Scalar> Sub for &ModelElement<S> {
    type Output = ModelElement<S>;
    fn sub(self, rhs: Self) -> ModelElement<S> {
        ModelElement { coeffs: &self.coeffs - &rhs.coeffs }
    }
}

impl<S: Scalar> Neg for &ModelElement<S> {
    type Output = ModelElement<S>;
    fn neg(self) -> ModelElement<S> {
        ModelElement { coeffs: -&self.coeffs }
    }
}

impl<S: Scalar> QuotientElement<S> {
    pub fn zero() -> Self {
        QuotientElement { coeffs: SparseVec::new() }
    }

    /// `π(√p)`.
    pub fn sqrt(p: u32) -> Self {
        ModelElement::<S>::sqrt(p).project()
    }

    /// Builds an element from `(prime, coefficient)` pairs; rational parts
    /// are not allowed.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, S)>) -> Self {
        let coeffs: SparseVec<u32, S> =
            terms.into_iter().inspect(|(k, _)| assert!(is_prime(*k), "quotient coordinates are indexed by primes, got {k}")).collect();
        QuotientElement { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn coefficient(&self, prime: u32) -> S {
        self.coeffs.coefficient(&prime)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &S)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    /// The canonical section: the coset representative with zero rational part.
    pub fn section(&self) -> ModelElement<S> {
        ModelElement { coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, factor: &S) -> Self {
        QuotientElement { coeffs: self.coeffs.scale(factor) }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        self.coeffs.add_scaled(&other.coeffs, factor);
    }

    pub fn to_big(&self) -> QuotientElement<BigRational> {
        QuotientElement { coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.to_big_rational())).collect() }
    }

    pub fn from_big(e: &QuotientElement<BigRational>) -> Option<Self> {
        let mut coeffs = SparseVec::new();
        for (k, v) in e.terms() {
            coeffs.add_at(k, S::from_big_rational(v)?);
        }
        Some(QuotientElement { coeffs })
    }
}

/// The order `≺` on the quotient sort: lexicographic on coefficient vectors
/// over the basis `√2 < √3 < √5 < …`. This is the only place that defines it.
pub fn prec_cmp<S: Scalar>(a: &QuotientElement<S>, b: &QuotientElement<S>) -> Ordering {
    (&a.coeffs - &b.coeffs).leading_sign()
}

impl<S: Scalar> PartialOrd for QuotientElement<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for QuotientElement<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        prec_cmp(self, other)
    }
}

impl<S: Scalar> Add for &QuotientElement<S> {
    type Output = QuotientElement<S>;
    fn add(self, rhs: Self) -> QuotientElement<S> {
        QuotientElement { coeffs: &self.coeffs + &rhs.coeffs }
    }
}

impl<S: Scalar> Sub for &QuotientElement<S> {
    type Output = QuotientElement<S>;
    fn sub(self, rhs: Self) -> QuotientElement<S> {
        QuotientElement { coeffs: &self.coeffs - &rhs.coeffs }
    }
}

impl<S: Scalar> Neg for &QuotientElement<S> {
    type Output = QuotientElement<S>;
    fn neg(self) -> QuotientElement<S> {
        QuotientElement { coeffs: -&self.coeffs }
    }
}

/// Writes `Σ c_k·b_k` in the surface syntax, e.g. `3/2 + 1/3*r2 - r5`.
pub(crate) fn write_signed_sum<'a, S: Scalar + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl IntoIterator<Item = (String, &'a S)>,
    first: &mut bool,
) -> fmt::Result {
    for (name, c) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if *first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        *first = false;
        if name.is_empty() {
            write!(f, "{abs}")?;
        } else if abs.is_one() {
            f.write_str(&name)?;
        } else {
            write!(f, "{abs}*{name}")?;
        }
    }
    Ok(())
}

pub(crate) fn basis_name(radicand: u32) -> String {
    if radicand == UNIT {
        String::new()
    } else {
        format!("r{radicand}")
    }
}

impl<S: Scalar> fmt::Display for ModelElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        write_signed_sum(f, self.terms().map(|(k, c)| (basis_name(k), c)), &mut first)
    }
}

impl<S: Scalar> fmt::Display for QuotientElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        write!(f, "pi({})", self.section())
    }
}

// JSON form: an object keyed by radicand, e.g. {"0": "3/2", "2": "1/3"}.

fn serialize_terms<'a, S: Scalar + 'a, Ser: serde::Serializer>(
    terms: impl Iterator<Item = (u32, &'a S)>,
    serializer: Ser,
) -> Result<Ser::Ok, Ser::Error> {
    use serde::ser::SerializeMap;
    let terms: Vec<_> = terms.collect();
    let mut map = serializer.serialize_map(Some(terms.len()))?;
    for (k, v) in terms {
        map.serialize_entry(&k.to_string(), &v.to_string())?;
    }
    map.end()
}

fn deserialize_terms<'de, S: Scalar, D: serde::Deserializer<'de>>(
    deserializer: D,
    allow_unit: bool,
) -> Result<SparseVec<u32, S>, D::Error> {
    use serde::de::Error as _;
    let raw: std::collections::BTreeMap<String, String> = serde::Deserialize::deserialize(deserializer)?;
    let mut coeffs = SparseVec::new();
    for (k, v) in raw {
        let key: u32 = k.parse().map_err(|_| D::Error::custom(format!("bad radicand {k:?}")))?;
        if !(key == UNIT && allow_unit || is_prime(key)) {
            return Err(D::Error::custom(format!("radicand {key} is not allowed here")));
        }
        let c: S = v.parse().map_err(|_| D::Error::custom(format!("bad rational {v:?}")))?;
        coeffs.add_at(key, c);
    }
    Ok(coeffs)
}

impl<S: Scalar> serde::Serialize for ModelElement<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serialize_terms(self.terms(), serializer)
    }
}

impl<'de, S: Scalar> serde::Deserialize<'de> for ModelElement<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(ModelElement { coeffs: deserialize_terms(deserializer, true)? })
    }
}

impl<S: Scalar> serde::Serialize for QuotientElement<S> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serialize_terms(self.terms(), serializer)
    }
}

impl<'de, S: Scalar> serde::Deserialize<'de> for QuotientElement<S> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(QuotientElement { coeffs: deserialize_terms(deserializer, false)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = ModelElement<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        Scalar::ratio(n, d)
    }

    /// Sign of `a + b√p` by squaring, independent of interval refinement.
    fn sign_by_squaring(a: &BigRational, b: &BigRational, p: u32) -> Ordering {
        let zero = BigRational::zero();
        let sa = a.cmp(&zero);
        let sb = b.cmp(&zero);
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = a * a;
        let pb2 = b * b * BigRational::from_integer(BigInt::from(p));
        if a2 > pb2 {
            sa
        } else {
            sb
        }
    }

    #[test]
    fn three_halves_exceeds_sqrt_two() {
        let a = E::rational(q(3, 2));
        assert_eq!(a.cmp(&E::sqrt(2)), Ordering::Greater);
        assert_eq!(sign_by_squaring(&q(3, 2), &q(-1, 1), 2), Ordering::Greater);
    }

    #[test]
    fn sum_of_roots_below_seven_halves() {
        let s = &E::sqrt(2) + &E::sqrt(3);
        assert_eq!(s.cmp(&s.clone()), Ordering::Equal);
        assert_eq!(s.cmp(&E::rational(q(7, 2))), Ordering::Less);
        let (lo, hi) = s.enclosure(40);
        assert!(lo <= hi && hi < q(7, 2) && lo > q(314, 100));
    }

    #[test]
    fn squaring_oracle_agrees_on_binomials() {
        for a in -6..=6 {
            for b in -6..=6 {
                for p in [2u32, 3, 5, 7] {
                    let (a, b) = (q(a, 2), q(b, 3));
                    let e = E::from_terms([(UNIT, a.clone()), (p, b.clone())]);
                    let expected = if a.is_zero() && b.is_zero() { Ordering::Equal } else { sign_by_squaring(&a, &b, p) };
                    assert_eq!(e.signum(), expected, "{e}");
                }
            }
        }
    }

    #[test]
    fn projection_kills_rationals() {
        let a = E::from_terms([(UNIT, q(2, 3)), (2, q(1, 1))]);
        assert_eq!(a.project(), QuotientElement::sqrt(2));
        assert!(E::rational(q(5, 7)).project().is_zero());
        assert_eq!(a.project().section(), E::sqrt(2));
    }

    #[test]
    fn floor_ceil_and_decimal() {
        let a = &E::sqrt(2) - &E::one();
        assert_eq!(a.floor(), BigInt::zero());
        assert_eq!(a.ceil(), BigInt::one());
        assert_eq!(a.to_decimal(6), "0.414213");
        assert_eq!((-&a).to_decimal(3), "-0.415");
        assert_eq!(E::from_i64(2).floor(), BigInt::from(2));
        assert_eq!(E::from_i64(2).ceil(), BigInt::from(2));
    }

    #[test]
    fn rationals_between_are_strict() {
        let a = E::sqrt(2);
        let b = &E::sqrt(2) + &E::rational(q(1, 1000));
        for r in rationals_between(Some(&a), Some(&b), 5) {
            let r = E::rational(r);
            assert!(a < r && r < b);
        }
        for r in rationals_between(Some(&a), None, 3) {
            assert!(E::rational(r) > a);
        }
        for r in rationals_between(None, Some(&a), 3) {
            assert!(E::rational(r) < a);
        }
    }

    #[test]
    fn display_uses_surface_syntax() {
        let a = E::from_terms([(UNIT, q(3, 2)), (2, q(1, 3)), (5, q(-1, 1))]);
        assert_eq!(a.to_string(), "3/2 + 1/3*r2 - r5");
        assert_eq!(E::zero().to_string(), "0");
        assert_eq!(a.project().to_string(), "pi(1/3*r2 - r5)");
    }

    #[test]
    fn prec_is_lexicographic() {
        let a = QuotientElement::<BigRational>::from_terms([(2, q(1, 1)), (3, q(-100, 1))]);
        let b = QuotientElement::from_terms([(3, q(5, 1))]);
        assert_eq!(prec_cmp(&a, &b), Ordering::Greater);
        assert_eq!(prec_cmp(&b, &QuotientElement::zero()), Ordering::Greater);
    }
}
