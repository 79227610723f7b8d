pub mod decomposition;
pub mod error;
pub mod formula;
pub mod imaginaries;
pub mod measure;
pub mod model;
pub mod qe;
pub mod sample;
pub mod scalar;
pub mod sparse;

pub use error::{Error, ErrorClass, Result};
pub use formula::{Sort, TheoryMode, Var};
pub use model::Model;

/// Arbitrary-precision rationals, the default scalar.
pub type Rational = num_rational::BigRational;

pub type Formula = formula::Formula<Rational>;
pub type Atom = formula::Atom<Rational>;
pub type Literal = formula::Literal<Rational>;
pub type HomeTerm = formula::HomeTerm<Rational>;
pub type QuotientTerm = formula::QuotientTerm<Rational>;
pub type ModelElement = model::ModelElement<Rational>;
pub type QuotientElement = model::QuotientElement<Rational>;
pub type Assignment = model::Assignment<Rational>;
pub type Value = model::Value<Rational>;
pub type Decomposition = decomposition::Decomposition<Rational>;
pub type NearInterval = decomposition::NearInterval<Rational>;
pub type Endpoint = decomposition::Endpoint<Rational>;
pub type UnarySetCode = imaginaries::UnarySetCode<Rational>;
pub type FunctionCode = imaginaries::FunctionCode<Rational>;
pub type MeasureValue = measure::MeasureValue<Rational>;
