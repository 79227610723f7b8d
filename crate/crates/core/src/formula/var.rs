use std::fmt;

use serde::{Deserialize, Serialize};

/// The two sorts of the language: the ordered space itself and its quotient
/// by the distinguished subspace.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Sort {
    Home,
    Quotient,
}

/// A variable, rendered `x<index>` in the home sort and `u<index>` in the
/// quotient sort.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var {
    pub sort: Sort,
    pub index: u32,
}

impl Var {
    pub const fn home(index: u32) -> Self {
        Var { sort: Sort::Home, index }
    }

    pub const fn quotient(index: u32) -> Self {
        Var { sort: Sort::Quotient, index }
    }

    pub fn is_home(&self) -> bool {
        self.sort == Sort::Home
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sort {
            Sort::Home => write!(f, "x{}", self.index),
            Sort::Quotient => write!(f, "u{}", self.index),
        }
    }
}

impl std::str::FromStr for Var {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (sort, digits) = match s.split_at_checked(1) {
            Some(("x", rest)) => (Sort::Home, rest),
            Some(("u", rest)) => (Sort::Quotient, rest),
            _ => return Err(format!("not a variable: {s:?}")),
        };
        let index = digits.parse().map_err(|_| format!("not a variable: {s:?}"))?;
        Ok(Var { sort, index })
    }
}

impl Serialize for Var {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which of the three theories a formula is read in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum TheoryMode {
    /// Ordered vector spaces: home sort only, no `Q`, no `π`.
    Ovs,
    /// The dense pair with its quotient sort.
    Povs,
    /// The dense pair expanded by an order `≺` on the quotient sort.
    PovsPrec,
}

impl TheoryMode {
    pub fn has_quotient(self) -> bool {
        self != TheoryMode::Ovs
    }

    pub fn has_prec(self) -> bool {
        self == TheoryMode::PovsPrec
    }
}

impl fmt::Display for TheoryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoryMode::Ovs => "ovs",
            TheoryMode::Povs => "povs",
            TheoryMode::PovsPrec => "povs-prec",
        })
    }
}

impl std::str::FromStr for TheoryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ovs" => Ok(TheoryMode::Ovs),
            "povs" => Ok(TheoryMode::Povs),
            "povs-prec" | "povs_prec" => Ok(TheoryMode::PovsPrec),
            _ => Err(format!("unknown theory {s:?}; expected ovs, povs or povs-prec")),
        }
    }
}
