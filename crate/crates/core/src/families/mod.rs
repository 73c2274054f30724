//! Closed-form solvers for two concrete families, each paired with a builder for the
//! special fiber so the generic descent engine can check it.

pub mod genus4;
pub mod local_functions;
pub mod hyperelliptic;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::descent::DescentError;
use crate::finite_field::{FieldElement, FieldError, FiniteField};

/// Machine-readable reason attached to every undetermined verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndeterminedReason {
    /// Odd degree, reducible reduction with no rational root: no closed form applies.
    NoRationalRootReducible,
    /// The Galois action on the dual graph has no supported principal decomposition.
    UnsupportedTorusDecomposition,
    /// Only defined for a different divisibility target.
    NotApplicable,
}

impl UndeterminedReason {
    pub fn code(self) -> &'static str {
        match self {
            UndeterminedReason::NoRationalRootReducible => "no_rational_root_reducible",
            UndeterminedReason::UnsupportedTorusDecomposition => "unsupported_torus_decomposition",
            UndeterminedReason::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    True,
    False,
    Undetermined(UndeterminedReason),
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Undetermined(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error("no supported torus decomposition for this reduction type")]
    Unsupported,
}

/// Order of `<values> k^{x r} / k^{x r}` inside `k^x`.
pub fn class_group_order(field: &FiniteField, values: &[FieldElement], r: u64) -> u64 {
    let n = field.order() - 1;
    let g = arith::gcd(r, n);
    if g == 1 {
        return 1;
    }
    let zeta = field.primitive_element();
    let mut acc = g;
    for &v in values {
        let l = field.discrete_log(zeta, n, v).expect("nonzero element of the field");
        acc = arith::gcd(acc, l % g);
    }
    g / acc
}

/// Whether every value is an `r`-th power in `field`.
pub fn all_rth_powers(field: &FiniteField, values: &[FieldElement], r: u64) -> bool {
    class_group_order(field, values, r) == 1
}

/// `q` as `(p, m)` with the field constructed under `limit`.
pub fn field_of_order(q: u64, limit: u64) -> Result<FiniteField, FieldError> {
    let (p, m) = arith::prime_power(q).ok_or(FieldError::NotPrime(q))?;
    FiniteField::with_limit(p, m, limit)
}
