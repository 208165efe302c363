//! Symbolic ring properties carried alongside each presentation.
//!
//! These are not recomputed from the presentation: they are set once by a
//! constructor or propagated by a gluing step, and hypothesis checks read
//! them as given. Cardinality and rationality are user-assertable through
//! the CLI overrides.

use serde::{Deserialize, Serialize};

use crate::vars::VarPrime;

/// A localization recorded as catenary, with a short tag saying why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatenaryAt {
    pub prime: VarPrime,
    pub justification: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyFlags {
    pub contains_rationals: bool,
    pub uncountable: bool,
    pub card_eq_residue: bool,
    pub reduced: bool,
    pub domain: bool,
    pub quasi_excellent: bool,
    pub complete: bool,
    pub catenary_at: Vec<CatenaryAt>,
}

impl PropertyFlags {
    /// Defaults for a field symbol. `C` and `R` are uncountable with residue
    /// cardinality equal to their own; `Q` contains the rationals but fails
    /// both cardinality hypotheses once variables are adjoined, so it carries
    /// them as false. Unknown field names get conservative defaults and rely
    /// on explicit assertion.
    pub fn field_defaults(name: &str) -> PropertyFlags {
        let (rationals, uncountable, card) = match name {
            "C" | "R" => (true, true, true),
            "Q" => (true, false, false),
            _ => (false, false, false),
        };
        PropertyFlags {
            contains_rationals: rationals,
            uncountable,
            card_eq_residue: card,
            reduced: true,
            domain: true,
            quasi_excellent: true,
            complete: true,
            catenary_at: Vec::new(),
        }
    }

    /// Apply a named override; used by the CLI `--assert-flag` option.
    /// Only the hypothesis flags can be asserted, the structural ones are
    /// derived from the presentation.
    pub fn assert_flag(&mut self, name: &str, value: bool) -> Result<(), String> {
        match name {
            "contains_rationals" => self.contains_rationals = value,
            "uncountable" => self.uncountable = value,
            "card_eq_residue" => self.card_eq_residue = value,
            "quasi_excellent" => self.quasi_excellent = value,
            _ => return Err(format!("flag `{name}` is not assertable")),
        }
        Ok(())
    }
}
