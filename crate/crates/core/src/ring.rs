//! Tower presentations `base[[vars]] / (q1 ∩ ... ∩ qm)` and their chain
//! arithmetic.
//!
//! A [`BaseDomain`] is either a field symbol or a glued-domain symbol
//! produced by an earlier gluing step; it carries a finite shape of its own
//! distinguished spectrum. A [`TowerRing`] adjoins power series variables to
//! a base and quotients by an intersection of variable-generated primes.
//! Dimension, height and coheight of distinguished primes are exact set
//! arithmetic on that presentation.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::flags::PropertyFlags;
use crate::spectrum::poset::{NodeLabel, NodeRole, SpecPoset};
use crate::vars::{FamilyError, MinPrimeFamily, VarPrime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Field,
    GluedDomain,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("empty family")]
    EmptyFamily,
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` is not adjoined to the ring")]
    UnknownVariable(String),
    #[error("{0} is not a prime of the quotient: it contains no minimal prime")]
    NotAPrime(VarPrime),
    #[error("{p} is not a minimal prime below {q}")]
    NotMinimalBelow { p: VarPrime, q: VarPrime },
    #[error("designated primes {0} and {1} are comparable")]
    ComparablePrimes(VarPrime, VarPrime),
    #[error("base shape is invalid: {0}")]
    BadBaseShape(String),
}

impl From<FamilyError> for RingError {
    fn from(_: FamilyError) -> RingError {
        RingError::EmptyFamily
    }
}

/// The level-zero coefficient ring of a tower.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseDomain {
    pub kind: BaseKind,
    pub name: String,
    pub dim: usize,
    pub spec_shape: SpecPoset,
    pub flags: PropertyFlags,
}

impl BaseDomain {
    /// A field symbol: zero dimensional, spectrum a single point, flags from
    /// the name defaults.
    pub fn field(name: &str) -> BaseDomain {
        let mut shape = SpecPoset::new();
        shape.add_node(
            NodeLabel::Prime { prime: VarPrime::zero(), level: 0 },
            NodeRole::Maximal,
        );
        BaseDomain {
            kind: BaseKind::Field,
            name: name.to_string(),
            dim: 0,
            spec_shape: shape,
            flags: PropertyFlags::field_defaults(name),
        }
    }

    /// A glued-domain symbol with an explicit spectrum shape. The shape must
    /// be valid with a unique minimal node, and the declared dimension must
    /// equal the longest chain from that minimum to the maximum.
    pub fn glued(
        name: &str,
        dim: usize,
        spec_shape: SpecPoset,
        flags: PropertyFlags,
    ) -> Result<BaseDomain, RingError> {
        spec_shape
            .validate()
            .map_err(|e| RingError::BadBaseShape(e.to_string()))?;
        let mins = spec_shape.minimal_nodes();
        if mins.len() != 1 {
            return Err(RingError::BadBaseShape(format!(
                "expected a unique minimal node, found {}",
                mins.len()
            )));
        }
        let max = spec_shape
            .maximal_node()
            .map_err(|e| RingError::BadBaseShape(e.to_string()))?;
        let longest = spec_shape
            .saturated_chain_lengths(mins[0], max, crate::spectrum::poset::DEFAULT_CHAIN_CAP)
            .map_err(|e| RingError::BadBaseShape(e.to_string()))?
            .last()
            .copied()
            .unwrap_or(0);
        if longest != dim {
            return Err(RingError::BadBaseShape(format!(
                "declared dimension {dim} but longest chain has length {longest}"
            )));
        }
        if !flags.domain {
            return Err(RingError::BadBaseShape("glued base must be a domain".into()));
        }
        Ok(BaseDomain { kind: BaseKind::GluedDomain, name: name.to_string(), dim, spec_shape, flags })
    }

    pub fn is_field(&self) -> bool {
        self.kind == BaseKind::Field
    }
}

/// `base[[vars]] / (q1 ∩ ... ∩ qm)` with every `qi` generated by variables.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerRing {
    base: BaseDomain,
    vars: BTreeSet<String>,
    family: MinPrimeFamily,
    pub flags: PropertyFlags,
}

impl TowerRing {
    /// Build a tower, normalizing the family and deriving flags from the
    /// base: rationality, cardinality and quasi-excellence pass through,
    /// reducedness always holds for an intersection of primes, the quotient
    /// is a domain exactly when the family is the zero ideal alone, and
    /// completeness holds only over a field.
    pub fn new<I, S, F>(base: BaseDomain, vars: I, family: F) -> Result<TowerRing, RingError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        F: IntoIterator<Item = VarPrime>,
    {
        let listed: Vec<String> = vars.into_iter().map(Into::into).collect();
        let mut var_set = BTreeSet::new();
        for v in &listed {
            if !var_set.insert(v.clone()) {
                return Err(RingError::DuplicateVariable(v.clone()));
            }
        }
        let family = MinPrimeFamily::normalize(family)?;
        for member in family.iter() {
            for v in member.iter() {
                if !var_set.contains(v) {
                    return Err(RingError::UnknownVariable(v.clone()));
                }
            }
        }
        let flags = PropertyFlags {
            contains_rationals: base.flags.contains_rationals,
            uncountable: base.flags.uncountable,
            card_eq_residue: base.flags.card_eq_residue,
            reduced: true,
            domain: family.is_zero_ideal(),
            quasi_excellent: base.flags.quasi_excellent,
            complete: base.is_field(),
            catenary_at: Vec::new(),
        };
        Ok(TowerRing { base, vars: var_set, family, flags })
    }

    pub fn base(&self) -> &BaseDomain {
        &self.base
    }

    pub fn vars(&self) -> &BTreeSet<String> {
        &self.vars
    }

    pub fn family(&self) -> &MinPrimeFamily {
        &self.family
    }

    pub fn all_vars_prime(&self) -> VarPrime {
        VarPrime::new(self.vars.iter().cloned())
    }

    /// Krull dimension of the quotient:
    /// `dim base + |vars| - min |q|` over the family.
    pub fn dim(&self) -> usize {
        self.base.dim + self.vars.len() - self.family.min_member_len()
    }

    /// `q` cuts out a prime of the quotient when it is supported on the
    /// adjoined variables and contains some minimal prime.
    pub fn check_prime(&self, q: &VarPrime) -> Result<(), RingError> {
        for v in q.iter() {
            if !self.vars.contains(v) {
                return Err(RingError::UnknownVariable(v.clone()));
            }
        }
        if !self.family.iter().any(|m| m.is_subset_of(q)) {
            return Err(RingError::NotAPrime(q.clone()));
        }
        Ok(())
    }

    pub fn is_prime(&self, q: &VarPrime) -> bool {
        self.check_prime(q).is_ok()
    }

    /// `coht q = dim base + |vars \ q|`: the quotient by `q` is the base
    /// with the remaining variables adjoined.
    pub fn coheight(&self, q: &VarPrime) -> Result<usize, RingError> {
        self.check_prime(q)?;
        Ok(self.base.dim + self.vars.len() - q.len())
    }

    /// `ht q = max(|q| - |m|)` over family members `m` contained in `q`.
    pub fn height(&self, q: &VarPrime) -> Result<usize, RingError> {
        self.check_prime(q)?;
        Ok(self
            .family
            .iter()
            .filter(|m| m.is_subset_of(q))
            .map(|m| q.len() - m.len())
            .max()
            .expect("check_prime guarantees a member below"))
    }

    /// Family members contained in `q`: the minimal primes of the
    /// localization at `q`.
    pub fn min_primes_below(&self, q: &VarPrime) -> Result<Vec<VarPrime>, RingError> {
        self.check_prime(q)?;
        Ok(self.family.iter().filter(|m| m.is_subset_of(q)).cloned().collect())
    }

    /// Coheight of the minimal prime `p` in the localization at `q`:
    /// `|q| - |p|`.
    pub fn localized_coheight(&self, p: &VarPrime, q: &VarPrime) -> Result<usize, RingError> {
        self.check_prime(q)?;
        if !self.family.contains(p) || !p.is_subset_of(q) {
            return Err(RingError::NotMinimalBelow { p: p.clone(), q: q.clone() });
        }
        Ok(q.len() - p.len())
    }

    /// The canonical script form of this presentation.
    pub fn presentation(&self) -> String {
        let vars: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        format!("{}[[{}]] / {}", self.base.name, vars.join(","), self.family)
    }
}

impl fmt::Display for TowerRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.presentation())
    }
}
