//! Variable-generated primes and minimal-prime families.
//!
//! A [`VarPrime`] is identified with the set of adjoined variables that
//! generate it; the empty set stands for the zero ideal. Variable names are
//! opaque strings and every ordering in the crate is lexicographic by name,
//! so all derived output is deterministic.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A prime ideal generated by a subset of the adjoined variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarPrime(BTreeSet<String>);

impl VarPrime {
    pub fn new<I, S>(vars: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VarPrime(vars.into_iter().map(Into::into).collect())
    }

    /// The zero ideal of a domain.
    pub fn zero() -> Self {
        VarPrime(BTreeSet::new())
    }

    pub fn vars(&self) -> &BTreeSet<String> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains(var)
    }

    pub fn is_subset_of(&self, other: &VarPrime) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &VarPrime) -> VarPrime {
        VarPrime(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &VarPrime) -> VarPrime {
        VarPrime(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &VarPrime) -> VarPrime {
        VarPrime(self.0.difference(&other.0).cloned().collect())
    }

    /// The part of this prime supported on the given variable set.
    pub fn restrict_to(&self, vars: &BTreeSet<String>) -> VarPrime {
        VarPrime(self.0.intersection(vars).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }
}

impl<S: Into<String>> FromIterator<S> for VarPrime {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        VarPrime::new(iter)
    }
}

impl fmt::Display for VarPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "(0)");
        }
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("empty family")]
    Empty,
}

/// The minimal primes of an intersection ideal: a nonempty antichain of
/// [`VarPrime`]s under inclusion.
///
/// Construction goes through [`MinPrimeFamily::normalize`], which drops
/// non-minimal members, so the antichain invariant holds by construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MinPrimeFamily(BTreeSet<VarPrime>);

impl MinPrimeFamily {
    /// Keep only inclusion-minimal members of the input.
    ///
    /// Idempotent, insensitive to input order and duplicates. Rejects an
    /// empty input: the unit ideal has no minimal primes over it.
    pub fn normalize<I>(raw: I) -> Result<Self, FamilyError>
    where
        I: IntoIterator<Item = VarPrime>,
    {
        let all: BTreeSet<VarPrime> = raw.into_iter().collect();
        if all.is_empty() {
            return Err(FamilyError::Empty);
        }
        let minimal = all
            .iter()
            .filter(|p| !all.iter().any(|q| q != *p && q.is_subset_of(p)))
            .cloned()
            .collect();
        Ok(MinPrimeFamily(minimal))
    }

    pub fn members(&self) -> &BTreeSet<VarPrime> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &VarPrime> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &VarPrime) -> bool {
        self.0.contains(p)
    }

    /// Size of the smallest member; governs the dimension formula.
    pub fn min_member_len(&self) -> usize {
        self.0.iter().map(VarPrime::len).min().expect("family is nonempty")
    }

    /// True when the family is `{(0)}`, i.e. the quotient is a domain.
    pub fn is_zero_ideal(&self) -> bool {
        self.0.len() == 1 && self.0.iter().next().expect("nonempty").is_empty()
    }

    /// Every variable appearing in some member.
    pub fn support(&self) -> BTreeSet<String> {
        self.0.iter().flat_map(|p| p.vars().iter().cloned()).collect()
    }
}

impl fmt::Display for MinPrimeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
