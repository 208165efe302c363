//! Finite models of prime-spectrum gluing for noncatenary precompletion
//! constructions.
//!
//! The crate works with a representable class of local rings: a symbolic
//! base (a field or a previously glued domain) with power series variables
//! adjoined, quotiented by an intersection of variable-generated primes.
//! On that class everything is exact set arithmetic: dimensions, heights,
//! coheights, the distinguished spectrum as a finite poset, hypothesis
//! checks for gluing two incomparable primes, and the gluing itself with
//! its conclusions ledger. Exhaustive oracles double-check the enumerative
//! claims on small instances, and a poset embedding search decides whether
//! a hand-drawn diagram sits inside a produced spectrum shape.

pub mod flags;
pub mod gluing;
pub mod oracle;
pub mod ring;
pub mod spectrum;
pub mod vars;

pub use flags::{CatenaryAt, PropertyFlags};
pub use gluing::{
    apply_gluing, check_gluing_hypotheses, glue_minimal, minimal_prime_correspondence,
    surgery_glued_shape, ConclusionsLedger, CorrespondenceTriple, FactorizationCertificate,
    GlueMinimalOutcome, GluingError, GluingOutcome, GluingViolation, HypothesisCheck,
    PairedMinimalPrime, PositiveHeightNodes,
};
pub use oracle::{
    oracle_interval_graded, oracle_minimal_primes, oracle_split_minimal_primes, OracleError,
    OracleReport, SquarefreeGeneratorSet, INTERVAL_WIDTH_CAP, ORACLE_VAR_CAP,
};
pub use ring::{BaseDomain, BaseKind, RingError, TowerRing};
pub use spectrum::{
    canonical_form, canonical_form_structural, canonical_shape, embed, isomorphic,
    isomorphic_structural, merge_minimal_nodes, preglue_shape, verify_embedding,
    CatenaryVerdict, FinitePoset, FinitePosetError, NodeId, NodeLabel, NodeRole,
    NonCatenaryWitness, PosetError, PosetNode, SpecPoset, DEFAULT_CHAIN_CAP,
};
pub use vars::{FamilyError, MinPrimeFamily, VarPrime};
