//! Finite shapes of distinguished prime spectra: the poset type itself,
//! canonical forms and isomorphism, shape builders for tower rings, and
//! saturated-chain-preserving embeddings of user posets.

pub mod canon;
pub mod embed;
pub mod poset;
pub mod shape;

pub use canon::{canonical_form, canonical_form_structural, isomorphic, isomorphic_structural};
pub use embed::{embed, verify_embedding, FinitePoset, FinitePosetError};
pub use poset::{
    CatenaryVerdict, NodeId, NodeLabel, NodeRole, NonCatenaryWitness, PosetError, PosetNode,
    SpecPoset, DEFAULT_CHAIN_CAP,
};
pub use shape::{canonical_shape, merge_minimal_nodes, preglue_shape};
