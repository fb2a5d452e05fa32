//! Hilbert-style proofs: schema matching, checking, derived rules and the
//! deduction theorem.

mod builder;
mod deduction;
mod file;
mod proof;
mod schema;
mod subst;

pub use builder::{lemma_library, ProofBuilder, ProofError, LEMMAS};
pub use deduction::{deduction_transform, DeductionError};
pub use file::{parse_proof, render_proof, ProofFileError};
pub use proof::{check_proof, explain_axiom, CheckFailure, CheckReport, Justification, Proof, ProofLine};
pub use schema::{
    instantiate, match_axiom, match_schema, tuple_distance, weak_extensionality, SchemaError, SchemaId,
};
pub use subst::{meta_kind, MetaKind, Substitution};
