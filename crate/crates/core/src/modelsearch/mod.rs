//! Bounded semantic search over finite grid-valued structures.
//!
//! Every verdict is relative to a [`SearchBounds`]: `NoneWithinBounds` means
//! the bounded space was exhausted, never that a property is valid.

mod classify;
mod ordermap;
mod search;
mod space;

pub use classify::{classify_map, weak_equiv_bounded, ClassifyError, MapClassification, MapWitness, WeakEquivVerdict};
pub use ordermap::{construct_order_map, h_remap, value_closure, OrderMap, OrderMapError};
pub use search::{
    check_approx_entailment, check_entailment, check_strong_entailment, find_model, ApproxVerdict, BoundedVerdict,
    SearchError,
};
pub use space::{
    element_name, enumerate_structures, BoundsError, BudgetExceeded, Cursor, Layer, SearchBounds, StructureSpace,
    StructureStream,
};
