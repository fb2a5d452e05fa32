//! Metric side of the ultrametric extension: moduli of uniform continuity,
//! law checks, and quotients of pre-structures.

mod modulus;
mod quotient;
mod validate;

pub use modulus::{below_reciprocal, Modulus, ModulusError, NStar};
pub use quotient::{quotient, Quotient, QuotientError};
pub use validate::{
    check_lipschitz, check_uniform_continuity, is_pre_structure, product_metric, validate_pseudo_ultrametric,
    MetricError, ValidationReport, Witness,
};
