//! Finite structures and the evaluation of formulas in them.

mod enumerate;
mod eval;
mod reduced;
mod structure;

pub use enumerate::{
    default_pool, enumerate_atoms, for_each_tuple, enumerate_formulas, enumerate_sentences, enumerate_terms,
    theory_of_bounded, FormulaBounds,
};
pub use eval::{
    eval_dual, eval_formula, eval_sentence, eval_term, models_theory, satisfies, truth_degree,
    CompiledFormula, DualStructure, EvalError,
};
pub use reduced::{FormulaClass, FormulaClasses};
pub use structure::{element_constant, index_tuple, tuple_index, Assignment, Structure, StructureError};
