use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::semantics::{models_theory, satisfies, CompiledFormula, EvalError, Structure};
use crate::syntax::{Formula, Signature};
use crate::truthval::{Rational, TruthValue};

use super::space::{enumerate_structures, BoundsError, SearchBounds, StructureSpace};

const CHUNK: u64 = 1 << 11;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("not a sentence: {0}")]
    NotSentence(Formula),
    #[error("strong entailment needs a nonempty theory")]
    EmptyTheory,
    #[error("n must be at least 1")]
    ZeroN,
}

/// Result of a search over a bounded structure space. Carried structures
/// have been re-checked by direct evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedVerdict {
    Found(Structure),
    RefutedBy(Structure),
    /// The whole bounded space was examined without a hit.
    NoneWithinBounds,
    /// The budget ran out before the space was exhausted.
    BudgetExhausted(u64),
}

impl BoundedVerdict {
    pub fn structure(&self) -> Option<&Structure> {
        match self {
            BoundedVerdict::Found(m) | BoundedVerdict::RefutedBy(m) => Some(m),
            _ => None,
        }
    }
}

enum Scan {
    Hit(Structure),
    Exhausted,
    OutOfBudget(u64),
}

/// First structure in enumeration order satisfying `hit`. Chunks run in
/// parallel and the earliest hit wins, so the answer does not depend on the
/// number of workers.
fn scan_first<F>(space: &StructureSpace, budget: u64, hit: F) -> Scan
where
    F: Fn(&Structure) -> bool + Sync,
{
    let mut remaining = budget;
    for layer in space.layers() {
        let count = layer.count();
        let limit = count.map_or(remaining, |c| c.min(remaining));
        let chunks = limit.div_ceil(CHUNK) as usize;
        let found = (0..chunks).into_par_iter().find_map_first(|k| {
            let start = k as u64 * CHUNK;
            let end = (start + CHUNK).min(limit);
            let mut cursor = layer.cursor(start);
            for _ in start..end {
                if hit(cursor.current()) {
                    return Some(cursor.current().clone());
                }
                cursor.advance();
            }
            None
        });
        if let Some(m) = found {
            return Scan::Hit(m);
        }
        if count.is_none_or(|c| c > remaining) {
            return Scan::OutOfBudget(budget);
        }
        remaining -= limit;
    }
    Scan::Exhausted
}

fn compile_sentences(fs: &[Formula], sig: &Signature) -> Result<Vec<CompiledFormula>, SearchError> {
    fs.iter()
        .map(|f| {
            if !f.is_sentence() {
                return Err(SearchError::NotSentence(f.clone()));
            }
            Ok(CompiledFormula::compile(f, sig)?)
        })
        .collect()
}

fn holds_all(theory: &[CompiledFormula], m: &Structure) -> bool {
    theory.iter().all(|f| f.eval_closed(m).is_zero())
}

fn verdict(scan: Scan, wrap: fn(Structure) -> BoundedVerdict) -> BoundedVerdict {
    match scan {
        Scan::Hit(m) => wrap(m),
        Scan::Exhausted => BoundedVerdict::NoneWithinBounds,
        Scan::OutOfBudget(b) => BoundedVerdict::BudgetExhausted(b),
    }
}

/// The first enumerated model of `theory`.
pub fn find_model(
    sig: &Arc<Signature>,
    theory: &[Formula],
    bounds: &SearchBounds,
) -> Result<BoundedVerdict, SearchError> {
    bounds.validate()?;
    let t = compile_sentences(theory, sig)?;
    let space = StructureSpace::new(Arc::clone(sig), bounds);
    let v = verdict(scan_first(&space, bounds.budget, |m| holds_all(&t, m)), BoundedVerdict::Found);
    if let Some(m) = v.structure() {
        debug_assert!(models_theory(m, theory)?);
    }
    Ok(v)
}

/// The first enumerated model of `theory` that does not satisfy `phi`.
/// `NoneWithinBounds` is evidence for entailment, not a proof.
pub fn check_entailment(
    sig: &Arc<Signature>,
    theory: &[Formula],
    phi: &Formula,
    bounds: &SearchBounds,
) -> Result<BoundedVerdict, SearchError> {
    bounds.validate()?;
    let t = compile_sentences(theory, sig)?;
    let goal = compile_sentences(std::slice::from_ref(phi), sig)?.remove(0);
    let space = StructureSpace::new(Arc::clone(sig), bounds);
    let scan = scan_first(&space, bounds.budget, |m| {
        holds_all(&t, m) && !goal.eval_closed(m).is_zero()
    });
    Ok(verdict(scan, BoundedVerdict::RefutedBy))
}

/// The first enumerated structure where `phi` is worse than every member of
/// `theory`.
pub fn check_strong_entailment(
    sig: &Arc<Signature>,
    theory: &[Formula],
    phi: &Formula,
    bounds: &SearchBounds,
) -> Result<BoundedVerdict, SearchError> {
    bounds.validate()?;
    if theory.is_empty() {
        return Err(SearchError::EmptyTheory);
    }
    let t = compile_sentences(theory, sig)?;
    let goal = compile_sentences(std::slice::from_ref(phi), sig)?.remove(0);
    let space = StructureSpace::new(Arc::clone(sig), bounds);
    let scan = scan_first(&space, bounds.budget, |m| {
        let sup = t
            .iter()
            .map(|f| f.eval_closed(m))
            .max()
            .unwrap_or(TruthValue::ZERO);
        goal.eval_closed(m) > sup
    });
    Ok(verdict(scan, BoundedVerdict::RefutedBy))
}

/// Outcome of [`check_approx_entailment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxVerdict {
    /// Positions in the theory of the first subset that entails `1/n -> phi`
    /// within bounds.
    Subset(Vec<usize>),
    NoneWithinBounds,
    BudgetExhausted(u64),
}

/// Searches nonempty subsets of `theory`, by size and then by index, for one
/// that entails `1/n -> phi` on the bounded space. A candidate is accepted
/// only after a second, sequential pass with the tree-walking evaluator finds
/// no countermodel either.
pub fn check_approx_entailment(
    sig: &Arc<Signature>,
    theory: &[Formula],
    phi: &Formula,
    n: u64,
    bounds: &SearchBounds,
) -> Result<ApproxVerdict, SearchError> {
    if n == 0 {
        return Err(SearchError::ZeroN);
    }
    let goal = Formula::implies(Formula::constant(Rational::reciprocal_of(n)), phi.clone());
    let mut out_of_budget = None;
    for size in 1..=bounds.max_subset.min(theory.len()) {
        for subset in (0..theory.len()).combinations(size) {
            let premises: Vec<Formula> = subset.iter().map(|&i| theory[i].clone()).collect();
            match check_entailment(sig, &premises, &goal, bounds)? {
                BoundedVerdict::NoneWithinBounds => {
                    if confirm_entailment(sig, &premises, &goal, bounds)? {
                        return Ok(ApproxVerdict::Subset(subset));
                    }
                }
                BoundedVerdict::BudgetExhausted(b) => out_of_budget = Some(b),
                _ => {}
            }
        }
    }
    Ok(match out_of_budget {
        Some(b) => ApproxVerdict::BudgetExhausted(b),
        None => ApproxVerdict::NoneWithinBounds,
    })
}

fn confirm_entailment(
    sig: &Arc<Signature>,
    theory: &[Formula],
    goal: &Formula,
    bounds: &SearchBounds,
) -> Result<bool, SearchError> {
    for m in enumerate_structures(Arc::clone(sig), bounds) {
        let Ok(m) = m else { return Ok(false) };
        if models_theory(&m, theory)? && !satisfies(&m, goal)? {
            return Ok(false);
        }
    }
    Ok(true)
}
