use std::sync::Arc;

use thiserror::Error;

use crate::semantics::{index_tuple, tuple_index, Structure};
use crate::truthval::TruthValue;

use super::validate::{check_uniform_continuity, validate_pseudo_ultrametric, MetricError, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("d is not a pseudo-ultrametric: {0}")]
    NotPseudoUltrametric(Witness),
    #[error("not uniformly continuous: {0}")]
    NotUniformlyContinuous(Witness),
}

/// The collapse of a pre-structure along `a ~ b` iff `d(a,b) = (0,0)`.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub structure: Structure,
    /// Class of each element of the original universe.
    pub projection: Vec<usize>,
}

impl Quotient {
    /// Images of a tuple of elements.
    pub fn project(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&e| self.projection[e]).collect()
    }
}

/// Builds `M0`. Each class is named after its first member and interpreted
/// through that representative; uniform continuity makes the choice
/// irrelevant.
pub fn quotient(m: &Structure) -> Result<Quotient, QuotientError> {
    let metric = validate_pseudo_ultrametric(m)?;
    if let Some(w) = metric.first() {
        return Err(QuotientError::NotPseudoUltrametric(w.clone()));
    }
    let continuity = check_uniform_continuity(m)?;
    if let Some(w) = continuity.first() {
        return Err(QuotientError::NotUniformlyContinuous(w.clone()));
    }
    let n = m.size();
    let sig = m.signature();
    let d = m.predicate_table(sig.distance_index().expect("checked above"));
    let mut reps: Vec<usize> = Vec::new();
    let mut projection = vec![0; n];
    for a in 0..n {
        match reps.iter().position(|&r| d[r * n + a] == TruthValue::ZERO) {
            Some(c) => projection[a] = c,
            None => {
                projection[a] = reps.len();
                reps.push(a);
            }
        }
    }
    let k = reps.len();
    let universe = reps.iter().map(|&r| m.universe()[r].clone()).collect();
    let lift = |arity: usize, i: usize| -> Vec<usize> {
        index_tuple(k, arity, i).into_iter().map(|c| reps[c]).collect()
    };
    let mut out = Structure::uniform(Arc::clone(m.signature_arc()), universe).expect("nonempty");
    for (pi, p) in sig.predicates().iter().enumerate() {
        let table = m.predicate_table(pi);
        for i in 0..k.pow(p.arity as u32) {
            let v = table[tuple_index(n, &lift(p.arity, i))];
            out.set_predicate_index(pi, i, v);
        }
    }
    for (fi, g) in sig.functions().iter().enumerate() {
        let table = m.function_table(fi);
        for i in 0..k.pow(g.arity as u32) {
            let image = table[tuple_index(n, &lift(g.arity, i))];
            out.set_function_index(fi, i, projection[image]);
        }
    }
    for ci in 0..sig.constants().len() {
        out.set_constant_index(ci, projection[m.constant_value(ci)]);
    }
    Ok(Quotient {
        structure: out,
        projection,
    })
}
