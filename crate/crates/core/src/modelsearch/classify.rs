use std::fmt;

use thiserror::Error;

use crate::semantics::{for_each_tuple, EvalError, FormulaClasses, Structure};
use crate::syntax::{Formula, Signature, DISTANCE};
use crate::truthval::{Rational, TruthValue};

use super::space::SearchBounds;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("the map has {got} entries for a universe of {expected}")]
    NotTotal { expected: usize, got: usize },
    #[error("element index {0} is outside the target universe")]
    OutOfRange(usize),
    #[error("the structures have different signatures")]
    SignatureMismatch,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The first place where a map fails one of the conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapWitness {
    /// `j(f(a)) != f(j(a))`; constants appear with an empty tuple.
    Function { symbol: String, tuple: Vec<String> },
    /// An atomic value differs. For `d` this is a failure of isometry.
    Atom {
        symbol: String,
        tuple: Vec<String>,
        lhs: TruthValue,
        rhs: TruthValue,
    },
    Value {
        formula: Formula,
        /// Elements assigned to the free variables.
        assignment: Vec<(String, String)>,
        lhs: TruthValue,
        rhs: TruthValue,
    },
    Degree {
        formula: Formula,
        assignment: Vec<(String, String)>,
        lhs: Rational,
        rhs: Rational,
    },
}

fn at(assignment: &[(String, String)]) -> String {
    if assignment.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = assignment.iter().map(|(x, e)| format!("{x}={e}")).collect();
    format!(" at {}", parts.join(","))
}

impl fmt::Display for MapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapWitness::Function { symbol, tuple } => write!(f, "function {symbol} at ({})", tuple.join(",")),
            MapWitness::Atom { symbol, tuple, lhs, rhs } => {
                let kind = if symbol == DISTANCE { "isometry" } else { "atom" };
                write!(f, "{kind} {symbol}({}) lhs={lhs} rhs={rhs}", tuple.join(","))
            }
            MapWitness::Value {
                formula,
                assignment,
                lhs,
                rhs,
            } => write!(f, "value of {formula}{} lhs={lhs} rhs={rhs}", at(assignment)),
            MapWitness::Degree {
                formula,
                assignment,
                lhs,
                rhs,
            } => write!(f, "degree of {formula}{} lhs={lhs} rhs={rhs}", at(assignment)),
        }
    }
}

/// The three conditions are checked separately; `None` means the condition
/// holds. The elementary conditions only cover the enumerated formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapClassification {
    pub embedding: Option<MapWitness>,
    pub weak_elementary: Option<MapWitness>,
    pub elementary: Option<MapWitness>,
}

impl MapClassification {
    pub fn is_embedding(&self) -> bool {
        self.embedding.is_none()
    }

    pub fn is_weak_elementary(&self) -> bool {
        self.weak_elementary.is_none()
    }

    pub fn is_elementary(&self) -> bool {
        self.elementary.is_none()
    }

    /// The strongest condition that holds.
    pub fn grade(&self) -> &'static str {
        if self.is_elementary() {
            "elementary"
        } else if self.is_weak_elementary() {
            "weakElementary"
        } else if self.is_embedding() {
            "embedding"
        } else {
            "notEmbedding"
        }
    }
}

fn same_symbols(a: &Signature, b: &Signature) -> bool {
    a.predicates() == b.predicates() && a.functions() == b.functions() && a.constants() == b.constants()
}

fn names(m: &Structure, tuple: &[usize]) -> Vec<String> {
    tuple.iter().map(|&e| m.universe()[e].clone()).collect()
}

fn commutation_failure(m: &Structure, n: &Structure, j: &[usize]) -> Option<MapWitness> {
    let sig = m.signature();
    for (fi, g) in sig.functions().iter().enumerate() {
        let mut bad = None;
        for_each_tuple(m.size(), g.arity, |t| {
            if bad.is_none() {
                let image: Vec<usize> = t.iter().map(|&e| j[e]).collect();
                if j[m.function_value(fi, t)] != n.function_value(fi, &image) {
                    bad = Some(names(m, t));
                }
            }
        });
        if let Some(tuple) = bad {
            return Some(MapWitness::Function {
                symbol: g.name.clone(),
                tuple,
            });
        }
    }
    sig.constants()
        .iter()
        .enumerate()
        .find(|&(ci, _)| j[m.constant_value(ci)] != n.constant_value(ci))
        .map(|(_, c)| MapWitness::Function {
            symbol: c.clone(),
            tuple: Vec::new(),
        })
}

fn atom_failure(m: &Structure, n: &Structure, j: &[usize]) -> Option<MapWitness> {
    for (pi, p) in m.signature().predicates().iter().enumerate() {
        let mut bad = None;
        for_each_tuple(m.size(), p.arity, |t| {
            if bad.is_none() {
                let image: Vec<usize> = t.iter().map(|&e| j[e]).collect();
                let (lhs, rhs) = (m.predicate_value(pi, t), n.predicate_value(pi, &image));
                if lhs != rhs {
                    bad = Some((names(m, t), lhs, rhs));
                }
            }
        });
        if let Some((tuple, lhs, rhs)) = bad {
            return Some(MapWitness::Atom {
                symbol: p.name.clone(),
                tuple,
                lhs,
                rhs,
            });
        }
    }
    None
}

/// Grades `j: M -> N`, given as the image of each element of `m`.
///
/// Embedding: functions commute and atomic values agree. Weak elementary:
/// functions commute and truth degrees agree on every enumerated formula at
/// every tuple of parameters. Elementary: an embedding under which the full
/// values of the enumerated formulas agree. Formulas are enumerated up to
/// `bounds.sentence_depth` over `bounds.variables`, one per value class.
pub fn classify_map(
    m: &Structure,
    n: &Structure,
    j: &[usize],
    bounds: &SearchBounds,
) -> Result<MapClassification, ClassifyError> {
    if j.len() != m.size() {
        return Err(ClassifyError::NotTotal {
            expected: m.size(),
            got: j.len(),
        });
    }
    if let Some(&e) = j.iter().find(|&&e| e >= n.size()) {
        return Err(ClassifyError::OutOfRange(e));
    }
    if !same_symbols(m.signature(), n.signature()) {
        return Err(ClassifyError::SignatureMismatch);
    }
    let commutes = commutation_failure(m, n, j);
    let embedding = commutes.clone().or_else(|| atom_failure(m, n, j));
    let mut value_failure = None;
    let mut degree_failure = None;
    let classes = FormulaClasses::build(m.signature(), &[m, n], &bounds.formula_bounds(), bounds.variables.len())?;
    let vars = classes.variables();
    for c in classes.classes() {
        if value_failure.is_some() && degree_failure.is_some() {
            break;
        }
        for_each_tuple(m.size(), vars.len(), |t| {
            let image: Vec<usize> = t.iter().map(|&e| j[e]).collect();
            let (lhs, rhs) = (classes.value(c, 0, t), classes.value(c, 1, &image));
            let at = || {
                vars.iter()
                    .zip(t)
                    .enumerate()
                    .filter(|(i, _)| c.free & (1 << i) != 0)
                    .map(|(_, (x, &e))| (x.clone(), m.universe()[e].clone()))
                    .collect::<Vec<_>>()
            };
            if lhs != rhs && value_failure.is_none() {
                value_failure = Some(MapWitness::Value {
                    formula: c.formula.clone(),
                    assignment: at(),
                    lhs,
                    rhs,
                });
            }
            if lhs.first() != rhs.first() && degree_failure.is_none() {
                degree_failure = Some(MapWitness::Degree {
                    formula: c.formula.clone(),
                    assignment: at(),
                    lhs: lhs.first(),
                    rhs: rhs.first(),
                });
            }
        });
    }
    Ok(MapClassification {
        weak_elementary: commutes.clone().or(degree_failure),
        elementary: embedding.clone().or(value_failure),
        embedding,
    })
}

/// Outcome of [`weak_equiv_bounded`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakEquivVerdict {
    IndistinguishableWithinBounds,
    Distinguished {
        sentence: Formula,
        left: Rational,
        right: Rational,
    },
}

/// Compares truth degrees of every enumerated sentence; the first sentence
/// on which they differ is returned.
pub fn weak_equiv_bounded(
    m: &Structure,
    n: &Structure,
    bounds: &SearchBounds,
) -> Result<WeakEquivVerdict, ClassifyError> {
    if !same_symbols(m.signature(), n.signature()) {
        return Err(ClassifyError::SignatureMismatch);
    }
    let classes = FormulaClasses::build(m.signature(), &[m, n], &bounds.formula_bounds(), 0)?;
    let origin = vec![0; classes.variables().len()];
    for c in classes.classes() {
        let (left, right) = (classes.value(c, 0, &origin).first(), classes.value(c, 1, &origin).first());
        if left != right {
            return Ok(WeakEquivVerdict::Distinguished {
                sentence: c.formula.clone(),
                left,
                right,
            });
        }
    }
    Ok(WeakEquivVerdict::IndistinguishableWithinBounds)
}
