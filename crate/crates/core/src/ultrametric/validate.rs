use std::fmt;

use thiserror::Error;

use crate::semantics::{index_tuple, Structure};
use crate::syntax::Signature;
use crate::truthval::{tv_dmax, Rational, TruthValue};

use super::modulus::NStar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("the signature has no binary distance predicate `d`")]
    MissingD,
    #[error("tuples of different lengths {0} and {1}")]
    LengthMismatch(usize, usize),
}

/// One violated instance of a law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub law: String,
    /// Offending element tuples, by element name.
    pub tuples: Vec<Vec<String>>,
    pub n: Option<NStar>,
    pub lhs: TruthValue,
    pub rhs: TruthValue,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuples: Vec<String> = self.tuples.iter().map(|t| format!("({})", t.join(","))).collect();
        write!(f, "LAW {} FAIL at {}", self.law, tuples.join(","))?;
        if let Some(n) = self.n {
            write!(f, " n={n}")?;
        }
        write!(f, " lhs={} rhs={}", self.lhs, self.rhs)
    }
}

/// Result of a law check. Witnesses appear in lexicographic tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    /// Violations of the checked contract.
    pub witnesses: Vec<Witness>,
    /// For continuity checks: violations of the weaker reading in which the
    /// conclusion is `<=` rather than `<`. Always a subset of `witnesses`.
    pub axiom_witnesses: Vec<Witness>,
    /// For the metric check: whether `d(a,b) = (0,0)` only when `a = b`.
    pub separated: Option<bool>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn axioms_hold(&self) -> bool {
        self.axiom_witnesses.is_empty()
    }

    pub fn first(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.witnesses {
            writeln!(f, "{w}")?;
        }
        Ok(())
    }
}

pub(crate) fn distance_index(m: &Structure) -> Result<usize, MetricError> {
    m.signature().distance_index().ok_or(MetricError::MissingD)
}

fn names(m: &Structure, tuple: &[usize]) -> Vec<String> {
    tuple.iter().map(|&e| m.universe()[e].clone()).collect()
}

/// Checks `d(a,a) = (0,0)`, symmetry, and the strong triangle inequality
/// `d(a,b) <= max(d(a,c), d(b,c))`, reported at `(a,b,c)`.
pub fn validate_pseudo_ultrametric(m: &Structure) -> Result<ValidationReport, MetricError> {
    let di = distance_index(m)?;
    let n = m.size();
    let table = m.predicate_table(di);
    let d = |a: usize, b: usize| table[a * n + b];
    let mut report = ValidationReport::default();
    let mut fail = |law: &str, t: &[usize], lhs: TruthValue, rhs: TruthValue| {
        report.witnesses.push(Witness {
            law: law.to_string(),
            tuples: vec![names(m, t)],
            n: None,
            lhs,
            rhs,
        })
    };
    for a in 0..n {
        if !d(a, a).is_zero() {
            fail("reflexivity", &[a], d(a, a), TruthValue::ZERO);
        }
    }
    for a in 0..n {
        for b in 0..n {
            if d(a, b) != d(b, a) {
                fail("symmetry", &[a, b], d(a, b), d(b, a));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let bound = d(a, c).max(d(b, c));
                if d(a, b) > bound {
                    fail("strong-triangle", &[a, b, c], d(a, b), bound);
                }
            }
        }
    }
    let separated = (0..n).all(|a| (0..n).all(|b| a == b || !d(a, b).is_zero()));
    report.separated = Some(separated);
    Ok(report)
}

/// `max_i d(a_i, b_i)`; `(0,0)` for empty tuples.
pub fn product_metric(m: &Structure, a: &[usize], b: &[usize]) -> Result<TruthValue, MetricError> {
    let di = distance_index(m)?;
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch(a.len(), b.len()));
    }
    let n = m.size();
    let table = m.predicate_table(di);
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| table[x * n + y])
        .max()
        .unwrap_or(TruthValue::ZERO))
}

/// A symbol's pairs of argument tuples with their distances, and the
/// distance between the symbol's values on them.
struct SymbolPair {
    law: String,
    left: Vec<usize>,
    right: Vec<usize>,
    args: TruthValue,
    values: TruthValue,
}

fn for_each_symbol_pair(m: &Structure, mut visit: impl FnMut(&str, SymbolPair)) -> Result<(), MetricError> {
    let di = distance_index(m)?;
    let n = m.size();
    let sig: &Signature = m.signature();
    let dist_table = m.predicate_table(di);
    let d = |a: &[usize], b: &[usize]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| dist_table[x * n + y])
            .max()
            .unwrap_or(TruthValue::ZERO)
    };
    for (fi, g) in sig.functions().iter().enumerate() {
        let table = m.function_table(fi);
        let count = table.len();
        for i in 0..count {
            for j in 0..count {
                let (a, b) = (index_tuple(n, g.arity, i), index_tuple(n, g.arity, j));
                let values = dist_table[table[i] * n + table[j]];
                visit(
                    &g.name,
                    SymbolPair {
                        law: g.name.clone(),
                        args: d(&a, &b),
                        left: a,
                        right: b,
                        values,
                    },
                );
            }
        }
    }
    for (pi, p) in sig.predicates().iter().enumerate() {
        let table = m.predicate_table(pi);
        let count = table.len();
        for i in 0..count {
            for j in 0..count {
                let (a, b) = (index_tuple(n, p.arity, i), index_tuple(n, p.arity, j));
                let values = tv_dmax(table[i], table[j]);
                visit(
                    &p.name,
                    SymbolPair {
                        law: p.name.clone(),
                        args: d(&a, &b),
                        left: a,
                        right: b,
                        values,
                    },
                );
            }
        }
    }
    Ok(())
}

/// Checks every function and predicate against its modulus: whenever
/// `d(a,b) < hat(1/delta(n))`, the values must satisfy `< hat(1/n)`. The
/// premise is downward closed in `n`, so only the supremal `n*` with the
/// premise true is checked. When `n* = inf` (always for `d(a,b) = (0,0)`,
/// and for nonzero distances under a bounded modulus) the values must be at
/// distance `(0,0)`, the only value below every `hat(1/n)`.
///
/// `axiom_witnesses` lists the pairs that also fail `<= hat(1/n*)`, the
/// reading of the weak extensionality schemas. Symbols without a modulus
/// use `Linear(1,0)`.
pub fn check_uniform_continuity(m: &Structure) -> Result<ValidationReport, MetricError> {
    let mut report = ValidationReport::default();
    let sig = m.signature().clone();
    for_each_symbol_pair(m, |sym, pair| {
        let modulus = sig.modulus_or_default(sym).expect("functions and predicates have moduli");
        let n_star = modulus.n_star(pair.args);
        let (strict_ok, weak_ok, bound) = match n_star {
            NStar::Never => return,
            NStar::Infinite => (pair.values.is_zero(), pair.values.is_zero(), TruthValue::ZERO),
            NStar::Finite(k) => {
                let bound = TruthValue::hat(Rational::reciprocal_of(k)).expect("1/k in [0,1]");
                (pair.values < bound, pair.values <= bound, bound)
            }
        };
        if !strict_ok {
            let w = Witness {
                law: format!("continuity[{}]", pair.law),
                tuples: vec![names(m, &pair.left), names(m, &pair.right)],
                n: Some(n_star),
                lhs: pair.values,
                rhs: bound,
            };
            if !weak_ok {
                report.axiom_witnesses.push(w.clone());
            }
            report.witnesses.push(w);
        }
    })?;
    Ok(report)
}

/// Checks the 1-Lipschitz condition: the distance between a symbol's values
/// is at most the product distance of the arguments.
pub fn check_lipschitz(m: &Structure) -> Result<ValidationReport, MetricError> {
    let mut report = ValidationReport::default();
    for_each_symbol_pair(m, |_, pair| {
        if pair.values > pair.args {
            report.witnesses.push(Witness {
                law: format!("lipschitz[{}]", pair.law),
                tuples: vec![names(m, &pair.left), names(m, &pair.right)],
                n: None,
                lhs: pair.values,
                rhs: pair.args,
            });
        }
    })?;
    Ok(report)
}

/// Whether the metric laws and uniform continuity both hold.
pub fn is_pre_structure(m: &Structure) -> Result<bool, MetricError> {
    Ok(validate_pseudo_ultrametric(m)?.passes() && check_uniform_continuity(m)?.passes())
}
