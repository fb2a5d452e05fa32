use std::fmt;

use crate::syntax::{check_formula, Formula, Signature};

use super::schema::{match_axiom, match_schema, SchemaId};
use super::subst::Substitution;

/// How a proof line is obtained. Line references are 0-based positions in
/// [`Proof::lines`]; hypothesis references are 0-based positions in the
/// theory or the extra hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// An instance of the schema. The substitution may be partial or empty;
    /// whatever it binds must agree with the match.
    Axiom(SchemaId, Substitution),
    Hyp(usize),
    Extra(usize),
    /// `MP(i, j)`: line `j` is `line i -> this line`.
    MP(usize, usize),
    /// `Gen(i, x)`: this line is `forall x. line i`.
    Gen(usize, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

/// A derivation from `theory` together with `extra` hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Proof {
    pub theory: Vec<Formula>,
    pub extra: Vec<Formula>,
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn new(theory: Vec<Formula>, extra: Vec<Formula>) -> Self {
        Proof {
            theory,
            extra,
            lines: Vec::new(),
        }
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

/// Why a line is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckFailure {
    IllFormed(String),
    /// The cited schema does not produce this formula.
    NotAnInstance(SchemaId),
    SchemaNeedsUml(SchemaId),
    NoSuchHypothesis(usize),
    HypothesisMismatch(usize),
    NoSuchExtra(usize),
    ExtraMismatch(usize),
    /// A justification cites the line itself or a later one.
    ForwardReference(usize),
    MPShapeMismatch,
    GenShapeMismatch,
    /// A theory member or extra hypothesis has free variables.
    HypothesisNotSentence(usize),
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckFailure::IllFormed(msg) => write!(f, "IllFormed: {msg}"),
            CheckFailure::NotAnInstance(id) => write!(f, "NotAnInstance: not an instance of {id}"),
            CheckFailure::SchemaNeedsUml(id) => write!(f, "SchemaNeedsUml: {id} requires ultrametric mode"),
            CheckFailure::NoSuchHypothesis(k) => write!(f, "NoSuchHypothesis: theory has no member {k}"),
            CheckFailure::HypothesisMismatch(k) => write!(f, "HypothesisMismatch: line differs from theory member {k}"),
            CheckFailure::NoSuchExtra(k) => write!(f, "NoSuchExtra: no extra hypothesis {k}"),
            CheckFailure::ExtraMismatch(k) => write!(f, "ExtraMismatch: line differs from extra hypothesis {k}"),
            CheckFailure::ForwardReference(i) => write!(f, "ForwardReference: cites line {}", i + 1),
            CheckFailure::MPShapeMismatch => write!(f, "MPShapeMismatch"),
            CheckFailure::GenShapeMismatch => write!(f, "GenShapeMismatch"),
            CheckFailure::HypothesisNotSentence(k) => write!(f, "HypothesisNotSentence: hypothesis {k} has free variables"),
        }
    }
}

/// Outcome of [`check_proof`]. `line` is 1-based; line 0 refers to the
/// hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckReport {
    Valid,
    Invalid { line: usize, reason: CheckFailure },
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckReport::Valid)
    }
}

fn check_line(
    p: &Proof,
    i: usize,
    primitive: &[Formula],
    sig: &Signature,
) -> Result<(), CheckFailure> {
    let line = &p.lines[i];
    check_formula(&line.formula, sig).map_err(|e| CheckFailure::IllFormed(e.to_string()))?;
    let this = &primitive[i];
    let earlier = |j: usize| {
        if j < i {
            Ok(&primitive[j])
        } else {
            Err(CheckFailure::ForwardReference(j))
        }
    };
    match &line.justification {
        Justification::Axiom(id, seed) => {
            if id.is_uml() && !sig.is_uml() {
                return Err(CheckFailure::SchemaNeedsUml(*id));
            }
            let mut seed = seed.clone();
            for f in seed.formulas.values_mut() {
                *f = f.desugar();
            }
            match_schema(*id, this, sig, &seed)
                .map(|_| ())
                .ok_or(CheckFailure::NotAnInstance(*id))
        }
        Justification::Hyp(k) => {
            let h = p.theory.get(*k).ok_or(CheckFailure::NoSuchHypothesis(*k))?;
            if h.desugar() == *this {
                Ok(())
            } else {
                Err(CheckFailure::HypothesisMismatch(*k))
            }
        }
        Justification::Extra(k) => {
            let h = p.extra.get(*k).ok_or(CheckFailure::NoSuchExtra(*k))?;
            if h.desugar() == *this {
                Ok(())
            } else {
                Err(CheckFailure::ExtraMismatch(*k))
            }
        }
        Justification::MP(a, b) => {
            let premise = earlier(*a)?;
            match earlier(*b)? {
                Formula::Implies(l, r) if **l == *premise && **r == *this => Ok(()),
                _ => Err(CheckFailure::MPShapeMismatch),
            }
        }
        Justification::Gen(a, x) => {
            let premise = earlier(*a)?;
            match this {
                Formula::Forall(v, body) if v == x && **body == *premise => Ok(()),
                _ => Err(CheckFailure::GenShapeMismatch),
            }
        }
    }
}

/// Checks every line and reports the first failure. Formulas are compared
/// in primitive form, so lines may be written with sugar.
pub fn check_proof(p: &Proof, sig: &Signature) -> CheckReport {
    for (k, h) in p.theory.iter().chain(&p.extra).enumerate() {
        if let Err(e) = check_formula(h, sig) {
            return CheckReport::Invalid {
                line: 0,
                reason: CheckFailure::IllFormed(e.to_string()),
            };
        }
        if !h.is_sentence() {
            return CheckReport::Invalid {
                line: 0,
                reason: CheckFailure::HypothesisNotSentence(k),
            };
        }
    }
    let primitive: Vec<Formula> = p.lines.iter().map(|l| l.formula.desugar()).collect();
    for i in 0..p.lines.len() {
        if let Err(reason) = check_line(p, i, &primitive, sig) {
            return CheckReport::Invalid { line: i + 1, reason };
        }
    }
    CheckReport::Valid
}

/// Schemas that `f` instantiates, for annotating proofs.
pub fn explain_axiom(f: &Formula, sig: &Signature) -> Vec<SchemaId> {
    match_axiom(f, sig).into_iter().map(|(id, _)| id).collect()
}
