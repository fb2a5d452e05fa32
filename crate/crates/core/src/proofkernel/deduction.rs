use thiserror::Error;

use crate::syntax::{Formula, Signature};

use super::builder::{ProofBuilder, ProofError};
use super::proof::{check_proof, CheckReport, Justification, Proof};
use super::schema::SchemaId;
use super::subst::Substitution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeductionError {
    #[error("input proof is invalid: {0:?}")]
    NotValidInput(CheckReport),
    #[error("the discharged formula is not among the extra hypotheses")]
    PhiNotHypothesis,
    #[error("the discharged formula must be a sentence")]
    PhiNotSentence,
    #[error(transparent)]
    Build(#[from] ProofError),
}

/// Turns a proof from `T + {phi}` into a proof of `phi -> chi` for each line
/// `chi`, discharging `phi` from the extra hypotheses.
///
/// The output has at most a constant number of lines per input line.
pub fn deduction_transform(p: &Proof, phi: &Formula, sig: &Signature) -> Result<Proof, DeductionError> {
    let report = check_proof(p, sig);
    if !report.is_valid() {
        return Err(DeductionError::NotValidInput(report));
    }
    if !phi.is_sentence() {
        return Err(DeductionError::PhiNotSentence);
    }
    let phi = phi.desugar();
    if !p.extra.iter().any(|h| h.desugar() == phi) {
        return Err(DeductionError::PhiNotHypothesis);
    }
    let kept: Vec<Formula> = p
        .extra
        .iter()
        .filter(|h| h.desugar() != phi)
        .cloned()
        .collect();
    let reindex = |k: usize| {
        let target = p.extra[k].desugar();
        kept.iter().position(|h| h.desugar() == target)
    };

    let mut b = ProofBuilder::new(p.theory.clone(), kept.clone(), sig);
    // lifted[i] proves phi -> line i
    let mut lifted = Vec::with_capacity(p.lines.len());
    for line in &p.lines {
        let chi = line.formula.desugar();
        let out = match &line.justification {
            Justification::Extra(k) if p.extra[*k].desugar() == phi => {
                b.refl(&phi)?
            }
            Justification::MP(i, j) => {
                // phi -> a and phi -> (a -> chi)
                let swapped = b.exchange(lifted[*j])?;
                let twice = b.chain(lifted[*i], swapped)?;
                b.contract(twice)?
            }
            Justification::Gen(i, x) => {
                let body = p.lines[*i].formula.desugar();
                let g = b.gen(lifted[*i], x)?;
                let s = Substitution::new()
                    .formula("psi", phi.clone())
                    .formula("phi", body)
                    .variable("x", x);
                let ax = b.axiom(SchemaId::GqA2, s)?;
                b.mp(g, ax)?
            }
            Justification::Extra(k) => {
                let copied = b.extra(reindex(*k).expect("kept hypothesis"));
                let w = b.weaken(&chi, &phi)?;
                b.mp(copied, w)?
            }
            Justification::Hyp(_) | Justification::Axiom(..) => {
                let copied = b.copy_line(line);
                let w = b.weaken(&chi, &phi)?;
                b.mp(copied, w)?
            }
        };
        lifted.push(out);
    }
    Ok(b.finish())
}
