use thiserror::Error;

use crate::syntax::{Formula, Signature};

use super::proof::{Justification, Proof, ProofLine};
use super::schema::{instantiate, SchemaError, SchemaId};
use super::subst::Substitution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("line {} is not an implication with the required antecedent", .0 + 1)]
    NotApplicable(usize),
    #[error("line {} is not a conjunction", .0 + 1)]
    NotConjunction(usize),
    #[error("no line {}", .0 + 1)]
    NoSuchLine(usize),
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
    #[error("lemma `{lemma}` needs the formula `{meta}`")]
    MissingArgument { lemma: String, meta: String },
}

/// Appends justified lines to a proof; every method returns the 0-based
/// index of the line it adds. The derived rules combine several lines.
pub struct ProofBuilder<'s> {
    proof: Proof,
    sig: &'s Signature,
}

fn implies(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn and(a: &Formula, b: &Formula) -> Formula {
    Formula::and(a.clone(), b.clone())
}

impl<'s> ProofBuilder<'s> {
    pub fn new(theory: Vec<Formula>, extra: Vec<Formula>, sig: &'s Signature) -> Self {
        ProofBuilder {
            proof: Proof::new(theory, extra),
            sig,
        }
    }

    pub fn finish(self) -> Proof {
        self.proof
    }

    pub fn proof(&self) -> &Proof {
        &self.proof
    }

    pub fn formula(&self, i: usize) -> Result<&Formula, ProofError> {
        self.proof
            .lines
            .get(i)
            .map(|l| &l.formula)
            .ok_or(ProofError::NoSuchLine(i))
    }

    fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        self.proof.lines.push(ProofLine {
            formula: formula.desugar(),
            justification,
        });
        self.proof.lines.len() - 1
    }

    /// Appends a line of an already checked proof unchanged.
    pub fn copy_line(&mut self, line: &ProofLine) -> usize {
        self.push(line.formula.clone(), line.justification.clone())
    }

    pub fn axiom(&mut self, id: SchemaId, s: Substitution) -> Result<usize, ProofError> {
        let f = instantiate(id, &s, self.sig)?;
        Ok(self.push(f, Justification::Axiom(id, s)))
    }

    fn axiom3(&mut self, id: SchemaId, phi: &Formula, psi: &Formula, chi: &Formula) -> Result<usize, ProofError> {
        let s = Substitution::new()
            .formula("phi", phi.clone())
            .formula("psi", psi.clone())
            .formula("chi", chi.clone());
        self.axiom(id, s)
    }

    fn axiom2(&mut self, id: SchemaId, phi: &Formula, psi: &Formula) -> Result<usize, ProofError> {
        let s = Substitution::new().formula("phi", phi.clone()).formula("psi", psi.clone());
        self.axiom(id, s)
    }

    pub fn hyp(&mut self, k: usize) -> usize {
        let f = self.proof.theory[k].clone();
        self.push(f, Justification::Hyp(k))
    }

    pub fn extra(&mut self, k: usize) -> usize {
        let f = self.proof.extra[k].clone();
        self.push(f, Justification::Extra(k))
    }

    /// From `a` and `a -> b` (lines `i`, `j`) conclude `b`.
    pub fn mp(&mut self, i: usize, j: usize) -> Result<usize, ProofError> {
        let a = self.formula(i)?.clone();
        match self.formula(j)? {
            Formula::Implies(l, r) if **l == a => {
                let b = (**r).clone();
                Ok(self.push(b, Justification::MP(i, j)))
            }
            _ => Err(ProofError::NotApplicable(j)),
        }
    }

    pub fn gen(&mut self, i: usize, x: &str) -> Result<usize, ProofError> {
        let body = self.formula(i)?.clone();
        Ok(self.push(Formula::forall(x, body), Justification::Gen(i, x.to_string())))
    }

    fn split_implication(&self, i: usize) -> Result<(Formula, Formula), ProofError> {
        match self.formula(i)? {
            Formula::Implies(a, b) => Ok(((**a).clone(), (**b).clone())),
            _ => Err(ProofError::NotApplicable(i)),
        }
    }

    fn split_conjunction(&self, i: usize) -> Result<(Formula, Formula), ProofError> {
        match self.formula(i)? {
            Formula::And(a, b) => Ok(((**a).clone(), (**b).clone())),
            _ => Err(ProofError::NotConjunction(i)),
        }
    }

    /// `a /\ b` to `a`.
    pub fn conj_left(&mut self, i: usize) -> Result<usize, ProofError> {
        let (a, b) = self.split_conjunction(i)?;
        let ax = self.axiom2(SchemaId::G2, &a, &b)?;
        self.mp(i, ax)
    }

    /// `a /\ b` to `b`.
    pub fn conj_right(&mut self, i: usize) -> Result<usize, ProofError> {
        let (a, b) = self.split_conjunction(i)?;
        let swap = self.axiom2(SchemaId::G3, &a, &b)?;
        let ba = self.mp(i, swap)?;
        self.conj_left(ba)
    }

    /// `a -> b` and `b -> c` to `a -> c`.
    pub fn chain(&mut self, i: usize, j: usize) -> Result<usize, ProofError> {
        let (a, b) = self.split_implication(i)?;
        let (b2, c) = self.split_implication(j)?;
        if b != b2 {
            return Err(ProofError::NotApplicable(j));
        }
        let ax = self.axiom3(SchemaId::G1, &a, &b, &c)?;
        let step = self.mp(i, ax)?;
        self.mp(j, step)
    }

    /// `|- a -> a`.
    pub fn refl(&mut self, a: &Formula) -> Result<usize, ProofError> {
        let a = a.desugar();
        let dup = self.axiom(SchemaId::G4, Substitution::new().formula("phi", a.clone()))?;
        let proj = self.axiom2(SchemaId::G2, &a, &a)?;
        self.chain(dup, proj)
    }

    /// `(a /\ b) -> c` to `a -> (b -> c)`.
    pub fn curry(&mut self, i: usize) -> Result<usize, ProofError> {
        let (ab, c) = self.split_implication(i)?;
        let Formula::And(a, b) = ab else {
            return Err(ProofError::NotApplicable(i));
        };
        let g5 = self.axiom3(SchemaId::G5, &a, &b, &c)?;
        let back = self.conj_right(g5)?;
        self.mp(i, back)
    }

    /// `a -> (b -> c)` to `(a /\ b) -> c`.
    pub fn uncurry(&mut self, i: usize) -> Result<usize, ProofError> {
        let (a, bc) = self.split_implication(i)?;
        let Formula::Implies(b, c) = bc else {
            return Err(ProofError::NotApplicable(i));
        };
        let g5 = self.axiom3(SchemaId::G5, &a, &b, &c)?;
        let forth = self.conj_left(g5)?;
        self.mp(i, forth)
    }

    /// `a -> (b -> c)` to `b -> (a -> c)`.
    pub fn exchange(&mut self, i: usize) -> Result<usize, ProofError> {
        let joined = self.uncurry(i)?;
        let (ab, _) = self.split_implication(joined)?;
        let (a, b) = match ab {
            Formula::And(a, b) => (*a, *b),
            _ => unreachable!("uncurry yields a conjunction antecedent"),
        };
        let swap = self.axiom2(SchemaId::G3, &b, &a)?;
        let swapped = self.chain(swap, joined)?;
        self.curry(swapped)
    }

    /// `a -> (a -> c)` to `a -> c`.
    pub fn contract(&mut self, i: usize) -> Result<usize, ProofError> {
        let joined = self.uncurry(i)?;
        let (aa, _) = self.split_implication(joined)?;
        let a = match aa {
            Formula::And(a, b) if a == b => *a,
            _ => return Err(ProofError::NotApplicable(i)),
        };
        let dup = self.axiom(SchemaId::G4, Substitution::new().formula("phi", a))?;
        self.chain(dup, joined)
    }

    /// `|- a -> (b -> a)`.
    pub fn weaken(&mut self, a: &Formula, b: &Formula) -> Result<usize, ProofError> {
        let proj = self.axiom2(SchemaId::G2, a, b)?;
        self.curry(proj)
    }

    /// `|- a -> (b -> (a /\ b))`.
    pub fn pairing(&mut self, a: &Formula, b: &Formula) -> Result<usize, ProofError> {
        let r = self.refl(&and(&a.desugar(), &b.desugar()))?;
        self.curry(r)
    }

    /// Lines `a` and `b` to `a /\ b`.
    pub fn conj_intro(&mut self, i: usize, j: usize) -> Result<usize, ProofError> {
        let a = self.formula(i)?.clone();
        let b = self.formula(j)?.clone();
        let pair = self.pairing(&a, &b)?;
        let step = self.mp(i, pair)?;
        self.mp(j, step)
    }

    /// `|- a -> ((a -> b) -> b)`.
    pub fn assertion(&mut self, a: &Formula, b: &Formula) -> Result<usize, ProofError> {
        let r = self.refl(&implies(&a.desugar(), &b.desugar()))?;
        self.exchange(r)
    }

    /// `|- ((a -> b) -> (b -> a)) -> (b -> a)`.
    pub fn prelinearity_collapse(&mut self, a: &Formula, b: &Formula) -> Result<usize, ProofError> {
        let (a, b) = (a.desugar(), b.desugar());
        let ba = implies(&b, &a);
        let g6 = self.axiom3(SchemaId::G6, &a, &b, &ba)?;
        let swapped = self.exchange(g6)?;
        let r = self.refl(&ba)?;
        self.mp(r, swapped)
    }

    /// `|- a -> (a \/ b)`.
    pub fn or_intro(&mut self, a: &Formula, b: &Formula) -> Result<usize, ProofError> {
        let (a, b) = (a.desugar(), b.desugar());
        let left = implies(&implies(&a, &b), &b);
        let right = implies(&implies(&b, &a), &a);
        let to_left = self.assertion(&a, &b)?;
        let to_right = self.weaken(&a, &implies(&b, &a))?;
        let pair = self.pairing(&left, &right)?;
        let s1 = self.chain(to_left, pair)?;
        let s2 = self.exchange(s1)?;
        let s3 = self.chain(to_right, s2)?;
        self.contract(s3)
    }
}

/// Names accepted by [`lemma_library`].
pub const LEMMAS: [&str; 9] = ["refl", "i", "ii", "iii", "iv", "v", "vi", "vii", "viii"];

fn arg<'a>(lemma: &str, args: &'a Substitution, meta: &str) -> Result<&'a Formula, ProofError> {
    args.formulas.get(meta).ok_or_else(|| ProofError::MissingArgument {
        lemma: lemma.to_string(),
        meta: meta.to_string(),
    })
}

/// A proof of the named lemma for the formulas bound to `phi`, `psi`,
/// `chi` in `args`:
///
/// | name | hypotheses | conclusion |
/// |------|------------|------------|
/// | refl | | `phi -> phi` |
/// | i | | `phi -> (psi -> phi)` |
/// | ii | | `phi -> (psi -> (phi /\ psi))` |
/// | iii | `0` | `(0 -> phi) -> phi` |
/// | iv | `phi`, `psi` | `phi /\ psi` |
/// | v | `phi -> psi`, `psi -> chi` | `phi -> chi` |
/// | vi | | `((phi -> psi) -> (psi -> phi)) -> (psi -> phi)` |
/// | vii | | `phi -> (phi \/ psi)` |
/// | viii | `(phi -> psi) -> chi` | `(psi -> phi) \/ chi` |
///
/// The hypotheses are listed as extra hypotheses of the proof.
/// `(0 -> phi) -> phi` has no proof without the hypothesis `0`: interpret
/// `0` by a value strictly between `(0,0)` and every `(s,s)` with `s > 0`
/// in the chain `I` extended by that value; every axiom stays designated
/// while `0` and `(0 -> 0) -> 0` do not.
pub fn lemma_library(name: &str, args: &Substitution, sig: &Signature) -> Result<Proof, ProofError> {
    let phi = || arg(name, args, "phi").map(Formula::desugar);
    let psi = || arg(name, args, "psi").map(Formula::desugar);
    let chi = || arg(name, args, "chi").map(Formula::desugar);
    match name {
        "refl" => {
            let mut b = ProofBuilder::new(vec![], vec![], sig);
            b.refl(&phi()?)?;
            Ok(b.finish())
        }
        "i" => {
            let mut b = ProofBuilder::new(vec![], vec![], sig);
            b.weaken(&phi()?, &psi()?)?;
            Ok(b.finish())
        }
        "ii" => {
            let mut b = ProofBuilder::new(vec![], vec![], sig);
            b.pairing(&phi()?, &psi()?)?;
            Ok(b.finish())
        }
        "iii" => {
            let phi = phi()?;
            let mut b = ProofBuilder::new(vec![], vec![Formula::zero()], sig);
            let zero = b.extra(0);
            let a = b.assertion(&Formula::zero(), &phi)?;
            b.mp(zero, a)?;
            Ok(b.finish())
        }
        "iv" => {
            let mut b = ProofBuilder::new(vec![], vec![phi()?, psi()?], sig);
            let l = b.extra(0);
            let r = b.extra(1);
            b.conj_intro(l, r)?;
            Ok(b.finish())
        }
        "v" => {
            let (phi, psi, chi) = (phi()?, psi()?, chi()?);
            let mut b = ProofBuilder::new(vec![], vec![implies(&phi, &psi), implies(&psi, &chi)], sig);
            let l = b.extra(0);
            let r = b.extra(1);
            b.chain(l, r)?;
            Ok(b.finish())
        }
        "vi" => {
            let mut b = ProofBuilder::new(vec![], vec![], sig);
            b.prelinearity_collapse(&phi()?, &psi()?)?;
            Ok(b.finish())
        }
        "vii" => {
            let mut b = ProofBuilder::new(vec![], vec![], sig);
            b.or_intro(&phi()?, &psi()?)?;
            Ok(b.finish())
        }
        "viii" => {
            let (phi, psi, chi) = (phi()?, psi()?, chi()?);
            let pq = implies(&phi, &psi);
            let qp = implies(&psi, &phi);
            let h = implies(&pq, &chi);
            let mut b = ProofBuilder::new(vec![], vec![h], sig);
            let hyp = b.extra(0);
            // ((psi -> phi) -> chi) -> chi
            let g6 = b.axiom3(SchemaId::G6, &phi, &psi, &chi)?;
            let first = b.mp(hyp, g6)?;
            // (chi -> (psi -> phi)) -> ((phi -> psi) -> (psi -> phi))
            let g1 = b.axiom3(SchemaId::G1, &pq, &chi, &qp)?;
            let lifted = b.mp(hyp, g1)?;
            // (chi -> (psi -> phi)) -> (psi -> phi)
            let collapse = b.prelinearity_collapse(&phi, &psi)?;
            let second = b.chain(lifted, collapse)?;
            let both = b.conj_intro(second, first)?;
            let g3 = b.axiom2(
                SchemaId::G3,
                &implies(&implies(&chi, &qp), &qp),
                &implies(&implies(&qp, &chi), &chi),
            )?;
            b.mp(both, g3)?;
            Ok(b.finish())
        }
        _ => Err(ProofError::UnknownLemma(name.to_string())),
    }
}
