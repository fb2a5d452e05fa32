//! Signatures, terms, formulas, and the concrete text syntax.

mod ast;
mod parse;
mod signature;

pub use ast::{Formula, NotSubstitutable, Term};
pub use parse::{parse_formula, parse_term, parse_theory, LineError, ParseError};
pub use signature::{Signature, SignatureError, SymbolDecl, SymbolKind, DISTANCE};

/// Checks that every symbol of `f` is declared in `sig` with the right arity.
/// Parsed formulas always pass; this guards programmatically built ones.
pub fn check_formula(f: &Formula, sig: &Signature) -> Result<(), ParseError> {
    fn term(t: &Term, sig: &Signature) -> Result<(), ParseError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => match sig.lookup(c) {
                Some(SymbolKind::Constant(_)) => Ok(()),
                _ => Err(ParseError::UnknownSymbol { name: c.clone(), pos: 0 }),
            },
            Term::Apply(g, args) => {
                let i = sig
                    .function_index(g)
                    .ok_or_else(|| ParseError::UnknownSymbol { name: g.clone(), pos: 0 })?;
                let expected = sig.functions()[i].arity;
                if expected != args.len() {
                    return Err(ParseError::ArityMismatch {
                        name: g.clone(),
                        expected,
                        found: args.len(),
                        pos: 0,
                    });
                }
                args.iter().try_for_each(|a| term(a, sig))
            }
        }
    }
    match f {
        Formula::Const(r) => {
            if r.in_unit_interval() {
                Ok(())
            } else {
                Err(ParseError::RationalOutOfRange { value: *r, pos: 0 })
            }
        }
        Formula::Atom(p, args) => {
            let i = sig
                .predicate_index(p)
                .ok_or_else(|| ParseError::UnknownSymbol { name: p.clone(), pos: 0 })?;
            let expected = sig.predicates()[i].arity;
            if expected != args.len() {
                return Err(ParseError::ArityMismatch {
                    name: p.clone(),
                    expected,
                    found: args.len(),
                    pos: 0,
                });
            }
            args.iter().try_for_each(|a| term(a, sig))
        }
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => check_formula(a, sig),
        Formula::And(a, b)
        | Formula::Implies(a, b)
        | Formula::Or(a, b)
        | Formula::Iff(a, b)
        | Formula::StrongImplies(a, b) => {
            check_formula(a, sig)?;
            check_formula(b, sig)
        }
    }
}
