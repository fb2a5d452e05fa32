use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Formula, Term};
use crate::truthval::Rational;

/// What a schema metavariable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaKind {
    Formula,
    Variable,
    Term,
    Rational,
    Natural,
    Symbol,
}

/// Kind of a metavariable by its name: `phi psi chi` formulas, `x y z`
/// variables, `t` a term, `r s` rationals, `n` a natural, `sym` a symbol.
pub fn meta_kind(name: &str) -> Option<MetaKind> {
    Some(match name {
        "phi" | "psi" | "chi" => MetaKind::Formula,
        "x" | "y" | "z" => MetaKind::Variable,
        "t" => MetaKind::Term,
        "r" | "s" => MetaKind::Rational,
        "n" => MetaKind::Natural,
        "sym" => MetaKind::Symbol,
        _ => return None,
    })
}

/// An assignment of schema metavariables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub formulas: BTreeMap<String, Formula>,
    pub variables: BTreeMap<String, String>,
    pub terms: BTreeMap<String, Term>,
    pub rationals: BTreeMap<String, Rational>,
    pub naturals: BTreeMap<String, u64>,
    pub symbols: BTreeMap<String, String>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
            && self.variables.is_empty()
            && self.terms.is_empty()
            && self.rationals.is_empty()
            && self.naturals.is_empty()
            && self.symbols.is_empty()
    }

    pub fn formula(mut self, name: &str, f: Formula) -> Self {
        self.formulas.insert(name.to_string(), f.desugar());
        self
    }

    pub fn variable(mut self, name: &str, x: &str) -> Self {
        self.variables.insert(name.to_string(), x.to_string());
        self
    }

    pub fn term(mut self, name: &str, t: Term) -> Self {
        self.terms.insert(name.to_string(), t);
        self
    }

    pub fn rational(mut self, name: &str, r: Rational) -> Self {
        self.rationals.insert(name.to_string(), r);
        self
    }

    pub fn natural(mut self, name: &str, n: u64) -> Self {
        self.naturals.insert(name.to_string(), n);
        self
    }

    pub fn symbol(mut self, name: &str, s: &str) -> Self {
        self.symbols.insert(name.to_string(), s.to_string());
        self
    }

    /// Whether every binding of `self` appears identically in `other`.
    pub fn agrees_with(&self, other: &Substitution) -> bool {
        fn sub<V: PartialEq>(a: &BTreeMap<String, V>, b: &BTreeMap<String, V>) -> bool {
            a.iter().all(|(k, v)| b.get(k) == Some(v))
        }
        sub(&self.formulas, &other.formulas)
            && sub(&self.variables, &other.variables)
            && sub(&self.terms, &other.terms)
            && sub(&self.rationals, &other.rationals)
            && sub(&self.naturals, &other.naturals)
            && sub(&self.symbols, &other.symbols)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        parts.extend(self.formulas.iter().map(|(k, v)| format!("{k}={v}")));
        parts.extend(self.variables.iter().map(|(k, v)| format!("{k}={v}")));
        parts.extend(self.terms.iter().map(|(k, v)| format!("{k}={v}")));
        parts.extend(self.rationals.iter().map(|(k, v)| format!("{k}={v}")));
        parts.extend(self.naturals.iter().map(|(k, v)| format!("{k}={v}")));
        parts.extend(self.symbols.iter().map(|(k, v)| format!("{k}={v}")));
        write!(f, "{}", parts.join(", "))
    }
}
