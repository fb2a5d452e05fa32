use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ultrametric::{Modulus, ModulusError};

/// Name of the distinguished distance predicate.
pub const DISTANCE: &str = "d";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{0}` declared more than once")]
    DuplicateSymbol(String),
    #[error("ultrametric mode requires a binary predicate `d`")]
    MissingDistance,
    #[error("ultrametric mode requires a modulus for `{0}`")]
    MissingModulus(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Modulus {
        line: usize,
        #[source]
        source: ModulusError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: String,
    pub arity: usize,
    pub modulus: Option<Modulus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Predicate(usize),
    Function(usize),
    Constant(usize),
}

/// Predicate, function and constant symbols, each class kept in
/// declaration order.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    predicates: Vec<SymbolDecl>,
    functions: Vec<SymbolDecl>,
    constants: Vec<String>,
    uml: bool,
    index: HashMap<String, SymbolKind>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.predicates == other.predicates
            && self.functions == other.functions
            && self.constants == other.constants
            && self.uml == other.uml
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn claim(&mut self, name: &str, kind: SymbolKind) -> Result<(), SignatureError> {
        if self.index.contains_key(name) {
            return Err(SignatureError::DuplicateSymbol(name.to_string()));
        }
        self.index.insert(name.to_string(), kind);
        Ok(())
    }

    pub fn add_predicate(
        &mut self,
        name: &str,
        arity: usize,
        modulus: Option<Modulus>,
    ) -> Result<(), SignatureError> {
        self.claim(name, SymbolKind::Predicate(self.predicates.len()))?;
        self.predicates.push(SymbolDecl {
            name: name.to_string(),
            arity,
            modulus,
        });
        Ok(())
    }

    pub fn add_function(
        &mut self,
        name: &str,
        arity: usize,
        modulus: Option<Modulus>,
    ) -> Result<(), SignatureError> {
        self.claim(name, SymbolKind::Function(self.functions.len()))?;
        self.functions.push(SymbolDecl {
            name: name.to_string(),
            arity,
            modulus,
        });
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<(), SignatureError> {
        self.claim(name, SymbolKind::Constant(self.constants.len()))?;
        self.constants.push(name.to_string());
        Ok(())
    }

    /// Builder-style variants, panicking on duplicates. Handy in tests.
    pub fn with_predicate(mut self, name: &str, arity: usize) -> Self {
        self.add_predicate(name, arity, None).expect("fresh predicate");
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.add_function(name, arity, None).expect("fresh function");
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.add_constant(name).expect("fresh constant");
        self
    }

    /// Attaches a modulus to an already declared predicate or function.
    pub fn set_modulus(&mut self, name: &str, modulus: Modulus) -> bool {
        match self.index.get(name) {
            Some(SymbolKind::Predicate(i)) => self.predicates[*i].modulus = Some(modulus),
            Some(SymbolKind::Function(i)) => self.functions[*i].modulus = Some(modulus),
            _ => return false,
        }
        true
    }

    /// Switches on ultrametric mode after checking that `d/2` exists and
    /// every other predicate and function carries a modulus. `d` itself
    /// defaults to `Linear(1,0)`.
    pub fn enable_uml(&mut self) -> Result<(), SignatureError> {
        match self.index.get(DISTANCE) {
            Some(SymbolKind::Predicate(i)) if self.predicates[*i].arity == 2 => {}
            _ => return Err(SignatureError::MissingDistance),
        }
        for decl in self.predicates.iter().chain(&self.functions) {
            if decl.name != DISTANCE && decl.modulus.is_none() {
                return Err(SignatureError::MissingModulus(decl.name.clone()));
            }
        }
        self.uml = true;
        Ok(())
    }

    pub fn is_uml(&self) -> bool {
        self.uml
    }

    pub fn has_distance(&self) -> bool {
        self.distance_index().is_some()
    }

    pub fn distance_index(&self) -> Option<usize> {
        match self.index.get(DISTANCE) {
            Some(SymbolKind::Predicate(i)) if self.predicates[*i].arity == 2 => Some(*i),
            _ => None,
        }
    }

    pub fn predicates(&self) -> &[SymbolDecl] {
        &self.predicates
    }

    pub fn functions(&self) -> &[SymbolDecl] {
        &self.functions
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolKind> {
        self.index.get(name).copied()
    }

    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(SymbolKind::Predicate(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(SymbolKind::Function(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(SymbolKind::Constant(i)) => Some(*i),
            _ => None,
        }
    }

    /// Modulus of a predicate or function, `Linear(1,0)` when none is set.
    pub fn modulus_or_default(&self, name: &str) -> Option<Modulus> {
        let decl = match self.index.get(name)? {
            SymbolKind::Predicate(i) => &self.predicates[*i],
            SymbolKind::Function(i) => &self.functions[*i],
            SymbolKind::Constant(_) => return None,
        };
        Some(decl.modulus.clone().unwrap_or_default())
    }

    /// Parses the line-oriented signature format:
    ///
    /// ```text
    /// pred P/1 modulus linear 1 0
    /// func f/1 modulus table 1:1,2:3,default linear 2 0
    /// const c
    /// uml
    /// ```
    pub fn parse(text: &str) -> Result<Signature, SignatureError> {
        let mut sig = Signature::new();
        let mut want_uml = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| SignatureError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            let mut words = line.split_whitespace();
            let keyword = words.next().unwrap_or("");
            match keyword {
                "uml" => want_uml = true,
                "const" => {
                    let name = words.next().ok_or_else(|| err("missing constant name"))?;
                    check_ident(name).map_err(|m| err(&m))?;
                    if words.next().is_some() {
                        return Err(err("trailing input after constant"));
                    }
                    sig.add_constant(name)?;
                }
                "pred" | "func" => {
                    let decl = words.next().ok_or_else(|| err("missing NAME/ARITY"))?;
                    let (name, arity) = decl
                        .split_once('/')
                        .ok_or_else(|| err("expected NAME/ARITY"))?;
                    check_ident(name).map_err(|m| err(&m))?;
                    let arity: usize = arity.parse().map_err(|_| err("bad arity"))?;
                    let rest: Vec<&str> = words.collect();
                    let modulus = if rest.is_empty() {
                        None
                    } else {
                        Some(parse_modulus(&rest.join(" "), line_no)?)
                    };
                    if keyword == "pred" {
                        sig.add_predicate(name, arity, modulus)?;
                    } else {
                        sig.add_function(name, arity, modulus)?;
                    }
                }
                other => return Err(err(&format!("unknown declaration `{other}`"))),
            }
        }
        if want_uml {
            sig.enable_uml()?;
        }
        Ok(sig)
    }
}

fn check_ident(name: &str) -> Result<(), String> {
    let mut chars = name.chars();
    let ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok && name != "forall" && name != "exists" {
        Ok(())
    } else {
        Err(format!("`{name}` is not a valid identifier"))
    }
}

fn parse_modulus(text: &str, line: usize) -> Result<Modulus, SignatureError> {
    let err = |msg: &str| SignatureError::Parse {
        line,
        msg: msg.to_string(),
    };
    let wrap = |source| SignatureError::Modulus { line, source };
    let body = text
        .strip_prefix("modulus")
        .ok_or_else(|| err("expected `modulus`"))?
        .trim();
    let linear = |s: &str| -> Result<(u64, u64), SignatureError> {
        let nums: Vec<&str> = s
            .strip_prefix("linear")
            .ok_or_else(|| err("expected `linear A B`"))?
            .split_whitespace()
            .collect();
        match nums.as_slice() {
            [a, b] => Ok((
                a.parse().map_err(|_| err("bad linear slope"))?,
                b.parse().map_err(|_| err("bad linear offset"))?,
            )),
            _ => Err(err("expected `linear A B`")),
        }
    };
    if body.starts_with("linear") {
        let (a, b) = linear(body)?;
        return Modulus::linear(a, b).map_err(wrap);
    }
    let table = body
        .strip_prefix("table")
        .ok_or_else(|| err("expected `linear` or `table`"))?
        .trim();
    let (entries_text, tail) = table
        .split_once("default")
        .ok_or_else(|| err("table modulus needs `default linear A B`"))?;
    let mut entries = Vec::new();
    for item in entries_text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (n, v) = item.split_once(':').ok_or_else(|| err("expected n:v"))?;
        entries.push((
            n.trim().parse().map_err(|_| err("bad table argument"))?,
            v.trim().parse().map_err(|_| err("bad table value"))?,
        ));
    }
    let (a, b) = linear(tail.trim())?;
    Modulus::table(entries, a, b).map_err(wrap)
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (kw, decls) in [("pred", &self.predicates), ("func", &self.functions)] {
            for d in decls {
                write!(f, "{kw} {}/{}", d.name, d.arity)?;
                if let Some(m) = &d.modulus {
                    write!(f, " modulus {m}")?;
                }
                writeln!(f)?;
            }
        }
        for c in &self.constants {
            writeln!(f, "const {c}")?;
        }
        if self.uml {
            writeln!(f, "uml")?;
        }
        Ok(())
    }
}
