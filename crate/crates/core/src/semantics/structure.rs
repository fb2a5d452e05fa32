use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Signature, SignatureError};
use crate::truthval::{TruthError, TruthValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("the universe must be nonempty")]
    EmptyUniverse,
    #[error("element `{0}` listed twice")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` has no entry for ({tuple})")]
    MissingEntry { symbol: String, tuple: String },
    #[error("`{symbol}` has two entries for ({tuple})")]
    DuplicateEntry { symbol: String, tuple: String },
    #[error("`{symbol}` expects {expected}-tuples")]
    WrongTupleLength { symbol: String, expected: usize },
    #[error(transparent)]
    Truth(#[from] TruthError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// A finite structure: a nonempty universe with total tables for every
/// symbol of its signature. Tables are indexed by tuples of element
/// positions in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct Structure {
    sig: Arc<Signature>,
    universe: Vec<String>,
    preds: Vec<Vec<TruthValue>>,
    funcs: Vec<Vec<usize>>,
    consts: Vec<usize>,
}

pub(crate) fn pow(n: usize, k: usize) -> usize {
    n.checked_pow(k as u32).expect("table size overflow")
}

/// Row-major index of a tuple of element positions.
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`tuple_index`].
pub fn index_tuple(n: usize, arity: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

impl Structure {
    /// A structure with every predicate at `(0,0)` and every function and
    /// constant pointing at the first element.
    pub fn uniform(sig: Arc<Signature>, universe: Vec<String>) -> Result<Self, StructureError> {
        if universe.is_empty() {
            return Err(StructureError::EmptyUniverse);
        }
        for (i, e) in universe.iter().enumerate() {
            if universe[..i].contains(e) {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        let n = universe.len();
        let preds = sig
            .predicates()
            .iter()
            .map(|p| vec![TruthValue::ZERO; pow(n, p.arity)])
            .collect();
        let funcs = sig
            .functions()
            .iter()
            .map(|f| vec![0; pow(n, f.arity)])
            .collect();
        let consts = vec![0; sig.constants().len()];
        Ok(Structure {
            sig,
            universe,
            preds,
            funcs,
            consts,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.universe.iter().position(|e| e == name)
    }

    fn element_or_err(&self, name: &str) -> Result<usize, StructureError> {
        self.element(name)
            .ok_or_else(|| StructureError::UnknownElement(name.to_string()))
    }

    pub fn predicate_table(&self, index: usize) -> &[TruthValue] {
        &self.preds[index]
    }

    pub fn function_table(&self, index: usize) -> &[usize] {
        &self.funcs[index]
    }

    pub fn constant_value(&self, index: usize) -> usize {
        self.consts[index]
    }

    pub fn predicate_value(&self, index: usize, tuple: &[usize]) -> TruthValue {
        self.preds[index][tuple_index(self.size(), tuple)]
    }

    pub fn function_value(&self, index: usize, tuple: &[usize]) -> usize {
        self.funcs[index][tuple_index(self.size(), tuple)]
    }

    /// Sets `P(tuple)` where the tuple is given by element names.
    pub fn set_predicate(
        &mut self,
        pred: &str,
        tuple: &[&str],
        value: TruthValue,
    ) -> Result<(), StructureError> {
        let pi = self
            .sig
            .predicate_index(pred)
            .ok_or_else(|| StructureError::UnknownSymbol(pred.to_string()))?;
        let ids = self.tuple_ids(pred, self.sig.predicates()[pi].arity, tuple)?;
        let n = self.size();
        self.preds[pi][tuple_index(n, &ids)] = value;
        Ok(())
    }

    pub fn set_function(&mut self, func: &str, tuple: &[&str], value: &str) -> Result<(), StructureError> {
        let fi = self
            .sig
            .function_index(func)
            .ok_or_else(|| StructureError::UnknownSymbol(func.to_string()))?;
        let ids = self.tuple_ids(func, self.sig.functions()[fi].arity, tuple)?;
        let v = self.element_or_err(value)?;
        let n = self.size();
        self.funcs[fi][tuple_index(n, &ids)] = v;
        Ok(())
    }

    pub fn set_constant(&mut self, name: &str, value: &str) -> Result<(), StructureError> {
        let ci = self
            .sig
            .constant_index(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        self.consts[ci] = self.element_or_err(value)?;
        Ok(())
    }

    /// Sets a predicate cell by table position.
    pub fn set_predicate_index(&mut self, pred: usize, tuple: usize, value: TruthValue) {
        self.preds[pred][tuple] = value;
    }

    /// Sets a function cell by table position.
    pub fn set_function_index(&mut self, func: usize, tuple: usize, value: usize) {
        assert!(value < self.size(), "element out of range");
        self.funcs[func][tuple] = value;
    }

    pub fn set_constant_index(&mut self, constant: usize, value: usize) {
        assert!(value < self.size(), "element out of range");
        self.consts[constant] = value;
    }

    fn tuple_ids(&self, symbol: &str, arity: usize, tuple: &[&str]) -> Result<Vec<usize>, StructureError> {
        if tuple.len() != arity {
            return Err(StructureError::WrongTupleLength {
                symbol: symbol.to_string(),
                expected: arity,
            });
        }
        tuple.iter().map(|e| self.element_or_err(e)).collect()
    }

    /// Replaces every predicate value by `h(value)`.
    pub fn map_predicates(&self, mut h: impl FnMut(TruthValue) -> TruthValue) -> Structure {
        let mut out = self.clone();
        for table in &mut out.preds {
            for v in table.iter_mut() {
                *v = h(*v);
            }
        }
        out
    }

    /// Every value occurring in a predicate table, ascending, deduplicated.
    pub fn atomic_values(&self) -> Vec<TruthValue> {
        let mut vals: Vec<TruthValue> = self.preds.iter().flatten().copied().collect();
        vals.sort();
        vals.dedup();
        vals
    }

    /// The same structure over `L(M)`: one fresh constant `c_m` per element,
    /// interpreted by `m`.
    pub fn named(&self) -> Result<Structure, StructureError> {
        let mut sig = (*self.sig).clone();
        for e in &self.universe {
            sig.add_constant(&element_constant(e))?;
        }
        let mut consts = self.consts.clone();
        consts.extend(0..self.size());
        Ok(Structure {
            sig: Arc::new(sig),
            universe: self.universe.clone(),
            preds: self.preds.clone(),
            funcs: self.funcs.clone(),
            consts,
        })
    }

    /// Reads the structure file format:
    ///
    /// ```text
    /// universe: a b
    /// pred P: (a)=(1/4,1/4) (b)=(1/2,1/2)
    /// func f: (a)->b (b)->a
    /// const c: a
    /// ```
    ///
    /// Every table must be total.
    pub fn parse(text: &str, sig: Arc<Signature>) -> Result<Structure, StructureError> {
        let mut universe: Option<Vec<String>> = None;
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("universe:") {
                if universe.is_some() {
                    return Err(parse_err(i + 1, "universe declared twice"));
                }
                universe = Some(rest.split_whitespace().map(str::to_string).collect());
            } else {
                lines.push((i + 1, line));
            }
        }
        let universe = universe.ok_or_else(|| parse_err(0, "missing `universe:` line"))?;
        let mut m = Structure::uniform(sig.clone(), universe)?;
        let mut seen_p: Vec<Vec<bool>> = m.preds.iter().map(|t| vec![false; t.len()]).collect();
        let mut seen_f: Vec<Vec<bool>> = m.funcs.iter().map(|t| vec![false; t.len()]).collect();
        let mut seen_c = vec![false; m.consts.len()];
        let n = m.size();
        for (line_no, line) in lines {
            let (head, body) = line
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, "expected `KIND NAME: ...`"))?;
            let mut head_words = head.split_whitespace();
            let kind = head_words.next().unwrap_or("");
            let name = head_words
                .next()
                .ok_or_else(|| parse_err(line_no, "missing symbol name"))?;
            match kind {
                "const" => {
                    let ci = sig
                        .constant_index(name)
                        .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
                    if seen_c[ci] {
                        return Err(StructureError::DuplicateEntry {
                            symbol: name.to_string(),
                            tuple: String::new(),
                        });
                    }
                    seen_c[ci] = true;
                    m.consts[ci] = m.element_or_err(body.trim())?;
                }
                "pred" | "func" => {
                    let is_pred = kind == "pred";
                    let (idx, arity) = if is_pred {
                        let i = sig
                            .predicate_index(name)
                            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
                        (i, sig.predicates()[i].arity)
                    } else {
                        let i = sig
                            .function_index(name)
                            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
                        (i, sig.functions()[i].arity)
                    };
                    let mut sc = Scanner::new(body, line_no);
                    while !sc.done() {
                        let tuple = sc.parenthesized()?;
                        let names: Vec<&str> = if tuple.trim().is_empty() {
                            Vec::new()
                        } else {
                            tuple.split(',').map(str::trim).collect()
                        };
                        let ids = m.tuple_ids(name, arity, &names)?;
                        let ti = tuple_index(n, &ids);
                        let seen = if is_pred {
                            &mut seen_p[idx][ti]
                        } else {
                            &mut seen_f[idx][ti]
                        };
                        if *seen {
                            return Err(StructureError::DuplicateEntry {
                                symbol: name.to_string(),
                                tuple,
                            });
                        }
                        *seen = true;
                        if is_pred {
                            sc.expect("=")?;
                            let value = sc.parenthesized()?;
                            m.preds[idx][ti] = format!("({value})").parse()?;
                        } else {
                            sc.expect("->")?;
                            let target = sc.word();
                            m.funcs[idx][ti] = m.element_or_err(target)?;
                        }
                    }
                }
                other => return Err(parse_err(line_no, &format!("unknown entry kind `{other}`"))),
            }
        }
        let missing = |symbol: &str, arity: usize, seen: &[bool]| -> Result<(), StructureError> {
            if let Some(ti) = seen.iter().position(|s| !s) {
                let tuple = index_tuple(n, arity, ti)
                    .into_iter()
                    .map(|e| m.universe[e].clone())
                    .collect::<Vec<_>>()
                    .join(",");
                return Err(StructureError::MissingEntry {
                    symbol: symbol.to_string(),
                    tuple,
                });
            }
            Ok(())
        };
        for (p, seen) in sig.predicates().iter().zip(&seen_p) {
            missing(&p.name, p.arity, seen)?;
        }
        for (f, seen) in sig.functions().iter().zip(&seen_f) {
            missing(&f.name, f.arity, seen)?;
        }
        for (c, seen) in sig.constants().iter().zip(&seen_c) {
            if !seen {
                return Err(StructureError::MissingEntry {
                    symbol: c.clone(),
                    tuple: String::new(),
                });
            }
        }
        Ok(m)
    }

    fn tuple_names(&self, arity: usize, index: usize) -> String {
        index_tuple(self.size(), arity, index)
            .into_iter()
            .map(|e| self.universe[e].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Space-separated `SYMBOL(tuple)=value` cells, nullary symbols without
    /// parentheses. Used for witness lines.
    pub fn cells(&self) -> String {
        let mut cells = Vec::new();
        let args = |s: String| if s.is_empty() { s } else { format!("({s})") };
        for (p, table) in self.sig.predicates().iter().zip(&self.preds) {
            for (ti, v) in table.iter().enumerate() {
                cells.push(format!("{}{}={v}", p.name, args(self.tuple_names(p.arity, ti))));
            }
        }
        for (f, table) in self.sig.functions().iter().zip(&self.funcs) {
            for (ti, v) in table.iter().enumerate() {
                cells.push(format!(
                    "{}{}={}",
                    f.name,
                    args(self.tuple_names(f.arity, ti)),
                    self.universe[*v]
                ));
            }
        }
        for (c, v) in self.sig.constants().iter().zip(&self.consts) {
            cells.push(format!("{c}={}", self.universe[*v]));
        }
        cells.join(" ")
    }
}

/// Name of the constant naming element `e` in `L(M)`.
pub fn element_constant(e: &str) -> String {
    format!("c_{e}")
}

fn parse_err(line: usize, msg: &str) -> StructureError {
    StructureError::Parse {
        line,
        msg: msg.to_string(),
    }
}

struct Scanner<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Scanner<'a> {
    fn new(s: &'a str, line: usize) -> Self {
        Scanner { rest: s, line }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn done(&mut self) -> bool {
        self.skip_ws();
        self.rest.is_empty()
    }

    fn expect(&mut self, tok: &str) -> Result<(), StructureError> {
        self.skip_ws();
        self.rest = self
            .rest
            .strip_prefix(tok)
            .ok_or_else(|| parse_err(self.line, &format!("expected `{tok}`")))?;
        Ok(())
    }

    /// Reads `( ... )` and returns the inside.
    fn parenthesized(&mut self) -> Result<String, StructureError> {
        self.expect("(")?;
        let end = self
            .rest
            .find(')')
            .ok_or_else(|| parse_err(self.line, "unclosed `(`"))?;
        let inside = self.rest[..end].to_string();
        self.rest = &self.rest[end + 1..];
        Ok(inside)
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| c.is_whitespace())
            .unwrap_or(self.rest.len());
        let w = &self.rest[..end];
        self.rest = &self.rest[end..];
        w
    }
}

impl fmt::Display for Structure {
    /// Renders the structure file format, tuples in row-major order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe: {}", self.universe.join(" "))?;
        for (p, table) in self.sig.predicates().iter().zip(&self.preds) {
            write!(f, "pred {}:", p.name)?;
            for (ti, v) in table.iter().enumerate() {
                write!(f, " ({})={v}", self.tuple_names(p.arity, ti))?;
            }
            writeln!(f)?;
        }
        for (g, table) in self.sig.functions().iter().zip(&self.funcs) {
            write!(f, "func {}:", g.name)?;
            for (ti, v) in table.iter().enumerate() {
                write!(f, " ({})->{}", self.tuple_names(g.arity, ti), self.universe[*v])?;
            }
            writeln!(f)?;
        }
        for (c, v) in self.sig.constants().iter().zip(&self.consts) {
            writeln!(f, "const {c}: {}", self.universe[*v])?;
        }
        Ok(())
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure {{ {} | {} }}", self.universe.join(" "), self.cells())
    }
}

/// Variable assignment: variable name to element position.
pub type Assignment = HashMap<String, usize>;
