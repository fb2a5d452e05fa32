use std::fmt::Write as _;

use thiserror::Error;

use crate::syntax::{parse_formula, parse_term, Signature};

use super::proof::{Justification, Proof, ProofLine};
use super::schema::SchemaId;
use super::subst::{meta_kind, MetaKind, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ProofFileError {
    pub line: usize,
    pub msg: String,
}

/// Splits at commas outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts.into_iter().map(str::trim).filter(|p| !p.is_empty()).collect()
}

fn parse_substitution(text: &str, sig: &Signature) -> Result<Substitution, String> {
    let mut s = Substitution::new();
    for part in split_top_level(text) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `meta=value`, found `{part}`"))?;
        let (name, value) = (name.trim(), value.trim());
        let kind = meta_kind(name).ok_or_else(|| format!("unknown metavariable `{name}`"))?;
        s = match kind {
            MetaKind::Formula => s.formula(name, parse_formula(value, sig).map_err(|e| e.to_string())?),
            MetaKind::Term => s.term(name, parse_term(value, sig).map_err(|e| e.to_string())?),
            MetaKind::Variable => s.variable(name, value),
            MetaKind::Rational => s.rational(name, value.parse().map_err(|e: crate::truthval::TruthError| e.to_string())?),
            MetaKind::Natural => s.natural(name, value.parse().map_err(|_| format!("bad natural `{value}`"))?),
            MetaKind::Symbol => s.symbol(name, value),
        };
    }
    Ok(s)
}

fn parse_index(word: Option<&str>, what: &str) -> Result<usize, String> {
    word.ok_or_else(|| format!("missing {what}"))?
        .parse()
        .map_err(|_| format!("bad {what}"))
}

fn line_ref(word: Option<&str>) -> Result<usize, String> {
    let n = parse_index(word, "line number")?;
    n.checked_sub(1).ok_or_else(|| "line numbers start at 1".to_string())
}

fn parse_justification(text: &str, sig: &Signature) -> Result<Justification, String> {
    let text = text.trim();
    let (kind, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let mut words = rest.split_whitespace();
    Ok(match kind {
        "axiom" => {
            let rest = rest.trim();
            let (id, subst) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let id: SchemaId = id.parse().map_err(|e: super::SchemaError| e.to_string())?;
            let subst = subst.trim();
            let subst = subst
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .unwrap_or(subst);
            Justification::Axiom(id, parse_substitution(subst, sig)?)
        }
        "hyp" => Justification::Hyp(parse_index(words.next(), "theory index")?),
        "extra" => Justification::Extra(parse_index(words.next(), "hypothesis index")?),
        "mp" => Justification::MP(line_ref(words.next())?, line_ref(words.next())?),
        "gen" => {
            let i = line_ref(words.next())?;
            let x = words.next().ok_or("missing variable")?;
            Justification::Gen(i, x.to_string())
        }
        other => return Err(format!("unknown justification `{other}`")),
    })
}

/// Reads a proof file:
///
/// ```text
/// theory: A -> B
/// extra: A
/// 1. A ; extra 0
/// 2. A -> B ; hyp 0
/// 3. B ; mp 1 2
/// 4. (B /\ B) -> B ; axiom G2 [phi=B, psi=B]
/// ```
///
/// Lines are numbered from 1 in order; theory and extra indices from 0.
pub fn parse_proof(text: &str, sig: &Signature) -> Result<Proof, ProofFileError> {
    let mut p = Proof::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| ProofFileError { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("theory:") {
            p.theory.push(parse_formula(rest, sig).map_err(|e| err(e.to_string()))?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("extra:") {
            p.extra.push(parse_formula(rest, sig).map_err(|e| err(e.to_string()))?);
            continue;
        }
        let (number, rest) = line
            .split_once('.')
            .ok_or_else(|| err("expected `N. formula ; justification`".into()))?;
        let n: usize = number.trim().parse().map_err(|_| err(format!("bad line number `{number}`")))?;
        if n != p.lines.len() + 1 {
            return Err(err(format!("expected line number {}, found {n}", p.lines.len() + 1)));
        }
        let (formula, just) = rest
            .split_once(';')
            .ok_or_else(|| err("missing `; justification`".into()))?;
        let formula = parse_formula(formula, sig).map_err(|e| err(e.to_string()))?;
        let justification = parse_justification(just, sig).map_err(err)?;
        p.lines.push(ProofLine {
            formula,
            justification,
        });
    }
    Ok(p)
}

/// Writes the format read by [`parse_proof`].
pub fn render_proof(p: &Proof) -> String {
    let mut out = String::new();
    for t in &p.theory {
        let _ = writeln!(out, "theory: {t}");
    }
    for e in &p.extra {
        let _ = writeln!(out, "extra: {e}");
    }
    for (i, l) in p.lines.iter().enumerate() {
        let just = match &l.justification {
            Justification::Axiom(id, s) if s.is_empty() => format!("axiom {id}"),
            Justification::Axiom(id, s) => format!("axiom {id} [{s}]"),
            Justification::Hyp(k) => format!("hyp {k}"),
            Justification::Extra(k) => format!("extra {k}"),
            Justification::MP(a, b) => format!("mp {} {}", a + 1, b + 1),
            Justification::Gen(a, x) => format!("gen {} {x}", a + 1),
        };
        let _ = writeln!(out, "{}. {} ; {just}", i + 1, l.formula);
    }
    out
}
