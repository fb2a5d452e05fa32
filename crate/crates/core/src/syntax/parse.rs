//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := disj (("->" | "=>") imp)?
//! disj    := conj ("\/" conj)*
//! conj    := unary ("/\" unary)*
//! unary   := "~" unary | ("forall" | "exists") IDENT "." unary | atom
//! atom    := IDENT "(" term ("," term)* ")" | IDENT | RATIONAL | "(" formula ")"
//! ```

use thiserror::Error;

use super::ast::{Formula, Term};
use super::signature::{Signature, SymbolKind};
use crate::truthval::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at column {pos}")]
    UnknownSymbol { name: String, pos: usize },
    #[error("`{name}` at column {pos} expects {expected} arguments, found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        pos: usize,
    },
    #[error("rational {value} at column {pos} lies outside [0,1]")]
    RationalOutOfRange { value: Rational, pos: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownSymbol { pos, .. }
            | ParseError::ArityMismatch { pos, .. }
            | ParseError::RationalOutOfRange { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(Rational),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    And,
    Or,
    Arrow,
    StrongArrow,
    Iff,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    at: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            at: 0,
        };
        let mut out = Vec::new();
        loop {
            let (tok, pos) = lx.next()?;
            let done = tok == Tok::Eof;
            out.push((tok, pos));
            if done {
                return Ok(out);
            }
        }
    }

    fn peek_at(&self, off: usize) -> Option<u8> {
        self.src.get(self.at + off).copied()
    }

    fn number(&mut self) -> Result<i64, ParseError> {
        let start = self.at;
        while self.peek_at(0).is_some_and(|c| c.is_ascii_digit()) {
            self.at += 1;
        }
        std::str::from_utf8(&self.src[start..self.at])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError::Syntax {
                pos: start + 1,
                msg: "integer too large".into(),
            })
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.peek_at(0).is_some_and(|c| c.is_ascii_whitespace()) {
            self.at += 1;
        }
        let pos = self.at + 1;
        let Some(c) = self.peek_at(0) else {
            return Ok((Tok::Eof, pos));
        };
        let two = |s: &Self, a: u8, b: u8| s.peek_at(0) == Some(a) && s.peek_at(1) == Some(b);
        let tok = if c.is_ascii_digit() {
            let n = self.number()?;
            let mut d = 1;
            if self.peek_at(0) == Some(b'/') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
                self.at += 1;
                d = self.number()?;
                if d == 0 {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "zero denominator".into(),
                    });
                }
            }
            return Ok((Tok::Num(Rational::new(n, d)), pos));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.at;
            while self
                .peek_at(0)
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
            {
                self.at += 1;
            }
            let s = String::from_utf8_lossy(&self.src[start..self.at]).into_owned();
            return Ok((Tok::Ident(s), pos));
        } else if self.src[self.at..].starts_with(b"<->") {
            self.at += 3;
            return Ok((Tok::Iff, pos));
        } else if two(self, b'-', b'>') {
            self.at += 2;
            return Ok((Tok::Arrow, pos));
        } else if two(self, b'=', b'>') {
            self.at += 2;
            return Ok((Tok::StrongArrow, pos));
        } else if two(self, b'/', b'\\') {
            self.at += 2;
            return Ok((Tok::And, pos));
        } else if two(self, b'\\', b'/') {
            self.at += 2;
            return Ok((Tok::Or, pos));
        } else {
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'~' => Tok::Tilde,
                _ => {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("unexpected character `{}`", c as char),
                    })
                }
            }
        };
        self.at += 1;
        Ok((tok, pos))
    }
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: &'s Signature,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg: format!("expected {what}, found {:?}", self.peek()),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                Ok(Formula::implies(lhs, self.imp()?))
            }
            Tok::StrongArrow => {
                self.bump();
                Ok(Formula::strong_implies(lhs, self.imp()?))
            }
            _ => Ok(lhs),
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let pos = self.pos();
                let var = match self.bump() {
                    Tok::Ident(v) if v != "forall" && v != "exists" => v,
                    _ => {
                        return Err(ParseError::Syntax {
                            pos,
                            msg: "expected a variable after the quantifier".into(),
                        })
                    }
                };
                if self.sig.lookup(&var).is_some() || !is_variable_name(&var) {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("`{var}` cannot be bound: variables are lowercase and not signature symbols"),
                    });
                }
                self.expect(Tok::Dot, "`.`")?;
                let body = self.unary()?;
                Ok(if kw == "forall" {
                    Formula::forall(&var, body)
                } else {
                    Formula::exists(&var, body)
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.at;
        let pos = self.pos();
        match self.bump() {
            Tok::Num(r) => {
                if !r.in_unit_interval() {
                    return Err(ParseError::RationalOutOfRange { value: r, pos });
                }
                Ok(Formula::Const(r))
            }
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => {
                let args = if *self.peek() == Tok::LParen {
                    self.bump();
                    self.arguments()?
                } else {
                    Vec::new()
                };
                match self.sig.lookup(&name) {
                    Some(SymbolKind::Predicate(i)) => {
                        let expected = self.sig.predicates()[i].arity;
                        if expected != args.len() {
                            return Err(ParseError::ArityMismatch {
                                name,
                                expected,
                                found: args.len(),
                                pos,
                            });
                        }
                        Ok(Formula::Atom(name, args))
                    }
                    _ => Err(ParseError::UnknownSymbol { name, pos }),
                }
            }
            _ => {
                self.at = start;
                Err(self.unexpected("a formula"))
            }
        }
    }

    /// Parses `term ("," term)* ")"`, the opening parenthesis already consumed.
    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`,` or `)`")?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.at;
        let pos = self.pos();
        let name = match self.bump() {
            Tok::Ident(n) => n,
            _ => {
                self.at = start;
                return Err(self.unexpected("a term"));
            }
        };
        if *self.peek() == Tok::LParen {
            self.bump();
            let args = self.arguments()?;
            return match self.sig.lookup(&name) {
                Some(SymbolKind::Function(i)) => {
                    let expected = self.sig.functions()[i].arity;
                    if expected != args.len() {
                        return Err(ParseError::ArityMismatch {
                            name,
                            expected,
                            found: args.len(),
                            pos,
                        });
                    }
                    Ok(Term::Apply(name, args))
                }
                _ => Err(ParseError::UnknownSymbol { name, pos }),
            };
        }
        match self.sig.lookup(&name) {
            Some(SymbolKind::Constant(_)) => Ok(Term::Const(name)),
            Some(SymbolKind::Function(i)) if self.sig.functions()[i].arity == 0 => {
                Ok(Term::Apply(name, Vec::new()))
            }
            Some(SymbolKind::Function(i)) => Err(ParseError::ArityMismatch {
                name,
                expected: self.sig.functions()[i].arity,
                found: 0,
                pos,
            }),
            Some(SymbolKind::Predicate(_)) => Err(ParseError::Syntax {
                pos,
                msg: format!("predicate `{name}` used as a term"),
            }),
            None if is_variable_name(&name) => Ok(Term::Var(name)),
            None => Err(ParseError::UnknownSymbol { name, pos }),
        }
    }
}

fn is_variable_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase())
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: Lexer::tokens(text)?,
        at: 0,
        sig,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: Lexer::tokens(text)?,
        at: 0,
        sig,
    };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

/// Error from a line-oriented file, carrying the 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct LineError {
    pub line: usize,
    #[source]
    pub source: ParseError,
}

/// A theory file: one sentence per line, `#` comments and blank lines skipped.
pub fn parse_theory(text: &str, sig: &Signature) -> Result<Vec<Formula>, LineError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f = parse_formula(line, sig).map_err(|source| LineError { line: i + 1, source })?;
        if !f.is_sentence() {
            return Err(LineError {
                line: i + 1,
                source: ParseError::Syntax {
                    pos: 1,
                    msg: format!("theory members must be sentences, `{f}` has free variables"),
                },
            });
        }
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with_predicate("P", 1)
            .with_predicate("Q", 2)
            .with_predicate("p", 0)
            .with_function("f", 1)
            .with_constant("c")
    }

    fn half() -> Formula {
        Formula::Const(Rational::new(1, 2))
    }

    #[test]
    fn grammar_examples() {
        let s = sig();
        assert_eq!(
            parse_formula("1/2 -> P(c)", &s).unwrap(),
            Formula::implies(half(), Formula::atom("P", vec![Term::constant("c")]))
        );
        assert_eq!(
            parse_formula("forall x. (P(x) /\\ 3/4)", &s).unwrap(),
            Formula::forall(
                "x",
                Formula::and(
                    Formula::atom("P", vec![Term::var("x")]),
                    Formula::Const(Rational::new(3, 4))
                )
            )
        );
        assert!(matches!(
            parse_formula("P(x,y)", &s),
            Err(ParseError::ArityMismatch { expected: 1, found: 2, .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        let s = sig();
        let p = Formula::atom("p", vec![]);
        let f = parse_formula("p -> p -> p", &s).unwrap();
        assert_eq!(f, Formula::implies(p.clone(), Formula::implies(p.clone(), p.clone())));
        let f = parse_formula("p /\\ p \\/ p", &s).unwrap();
        assert_eq!(f, Formula::or(Formula::and(p.clone(), p.clone()), p.clone()));
        let f = parse_formula("~p => 0", &s).unwrap();
        assert_eq!(f, Formula::strong_implies(Formula::not(p.clone()), Formula::zero()));
        let f = parse_formula("forall x. P(x) -> p", &s).unwrap();
        assert!(matches!(f, Formula::Implies(..)));
    }

    #[test]
    fn errors() {
        let s = sig();
        assert!(matches!(parse_formula("R(c)", &s), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_formula("3/2", &s), Err(ParseError::RationalOutOfRange { .. })));
        assert!(matches!(parse_formula("P(c", &s), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula("forall c. P(c)", &s), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula("P(X)", &s), Err(ParseError::UnknownSymbol { .. })));
        assert_eq!(parse_formula("p -> ", &s).unwrap_err().position(), 6);
    }

    #[test]
    fn render_round_trip() {
        let s = sig();
        for text in [
            "(p -> p) -> p",
            "p <-> (p <-> p)",
            "~~p",
            "forall x. exists y. Q(x,f(y)) \\/ P(c)",
            "(forall x. P(x)) /\\ (p \\/ p) /\\ 1/3",
            "p /\\ (p /\\ p)",
            "(p => p) => 0",
        ] {
            let f = parse_formula(text, &s).unwrap();
            let again = parse_formula(&f.to_string(), &s).unwrap();
            assert_eq!(f, again, "{text} rendered as {f}");
        }
    }

    #[test]
    fn theory_files() {
        let s = sig();
        let t = parse_theory("# demo\np\n\n1/2 -> P(c)  # trailing\n", &s).unwrap();
        assert_eq!(t.len(), 2);
        let err = parse_theory("p\nP(x)\n", &s).unwrap_err();
        assert_eq!(err.line, 2);
    }
}
