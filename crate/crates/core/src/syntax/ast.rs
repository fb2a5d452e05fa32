use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::truthval::Rational;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    Apply(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn apply(name: &str, args: Vec<Term>) -> Term {
        Term::Apply(name.to_string(), args)
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) => {}
            Term::Apply(_, args) => args.iter().for_each(|a| a.variables(out)),
        }
    }

    pub fn contains_var(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::Const(_) => false,
            Term::Apply(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn substitute(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(y) if y == x => t.clone(),
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Apply(f, args) => {
                Term::Apply(f.clone(), args.iter().map(|a| a.substitute(x, t)).collect())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Apply(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Const(x) => write!(f, "{x}"),
            Term::Apply(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// First-order formulas. `Not`, `Or`, `Iff` and `StrongImplies` are sugar;
/// [`Formula::desugar`] rewrites them into the primitive connectives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Const(Rational),
    Atom(String, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    StrongImplies(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{term}` is not substitutable for `{var}`: it would be captured by the quantifier on `{binder}`")]
pub struct NotSubstitutable {
    pub var: String,
    pub term: Term,
    pub binder: String,
}

impl Formula {
    pub fn constant(r: Rational) -> Formula {
        Formula::Const(r)
    }

    pub fn zero() -> Formula {
        Formula::Const(Rational::ZERO)
    }

    pub fn one() -> Formula {
        Formula::Const(Rational::ONE)
    }

    pub fn atom(p: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(p.to_string(), args)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, a: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(a))
    }

    pub fn exists(x: &str, a: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(a))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn strong_implies(a: Formula, b: Formula) -> Formula {
        Formula::StrongImplies(Box::new(a), Box::new(b))
    }

    /// `~a := a -> 1`.
    pub fn desugared_not(a: Formula) -> Formula {
        Formula::implies(a, Formula::one())
    }

    /// `a \/ b := ((a -> b) -> b) /\ ((b -> a) -> a)`.
    pub fn desugared_or(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(Formula::implies(a.clone(), b.clone()), b.clone()),
            Formula::implies(Formula::implies(b, a.clone()), a),
        )
    }

    /// `a <-> b := (a -> b) /\ (b -> a)`.
    pub fn desugared_iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// `a => b := (b -> a) -> b`.
    pub fn desugared_strong_implies(a: Formula, b: Formula) -> Formula {
        Formula::implies(Formula::implies(b.clone(), a), b)
    }

    /// Rewrites every sugar node bottom-up; the result uses only constants,
    /// atoms, `/\`, `->`, `forall` and `exists`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Const(_) | Formula::Atom(..) => self.clone(),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Implies(a, b) => Formula::implies(a.desugar(), b.desugar()),
            Formula::Forall(x, a) => Formula::forall(x, a.desugar()),
            Formula::Exists(x, a) => Formula::exists(x, a.desugar()),
            Formula::Not(a) => Formula::desugared_not(a.desugar()),
            Formula::Or(a, b) => Formula::desugared_or(a.desugar(), b.desugar()),
            Formula::Iff(a, b) => Formula::desugared_iff(a.desugar(), b.desugar()),
            Formula::StrongImplies(a, b) => {
                Formula::desugared_strong_implies(a.desugar(), b.desugar())
            }
        }
    }

    pub fn is_primitive(&self) -> bool {
        match self {
            Formula::Const(_) | Formula::Atom(..) => true,
            Formula::And(a, b) | Formula::Implies(a, b) => a.is_primitive() && b.is_primitive(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.is_primitive(),
            _ => false,
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(_, args) => {
                let mut vars = BTreeSet::new();
                args.iter().for_each(|t| t.variables(&mut vars));
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::Or(a, b)
            | Formula::Iff(a, b)
            | Formula::StrongImplies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_free(&self, x: &str) -> bool {
        match self {
            Formula::Const(_) => false,
            Formula::Atom(_, args) => args.iter().any(|t| t.contains_var(x)),
            Formula::Not(a) => a.is_free(x),
            Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::Or(a, b)
            | Formula::Iff(a, b)
            | Formula::StrongImplies(a, b) => a.is_free(x) || b.is_free(x),
            Formula::Forall(y, a) | Formula::Exists(y, a) => y != x && a.is_free(x),
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Replaces the free occurrences of `x` by `t`. Capture is an error,
    /// never a trigger for renaming.
    pub fn substitute(&self, x: &str, t: &Term) -> Result<Formula, NotSubstitutable> {
        let mut tvars = BTreeSet::new();
        t.variables(&mut tvars);
        self.subst_inner(x, t, &tvars)
    }

    fn subst_inner(
        &self,
        x: &str,
        t: &Term,
        tvars: &BTreeSet<String>,
    ) -> Result<Formula, NotSubstitutable> {
        let bin = |a: &Formula, b: &Formula| -> Result<(Box<Formula>, Box<Formula>), NotSubstitutable> {
            Ok((
                Box::new(a.subst_inner(x, t, tvars)?),
                Box::new(b.subst_inner(x, t, tvars)?),
            ))
        };
        Ok(match self {
            Formula::Const(_) => self.clone(),
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|a| a.substitute(x, t)).collect())
            }
            Formula::Not(a) => Formula::Not(Box::new(a.subst_inner(x, t, tvars)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::And(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::Implies(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::Or(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::Iff(a, b)
            }
            Formula::StrongImplies(a, b) => {
                let (a, b) = bin(a, b)?;
                Formula::StrongImplies(a, b)
            }
            Formula::Forall(y, a) | Formula::Exists(y, a) => {
                if y == x || !a.is_free(x) {
                    return Ok(self.clone());
                }
                if tvars.contains(y) {
                    return Err(NotSubstitutable {
                        var: x.to_string(),
                        term: t.clone(),
                        binder: y.clone(),
                    });
                }
                let body = Box::new(a.subst_inner(x, t, tvars)?);
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(y.clone(), body)
                } else {
                    Formula::Exists(y.clone(), body)
                }
            }
        })
    }

    /// All subformulas of the desugared form, the formula itself included.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        fn walk(f: &Formula, out: &mut BTreeSet<Formula>) {
            out.insert(f.clone());
            match f {
                Formula::And(a, b) | Formula::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Forall(_, a) | Formula::Exists(_, a) => walk(a, out),
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        walk(&self.desugar(), &mut out);
        out
    }

    /// Connective and quantifier nesting depth; constants and atoms are 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Atom(..) => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
            Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::Or(a, b)
            | Formula::Iff(a, b)
            | Formula::StrongImplies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Every rational constant mentioned, in first-occurrence order.
    pub fn constants_used(&self) -> Vec<Rational> {
        fn walk(f: &Formula, out: &mut Vec<Rational>) {
            match f {
                Formula::Const(r) => {
                    if !out.contains(r) {
                        out.push(*r)
                    }
                }
                Formula::Atom(..) => {}
                Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => walk(a, out),
                Formula::And(a, b)
                | Formula::Implies(a, b)
                | Formula::Or(a, b)
                | Formula::Iff(a, b)
                | Formula::StrongImplies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) | Formula::StrongImplies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            _ => 5,
        }
    }

    fn render(&self, min: u8, out: &mut String) {
        let paren = self.precedence() < min;
        if paren {
            out.push('(');
        }
        let bin = |a: &Formula, op: &str, b: &Formula, la: u8, lb: u8, out: &mut String| {
            a.render(la, out);
            out.push_str(op);
            b.render(lb, out);
        };
        match self {
            Formula::Const(r) => out.push_str(&r.to_string()),
            Formula::Atom(p, args) => {
                out.push_str(p);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        out.push_str(&a.to_string());
                    }
                    out.push(')');
                }
            }
            Formula::Iff(a, b) => bin(a, " <-> ", b, 1, 2, out),
            Formula::Implies(a, b) => bin(a, " -> ", b, 3, 2, out),
            Formula::StrongImplies(a, b) => bin(a, " => ", b, 3, 2, out),
            Formula::Or(a, b) => bin(a, " \\/ ", b, 3, 4, out),
            Formula::And(a, b) => bin(a, " /\\ ", b, 4, 5, out),
            Formula::Not(a) => {
                out.push('~');
                a.render(5, out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                out.push_str(if matches!(self, Formula::Forall(..)) {
                    "forall "
                } else {
                    "exists "
                });
                out.push_str(x);
                out.push_str(". ");
                a.render(5, out);
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
