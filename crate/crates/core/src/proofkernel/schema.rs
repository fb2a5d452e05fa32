use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{Formula, Signature, SymbolKind, Term, DISTANCE};
use crate::truthval::Rational;

use super::subst::Substitution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaId {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
    GqA1,
    GqA2,
    GqA3,
    GqE1,
    GqE2,
    Rgl1,
    Rgl2Ge,
    Rgl2Lt,
    Rgl3,
    S1,
    S2,
    S3,
    We1,
    We2,
}

impl SchemaId {
    pub const ALL: [SchemaId; 21] = [
        SchemaId::G1,
        SchemaId::G2,
        SchemaId::G3,
        SchemaId::G4,
        SchemaId::G5,
        SchemaId::G6,
        SchemaId::G7,
        SchemaId::GqA1,
        SchemaId::GqA2,
        SchemaId::GqA3,
        SchemaId::GqE1,
        SchemaId::GqE2,
        SchemaId::Rgl1,
        SchemaId::Rgl2Ge,
        SchemaId::Rgl2Lt,
        SchemaId::Rgl3,
        SchemaId::S1,
        SchemaId::S2,
        SchemaId::S3,
        SchemaId::We1,
        SchemaId::We2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemaId::G1 => "G1",
            SchemaId::G2 => "G2",
            SchemaId::G3 => "G3",
            SchemaId::G4 => "G4",
            SchemaId::G5 => "G5",
            SchemaId::G6 => "G6",
            SchemaId::G7 => "G7",
            SchemaId::GqA1 => "GQ_A1",
            SchemaId::GqA2 => "GQ_A2",
            SchemaId::GqA3 => "GQ_A3",
            SchemaId::GqE1 => "GQ_E1",
            SchemaId::GqE2 => "GQ_E2",
            SchemaId::Rgl1 => "RGL1",
            SchemaId::Rgl2Ge => "RGL2_GE",
            SchemaId::Rgl2Lt => "RGL2_LT",
            SchemaId::Rgl3 => "RGL3",
            SchemaId::S1 => "S1",
            SchemaId::S2 => "S2",
            SchemaId::S3 => "S3",
            SchemaId::We1 => "WE1",
            SchemaId::We2 => "WE2",
        }
    }

    /// Similarity and weak-extensionality schemas, admissible only over a
    /// signature in ultrametric mode.
    pub fn is_uml(self) -> bool {
        matches!(
            self,
            SchemaId::S1 | SchemaId::S2 | SchemaId::S3 | SchemaId::We1 | SchemaId::We2
        )
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemaId {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemaId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SchemaError::UnknownSchema(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error("metavariable `{0}` is not bound")]
    MissingMeta(String),
    #[error("side condition of {0} fails")]
    SideCondition(SchemaId),
    #[error("{0} is only available in ultrametric mode")]
    NotUml(SchemaId),
    #[error("`{0}` is not a function or predicate symbol of the signature")]
    BadSymbol(String),
    #[error("natural-number metavariable must be at least 1")]
    ZeroNatural,
    #[error(transparent)]
    NotSubstitutable(#[from] crate::syntax::NotSubstitutable),
}

#[derive(Debug, Clone)]
enum RPat {
    Meta(&'static str),
    One,
    Max(&'static str, &'static str),
}

#[derive(Debug, Clone)]
enum Pat {
    F(&'static str),
    Rat(RPat),
    Dist(&'static str, &'static str),
    And(Box<Pat>, Box<Pat>),
    Imp(Box<Pat>, Box<Pat>),
    All(&'static str, Box<Pat>),
    Ex(&'static str, Box<Pat>),
    /// `body[term/var]`.
    Subst(&'static str, &'static str, &'static str),
}

fn f(name: &'static str) -> Pat {
    Pat::F(name)
}
fn rat(name: &'static str) -> Pat {
    Pat::Rat(RPat::Meta(name))
}
fn and(a: Pat, b: Pat) -> Pat {
    Pat::And(Box::new(a), Box::new(b))
}
fn imp(a: Pat, b: Pat) -> Pat {
    Pat::Imp(Box::new(a), Box::new(b))
}
fn all(x: &'static str, a: Pat) -> Pat {
    Pat::All(x, Box::new(a))
}
fn ex(x: &'static str, a: Pat) -> Pat {
    Pat::Ex(x, Box::new(a))
}
fn or(a: Pat, b: Pat) -> Pat {
    and(imp(imp(a.clone(), b.clone()), b.clone()), imp(imp(b, a.clone()), a))
}
fn iff(a: Pat, b: Pat) -> Pat {
    and(imp(a.clone(), b.clone()), imp(b, a))
}
fn not(a: Pat) -> Pat {
    imp(a, Pat::Rat(RPat::One))
}
fn dist(x: &'static str, y: &'static str) -> Pat {
    Pat::Dist(x, y)
}

fn pattern(id: SchemaId) -> Option<Pat> {
    use SchemaId::*;
    Some(match id {
        G1 => imp(imp(f("phi"), f("psi")), imp(imp(f("psi"), f("chi")), imp(f("phi"), f("chi")))),
        G2 => imp(and(f("phi"), f("psi")), f("phi")),
        G3 => imp(and(f("phi"), f("psi")), and(f("psi"), f("phi"))),
        G4 => imp(f("phi"), and(f("phi"), f("phi"))),
        G5 => iff(
            imp(f("phi"), imp(f("psi"), f("chi"))),
            imp(and(f("phi"), f("psi")), f("chi")),
        ),
        G6 => imp(
            imp(imp(f("phi"), f("psi")), f("chi")),
            imp(imp(imp(f("psi"), f("phi")), f("chi")), f("chi")),
        ),
        G7 => imp(Pat::Rat(RPat::One), f("phi")),
        GqA1 => imp(all("x", f("phi")), Pat::Subst("phi", "x", "t")),
        GqA2 => imp(all("x", imp(f("psi"), f("phi"))), imp(f("psi"), all("x", f("phi")))),
        GqA3 => imp(all("x", or(f("psi"), f("phi"))), or(f("psi"), all("x", f("phi")))),
        GqE1 => imp(Pat::Subst("phi", "x", "t"), ex("x", f("phi"))),
        GqE2 => imp(ex("x", imp(f("psi"), f("phi"))), imp(f("psi"), ex("x", f("phi")))),
        Rgl1 => iff(and(rat("r"), rat("s")), Pat::Rat(RPat::Max("r", "s"))),
        Rgl2Ge => imp(rat("r"), rat("s")),
        Rgl2Lt => iff(imp(rat("r"), rat("s")), rat("s")),
        Rgl3 => not(not(rat("r"))),
        S1 => all("x", dist("x", "x")),
        S2 => all("x", all("y", imp(dist("x", "y"), dist("y", "x")))),
        S3 => all(
            "x",
            all(
                "y",
                all("z", imp(and(dist("x", "y"), dist("y", "z")), dist("x", "z"))),
            ),
        ),
        We1 | We2 => return None,
    })
}

fn side_condition(id: SchemaId, s: &Substitution) -> bool {
    use SchemaId::*;
    let x_not_free_in_psi = || match (s.variables.get("x"), s.formulas.get("psi")) {
        (Some(x), Some(psi)) => !psi.is_free(x),
        _ => false,
    };
    let distinct = |names: &[&str]| {
        let vals: Vec<_> = names.iter().filter_map(|n| s.variables.get(*n)).collect();
        vals.len() == names.len() && (0..vals.len()).all(|i| !vals[..i].contains(&vals[i]))
    };
    let r = s.rationals.get("r");
    let rs = r.zip(s.rationals.get("s"));
    match id {
        GqA2 | GqA3 | GqE2 => x_not_free_in_psi(),
        Rgl2Ge => rs.is_some_and(|(r, s)| r >= s),
        Rgl2Lt => rs.is_some_and(|(r, s)| r < s),
        Rgl3 => r.is_some_and(|r| *r < Rational::ONE),
        S2 => distinct(&["x", "y"]),
        S3 => distinct(&["x", "y", "z"]),
        _ => true,
    }
}

struct Matcher<'p, 'f> {
    s: Substitution,
    deferred: Vec<(&'p Pat, &'f Formula)>,
}

impl<'p, 'f> Matcher<'p, 'f> {
    fn bind_var(&mut self, meta: &str, v: &str) -> bool {
        match self.s.variables.get(meta) {
            Some(bound) => bound == v,
            None => {
                self.s.variables.insert(meta.to_string(), v.to_string());
                true
            }
        }
    }

    fn go(&mut self, p: &'p Pat, target: &'f Formula) -> bool {
        match (p, target) {
            (Pat::F(name), _) => match self.s.formulas.get(*name) {
                Some(bound) => bound == target,
                None => {
                    self.s.formulas.insert(name.to_string(), target.clone());
                    true
                }
            },
            (Pat::Rat(rp), Formula::Const(q)) => match rp {
                RPat::One => q.is_one(),
                RPat::Meta(name) => match self.s.rationals.get(*name) {
                    Some(bound) => bound == q,
                    None => {
                        self.s.rationals.insert(name.to_string(), *q);
                        true
                    }
                },
                RPat::Max(a, b) => {
                    if self.s.rationals.contains_key(*a) && self.s.rationals.contains_key(*b) {
                        self.resolve(p, target)
                    } else {
                        self.deferred.push((p, target));
                        true
                    }
                }
            },
            (Pat::Dist(a, b), Formula::Atom(d, args)) if d == DISTANCE && args.len() == 2 => {
                match (&args[0], &args[1]) {
                    (Term::Var(u), Term::Var(v)) => self.bind_var(a, u) && self.bind_var(b, v),
                    _ => false,
                }
            }
            (Pat::And(pa, pb), Formula::And(a, b)) | (Pat::Imp(pa, pb), Formula::Implies(a, b)) => {
                self.go(pa, a) && self.go(pb, b)
            }
            (Pat::All(x, pa), Formula::Forall(v, a)) | (Pat::Ex(x, pa), Formula::Exists(v, a)) => {
                self.bind_var(x, v) && self.go(pa, a)
            }
            (Pat::Subst(body, var, _), _) => {
                if self.s.formulas.contains_key(*body) && self.s.variables.contains_key(*var) {
                    self.resolve(p, target)
                } else {
                    self.deferred.push((p, target));
                    true
                }
            }
            _ => false,
        }
    }

    /// Handles the patterns that need earlier bindings.
    fn resolve(&mut self, p: &Pat, target: &Formula) -> bool {
        match p {
            Pat::Rat(RPat::Max(a, b)) => {
                let (ra, rb) = (self.s.rationals[*a], self.s.rationals[*b]);
                matches!(target, Formula::Const(q) if *q == ra.max(rb))
            }
            Pat::Subst(body, var, term) => {
                let phi = self.s.formulas[*body].clone();
                let x = self.s.variables[*var].clone();
                let t = match self.s.terms.get(*term) {
                    Some(t) => t.clone(),
                    None => match infer_instance(&phi, &x, target) {
                        Ok(Some(t)) => t,
                        Ok(None) => Term::var(&x),
                        Err(()) => return false,
                    },
                };
                match phi.substitute(&x, &t) {
                    Ok(inst) if inst == *target => {
                        self.s.terms.insert(term.to_string(), t);
                        true
                    }
                    _ => false,
                }
            }
            _ => unreachable!("only deferred patterns are resolved"),
        }
    }

    fn finish(&mut self) -> bool {
        let pending = std::mem::take(&mut self.deferred);
        pending.into_iter().all(|(p, t)| self.resolve(p, t))
    }
}

/// Finds the term `t` with `phi[t/x] = target`, if the shapes allow one.
/// `Ok(None)` means `x` has no free occurrence to pin `t` down.
fn infer_instance(phi: &Formula, x: &str, target: &Formula) -> Result<Option<Term>, ()> {
    fn term(p: &Term, x: &str, t: &Term, found: &mut Option<Term>) -> Result<(), ()> {
        match (p, t) {
            (Term::Var(v), _) if v == x => match found {
                Some(prev) if prev != t => Err(()),
                _ => {
                    *found = Some(t.clone());
                    Ok(())
                }
            },
            (Term::Apply(g, pa), Term::Apply(h, ta)) if g == h && pa.len() == ta.len() => {
                pa.iter().zip(ta).try_for_each(|(a, b)| term(a, x, b, found))
            }
            _ if p == t => Ok(()),
            _ => Err(()),
        }
    }
    fn walk(p: &Formula, x: &str, t: &Formula, found: &mut Option<Term>) -> Result<(), ()> {
        match (p, t) {
            (Formula::Atom(a, pa), Formula::Atom(b, ta)) if a == b && pa.len() == ta.len() => {
                pa.iter().zip(ta).try_for_each(|(u, v)| term(u, x, v, found))
            }
            (Formula::And(a1, b1), Formula::And(a2, b2))
            | (Formula::Implies(a1, b1), Formula::Implies(a2, b2)) => {
                walk(a1, x, a2, found)?;
                walk(b1, x, b2, found)
            }
            (Formula::Forall(v, a), Formula::Forall(w, b)) | (Formula::Exists(v, a), Formula::Exists(w, b))
                if v == w =>
            {
                if v == x {
                    if a == b {
                        Ok(())
                    } else {
                        Err(())
                    }
                } else {
                    walk(a, x, b, found)
                }
            }
            _ if p == t => Ok(()),
            _ => Err(()),
        }
    }
    let mut found = None;
    walk(phi, x, target, &mut found)?;
    Ok(found)
}

fn match_pattern(id: SchemaId, target: &Formula, seed: &Substitution) -> Option<Substitution> {
    let pat = pattern(id)?;
    let mut m = Matcher {
        s: seed.clone(),
        deferred: Vec::new(),
    };
    if m.go(&pat, target) && m.finish() && side_condition(id, &m.s) {
        Some(m.s)
    } else {
        None
    }
}

/// Leading universal binders and the body below them.
fn peel_foralls(mut f: &Formula) -> (Vec<String>, &Formula) {
    let mut vars = Vec::new();
    while let Formula::Forall(x, body) = f {
        vars.push(x.clone());
        f = body;
    }
    (vars, f)
}

/// `d(x1,y1) /\ ... /\ d(xk,yk)`, left-associated, `0` for `k = 0`.
pub fn tuple_distance(xs: &[String], ys: &[String]) -> Formula {
    let atoms = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| Formula::atom(DISTANCE, vec![Term::var(x), Term::var(y)]));
    atoms.reduce(Formula::and).unwrap_or_else(Formula::zero)
}

/// The weak-extensionality instance for `sym` at `n`, bound variables `xs`
/// and `ys`, in primitive form.
pub fn weak_extensionality(
    sig: &Signature,
    sym: &str,
    n: u64,
    xs: &[String],
    ys: &[String],
) -> Result<(SchemaId, Formula), SchemaError> {
    if n == 0 {
        return Err(SchemaError::ZeroNatural);
    }
    let bad = || SchemaError::BadSymbol(sym.to_string());
    let (id, arity) = match sig.lookup(sym).ok_or_else(bad)? {
        SymbolKind::Function(i) => (SchemaId::We1, sig.functions()[i].arity),
        SymbolKind::Predicate(i) => (SchemaId::We2, sig.predicates()[i].arity),
        SymbolKind::Constant(_) => return Err(bad()),
    };
    if xs.len() != arity || ys.len() != arity {
        return Err(bad());
    }
    let delta = sig.modulus_or_default(sym).ok_or_else(bad)?.eval(n);
    let threshold = Formula::constant(Rational::reciprocal_of(delta));
    let precision = Formula::constant(Rational::reciprocal_of(n));
    let left_args: Vec<Term> = xs.iter().map(|x| Term::var(x)).collect();
    let right_args: Vec<Term> = ys.iter().map(|y| Term::var(y)).collect();
    let conclusion = match id {
        SchemaId::We1 => Formula::atom(
            DISTANCE,
            vec![Term::apply(sym, left_args), Term::apply(sym, right_args)],
        ),
        _ => Formula::desugared_iff(Formula::atom(sym, left_args), Formula::atom(sym, right_args)),
    };
    let body = Formula::desugared_or(
        Formula::implies(tuple_distance(xs, ys), threshold),
        Formula::implies(precision, conclusion),
    );
    let f = xs
        .iter()
        .chain(ys)
        .rev()
        .fold(body, |acc, v| Formula::forall(v, acc));
    Ok((id, f))
}

fn match_we(target: &Formula, sig: &Signature, seed: &Substitution) -> Option<(SchemaId, Substitution)> {
    let (vars, body) = peel_foralls(target);
    if vars.len() % 2 != 0 || (0..vars.len()).any(|i| vars[..i].contains(&vars[i])) {
        return None;
    }
    let k = vars.len() / 2;
    // body is ((A -> B) -> B) /\ ((B -> A) -> A) with B = 1/n -> R
    let Formula::And(left, _) = body else { return None };
    let Formula::Implies(_, b) = &**left else { return None };
    let Formula::Implies(precision, r) = &**b else { return None };
    let Formula::Const(c) = &**precision else { return None };
    if c.numer() != 1 {
        return None;
    }
    let n = u64::try_from(c.denom()).ok()?;
    let sym = match &**r {
        Formula::Atom(d, args) if d == DISTANCE && args.len() == 2 => match &args[0] {
            Term::Apply(g, _) => g.clone(),
            Term::Const(_) | Term::Var(_) => return None,
        },
        Formula::And(a, _) => match &**a {
            Formula::Implies(p, _) => match &**p {
                Formula::Atom(name, _) => name.clone(),
                _ => return None,
            },
            _ => return None,
        },
        _ => return None,
    };
    let (id, expected) = weak_extensionality(sig, &sym, n, &vars[..k], &vars[k..]).ok()?;
    if expected != *target {
        return None;
    }
    let s = Substitution::new().symbol("sym", &sym).natural("n", n);
    seed.agrees_with(&s).then_some((id, s))
}

/// Every schema that `target` instantiates, with the witnessing
/// substitution. Schemas are matched against their primitive forms, so
/// `target` is desugared first. Similarity and extensionality schemas are
/// tried only when `sig` is in ultrametric mode.
pub fn match_axiom(target: &Formula, sig: &Signature) -> Vec<(SchemaId, Substitution)> {
    let target = target.desugar();
    let mut out = Vec::new();
    for id in SchemaId::ALL {
        if id.is_uml() && !sig.is_uml() {
            continue;
        }
        if let Some(s) = match_schema(id, &target, sig, &Substitution::new()) {
            out.push((id, s));
        }
    }
    out
}

/// Matches one schema, extending `seed`. `target` must be primitive.
pub fn match_schema(id: SchemaId, target: &Formula, sig: &Signature, seed: &Substitution) -> Option<Substitution> {
    match id {
        SchemaId::We1 | SchemaId::We2 => match_we(target, sig, seed)
            .filter(|(found, _)| *found == id)
            .map(|(_, s)| s),
        _ => match_pattern(id, target, seed),
    }
}

fn instantiate_pat(p: &Pat, s: &Substitution) -> Result<Formula, SchemaError> {
    let missing = |n: &str| SchemaError::MissingMeta(n.to_string());
    let var = |n: &str| s.variables.get(n).cloned().ok_or_else(|| missing(n));
    let rat = |n: &str| s.rationals.get(n).copied().ok_or_else(|| missing(n));
    Ok(match p {
        Pat::F(n) => s.formulas.get(*n).cloned().ok_or_else(|| missing(n))?,
        Pat::Rat(RPat::One) => Formula::one(),
        Pat::Rat(RPat::Meta(n)) => Formula::constant(rat(n)?),
        Pat::Rat(RPat::Max(a, b)) => Formula::constant(rat(a)?.max(rat(b)?)),
        Pat::Dist(a, b) => Formula::atom(DISTANCE, vec![Term::var(&var(a)?), Term::var(&var(b)?)]),
        Pat::And(a, b) => Formula::and(instantiate_pat(a, s)?, instantiate_pat(b, s)?),
        Pat::Imp(a, b) => Formula::implies(instantiate_pat(a, s)?, instantiate_pat(b, s)?),
        Pat::All(x, a) => Formula::forall(&var(x)?, instantiate_pat(a, s)?),
        Pat::Ex(x, a) => Formula::exists(&var(x)?, instantiate_pat(a, s)?),
        Pat::Subst(body, x, t) => {
            let phi = s.formulas.get(*body).ok_or_else(|| missing(body))?;
            let x = var(x)?;
            let t = s.terms.get(*t).cloned().unwrap_or_else(|| Term::var(&x));
            phi.substitute(&x, &t)?
        }
    })
}

/// The instance of `id` under `s`, in primitive form. Formula bindings are
/// desugared; a missing `t` defaults to the quantified variable itself.
/// Weak extensionality takes `sym` and `n` and binds `x1.. y1..`.
pub fn instantiate(id: SchemaId, s: &Substitution, sig: &Signature) -> Result<Formula, SchemaError> {
    if id.is_uml() && !sig.is_uml() {
        return Err(SchemaError::NotUml(id));
    }
    if let Some(p) = pattern(id) {
        let mut s = s.clone();
        for f in s.formulas.values_mut() {
            *f = f.desugar();
        }
        let mut defaults = |k: &str, v: &str| {
            s.variables.entry(k.to_string()).or_insert_with(|| v.to_string());
        };
        if matches!(id, SchemaId::S1 | SchemaId::S2 | SchemaId::S3) {
            defaults("x", "x");
            defaults("y", "y");
            defaults("z", "z");
        }
        if !side_condition(id, &s) {
            return Err(SchemaError::SideCondition(id));
        }
        return instantiate_pat(&p, &s);
    }
    let sym = s.symbols.get("sym").ok_or_else(|| SchemaError::MissingMeta("sym".into()))?;
    let n = *s.naturals.get("n").ok_or_else(|| SchemaError::MissingMeta("n".into()))?;
    let arity = match sig.lookup(sym) {
        Some(SymbolKind::Function(i)) => sig.functions()[i].arity,
        Some(SymbolKind::Predicate(i)) => sig.predicates()[i].arity,
        _ => return Err(SchemaError::BadSymbol(sym.clone())),
    };
    let xs: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=arity).map(|i| format!("y{i}")).collect();
    let (found, f) = weak_extensionality(sig, sym, n, &xs, &ys)?;
    if found != id {
        return Err(SchemaError::BadSymbol(sym.clone()));
    }
    Ok(f)
}
