use std::collections::BTreeSet;

use crate::syntax::{Formula, Signature, Term};
use crate::truthval::Rational;

use super::eval::{CompiledFormula, EvalError};
use super::structure::{Structure, StructureError};

/// `{0, 1/4, 1/2, 3/4, 1}`.
pub fn default_pool() -> Vec<Rational> {
    (0..=4).map(|k| Rational::new(k, 4)).collect()
}

/// Limits of a formula enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaBounds {
    /// Maximal nesting of connectives and quantifiers.
    pub depth: usize,
    pub pool: Vec<Rational>,
    pub variables: Vec<String>,
    pub term_depth: usize,
}

impl FormulaBounds {
    pub fn new(depth: usize) -> Self {
        FormulaBounds {
            depth,
            pool: default_pool(),
            variables: vec!["x".into(), "y".into()],
            term_depth: 1,
        }
    }

    pub fn with_pool(mut self, pool: Vec<Rational>) -> Self {
        self.pool = pool;
        self
    }

    pub fn with_variables(mut self, vars: &[&str]) -> Self {
        self.variables = vars.iter().map(|v| v.to_string()).collect();
        self
    }
}

/// Terms over `vars` and the signature's constants, nesting at most
/// `term_depth` function applications. Ordered by depth, then symbol order,
/// then argument tuples row-major.
pub fn enumerate_terms(sig: &Signature, vars: &[String], term_depth: usize) -> Vec<Term> {
    let mut all: Vec<(Term, usize)> = vars.iter().map(|v| (Term::var(v), 0)).collect();
    all.extend(sig.constants().iter().map(|c| (Term::constant(c), 0)));
    for k in 1..=term_depth {
        let mut fresh = Vec::new();
        for g in sig.functions() {
            for_each_tuple(all.len(), g.arity, |tuple| {
                if tuple.iter().any(|&i| all[i].1 == k - 1) {
                    let args = tuple.iter().map(|&i| all[i].0.clone()).collect();
                    fresh.push((Term::apply(&g.name, args), k));
                }
            });
        }
        all.extend(fresh);
    }
    all.into_iter().map(|(t, _)| t).collect()
}

pub fn for_each_tuple(n: usize, arity: usize, mut visit: impl FnMut(&[usize])) {
    if arity > 0 && n == 0 {
        return;
    }
    let mut tuple = vec![0; arity];
    loop {
        visit(&tuple);
        let mut pos = arity;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Atomic formulas over [`enumerate_terms`].
pub fn enumerate_atoms(sig: &Signature, vars: &[String], term_depth: usize) -> Vec<Formula> {
    let terms = enumerate_terms(sig, vars, term_depth);
    let mut out = Vec::new();
    for p in sig.predicates() {
        for_each_tuple(terms.len(), p.arity, |tuple| {
            out.push(Formula::atom(&p.name, tuple.iter().map(|&i| terms[i].clone()).collect()));
        });
    }
    out
}

/// Primitive formulas up to `bounds.depth`, at most `max_free` free variables
/// each, in enumeration order: by depth, then pool constants, atoms, `/\`
/// pairs, `->` pairs, `forall`, `exists`.
///
/// A formula of depth `k` can only lose free variables through the
/// `depth - k` binders above it, so formulas with more are skipped.
pub fn enumerate_formulas(sig: &Signature, bounds: &FormulaBounds, max_free: usize) -> Vec<Formula> {
    let budget = |k: usize| max_free + (bounds.depth - k);
    let mut all: Vec<(Formula, BTreeSet<String>, usize)> = Vec::new();
    for r in &bounds.pool {
        all.push((Formula::constant(*r), BTreeSet::new(), 0));
    }
    for a in enumerate_atoms(sig, &bounds.variables, bounds.term_depth) {
        let fv = a.free_variables();
        if fv.len() <= budget(0) {
            all.push((a, fv, 0));
        }
    }
    for k in 1..=bounds.depth {
        let prev = all.len();
        let mut fresh = Vec::new();
        for make in [Formula::and as fn(Formula, Formula) -> Formula, Formula::implies] {
            for i in 0..prev {
                for j in 0..prev {
                    if all[i].2 != k - 1 && all[j].2 != k - 1 {
                        continue;
                    }
                    let fv: BTreeSet<String> = all[i].1.union(&all[j].1).cloned().collect();
                    if fv.len() <= budget(k) {
                        fresh.push((make(all[i].0.clone(), all[j].0.clone()), fv, k));
                    }
                }
            }
        }
        for make in [Formula::forall as fn(&str, Formula) -> Formula, Formula::exists] {
            for i in 0..prev {
                if all[i].2 != k - 1 {
                    continue;
                }
                for x in &bounds.variables {
                    let mut fv = all[i].1.clone();
                    fv.remove(x);
                    if fv.len() <= budget(k) {
                        fresh.push((make(x, all[i].0.clone()), fv, k));
                    }
                }
            }
        }
        all.extend(fresh);
    }
    all.into_iter()
        .filter(|(_, fv, _)| fv.len() <= max_free)
        .map(|(f, _, _)| f)
        .collect()
}

/// Sentences up to the bound, in enumeration order.
pub fn enumerate_sentences(sig: &Signature, bounds: &FormulaBounds) -> Vec<Formula> {
    enumerate_formulas(sig, bounds, 0)
}

/// The enumerated sentences satisfied by `m`. With `name_elements` the
/// enumeration runs over the language extended by one constant per element,
/// so the result is a bounded fragment of the weak elementary diagram.
pub fn theory_of_bounded(
    m: &Structure,
    bounds: &FormulaBounds,
    name_elements: bool,
) -> Result<Vec<Formula>, StructureError> {
    let owned;
    let m = if name_elements {
        owned = m.named()?;
        &owned
    } else {
        m
    };
    Ok(enumerate_sentences(m.signature(), bounds)
        .into_iter()
        .filter(|f| {
            let c: Result<CompiledFormula, EvalError> = CompiledFormula::compile(f, m.signature());
            c.expect("enumerated over the structure's signature")
                .eval_closed(m)
                .is_zero()
        })
        .collect())
}
