use std::collections::HashSet;

use crate::syntax::{Formula, Signature};
use crate::truthval::TruthValue;

use super::enumerate::{enumerate_atoms, for_each_tuple, FormulaBounds};
use super::eval::{CompiledFormula, EvalError};
use super::structure::Structure;

/// One representative formula per class, with its values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaClass {
    pub formula: Formula,
    /// Bit `i` set when `bounds.variables[i]` is free.
    pub free: u64,
    pub depth: usize,
    /// Positions in the sorted value set, per structure and assignment.
    ranks: Vec<u16>,
}

/// The enumeration of [`super::enumerate_formulas`] cut down to one formula
/// per class, where two formulas share a class when they have the same free
/// variables and the same value under every assignment in every structure.
/// Values are computed from the children's tables, so each class costs one
/// pass over the assignments.
///
/// Every value a formula takes is an atomic value, `(0,0)` or a pool
/// constant, and the connectives only compare their inputs, so tables are
/// stored as ranks in that finite chain.
///
/// Every enumerated formula has a representative of no greater depth that
/// was produced no later, so a property of values checked on all classes
/// holds for the full enumeration.
#[derive(Debug, Clone)]
pub struct FormulaClasses {
    variables: Vec<String>,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    chain: Vec<TruthValue>,
    classes: Vec<FormulaClass>,
}

fn and(a: u16, b: u16) -> u16 {
    a.max(b)
}

fn exists(a: u16, b: u16) -> u16 {
    a.min(b)
}

/// Rank 0 is `(0,0)`, the least element.
fn implies(a: u16, b: u16) -> u16 {
    if a >= b {
        0
    } else {
        b
    }
}

impl FormulaClasses {
    pub fn classes(&self) -> &[FormulaClass] {
        &self.classes
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Value of a class in structure `which` under the assignment sending
    /// `variables[i]` to `tuple[i]`.
    pub fn value(&self, class: &FormulaClass, which: usize, tuple: &[usize]) -> TruthValue {
        let n = self.sizes[which];
        let idx = tuple.iter().fold(0, |acc, &e| acc * n + e);
        self.chain[usize::from(class.ranks[self.offsets[which] + idx])]
    }

    /// The value chain; tables index into it and its order is the order of `I`.
    pub fn chain(&self) -> &[TruthValue] {
        &self.chain
    }

    /// Table of a class in structure `which`, as chain ranks, indexed by
    /// assignments in row-major order over [`Self::variables`].
    pub fn table<'a>(&self, class: &'a FormulaClass, which: usize) -> &'a [u16] {
        let n = self.sizes[which];
        let start = self.offsets[which];
        &class.ranks[start..start + n.pow(self.variables.len() as u32)]
    }

    /// Whether the formula has no free variables.
    pub fn is_sentence(class: &FormulaClass) -> bool {
        class.free == 0
    }

    /// Builds the classes up to `bounds.depth`, keeping formulas with at most
    /// `max_free` free variables (after the binders still to come).
    pub fn build(
        sig: &Signature,
        structures: &[&Structure],
        bounds: &FormulaBounds,
        max_free: usize,
    ) -> Result<Self, EvalError> {
        let vars = bounds.variables.clone();
        assert!(vars.len() < 64, "at most 63 variables");
        let sizes: Vec<usize> = structures.iter().map(|m| m.size()).collect();
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &n in &sizes {
            offsets.push(total);
            total += n.pow(vars.len() as u32);
        }
        // constants outside [0,1] are not formulas
        let pool: Vec<TruthValue> = bounds
            .pool
            .iter()
            .filter(|r| r.in_unit_interval())
            .map(|r| TruthValue::hat(*r).expect("in [0,1]"))
            .collect();
        let mut chain = vec![TruthValue::ZERO];
        chain.extend(&pool);
        for m in structures {
            chain.extend(m.atomic_values());
        }
        chain.sort();
        chain.dedup();
        assert!(chain.len() <= usize::from(u16::MAX), "too many distinct values");
        let rank = |v: TruthValue| chain.binary_search(&v).expect("value in the chain") as u16;

        let mut out = FormulaClasses {
            variables: vars,
            sizes,
            offsets,
            chain: chain.clone(),
            classes: Vec::new(),
        };
        // key: the table followed by the free-variable mask
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        let mut scratch: Vec<u16> = Vec::with_capacity(total + 4);
        let mut admit = |scratch: &mut Vec<u16>, free: u64| {
            scratch.extend((0..4).map(|w| (free >> (16 * w)) as u16));
            let fresh = !seen.contains(scratch.as_slice());
            if fresh {
                seen.insert(scratch.clone());
            }
            scratch.truncate(total);
            fresh
        };
        let budget = |k: usize| max_free + (bounds.depth - k);

        for (r, v) in bounds.pool.iter().filter(|r| r.in_unit_interval()).zip(&pool) {
            scratch.clear();
            scratch.resize(total, rank(*v));
            if admit(&mut scratch, 0) {
                out.classes.push(FormulaClass {
                    formula: Formula::constant(*r),
                    free: 0,
                    depth: 0,
                    ranks: scratch.clone(),
                });
            }
        }
        for atom in enumerate_atoms(sig, &out.variables, bounds.term_depth) {
            let compiled = CompiledFormula::compile(&atom, sig)?;
            let positions: Vec<usize> = compiled
                .free_variables()
                .iter()
                .map(|x| out.variables.iter().position(|v| v == x).expect("enumerated over these variables"))
                .collect();
            let free = positions.iter().fold(0u64, |acc, &p| acc | 1 << p);
            if free.count_ones() as usize > budget(0) {
                continue;
            }
            scratch.clear();
            for m in structures {
                for_each_tuple(m.size(), out.variables.len(), |t| {
                    let args: Vec<usize> = positions.iter().map(|&p| t[p]).collect();
                    scratch.push(rank(compiled.eval_with(m, &args)));
                });
            }
            if admit(&mut scratch, free) {
                out.classes.push(FormulaClass {
                    formula: atom,
                    free,
                    depth: 0,
                    ranks: scratch.clone(),
                });
            }
        }

        for k in 1..=bounds.depth {
            let prev = out.classes.len();
            let ops: [(fn(Formula, Formula) -> Formula, fn(u16, u16) -> u16); 2] =
                [(Formula::and, and), (Formula::implies, implies)];
            for (make, op) in ops {
                for i in 0..prev {
                    for j in 0..prev {
                        let (a, b) = (&out.classes[i], &out.classes[j]);
                        if a.depth != k - 1 && b.depth != k - 1 {
                            continue;
                        }
                        let free = a.free | b.free;
                        if free.count_ones() as usize > budget(k) {
                            continue;
                        }
                        scratch.clear();
                        scratch.extend(a.ranks.iter().zip(&b.ranks).map(|(x, y)| op(*x, *y)));
                        if admit(&mut scratch, free) {
                            let formula = make(a.formula.clone(), b.formula.clone());
                            out.classes.push(FormulaClass {
                                formula,
                                free,
                                depth: k,
                                ranks: scratch.clone(),
                            });
                        }
                    }
                }
            }
            let quants: [(fn(&str, Formula) -> Formula, fn(u16, u16) -> u16); 2] =
                [(Formula::forall, and), (Formula::exists, exists)];
            for (make, op) in quants {
                for i in 0..prev {
                    if out.classes[i].depth != k - 1 {
                        continue;
                    }
                    for xi in 0..out.variables.len() {
                        let a = &out.classes[i];
                        let free = a.free & !(1 << xi);
                        if free.count_ones() as usize > budget(k) {
                            continue;
                        }
                        out.quantify(&a.ranks, xi, op, &mut scratch);
                        if admit(&mut scratch, free) {
                            let formula = make(&out.variables[xi], a.formula.clone());
                            out.classes.push(FormulaClass {
                                formula,
                                free,
                                depth: k,
                                ranks: scratch.clone(),
                            });
                        }
                    }
                }
            }
        }
        out.classes.retain(|c| c.free.count_ones() as usize <= max_free);
        Ok(out)
    }

    fn quantify(&self, ranks: &[u16], xi: usize, op: fn(u16, u16) -> u16, out: &mut Vec<u16>) {
        out.clear();
        let arity = self.variables.len();
        for (w, &n) in self.sizes.iter().enumerate() {
            let base = self.offsets[w];
            let stride = n.pow((arity - 1 - xi) as u32);
            let count = n.pow(arity as u32);
            for idx in 0..count {
                let digit = (idx / stride) % n;
                let start = idx - digit * stride;
                let v = (0..n)
                    .map(|e| ranks[base + start + e * stride])
                    .reduce(op)
                    .expect("nonempty universe");
                out.push(v);
            }
        }
    }
}
