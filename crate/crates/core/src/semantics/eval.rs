use std::collections::HashMap;

use thiserror::Error;

use crate::syntax::{check_formula, Formula, ParseError, Signature, Term};
use crate::truthval::{dual_residuum, tv_residuum, tv_u, DualTruthValue, Rational, TruthValue};

use super::structure::{Assignment, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    UnboundVariable(String),
    #[error("expected a sentence, found free variables: {}", .0.join(", "))]
    FreeVariablePresent(Vec<String>),
    #[error(transparent)]
    Symbol(#[from] ParseError),
}

#[derive(Debug, Clone)]
enum CTerm {
    Slot(usize),
    Const(usize),
    Apply(usize, Vec<CTerm>),
}

#[derive(Debug, Clone)]
enum Node {
    Const(Rational),
    Atom(usize, Vec<CTerm>),
    And(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Forall(usize, Box<Node>),
    Exists(usize, Box<Node>),
    Not(Box<Node>),
    Or(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    StrongImplies(Box<Node>, Box<Node>),
}

/// A formula with symbols resolved to table indices and variables to slots,
/// ready for repeated evaluation against structures of one signature.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    root: Node,
    free: Vec<String>,
    slots: usize,
}

struct Compiler<'s> {
    sig: &'s Signature,
    slots: HashMap<String, usize>,
}

impl Compiler<'_> {
    fn slot(&mut self, x: &str) -> usize {
        let next = self.slots.len();
        *self.slots.entry(x.to_string()).or_insert(next)
    }

    fn term(&mut self, t: &Term) -> CTerm {
        match t {
            Term::Var(x) => CTerm::Slot(self.slot(x)),
            Term::Const(c) => CTerm::Const(self.sig.constant_index(c).expect("checked")),
            Term::Apply(g, args) => CTerm::Apply(
                self.sig.function_index(g).expect("checked"),
                args.iter().map(|a| self.term(a)).collect(),
            ),
        }
    }

    fn formula(&mut self, f: &Formula) -> Node {
        let mut pair = |a: &Formula, b: &Formula| (Box::new(self.formula(a)), Box::new(self.formula(b)));
        match f {
            Formula::Const(r) => Node::Const(*r),
            Formula::Atom(p, args) => Node::Atom(
                self.sig.predicate_index(p).expect("checked"),
                args.iter().map(|a| self.term(a)).collect(),
            ),
            Formula::And(a, b) => {
                let (a, b) = pair(a, b);
                Node::And(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = pair(a, b);
                Node::Implies(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = pair(a, b);
                Node::Or(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = pair(a, b);
                Node::Iff(a, b)
            }
            Formula::StrongImplies(a, b) => {
                let (a, b) = pair(a, b);
                Node::StrongImplies(a, b)
            }
            Formula::Not(a) => Node::Not(Box::new(self.formula(a))),
            Formula::Forall(x, a) => {
                let s = self.slot(x);
                Node::Forall(s, Box::new(self.formula(a)))
            }
            Formula::Exists(x, a) => {
                let s = self.slot(x);
                Node::Exists(s, Box::new(self.formula(a)))
            }
        }
    }
}

impl CompiledFormula {
    pub fn compile(f: &Formula, sig: &Signature) -> Result<Self, EvalError> {
        check_formula(f, sig)?;
        let mut c = Compiler {
            sig,
            slots: HashMap::new(),
        };
        let free: Vec<String> = f.free_variables().into_iter().collect();
        // free variables take the first slots so callers can pass them positionally
        for x in &free {
            c.slot(x);
        }
        let root = c.formula(f);
        Ok(CompiledFormula {
            root,
            free,
            slots: c.slots.len(),
        })
    }

    /// Free variables in the order expected by [`CompiledFormula::eval_with`].
    pub fn free_variables(&self) -> &[String] {
        &self.free
    }

    /// Evaluates with the free variables bound positionally.
    pub fn eval_with(&self, m: &Structure, free_values: &[usize]) -> TruthValue {
        self.eval_in(&Primal(m), m, free_values)
    }

    pub fn eval_closed(&self, m: &Structure) -> TruthValue {
        self.eval_with(m, &[])
    }

    fn eval_in<A: Algebra>(&self, alg: &A, m: &Structure, free_values: &[usize]) -> A::V {
        assert_eq!(free_values.len(), self.free.len(), "one value per free variable");
        let mut env = vec![0; self.slots];
        env[..free_values.len()].copy_from_slice(free_values);
        eval_node(alg, m, &self.root, &mut env)
    }

    fn free_values(&self, sigma: &Assignment) -> Result<Vec<usize>, EvalError> {
        self.free
            .iter()
            .map(|x| {
                sigma
                    .get(x)
                    .copied()
                    .ok_or_else(|| EvalError::UnboundVariable(x.clone()))
            })
            .collect()
    }
}

/// Value algebra the evaluator folds into. Sugar is evaluated through its
/// definition in terms of `and`, `implies` and constants.
trait Algebra {
    type V: Copy;
    fn constant(&self, r: Rational) -> Self::V;
    fn atom(&self, pred: usize, tuple: usize) -> Self::V;
    fn and(&self, a: Self::V, b: Self::V) -> Self::V;
    fn implies(&self, a: Self::V, b: Self::V) -> Self::V;
    fn forall(&self, a: Self::V, b: Self::V) -> Self::V;
    fn exists(&self, a: Self::V, b: Self::V) -> Self::V;
}

struct Primal<'a>(&'a Structure);

impl Algebra for Primal<'_> {
    type V = TruthValue;

    fn constant(&self, r: Rational) -> TruthValue {
        TruthValue::hat(r).expect("constants are checked to lie in [0,1]")
    }
    fn atom(&self, pred: usize, tuple: usize) -> TruthValue {
        self.0.predicate_table(pred)[tuple]
    }
    fn and(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        a.max(b)
    }
    fn implies(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        tv_residuum(a, b)
    }
    fn forall(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        a.max(b)
    }
    fn exists(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        a.min(b)
    }
}

fn eval_cterm(m: &Structure, t: &CTerm, env: &[usize]) -> usize {
    match t {
        CTerm::Slot(s) => env[*s],
        CTerm::Const(c) => m.constant_value(*c),
        CTerm::Apply(g, args) => {
            let n = m.size();
            let idx = args.iter().fold(0, |acc, a| acc * n + eval_cterm(m, a, env));
            m.function_table(*g)[idx]
        }
    }
}

fn eval_node<A: Algebra>(alg: &A, m: &Structure, node: &Node, env: &mut Vec<usize>) -> A::V {
    match node {
        Node::Const(r) => alg.constant(*r),
        Node::Atom(p, args) => {
            let n = m.size();
            let idx = args.iter().fold(0, |acc, a| acc * n + eval_cterm(m, a, env));
            alg.atom(*p, idx)
        }
        Node::And(a, b) => {
            let va = eval_node(alg, m, a, env);
            let vb = eval_node(alg, m, b, env);
            alg.and(va, vb)
        }
        Node::Implies(a, b) => {
            let va = eval_node(alg, m, a, env);
            let vb = eval_node(alg, m, b, env);
            alg.implies(va, vb)
        }
        Node::Not(a) => {
            let va = eval_node(alg, m, a, env);
            alg.implies(va, alg.constant(Rational::ONE))
        }
        Node::Or(a, b) => {
            let va = eval_node(alg, m, a, env);
            let vb = eval_node(alg, m, b, env);
            let left = alg.implies(alg.implies(va, vb), vb);
            let right = alg.implies(alg.implies(vb, va), va);
            alg.and(left, right)
        }
        Node::Iff(a, b) => {
            let va = eval_node(alg, m, a, env);
            let vb = eval_node(alg, m, b, env);
            alg.and(alg.implies(va, vb), alg.implies(vb, va))
        }
        Node::StrongImplies(a, b) => {
            let va = eval_node(alg, m, a, env);
            let vb = eval_node(alg, m, b, env);
            alg.implies(alg.implies(vb, va), vb)
        }
        Node::Forall(s, a) | Node::Exists(s, a) => {
            let saved = env[*s];
            env[*s] = 0;
            let mut acc = eval_node(alg, m, a, env);
            for e in 1..m.size() {
                env[*s] = e;
                let v = eval_node(alg, m, a, env);
                acc = if matches!(node, Node::Forall(..)) {
                    alg.forall(acc, v)
                } else {
                    alg.exists(acc, v)
                };
            }
            env[*s] = saved;
            acc
        }
    }
}

fn resolve_term(m: &Structure, sigma: &Assignment, t: &Term) -> Result<usize, EvalError> {
    match t {
        Term::Var(x) => sigma
            .get(x)
            .copied()
            .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
        Term::Const(c) => {
            let ci = m.signature().constant_index(c).ok_or_else(|| ParseError::UnknownSymbol {
                name: c.clone(),
                pos: 0,
            })?;
            Ok(m.constant_value(ci))
        }
        Term::Apply(g, args) => {
            let sig = m.signature();
            let gi = sig.function_index(g).ok_or_else(|| ParseError::UnknownSymbol {
                name: g.clone(),
                pos: 0,
            })?;
            let expected = sig.functions()[gi].arity;
            if expected != args.len() {
                return Err(ParseError::ArityMismatch {
                    name: g.clone(),
                    expected,
                    found: args.len(),
                    pos: 0,
                }
                .into());
            }
            let vals = args
                .iter()
                .map(|a| resolve_term(m, sigma, a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(m.function_value(gi, &vals))
        }
    }
}

/// The element denoted by `t` under `sigma`.
pub fn eval_term(m: &Structure, sigma: &Assignment, t: &Term) -> Result<usize, EvalError> {
    resolve_term(m, sigma, t)
}

pub fn eval_formula(m: &Structure, sigma: &Assignment, f: &Formula) -> Result<TruthValue, EvalError> {
    let c = CompiledFormula::compile(f, m.signature())?;
    let free = c.free_values(sigma)?;
    Ok(c.eval_with(m, &free))
}

fn require_sentence(f: &Formula) -> Result<(), EvalError> {
    let free = f.free_variables();
    if free.is_empty() {
        Ok(())
    } else {
        Err(EvalError::FreeVariablePresent(free.into_iter().collect()))
    }
}

/// Value of a sentence.
pub fn eval_sentence(m: &Structure, f: &Formula) -> Result<TruthValue, EvalError> {
    require_sentence(f)?;
    eval_formula(m, &Assignment::new(), f)
}

/// `M |= phi`, i.e. the sentence evaluates to `(0,0)`.
pub fn satisfies(m: &Structure, f: &Formula) -> Result<bool, EvalError> {
    Ok(eval_sentence(m, f)?.is_zero())
}

pub fn models_theory(m: &Structure, theory: &[Formula]) -> Result<bool, EvalError> {
    for f in theory {
        if !satisfies(m, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The truth degree `inf { r : M |= r -> phi }`, which is the first
/// coordinate of the value.
pub fn truth_degree(m: &Structure, f: &Formula) -> Result<Rational, EvalError> {
    Ok(eval_sentence(m, f)?.first())
}

/// A structure whose predicate tables have been composed with `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualStructure {
    base: Structure,
    tables: Vec<Vec<DualTruthValue>>,
}

impl DualStructure {
    /// `M_u`.
    pub fn from_structure(m: &Structure) -> Self {
        let tables = (0..m.signature().predicates().len())
            .map(|p| m.predicate_table(p).iter().map(|v| tv_u(*v)).collect())
            .collect();
        DualStructure {
            base: m.clone(),
            tables,
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.base
    }

    pub fn predicate_table(&self, index: usize) -> &[DualTruthValue] {
        &self.tables[index]
    }
}

impl Algebra for DualStructure {
    type V = DualTruthValue;

    fn constant(&self, r: Rational) -> DualTruthValue {
        tv_u(TruthValue::hat(r).expect("constants are checked to lie in [0,1]"))
    }
    fn atom(&self, pred: usize, tuple: usize) -> DualTruthValue {
        self.tables[pred][tuple]
    }
    fn and(&self, a: DualTruthValue, b: DualTruthValue) -> DualTruthValue {
        a.min(b)
    }
    fn implies(&self, a: DualTruthValue, b: DualTruthValue) -> DualTruthValue {
        dual_residuum(a, b)
    }
    fn forall(&self, a: DualTruthValue, b: DualTruthValue) -> DualTruthValue {
        a.min(b)
    }
    fn exists(&self, a: DualTruthValue, b: DualTruthValue) -> DualTruthValue {
        a.max(b)
    }
}

/// Evaluation on the `[0,1]`-valued side: every clause is the image of the
/// primal clause under `u`.
pub fn eval_dual(mu: &DualStructure, sigma: &Assignment, f: &Formula) -> Result<DualTruthValue, EvalError> {
    let m = mu.structure();
    let c = CompiledFormula::compile(f, m.signature())?;
    let free = c.free_values(sigma)?;
    Ok(c.eval_in(mu, m, &free))
}
