//! Generators and slow reference implementations shared by the integration
//! tests. The evaluator here is written from the clause definitions and does
//! not call into the library's evaluator.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use gumkit::semantics::{index_tuple, Structure};
use gumkit::syntax::{Formula, Signature, Term};
use gumkit::truthval::{Rational, TruthValue};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Pair = (Rational, Rational);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

pub fn tv(a: i64, b: i64, c: i64, d: i64) -> TruthValue {
    TruthValue::new(q(a, b), q(c, d)).unwrap()
}

pub fn pair_of(v: TruthValue) -> Pair {
    (v.first(), v.second())
}

/// A uniformly chosen point `(p/D, q/D)` of `I`.
pub fn random_value(rng: &mut impl Rng, den: i64) -> TruthValue {
    let count = 1 + den * (den + 1);
    let k = rng.gen_range(0..count);
    if k == 0 {
        return TruthValue::ZERO;
    }
    let (p, s) = (1 + (k - 1) / (den + 1), (k - 1) % (den + 1));
    TruthValue::new(q(p, den), q(s, den)).unwrap()
}

pub fn universe(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn pow(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, _| acc * n)
}

/// Every table filled independently at random.
pub fn random_structure(rng: &mut impl Rng, sig: &Arc<Signature>, size: usize, den: i64) -> Structure {
    let mut m = Structure::uniform(sig.clone(), universe(size)).unwrap();
    for (p, decl) in sig.predicates().iter().enumerate() {
        for t in 0..pow(size, decl.arity) {
            m.set_predicate_index(p, t, random_value(rng, den));
        }
    }
    for (g, decl) in sig.functions().iter().enumerate() {
        for t in 0..pow(size, decl.arity) {
            m.set_function_index(g, t, rng.gen_range(0..size));
        }
    }
    for c in 0..sig.constants().len() {
        m.set_constant_index(c, rng.gen_range(0..size));
    }
    m
}

pub fn random_term(rng: &mut dyn rand::RngCore, sig: &Signature, vars: &[&str], depth: usize) -> Term {
    let consts = sig.constants();
    let funcs = sig.functions();
    if depth > 0 && !funcs.is_empty() && rng.gen_bool(0.3) {
        let g = &funcs[rng.gen_range(0..funcs.len())];
        let args = (0..g.arity).map(|_| random_term(rng, sig, vars, depth - 1)).collect();
        return Term::apply(&g.name, args);
    }
    if !consts.is_empty() && (vars.is_empty() || rng.gen_bool(0.25)) {
        return Term::constant(&consts[rng.gen_range(0..consts.len())]);
    }
    Term::var(vars.choose(rng).expect("a variable or a constant"))
}

/// A random formula of depth at most `depth`, with sugar when `sugar` is set.
pub fn random_formula(
    rng: &mut dyn rand::RngCore,
    sig: &Signature,
    vars: &[&str],
    pool: &[Rational],
    depth: usize,
    sugar: bool,
) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.2);
    if leaf {
        let preds = sig.predicates();
        if preds.is_empty() || rng.gen_bool(0.25) {
            return Formula::constant(*pool.choose(rng).unwrap());
        }
        let p = &preds[rng.gen_range(0..preds.len())];
        let args = (0..p.arity).map(|_| random_term(rng, sig, vars, 1)).collect();
        return Formula::atom(&p.name, args);
    }
    let sub = |rng: &mut dyn rand::RngCore| random_formula(rng, sig, vars, pool, depth - 1, sugar);
    let kinds = if sugar { 10 } else { 4 };
    match rng.gen_range(0..kinds) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::implies(sub(rng), sub(rng)),
        2 => Formula::forall(vars.choose(rng).unwrap(), sub(rng)),
        3 => Formula::exists(vars.choose(rng).unwrap(), sub(rng)),
        4 => Formula::not(sub(rng)),
        5 => Formula::or(sub(rng), sub(rng)),
        6 => Formula::iff(sub(rng), sub(rng)),
        7 => Formula::strong_implies(sub(rng), sub(rng)),
        8 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::and(sub(rng), sub(rng)),
    }
}

/// Binds every free variable with a randomly chosen quantifier.
pub fn close(rng: &mut impl Rng, f: Formula) -> Formula {
    f.free_variables().into_iter().fold(f, |acc, x| {
        if rng.gen_bool(0.5) {
            Formula::forall(&x, acc)
        } else {
            Formula::exists(&x, acc)
        }
    })
}

pub fn universal_closure(f: Formula) -> Formula {
    f.free_variables().into_iter().fold(f, |acc, x| Formula::forall(&x, acc))
}

const ZERO: Pair = (Rational::ZERO, Rational::ZERO);
const ONE: Pair = (Rational::ONE, Rational::ONE);

fn residuum(a: Pair, b: Pair) -> Pair {
    if a >= b {
        ZERO
    } else {
        b
    }
}

fn oracle_term(m: &Structure, env: &HashMap<String, usize>, t: &Term) -> usize {
    let sig = m.signature();
    match t {
        Term::Var(x) => env[x],
        Term::Const(c) => m.constant_value(sig.constant_index(c).unwrap()),
        Term::Apply(g, args) => {
            let vals: Vec<usize> = args.iter().map(|a| oracle_term(m, env, a)).collect();
            m.function_value(sig.function_index(g).unwrap(), &vals)
        }
    }
}

/// Reference evaluation straight from the clauses, with sugar evaluated by
/// its closed forms: `~a = a -> 1`, `a \/ b = min`, `a <-> b = d_max`,
/// `a => b = (b -> a) -> b`.
pub fn oracle_eval(m: &Structure, env: &HashMap<String, usize>, f: &Formula) -> Pair {
    let go = |g: &Formula| oracle_eval(m, env, g);
    match f {
        Formula::Const(r) => (*r, *r),
        Formula::Atom(p, args) => {
            let vals: Vec<usize> = args.iter().map(|a| oracle_term(m, env, a)).collect();
            pair_of(m.predicate_value(m.signature().predicate_index(p).unwrap(), &vals))
        }
        Formula::And(a, b) => go(a).max(go(b)),
        Formula::Implies(a, b) => residuum(go(a), go(b)),
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            let vals = (0..m.size()).map(|e| {
                let mut inner = env.clone();
                inner.insert(x.clone(), e);
                oracle_eval(m, &inner, a)
            });
            if matches!(f, Formula::Forall(..)) {
                vals.max().unwrap()
            } else {
                vals.min().unwrap()
            }
        }
        Formula::Not(a) => residuum(go(a), ONE),
        Formula::Or(a, b) => go(a).min(go(b)),
        Formula::Iff(a, b) => {
            let (x, y) = (go(a), go(b));
            if x == y {
                ZERO
            } else {
                x.max(y)
            }
        }
        Formula::StrongImplies(a, b) => {
            let (x, y) = (go(a), go(b));
            residuum(residuum(y, x), y)
        }
    }
}

pub fn oracle_sentence(m: &Structure, f: &Formula) -> Pair {
    oracle_eval(m, &HashMap::new(), f)
}

pub fn oracle_satisfies(m: &Structure, f: &Formula) -> bool {
    oracle_sentence(m, &universal_closure(f.clone())) == ZERO
}

/// Random assignment of `vars` into the universe of `m`.
pub fn random_env(rng: &mut impl Rng, m: &Structure, vars: &[&str]) -> HashMap<String, usize> {
    vars.iter().map(|x| (x.to_string(), rng.gen_range(0..m.size()))).collect()
}

pub const SCAN_STEPS: i64 = 9240;
pub const SCAN_DENOMINATOR: i64 = 840;

/// `inf { r : M |= r -> phi }` by scanning `r = k/L` upwards and snapping to
/// the unique multiple of `1/840` within one step below the first hit. Exact
/// whenever the infimum has denominator dividing 840.
pub fn oracle_degree(value: Pair) -> Rational {
    let satisfied = |r: Rational| residuum((r, r), value) == ZERO;
    let hit = (0..=SCAN_STEPS)
        .map(|k| q(k, SCAN_STEPS))
        .find(|&r| satisfied(r))
        .expect("r = 1 always satisfies");
    let lo = hit - q(1, SCAN_STEPS);
    let k = (hit * Rational::from_integer(SCAN_DENOMINATOR)).floor();
    let snapped = q(k, SCAN_DENOMINATOR);
    assert!(snapped >= lo && snapped <= hit, "no grid point in the scan window");
    snapped
}

/// Violations of uniform continuity found by trying every `n <= 64`:
/// `(symbol, left, right)` for the strict conclusion and for the `<=` one.
pub type Violations = BTreeSet<(String, Vec<usize>, Vec<usize>)>;

pub fn brute_force_continuity(m: &Structure, horizon: u64) -> (Violations, Violations) {
    let sig = m.signature();
    let n = m.size();
    let di = sig.predicate_index("d").unwrap();
    let dist = |a: usize, b: usize| pair_of(m.predicate_value(di, &[a, b]));
    let tuple_dist = |a: &[usize], b: &[usize]| a.iter().zip(b).map(|(x, y)| dist(*x, *y)).max().unwrap_or(ZERO);
    let hat_recip = |k: u64| {
        let r = q(1, k as i64);
        (r, r)
    };
    let mut strict = Violations::new();
    let mut weak = Violations::new();
    let mut consider = |name: &str, a: Vec<usize>, b: Vec<usize>, values: Pair| {
        let modulus = sig.modulus_or_default(name).unwrap();
        let args = tuple_dist(&a, &b);
        for k in 1..=horizon {
            if args < hat_recip(modulus.eval(k)) {
                if values >= hat_recip(k) {
                    strict.insert((name.to_string(), a.clone(), b.clone()));
                }
                if values > hat_recip(k) {
                    weak.insert((name.to_string(), a.clone(), b.clone()));
                }
            }
        }
    };
    for (gi, g) in sig.functions().iter().enumerate() {
        let count = pow(n, g.arity);
        for i in 0..count {
            for j in 0..count {
                let (a, b) = (index_tuple(n, g.arity, i), index_tuple(n, g.arity, j));
                let values = dist(m.function_value(gi, &a), m.function_value(gi, &b));
                consider(&g.name, a, b, values);
            }
        }
    }
    for (pi, p) in sig.predicates().iter().enumerate() {
        let count = pow(n, p.arity);
        for i in 0..count {
            for j in 0..count {
                let (a, b) = (index_tuple(n, p.arity, i), index_tuple(n, p.arity, j));
                let (x, y) = (pair_of(m.predicate_value(pi, &a)), pair_of(m.predicate_value(pi, &b)));
                let values = if x == y { ZERO } else { x.max(y) };
                consider(&p.name, a, b, values);
            }
        }
    }
    (strict, weak)
}
