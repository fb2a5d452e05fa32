//! Batch front end. [`run`] takes the argument list and returns the exit
//! code with the text to print, so the binary stays a thin wrapper.
//!
//! Exit codes: 0 the property holds within bounds (or a model was found),
//! 1 a countermodel or failure was found, 2 the budget ran out, 3 input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::modelsearch::{
    check_approx_entailment, check_entailment, check_strong_entailment, classify_map, find_model, weak_equiv_bounded,
    ApproxVerdict, BoundedVerdict, SearchBounds, WeakEquivVerdict,
};
use crate::proofkernel::{check_proof, parse_proof, render_proof, CheckReport};
use crate::semantics::{
    enumerate_sentences, eval_dual, eval_formula, index_tuple, Assignment, DualStructure, Structure,
};
use crate::syntax::{parse_formula, parse_theory, Formula, Signature};
use crate::truthval::{tv_u, Rational};
use crate::ultrametric::{check_uniform_continuity, quotient, validate_pseudo_ultrametric, QuotientError};

pub const THREADS_ENV: &str = "GUMKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gumkit", version, about = "Rational Gödel and ultrametric logic toolkit")]
struct Cli {
    /// Print aligned `key value` lines instead of `KEY=VALUE` records.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SigArg {
    #[arg(long)]
    sig: PathBuf,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    max_universe: usize,
    #[arg(long, default_value_t = 4)]
    grid_denominator: u32,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    max_subset: usize,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Rational constants for sentence enumeration, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1/4,1/2,3/4,1")]
    pool: Vec<String>,
    /// Variables for sentence enumeration, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "x,y")]
    variables: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize a signature, formula, theory, structure or proof.
    Parse {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        structure: Option<PathBuf>,
        #[arg(long)]
        proof: Option<PathBuf>,
    },
    /// Evaluate a formula in a structure.
    Eval {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        /// Assignment such as `x=a,y=b`.
        #[arg(long, value_delimiter = ',')]
        assign: Vec<String>,
        /// Also print the truth degree.
        #[arg(long)]
        degree: bool,
    },
    /// Check a proof file.
    CheckProof {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Search for a model of a theory.
    FindModel {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        theory: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Search for a countermodel to `T |= phi`.
    Entail {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Search for a structure where phi exceeds every member of T.
    StrongEntail {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Search for a finite subset of T entailing `1/n -> phi`.
    ApproxEntail {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Check the metric laws and uniform continuity.
    UmValidate {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Collapse points at distance (0,0).
    UmQuotient {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Emit the u-translated structure and verify the duality.
    Translate {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Compare truth degrees of enumerated sentences.
    WeakEquiv {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Grade an element map between two structures.
    ClassifyMap {
        #[command(flatten)]
        sig: SigArg,
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        other: PathBuf,
        /// Element map such as `a->a,b->c`.
        #[arg(long, value_delimiter = ',')]
        map: Vec<String>,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Line {
    Record(&'static str, String),
    Text(String),
}

struct Report {
    lines: Vec<Line>,
    code: i32,
}

impl Report {
    fn new() -> Self {
        Report {
            lines: Vec::new(),
            code: 0,
        }
    }

    fn record(&mut self, key: &'static str, value: impl ToString) -> &mut Self {
        self.lines.push(Line::Record(key, value.to_string()));
        self
    }

    fn text(&mut self, text: impl AsRef<str>) -> &mut Self {
        for l in text.as_ref().lines() {
            self.lines.push(Line::Text(l.to_string()));
        }
        self
    }

    fn exit(&mut self, code: i32) -> &mut Self {
        self.code = code;
        self
    }

    fn render(&self, human: bool) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let _ = match l {
                Line::Record(k, v) if human => writeln!(out, "{:<16}{v}", k.to_lowercase().replace('_', " ")),
                Line::Record(k, v) => writeln!(out, "{k}={v}"),
                Line::Text(t) => writeln!(out, "{t}"),
            };
        }
        out
    }
}

/// An input error: the file (or argument) and a message with its position.
struct InputError(String);

type Res<T> = Result<T, InputError>;

fn fail(origin: &str, e: impl std::fmt::Display) -> InputError {
    InputError(format!("{origin}: {e}"))
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| fail(&path.display().to_string(), e))
}

fn load_sig(arg: &SigArg) -> Res<Arc<Signature>> {
    let text = read(&arg.sig)?;
    Signature::parse(&text)
        .map(Arc::new)
        .map_err(|e| fail(&arg.sig.display().to_string(), e))
}

fn load_structure(path: &Path, sig: &Arc<Signature>) -> Res<Structure> {
    Structure::parse(&read(path)?, Arc::clone(sig)).map_err(|e| fail(&path.display().to_string(), e))
}

fn load_theory(path: &Path, sig: &Signature) -> Res<Vec<Formula>> {
    parse_theory(&read(path)?, sig).map_err(|e| fail(&path.display().to_string(), e))
}

fn formula_arg(text: &str, sig: &Signature) -> Res<Formula> {
    parse_formula(text, sig).map_err(|e| fail("--formula", e))
}

fn sentence_arg(text: &str, sig: &Signature) -> Res<Formula> {
    let f = formula_arg(text, sig)?;
    if f.is_sentence() {
        Ok(f)
    } else {
        Err(fail("--formula", format!("`{f}` has free variables")))
    }
}

fn search_bounds(b: &BoundsArgs) -> Res<SearchBounds> {
    let pool = b
        .pool
        .iter()
        .map(|r| r.trim().parse::<Rational>().map_err(|e| fail("--pool", e)))
        .collect::<Res<Vec<_>>>()?;
    let bounds = SearchBounds {
        max_universe: b.max_universe,
        grid_denominator: b.grid_denominator,
        pool,
        sentence_depth: b.depth,
        max_subset: b.max_subset,
        budget: b.budget,
        variables: b.variables.iter().map(|v| v.trim().to_string()).collect(),
    };
    bounds.validate().map_err(|e| fail("bounds", e))?;
    Ok(bounds)
}

fn search_report(r: &mut Report, v: BoundedVerdict, found: &str, none: &str, none_code: i32) {
    match v {
        BoundedVerdict::Found(m) => {
            r.record("VERDICT", found).record("WITNESS", m.cells()).exit(0);
        }
        BoundedVerdict::RefutedBy(m) => {
            r.record("VERDICT", found).record("WITNESS", m.cells()).exit(1);
        }
        BoundedVerdict::NoneWithinBounds => {
            r.record("VERDICT", none).exit(none_code);
        }
        BoundedVerdict::BudgetExhausted(b) => {
            r.record("VERDICT", "budget-exhausted").record("REASON", format!("examined {b} structures")).exit(2);
        }
    }
}

fn element_map(pairs: &[String], m: &Structure, n: &Structure) -> Res<Vec<usize>> {
    let mut j = vec![None; m.size()];
    for p in pairs {
        let (a, b) = p
            .split_once("->")
            .ok_or_else(|| fail("--map", format!("expected `a->b`, found `{p}`")))?;
        let a = m.element(a.trim()).ok_or_else(|| fail("--map", format!("unknown element `{a}`")))?;
        let b = n.element(b.trim()).ok_or_else(|| fail("--map", format!("unknown element `{b}`")))?;
        j[a] = Some(b);
    }
    j.into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or_else(|| fail("--map", format!("no image for `{}`", m.universe()[i]))))
        .collect()
}

fn render_dual(mu: &DualStructure) -> String {
    let m = mu.structure();
    let mut out = format!("universe: {}\n", m.universe().join(" "));
    for (pi, p) in m.signature().predicates().iter().enumerate() {
        let _ = write!(out, "pred {}:", p.name);
        for (ti, v) in mu.predicate_table(pi).iter().enumerate() {
            let names: Vec<&str> = index_tuple(m.size(), p.arity, ti)
                .into_iter()
                .map(|e| m.universe()[e].as_str())
                .collect();
            let _ = write!(out, " ({})={v}", names.join(","));
        }
        out.push('\n');
    }
    let primal = m.to_string();
    for l in primal.lines().filter(|l| l.starts_with("func ") || l.starts_with("const ")) {
        out.push_str(l);
        out.push('\n');
    }
    out
}

fn dispatch(cmd: Command) -> Res<Report> {
    let mut r = Report::new();
    match cmd {
        Command::Parse {
            sig,
            formula,
            theory,
            structure,
            proof,
        } => {
            let s = load_sig(&sig)?;
            let mut any = false;
            if let Some(f) = formula {
                r.text(formula_arg(&f, &s)?.to_string());
                any = true;
            }
            if let Some(t) = theory {
                for f in load_theory(&t, &s)? {
                    r.text(f.to_string());
                }
                any = true;
            }
            if let Some(m) = structure {
                r.text(load_structure(&m, &s)?.to_string());
                any = true;
            }
            if let Some(p) = proof {
                let parsed = parse_proof(&read(&p)?, &s).map_err(|e| fail(&p.display().to_string(), e))?;
                r.text(render_proof(&parsed));
                any = true;
            }
            if !any {
                r.text(s.to_string());
            }
        }
        Command::Eval {
            sig,
            structure,
            formula,
            assign,
            degree,
        } => {
            let s = load_sig(&sig)?;
            let m = load_structure(&structure, &s)?;
            let f = formula_arg(&formula, &s)?;
            let mut sigma = Assignment::new();
            for a in &assign {
                let (x, e) = a
                    .split_once('=')
                    .ok_or_else(|| fail("--assign", format!("expected `x=a`, found `{a}`")))?;
                let e = m
                    .element(e.trim())
                    .ok_or_else(|| fail("--assign", format!("unknown element `{e}`")))?;
                sigma.insert(x.trim().to_string(), e);
            }
            let v = eval_formula(&m, &sigma, &f).map_err(|e| fail("--formula", e))?;
            r.record("VALUE", v);
            if degree {
                r.record("DEGREE", v.first());
            }
        }
        Command::CheckProof { sig, theory, proof } => {
            let s = load_sig(&sig)?;
            let mut p = parse_proof(&read(&proof)?, &s).map_err(|e| fail(&proof.display().to_string(), e))?;
            if let Some(t) = theory {
                let mut members = load_theory(&t, &s)?;
                members.append(&mut p.theory);
                p.theory = members;
            }
            match check_proof(&p, &s) {
                CheckReport::Valid => {
                    r.record("VERDICT", "valid");
                }
                CheckReport::Invalid { line, reason } => {
                    r.record("VERDICT", "invalid").record("LINE", line).record("REASON", reason).exit(1);
                }
            }
        }
        Command::FindModel { sig, theory, bounds } => {
            let s = load_sig(&sig)?;
            let t = load_theory(&theory, &s)?;
            let v = find_model(&s, &t, &search_bounds(&bounds)?).map_err(|e| fail("find-model", e))?;
            search_report(&mut r, v, "model", "none-within-bounds", 1);
        }
        Command::Entail {
            sig,
            theory,
            formula,
            bounds,
        } => {
            let s = load_sig(&sig)?;
            let t = load_theory(&theory, &s)?;
            let f = sentence_arg(&formula, &s)?;
            let v = check_entailment(&s, &t, &f, &search_bounds(&bounds)?).map_err(|e| fail("entail", e))?;
            search_report(&mut r, v, "countermodel", "entailed-within-bounds", 0);
        }
        Command::StrongEntail {
            sig,
            theory,
            formula,
            bounds,
        } => {
            let s = load_sig(&sig)?;
            let t = load_theory(&theory, &s)?;
            let f = sentence_arg(&formula, &s)?;
            let v = check_strong_entailment(&s, &t, &f, &search_bounds(&bounds)?)
                .map_err(|e| fail("strong-entail", e))?;
            search_report(&mut r, v, "countermodel", "entailed-within-bounds", 0);
        }
        Command::ApproxEntail {
            sig,
            theory,
            formula,
            n,
            bounds,
        } => {
            let s = load_sig(&sig)?;
            let t = load_theory(&theory, &s)?;
            let f = sentence_arg(&formula, &s)?;
            let v = check_approx_entailment(&s, &t, &f, n, &search_bounds(&bounds)?)
                .map_err(|e| fail("approx-entail", e))?;
            match v {
                ApproxVerdict::Subset(idx) => {
                    let members: Vec<String> = idx.iter().map(|&i| t[i].to_string()).collect();
                    r.record("VERDICT", "subset").record("WITNESS", members.join(" ; "));
                }
                ApproxVerdict::NoneWithinBounds => {
                    r.record("VERDICT", "none-within-bounds").exit(1);
                }
                ApproxVerdict::BudgetExhausted(b) => {
                    r.record("VERDICT", "budget-exhausted")
                        .record("REASON", format!("examined {b} structures"))
                        .exit(2);
                }
            }
        }
        Command::UmValidate { sig, structure } => {
            let s = load_sig(&sig)?;
            let m = load_structure(&structure, &s)?;
            let origin = structure.display().to_string();
            let metric = validate_pseudo_ultrametric(&m).map_err(|e| fail(&origin, e))?;
            let cont = check_uniform_continuity(&m).map_err(|e| fail(&origin, e))?;
            r.text(metric.to_string()).text(cont.to_string());
            let pass = metric.passes() && cont.passes();
            r.record("VERDICT", if pass { "pass" } else { "fail" })
                .record("WEAK_READING", if metric.passes() && cont.axioms_hold() { "pass" } else { "fail" })
                .exit(if pass { 0 } else { 1 });
        }
        Command::UmQuotient { sig, structure } => {
            let s = load_sig(&sig)?;
            let m = load_structure(&structure, &s)?;
            match quotient(&m) {
                Ok(q) => {
                    let proj: Vec<String> = m
                        .universe()
                        .iter()
                        .zip(&q.projection)
                        .map(|(a, &c)| format!("{a}->{}", q.structure.universe()[c]))
                        .collect();
                    r.text(q.structure.to_string()).text(format!("# projection: {}", proj.join(" ")));
                }
                Err(QuotientError::Metric(e)) => return Err(fail(&structure.display().to_string(), e)),
                Err(e) => {
                    r.record("VERDICT", "rejected").record("REASON", e).exit(1);
                }
            }
        }
        Command::Translate { sig, structure, depth } => {
            let s = load_sig(&sig)?;
            let m = load_structure(&structure, &s)?;
            let mu = DualStructure::from_structure(&m);
            r.text(render_dual(&mu));
            let bounds = crate::semantics::FormulaBounds::new(depth);
            let sentences = enumerate_sentences(&s, &bounds);
            let empty = Assignment::new();
            let bad = sentences.iter().find(|f| {
                let primal = eval_formula(&m, &empty, f).expect("enumerated over the signature");
                eval_dual(&mu, &empty, f).expect("enumerated over the signature") != tv_u(primal)
            });
            match bad {
                None => {
                    r.record("DUALITY", "ok").record("CHECKED", sentences.len());
                }
                Some(f) => {
                    r.record("DUALITY", "fail").record("WITNESS", f).exit(1);
                }
            }
        }
        Command::WeakEquiv {
            sig,
            structure,
            other,
            bounds,
        } => {
            let s = load_sig(&sig)?;
            let m = load_structure(&structure, &s)?;
            let n = load_structure(&other, &s)?;
            match weak_equiv_bounded(&m, &n, &search_bounds(&bounds)?).map_err(|e| fail("weak-equiv", e))? {
                WeakEquivVerdict::IndistinguishableWithinBounds => {
                    r.record("VERDICT", "indistinguishable-within-bounds");
                }
                WeakEquivVerdict::Distinguished { sentence, left, right } => {
                    r.record("VERDICT", "distinguished")
                        .record("WITNESS", sentence)
                        .record("DEGREE", format!("{left} {right}"))
                        .exit(1);
                }
            }
        }
        Command::ClassifyMap {
            sig,
            structure,
            other,
            map,
            bounds,
        } => {
            let s = load_sig(&sig)?;
            let m = load_structure(&structure, &s)?;
            let n = load_structure(&other, &s)?;
            let j = element_map(&map, &m, &n)?;
            let c = classify_map(&m, &n, &j, &search_bounds(&bounds)?).map_err(|e| fail("classify-map", e))?;
            let flag = |w: &Option<_>| if w.is_none() { "yes" } else { "no" };
            r.record("VERDICT", c.grade())
                .record("EMBEDDING", flag(&c.embedding))
                .record("WEAK_ELEMENTARY", format!("{} (bounded)", flag(&c.weak_elementary)))
                .record("ELEMENTARY", format!("{} (bounded)", flag(&c.elementary)));
            let failures = [("embedding", &c.embedding), ("weak-elementary", &c.weak_elementary), ("elementary", &c.elementary)];
            for (name, w) in failures {
                if let Some(w) = w {
                    r.record("WITNESS", format!("{name}: {w}"));
                }
            }
            if c.grade() == "notEmbedding" {
                r.exit(1);
            }
        }
    }
    Ok(r)
}

fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 3 } else { 0 };
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(worker_count()).build();
    let human = cli.human;
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(cli.command)),
        Err(_) => dispatch(cli.command),
    };
    match result {
        Ok(r) => Outcome {
            code: r.code,
            stdout: r.render(human),
            stderr: String::new(),
        },
        Err(InputError(msg)) => Outcome {
            code: 3,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}
