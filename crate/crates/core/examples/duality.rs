//! The u-translation to [0,1]-valued truth: dual structure values and the
//! duality of every clause.
//!
//! Run with `cargo run --example duality`.

use std::sync::Arc;

use gumkit::semantics::{enumerate_sentences, eval_dual, eval_formula, Assignment, DualStructure, FormulaBounds, Structure};
use gumkit::syntax::{Formula, Signature};
use gumkit::truthval::tv_u;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Arc::new(Signature::parse(include_str!("data/unary.sig"))?);
    let m = Structure::parse(include_str!("data/unary.st"), Arc::clone(&sig))?;
    let mu = DualStructure::from_structure(&m);
    let none = Assignment::new();

    let sentences = enumerate_sentences(&sig, &FormulaBounds::new(2));
    let mut shown = 0;
    for f in &sentences {
        let primal = eval_formula(&m, &none, f)?;
        let dual = eval_dual(&mu, &none, f)?;
        assert_eq!(dual, tv_u(primal), "{f}");
        if matches!(f, Formula::Forall(..) | Formula::Exists(..)) && f.to_string().contains("P(x)") && shown < 6 {
            println!("{f:<32} {primal} -> {dual}");
            shown += 1;
        }
    }
    println!("duality holds on {} sentences", sentences.len());
    Ok(())
}
