//! Parse a signature, a structure and a few formulas, then evaluate.
//!
//! Run with `cargo run --example evaluate`.

use std::sync::Arc;

use gumkit::semantics::{eval_sentence, satisfies, truth_degree, Structure};
use gumkit::syntax::{parse_formula, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Arc::new(Signature::parse(include_str!("data/unary.sig"))?);
    let m = Structure::parse(include_str!("data/unary.st"), Arc::clone(&sig))?;
    print!("{m}");

    for text in ["forall x. P(x)", "exists x. P(x)", "1/2 -> P(k)", "P(k)", "~P(k) \\/ 3/4", "P(k) => 1/4"] {
        let f = parse_formula(text, &sig)?;
        println!(
            "{f:<20} value={} degree={} holds={}",
            eval_sentence(&m, &f)?,
            truth_degree(&m, &f)?,
            satisfies(&m, &f)?
        );
    }
    Ok(())
}
