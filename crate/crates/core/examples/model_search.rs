//! Bounded model search: satisfiability, entailment, strong entailment and
//! the approximate entailment of a theory that has no finite exact witness.
//!
//! Run with `cargo run --release --example model_search`.

use std::sync::Arc;

use gumkit::modelsearch::{
    check_approx_entailment, check_entailment, check_strong_entailment, enumerate_structures, find_model,
    ApproxVerdict, BoundedVerdict, SearchBounds,
};
use gumkit::syntax::{parse_formula, parse_theory, Signature};

fn show(v: &BoundedVerdict) -> String {
    match v {
        BoundedVerdict::Found(m) => format!("model {}", m.cells()),
        BoundedVerdict::RefutedBy(m) => format!("countermodel {}", m.cells()),
        other => format!("{other:?}"),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Arc::new(Signature::parse("pred p/0\npred q/0\n")?);
    let f = |s: &str| parse_formula(s, &sig).unwrap();
    let bounds = SearchBounds {
        max_universe: 1,
        ..SearchBounds::default()
    };

    let first: Vec<String> = enumerate_structures(Arc::clone(&sig), &bounds)
        .take(4)
        .map(|m| m.unwrap().cells())
        .collect();
    println!("first structures: {}", first.join(" | "));

    println!("sat p => 1/2:        {}", show(&find_model(&sig, &[f("p => 1/2")], &bounds)?));
    println!("sat 1/4:             {}", show(&find_model(&sig, &[f("1/4")], &bounds)?));
    println!("3/4->p |= 1/2->p:    {}", show(&check_entailment(&sig, &[f("3/4 -> p")], &f("1/2 -> p"), &bounds)?));
    println!("p |=s q:             {}", show(&check_strong_entailment(&sig, &[f("p")], &f("q"), &bounds)?));

    let family = parse_theory("1 -> p\n1/2 -> p\n1/3 -> p\n1/4 -> p\n", &sig)?;
    println!("family |= p:         {}", show(&check_entailment(&sig, &family, &f("p"), &bounds)?));
    for n in 1..=4 {
        if let ApproxVerdict::Subset(idx) = check_approx_entailment(&sig, &family, &f("p"), n, &bounds)? {
            let members: Vec<String> = idx.iter().map(|&i| family[i].to_string()).collect();
            println!("family |= 1/{n} -> p  from {{{}}}", members.join(", "));
        }
    }
    Ok(())
}
