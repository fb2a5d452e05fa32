//! Order-preserving maps of truth values, h-remapped structures, and the
//! embedding grades they produce.
//!
//! Run with `cargo run --example order_maps`.

use std::sync::Arc;

use gumkit::modelsearch::{classify_map, construct_order_map, h_remap, weak_equiv_bounded, SearchBounds};
use gumkit::semantics::Structure;
use gumkit::syntax::Signature;
use gumkit::truthval::{Rational, TruthValue};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Arc::new(Signature::parse(include_str!("data/p1.sig"))?);
    let m = Structure::parse(include_str!("data/base.st"), Arc::clone(&sig))?;
    let tv = |s: &str| s.parse::<TruthValue>().unwrap();

    let anchors: Vec<Rational> = (0..=4).map(|k| Rational::new(k, 4)).collect();
    let h = construct_order_map(&[(tv("(1/2,3/4)"), tv("(1/2,7/8)"))], &anchors)?;
    let h = h.extend(&m.atomic_values());
    println!("h = {h}");

    let moved = h_remap(&m, &h)?;
    print!("h(M):\n{moved}");

    let bounds = SearchBounds {
        sentence_depth: 3,
        ..SearchBounds::default()
    };
    println!("weak equivalence: {:?}", weak_equiv_bounded(&m, &moved, &bounds)?);
    let grade = classify_map(&m, &moved, &[0, 1], &bounds)?;
    println!("identity M -> h(M): {}", grade.grade());
    if let Some(w) = &grade.elementary {
        println!("  not elementary: {w}");
    }

    match construct_order_map(&[(tv("(1/4,1/4)"), tv("(3/4,3/4)"))], &[Rational::new(1, 2)]) {
        Err(e) => println!("rejected: {e}"),
        Ok(h) => println!("unexpected: {h}"),
    }
    Ok(())
}
