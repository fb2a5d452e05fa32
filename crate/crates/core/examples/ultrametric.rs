//! Validate distance predicates and collapse points at distance (0,0).
//!
//! Run with `cargo run --example ultrametric`.

use std::sync::Arc;

use gumkit::semantics::Structure;
use gumkit::syntax::Signature;
use gumkit::ultrametric::{check_lipschitz, check_uniform_continuity, quotient, validate_pseudo_ultrametric};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Arc::new(Signature::parse(include_str!("data/metric.sig"))?);
    let files = [
        ("ultra", include_str!("data/ultra.st")),
        ("triangle", include_str!("data/triangle.st")),
        ("twins", include_str!("data/twins.st")),
        ("split", include_str!("data/split.st")),
    ];
    for (name, text) in files {
        let m = Structure::parse(text, Arc::clone(&sig))?;
        let metric = validate_pseudo_ultrametric(&m)?;
        let cont = check_uniform_continuity(&m)?;
        println!("== {name}: metric {}, continuity {}, lipschitz {}",
            verdict(metric.passes()), verdict(cont.passes()), verdict(check_lipschitz(&m)?.passes()));
        print!("{metric}{cont}");
        match quotient(&m) {
            Ok(q) => println!("quotient has {} of {} points", q.structure.size(), m.size()),
            Err(e) => println!("no quotient: {e}"),
        }
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok { "ok" } else { "FAIL" }
}
