//! Check a proof file, build a lemma proof and discharge a hypothesis with
//! the deduction transform.
//!
//! Run with `cargo run --example proofs`.

use gumkit::proofkernel::{
    check_proof, deduction_transform, lemma_library, parse_proof, render_proof, Substitution, LEMMAS,
};
use gumkit::syntax::{parse_formula, parse_theory, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::parse(include_str!("data/ab.sig"))?;

    let mut p = parse_proof(include_str!("data/mp.prf"), &sig)?;
    p.theory = parse_theory(include_str!("data/mp.thy"), &sig)?;
    println!("modus ponens proof: {:?}", check_proof(&p, &sig));

    let args = Substitution::new()
        .formula("phi", parse_formula("A", &sig)?)
        .formula("psi", parse_formula("B", &sig)?)
        .formula("chi", parse_formula("1/2", &sig)?);
    for name in LEMMAS {
        let proof = lemma_library(name, &args, &sig)?;
        println!(
            "lemma {name:<4} {:>3} lines  {:?}  concludes {}",
            proof.lines.len(),
            check_proof(&proof, &sig),
            proof.conclusion().unwrap()
        );
    }

    // (viii) is proved from (phi -> psi) -> chi; turn that into an implication
    let viii = lemma_library("viii", &args, &sig)?;
    let hyp = viii.extra[0].clone();
    let closed = deduction_transform(&viii, &hyp, &sig)?;
    println!("\ndischarged: {} in {} lines", closed.conclusion().unwrap(), closed.lines.len());
    assert!(check_proof(&closed, &sig).is_valid());
    print!("{}", render_proof(&closed).lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
