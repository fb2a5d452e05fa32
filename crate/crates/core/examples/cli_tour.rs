//! The command-line front end driven in-process.
//!
//! Run with `cargo run --example cli_tour`; the same arguments work with the
//! `gumkit` binary.

use gumkit::cli::run;

fn main() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data");
    let calls = [
        vec!["eval", "--sig", "unary.sig", "--structure", "unary.st", "--formula", "forall x. P(x)"],
        vec!["check-proof", "--sig", "ab.sig", "--theory", "mp.thy", "--proof", "mp.prf"],
        vec!["entail", "--sig", "p.sig", "--theory", "three_quarters.thy", "--formula", "1/2 -> p", "--grid-denominator", "4"],
        vec!["um-validate", "--sig", "metric.sig", "--structure", "triangle.st"],
        vec!["um-quotient", "--sig", "metric.sig", "--structure", "twins.st"],
    ];
    for call in calls {
        let args: Vec<String> = std::iter::once("gumkit".to_string())
            .chain(call.iter().map(|a| {
                if a.contains('.') && !a.contains(' ') {
                    format!("{data}/{a}")
                } else {
                    a.to_string()
                }
            }))
            .collect();
        let out = run(&args);
        let shown: Vec<String> = call
            .iter()
            .map(|a| if a.contains(' ') { format!("\"{a}\"") } else { a.to_string() })
            .collect();
        println!("$ gumkit {}\n{}{}[exit {}]\n", shown.join(" "), out.stdout, out.stderr, out.code);
    }
}
