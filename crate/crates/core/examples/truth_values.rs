//! The truth-value chain: lexicographic order, Gödel implication and the
//! derived distance.
//!
//! Run with `cargo run --example truth_values`.

use gumkit::truthval::{grid_points, tv_dmax, tv_residuum, tv_u, Rational, TruthValue};

fn main() {
    let tv = |s: &str| s.parse::<TruthValue>().unwrap();
    let (a, b) = (tv("(1/2,1/4)"), tv("(1/2,3/4)"));

    println!("{a} < {b}: {}", a < b);
    println!("{a} -> {b} = {}", tv_residuum(a, b));
    println!("{b} -> {a} = {}", tv_residuum(b, a));
    println!("dmax({a}, {b}) = {}", tv_dmax(a, b));
    println!("u({a}) = {}", tv_u(a));

    let half = TruthValue::hat(Rational::new(1, 2)).unwrap();
    println!("hat(1/2) = {half}, truth = {}, falsity = {}", TruthValue::ZERO, TruthValue::ONE);

    // points of the grid with denominator 2, ascending
    let grid: Vec<String> = grid_points(2).iter().map(ToString::to_string).collect();
    println!("grid(2) = {}", grid.join(" "));
}
