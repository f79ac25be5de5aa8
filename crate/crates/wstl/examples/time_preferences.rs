//! Discounted deadlines: rewarding early satisfaction of an eventually.
//!
//! Three signals all meet `F[0,3] (s >= 0)` equally well for the classical
//! semantics. A discounted weight over the interval separates them by how
//! soon (and how often) they satisfy.
//!
//! ```sh
//! cargo run --example time_preferences
//! ```

use wstl::parser;
use wstl::semantics::{rob_traditional, rob_weighted_agm};
use wstl::signal::Signal;

fn main() {
    let signals = [
        ("late ", Signal::from_csv("s\n0\n0\n0.5\n1").unwrap()),
        ("early", Signal::from_csv("s\n1\n0.5\n0\n0").unwrap()),
        ("mixed", Signal::from_csv("s\n0\n1\n0\n0.5").unwrap()),
    ];

    let unweighted = parser::parse("F[0,3] (s >= 0)").unwrap();
    println!("classical robustness (identical, by design of max):");
    for (name, signal) in &signals {
        println!(
            "  {name}: {:+.3}",
            rob_traditional(&unweighted, signal, 0).unwrap()
        );
    }

    println!("\nmean-based robustness with discount weight gamma^(t-1):");
    print!("{:>8}", "gamma");
    for (name, _) in &signals {
        print!("{name:>10}");
    }
    println!();
    for gamma in [1.0, 0.9, 0.5, 0.1] {
        let phi = parser::parse(&format!("F[0,3]{{disc {gamma}}}(s >= 0)")).unwrap();
        print!("{gamma:>8}");
        for (_, signal) in &signals {
            print!("{:>10.3}", rob_weighted_agm(&phi, signal, 0).unwrap());
        }
        println!();
    }
    println!("\nsmaller gamma concentrates the weight on the start of the");
    println!("deadline window, so the early satisfier pulls ahead.");
}
