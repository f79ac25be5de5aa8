//! Tour of the formula grammar: parsing, canonical printing, horizons, and
//! the unweighted skeleton.
//!
//! ```sh
//! cargo run --example parse_and_print
//! ```

use wstl::parser;

fn main() {
    let texts = [
        // weights on the conjunction: the first task is twice as important
        "(G[1,6] (s >= 1)) &&[4,2] (G[2,5] (s <= 3))",
        // priorities on alternatives
        "(F[4,6] (s <= 1)) ||[10,1] (F[3,6] (s >= 2))",
        // time preference: earlier satisfaction counts more
        "F[0,3]{disc 0.5} (s >= 0)",
        // a periodic time preference over the interval
        "G[1,6]{gauss 0.2 (2,0.2,4.3) (4,0.2,4.3)} (s >= 0)",
        // unit-magnitude predicate for pass/fail regions
        "G[0,7] (2 - y >= 0 {bool 1})",
        // nested chains are not flattened: grouping changes the weighting
        "((a >= 0) && (b >= 0)) && (c >= 0)",
    ];

    for text in texts {
        let formula = parser::parse(text).expect("example formulas parse");
        println!("input     {text}");
        println!("canonical {}", parser::print(&formula));
        println!(
            "horizon {}, largest aggregation arity {}",
            formula.horizon(),
            formula.max_arity()
        );
        println!("unweighted {}", parser::print(&formula.strip_weights()));
        println!();
    }

    // errors carry the offending span
    let broken = "(s >= 0) && (s >= 1) || (s >= 2)";
    let err = parser::parse(broken).unwrap_err();
    println!("parse error demo on `{broken}`:");
    println!(
        "  {err} (bytes {}..{})",
        err.span.start, err.span.end
    );
}
