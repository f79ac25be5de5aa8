//! How weights reshape robustness: importance on obligatory tasks and
//! priority on alternatives.
//!
//! ```sh
//! cargo run --example importance_and_priority
//! ```

use wstl::formula::{AffineExpr, Formula};
use wstl::semantics::{rob_traditional, rob_weighted_traditional};
use wstl::signal::Signal;
use wstl::weights::WeightFn;

fn pair(a: f64, b: f64) -> Signal {
    Signal::new(vec!["a".into(), "b".into()], vec![vec![a, b]]).unwrap()
}

fn main() {
    let task_a = Formula::pred(AffineExpr::single("a", 1.0, 0.0));
    let task_b = Formula::pred(AffineExpr::single("b", 1.0, 0.0));

    // both tasks obligatory, task a twice as important (weights 4 vs 2)
    let both = Formula::and_weighted(
        vec![task_a.clone(), task_b.clone()],
        WeightFn::Explicit(vec![4.0, 2.0]),
    );
    println!("conjunction with importance 4:2");
    for (a, b) in [(0.25, 0.25), (-0.25, -0.25), (0.25, -0.25)] {
        let s = pair(a, b);
        println!(
            "  margins ({a:+.2},{b:+.2}): plain {:+.4}, weighted {:+.4}",
            rob_traditional(&both, &s, 0).unwrap(),
            rob_weighted_traditional(&both, &s, 0).unwrap(),
        );
    }
    println!("  equal margins are no longer equal in the weighted score:");
    println!("  satisfying the important task well matters more, and");
    println!("  violating it is penalized harder.\n");

    // alternatives with priority 10 vs 1
    let either = Formula::or_weighted(
        vec![task_a, task_b],
        WeightFn::Explicit(vec![10.0, 1.0]),
    );
    println!("disjunction with priority 10:1");
    for (a, b) in [(0.5, -0.8), (-1.3, 0.5), (0.3, 0.3)] {
        let s = pair(a, b);
        println!(
            "  margins ({a:+.2},{b:+.2}): plain {:+.4}, weighted {:+.4}",
            rob_traditional(&either, &s, 0).unwrap(),
            rob_weighted_traditional(&either, &s, 0).unwrap(),
        );
    }
    println!("  satisfying through the preferred alternative scores about");
    println!("  ten times higher than through the fallback.");
}
