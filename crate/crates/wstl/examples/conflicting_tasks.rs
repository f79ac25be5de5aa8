//! Ranking trajectories when the specification cannot be satisfied at all:
//! the importance weights pick the minimally violating behavior.
//!
//! A car must reach the goal cell within 7 steps, never touch a blocked
//! stretch of its lane, and never leave the lane. Reaching the goal forces
//! one of the other two to break: crossing the blockage (trajectory c1) or
//! detouring out of the lane (trajectory c2).
//!
//! ```sh
//! cargo run --example conflicting_tasks
//! ```

use wstl::formula::{box_region_mode, AffineExpr, Formula, PredicateMode};
use wstl::semantics::{rank_signals, rob_weighted_agm, Engine, SemanticsConfig};
use wstl::signal::{Signal, TimeInterval};
use wstl::weights::WeightFn;

fn trajectory(detour: bool) -> Signal {
    let samples = (0..8)
        .map(|t| {
            let y = if detour && (t == 3 || t == 4) { 3.0 } else { 1.0 };
            vec![t as f64 + 0.5, y]
        })
        .collect();
    Signal::new(vec!["x".into(), "y".into()], samples).unwrap()
}

fn formula(p_blocked: f64, p_lane: f64) -> Formula {
    // unit-magnitude predicates: each violated step costs exactly 1
    let mode = PredicateMode::boolean();
    let window = TimeInterval::new(0, 7).unwrap();
    let goal = box_region_mode("Goal", &[7.0, 0.0], &[8.0, 2.0], &["x", "y"], mode).unwrap();
    let blocked =
        box_region_mode("Blocked", &[3.0, 0.0], &[5.0, 2.0], &["x", "y"], mode).unwrap();
    let lane = Formula::pred_mode(AffineExpr::single("y", -1.0, 2.0), mode);
    Formula::and_weighted(
        vec![
            Formula::eventually(window, goal),
            Formula::always(window, Formula::not(blocked)),
            Formula::always(window, lane),
        ],
        WeightFn::Explicit(vec![1.0, p_blocked, p_lane]),
    )
}

fn main() {
    let cross = trajectory(false);
    let detour = trajectory(true);
    let cfg = SemanticsConfig::new(Engine::WeightedAgm);

    for (p_blocked, p_lane, label) in [
        (2.0, 1.0, "blockage twice as important as the lane"),
        (1.0, 1.0, "equal importance"),
        (1.0, 2.0, "lane twice as important as the blockage"),
    ] {
        let phi = formula(p_blocked, p_lane);
        let r_cross = rob_weighted_agm(&phi, &cross, 0).unwrap();
        let r_detour = rob_weighted_agm(&phi, &detour, 0).unwrap();
        println!("{label}:");
        println!("  cross the blockage: {r_cross:+.4}");
        println!("  detour off lane:    {r_detour:+.4}");
        let ranked = rank_signals(&phi, &[cross.clone(), detour.clone()], &cfg).unwrap();
        let names = ["cross", "detour"];
        println!(
            "  preferred: {} (both violate, the weights choose the lesser evil)\n",
            names[ranked[0].0]
        );
    }
}
