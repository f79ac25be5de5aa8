//! Control synthesis for a unicycle: visit one of two regions (with a
//! priority), then a goal region, while avoiding an unsafe block and
//! staying inside the arena. Swapping the priorities swaps which region
//! the synthesized trajectory visits.
//!
//! ```sh
//! cargo run --example synthesize_unicycle
//! ```

use std::sync::Arc;

use wstl::formula::{box_region, Formula};
use wstl::semantics::{rob_traditional, Engine, SemanticsConfig};
use wstl::signal::TimeInterval;
use wstl::synthesis::{synthesize, SynthesisOptions, SynthesisProblem, Unicycle};
use wstl::weights::WeightFn;

fn specification(p_a: f64, p_b: f64) -> Formula {
    let xy = ["x", "y"];
    let region_a = box_region("A", &[7.0, 1.0], &[9.0, 3.0], &xy).unwrap();
    let region_b = box_region("B", &[1.0, 7.0], &[3.0, 9.0], &xy).unwrap();
    let goal = box_region("C", &[7.0, 7.0], &[9.0, 9.0], &xy).unwrap();
    let unsafe_block = box_region("Unsafe", &[3.0, 3.0], &[6.0, 6.0], &xy).unwrap();
    let arena = box_region("Arena", &[0.0, 0.0], &[10.0, 10.0], &xy).unwrap();
    Formula::and(vec![
        Formula::eventually(
            TimeInterval::new(1, 10).unwrap(),
            Formula::or_weighted(vec![region_a, region_b], WeightFn::Explicit(vec![p_a, p_b])),
        ),
        Formula::eventually(TimeInterval::new(11, 20).unwrap(), goal),
        Formula::always(TimeInterval::new(1, 20).unwrap(), Formula::not(unsafe_block)),
        Formula::always(TimeInterval::new(1, 20).unwrap(), arena),
    ])
}

fn main() {
    let opts = SynthesisOptions {
        restarts: 16,
        max_iters: 900,
        seed: 2,
        ..Default::default()
    };

    for (p_a, p_b) in [(2.0, 1.0), (1.0, 2.0)] {
        let mut problem = SynthesisProblem::new(
            Arc::new(Unicycle::default()),
            vec![1.0, 1.0, std::f64::consts::FRAC_PI_4],
            20,
            specification(p_a, p_b),
            0.05,
        );
        problem.config = SemanticsConfig::new(Engine::WeightedSmooth).with_beta(10.0);

        let result = synthesize(&problem, &opts).expect("synthesis runs");
        println!("priorities A:{p_a} B:{p_b}");
        println!(
            "  objective {:+.4}, smooth {:+.4}, exact {:+.4}, satisfied {}, {} iterations, {:?}",
            result.objective,
            result.robustness_smooth,
            result.robustness_exact,
            result.satisfied,
            result.iterations,
            result.wall_time,
        );

        let xy = ["x", "y"];
        let window = TimeInterval::new(1, 10).unwrap();
        for (name, lo, hi) in [
            ("A", [7.0, 1.0], [9.0, 3.0]),
            ("B", [1.0, 7.0], [3.0, 9.0]),
        ] {
            let visits = Formula::eventually(window, box_region(name, &lo, &hi, &xy).unwrap());
            let visited = rob_traditional(&visits, &result.trajectory, 0).unwrap() > 0.0;
            println!("  visits {name} during [1,10]: {visited}");
        }

        print!("  trajectory:");
        for t in (0..=20).step_by(4) {
            let s = result.trajectory.sample(t);
            print!(" ({:.1},{:.1})", s[0], s[1]);
        }
        println!("\n");
    }
}
