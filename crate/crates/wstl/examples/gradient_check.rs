//! Validating the analytic objective gradient against central finite
//! differences on a synthesis problem.
//!
//! ```sh
//! cargo run --example gradient_check
//! ```

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use wstl::parser;
use wstl::semantics::{Engine, SemanticsConfig};
use wstl::synthesis::{gradient, GradMode, SynthesisProblem, Unicycle};

fn main() {
    let formula = parser::parse(
        "(F[1,10] (((x - 7 >= 0) && (9 - x >= 0) && (y - 1 >= 0) && (3 - y >= 0)) ||[2,1] \
          ((x - 1 >= 0) && (3 - x >= 0) && (y - 7 >= 0) && (9 - y >= 0)))) \
         && (G[1,20] ((x >= 0) && (10 - x >= 0) && (y >= 0) && (10 - y >= 0)))",
    )
    .unwrap();
    let mut problem = SynthesisProblem::new(
        Arc::new(Unicycle::default()),
        vec![1.0, 1.0, std::f64::consts::FRAC_PI_4],
        20,
        formula,
        0.05,
    );
    problem.config = SemanticsConfig::new(Engine::WeightedSmooth).with_beta(10.0);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let inputs: Vec<Vec<f64>> = (0..problem.steps)
            .map(|_| vec![rng.random_range(-1.9..1.9), rng.random_range(-1.9..1.9)])
            .collect();
        let analytic = gradient(&problem, &inputs, GradMode::Analytic).unwrap();
        let fd = gradient(&problem, &inputs, GradMode::FiniteDifference { h: 1e-5 }).unwrap();
        let deviation = analytic
            .iter()
            .flatten()
            .zip(fd.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let norm = analytic
            .iter()
            .flatten()
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt();
        println!("trial {trial}: gradient norm {norm:.4e}, max deviation {deviation:.3e}");
        worst = worst.max(deviation);
    }
    println!("\nworst deviation over 10 random input sequences: {worst:.3e}");
    assert!(worst < 1e-4);
}
