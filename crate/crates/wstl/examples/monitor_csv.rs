//! Offline monitoring of a CSV trace under all four robustness engines.
//!
//! ```sh
//! cargo run --example monitor_csv
//! ```

use wstl::parser;
use wstl::semantics::{evaluate_report, Engine, SemanticsConfig};
use wstl::signal::Signal;

const TRACE: &str = "\
speed,gap
21.0,45.0
23.5,38.0
26.0,30.5
25.0,24.0
24.0,19.5
22.0,16.5
20.0,15.0
18.5,14.5
";

fn main() {
    // keep a safe following gap whenever fast, and eventually slow down;
    // holding the gap is weighted as the more important obligation
    let formula = parser::parse(
        "(G[0,7] ((30 - speed >= 0) && (gap - 12 >= 0))) &&[3,1] (F[4,7] (22 - speed >= 0))",
    )
    .unwrap();
    let signal = Signal::from_csv(TRACE).unwrap();

    println!("signal: {} samples of {:?}", signal.len(), signal.components());
    println!("formula horizon: {}\n", formula.horizon());

    for engine in [
        Engine::Traditional,
        Engine::WeightedTraditional,
        Engine::WeightedAgm,
        Engine::WeightedSmooth,
    ] {
        let cfg = SemanticsConfig::new(engine).with_beta(10.0);
        let report = evaluate_report(&formula, &signal, 0, &cfg, false).unwrap();
        println!("{engine:>22}: {:+.6}  {}", report.value, report.satisfied);
    }

    // per-node trace for debugging a verdict
    let cfg = SemanticsConfig::new(Engine::WeightedTraditional);
    let report = evaluate_report(&formula, &signal, 0, &cfg, true).unwrap();
    let trace = report.trace.unwrap();
    println!("\nweighted min/max per node at t = 0:");
    for (path, by_time) in &trace {
        if let Some(value) = by_time.get(&0) {
            println!("  {path:<10} {value:+.4}");
        }
    }
}
