//! Print the three demo payloads as JSON lines, one per operation. Handy
//! for eyeballing what the browser page receives:
//! `cargo run -p fluid-wasm --example dump_payloads`

use fluid_wasm::{distribution_payload, paired_monte_carlo_payload, trajectory_payload};

fn main() {
    println!(
        "{}",
        distribution_payload(100, 0.10, 0.10, 12).expect("distribution")
    );
    println!(
        "{}",
        trajectory_payload(100.0, 0.10, &[0.90, 0.40, 0.25]).expect("trajectory")
    );
    println!(
        "{}",
        paired_monte_carlo_payload(100, 0.10, 0.10, 2000, 42).expect("paired runs")
    );
}
