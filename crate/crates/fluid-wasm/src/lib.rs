//! Browser bindings for the block-delivery laboratory.
//!
//! Three interactive operations back the demo page in `www/`:
//! distribution explorer (exact FLUID vs ARQ delivery-round distributions),
//! trajectory explorer (loss-product walk with the slack threshold), and an
//! in-browser paired Monte Carlo run against the exact overlay. Each builder
//! returns a JSON string so the page needs no framework, only `fetch`-style
//! plumbing and a canvas.
//!
//! The payload builders are plain Rust and tested on the host; the
//! wasm-bindgen exports compile everywhere but only do useful work on
//! wasm32. Build with
//! `wasm-pack build crates/fluid-wasm --target web --out-dir www/pkg`.

use fluid_core::analytics::{
    arq_delivery_round, fluid_delivery_round, loss_product_trajectory, round_distribution,
};
use fluid_core::protocol::BlockSpec;
use fluid_core::sim::{monte_carlo, LossModel, Protocol, Scenario};
use serde_json::json;

fn block_spec(n: u64, epsilon: f64) -> Result<BlockSpec, String> {
    if n == 0 {
        return Err("n must be positive".into());
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(format!("epsilon must lie in [0,1), got {epsilon}"));
    }
    let k = (((n as f64) * (1.0 - epsilon) + 1e-9).floor() as u64).max(1);
    BlockSpec::from_budget(1, k, n).map_err(|e| e.to_string())
}

/// Exact delivery-round distributions for FLUID (M = K) and ARQ (M = N).
pub fn distribution_payload(
    n: u64,
    epsilon: f64,
    p: f64,
    max_round: u32,
) -> Result<String, String> {
    let spec = block_spec(n, epsilon)?;
    let fluid = round_distribution(n, spec.k, p, max_round).map_err(|e| e.to_string())?;
    let arq = round_distribution(n, n, p, max_round).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "k": spec.k,
        "epsilon": epsilon,
        "p": p,
        "fluid": { "entries": fluid.entries, "tail": fluid.tail },
        "arq": { "entries": arq.entries, "tail": arq.tail },
    })
    .to_string())
}

/// Loss-product trajectory with both protocols' delivery verdicts.
pub fn trajectory_payload(n: f64, epsilon: f64, fractions: &[f64]) -> Result<String, String> {
    let trace = loss_product_trajectory(n, fractions).map_err(|e| e.to_string())?;
    let fluid_round = fluid_delivery_round(&trace, epsilon, None);
    let arq_round = arq_delivery_round(&trace);
    Ok(json!({
        "n": n,
        "epsilon": epsilon,
        "slack": epsilon * n,
        "fractions": trace.fractions,
        "products": trace.products,
        "losses": trace.losses,
        "fluid_round": fluid_round,
        "arq_round": arq_round,
    })
    .to_string())
}

/// Paired Monte Carlo runs with the exact distributions overlaid.
pub fn paired_monte_carlo_payload(
    n: u64,
    epsilon: f64,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<String, String> {
    if trials == 0 || trials > 200_000 {
        return Err("trials must lie in 1..=200000".into());
    }
    let spec = block_spec(n, epsilon)?;
    let mut scenario = Scenario::new(spec, LossModel::Bernoulli { p }, 1.0, 0.001, seed);
    scenario.block_timer = Some(1e12);
    scenario.validate().map_err(|e| e.to_string())?;

    let fluid = monte_carlo(&scenario, Protocol::Fluid, trials);
    let arq = monte_carlo(&scenario, Protocol::Arq, trials);
    let max_round = fluid.round_freq.len().max(arq.round_freq.len()).max(10) as u32;
    let fluid_exact = round_distribution(n, spec.k, p, max_round).map_err(|e| e.to_string())?;
    let arq_exact = round_distribution(n, n, p, max_round).map_err(|e| e.to_string())?;

    let side = |emp: &fluid_core::sim::EmpiricalDistribution,
                exact: &fluid_core::analytics::DeliveryDistribution| {
        json!({
            "empirical": emp.round_freq,
            "undelivered": emp.undelivered,
            "mean_round": emp.mean_round,
            "p99_round": emp.p99_round,
            "exact": exact.entries,
            "exact_tail": exact.tail,
        })
    };
    Ok(json!({
        "n": n,
        "k": spec.k,
        "p": p,
        "trials": trials,
        "seed": seed,
        "fluid": side(&fluid, &fluid_exact),
        "arq": side(&arq, &arq_exact),
    })
    .to_string())
}

// u32 at the boundary so the page works with plain numbers, no BigInt
mod wasm {
    use wasm_bindgen::prelude::*;

    fn to_js<T>(result: Result<T, String>) -> Result<T, JsValue> {
        result.map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn distribution_json(
        n: u32,
        epsilon: f64,
        p: f64,
        max_round: u32,
    ) -> Result<String, JsValue> {
        to_js(super::distribution_payload(n as u64, epsilon, p, max_round))
    }

    #[wasm_bindgen]
    pub fn trajectory_json(n: f64, epsilon: f64, fractions: Vec<f64>) -> Result<String, JsValue> {
        to_js(super::trajectory_payload(n, epsilon, &fractions))
    }

    #[wasm_bindgen]
    pub fn paired_monte_carlo_json(
        n: u32,
        epsilon: f64,
        p: f64,
        trials: u32,
        seed: u32,
    ) -> Result<String, JsValue> {
        to_js(super::paired_monte_carlo_payload(
            n as u64,
            epsilon,
            p,
            trials as u64,
            seed as u64,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_payload_shape() {
        let payload = distribution_payload(100, 0.10, 0.10, 10).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["k"], 90);
        let entries = v["fluid"]["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 10);
        let round1 = entries[0].as_f64().unwrap();
        assert!((round1 - 0.58316).abs() < 1e-4);
        // ARQ round 1 at 10% loss carries essentially no mass
        assert!(v["arq"]["entries"][0].as_f64().unwrap() < 1e-4);
    }

    #[test]
    fn trajectory_payload_verdicts() {
        let payload = trajectory_payload(100.0, 0.10, &[0.90, 0.40, 0.25]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["fluid_round"], 3);
        assert!(v["arq_round"].is_null());
        assert!((v["products"][2].as_f64().unwrap() - 0.09).abs() < 1e-12);
    }

    #[test]
    fn paired_payload_is_deterministic() {
        let a = paired_monte_carlo_payload(100, 0.10, 0.2, 500, 7).unwrap();
        let b = paired_monte_carlo_payload(100, 0.10, 0.2, 500, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_inputs_are_reported() {
        assert!(distribution_payload(0, 0.1, 0.1, 5).is_err());
        assert!(distribution_payload(100, 1.0, 0.1, 5).is_err());
        assert!(trajectory_payload(100.0, 0.1, &[1.5]).is_err());
        assert!(paired_monte_carlo_payload(100, 0.1, 0.1, 0, 1).is_err());
    }
}
