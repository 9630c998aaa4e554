//! Protocol laboratory for fountain-coded block delivery.
//!
//! FLUID delivers a block of K source packets by sending up to
//! N = ceil(K/(1-epsilon)) interchangeable encoded packets plus one more for
//! each reported loss; the receiver recovers the block from any K of them
//! and reports plain counts instead of packet identities. The idealized ARQ
//! baseline delivers the aligned block of N source packets by retransmitting
//! exactly the packets that were lost. This crate contains:
//!
//! - [`codec`]: a systematic random-linear fountain codec over GF(256), plus
//!   the idealized counting codec used for analysis.
//! - [`protocol`]: block parameters (budget, slack), the FLUID
//!   sender/receiver state machines with count-based feedback and credit
//!   accounting, and the ARQ mirror pair.
//! - [`sim`]: a deterministic discrete-event simulator of the comparison
//!   model (immediate loss inference, reliable one-RTT feedback, causal
//!   round tags), aligned FLUID/ARQ paired runs, and a Monte Carlo driver.
//! - [`analytics`]: exact loss-product trajectories, delivery-round
//!   distributions under independent loss, and latency/efficiency/cost
//!   bounds.
//!
//! Everything is deterministic given a seed; see [`rng`] for the fixed
//! generator.

pub mod analytics;
pub mod codec;
pub mod gf256;
pub mod protocol;
pub mod rng;
pub mod sim;

pub use analytics::{
    arq_delivery_round, binomial_tail, cost_ratio, efficiency_bound, fluid_delivery_round,
    latency_bounds, loss_product_trajectory, round_distribution, DeliveryDistribution, RoundTrace,
};
pub use codec::{encode, ideal_ingest, DecoderState, EncodedSymbol, SourceBlock};
pub use protocol::{
    block_budget, epsilon_from_lambda, slack, BlockSpec, FeedbackReport, ReceiverState, SenderState,
};
pub use sim::{
    latency_check, monte_carlo, run_aligned_pair, run_block, BlockResult, EmpiricalDistribution,
    LossModel, Mode, Protocol, Scenario, ScenarioFile,
};
