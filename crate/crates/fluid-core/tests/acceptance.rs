//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime. Run with `cargo test -p fluid-core --test acceptance` (add
//! `-- --nocapture` to see the lines on success).

use fluid_core::analytics::{fluid_delivery_round, loss_product_trajectory, round_distribution};
use fluid_core::codec::{encode, DecoderState, SourceBlock};
use fluid_core::protocol::{block_budget, BlockSpec};
use fluid_core::rng::SplitMix64;
use fluid_core::sim::{
    latency_check, monte_carlo, run_aligned_pair, LossModel, Protocol, Scenario,
};
use std::time::Instant;

fn pass(criterion: u32, name: &str, started: Instant) {
    println!(
        "acceptance {criterion} ({name}): PASS ({:.2} s)",
        started.elapsed().as_secs_f64()
    );
}

/// Percent at two decimals, half away from zero.
fn round2_percent(p: f64) -> f64 {
    (p * 10_000.0).round() / 100.0
}

// ---------------------------------------------------------------------------
// 1. Delivery-round table reproduction
// ---------------------------------------------------------------------------

// Printed percents per round 1..=9 plus the 10+ aggregate; None marks an
// entry below 0.01 that the reference table omits.
type Row = [Option<f64>; 10];

const NO: Option<f64> = None;

#[rustfmt::skip]
const TABLE1: &[(f64, Row, Row)] = &[
    (0.001,
     [Some(100.00), NO, NO, NO, NO, NO, NO, NO, NO, NO],
     [Some(90.48), Some(9.51), Some(0.01), NO, NO, NO, NO, NO, NO, NO]),
    (0.002,
     [Some(100.00), NO, NO, NO, NO, NO, NO, NO, NO, NO],
     [Some(81.86), Some(18.10), Some(0.04), NO, NO, NO, NO, NO, NO, NO]),
    (0.005,
     [Some(100.00), NO, NO, NO, NO, NO, NO, NO, NO, NO],
     [Some(60.58), Some(39.17), Some(0.25), NO, NO, NO, NO, NO, NO, NO]),
    (0.01,
     [Some(100.00), NO, NO, NO, NO, NO, NO, NO, NO, NO],
     [Some(36.60), Some(62.40), Some(0.99), Some(0.01), NO, NO, NO, NO, NO, NO]),
    (0.02,
     [Some(100.00), NO, NO, NO, NO, NO, NO, NO, NO, NO],
     [Some(13.26), Some(82.82), Some(3.84), Some(0.08), NO, NO, NO, NO, NO, NO]),
    (0.05,
     [Some(98.85), Some(1.15), NO, NO, NO, NO, NO, NO, NO, NO],
     [Some(0.59), Some(77.26), Some(20.90), Some(1.18), Some(0.06), NO, NO, NO, NO, NO]),
    (0.10,
     [Some(58.32), Some(41.68), NO, NO, NO, NO, NO, NO, NO, NO],
     [NO, Some(36.60), Some(53.88), Some(8.53), Some(0.90), Some(0.09), Some(0.01), NO, NO, NO]),
    (0.20,
     [Some(0.57), Some(99.21), Some(0.22), NO, NO, NO, NO, NO, NO, NO],
     [NO, Some(1.69), Some(43.10), Some(40.41), Some(11.65), Some(2.51), Some(0.51), Some(0.10), Some(0.02), NO]),
    (0.50,
     [NO, Some(0.01), Some(28.09), Some(67.10), Some(4.77), Some(0.03), NO, NO, NO, NO],
     [NO, NO, NO, Some(0.16), Some(4.02), Some(16.52), Some(24.94), Some(21.97), Some(14.63), Some(17.76)]),
];

fn check_row(p: f64, m: u64, expected: &Row, scheme: &str) {
    let dist = round_distribution(100, m, p, 9).unwrap();
    for (i, cell) in expected.iter().enumerate() {
        let raw = if i < 9 { dist.entries[i] } else { dist.tail };
        match cell {
            Some(want) => {
                let got = round2_percent(raw);
                assert!(
                    (got - want).abs() < 1e-9,
                    "{scheme} p={p} round {}: got {got}, table says {want}",
                    if i < 9 {
                        (i + 1).to_string()
                    } else {
                        "10+".into()
                    },
                );
            }
            // Omitted cells carry less than 0.01 percent; only printed
            // entries are compared exactly.
            None => assert!(
                raw < 1e-4,
                "{scheme} p={p} round {}: got {raw}, table omits it",
                if i < 9 {
                    (i + 1).to_string()
                } else {
                    "10+".into()
                },
            ),
        }
    }
}

#[test]
fn c1_delivery_round_table_reproduction() {
    let started = Instant::now();
    for (p, fluid_row, arq_row) in TABLE1 {
        check_row(*p, 90, fluid_row, "FLUID");
        check_row(*p, 100, arq_row, "ARQ");
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "table reproduction took {elapsed:.2} s");
    pass(
        1,
        "delivery-round table, 9 loss rates, FLUID and ARQ",
        started,
    );
}

// ---------------------------------------------------------------------------
// 2. Worked trajectory examples
// ---------------------------------------------------------------------------

#[test]
fn c2_worked_trajectory_examples() {
    let started = Instant::now();
    let cases: &[(&[f64], &[f64], Option<u32>)] = &[
        (&[0.06], &[0.06], Some(1)),
        (&[0.70, 0.14], &[0.70, 0.098], Some(2)),
        (&[0.30, 0.30], &[0.30, 0.09], Some(2)),
        (&[0.90, 0.40, 0.25], &[0.90, 0.36, 0.09], Some(3)),
    ];
    for (fractions, want_products, want_round) in cases {
        let trace = loss_product_trajectory(100.0, fractions).unwrap();
        for (got, want) in trace.products.iter().zip(*want_products) {
            assert!(
                (got - want).abs() <= 1e-12,
                "fractions {fractions:?}: product {got} vs {want}"
            );
        }
        assert_eq!(fluid_delivery_round(&trace, 0.10, None), *want_round);
        // zero slack: every displayed fraction is positive, so no delivery
        assert_eq!(fluid_delivery_round(&trace, 0.0, None), None);
    }
    pass(
        2,
        "worked examples: products to 1e-12, rounds {1,2,2,3}, zero-slack undelivered",
        started,
    );
}

// ---------------------------------------------------------------------------
// 3. Monte Carlo matches the exact distribution
// ---------------------------------------------------------------------------

fn comparison_scenario(p: f64, seed: u64) -> Scenario {
    let spec = BlockSpec::from_epsilon(1, 90, 0.10).unwrap();
    let mut sc = Scenario::new(spec, LossModel::Bernoulli { p }, 1.0, 0.001, seed);
    sc.block_timer = Some(1e12);
    sc
}

fn check_monte_carlo(p: f64, protocol: Protocol, m: u64, max_round: u32, seed: u64) {
    const TRIALS: u64 = 100_000;
    let sc = comparison_scenario(p, seed);
    let emp = monte_carlo(&sc, protocol, TRIALS);
    let exact = round_distribution(100, m, p, max_round).unwrap();
    for round in 1..=max_round as usize {
        let e = exact.entries[round - 1];
        let o = emp.round_freq.get(round - 1).copied().unwrap_or(0.0);
        let sigma = (e * (1.0 - e) / TRIALS as f64).sqrt();
        assert!(
            (o - e).abs() <= 3.0 * sigma,
            "{} p={p} round {round}: empirical {o}, exact {e}, 3 sigma {}",
            protocol.name(),
            3.0 * sigma
        );
    }
    let tail_emp: f64 =
        emp.round_freq.iter().skip(max_round as usize).sum::<f64>() + emp.undelivered;
    let tail_sigma = (exact.tail * (1.0 - exact.tail) / TRIALS as f64).sqrt();
    assert!(
        (tail_emp - exact.tail).abs() <= 3.0 * tail_sigma,
        "{} p={p} tail {tail_emp} vs exact {}",
        protocol.name(),
        exact.tail
    );
}

#[test]
fn c3_monte_carlo_matches_exact_distribution() {
    let started = Instant::now();
    for (i, p) in [0.02, 0.10, 0.50].into_iter().enumerate() {
        check_monte_carlo(p, Protocol::Fluid, 90, 12, 0xF1D0 + i as u64);
    }
    // the aligned ARQ block (M = N) against its own closed form
    check_monte_carlo(0.10, Protocol::Arq, 100, 12, 0xA0A0);
    check_monte_carlo(0.50, Protocol::Arq, 100, 30, 0xA0A1);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "Monte Carlo check took {elapsed:.2} s");
    pass(
        3,
        "100k-trial empirical distributions within 3 sigma of exact",
        started,
    );
}

// ---------------------------------------------------------------------------
// 4. Brute-force oracle
// ---------------------------------------------------------------------------

fn binom_pmf_exact(n: usize, k: usize, p: f64) -> f64 {
    let mut c = 1.0f64;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Independent oracle: evolve the causal recursion directly. Every
/// unresolved position retries each round and stays unresolved with
/// probability p; delivery happens when at most N-M remain.
fn oracle_round_distribution(n: usize, m: usize, p: f64, max_round: u32) -> Vec<f64> {
    let target = n - m;
    let mut dist = vec![0.0f64; n + 1];
    dist[n] = 1.0;
    let mut finish = Vec::new();
    for _ in 1..=max_round {
        let mut next = vec![0.0f64; n + 1];
        for (u, mass) in dist.iter().enumerate().skip(target + 1) {
            if *mass == 0.0 {
                continue;
            }
            for (j, slot) in next.iter_mut().enumerate().take(u + 1) {
                *slot += mass * binom_pmf_exact(u, j, p);
            }
        }
        finish.push(next[..=target].iter().sum());
        for x in next[..=target].iter_mut() {
            *x = 0.0;
        }
        dist = next;
    }
    finish
}

#[test]
fn c4_exact_enumeration_oracle() {
    let started = Instant::now();
    const MAX_ROUND: u32 = 30;
    for n in 1..=12u64 {
        for p in [0.1, 0.3, 0.5] {
            for m in [n, (0.9 * n as f64).ceil() as u64] {
                let oracle = oracle_round_distribution(n as usize, m as usize, p, MAX_ROUND);
                let dist = round_distribution(n, m, p, MAX_ROUND).unwrap();
                for (round, (o, d)) in oracle.iter().zip(&dist.entries).enumerate() {
                    assert!(
                        (o - d).abs() <= 1e-10,
                        "n={n} m={m} p={p} round {}: oracle {o}, closed form {d}",
                        round + 1
                    );
                }
            }
        }
    }
    pass(
        4,
        "causal-recursion oracle equals closed form to 1e-10 for N <= 12",
        started,
    );
}

// ---------------------------------------------------------------------------
// 5 and 6. Paired aligned runs
// ---------------------------------------------------------------------------

#[test]
fn c5_paired_run_invariants() {
    let started = Instant::now();
    for p in [0.05, 0.2, 0.5] {
        let mut base = comparison_scenario(p, 0xA11A);
        base.extend_to_budget = true;
        for i in 0..10_000u64 {
            let sc = base.with_trial_seed(i);
            let (fluid, arq) = run_aligned_pair(&sc);
            assert_eq!(
                fluid.transmissions_total, arq.transmissions_total,
                "p={p} trial {i}: transmission totals differ"
            );
            let (Some(fr), Some(ar)) = (fluid.delivery_round, arq.delivery_round) else {
                panic!("p={p} trial {i}: undelivered block in paired run");
            };
            assert!(
                fr <= ar,
                "p={p} trial {i}: FLUID round {fr} > ARQ round {ar}"
            );
        }
    }
    pass(
        5,
        "30k aligned pairs: equal totals, FLUID round <= ARQ round",
        started,
    );
}

#[test]
fn c6_latency_bounds_hold() {
    let started = Instant::now();
    for p in [0.05, 0.2, 0.5] {
        let mut base = comparison_scenario(p, 0xA11A);
        base.extend_to_budget = true;
        for i in 0..10_000u64 {
            let sc = base.with_trial_seed(i);
            let (fluid, arq) = run_aligned_pair(&sc);
            for r in [&fluid, &arq] {
                assert!(r.delivered, "p={p} trial {i}: undelivered");
                assert!(
                    latency_check(r, &sc),
                    "p={p} trial {i} {}: time {:?} outside [T*K/N, T + l*RTT]",
                    r.protocol.name(),
                    r.delivery_time
                );
            }
        }
    }
    pass(
        6,
        "every delivered block within the latency envelope",
        started,
    );
}

// ---------------------------------------------------------------------------
// 7. Parameter bounds
// ---------------------------------------------------------------------------

#[test]
fn c7_parameter_bounds_sweep() {
    let started = Instant::now();
    for k in 1..=1000u64 {
        for epsilon in [0.01, 0.05, 0.10, 0.5] {
            let n = block_budget(k, epsilon).unwrap();
            let s = (n - k) as f64;
            assert!(
                s >= epsilon * n as f64,
                "k={k} eps={epsilon}: slack {s} below {}",
                epsilon * n as f64
            );
            let efficiency = k as f64 / n as f64;
            let floor = (1.0 - epsilon) * k as f64 / (k + 1) as f64;
            assert!(
                efficiency >= floor,
                "k={k} eps={epsilon}: efficiency {efficiency} below {floor}"
            );
            let ratio = n as f64 / k as f64;
            let ceiling = 1.0 / (1.0 - epsilon) + 1.0 / k as f64;
            assert!(
                ratio <= ceiling,
                "k={k} eps={epsilon}: cost ratio {ratio} above {ceiling}"
            );
        }
    }
    pass(
        7,
        "budget, efficiency and cost bounds over K = 1..1000",
        started,
    );
}

// ---------------------------------------------------------------------------
// 8. Codec
// ---------------------------------------------------------------------------

fn random_block(rng: &mut SplitMix64, block_id: u64, k: usize, size: usize) -> SourceBlock {
    let symbols = (0..k)
        .map(|_| (0..size).map(|_| (rng.next_u64() & 0xFF) as u8).collect())
        .collect();
    SourceBlock::new(block_id, symbols).unwrap()
}

/// K distinct seq numbers drawn uniformly from [1, 4K].
fn random_seq_set(rng: &mut SplitMix64, k: usize) -> Vec<u64> {
    let limit = 4 * k as u64;
    let mut chosen = std::collections::BTreeSet::new();
    while chosen.len() < k {
        chosen.insert(1 + rng.next_u64() % limit);
    }
    chosen.into_iter().collect()
}

#[test]
fn c8_codec_statistics() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0xC0DEC);

    // systematic full set: exact for 100 random blocks
    for trial in 0..100u64 {
        let k = 1 + (rng.next_u64() % 128) as usize;
        let size = 1 + (rng.next_u64() % 64) as usize;
        let block = random_block(&mut rng, trial, k, size);
        let mut dec = DecoderState::new(trial, k, size).unwrap();
        for seq in 1..=k as u64 {
            dec.ingest(&encode(&block, seq)).unwrap();
        }
        assert_eq!(dec.decoded(), Some(&block), "systematic set failed, K={k}");
    }

    // random K-subset decode success over 1000 seeded trials
    let mut subset_successes = 0u32;
    for trial in 0..1000u64 {
        let k = 1 + (rng.next_u64() % 128) as usize;
        let size = 1 + (rng.next_u64() % 64) as usize;
        let block = random_block(&mut rng, 1000 + trial, k, size);
        let mut dec = DecoderState::new(1000 + trial, k, size).unwrap();
        for seq in random_seq_set(&mut rng, k) {
            dec.ingest(&encode(&block, seq)).unwrap();
        }
        if dec.decoded() == Some(&block) {
            subset_successes += 1;
        }
    }
    assert!(
        subset_successes >= 990,
        "random-subset decode rate {subset_successes}/1000 below 99%"
    );

    // purely non-systematic symbols at exactly K received: the dense
    // random-matrix full-rank rate, about 0.996
    let mut dense_successes = 0u32;
    for trial in 0..1000u64 {
        let block = random_block(&mut rng, 3000 + trial, 90, 8);
        let mut dec = DecoderState::new(3000 + trial, 90, 8).unwrap();
        let mut chosen = std::collections::BTreeSet::new();
        while chosen.len() < 90 {
            chosen.insert(91 + rng.next_u64() % 10_000);
        }
        for seq in chosen {
            dec.ingest(&encode(&block, seq)).unwrap();
        }
        if dec.decoded() == Some(&block) {
            dense_successes += 1;
        }
    }
    assert!(
        dense_successes >= 990,
        "dense decode rate {dense_successes}/1000 below 99%"
    );

    // K+3 received symbols: 99.9% success
    let mut overhead_successes = 0u32;
    for trial in 0..1000u64 {
        let k = 1 + (rng.next_u64() % 64) as usize;
        let block = random_block(&mut rng, 5000 + trial, k, 16);
        let mut dec = DecoderState::new(5000 + trial, k, 16).unwrap();
        let limit = 4 * k as u64 + 3;
        let mut chosen = std::collections::BTreeSet::new();
        while chosen.len() < k + 3 {
            chosen.insert(1 + rng.next_u64() % limit);
        }
        for seq in chosen {
            dec.ingest(&encode(&block, seq)).unwrap();
        }
        if dec.decoded() == Some(&block) {
            overhead_successes += 1;
        }
    }
    assert!(
        overhead_successes >= 999,
        "K+3 decode rate {overhead_successes}/1000 below 99.9%"
    );

    // duplicate ingestion is idempotent
    let block = random_block(&mut rng, 9999, 24, 8);
    let mut dec = DecoderState::new(9999, 24, 8).unwrap();
    let sym = encode(&block, 57);
    dec.ingest(&sym).unwrap();
    let (rank, received) = (dec.rank(), dec.received());
    for _ in 0..5 {
        dec.ingest(&sym).unwrap();
    }
    assert_eq!((dec.rank(), dec.received()), (rank, received));

    pass(
        8,
        "systematic exact, subset >= 99%, K+3 >= 99.9%, duplicates idempotent",
        started,
    );
}

// ---------------------------------------------------------------------------
// 9. One- and two-round delivery regions
// ---------------------------------------------------------------------------

#[test]
fn c9_two_round_delivery_regions() {
    let started = Instant::now();
    let epsilon = 0.05;
    for i in 0..=200u32 {
        for j in 0..=200u32 {
            let f1 = i as f64 / 200.0;
            let f2 = j as f64 / 200.0;
            let trace = loss_product_trajectory(100.0, &[f1, f2]).unwrap();
            let got = fluid_delivery_round(&trace, epsilon, None);
            let want = if f1 <= epsilon {
                Some(1)
            } else if f1 * f2 <= epsilon {
                Some(2)
            } else {
                None
            };
            assert_eq!(got, want, "f1={f1} f2={f2}");
        }
    }
    pass(
        9,
        "201x201 grid classification matches the closed-form regions",
        started,
    );
}
