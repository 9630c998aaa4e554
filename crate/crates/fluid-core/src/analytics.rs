//! Closed-form analysis of block delivery.
//!
//! Loss-product trajectories: with per-round loss fractions f_1..f_l, the
//! expected packets still missing after round l are L_l = (prod f_r) * N.
//! FLUID finishes at the first round where the product drops to the slack
//! threshold (epsilon, or exactly S/N); ARQ needs the product to hit zero.
//!
//! Under independent per-packet loss p, the number of the N transmission
//! positions resolved after l rounds is Binomial(N, 1 - p^l), which gives the
//! exact distribution of the delivery round for any recovery threshold M:
//! Pr(T_M = l) = Pr(X_l >= M) - Pr(X_{l-1} >= M). FLUID is M = K, ARQ is
//! M = N.
//!
//! All operations are pure functions over f64; tail probabilities are
//! accurate to about 1e-12 absolute for N up to 10,000.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("loss fraction must lie in [0,1], got {0}")]
    InvalidFraction(f64),
    #[error("probability must lie in [0,1], got {0}")]
    InvalidProbability(f64),
    #[error("budget must be positive, got {0}")]
    InvalidBudget(f64),
    #[error("recovery threshold must lie in 1..=N, got M={m}, N={n}")]
    InvalidThreshold { m: u64, n: u64 },
    #[error("max_round must be at least 1")]
    InvalidMaxRound,
    #[error("could not parse csv: {0}")]
    Csv(String),
}

// ---------------------------------------------------------------------------
// Loss-product trajectories
// ---------------------------------------------------------------------------

/// Per-round loss fractions with their running products and the implied
/// remaining-loss counts. An empty trace is the start of a block: product 1,
/// remaining losses N.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub n: f64,
    pub fractions: Vec<f64>,
    pub products: Vec<f64>,
    pub losses: Vec<f64>,
}

pub fn loss_product_trajectory(n: f64, fractions: &[f64]) -> Result<RoundTrace, AnalyticsError> {
    if n <= 0.0 || n.is_nan() {
        return Err(AnalyticsError::InvalidBudget(n));
    }
    let mut products = Vec::with_capacity(fractions.len());
    let mut losses = Vec::with_capacity(fractions.len());
    let mut product = 1.0;
    for &f in fractions {
        if !(0.0..=1.0).contains(&f) {
            return Err(AnalyticsError::InvalidFraction(f));
        }
        product *= f;
        products.push(product);
        losses.push(product * n);
    }
    Ok(RoundTrace {
        n,
        fractions: fractions.to_vec(),
        products,
        losses,
    })
}

impl RoundTrace {
    /// CSV columns: round,loss_fraction,loss_product,remaining_losses.
    /// The implicit round-0 state (product 1, losses N) is not emitted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,loss_fraction,loss_product,remaining_losses\n");
        for (i, ((f, p), l)) in self
            .fractions
            .iter()
            .zip(&self.products)
            .zip(&self.losses)
            .enumerate()
        {
            out.push_str(&format!("{},{},{},{}\n", i + 1, f, p, l));
        }
        out
    }
}

/// First round whose loss product is at or below the slack threshold.
/// `exact_threshold` overrides epsilon with S/N when the caller wants the
/// rounding-aware variant (S/N >= epsilon always).
pub fn fluid_delivery_round(
    trace: &RoundTrace,
    epsilon: f64,
    exact_threshold: Option<f64>,
) -> Option<u32> {
    let threshold = exact_threshold.unwrap_or(epsilon);
    trace
        .products
        .iter()
        .position(|&p| p <= threshold)
        .map(|i| i as u32 + 1)
}

/// First round whose loss product reaches zero (zero slack: every packet
/// must be received).
pub fn arq_delivery_round(trace: &RoundTrace) -> Option<u32> {
    trace
        .products
        .iter()
        .position(|&p| p == 0.0)
        .map(|i| i as u32 + 1)
}

// ---------------------------------------------------------------------------
// Binomial tails
// ---------------------------------------------------------------------------

/// ln C(n, k), Kahan-summed.
fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for i in 1..=k {
        let term = (((n - k + i) as f64) / (i as f64)).ln();
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

fn ln_pmf(n: u64, q: f64, k: u64) -> f64 {
    ln_choose(n, k) + k as f64 * q.ln() + (n - k) as f64 * (-q).ln_1p()
}

/// Sum of binomial(n, q) point masses for k in [from, to]. Terms are built
/// by the ratio recurrence outward from the largest term in the range and
/// Kahan-accumulated, so error stays near machine precision instead of
/// growing with the range.
fn pmf_sum(n: u64, q: f64, from: u64, to: u64) -> f64 {
    debug_assert!(from <= to && to <= n);
    let mode = ((n + 1) as f64 * q).floor() as u64;
    let k0 = mode.clamp(from, to);
    let t0 = ln_pmf(n, q, k0).exp();

    let mut sum = t0;
    let mut carry = 0.0f64;
    let add = |x: f64, sum: &mut f64, carry: &mut f64| {
        let y = x - *carry;
        let t = *sum + y;
        *carry = (t - *sum) - y;
        *sum = t;
    };

    let odds = q / (1.0 - q);
    let mut term = t0;
    let mut k = k0;
    while k < to && term > 0.0 {
        term *= (n - k) as f64 / (k + 1) as f64 * odds;
        add(term, &mut sum, &mut carry);
        k += 1;
    }
    term = t0;
    k = k0;
    while k > from && term > 0.0 {
        term *= k as f64 / (n - k + 1) as f64 / odds;
        add(term, &mut sum, &mut carry);
        k -= 1;
    }
    sum
}

/// Pr(Binomial(n, q) >= m), computed from whichever tail is smaller.
/// m > n returns 0 by convention (an impossible threshold).
pub fn binomial_tail(n: u64, q: f64, m: u64) -> Result<f64, AnalyticsError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(AnalyticsError::InvalidProbability(q));
    }
    if m == 0 {
        return Ok(1.0);
    }
    if m > n {
        return Ok(0.0);
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    if q == 1.0 {
        return Ok(1.0);
    }
    let upper_terms = n - m + 1;
    let value = if upper_terms <= m {
        pmf_sum(n, q, m, n)
    } else {
        1.0 - pmf_sum(n, q, 0, m - 1)
    };
    Ok(value.clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Delivery-round distributions
// ---------------------------------------------------------------------------

/// Exact distribution of the delivery round for recovery threshold M under
/// independent loss probability p. `entries[i]` is Pr(finish in round i+1);
/// `tail` is the mass beyond `max_round` (1 when p = 1: never delivers).
#[derive(Debug, Clone, PartialEq)]
pub struct DeliveryDistribution {
    pub n: u64,
    pub m: u64,
    pub p: f64,
    pub entries: Vec<f64>,
    pub tail: f64,
}

pub fn round_distribution(
    n: u64,
    m: u64,
    p: f64,
    max_round: u32,
) -> Result<DeliveryDistribution, AnalyticsError> {
    if m == 0 || m > n {
        return Err(AnalyticsError::InvalidThreshold { m, n });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(AnalyticsError::InvalidProbability(p));
    }
    if max_round == 0 {
        return Err(AnalyticsError::InvalidMaxRound);
    }
    let mut entries = Vec::with_capacity(max_round as usize);
    let mut prev = 0.0; // Pr(X_0 >= m) with X_0 = 0 and m >= 1
    let mut sum = 0.0;
    for ell in 1..=max_round {
        let q = 1.0 - p.powi(ell as i32);
        let cur = binomial_tail(n, q, m)?;
        let mut entry = cur - prev;
        if entry < 0.0 {
            debug_assert!(entry > -1e-12, "entry {entry} at round {ell}");
            entry = 0.0;
        }
        entries.push(entry);
        sum += entry;
        prev = cur;
    }
    Ok(DeliveryDistribution {
        n,
        m,
        p,
        entries,
        tail: (1.0 - sum).max(0.0),
    })
}

impl DeliveryDistribution {
    /// entries + tail; 1 within 1e-12 when the computation is healthy.
    pub fn total_mass(&self) -> f64 {
        self.entries.iter().sum::<f64>() + self.tail
    }

    /// CSV columns: n,m,p,round,probability — one row per round plus a
    /// final row with round = "tail". Values at full double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,p,round,probability\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.n,
                self.m,
                self.p,
                i + 1,
                e
            ));
        }
        out.push_str(&format!(
            "{},{},{},tail,{}\n",
            self.n, self.m, self.p, self.tail
        ));
        out
    }

    /// Parse the `to_csv` format back; exact because Rust prints f64 in
    /// shortest round-trip form.
    pub fn from_csv(text: &str) -> Result<Self, AnalyticsError> {
        let err = |m: String| AnalyticsError::Csv(m);
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| err("empty input".into()))?;
        if header.trim() != "n,m,p,round,probability" {
            return Err(err(format!("unexpected header `{header}`")));
        }
        let mut n = None;
        let mut m = None;
        let mut p = None;
        let mut entries = Vec::new();
        let mut tail = None;
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(err(format!("row {}: expected 5 fields", i + 2)));
            }
            let parse_f = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| err(format!("bad number `{s}`")))
            };
            let parse_u = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| err(format!("bad integer `{s}`")))
            };
            n = Some(parse_u(fields[0])?);
            m = Some(parse_u(fields[1])?);
            p = Some(parse_f(fields[2])?);
            let value = parse_f(fields[4])?;
            if fields[3] == "tail" {
                tail = Some(value);
            } else {
                let round = parse_u(fields[3])? as usize;
                if round != entries.len() + 1 {
                    return Err(err(format!("rows out of order at round {round}")));
                }
                entries.push(value);
            }
        }
        Ok(DeliveryDistribution {
            n: n.ok_or_else(|| err("no rows".into()))?,
            m: m.unwrap(),
            p: p.unwrap(),
            entries,
            tail: tail.ok_or_else(|| err("missing tail row".into()))?,
        })
    }
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

/// Delivery-latency envelope for a block that finishes in round `ell`:
/// lower = T*K/N (the first K packets of round 1 must have been sent),
/// upper = T + ell*RTT.
pub fn latency_bounds(t: f64, rtt: f64, ell: u32, k: u64, n: u64) -> (f64, f64) {
    assert!(ell >= 1, "rounds are 1-based");
    assert!(k <= n, "K cannot exceed N");
    let lower = t * k as f64 / n as f64;
    let upper = t + ell as f64 * rtt;
    (lower, upper)
}

/// Delivery efficiency K/N with its guaranteed floor (1-eps)*K/(K+1).
pub fn efficiency_bound(
    k: u64,
    epsilon: f64,
) -> Result<(f64, f64), crate::protocol::ProtocolError> {
    let n = crate::protocol::block_budget(k, epsilon)?;
    let actual = k as f64 / n as f64;
    let bound = (1.0 - epsilon) * k as f64 / (k + 1) as f64;
    Ok((actual, bound))
}

/// Transmissions per delivered source packet N/K with its ceiling
/// 1/(1-eps) + 1/K.
pub fn cost_ratio(k: u64, epsilon: f64) -> Result<(f64, f64), crate::protocol::ProtocolError> {
    let n = crate::protocol::block_budget(k, epsilon)?;
    let actual = n as f64 / k as f64;
    let bound = 1.0 / (1.0 - epsilon) + 1.0 / k as f64;
    Ok((actual, bound))
}
