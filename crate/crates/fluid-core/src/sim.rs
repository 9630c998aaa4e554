//! Deterministic discrete-event simulation of the comparison protocol model.
//!
//! One block, one sender, one receiver. Round-1 packets depart at
//! i * tx_interval (i = 1..=N); every loss becomes known to the sender one
//! RTT after its transmit time and triggers exactly one response packet
//! tagged with the next round; arrivals reach the receiver at their transmit
//! time (one-way latency is folded into the single RTT constant). Feedback is
//! reliable. A run is a pure function of its Scenario, seed included.
//!
//! In comparison mode every outcome is attributable immediately, so rounds
//! carry the exact causal structure of the loss sequence. Realistic mode
//! drops the loss oracle: the receiver infers losses from sequence-number
//! gaps only and reports on a fixed cadence (default RTT/4). Analysis-grade
//! experiments use comparison mode; realistic mode exists for protocol-level
//! behavior tests.
//!
//! Rounds may overlap in time when the round-1 transmission time exceeds the
//! RTT; the round tags remain causal (a packet belongs to the round whose
//! feedback triggered it), which is what the per-round trace reports.

use crate::protocol::{
    ArqDisposition, ArqReceiverState, ArqSenderState, BlockSpec, FeedbackDisposition,
    FeedbackReport, ProtocolError, ReceiverCodec, ReceiverState, SenderState,
};
use crate::rng::{substream, SplitMix64};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

// ---------------------------------------------------------------------------
// Loss models
// ---------------------------------------------------------------------------

/// How transmission events get lost.
#[derive(Debug, Clone, PartialEq)]
pub enum LossModel {
    /// Each packet independently lost with probability p.
    Bernoulli { p: f64 },
    /// Round r loses exactly round(f_r * round_size) packets (half-up),
    /// spread evenly across the round by a quota walk; rounds beyond the
    /// list are loss-free. Fully deterministic, seed independent.
    RoundFractions { fractions: Vec<f64> },
    /// Two-state burst model: per-packet loss probability depends on the
    /// channel state, which flips with the given transition probabilities
    /// after each packet.
    GilbertElliott {
        p_good_loss: f64,
        p_bad_loss: f64,
        p_g2b: f64,
        p_b2g: f64,
    },
}

impl LossModel {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        let valid = match self {
            LossModel::Bernoulli { p } => ok(*p),
            LossModel::RoundFractions { fractions } => fractions.iter().all(|f| ok(*f)),
            LossModel::GilbertElliott {
                p_good_loss,
                p_bad_loss,
                p_g2b,
                p_b2g,
            } => ok(*p_good_loss) && ok(*p_bad_loss) && ok(*p_g2b) && ok(*p_b2g),
        };
        if valid {
            Ok(())
        } else {
            Err(ScenarioError::Invalid(format!(
                "loss model probabilities must lie in [0,1]: {self:?}"
            )))
        }
    }
}

struct LossProcess {
    model: LossModel,
    rng: SplitMix64,
    ge_bad: bool,
}

fn quota_half_up(j: u64, f: f64) -> u64 {
    (j as f64 * f + 0.5).floor() as u64
}

impl LossProcess {
    fn new(model: LossModel, seed: u64) -> Self {
        Self {
            model,
            rng: SplitMix64::new(seed),
            ge_bad: false,
        }
    }

    /// Decide the fate of the `index_in_round`-th packet (1-based) of
    /// `round`. Consumes the random stream in call order, which both
    /// protocols share under the aligned comparison.
    fn decide(&mut self, round: u32, index_in_round: u64) -> bool {
        match &self.model {
            LossModel::Bernoulli { p } => self.rng.chance(*p),
            LossModel::RoundFractions { fractions } => {
                let f = fractions.get(round as usize - 1).copied().unwrap_or(0.0);
                quota_half_up(index_in_round, f) > quota_half_up(index_in_round - 1, f)
            }
            LossModel::GilbertElliott {
                p_good_loss,
                p_bad_loss,
                p_g2b,
                p_b2g,
            } => {
                let p_loss = if self.ge_bad {
                    *p_bad_loss
                } else {
                    *p_good_loss
                };
                let lost = self.rng.chance(p_loss);
                let p_flip = if self.ge_bad { *p_b2g } else { *p_g2b };
                if self.rng.chance(p_flip) {
                    self.ge_bad = !self.ge_bad;
                }
                lost
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Comparison,
    Realistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Fluid,
    Arq,
}

impl Protocol {
    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Fluid => "FLUID",
            Protocol::Arq => "ARQ",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: BlockSpec,
    pub loss: LossModel,
    pub rtt: f64,
    pub tx_interval: f64,
    pub seed: u64,
    pub mode: Mode,
    pub extend_to_budget: bool,
    /// Absolute block-timer deadline; None picks the default (first
    /// transmission + 10*RTT, falling back to 10*T when RTT is zero).
    pub block_timer: Option<f64>,
    /// Realistic-mode report cadence; None picks RTT/4.
    pub feedback_interval: Option<f64>,
}

impl Scenario {
    pub fn new(spec: BlockSpec, loss: LossModel, rtt: f64, tx_interval: f64, seed: u64) -> Self {
        Self {
            spec,
            loss,
            rtt,
            tx_interval,
            seed,
            mode: Mode::Comparison,
            extend_to_budget: false,
            block_timer: None,
            feedback_interval: None,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.loss.validate()?;
        if self.rtt < 0.0 || self.tx_interval < 0.0 {
            return Err(ScenarioError::Invalid(
                "rtt and tx_interval must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Round-1 transmission time T = N * tx_interval.
    pub fn round1_time(&self) -> f64 {
        self.spec.n as f64 * self.tx_interval
    }

    pub fn deadline(&self) -> f64 {
        if let Some(t) = self.block_timer {
            return t;
        }
        let first_tx = self.tx_interval;
        let horizon = if self.rtt > 0.0 {
            10.0 * self.rtt
        } else {
            10.0 * self.round1_time()
        };
        first_tx + horizon
    }

    fn cadence(&self) -> f64 {
        let fallback = if self.rtt > 0.0 {
            self.rtt / 4.0
        } else if self.tx_interval > 0.0 {
            self.tx_interval
        } else {
            1.0
        };
        self.feedback_interval.unwrap_or(fallback)
    }

    /// Same scenario, reseeded with substream `index` of the current seed.
    pub fn with_trial_seed(&self, index: u64) -> Scenario {
        Scenario {
            seed: substream(self.seed, index),
            ..self.clone()
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario files: flat `key = value` text
// ---------------------------------------------------------------------------

/// A parsed scenario file. Recognized keys: `block_id`, `k`, `n`, `epsilon`,
/// `loss_model`, `rtt`, `tx_interval`, `seed`, `mode`, `extend_to_budget`,
/// `block_timer`, `feedback_interval`, `trials`. Give any two of
/// (k, n, epsilon); loss_model is written `bernoulli:P`, `rounds:F1,F2,...`
/// or `ge:PGOOD,PBAD,PG2B,PB2G`. `#` starts a comment.
#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub trials: Option<u64>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut block_id = 1u64;
        let mut k: Option<u64> = None;
        let mut n: Option<u64> = None;
        let mut epsilon: Option<f64> = None;
        let mut loss: Option<LossModel> = None;
        let mut rtt = 1.0f64;
        let mut tx_interval = 0.0f64;
        let mut seed = 0u64;
        let mut mode = Mode::Comparison;
        let mut extend = false;
        let mut block_timer: Option<f64> = None;
        let mut feedback_interval: Option<f64> = None;
        let mut trials: Option<u64> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| ScenarioError::Parse { line, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "block_id" => block_id = parse_num(value).map_err(err)?,
                "k" => k = Some(parse_num(value).map_err(err)?),
                "n" => n = Some(parse_num(value).map_err(err)?),
                "epsilon" => epsilon = Some(parse_num(value).map_err(err)?),
                "loss_model" => loss = Some(parse_loss_model(value).map_err(err)?),
                "rtt" => rtt = parse_num(value).map_err(err)?,
                "tx_interval" => tx_interval = parse_num(value).map_err(err)?,
                "seed" => seed = parse_num(value).map_err(err)?,
                "block_timer" => block_timer = Some(parse_num(value).map_err(err)?),
                "feedback_interval" => feedback_interval = Some(parse_num(value).map_err(err)?),
                "trials" => trials = Some(parse_num(value).map_err(err)?),
                "mode" => {
                    mode = match value {
                        "comparison" => Mode::Comparison,
                        "realistic" => Mode::Realistic,
                        other => return Err(err(format!("unknown mode `{other}`"))),
                    }
                }
                "extend_to_budget" => {
                    extend = match value {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        other => return Err(err(format!("expected boolean, got `{other}`"))),
                    }
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }

        let spec = match (k, n, epsilon) {
            (Some(k), None, Some(e)) => BlockSpec::from_epsilon(block_id, k, e)?,
            (Some(k), Some(n), None) => BlockSpec::from_budget(block_id, k, n)?,
            (None, Some(n), Some(e)) => {
                if !(0.0..1.0).contains(&e) {
                    return Err(ScenarioError::Invalid(format!(
                        "epsilon must lie in [0,1), got {e}"
                    )));
                }
                // largest K whose budget fits N
                let k = ((n as f64) * (1.0 - e) + 1e-9).floor() as u64;
                BlockSpec::from_budget(block_id, k.max(1), n)?
            }
            _ => {
                return Err(ScenarioError::Invalid(
                    "give exactly two of k, n, epsilon".into(),
                ))
            }
        };
        let loss =
            loss.ok_or_else(|| ScenarioError::Invalid("missing required key loss_model".into()))?;

        let scenario = Scenario {
            spec,
            loss,
            rtt,
            tx_interval,
            seed,
            mode,
            extend_to_budget: extend,
            block_timer,
            feedback_interval,
        };
        scenario.validate()?;
        Ok(ScenarioFile { scenario, trials })
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("could not parse `{value}`"))
}

pub fn parse_loss_model(value: &str) -> Result<LossModel, String> {
    let (kind, args) = value
        .split_once(':')
        .ok_or_else(|| format!("expected `kind:args`, got `{value}`"))?;
    let nums: Result<Vec<f64>, String> = args.split(',').map(|s| parse_num(s.trim())).collect();
    let nums = nums?;
    let model = match kind.trim() {
        "bernoulli" => {
            if nums.len() != 1 {
                return Err("bernoulli takes one probability".into());
            }
            LossModel::Bernoulli { p: nums[0] }
        }
        "rounds" => LossModel::RoundFractions { fractions: nums },
        "ge" => {
            if nums.len() != 4 {
                return Err("ge takes four probabilities".into());
            }
            LossModel::GilbertElliott {
                p_good_loss: nums[0],
                p_bad_loss: nums[1],
                p_g2b: nums[2],
                p_b2g: nums[3],
            }
        }
        other => return Err(format!("unknown loss model `{other}`")),
    };
    model
        .validate()
        .map_err(|e| e.to_string())
        .map(|_| model.clone())?;
    Ok(model)
}

// ---------------------------------------------------------------------------
// Per-run results
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundStat {
    pub round: u32,
    pub sent: u64,
    pub lost: u64,
    /// Realized loss fraction lost/sent.
    pub fraction: f64,
    /// Running product of realized fractions up to this round.
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockResult {
    pub protocol: Protocol,
    pub delivered: bool,
    pub delivery_round: Option<u32>,
    pub delivery_time: Option<f64>,
    pub transmissions_total: u64,
    pub received_total: u64,
    pub rounds: Vec<RoundStat>,
    /// Receptions needed for recovery: K for FLUID, N for ARQ.
    pub recovery_threshold: u64,
    /// T = N * tx_interval.
    pub round1_time: f64,
    pub timer_expired: bool,
}

impl BlockResult {
    pub fn csv_header() -> &'static str {
        "trial,protocol,delivered,delivery_round,delivery_time,transmissions,received"
    }

    pub fn to_csv_row(&self, trial: u64) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            trial,
            self.protocol.name(),
            self.delivered,
            self.delivery_round.map_or(String::new(), |r| r.to_string()),
            self.delivery_time.map_or(String::new(), |t| t.to_string()),
            self.transmissions_total,
            self.received_total
        )
    }
}

// ---------------------------------------------------------------------------
// The engine
// ---------------------------------------------------------------------------

enum SenderSide {
    Fluid(SenderState),
    Arq(ArqSenderState),
}

enum ReceiverSide {
    Fluid(ReceiverState),
    Arq(ArqReceiverState),
}

#[derive(Debug, Clone, Copy)]
struct Response {
    time: f64,
    round: u32,
    source: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Stop,
    Departure,
    Feedback,
    Tick,
}

struct Engine<'a> {
    sc: &'a Scenario,
    protocol: Protocol,
    loss: LossProcess,
    sender: SenderSide,
    receiver: ReceiverSide,
    deadline: f64,
    tx_cap: u64,
    next_initial: u64,
    responses: VecDeque<Response>,
    feedback: VecDeque<(f64, FeedbackReport)>,
    stop_report: Option<(f64, FeedbackReport)>,
    /// Realistic-mode cadence: time of the last emitted report, and whether
    /// the receiver state changed since. Quiescent receivers stop ticking so
    /// dead scenarios fall through to the timer.
    last_emit: f64,
    receiver_dirty: bool,
    dirty_since: f64,
    transmissions: u64,
    received_total: u64,
    sent_per_round: Vec<u64>,
    lost_per_round: Vec<u64>,
    delivered_at: Option<(f64, u32)>,
    timer_expired: bool,
}

impl<'a> Engine<'a> {
    fn new(sc: &'a Scenario, protocol: Protocol) -> Self {
        let spec = sc.spec;
        let deadline = sc.deadline();
        let (sender, receiver) = match protocol {
            Protocol::Fluid => (
                SenderSide::Fluid(SenderState::new(spec, deadline)),
                ReceiverSide::Fluid(ReceiverState::new(
                    spec.block_id,
                    spec.k,
                    ReceiverCodec::Idealized,
                )),
            ),
            Protocol::Arq => (
                SenderSide::Arq(ArqSenderState::new(spec.block_id, spec.n, deadline)),
                ReceiverSide::Arq(ArqReceiverState::new(spec.block_id, spec.n)),
            ),
        };
        Self {
            sc,
            protocol,
            loss: LossProcess::new(sc.loss.clone(), sc.seed),
            sender,
            receiver,
            deadline,
            tx_cap: spec.n.saturating_mul(1000).max(1_000_000),
            next_initial: 1,
            responses: VecDeque::new(),
            feedback: VecDeque::new(),
            stop_report: None,
            last_emit: 0.0,
            receiver_dirty: false,
            dirty_since: 0.0,
            transmissions: 0,
            received_total: 0,
            sent_per_round: Vec::new(),
            lost_per_round: Vec::new(),
            delivered_at: None,
            timer_expired: false,
        }
    }

    fn sender_terminated(&self) -> bool {
        match &self.sender {
            SenderSide::Fluid(s) => s.terminated(),
            SenderSide::Arq(s) => s.terminated(),
        }
    }

    fn receiver_recovered(&self) -> bool {
        match &self.receiver {
            ReceiverSide::Fluid(r) => r.recovered(),
            ReceiverSide::Arq(r) => r.recovered(),
        }
    }

    fn next_event(&self) -> Option<(f64, EventKind)> {
        let mut best: Option<(f64, u8, EventKind)> = None;
        let mut consider = |time: f64, rank: u8, kind: EventKind| match best {
            Some((bt, br, _)) if (bt, br) <= (time, rank) => {}
            _ => best = Some((time, rank, kind)),
        };
        if let Some((t, _)) = self.stop_report {
            consider(t, 0, EventKind::Stop);
        }
        if self.next_initial <= self.sc.spec.n {
            consider(
                self.next_initial as f64 * self.sc.tx_interval,
                1,
                EventKind::Departure,
            );
        }
        if let Some(r) = self.responses.front() {
            consider(r.time, 2, EventKind::Departure);
        }
        if let Some((t, _)) = self.feedback.front() {
            consider(*t, 3, EventKind::Feedback);
        }
        if self.sc.mode == Mode::Realistic && self.receiver_dirty {
            consider(self.tick_time(), 4, EventKind::Tick);
        }
        best.map(|(t, _, k)| (t, k))
    }

    /// Next cadence emission: at least one interval after the previous
    /// report, no earlier than the change being reported.
    fn tick_time(&self) -> f64 {
        (self.last_emit + self.sc.cadence()).max(self.dirty_since)
    }

    fn mark_receiver_dirty(&mut self, time: f64) {
        if !self.receiver_dirty {
            self.receiver_dirty = true;
            self.dirty_since = time;
        }
    }

    fn run(&mut self) {
        loop {
            if self.sender_terminated() {
                break;
            }
            if self.transmissions >= self.tx_cap {
                // runaway guard (e.g. total loss with zero RTT): treat as
                // timer expiry
                self.fire_timer();
                break;
            }
            let Some((time, kind)) = self.next_event() else {
                // nothing left in the simulated world; only the timer remains
                self.fire_timer();
                break;
            };
            if time >= self.deadline {
                self.fire_timer();
                break;
            }
            match kind {
                EventKind::Stop => {
                    let (_, report) = self.stop_report.take().expect("stop event without report");
                    self.deliver_report(&report, time);
                }
                EventKind::Departure => self.process_departure(time),
                EventKind::Feedback => {
                    let (_, report) = self.feedback.pop_front().expect("feedback queue empty");
                    self.deliver_report(&report, time);
                }
                EventKind::Tick => {
                    let mut report = match &self.receiver {
                        ReceiverSide::Fluid(r) => r.report(time),
                        ReceiverSide::Arq(r) => r.report(time),
                    };
                    if self.sc.extend_to_budget {
                        report.recovered = false;
                    }
                    self.feedback.push_back((time + self.sc.rtt, report));
                    self.last_emit = time;
                    self.receiver_dirty = false;
                }
            }
        }
    }

    /// Pop the earliest departure; the paced initial round wins time ties
    /// against responses.
    fn pop_departure(&mut self) -> (u32, u64) {
        let initial_time = if self.next_initial <= self.sc.spec.n {
            Some(self.next_initial as f64 * self.sc.tx_interval)
        } else {
            None
        };
        let response_time = self.responses.front().map(|r| r.time);
        let take_initial = match (initial_time, response_time) {
            (Some(it), Some(rt)) => it <= rt,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => unreachable!("pop_departure with no departure pending"),
        };
        if take_initial {
            let source = self.next_initial;
            self.next_initial += 1;
            (1, source)
        } else {
            let r = self.responses.pop_front().unwrap();
            (r.round, r.source)
        }
    }

    fn process_departure(&mut self, time: f64) {
        let (round, source) = self.pop_departure();
        let seq = match &mut self.sender {
            SenderSide::Fluid(s) => s.register_departure(round),
            SenderSide::Arq(s) => s.register_departure(round, source),
        };
        self.transmissions += 1;
        let ri = round as usize - 1;
        if self.sent_per_round.len() <= ri {
            self.sent_per_round.resize(ri + 1, 0);
            self.lost_per_round.resize(ri + 1, 0);
        }
        self.sent_per_round[ri] += 1;
        let index_in_round = self.sent_per_round[ri];
        let lost = self.loss.decide(round, index_in_round);

        if lost {
            self.lost_per_round[ri] += 1;
            match self.sc.mode {
                Mode::Comparison => {
                    // loss inferable immediately; the sender learns one RTT
                    // after transmit time
                    let mut report = match &mut self.receiver {
                        ReceiverSide::Fluid(r) => r.on_loss_inferred(seq, time),
                        ReceiverSide::Arq(r) => r.on_loss_inferred(seq, time),
                    };
                    if self.sc.extend_to_budget {
                        // under the analytical extension the sender runs past
                        // the recovery point; only the budget report stops it
                        report.recovered = false;
                    }
                    self.feedback.push_back((time + self.sc.rtt, report));
                }
                Mode::Realistic => {} // receiver sees nothing; gaps surface on later arrivals
            }
            return;
        }

        let was_recovered = self.receiver_recovered();
        let report = match &mut self.receiver {
            ReceiverSide::Fluid(r) => r.on_packet(seq, time),
            ReceiverSide::Arq(r) => r.on_packet(seq, source, time),
        };
        self.received_total += 1;
        self.mark_receiver_dirty(time);
        if !was_recovered && self.receiver_recovered() {
            self.delivered_at = Some((time, round));
        }
        if self.sc.mode == Mode::Comparison {
            // one report per arrival: keeps the sender's view advancing seq
            // by seq, which pins each reported loss to its exact packet
            let mut rep = report;
            if self.sc.extend_to_budget {
                rep.recovered = false;
            }
            self.feedback.push_back((time + self.sc.rtt, rep));
        }
        let stop_now = if self.sc.extend_to_budget {
            self.received_total == self.sc.spec.n
        } else {
            report.recovered
        };
        if stop_now && self.stop_report.is_none() {
            self.stop_report = Some((time + self.sc.rtt, report));
        }
    }

    fn deliver_report(&mut self, report: &FeedbackReport, now: f64) {
        match &mut self.sender {
            SenderSide::Fluid(s) => match s.on_feedback(report) {
                FeedbackDisposition::Respond(rounds) => {
                    for round in rounds {
                        self.responses.push_back(Response {
                            time: now,
                            round,
                            source: 0,
                        });
                    }
                }
                FeedbackDisposition::Stop | FeedbackDisposition::Ignored => {}
            },
            SenderSide::Arq(s) => match s.on_feedback(report) {
                ArqDisposition::Respond(rts) => {
                    for rt in rts {
                        self.responses.push_back(Response {
                            time: now,
                            round: rt.round,
                            source: rt.source_id,
                        });
                    }
                }
                ArqDisposition::Stop | ArqDisposition::Ignored => {}
            },
        }
    }

    fn fire_timer(&mut self) {
        match &mut self.sender {
            SenderSide::Fluid(s) => {
                s.on_timer(self.deadline);
            }
            SenderSide::Arq(s) => {
                s.on_timer(self.deadline);
            }
        }
        self.timer_expired = true;
    }

    fn result(self) -> BlockResult {
        let mut rounds = Vec::new();
        let mut product = 1.0;
        for (i, (&sent, &lost)) in self
            .sent_per_round
            .iter()
            .zip(&self.lost_per_round)
            .enumerate()
        {
            if sent == 0 {
                break;
            }
            let fraction = lost as f64 / sent as f64;
            product *= fraction;
            rounds.push(RoundStat {
                round: i as u32 + 1,
                sent,
                lost,
                fraction,
                product,
            });
        }
        BlockResult {
            protocol: self.protocol,
            delivered: self.delivered_at.is_some(),
            delivery_round: self.delivered_at.map(|(_, r)| r),
            delivery_time: self.delivered_at.map(|(t, _)| t),
            transmissions_total: self.transmissions,
            received_total: self.received_total,
            rounds,
            recovery_threshold: match self.protocol {
                Protocol::Fluid => self.sc.spec.k,
                Protocol::Arq => self.sc.spec.n,
            },
            round1_time: self.sc.round1_time(),
            timer_expired: self.timer_expired,
        }
    }
}

/// Simulate one block under the given protocol. Deterministic: the same
/// scenario (seed included) produces the identical BlockResult.
pub fn run_block(scenario: &Scenario, protocol: Protocol) -> BlockResult {
    let mut eng = Engine::new(scenario, protocol);
    eng.run();
    eng.result()
}

/// Run FLUID and ARQ against the same loss realization. Both runs consume
/// the seeded loss stream in transmission-event order, which is identical
/// for the two protocols under the aligned comparison.
pub fn run_aligned_pair(scenario: &Scenario) -> (BlockResult, BlockResult) {
    (
        run_block(scenario, Protocol::Fluid),
        run_block(scenario, Protocol::Arq),
    )
}

/// Latency bound check for a delivered block: the delivery time must lie in
/// [T*K/N, T + round*RTT].
pub fn latency_check(result: &BlockResult, scenario: &Scenario) -> bool {
    let (Some(time), Some(round)) = (result.delivery_time, result.delivery_round) else {
        return false;
    };
    let lower = scenario.spec.k as f64 * scenario.tx_interval;
    let upper = scenario.round1_time() + round as f64 * scenario.rtt;
    let tol = 1e-9 * (1.0 + upper.abs());
    lower - tol <= time && time <= upper + tol
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// Empirical delivery statistics over independent trials. Frequencies
/// (rounds plus the undelivered bucket) sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    pub trials: u64,
    /// The i-th entry is the fraction of trials finishing in round i+1.
    pub round_freq: Vec<f64>,
    pub undelivered: f64,
    pub mean_round: Option<f64>,
    pub p50_round: Option<u32>,
    pub p99_round: Option<u32>,
    pub mean_time: Option<f64>,
    pub p50_time: Option<f64>,
    pub p99_time: Option<f64>,
    pub mean_transmissions: f64,
}

impl EmpiricalDistribution {
    /// CSV with columns `round,frequency` where round is 1, 2, ... and the
    /// final row is labeled `undelivered`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,frequency\n");
        for (i, f) in self.round_freq.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, f));
        }
        out.push_str(&format!("undelivered,{}\n", self.undelivered));
        out
    }
}

/// Run `trials` independent simulations. Trial i uses substream i of the
/// scenario seed, so parallel or out-of-order evaluation would produce the
/// same aggregate; this implementation runs sequentially.
pub fn monte_carlo(scenario: &Scenario, protocol: Protocol, trials: u64) -> EmpiricalDistribution {
    assert!(trials >= 1, "trials must be at least 1");
    let mut round_counts: Vec<u64> = Vec::new();
    let mut undelivered = 0u64;
    let mut times: Vec<f64> = Vec::new();
    let mut round_sum = 0u64;
    let mut time_sum = 0.0;
    let mut tx_sum = 0u64;

    for i in 0..trials {
        let sc = scenario.with_trial_seed(i);
        let result = run_block(&sc, protocol);
        tx_sum += result.transmissions_total;
        match (result.delivery_round, result.delivery_time) {
            (Some(round), Some(time)) => {
                let ri = round as usize - 1;
                if round_counts.len() <= ri {
                    round_counts.resize(ri + 1, 0);
                }
                round_counts[ri] += 1;
                round_sum += round as u64;
                time_sum += time;
                times.push(time);
            }
            _ => undelivered += 1,
        }
    }

    let delivered = trials - undelivered;
    let percentile_round = |q: f64| -> Option<u32> {
        if delivered == 0 {
            return None;
        }
        let need = (q * delivered as f64).ceil().max(1.0) as u64;
        let mut cum = 0u64;
        for (i, &c) in round_counts.iter().enumerate() {
            cum += c;
            if cum >= need {
                return Some(i as u32 + 1);
            }
        }
        None
    };
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let percentile_time = |q: f64| -> Option<f64> {
        if times.is_empty() {
            return None;
        }
        let idx = ((q * times.len() as f64).ceil().max(1.0) as usize - 1).min(times.len() - 1);
        Some(times[idx])
    };

    EmpiricalDistribution {
        trials,
        round_freq: round_counts
            .iter()
            .map(|&c| c as f64 / trials as f64)
            .collect(),
        undelivered: undelivered as f64 / trials as f64,
        mean_round: (delivered > 0).then(|| round_sum as f64 / delivered as f64),
        p50_round: percentile_round(0.50),
        p99_round: percentile_round(0.99),
        mean_time: (delivered > 0).then(|| time_sum / delivered as f64),
        p50_time: percentile_time(0.50),
        p99_time: percentile_time(0.99),
        mean_transmissions: tx_sum as f64 / trials as f64,
    }
}
