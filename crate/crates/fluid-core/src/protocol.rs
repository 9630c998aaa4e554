//! FLUID sender/receiver state machines and the idealized ARQ baseline.
//!
//! A block of K source packets gets a budget of N = ceil(K/(1-epsilon))
//! encoded packets. The sender may transmit N packets plus one more for every
//! packet reported lost; the receiver reports how many packets it has
//! received and the highest sequence number whose outcome it knows, and the
//! sender derives the cumulative loss count from that pair alone. Transmission
//! for a block ends when feedback reports recovery or the block timer fires.
//!
//! The ARQ machines mirror the transmission-event structure exactly but
//! retransmit specific source packets and only finish once every one of the
//! block's N source packets has been received (zero slack).

use crate::codec::{CodecError, DecoderState, EncodedSymbol};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("source packet count must be at least 1")]
    InvalidK,
    #[error("slack parameter must lie in [0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("path load must be at least 1, got {0}")]
    InvalidLambda(f64),
    #[error("budget {n} smaller than source count {k}")]
    BudgetBelowK { n: u64, k: u64 },
}

// ---------------------------------------------------------------------------
// Block parameters
// ---------------------------------------------------------------------------

/// Block budget N = ceil(K / (1 - epsilon)).
///
/// The ceiling is taken with one part in 1e12 of downward tolerance so that
/// binary round-off on decimal slack values cannot inflate the budget at
/// exact-integer boundaries (K=90, epsilon=0.10 is 100, never 101).
pub fn block_budget(k: u64, epsilon: f64) -> Result<u64, ProtocolError> {
    if k == 0 {
        return Err(ProtocolError::InvalidK);
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(ProtocolError::InvalidEpsilon(epsilon));
    }
    let raw = k as f64 / (1.0 - epsilon);
    let n = (raw * (1.0 - 1e-12)).ceil() as u64;
    Ok(n.max(k))
}

/// Slack S = N - K: the number of losses the block can absorb.
pub fn slack(n: u64, k: u64) -> Result<u64, ProtocolError> {
    if n < k {
        return Err(ProtocolError::BudgetBelowK { n, k });
    }
    Ok(n - k)
}

/// epsilon = (lambda - 1) / lambda.
pub fn epsilon_from_lambda(lambda: f64) -> Result<f64, ProtocolError> {
    if lambda < 1.0 || lambda.is_nan() {
        return Err(ProtocolError::InvalidLambda(lambda));
    }
    Ok((lambda - 1.0) / lambda)
}

/// A block's parameters: K source packets, slack epsilon (equivalently path
/// load lambda = 1/(1-epsilon)), budget N and slack S = N - K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSpec {
    pub block_id: u64,
    pub k: u64,
    pub epsilon: f64,
    pub lambda: f64,
    pub n: u64,
    pub s: u64,
}

impl BlockSpec {
    pub fn from_epsilon(block_id: u64, k: u64, epsilon: f64) -> Result<Self, ProtocolError> {
        let n = block_budget(k, epsilon)?;
        Ok(Self {
            block_id,
            k,
            epsilon,
            lambda: 1.0 / (1.0 - epsilon),
            n,
            s: n - k,
        })
    }

    pub fn from_lambda(block_id: u64, k: u64, lambda: f64) -> Result<Self, ProtocolError> {
        let epsilon = epsilon_from_lambda(lambda)?;
        Self::from_epsilon(block_id, k, epsilon)
    }

    /// Explicit (K, N) pair; epsilon and lambda are derived. Used for the
    /// aligned comparison where ARQ delivers a block of N source packets.
    pub fn from_budget(block_id: u64, k: u64, n: u64) -> Result<Self, ProtocolError> {
        if k == 0 {
            return Err(ProtocolError::InvalidK);
        }
        if n < k {
            return Err(ProtocolError::BudgetBelowK { n, k });
        }
        Ok(Self {
            block_id,
            k,
            epsilon: (n - k) as f64 / n as f64,
            lambda: n as f64 / k as f64,
            n,
            s: n - k,
        })
    }

    /// The exact slack threshold S/N (at least epsilon, larger when the
    /// ceiling rounds the budget up).
    pub fn exact_threshold(&self) -> f64 {
        self.s as f64 / self.n as f64
    }
}

// ---------------------------------------------------------------------------
// Feedback
// ---------------------------------------------------------------------------

/// Receiver-to-sender report. `highest_seq` is the highest sequence number
/// whose outcome the receiver knows (for arrivals that is simply the highest
/// sequence number received); together with `received_count` it tells the
/// sender how many packets have been reported lost. Reports supersede each
/// other: a later report never carries smaller counters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackReport {
    pub block_id: u64,
    pub received_count: u64,
    pub highest_seq: u64,
    pub recovered: bool,
    pub emit_time: f64,
}

/// What the sender decided to do with a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeedbackDisposition {
    /// Stale or irrelevant; state unchanged.
    Ignored,
    /// Recovery (or prior termination): stop transmitting this block.
    Stop,
    /// Transmit one new encoded packet per newly reported loss; entries are
    /// the round tags to attach (round of the lost packet, plus one).
    Respond(Vec<u32>),
}

// ---------------------------------------------------------------------------
// FLUID sender
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SenderState {
    spec: BlockSpec,
    /// Transmissions authorized so far (budget plus reported losses).
    issued: u64,
    /// Transmissions actually departed; also the last assigned seq_no.
    sent_count: u64,
    reported_lost: u64,
    terminated: bool,
    deadline: f64,
    round_of_seq: Vec<u32>,
    last_received: u64,
    last_known: u64,
}

impl SenderState {
    /// A fresh sender with the initial budget issued. `deadline` is the
    /// block timer expiry (absolute simulated time).
    pub fn new(spec: BlockSpec, deadline: f64) -> Self {
        Self {
            spec,
            issued: spec.n,
            sent_count: 0,
            reported_lost: 0,
            terminated: false,
            deadline,
            round_of_seq: Vec::with_capacity(spec.n as usize),
            last_received: 0,
            last_known: 0,
        }
    }

    pub fn spec(&self) -> &BlockSpec {
        &self.spec
    }

    pub fn sent_count(&self) -> u64 {
        self.sent_count
    }

    pub fn reported_lost(&self) -> u64 {
        self.reported_lost
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Transmissions authorized but not yet departed.
    pub fn credit(&self) -> u64 {
        self.issued - self.sent_count
    }

    pub fn round_of(&self, seq_no: u64) -> Option<u32> {
        let index = (seq_no as usize).checked_sub(1)?;
        self.round_of_seq.get(index).copied()
    }

    /// Assign the next sequence number to a departing packet. Sequence
    /// numbers are handed out in transmission order, so they stay strictly
    /// increasing even when response packets interleave with the paced
    /// initial round.
    pub fn register_departure(&mut self, round: u32) -> u64 {
        debug_assert!(self.sent_count < self.issued, "departure without credit");
        self.sent_count += 1;
        self.round_of_seq.push(round);
        self.sent_count
    }

    /// Process a feedback report. Stale reports (either counter smaller than
    /// the latest accepted report) leave the state untouched. Recovery wins
    /// over simultaneously reported losses: pending credit is discarded.
    pub fn on_feedback(&mut self, report: &FeedbackReport) -> FeedbackDisposition {
        if self.terminated || report.block_id != self.spec.block_id {
            return FeedbackDisposition::Ignored;
        }
        if report.received_count < self.last_received
            || report.highest_seq < self.last_known
            || report.received_count > report.highest_seq
        {
            return FeedbackDisposition::Ignored;
        }
        let prev_known = self.last_known;
        self.last_received = report.received_count;
        self.last_known = report.highest_seq;

        if report.recovered {
            self.terminated = true;
            return FeedbackDisposition::Stop;
        }

        let lost_total = report.highest_seq - report.received_count;
        if lost_total <= self.reported_lost {
            return FeedbackDisposition::Respond(Vec::new());
        }
        let delta = lost_total - self.reported_lost;
        self.reported_lost = lost_total;
        self.issued += delta;

        // Attribute the newly reported losses oldest-first within the newly
        // covered range. With one report per outcome this is exact; batched
        // reports can only mis-tag rounds, never counts.
        let mut rounds = Vec::with_capacity(delta as usize);
        let mut seq = prev_known + 1;
        while (rounds.len() as u64) < delta && seq <= report.highest_seq {
            if let Some(r) = self.round_of(seq) {
                rounds.push(r + 1);
            }
            seq += 1;
        }
        while (rounds.len() as u64) < delta {
            // losses beyond our own departure log (cannot happen with a
            // well-formed peer); tag them after the latest known round
            let r = self.round_of_seq.last().copied().unwrap_or(0);
            rounds.push(r + 1);
        }
        FeedbackDisposition::Respond(rounds)
    }

    /// Fire the block timer. Returns true when this call terminated the
    /// sender; already-terminated senders are untouched.
    pub fn on_timer(&mut self, now: f64) -> bool {
        if !self.terminated && now >= self.deadline {
            self.terminated = true;
            true
        } else {
            false
        }
    }
}

// ---------------------------------------------------------------------------
// FLUID receiver
// ---------------------------------------------------------------------------

/// Recovery test backing a receiver: pure counting, or the real decoder.
pub enum ReceiverCodec {
    /// Recovered once K packets have been counted.
    Idealized,
    /// Recovered once the decoder reaches full rank.
    Real(DecoderState),
}

pub struct ReceiverState {
    block_id: u64,
    k: u64,
    codec: ReceiverCodec,
    received_count: u64,
    highest_known: u64,
    seen: HashSet<u64>,
}

impl ReceiverState {
    pub fn new(block_id: u64, k: u64, codec: ReceiverCodec) -> Self {
        Self {
            block_id,
            k,
            codec,
            received_count: 0,
            highest_known: 0,
            seen: HashSet::new(),
        }
    }

    pub fn received_count(&self) -> u64 {
        self.received_count
    }

    pub fn highest_known(&self) -> u64 {
        self.highest_known
    }

    pub fn recovered(&self) -> bool {
        match &self.codec {
            ReceiverCodec::Idealized => self.received_count >= self.k,
            ReceiverCodec::Real(dec) => dec.decoded().is_some(),
        }
    }

    pub fn decoder(&self) -> Option<&DecoderState> {
        match &self.codec {
            ReceiverCodec::Real(dec) => Some(dec),
            ReceiverCodec::Idealized => None,
        }
    }

    pub fn report(&self, now: f64) -> FeedbackReport {
        FeedbackReport {
            block_id: self.block_id,
            received_count: self.received_count,
            highest_seq: self.highest_known,
            recovered: self.recovered(),
            emit_time: now,
        }
    }

    /// Count an arriving packet by sequence number (idealized payload-free
    /// path). Duplicates are counted once.
    pub fn on_packet(&mut self, seq_no: u64, now: f64) -> FeedbackReport {
        if self.seen.insert(seq_no) {
            self.received_count += 1;
            self.highest_known = self.highest_known.max(seq_no);
        }
        self.report(now)
    }

    /// Ingest a real encoded symbol.
    pub fn on_symbol(
        &mut self,
        sym: &EncodedSymbol,
        now: f64,
    ) -> Result<FeedbackReport, CodecError> {
        if self.seen.insert(sym.seq_no) {
            self.received_count += 1;
            self.highest_known = self.highest_known.max(sym.seq_no);
            if let ReceiverCodec::Real(dec) = &mut self.codec {
                dec.ingest(sym)?;
            }
        }
        Ok(self.report(now))
    }

    /// Note that `seq_no` is known lost (comparison-model loss inference:
    /// the loss is attributable as soon as its outcome is knowable). Extends
    /// the known range without counting a reception.
    pub fn on_loss_inferred(&mut self, seq_no: u64, now: f64) -> FeedbackReport {
        self.highest_known = self.highest_known.max(seq_no);
        self.report(now)
    }
}

// ---------------------------------------------------------------------------
// Idealized ARQ mirror pair
// ---------------------------------------------------------------------------

/// ARQ sender for an aligned block of N source packets. Same transmission-
/// event structure as the FLUID sender, but every response retransmits the
/// specific source packet whose previous copy was reported lost.
#[derive(Debug, Clone)]
pub struct ArqSenderState {
    block_id: u64,
    n: u64,
    issued: u64,
    sent_count: u64,
    reported_lost: u64,
    terminated: bool,
    deadline: f64,
    round_of_seq: Vec<u32>,
    source_of_seq: Vec<u64>,
    last_received: u64,
    last_known: u64,
}

/// A response the ARQ sender wants on the wire: retransmit `source_id`
/// tagged with `round`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Retransmission {
    pub round: u32,
    pub source_id: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArqDisposition {
    Ignored,
    Stop,
    Respond(Vec<Retransmission>),
}

impl ArqSenderState {
    pub fn new(block_id: u64, n: u64, deadline: f64) -> Self {
        Self {
            block_id,
            n,
            issued: n,
            sent_count: 0,
            reported_lost: 0,
            terminated: false,
            deadline,
            round_of_seq: Vec::with_capacity(n as usize),
            source_of_seq: Vec::with_capacity(n as usize),
            last_received: 0,
            last_known: 0,
        }
    }

    pub fn sent_count(&self) -> u64 {
        self.sent_count
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn credit(&self) -> u64 {
        self.issued - self.sent_count
    }

    /// Initial-round source id for ordinal `i` (1-based): the packets of
    /// round 1 carry source packets 1..=N in order.
    pub fn initial_source(&self, i: u64) -> u64 {
        debug_assert!(i >= 1 && i <= self.n);
        i
    }

    pub fn register_departure(&mut self, round: u32, source_id: u64) -> u64 {
        debug_assert!(self.sent_count < self.issued, "departure without credit");
        self.sent_count += 1;
        self.round_of_seq.push(round);
        self.source_of_seq.push(source_id);
        self.sent_count
    }

    pub fn on_feedback(&mut self, report: &FeedbackReport) -> ArqDisposition {
        if self.terminated || report.block_id != self.block_id {
            return ArqDisposition::Ignored;
        }
        if report.received_count < self.last_received
            || report.highest_seq < self.last_known
            || report.received_count > report.highest_seq
        {
            return ArqDisposition::Ignored;
        }
        let prev_known = self.last_known;
        self.last_received = report.received_count;
        self.last_known = report.highest_seq;

        if report.recovered {
            self.terminated = true;
            return ArqDisposition::Stop;
        }

        let lost_total = report.highest_seq - report.received_count;
        if lost_total <= self.reported_lost {
            return ArqDisposition::Respond(Vec::new());
        }
        let delta = lost_total - self.reported_lost;
        self.reported_lost = lost_total;
        self.issued += delta;

        let mut out = Vec::with_capacity(delta as usize);
        let mut seq = prev_known + 1;
        while (out.len() as u64) < delta && seq <= report.highest_seq {
            let idx = seq as usize - 1;
            if idx < self.round_of_seq.len() {
                out.push(Retransmission {
                    round: self.round_of_seq[idx] + 1,
                    source_id: self.source_of_seq[idx],
                });
            }
            seq += 1;
        }
        ArqDisposition::Respond(out)
    }

    pub fn on_timer(&mut self, now: f64) -> bool {
        if !self.terminated && now >= self.deadline {
            self.terminated = true;
            true
        } else {
            false
        }
    }
}

/// ARQ receiver: the block is delivered only when all N distinct source
/// packets have arrived.
pub struct ArqReceiverState {
    block_id: u64,
    n: u64,
    received_count: u64,
    highest_known: u64,
    sources: HashSet<u64>,
    seen: HashSet<u64>,
}

impl ArqReceiverState {
    pub fn new(block_id: u64, n: u64) -> Self {
        Self {
            block_id,
            n,
            received_count: 0,
            highest_known: 0,
            sources: HashSet::new(),
            seen: HashSet::new(),
        }
    }

    pub fn received_count(&self) -> u64 {
        self.received_count
    }

    pub fn distinct_sources(&self) -> u64 {
        self.sources.len() as u64
    }

    pub fn recovered(&self) -> bool {
        self.sources.len() as u64 >= self.n
    }

    pub fn report(&self, now: f64) -> FeedbackReport {
        FeedbackReport {
            block_id: self.block_id,
            received_count: self.received_count,
            highest_seq: self.highest_known,
            recovered: self.recovered(),
            emit_time: now,
        }
    }

    pub fn on_packet(&mut self, seq_no: u64, source_id: u64, now: f64) -> FeedbackReport {
        if self.seen.insert(seq_no) {
            self.received_count += 1;
            self.highest_known = self.highest_known.max(seq_no);
            self.sources.insert(source_id);
        }
        self.report(now)
    }

    pub fn on_loss_inferred(&mut self, seq_no: u64, now: f64) -> FeedbackReport {
        self.highest_known = self.highest_known.max(seq_no);
        self.report(now)
    }
}
