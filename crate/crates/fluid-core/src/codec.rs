//! Rateless erasure codec for block delivery.
//!
//! A source block of K equal-length symbols is expanded into an unbounded
//! stream of encoded symbols. Symbols 1..=K are systematic (verbatim source
//! symbols); later symbols are dense random linear combinations over GF(256)
//! whose coefficients both sides derive from (block_id, seq_no), so nothing
//! but the payload travels on the wire. Any K symbols whose coefficient
//! vectors are independent recover the block; for dense random combinations
//! that holds with probability about prod_{i>=1}(1 - 256^-i) ~= 0.996.
//!
//! `ideal_ingest` is the zero-payload counting mode: recovery is declared as
//! soon as K symbols have been counted, with no rank-deficiency noise. The
//! simulator uses it so simulation matches the counting model exactly;
//! end-to-end data paths use the real decoder.

use crate::gf256;
use crate::rng::{mix64, SplitMix64};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("source block must contain at least one symbol")]
    EmptyBlock,
    #[error("symbols must be at least one byte long")]
    ZeroSymbolSize,
    #[error("symbol {index} has length {got}, expected {expected}")]
    MismatchedSymbolSize {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("symbol belongs to block {got}, decoder is for block {expected}")]
    BlockIdMismatch { got: u64, expected: u64 },
    #[error("payload length {got} does not match symbol size {expected}")]
    PayloadSizeMismatch { got: usize, expected: usize },
}

/// Coefficient seed for (block_id, seq_no): a fixed 64-bit mixing function,
/// so encoder and decoder derive identical coefficients independently.
#[inline]
pub fn coefficient_seed(block_id: u64, seq_no: u64) -> u64 {
    mix64(
        block_id
            .wrapping_mul(crate::rng::GOLDEN_GAMMA)
            .wrapping_add(seq_no),
    )
}

/// A block of K source symbols, all `symbol_size` bytes long.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceBlock {
    block_id: u64,
    symbols: Vec<Vec<u8>>,
}

impl SourceBlock {
    pub fn new(block_id: u64, symbols: Vec<Vec<u8>>) -> Result<Self, CodecError> {
        let first = symbols.first().ok_or(CodecError::EmptyBlock)?;
        let size = first.len();
        if size == 0 {
            return Err(CodecError::ZeroSymbolSize);
        }
        for (index, s) in symbols.iter().enumerate() {
            if s.len() != size {
                return Err(CodecError::MismatchedSymbolSize {
                    index,
                    got: s.len(),
                    expected: size,
                });
            }
        }
        Ok(Self { block_id, symbols })
    }

    pub fn block_id(&self) -> u64 {
        self.block_id
    }

    pub fn k(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbol_size(&self) -> usize {
        self.symbols[0].len()
    }

    pub fn symbols(&self) -> &[Vec<u8>] {
        &self.symbols
    }
}

/// One transmission unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSymbol {
    pub block_id: u64,
    pub seq_no: u64,
    pub coeff_seed: u64,
    pub payload: Vec<u8>,
}

/// Coefficient vector for symbol `seq_no` of a K-symbol block. Unit vector
/// in systematic range, otherwise dense bytes from the seeded generator.
/// K = 1 always yields the vector (1): a single-symbol block has only one useful
/// combination, so every encoded symbol is the source symbol itself.
pub fn coefficient_vector(k: usize, block_id: u64, seq_no: u64) -> Vec<u8> {
    debug_assert!(seq_no >= 1);
    if seq_no as usize <= k {
        let mut v = vec![0u8; k];
        v[seq_no as usize - 1] = 1;
        return v;
    }
    if k == 1 {
        return vec![1];
    }
    let mut rng = SplitMix64::new(coefficient_seed(block_id, seq_no));
    let mut v: Vec<u8> = (0..k).map(|_| (rng.next_u64() & 0xFF) as u8).collect();
    if v.iter().all(|&c| c == 0) {
        // probability 256^-K; keep the vector useful anyway
        v[(seq_no as usize) % k] = 1;
    }
    v
}

/// Encode symbol `seq_no` (1-based) of a block. Pure: the same (block,
/// seq_no) always yields the same payload.
pub fn encode(block: &SourceBlock, seq_no: u64) -> EncodedSymbol {
    assert!(seq_no >= 1, "sequence numbers start at 1");
    let k = block.k();
    let payload = if seq_no as usize <= k {
        block.symbols[seq_no as usize - 1].clone()
    } else if k == 1 {
        block.symbols[0].clone()
    } else {
        let coeffs = coefficient_vector(k, block.block_id, seq_no);
        let mut out = vec![0u8; block.symbol_size()];
        for (c, sym) in coeffs.iter().zip(&block.symbols) {
            gf256::mul_add_assign(&mut out, sym, *c);
        }
        out
    };
    EncodedSymbol {
        block_id: block.block_id,
        seq_no,
        coeff_seed: coefficient_seed(block.block_id, seq_no),
        payload,
    }
}

/// The counting model's recovery test: a block is recovered once K encoded
/// symbols have been received.
#[inline]
pub fn ideal_ingest(count: u64, k: u64) -> bool {
    count >= k
}

struct Row {
    pivot: usize,
    coeffs: Vec<u8>,
    payload: Vec<u8>,
}

/// Incremental Gaussian-elimination decoder. Rows are kept in reduced form
/// (unit pivots, zeros above and below), so rank K immediately yields the
/// source symbols.
pub struct DecoderState {
    block_id: u64,
    k: usize,
    symbol_size: usize,
    rows: Vec<Row>,
    seen: BTreeSet<u64>,
    decoded: Option<SourceBlock>,
}

impl DecoderState {
    pub fn new(block_id: u64, k: usize, symbol_size: usize) -> Result<Self, CodecError> {
        if k == 0 {
            return Err(CodecError::EmptyBlock);
        }
        if symbol_size == 0 {
            return Err(CodecError::ZeroSymbolSize);
        }
        Ok(Self {
            block_id,
            k,
            symbol_size,
            rows: Vec::with_capacity(k),
            seen: BTreeSet::new(),
            decoded: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn received(&self) -> usize {
        self.seen.len()
    }

    pub fn decoded(&self) -> Option<&SourceBlock> {
        self.decoded.as_ref()
    }

    /// Absorb one symbol. Duplicates (by seq_no) are ignored; rank grows by
    /// one exactly when the symbol's coefficient vector is independent of
    /// everything already received.
    pub fn ingest(&mut self, sym: &EncodedSymbol) -> Result<(), CodecError> {
        if sym.block_id != self.block_id {
            return Err(CodecError::BlockIdMismatch {
                got: sym.block_id,
                expected: self.block_id,
            });
        }
        if sym.payload.len() != self.symbol_size {
            return Err(CodecError::PayloadSizeMismatch {
                got: sym.payload.len(),
                expected: self.symbol_size,
            });
        }
        if !self.seen.insert(sym.seq_no) {
            return Ok(());
        }
        if self.rows.len() == self.k {
            return Ok(());
        }

        let mut coeffs = coefficient_vector(self.k, self.block_id, sym.seq_no);
        let mut payload = sym.payload.clone();

        // reduce against existing pivots
        for row in &self.rows {
            let factor = coeffs[row.pivot];
            if factor != 0 {
                gf256::mul_add_assign(&mut coeffs, &row.coeffs, factor);
                gf256::mul_add_assign(&mut payload, &row.payload, factor);
            }
        }

        let Some(pivot) = coeffs.iter().position(|&c| c != 0) else {
            return Ok(()); // dependent: rank unchanged
        };

        let lead = coeffs[pivot];
        gf256::scale_assign(&mut coeffs, gf256::inv(lead));
        gf256::scale_assign(&mut payload, gf256::inv(lead));

        // eliminate the new pivot from existing rows to stay fully reduced
        for row in &mut self.rows {
            let factor = row.coeffs[pivot];
            if factor != 0 {
                gf256::mul_add_assign(&mut row.coeffs, &coeffs, factor);
                gf256::mul_add_assign(&mut row.payload, &payload, factor);
            }
        }

        self.rows.push(Row {
            pivot,
            coeffs,
            payload,
        });

        if self.rows.len() == self.k {
            let mut symbols = vec![Vec::new(); self.k];
            for row in &self.rows {
                symbols[row.pivot] = row.payload.clone();
            }
            self.decoded = Some(SourceBlock {
                block_id: self.block_id,
                symbols,
            });
        }
        Ok(())
    }
}
