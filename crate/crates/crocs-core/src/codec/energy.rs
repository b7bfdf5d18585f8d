//! Energy modulation: bits carried by per-slot packet power.
//!
//! The payload window divides into fixed slots. Level 0 is silence; each
//! higher level is a packet filling the slot at a configured power. With two
//! levels this is plain on-off keying (bit 1 = packet present); with four
//! levels each slot carries two bits:
//!
//! ```text
//! bits 11 10 01 00  ->  P3, P2, P1, absent
//! ```
//!
//! The receiver averages RSSI over each slot and picks the nearest expected
//! level using midpoint thresholds between adjacent powers (and between the
//! noise floor and the lowest power). Slot boundaries come from the beacon
//! alignment instant, so no per-slot synchronization is needed.

use serde::{Deserialize, Serialize};

use super::{CodecError, DecodeResult};
use crate::channel::{PacketEvent, RssiTrace};
use crate::time::TrueTime;

/// Energy-codec parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Slot duration, nanoseconds.
    pub slot_ns: i64,
    /// Level count: 2 (OOK) or 4 (two bits per slot).
    pub levels: u8,
    /// Received power of levels 1.. in dBm, strictly increasing.
    /// Level 0 is packet absence and has no entry.
    pub level_powers_dbm: Vec<f64>,
}

impl EnergyParams {
    /// On-off keying at the given slot length and packet power.
    pub fn ook(slot_ns: i64, power_dbm: f64) -> Self {
        EnergyParams { slot_ns, levels: 2, level_powers_dbm: vec![power_dbm] }
    }

    /// Four-level keying; `powers` maps levels 1, 2, 3.
    pub fn four_level(slot_ns: i64, powers: [f64; 3]) -> Self {
        EnergyParams { slot_ns, levels: 4, level_powers_dbm: powers.to_vec() }
    }

    /// Bits carried per slot: log2 of the level count.
    pub fn bits_per_slot(&self) -> usize {
        match self.levels {
            2 => 1,
            4 => 2,
            _ => unreachable!("validated level count"),
        }
    }

    /// Slots needed for `bit_count` bits.
    pub fn slots_for_bits(&self, bit_count: usize) -> usize {
        bit_count / self.bits_per_slot()
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        if !matches!(self.levels, 2 | 4) {
            return Err(CodecError::LevelsUnsupported(self.levels));
        }
        let expected = usize::from(self.levels) - 1;
        if self.level_powers_dbm.len() != expected {
            return Err(CodecError::PowerMapLength { expected, got: self.level_powers_dbm.len() });
        }
        if self.level_powers_dbm.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CodecError::PowersNotIncreasing);
        }
        Ok(())
    }

    fn symbols_from_bits(&self, bits: &[u8]) -> Result<Vec<u8>, CodecError> {
        let per = self.bits_per_slot();
        if bits.len() % per != 0 {
            return Err(CodecError::BitCountMisaligned { len: bits.len(), per_slot: per });
        }
        bits.chunks(per)
            .map(|chunk| {
                let mut v = 0u8;
                for &b in chunk {
                    if b > 1 {
                        return Err(CodecError::NonBit(b));
                    }
                    v = (v << 1) | b;
                }
                Ok(v)
            })
            .collect()
    }

    /// Expands slot levels back into bits, most significant first.
    pub fn bits_from_symbols(&self, symbols: &[u8]) -> Vec<u8> {
        let per = self.bits_per_slot();
        symbols
            .iter()
            .flat_map(|&s| (0..per).rev().map(move |b| (s >> b) & 1))
            .collect()
    }
}

/// Builds the slot-aligned packet schedule for `bits`, slot 0 starting at
/// `start`. Level-0 slots stay silent; other levels emit a packet filling
/// the slot at their configured power.
pub fn energy_encode(
    bits: &[u8],
    p: &EnergyParams,
    start: TrueTime,
) -> Result<Vec<PacketEvent>, CodecError> {
    p.validate()?;
    let symbols = p.symbols_from_bits(bits)?;
    Ok(symbols
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > 0)
        .map(|(k, &s)| PacketEvent {
            start: start.offset(k as i64 * p.slot_ns),
            duration_ns: p.slot_ns,
            power_dbm: p.level_powers_dbm[usize::from(s) - 1],
        })
        .collect())
}

/// Reads `n_slots` slot levels from a trace, slot 0 starting at `start`.
///
/// `floor_dbm` is the receiver's estimate of the quiet channel, used for the
/// bottom decision threshold. Every slot must contain at least one sample
/// and lie fully inside the trace.
pub fn energy_decode(
    trace: &RssiTrace,
    start: TrueTime,
    n_slots: usize,
    p: &EnergyParams,
    floor_dbm: f64,
) -> Result<DecodeResult, CodecError> {
    p.validate()?;
    if p.slot_ns < trace.sample_period_ns {
        return Err(CodecError::SlotTooNarrow { slot_ns: p.slot_ns, period_ns: trace.sample_period_ns });
    }
    let payload_end = start.offset(n_slots as i64 * p.slot_ns);
    if start < trace.start || payload_end > trace.end() {
        return Err(CodecError::TraceTooShort { n_slots });
    }

    // Candidate means for levels 0..L and the midpoints separating them.
    let mut candidates = Vec::with_capacity(usize::from(p.levels));
    candidates.push(floor_dbm);
    candidates.extend_from_slice(&p.level_powers_dbm);
    let thresholds: Vec<f64> = candidates.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();

    let mut symbols = Vec::with_capacity(n_slots);
    for k in 0..n_slots {
        let slot_start = start.offset(k as i64 * p.slot_ns);
        let slot = trace.samples_between(slot_start, slot_start.offset(p.slot_ns));
        if slot.is_empty() {
            return Err(CodecError::SlotTooNarrow { slot_ns: p.slot_ns, period_ns: trace.sample_period_ns });
        }
        let mean = slot.iter().sum::<f64>() / slot.len() as f64;
        let level = thresholds.iter().filter(|&&th| mean > th).count() as u8;
        symbols.push(Some(level));
    }
    Ok(DecodeResult::new(symbols))
}
