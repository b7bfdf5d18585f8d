//! Timestamp transfer codecs.
//!
//! Once beacon matching has given both sides a shared reference instant, the
//! sender still has to convey *what its clock read* at that instant. Two
//! codecs exist, both decodable from RSSI alone:
//!
//! * [`temporal`] — each base-10 digit modulates the spacing of three
//!   packets inside a fixed window (information in *when*),
//! * [`energy`] — on-off / multi-level keying over fixed slots (information
//!   in *whether and how loud*).
//!
//! [`timestamp`] defines the 64-bit NTP-style value being moved, its
//! 20-digit decimal serialization, and the 26-bit microsecond delta form
//! used for in-session incremental updates.

pub mod energy;
pub mod temporal;
pub mod timestamp;

pub use energy::{energy_decode, energy_encode, EnergyParams};
pub use temporal::{temporal_decode, temporal_encode, TemporalParams};
pub use timestamp::{
    delta_decode, delta_encode, digits_to_timestamp, timestamp_to_digits, Timestamp64,
    DELTA_BITS, MAX_DELTA_US,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors across the codec layer.
#[derive(Debug, Error, PartialEq)]
pub enum CodecError {
    #[error("symbol {0} is not a base-10 digit")]
    NonDigit(u8),
    #[error("bit value {0} is not 0 or 1")]
    NonBit(u8),
    #[error("digit string exceeds the 64-bit timestamp range")]
    DigitOverflow,
    #[error("delta of {delta_us} us does not fit in {} bits", DELTA_BITS)]
    DeltaOverflow { delta_us: u64 },
    #[error("current timestamp precedes the previous one")]
    DeltaBackwards,
    #[error("temporal granularity must be at least 1 ms")]
    BadGranularity,
    #[error("interval of {interval_ns} ns violates the {min_ns} ns minimum packet interval")]
    MinIntervalViolated { interval_ns: i64, min_ns: i64 },
    #[error("packet duration {duration_ns} ns does not fit inside a {max_ns} ns interval")]
    PacketTooLong { duration_ns: i64, max_ns: i64 },
    #[error("energy level count {0} is unsupported; use 2 or 4")]
    LevelsUnsupported(u8),
    #[error("power map holds {got} levels, expected {expected}")]
    PowerMapLength { expected: usize, got: usize },
    #[error("power map must be strictly increasing in dBm")]
    PowersNotIncreasing,
    #[error("bit count {len} is not a multiple of {per_slot} bits per slot")]
    BitCountMisaligned { len: usize, per_slot: usize },
    #[error("slot of {slot_ns} ns holds no sample at a {period_ns} ns period")]
    SlotTooNarrow { slot_ns: i64, period_ns: i64 },
    #[error("trace does not cover {n_slots} slots starting at the payload anchor")]
    TraceTooShort { n_slots: usize },
    #[error("sent {sent} symbols but received {received}")]
    LengthMismatch { sent: usize, received: usize },
}

/// Outcome of decoding a symbol stream.
///
/// Each position is either a recovered symbol or an erasure (`None`), where
/// a symbol is a digit for the temporal codec and a slot level for the
/// energy codec. A payload is usable only when every position decoded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// Per-position outcome; `None` marks an erasure.
    pub symbols: Vec<Option<u8>>,
}

impl DecodeResult {
    pub fn new(symbols: Vec<Option<u8>>) -> Self {
        DecodeResult { symbols }
    }

    /// Number of erased positions.
    pub fn erasures(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_none()).count()
    }

    /// True when every position carries a symbol.
    pub fn is_clean(&self) -> bool {
        self.erasures() == 0
    }

    /// The decoded symbols, present only when there are no erasures.
    pub fn values(&self) -> Option<Vec<u8>> {
        self.symbols.iter().copied().collect()
    }
}

/// Symbol error rate between what was sent and what decoded.
///
/// Erasures count as errors: an abandoned symbol is still a symbol the link
/// failed to deliver.
pub fn ber(sent: &[u8], received: &DecodeResult) -> Result<f64, CodecError> {
    if sent.len() != received.symbols.len() {
        return Err(CodecError::LengthMismatch { sent: sent.len(), received: received.symbols.len() });
    }
    if sent.is_empty() {
        return Ok(0.0);
    }
    let errors = sent
        .iter()
        .zip(&received.symbols)
        .filter(|(&s, r)| r.map_or(true, |r| r != s))
        .count();
    Ok(errors as f64 / sent.len() as f64)
}

/// The `width` low bits of `value`, most significant first.
pub fn u64_to_bits(value: u64, width: u32) -> Vec<u8> {
    assert!(width <= 64);
    (0..width).rev().map(|b| ((value >> b) & 1) as u8).collect()
}

/// Reassembles bits (most significant first) into a value.
pub fn bits_to_u64(bits: &[u8]) -> Result<u64, CodecError> {
    assert!(bits.len() <= 64, "at most 64 bits fit in a u64");
    let mut v = 0u64;
    for &b in bits {
        if b > 1 {
            return Err(CodecError::NonBit(b));
        }
        v = (v << 1) | u64::from(b);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ber_counts_mismatches_and_erasures() {
        let rx = DecodeResult::new(vec![Some(1), Some(9), None, Some(4)]);
        assert_eq!(ber(&[1, 2, 3, 4], &rx).unwrap(), 0.5);
        assert_eq!(ber(&[1, 9, 3, 4], &rx).unwrap(), 0.25);
        assert!(matches!(ber(&[1, 2], &rx), Err(CodecError::LengthMismatch { .. })));
        assert_eq!(ber(&[], &DecodeResult::new(vec![])).unwrap(), 0.0);
    }

    #[test]
    fn decode_result_values_require_cleanliness() {
        let clean = DecodeResult::new(vec![Some(7), Some(0)]);
        assert!(clean.is_clean());
        assert_eq!(clean.values(), Some(vec![7, 0]));
        let erased = DecodeResult::new(vec![Some(7), None]);
        assert_eq!(erased.erasures(), 1);
        assert_eq!(erased.values(), None);
    }

    #[test]
    fn bit_helpers_round_trip() {
        let v = 0x2FA_DEAD_u64;
        let bits = u64_to_bits(v, 26);
        assert_eq!(bits.len(), 26);
        assert_eq!(bits_to_u64(&bits).unwrap(), v & ((1 << 26) - 1));
        assert_eq!(u64_to_bits(0b1011, 4), vec![1, 0, 1, 1]);
        assert!(matches!(bits_to_u64(&[1, 2]), Err(CodecError::NonBit(2))));
    }
}
