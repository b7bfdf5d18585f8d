//! The 64-bit timestamp and its wire serializations.
//!
//! Sender clocks carry NTP-style 64-bit time: the high 32 bits count
//! seconds, the low 32 bits count 1/2^32-second fractions. A full timestamp
//! serializes as 20 zero-padded decimal digits (2^64-1 has 20 digits) for
//! the temporal codec, or as 64 raw bits for the energy codec.
//!
//! Within a session, consecutive timestamps differ by roughly the sync-pair
//! interval, so after the first full transfer the sender may send only a
//! delta: an unsigned 26-bit count of *microseconds*, enough for spacings
//! up to 2^26 us (~67.1 s). Anything larger must fall back to the full form.

use serde::{Deserialize, Serialize};

use super::CodecError;

/// Bit width of the incremental delta form.
pub const DELTA_BITS: u32 = 26;

/// Exclusive upper bound on an encodable delta, in microseconds.
pub const MAX_DELTA_US: u64 = 1 << DELTA_BITS;

/// Number of decimal digits in a full timestamp serialization.
pub const TIMESTAMP_DIGITS: usize = 20;

const NS_PER_SEC: u64 = 1_000_000_000;

/// An NTP-style 64-bit timestamp: seconds in the high word, 1/2^32-second
/// fractions in the low word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp64(pub u64);

impl Timestamp64 {
    /// Builds from explicit seconds and fraction words.
    pub const fn from_parts(seconds: u32, fraction: u32) -> Self {
        Timestamp64(((seconds as u64) << 32) | fraction as u64)
    }

    /// The raw 64-bit value.
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Converts a nanosecond count to the nearest representable timestamp.
    /// `ns` must stay below 2^32 seconds, the range of the seconds word.
    ///
    /// The fraction word resolves ~0.233 ns, so distinct nanosecond inputs
    /// stay distinct and [`as_nanos`](Self::as_nanos) inverts this exactly.
    pub fn from_nanos(ns: u64) -> Self {
        let secs = ns / NS_PER_SEC;
        let rem = ns % NS_PER_SEC;
        debug_assert!(secs >> 32 == 0, "timestamp seconds field overflow");
        let frac = ((rem as u128) * (1u128 << 32) + (NS_PER_SEC as u128) / 2) / NS_PER_SEC as u128;
        // A remainder just under one second can round up to a whole second.
        if frac == 1 << 32 {
            Timestamp64(((secs + 1) << 32))
        } else {
            Timestamp64((secs << 32) | frac as u64)
        }
    }

    /// The timestamp as whole nanoseconds, rounding the fraction word.
    pub fn as_nanos(self) -> u64 {
        let secs = self.0 >> 32;
        let frac = self.0 & 0xFFFF_FFFF;
        secs * NS_PER_SEC + (((frac as u128) * NS_PER_SEC as u128 + (1 << 31)) >> 32) as u64
    }
}

/// Serializes a timestamp as 20 zero-padded decimal digits.
pub fn timestamp_to_digits(t: Timestamp64) -> [u8; TIMESTAMP_DIGITS] {
    let mut digits = [0u8; TIMESTAMP_DIGITS];
    let mut v = t.bits();
    for d in digits.iter_mut().rev() {
        *d = (v % 10) as u8;
        v /= 10;
    }
    digits
}

/// Parses decimal digits (most significant first) back into a timestamp.
///
/// Accepts up to 20 digits; rejects non-digits and values beyond 2^64-1.
pub fn digits_to_timestamp(digits: &[u8]) -> Result<Timestamp64, CodecError> {
    if digits.len() > TIMESTAMP_DIGITS {
        return Err(CodecError::DigitOverflow);
    }
    let mut v: u64 = 0;
    for &d in digits {
        if d > 9 {
            return Err(CodecError::NonDigit(d));
        }
        v = v
            .checked_mul(10)
            .and_then(|v| v.checked_add(u64::from(d)))
            .ok_or(CodecError::DigitOverflow)?;
    }
    Ok(Timestamp64(v))
}

/// Encodes `cur` relative to `prev` as a 26-bit microsecond delta.
///
/// Fails if `cur` precedes `prev` or the gap reaches 2^26 us; the caller is
/// expected to fall back to a full timestamp transfer in that case. The gap
/// is rounded to the nearest microsecond, so the decoded timestamp equals
/// `cur` exactly only when the gap is microsecond-aligned — the sender keeps
/// both sides bit-identical by adopting [`delta_decode`]'s result as the
/// value it transmitted.
pub fn delta_encode(prev: Timestamp64, cur: Timestamp64) -> Result<u32, CodecError> {
    if cur < prev {
        return Err(CodecError::DeltaBackwards);
    }
    let delta_ns = cur.as_nanos() - prev.as_nanos();
    let delta_us = (delta_ns + 500) / 1_000;
    if delta_us >= MAX_DELTA_US {
        return Err(CodecError::DeltaOverflow { delta_us });
    }
    Ok(delta_us as u32)
}

/// Reconstructs the timestamp `delta_us` microseconds after `prev`.
pub fn delta_decode(prev: Timestamp64, delta_us: u32) -> Result<Timestamp64, CodecError> {
    if u64::from(delta_us) >= MAX_DELTA_US {
        return Err(CodecError::DeltaOverflow { delta_us: u64::from(delta_us) });
    }
    Ok(Timestamp64::from_nanos(prev.as_nanos() + u64::from(delta_us) * 1_000))
}
