//! Temporal modulation: digits carried by packet spacing.
//!
//! Each base-10 digit `a` occupies a fixed window of `30*g` milliseconds
//! bounded by three packet rises, split as
//!
//! ```text
//! first interval  = g * (10 + a) ms     (10..=19 ms at g = 1)
//! second interval = g * (20 - a) ms     (11..=20 ms at g = 1)
//! ```
//!
//! so every interval respects the sender's minimum packet spacing and the
//! window length is digit-independent. Consecutive digits share their
//! boundary packet: `d` digits cost `2d + 1` packets.
//!
//! Decoding must contend with transmit-side delay, which inflates measured
//! intervals by ~0.4 ms on average on the reference hardware. A fixed
//! compensation is subtracted from every interval before digit extraction —
//! without it, a delayed middle packet such as (13.7, 16.3) ms reads as
//! digit 4 instead of the 3 that was sent. A window whose compensated sum
//! strays from `30*g` ms by more than g/2 ms per interval boundary is
//! abandoned as an erasure rather than risk a silent mis-decode.

use serde::{Deserialize, Serialize};

use super::{CodecError, DecodeResult};
use crate::channel::{PacketEvent, PacketShape};
use crate::time::{TrueTime, MS};

/// Default compensation for transmit-side delay: 0.4 ms.
pub const DEFAULT_COMPENSATION_NS: i64 = 400_000;

/// Default minimum inter-packet spacing the sender can sustain: 10 ms.
pub const DEFAULT_MIN_PACKET_INTERVAL_NS: i64 = 10 * MS;

/// Temporal-codec parameters.
///
/// The digit base is fixed at 10; `granularity_ms` scales every interval,
/// trading airtime for robustness to interval jitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalParams {
    /// Interval scale factor `g` in milliseconds-per-unit; must be >= 1.
    pub granularity_ms: u32,
    /// Subtracted from every measured interval before decoding.
    pub compensation_ns: i64,
    /// Hardware floor on packet spacing; encoding rejects parameter
    /// combinations that would dip below it.
    pub min_packet_interval_ns: i64,
}

impl TemporalParams {
    /// Parameters at granularity `g` with default compensation and spacing.
    pub fn with_granularity(granularity_ms: u32) -> Self {
        TemporalParams {
            granularity_ms,
            compensation_ns: DEFAULT_COMPENSATION_NS,
            min_packet_interval_ns: DEFAULT_MIN_PACKET_INTERVAL_NS,
        }
    }

    /// The fixed per-digit window, nanoseconds.
    pub fn window_ns(&self) -> i64 {
        30 * self.g_ns()
    }

    fn g_ns(&self) -> i64 {
        i64::from(self.granularity_ms) * MS
    }

    /// The two intervals encoding digit `a`.
    fn intervals_for(&self, digit: u8) -> (i64, i64) {
        let g = self.g_ns();
        (g * (10 + i64::from(digit)), g * (20 - i64::from(digit)))
    }

    fn validate(&self) -> Result<(), CodecError> {
        if self.granularity_ms < 1 {
            return Err(CodecError::BadGranularity);
        }
        Ok(())
    }
}

impl Default for TemporalParams {
    fn default() -> Self {
        TemporalParams::with_granularity(1)
    }
}

/// Builds the packet schedule carrying `digits`, first rise at `start`.
///
/// Rejects non-digits, interval sets that violate the minimum packet
/// spacing, and packets too long to fit between adjacent rises.
pub fn temporal_encode(
    digits: &[u8],
    p: &TemporalParams,
    start: TrueTime,
    shape: PacketShape,
) -> Result<Vec<PacketEvent>, CodecError> {
    p.validate()?;
    // Digit 0 yields the tightest spacing: g * 10 ms.
    let tightest = p.g_ns() * 10;
    if tightest < p.min_packet_interval_ns {
        return Err(CodecError::MinIntervalViolated {
            interval_ns: tightest,
            min_ns: p.min_packet_interval_ns,
        });
    }
    if shape.duration_ns <= 0 || shape.duration_ns >= tightest {
        return Err(CodecError::PacketTooLong { duration_ns: shape.duration_ns, max_ns: tightest });
    }
    let mut out = Vec::with_capacity(2 * digits.len() + 1);
    let mut t = start;
    out.push(PacketEvent::new(t, shape));
    for &d in digits {
        if d > 9 {
            return Err(CodecError::NonDigit(d));
        }
        let (first, second) = p.intervals_for(d);
        t = t.offset(first);
        out.push(PacketEvent::new(t, shape));
        t = t.offset(second);
        out.push(PacketEvent::new(t, shape));
    }
    Ok(out)
}

/// Decodes measured packet intervals back into digits.
///
/// Intervals pair up into digit windows; `compensation_ns` is subtracted
/// from each before use. A window is erased when its compensated sum strays
/// from `30*g` ms by more than g/2 ms per interval boundary (g ms total for
/// the two-interval window); a trailing unpaired interval erases likewise.
/// Surviving windows yield `round(first / g) - 10`, clamped into 0..=9.
pub fn temporal_decode(intervals_ns: &[i64], p: &TemporalParams) -> Result<DecodeResult, CodecError> {
    p.validate()?;
    let g = p.g_ns();
    let window_tol = g; // g/2 per boundary, two measured boundaries per window
    let mut symbols = Vec::with_capacity(intervals_ns.len().div_ceil(2));
    let mut chunks = intervals_ns.chunks_exact(2);
    for pair in &mut chunks {
        let first = pair[0] - p.compensation_ns;
        let second = pair[1] - p.compensation_ns;
        if ((first + second) - p.window_ns()).abs() > window_tol {
            symbols.push(None);
            continue;
        }
        let digit = (first as f64 / g as f64 - 10.0).round_ties_even();
        symbols.push(Some(digit.clamp(0.0, 9.0) as u8));
    }
    if !chunks.remainder().is_empty() {
        symbols.push(None);
    }
    Ok(DecodeResult::new(symbols))
}
