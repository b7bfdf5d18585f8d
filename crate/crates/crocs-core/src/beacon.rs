//! Beacon construction and matching for the time-alignment phase.
//!
//! The sender cannot put a recognizable preamble inside its packets — the
//! receiver only sees RSSI — so the beacon's *packet spacing* carries the
//! signature instead. A beacon of N packets uses N-1 intervals, each either
//! `t1_ns` or `t2_ns`, arranged as a Barker code with `t1 -> +1` and
//! `t2 -> -1`. Barker codes keep every aperiodic autocorrelation sidelobe at
//! magnitude <= 1, so a sliding correlator over the symbolized interval
//! stream peaks sharply at the true beacon position and nowhere else.
//!
//! Matching classifies each measured interval as t1-like, t2-like, or
//! unknown ([`symbolize`]), then slides the code across the stream starting
//! at every detected rise. Unknown symbols contribute zero correlation, and
//! by default a window is accepted only at the full score, i.e. every
//! position agrees. The matched alignment instant is the rise of the first
//! packet in the accepted window.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{PacketDetection, PacketEvent, PacketShape};
use crate::time::{TrueTime, MS};

/// Beacon lengths (packet counts) with a known interval pattern.
pub const SUPPORTED_LENGTHS: [usize; 7] = [3, 4, 5, 6, 8, 12, 14];

/// Pattern selector for lengths that admit more than one Barker arrangement.
/// Only length 5 has two; every other length must use [`Variant::A`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Variant {
    #[default]
    A,
    B,
}

/// An interval symbol: what one measured packet gap looks like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symbol {
    /// Close to `t1_ns`; correlates as +1.
    T1,
    /// Close to `t2_ns`; correlates as -1.
    T2,
    /// Neither; correlates as 0.
    Unknown,
}

impl Symbol {
    /// The symbol's contribution to a correlation sum.
    pub fn correlation_value(self) -> i32 {
        match self {
            Symbol::T1 => 1,
            Symbol::T2 => -1,
            Symbol::Unknown => 0,
        }
    }
}

use Symbol::{T1, T2};

const PATTERN_3: &[Symbol] = &[T1, T2];
const PATTERN_4: &[Symbol] = &[T1, T1, T2];
const PATTERN_5A: &[Symbol] = &[T1, T1, T1, T2];
const PATTERN_5B: &[Symbol] = &[T1, T1, T2, T1];
const PATTERN_6: &[Symbol] = &[T1, T1, T1, T2, T1];
const PATTERN_8: &[Symbol] = &[T1, T1, T1, T2, T2, T1, T2];
const PATTERN_12: &[Symbol] = &[T1, T1, T1, T2, T2, T2, T1, T2, T2, T1, T2];
const PATTERN_14: &[Symbol] = &[T1, T1, T1, T1, T1, T2, T2, T1, T1, T2, T1, T2, T1];

/// The interval pattern for a beacon of `length` packets.
pub fn pattern_of(length: usize, variant: Variant) -> Result<&'static [Symbol], BeaconError> {
    match (length, variant) {
        (3, Variant::A) => Ok(PATTERN_3),
        (4, Variant::A) => Ok(PATTERN_4),
        (5, Variant::A) => Ok(PATTERN_5A),
        (5, Variant::B) => Ok(PATTERN_5B),
        (6, Variant::A) => Ok(PATTERN_6),
        (8, Variant::A) => Ok(PATTERN_8),
        (12, Variant::A) => Ok(PATTERN_12),
        (14, Variant::A) => Ok(PATTERN_14),
        (_, Variant::B) if SUPPORTED_LENGTHS.contains(&length) => {
            Err(BeaconError::NoSuchVariant { length })
        }
        _ => Err(BeaconError::UnsupportedLength(length)),
    }
}

/// Errors from beacon construction and matching.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BeaconError {
    #[error("no beacon pattern of length {0}; supported lengths are 3, 4, 5, 6, 8, 12, 14")]
    UnsupportedLength(usize),
    #[error("length {length} has a single pattern; variant B only exists for length 5")]
    NoSuchVariant { length: usize },
    #[error("beacon intervals t1 and t2 must be positive and distinct")]
    BadIntervals,
    #[error("symbol tolerance {tol_ns} ns must be below half the interval gap {gap_ns} ns")]
    ToleranceTooWide { tol_ns: i64, gap_ns: i64 },
    #[error("correlation lag {lag} out of range for code length {len}")]
    LagOutOfRange { lag: usize, len: usize },
    #[error("code symbols must be +1 or -1, found {0}")]
    NonUnitSymbol(i8),
    #[error("matching rate over zero trials is undefined")]
    ZeroTrials,
}

/// A +/-1 sequence with the Barker sidelobe property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarkerCode {
    symbols: Vec<i8>,
}

impl BarkerCode {
    /// Wraps a +/-1 sequence. Rejects other symbol values; use
    /// [`is_barker`](Self::is_barker) to check the sidelobe bound.
    pub fn new(symbols: Vec<i8>) -> Result<Self, BeaconError> {
        if let Some(&bad) = symbols.iter().find(|&&s| s != 1 && s != -1) {
            return Err(BeaconError::NonUnitSymbol(bad));
        }
        Ok(BarkerCode { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[i8] {
        &self.symbols
    }

    /// Aperiodic autocorrelation at lag `v`: the sum of `s[j] * s[j+v]`.
    ///
    /// Lag 0 returns the code length; valid lags are `0 <= v < len`.
    pub fn autocorrelation(&self, v: usize) -> Result<i32, BeaconError> {
        if v >= self.symbols.len() {
            return Err(BeaconError::LagOutOfRange { lag: v, len: self.symbols.len() });
        }
        Ok(self.symbols[..self.symbols.len() - v]
            .iter()
            .zip(&self.symbols[v..])
            .map(|(&a, &b)| i32::from(a) * i32::from(b))
            .sum())
    }

    /// Whether every nonzero-lag sidelobe has magnitude <= 1.
    pub fn is_barker(&self) -> bool {
        (1..self.symbols.len())
            .all(|v| self.autocorrelation(v).map(|c| c.abs() <= 1).unwrap_or(false))
    }
}

/// The shape of one beacon: packet count and the two interval durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeaconSpec {
    /// Number of packets; one more than the number of intervals.
    pub length: usize,
    /// The "+1" interval, nanoseconds.
    pub t1_ns: i64,
    /// The "-1" interval, nanoseconds.
    pub t2_ns: i64,
    /// Pattern selector; meaningful only for length 5.
    #[serde(default)]
    pub variant: Variant,
}

impl BeaconSpec {
    /// A validated beacon spec using pattern variant A.
    pub fn new(length: usize, t1_ns: i64, t2_ns: i64) -> Result<Self, BeaconError> {
        Self::with_variant(length, t1_ns, t2_ns, Variant::A)
    }

    /// A validated beacon spec with an explicit pattern variant.
    pub fn with_variant(
        length: usize,
        t1_ns: i64,
        t2_ns: i64,
        variant: Variant,
    ) -> Result<Self, BeaconError> {
        pattern_of(length, variant)?;
        if t1_ns <= 0 || t2_ns <= 0 || t1_ns == t2_ns {
            return Err(BeaconError::BadIntervals);
        }
        Ok(BeaconSpec { length, t1_ns, t2_ns, variant })
    }

    /// This beacon's interval pattern.
    pub fn pattern(&self) -> &'static [Symbol] {
        pattern_of(self.length, self.variant).expect("spec was validated at construction")
    }

    /// The pattern as a +/-1 Barker code.
    pub fn code(&self) -> BarkerCode {
        BarkerCode {
            symbols: self.pattern().iter().map(|s| s.correlation_value() as i8).collect(),
        }
    }

    /// The nominal interval durations, in order.
    pub fn intervals_ns(&self) -> Vec<i64> {
        self.pattern()
            .iter()
            .map(|s| match s {
                Symbol::T1 => self.t1_ns,
                Symbol::T2 => self.t2_ns,
                Symbol::Unknown => unreachable!("patterns contain only T1/T2"),
            })
            .collect()
    }

    /// Nominal time from the first packet rise to the last, nanoseconds.
    pub fn nominal_span_ns(&self) -> i64 {
        self.intervals_ns().iter().sum()
    }

    /// Default interval-classification tolerance: a quarter of the interval
    /// gap, capped at 5 ms.
    pub fn default_symbol_tol_ns(&self) -> i64 {
        ((self.t2_ns - self.t1_ns).abs() / 4).min(5 * MS)
    }
}

/// The packet schedule for one beacon whose first packet rises at `start`.
pub fn beacon_schedule(spec: &BeaconSpec, start: TrueTime, shape: PacketShape) -> Vec<PacketEvent> {
    let mut out = Vec::with_capacity(spec.length);
    let mut t = start;
    out.push(PacketEvent::new(t, shape));
    for gap in spec.intervals_ns() {
        t = t.offset(gap);
        out.push(PacketEvent::new(t, shape));
    }
    out
}

/// Classifies measured intervals as t1-like, t2-like, or unknown.
///
/// An interval maps to whichever nominal duration it is closest to, if that
/// distance is within `tol_ns`; anything else (including an exact tie)
/// becomes [`Symbol::Unknown`]. `tol_ns` must stay below half the gap so the
/// two acceptance bands cannot overlap.
pub fn symbolize(
    intervals: &[i64],
    t1_ns: i64,
    t2_ns: i64,
    tol_ns: i64,
) -> Result<Vec<Symbol>, BeaconError> {
    let gap = (t2_ns - t1_ns).abs();
    if t1_ns == t2_ns {
        return Err(BeaconError::BadIntervals);
    }
    if tol_ns <= 0 || 2 * tol_ns >= gap {
        return Err(BeaconError::ToleranceTooWide { tol_ns, gap_ns: gap });
    }
    Ok(intervals
        .iter()
        .map(|&iv| {
            let d1 = (iv - t1_ns).abs();
            let d2 = (iv - t2_ns).abs();
            if d1.min(d2) > tol_ns || d1 == d2 {
                Symbol::Unknown
            } else if d1 < d2 {
                Symbol::T1
            } else {
                Symbol::T2
            }
        })
        .collect())
}

/// A matched beacon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeaconDetection {
    /// True time of the first packet's rise — the alignment instant.
    pub rise_true_time: TrueTime,
    /// Sample index of that rise in the source trace.
    pub rise_sample_index: usize,
    /// Packet count of the matched beacon.
    pub matched_length: usize,
    /// Correlation score; equals `matched_length - 1` on an exact match.
    pub correlation_score: i32,
}

/// Correlates `code` against `symbols` at window `w`.
fn window_score(symbols: &[Symbol], code: &BarkerCode, w: usize) -> i32 {
    code.symbols()
        .iter()
        .zip(&symbols[w..])
        .map(|(&c, s)| i32::from(c) * s.correlation_value())
        .sum()
}

/// Slides `code` over `symbols` and returns the first window scoring at
/// least `min_score`, together with that score.
pub fn match_symbols(symbols: &[Symbol], code: &BarkerCode, min_score: i32) -> Option<(usize, i32)> {
    if symbols.len() < code.len() || code.is_empty() {
        return None;
    }
    (0..=symbols.len() - code.len()).find_map(|w| {
        let score = window_score(symbols, code, w);
        (score >= min_score).then_some((w, score))
    })
}

/// Matches a beacon against detected rises, requiring an exact-score window.
///
/// Every detected rise is a candidate window start, so stray packets before
/// the beacon only shift the match, and the returned detection reports the
/// rise of the first packet of the matched window.
pub fn match_beacon(
    detections: &[PacketDetection],
    spec: &BeaconSpec,
    tol_ns: i64,
) -> Result<Option<BeaconDetection>, BeaconError> {
    let exact = spec.pattern().len() as i32;
    match_beacon_with(detections, spec, tol_ns, exact)
}

/// [`match_beacon`] with a configurable score threshold.
///
/// Thresholds below the pattern length accept windows with a few unknown
/// symbols, trading false-negative rate for false positives on noisy
/// channels.
pub fn match_beacon_with(
    detections: &[PacketDetection],
    spec: &BeaconSpec,
    tol_ns: i64,
    min_score: i32,
) -> Result<Option<BeaconDetection>, BeaconError> {
    let gaps = crate::channel::rise_intervals(detections);
    let symbols = symbolize(&gaps, spec.t1_ns, spec.t2_ns, tol_ns)?;
    Ok(match_symbols(&symbols, &spec.code(), min_score).map(|(w, score)| BeaconDetection {
        rise_true_time: detections[w].rise_true_time,
        rise_sample_index: detections[w].rise_sample_index,
        matched_length: spec.length,
        correlation_score: score,
    }))
}

/// Fraction of trials whose beacon was matched.
pub fn matching_rate(outcomes: &[bool]) -> Result<f64, BeaconError> {
    if outcomes.is_empty() {
        return Err(BeaconError::ZeroTrials);
    }
    Ok(outcomes.iter().filter(|&&m| m).count() as f64 / outcomes.len() as f64)
}
