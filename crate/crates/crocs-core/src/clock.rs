//! Device clock models.
//!
//! Each device owns a linear clock over ground-truth time:
//!
//! ```text
//! local(t) = offset_ns + round(skew * (t - anchor))
//! ```
//!
//! with round-half-even rounding to integer nanoseconds. Skew is a positive
//! ratio near 1.0; the model extrapolates both before and after the anchor.
//! Real crystals drift tens of ppm, but badly trimmed pairs can sit percents
//! apart, so nothing here assumes the ratio is small.
//!
//! Timestamping an observed event goes through [`stamp_event`], which adds a
//! non-negative jitter delay drawn from a [`JitterModel`] before reading the
//! clock. That delay is how the receive chain's detection latency enters
//! recorded timestamps; transmit-side scheduling delay is modeled separately
//! in [`channel::apply_tx_jitter`](crate::channel::apply_tx_jitter).

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::seeds;
use crate::time::{LocalTime, TrueTime};

/// A linear local-clock model: `local(t) = offset_ns + skew * (t - anchor)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockParams {
    /// Local reading at the anchor instant, nanoseconds.
    pub offset_ns: i64,
    /// Local-seconds per true-second ratio. Must be positive.
    pub skew: f64,
    /// True-time instant where the clock reads exactly `offset_ns`.
    pub anchor: TrueTime,
}

impl ClockParams {
    /// A clock that reads true time exactly.
    pub fn identity() -> Self {
        ClockParams { offset_ns: 0, skew: 1.0, anchor: TrueTime::from_ns(0) }
    }

    /// A clock with the given offset and skew, anchored at true zero.
    pub fn new(offset_ns: i64, skew: f64) -> Self {
        ClockParams { offset_ns, skew, anchor: TrueTime::from_ns(0) }
    }
}

impl Default for ClockParams {
    fn default() -> Self {
        ClockParams::identity()
    }
}

/// Reads the clock at true time `t`.
///
/// The fractional product is rounded half-to-even so that long schedules do
/// not accumulate a rounding bias in either direction.
pub fn read_local(clock: &ClockParams, t: TrueTime) -> LocalTime {
    debug_assert!(clock.skew > 0.0, "clock skew must be positive");
    let dt = t.since(clock.anchor) as f64;
    LocalTime::from_ns(clock.offset_ns + (clock.skew * dt).round_ties_even() as i64)
}

/// Inverts [`read_local`]: the true time at which the clock reads `local`.
///
/// Because both directions round to whole nanoseconds, a round trip may move
/// by at most one nanosecond.
pub fn true_of_local(clock: &ClockParams, local: LocalTime) -> TrueTime {
    debug_assert!(clock.skew > 0.0, "clock skew must be positive");
    let dl = (local.as_ns() - clock.offset_ns) as f64;
    clock.anchor.offset((dl / clock.skew).round_ties_even() as i64)
}

/// Non-negative timestamping delay between an event and the clock read that
/// records it.
///
/// Samples are drawn from a normal distribution truncated at zero by
/// resampling, so a stamp never precedes its event. `stddev_ns == 0`
/// degenerates to a fixed delay of `mean_ns`, and `(0, 0)` to an exact stamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JitterModel {
    /// Mean delay, nanoseconds. Must be non-negative.
    pub mean_ns: i64,
    /// Standard deviation of the underlying normal, nanoseconds.
    pub stddev_ns: i64,
    /// Base seed for this model's sample stream.
    pub seed: u64,
}

impl JitterModel {
    /// A model that never delays; stamping becomes exact.
    pub fn none() -> Self {
        JitterModel { mean_ns: 0, stddev_ns: 0, seed: 0 }
    }

    pub fn new(mean_ns: i64, stddev_ns: i64, seed: u64) -> Self {
        JitterModel { mean_ns, stddev_ns, seed }
    }

    /// A sampler drawing from this model's own seed.
    pub fn sampler(&self) -> JitterSampler {
        self.sampler_for_stream(&[])
    }

    /// A sampler on a tagged sub-stream, for components that need several
    /// independent streams from one configured model.
    pub fn sampler_for_stream(&self, tags: &[u64]) -> JitterSampler {
        JitterSampler {
            mean_ns: self.mean_ns,
            dist: if self.stddev_ns > 0 {
                Some(Normal::new(self.mean_ns as f64, self.stddev_ns as f64).expect("finite std dev"))
            } else {
                None
            },
            rng: seeds::stream(self.seed, tags),
        }
    }
}

impl Default for JitterModel {
    fn default() -> Self {
        JitterModel::none()
    }
}

/// Draws successive delays from a [`JitterModel`].
#[derive(Debug, Clone)]
pub struct JitterSampler {
    mean_ns: i64,
    dist: Option<Normal<f64>>,
    rng: ChaCha8Rng,
}

impl JitterSampler {
    /// The next delay in nanoseconds; always `>= 0`.
    pub fn sample(&mut self) -> i64 {
        match self.dist {
            None => self.mean_ns.max(0),
            Some(dist) => loop {
                let v = dist.sample(&mut self.rng);
                if v >= 0.0 {
                    return v.round_ties_even() as i64;
                }
            },
        }
    }
}

/// Records the local timestamp a device assigns to an event at true time `t`:
/// the clock read at `t` plus one jitter delay.
pub fn stamp_event(clock: &ClockParams, jitter: &mut JitterSampler, t: TrueTime) -> LocalTime {
    read_local(clock, t.offset(jitter.sample()))
}
