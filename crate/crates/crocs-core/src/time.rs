//! Time axes used throughout the simulator.
//!
//! Everything is integer nanoseconds. Two axes exist and must not be mixed
//! silently:
//!
//! * [`TrueTime`] — the simulation's ground-truth axis. Packet emissions,
//!   RSSI samples, and interference bursts all live here.
//! * [`LocalTime`] — what a device's own clock reads. Each device maps
//!   true time to local time through its [`ClockParams`](crate::clock::ClockParams).
//!
//! Both are thin newtypes over `i64` so that a true timestamp cannot be
//! handed to an API expecting a local one without an explicit conversion.

use serde::{Deserialize, Serialize};

/// A point on the simulation's ground-truth time axis, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrueTime(pub i64);

impl TrueTime {
    /// Wraps a nanosecond count as a true-time instant.
    pub const fn from_ns(ns: i64) -> Self {
        TrueTime(ns)
    }

    /// The instant as nanoseconds.
    pub const fn as_ns(self) -> i64 {
        self.0
    }

    /// This instant shifted by a signed nanosecond amount.
    pub const fn offset(self, ns: i64) -> Self {
        TrueTime(self.0 + ns)
    }

    /// Signed distance `self - earlier` in nanoseconds.
    pub const fn since(self, earlier: TrueTime) -> i64 {
        self.0 - earlier.0
    }
}

/// A reading of some device's local clock, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalTime(pub i64);

impl LocalTime {
    /// Wraps a nanosecond count as a local-clock reading.
    pub const fn from_ns(ns: i64) -> Self {
        LocalTime(ns)
    }

    /// The reading as nanoseconds.
    pub const fn as_ns(self) -> i64 {
        self.0
    }

    /// This reading shifted by a signed nanosecond amount.
    pub const fn offset(self, ns: i64) -> Self {
        LocalTime(self.0 + ns)
    }

    /// Signed distance `self - earlier` in nanoseconds.
    pub const fn since(self, earlier: LocalTime) -> i64 {
        self.0 - earlier.0
    }
}

pub(crate) const MS: i64 = 1_000_000;
pub(crate) const US: i64 = 1_000;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_signed() {
        let a = TrueTime::from_ns(5);
        let b = TrueTime::from_ns(12);
        assert_eq!(b.since(a), 7);
        assert_eq!(a.since(b), -7);
        assert_eq!(a.offset(-10).as_ns(), -5);
    }
}
