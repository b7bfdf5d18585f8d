//! Cross-technology clock synchronization between a WiFi-role sender and an
//! RSSI-sensing ZigBee-role receiver, as a deterministic simulation library.
//!
//! The receiver cannot decode WiFi frames; the only shared observable is
//! packet energy. Synchronization therefore happens in three phases:
//!
//! 1. **Alignment** — the sender emits a beacon whose packet *intervals*
//!    follow a Barker code ([`beacon`]). The receiver matches the pattern in
//!    its RSSI samples and both sides agree on the first packet's rise as a
//!    common reference instant.
//! 2. **Timestamp transfer** — the sender conveys its clock reading through
//!    packet timing or packet energy ([`codec`]).
//! 3. **Calibration** — the receiver pairs transferred sender stamps with its
//!    own stamps of the alignment instants and fits offset and skew by linear
//!    regression ([`sync`]).
//!
//! [`clock`] and [`channel`] provide the ground-truth substrate: linear
//! device clocks over integer nanoseconds, and RSSI traces rendered from
//! packet schedules. [`experiment`] adds a seeded Monte Carlo harness whose
//! outputs are byte-reproducible given a config and seed.

pub mod beacon;
pub mod channel;
pub mod clock;
pub mod codec;
pub mod experiment;
pub mod seeds;
pub mod sync;
pub mod time;

pub use beacon::{
    beacon_schedule, match_beacon, matching_rate, pattern_of, symbolize, BarkerCode,
    BeaconDetection, BeaconSpec, Symbol, Variant,
};
pub use channel::{
    apply_tx_jitter, detect_packets, render_trace, rise_intervals, DetectorConfig,
    InterferenceModel, NoiseModel, PacketDetection, PacketEvent, PacketShape, RssiTrace,
};
pub use clock::{read_local, stamp_event, true_of_local, ClockParams, JitterModel};
pub use codec::{
    ber, delta_decode, delta_encode, digits_to_timestamp, energy_decode, energy_encode,
    temporal_decode, temporal_encode, timestamp_to_digits, CodecError, DecodeResult,
    EnergyParams, TemporalParams, Timestamp64,
};
pub use time::{LocalTime, TrueTime};
