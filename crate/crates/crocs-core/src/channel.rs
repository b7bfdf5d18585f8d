//! The cross-technology channel: packet schedules rendered into RSSI traces.
//!
//! The receiver cannot demodulate the sender's frames; all it sees is
//! received signal strength sampled at a fixed rate (6 kHz by default, the
//! practical ceiling of 802.15.4-class radios). This module turns a packet
//! schedule into such a trace and recovers packet rises from it.
//!
//! Power combines in the linear milliwatt domain and is only then converted
//! to dBm, so two overlapping equal-power packets read ~3 dB hotter than one.
//! Gaussian measurement noise (`sigma_db`) perturbs each sample in the dB
//! domain, and an optional Poisson process injects foreign interference
//! bursts.
//!
//! Detection runs a running-baseline threshold: a sample more than
//! `margin_db` above an exponential moving average of the quiet floor opens a
//! candidate rise, confirmed once `min_high_samples` consecutive samples stay
//! high. The baseline freezes while samples are high so a long packet cannot
//! absorb itself into the floor.

use std::io::{self, BufRead, Write};

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Uniform};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::JitterSampler;
use crate::seeds;
use crate::time::TrueTime;

/// Default RSSI sampling period: 6 kHz, the fastest rate the reference
/// ZigBee-class hardware sustains.
pub const DEFAULT_SAMPLE_PERIOD_NS: i64 = 166_667;

/// Converts dBm to linear milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts linear milliwatts to dBm.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Duration and power shared by every packet a sender emits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketShape {
    /// On-air time of one packet, nanoseconds.
    pub duration_ns: i64,
    /// Transmit power as seen at the receiver, dBm.
    pub power_dbm: f64,
}

/// One packet on the air: a rectangular burst of RF energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketEvent {
    /// True time of the leading edge.
    pub start: TrueTime,
    /// On-air duration, nanoseconds.
    pub duration_ns: i64,
    /// Received power while on air, dBm.
    pub power_dbm: f64,
}

impl PacketEvent {
    pub fn new(start: TrueTime, shape: PacketShape) -> Self {
        PacketEvent { start, duration_ns: shape.duration_ns, power_dbm: shape.power_dbm }
    }

    /// True time of the trailing edge.
    pub fn end(&self) -> TrueTime {
        self.start.offset(self.duration_ns)
    }
}

/// Receiver-side noise: a flat thermal floor plus per-sample Gaussian
/// perturbation in the dB domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Quiet-channel power, dBm.
    pub floor_dbm: f64,
    /// Standard deviation of the per-sample dB perturbation. Zero disables it.
    pub sigma_db: f64,
    /// Base seed for the perturbation stream.
    pub seed: u64,
}

impl NoiseModel {
    /// A noiseless channel with the given floor.
    pub fn quiet(floor_dbm: f64) -> Self {
        NoiseModel { floor_dbm, sigma_db: 0.0, seed: 0 }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::quiet(-95.0)
    }
}

/// Foreign traffic: bursts arriving as a Poisson process, with duration and
/// power each drawn uniformly from an inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceModel {
    /// Mean arrival rate in bursts per second. Zero disables interference.
    pub mean_rate_hz: f64,
    /// `[low, high]` burst duration range, nanoseconds.
    pub duration_ns: [i64; 2],
    /// `[low, high]` burst power range, dBm.
    pub power_dbm: [f64; 2],
    /// Base seed for the arrival stream.
    pub seed: u64,
}

impl InterferenceModel {
    /// No interference at all.
    pub fn none() -> Self {
        InterferenceModel { mean_rate_hz: 0.0, duration_ns: [0, 0], power_dbm: [0.0, 0.0], seed: 0 }
    }

    /// The bursts this model emits inside `[start, end)`, in arrival order.
    pub fn bursts(&self, start: TrueTime, end: TrueTime) -> Vec<PacketEvent> {
        if self.mean_rate_hz <= 0.0 || end <= start {
            return Vec::new();
        }
        let mut rng: ChaCha8Rng = seeds::stream(self.seed, &[]);
        let gap = Exp::new(self.mean_rate_hz / 1e9).expect("positive rate");
        let dur = Uniform::new_inclusive(self.duration_ns[0], self.duration_ns[1])
            .expect("duration range low <= high");
        let pow = Uniform::new_inclusive(self.power_dbm[0], self.power_dbm[1])
            .expect("power range low <= high");
        let mut out = Vec::new();
        let mut t = start.as_ns() as f64;
        loop {
            t += gap.sample(&mut rng);
            if t >= end.as_ns() as f64 {
                return out;
            }
            out.push(PacketEvent {
                start: TrueTime::from_ns(t.round_ties_even() as i64),
                duration_ns: dur.sample(&mut rng),
                power_dbm: pow.sample(&mut rng),
            });
        }
    }
}

impl Default for InterferenceModel {
    fn default() -> Self {
        InterferenceModel::none()
    }
}

/// An RSSI capture: regularly spaced power samples in dBm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssiTrace {
    /// True time of sample 0.
    pub start: TrueTime,
    /// Spacing between samples, nanoseconds.
    pub sample_period_ns: i64,
    /// Power readings, dBm.
    pub samples: Vec<f64>,
}

impl RssiTrace {
    /// True time of sample `index`.
    pub fn time_of(&self, index: usize) -> TrueTime {
        self.start.offset(index as i64 * self.sample_period_ns)
    }

    /// True time one past the last sample.
    pub fn end(&self) -> TrueTime {
        self.time_of(self.samples.len())
    }

    /// Indices of the samples falling in `[t0, t1)`, clamped to the trace.
    pub fn index_range(&self, t0: TrueTime, t1: TrueTime) -> (usize, usize) {
        let lo = ceil_div(t0.since(self.start).max(0), self.sample_period_ns) as usize;
        let hi = ceil_div(t1.since(self.start).max(0), self.sample_period_ns) as usize;
        (lo.min(self.samples.len()), hi.min(self.samples.len()))
    }

    /// The samples falling in `[t0, t1)`.
    pub fn samples_between(&self, t0: TrueTime, t1: TrueTime) -> &[f64] {
        let (lo, hi) = self.index_range(t0, t1);
        &self.samples[lo..hi]
    }

    /// Writes the trace as CSV with header `sample_index,dbm`.
    ///
    /// Values use Rust's shortest round-trip float formatting, so a
    /// re-imported trace compares bit-equal.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "sample_index,dbm")?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(w, "{i},{s}")?;
        }
        Ok(())
    }

    /// Reads a trace previously written by [`write_csv`](Self::write_csv).
    ///
    /// The CSV stores only sample values; the caller supplies the time base.
    pub fn read_csv<R: BufRead>(
        r: R,
        start: TrueTime,
        sample_period_ns: i64,
    ) -> Result<Self, TraceCsvError> {
        let mut lines = r.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "sample_index,dbm" => {}
            Some(Ok(h)) => return Err(TraceCsvError::Header(h)),
            Some(Err(e)) => return Err(TraceCsvError::Io(e)),
            None => return Err(TraceCsvError::Header(String::new())),
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(TraceCsvError::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.splitn(2, ',');
            let bad = || TraceCsvError::Row { line: lineno + 2, text: line.clone() };
            let idx: usize = fields.next().unwrap().trim().parse().map_err(|_| bad())?;
            let dbm: f64 = fields.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            if idx != samples.len() {
                return Err(TraceCsvError::Gap { line: lineno + 2, expected: samples.len(), got: idx });
            }
            samples.push(dbm);
        }
        Ok(RssiTrace { start, sample_period_ns, samples })
    }
}

/// Failures while importing an RSSI trace from CSV.
#[derive(Debug, Error)]
pub enum TraceCsvError {
    #[error("i/o error reading trace: {0}")]
    Io(#[source] io::Error),
    #[error("expected header 'sample_index,dbm', found {0:?}")]
    Header(String),
    #[error("malformed row at line {line}: {text:?}")]
    Row { line: usize, text: String },
    #[error("non-consecutive sample index at line {line}: expected {expected}, got {got}")]
    Gap { line: usize, expected: usize, got: usize },
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    (a + b - 1).div_euclid(b)
}

/// Renders a packet schedule plus noise and interference into an RSSI trace
/// covering `[span_start, span_end)`.
///
/// Rendering sums power in milliwatts, converts each sample to dBm, then adds
/// the dB-domain noise perturbation. The schedule is sorted internally so the
/// result does not depend on the caller's packet order, and the whole render
/// is deterministic given the model seeds.
pub fn render_trace(
    schedule: &[PacketEvent],
    noise: &NoiseModel,
    interference: &InterferenceModel,
    sample_period_ns: i64,
    span_start: TrueTime,
    span_end: TrueTime,
) -> RssiTrace {
    assert!(sample_period_ns > 0, "sample period must be positive");
    let span = span_end.since(span_start).max(0);
    let n = ceil_div(span, sample_period_ns) as usize;
    let mut mw = vec![dbm_to_mw(noise.floor_dbm); n];

    let mut active: Vec<PacketEvent> = schedule.to_vec();
    active.extend(interference.bursts(span_start, span_end));
    // Fixed accumulation order makes rendering invariant to schedule order
    // despite floating-point addition being non-associative.
    active.sort_by(|a, b| {
        (a.start, a.duration_ns)
            .cmp(&(b.start, b.duration_ns))
            .then(a.power_dbm.total_cmp(&b.power_dbm))
    });

    for pkt in &active {
        if pkt.duration_ns <= 0 {
            continue;
        }
        let lo = ceil_div((pkt.start.since(span_start)).max(0), sample_period_ns) as usize;
        let hi = (ceil_div((pkt.end().since(span_start)).max(0), sample_period_ns) as usize).min(n);
        let p = dbm_to_mw(pkt.power_dbm);
        for s in &mut mw[lo.min(n)..hi] {
            *s += p;
        }
    }

    let mut samples: Vec<f64> = mw.into_iter().map(mw_to_dbm).collect();
    if noise.sigma_db > 0.0 {
        let mut rng = seeds::stream(noise.seed, &[]);
        let dist = Normal::new(0.0, noise.sigma_db).expect("finite sigma");
        for s in &mut samples {
            *s += dist.sample(&mut rng);
        }
    }
    RssiTrace { start: span_start, sample_period_ns, samples }
}

/// How a detected rise is mapped back to a true-time instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiseTiming {
    /// The time of the first high sample. Biased late by up to one sample
    /// period, which is the honest granularity of the capture.
    #[default]
    SampleIndex,
    /// Half a period before the first high sample: the midpoint of the
    /// interval the true edge must lie in. Removes the mean bias without
    /// pretending to sub-sample knowledge of the edge.
    Midpoint,
}

/// Threshold-detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// How far above the running baseline a sample must sit to count as high.
    pub margin_db: f64,
    /// Consecutive high samples required to confirm a rise.
    pub min_high_samples: usize,
    /// EMA weight for baseline updates on quiet samples.
    pub baseline_alpha: f64,
    /// Rise timestamp policy.
    pub rise_timing: RiseTiming,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            margin_db: 10.0,
            min_high_samples: 3,
            baseline_alpha: 0.01,
            rise_timing: RiseTiming::SampleIndex,
        }
    }
}

/// One confirmed packet rise in a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketDetection {
    /// Index of the first high sample.
    pub rise_sample_index: usize,
    /// True time assigned to the rise (see [`RiseTiming`]).
    pub rise_true_time: TrueTime,
    /// Mean dBm over the contiguous high run.
    pub mean_power_dbm: f64,
}

/// Finds packet rises with the default baseline EMA weight and rise timing.
pub fn detect_packets(
    trace: &RssiTrace,
    margin_db: f64,
    min_high_samples: usize,
) -> Vec<PacketDetection> {
    detect_packets_with(
        trace,
        &DetectorConfig { margin_db, min_high_samples, ..DetectorConfig::default() },
    )
}

/// Finds packet rises.
///
/// A rise opens at the first sample exceeding `baseline + margin_db` and is
/// confirmed if at least `min_high_samples` consecutive samples stay above
/// that (frozen) threshold. The baseline EMA only ever sees quiet samples;
/// runs shorter than the confirmation count are discarded as spikes.
pub fn detect_packets_with(trace: &RssiTrace, cfg: &DetectorConfig) -> Vec<PacketDetection> {
    assert!(cfg.margin_db > 0.0, "margin must be positive");
    assert!(cfg.min_high_samples >= 1, "need at least one high sample");
    let samples = &trace.samples;
    let mut out = Vec::new();
    let Some(&first) = samples.first() else {
        return out;
    };
    let mut baseline = first;
    let mut i = 0;
    while i < samples.len() {
        if samples[i] > baseline + cfg.margin_db {
            let mut j = i;
            while j < samples.len() && samples[j] > baseline + cfg.margin_db {
                j += 1;
            }
            if j - i >= cfg.min_high_samples {
                let mean = samples[i..j].iter().sum::<f64>() / (j - i) as f64;
                let rise_true_time = match cfg.rise_timing {
                    RiseTiming::SampleIndex => trace.time_of(i),
                    RiseTiming::Midpoint => trace.time_of(i).offset(-trace.sample_period_ns / 2),
                };
                out.push(PacketDetection { rise_sample_index: i, rise_true_time, mean_power_dbm: mean });
            }
            i = j;
        } else {
            baseline = (1.0 - cfg.baseline_alpha) * baseline + cfg.baseline_alpha * samples[i];
            i += 1;
        }
    }
    out
}

/// Rise-to-rise spacings between consecutive detections, nanoseconds.
///
/// Fewer than two detections yield no intervals.
pub fn rise_intervals(detections: &[PacketDetection]) -> Vec<i64> {
    detections.windows(2).map(|w| w[1].rise_true_time.since(w[0].rise_true_time)).collect()
}

/// Applies transmit-side scheduling delay to a packet schedule.
///
/// Each packet is emitted one jitter draw later than its nominal gap after
/// the *previous actual* emission, so delays accumulate along the schedule
/// and every measured interval is inflated by one fresh draw. That matches
/// the observed behavior of commodity WiFi senders, whose inter-packet gaps
/// run consistently long (~0.4 ms on the reference hardware) rather than
/// averaging out.
pub fn apply_tx_jitter(schedule: &[PacketEvent], jitter: &mut JitterSampler) -> Vec<PacketEvent> {
    let mut out = Vec::with_capacity(schedule.len());
    let mut shift = 0i64;
    for pkt in schedule {
        shift += jitter.sample();
        out.push(PacketEvent { start: pkt.start.offset(shift), ..*pkt });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::JitterModel;
    use proptest::prelude::*;

    fn quiet() -> NoiseModel {
        NoiseModel::quiet(-95.0)
    }

    fn span(ms: i64) -> (TrueTime, TrueTime) {
        (TrueTime::from_ns(0), TrueTime::from_ns(ms * 1_000_000))
    }

    #[test]
    fn empty_schedule_renders_constant_floor() {
        let (t0, t1) = span(10);
        let trace =
            render_trace(&[], &quiet(), &InterferenceModel::none(), DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        assert_eq!(trace.samples.len(), 60);
        assert!(trace.samples.iter().all(|&s| s == -95.0));
    }

    #[test]
    fn single_packet_power_follows_mw_sum() {
        // Oracle: 10*log10(10^-4 + 10^-9.5) = -39.99998626642433 dBm.
        let (t0, t1) = span(10);
        let pkt = PacketEvent { start: t0, duration_ns: t1.as_ns(), power_dbm: -40.0 };
        let trace =
            render_trace(&[pkt], &quiet(), &InterferenceModel::none(), DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        for &s in &trace.samples {
            assert!((s - -39.99998626642433).abs() < 1e-9, "got {s}");
            assert!((s - -40.0).abs() < 0.01, "floor must be negligible under a -40 dBm packet");
        }
    }

    #[test]
    fn overlapping_equal_packets_add_three_db() {
        // Oracle: 10*log10(2 * 10^-4) = -36.98970004336019 dBm, +3.0103 dB.
        let (t0, t1) = span(10);
        let pkt = PacketEvent { start: t0, duration_ns: t1.as_ns(), power_dbm: -40.0 };
        let floorless = NoiseModel::quiet(-320.0); // negligible floor
        let trace = render_trace(
            &[pkt, pkt],
            &floorless,
            &InterferenceModel::none(),
            DEFAULT_SAMPLE_PERIOD_NS,
            t0,
            t1,
        );
        for &s in &trace.samples {
            assert!((s - -36.98970004336019).abs() < 1e-9, "got {s}");
        }
    }

    #[test]
    fn render_is_schedule_order_invariant() {
        let (t0, t1) = span(50);
        let mk = |ms: i64, p: f64| PacketEvent {
            start: TrueTime::from_ns(ms * 1_000_000),
            duration_ns: 1_000_000,
            power_dbm: p,
        };
        let a = [mk(5, -40.0), mk(12, -45.0), mk(12, -50.0), mk(30, -42.0)];
        let b = [mk(12, -50.0), mk(30, -42.0), mk(5, -40.0), mk(12, -45.0)];
        let noise = NoiseModel { floor_dbm: -95.0, sigma_db: 2.0, seed: 11 };
        let ta = render_trace(&a, &noise, &InterferenceModel::none(), DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        let tb = render_trace(&b, &noise, &InterferenceModel::none(), DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        assert_eq!(ta.samples, tb.samples);
    }

    #[test]
    fn render_detect_round_trip_recovers_rises() {
        let (t0, t1) = span(100);
        let starts = [10i64, 40, 75];
        let schedule: Vec<PacketEvent> = starts
            .iter()
            .map(|&ms| PacketEvent {
                start: TrueTime::from_ns(ms * 1_000_000 + 37),
                duration_ns: 1_000_000,
                power_dbm: -40.0,
            })
            .collect();
        let trace = render_trace(
            &schedule,
            &quiet(),
            &InterferenceModel::none(),
            DEFAULT_SAMPLE_PERIOD_NS,
            t0,
            t1,
        );
        let dets = detect_packets(&trace, 10.0, 3);
        assert_eq!(dets.len(), 3);
        for (det, pkt) in dets.iter().zip(&schedule) {
            let lag = det.rise_true_time.since(pkt.start);
            assert!(
                (0..DEFAULT_SAMPLE_PERIOD_NS).contains(&lag),
                "rise must land within one sample period after the edge, lag {lag}"
            );
            assert!((det.mean_power_dbm - -40.0).abs() < 0.01);
        }
        let gaps = rise_intervals(&dets);
        assert_eq!(gaps.len(), 2);
        for (gap, want_ms) in gaps.iter().zip([30i64, 35]) {
            let err = gap - want_ms * 1_000_000;
            assert!(err.abs() < DEFAULT_SAMPLE_PERIOD_NS, "interval error {err} ns");
        }
    }

    #[test]
    fn weak_packet_below_margin_is_not_detected() {
        let (t0, t1) = span(20);
        let pkt = PacketEvent {
            start: TrueTime::from_ns(5_000_000),
            duration_ns: 2_000_000,
            power_dbm: -90.0, // only 5 dB over the floor
        };
        let trace =
            render_trace(&[pkt], &quiet(), &InterferenceModel::none(), DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        assert!(detect_packets(&trace, 10.0, 3).is_empty());
    }

    #[test]
    fn short_spike_needs_min_high_samples() {
        let mut samples = vec![-95.0; 60];
        samples[30] = -40.0;
        let trace = RssiTrace { start: TrueTime::from_ns(0), sample_period_ns: 166_667, samples };
        assert!(detect_packets(&trace, 10.0, 3).is_empty(), "1-sample spike must not confirm");
        assert_eq!(detect_packets(&trace, 10.0, 1).len(), 1);
    }

    #[test]
    fn long_packet_stays_one_detection() {
        // The baseline must freeze on high samples, so even a 50 ms packet is
        // reported once and the floor estimate survives it.
        let (t0, t1) = span(100);
        let pkt =
            PacketEvent { start: TrueTime::from_ns(20_000_000), duration_ns: 50_000_000, power_dbm: -40.0 };
        let trace =
            render_trace(&[pkt], &quiet(), &InterferenceModel::none(), DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        let dets = detect_packets(&trace, 10.0, 3);
        assert_eq!(dets.len(), 1);
        assert_eq!(rise_intervals(&dets), Vec::<i64>::new());
    }

    #[test]
    fn renders_are_deterministic_per_seed() {
        let (t0, t1) = span(30);
        let noise = NoiseModel { floor_dbm: -95.0, sigma_db: 3.0, seed: 5 };
        let other = NoiseModel { seed: 6, ..noise };
        let interference = InterferenceModel {
            mean_rate_hz: 200.0,
            duration_ns: [200_000, 900_000],
            power_dbm: [-70.0, -45.0],
            seed: 21,
        };
        let a = render_trace(&[], &noise, &interference, DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        let b = render_trace(&[], &noise, &interference, DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        let c = render_trace(&[], &other, &interference, DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        assert_eq!(a.samples, b.samples);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn interference_bursts_arrive_at_the_configured_rate() {
        let model = InterferenceModel {
            mean_rate_hz: 100.0,
            duration_ns: [500_000, 500_000],
            power_dbm: [-50.0, -50.0],
            seed: 33,
        };
        let bursts = model.bursts(TrueTime::from_ns(0), TrueTime::from_ns(10_000_000_000));
        // Poisson(1000): 5 sigma is ~158.
        assert!(
            (bursts.len() as i64 - 1000).abs() < 160,
            "expected ~1000 bursts, got {}",
            bursts.len()
        );
        assert!(bursts.windows(2).all(|w| w[1].start >= w[0].start));
    }

    #[test]
    fn zero_rate_means_no_interference() {
        assert!(InterferenceModel::none()
            .bursts(TrueTime::from_ns(0), TrueTime::from_ns(1_000_000_000))
            .is_empty());
    }

    #[test]
    fn fixed_tx_jitter_inflates_every_interval() {
        let shape = PacketShape { duration_ns: 1_000_000, power_dbm: -40.0 };
        let schedule: Vec<PacketEvent> = (0..5)
            .map(|k| PacketEvent::new(TrueTime::from_ns(k * 15_000_000), shape))
            .collect();
        let mut sampler = JitterModel::new(400_000, 0, 0).sampler();
        let delayed = apply_tx_jitter(&schedule, &mut sampler);
        assert_eq!(delayed[0].start.as_ns(), 400_000);
        for w in delayed.windows(2) {
            assert_eq!(w[1].start.since(w[0].start), 15_400_000);
        }
    }

    #[test]
    fn random_tx_jitter_inflates_intervals_by_the_mean() {
        let shape = PacketShape { duration_ns: 1_000_000, power_dbm: -40.0 };
        let schedule: Vec<PacketEvent> = (0..2_001)
            .map(|k| PacketEvent::new(TrueTime::from_ns(k * 15_000_000), shape))
            .collect();
        let mut sampler = JitterModel::new(400_000, 100_000, 17).sampler();
        let delayed = apply_tx_jitter(&schedule, &mut sampler);
        let mean_excess: f64 = delayed
            .windows(2)
            .map(|w| (w[1].start.since(w[0].start) - 15_000_000) as f64)
            .sum::<f64>()
            / 2_000.0;
        // sigma/sqrt(n) ~ 2.2 us; allow a generous band.
        assert!((mean_excess - 400_000.0).abs() < 12_000.0, "mean excess {mean_excess} ns");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let (t0, t1) = span(5);
        let noise = NoiseModel { floor_dbm: -95.0, sigma_db: 2.5, seed: 9 };
        let trace =
            render_trace(&[], &noise, &InterferenceModel::none(), DEFAULT_SAMPLE_PERIOD_NS, t0, t1);
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let back = RssiTrace::read_csv(buf.as_slice(), t0, DEFAULT_SAMPLE_PERIOD_NS).unwrap();
        assert_eq!(back, trace);
    }

    #[test]
    fn csv_import_rejects_bad_input() {
        let t0 = TrueTime::from_ns(0);
        let header = RssiTrace::read_csv("nope\n0,-95.0\n".as_bytes(), t0, 166_667);
        assert!(matches!(header, Err(TraceCsvError::Header(_))));
        let gap = RssiTrace::read_csv("sample_index,dbm\n0,-95.0\n2,-94.0\n".as_bytes(), t0, 166_667);
        assert!(matches!(gap, Err(TraceCsvError::Gap { expected: 1, got: 2, .. })));
        let row = RssiTrace::read_csv("sample_index,dbm\nx,y\n".as_bytes(), t0, 166_667);
        assert!(matches!(row, Err(TraceCsvError::Row { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn rise_lands_within_one_period(offset_ns in 0i64..10_000_000) {
            let (t0, t1) = span(30);
            let pkt = PacketEvent {
                start: TrueTime::from_ns(5_000_000 + offset_ns),
                duration_ns: 1_500_000,
                power_dbm: -40.0,
            };
            let trace = render_trace(
                &[pkt],
                &quiet(),
                &InterferenceModel::none(),
                DEFAULT_SAMPLE_PERIOD_NS,
                t0,
                t1,
            );
            let dets = detect_packets(&trace, 10.0, 3);
            prop_assert_eq!(dets.len(), 1);
            let lag = dets[0].rise_true_time.since(pkt.start);
            prop_assert!((0..DEFAULT_SAMPLE_PERIOD_NS).contains(&lag), "lag {}", lag);
        }
    }
}
