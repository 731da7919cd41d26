//! Packetized web-traffic synthesis.
//!
//! Files arrive as a Poisson stream with mean gap `mean_file_interarrival`;
//! each file draws a positive-Cauchy size, is cut into 1500-byte packets
//! (ceiling, minimum one), and spreads those packets as a second Poisson
//! stream whose mean gap is drawn once per file — log-uniformly over three
//! decades by default. The superposition of all per-file packet streams is
//! the traffic trace. Every run is a pure function of the configuration,
//! including its seed: each file packetizes under its own child stream
//! derived from `(seed, file index)`, so the result does not depend on
//! evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{ExponentialLaw, LogUniformScale, PositiveCauchy, UnitUniform};
use crate::error::{Error, Result};
use crate::pulse_model::{deposit_rect, SampledSignal};

/// Per-file mean inter-packet gap law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterPacketLaw {
    /// `gap = base · 10^ε` with ε uniform on `[0, decades]`.
    LogUniform { base: f64, decades: f64 },
    /// Every file uses the same mean gap.
    Fixed { gap: f64 },
}

impl Default for InterPacketLaw {
    fn default() -> Self {
        InterPacketLaw::LogUniform {
            base: 11.6e-6,
            decades: 3.0,
        }
    }
}

impl InterPacketLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            InterPacketLaw::LogUniform { base, decades } => {
                LogUniformScale::new(base, decades).map(|_| ())
            }
            InterPacketLaw::Fixed { gap } => {
                if gap.is_finite() && gap > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "fixed gap must be positive, got {gap}"
                    )))
                }
            }
        }
    }

    fn sample(&self, u: f64) -> Result<f64> {
        match *self {
            InterPacketLaw::LogUniform { base, decades } => {
                LogUniformScale::new(base, decades)?.sample(u)
            }
            InterPacketLaw::Fixed { gap } => Ok(gap),
        }
    }

    /// Largest mean gap the law can produce (τ_p,max).
    pub fn max_gap(&self) -> f64 {
        match *self {
            InterPacketLaw::LogUniform { base, decades } => base * 10f64.powf(decades),
            InterPacketLaw::Fixed { gap } => gap,
        }
    }

    /// Smallest mean gap the law can produce (τ_p,min).
    pub fn min_gap(&self) -> f64 {
        match *self {
            InterPacketLaw::LogUniform { base, .. } => base,
            InterPacketLaw::Fixed { gap } => gap,
        }
    }
}

/// Intra-file packet spreading: exponential gaps (Poisson stream) or
/// deterministic gaps of the same mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spreading {
    #[default]
    Poisson,
    Fixed,
}

/// Granularity at which the inter-packet gap mean is drawn from
/// [`InterPacketLaw`].
///
/// `PerFile` draws τ_p once per file (a file's gaps share one mean, tied to
/// where that file comes from); `PerPacket` redraws the mean for every gap.
/// The two give the same gap histogram but different spectra: per-file
/// keeps the rare fast-τ_p/huge-file bursts that dominate the ensemble
/// PSD, while per-packet averages the gap law inside each file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapAssignment {
    #[default]
    PerFile,
    PerPacket,
}

/// Per-event weight carried by the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// One unit per packet.
    #[default]
    Packets,
    /// `packet_size` units per packet.
    Bytes,
}

fn default_file_size_scale() -> f64 {
    4100.0
}
fn default_mean_file_interarrival() -> f64 {
    0.101
}
fn default_packet_size() -> f64 {
    1500.0
}
fn default_max_packets() -> u64 {
    100_000_000
}

/// Full description of a traffic run. Serializes as the JSON config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficConfig {
    /// Cauchy scale of the file-size law, bytes (s).
    #[serde(default = "default_file_size_scale")]
    pub file_size_scale: f64,
    /// Mean file inter-arrival, seconds (τ_f).
    #[serde(default = "default_mean_file_interarrival")]
    pub mean_file_interarrival: f64,
    /// Packet size, bytes (p).
    #[serde(default = "default_packet_size")]
    pub packet_size: f64,
    #[serde(default)]
    pub interpacket_law: InterPacketLaw,
    #[serde(default)]
    pub packet_spreading: Spreading,
    #[serde(default)]
    pub gap_assignment: GapAssignment,
    /// Optional hard cap on drawn file sizes, bytes. The Cauchy size law has
    /// infinite mean, so uncapped runs can produce arbitrarily large files;
    /// `None` keeps the law exact and relies on `max_packets`.
    #[serde(default)]
    pub file_size_cap: Option<f64>,
    /// Observation window, seconds.
    pub horizon: f64,
    #[serde(default)]
    pub seed: u64,
    /// Abort threshold on materialized packets.
    #[serde(default = "default_max_packets")]
    pub max_packets: u64,
    /// Seconds of file arrivals generated before t = 0 so that in-flight
    /// files exist at the start of the window.
    #[serde(default)]
    pub warmup: f64,
    #[serde(default)]
    pub weight_mode: WeightMode,
}

impl TrafficConfig {
    /// Canonical web-traffic defaults over the given horizon.
    pub fn with_horizon(horizon: f64) -> Self {
        Self {
            file_size_scale: default_file_size_scale(),
            mean_file_interarrival: default_mean_file_interarrival(),
            packet_size: default_packet_size(),
            interpacket_law: InterPacketLaw::default(),
            packet_spreading: Spreading::default(),
            gap_assignment: GapAssignment::default(),
            file_size_cap: None,
            horizon,
            seed: 0,
            max_packets: default_max_packets(),
            warmup: 0.0,
            weight_mode: WeightMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("file_size_scale", self.file_size_scale),
            ("mean_file_interarrival", self.mean_file_interarrival),
            ("packet_size", self.packet_size),
            ("horizon", self.horizon),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        self.interpacket_law.validate()?;
        if let Some(cap) = self.file_size_cap {
            if !cap.is_finite() || cap <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "file_size_cap must be positive, got {cap}"
                )));
            }
        }
        if !self.warmup.is_finite() || self.warmup < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "warmup must be nonnegative, got {}",
                self.warmup
            )));
        }
        if self.max_packets == 0 {
            return Err(Error::InvalidParameter(
                "max_packets must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn event_weight(&self) -> f64 {
        match self.weight_mode {
            WeightMode::Packets => 1.0,
            WeightMode::Bytes => self.packet_size,
        }
    }
}

/// One requested file, packet count already resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FileRequest {
    /// Arrival time, seconds (negative during warmup).
    pub arrival: f64,
    /// Drawn size, bytes.
    pub size: f64,
    /// `max(1, ceil(size / packet_size))`.
    pub n_packets: u64,
    /// This file's mean inter-packet gap (τ_p), seconds.
    pub packet_gap_mean: f64,
}

/// Time-sorted packet events over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketTrace {
    timestamps: Vec<f64>,
    weight: f64,
    weights: Option<Vec<f64>>,
    horizon: f64,
}

impl PacketTrace {
    /// Uniform-weight trace. Timestamps must already be sorted and inside
    /// `[0, horizon]`.
    pub fn new(timestamps: Vec<f64>, weight: f64, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weight must be positive, got {weight}"
            )));
        }
        if !timestamps.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParameter(
                "timestamps must be nondecreasing".into(),
            ));
        }
        if timestamps.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
            return Err(Error::InvalidParameter(
                "timestamps must lie within [0, horizon]".into(),
            ));
        }
        Ok(Self {
            timestamps,
            weight,
            weights: None,
            horizon,
        })
    }

    /// Trace with per-event weights (used by imported traces).
    pub fn with_weights(timestamps: Vec<f64>, weights: Vec<f64>, horizon: f64) -> Result<Self> {
        if weights.len() != timestamps.len() {
            return Err(Error::InvalidParameter(
                "one weight per timestamp required".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite".into()));
        }
        let mut trace = Self::new(timestamps, 1.0, horizon)?;
        trace.weights = Some(weights);
        Ok(trace)
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Uniform event weight; meaningful when no per-event weights are set.
    pub fn uniform_weight(&self) -> f64 {
        self.weight
    }

    pub fn per_event_weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn weight_at(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => self.weight,
        }
    }

    /// Consecutive inter-event gaps.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.timestamps.windows(2).map(|w| w[1] - w[0])
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child stream for file `index` under the run seed.
fn file_stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

/// Draw the Poisson file arrivals with sizes and per-file gap means over
/// `[−warmup, horizon]`. Deterministic in `cfg.seed`.
pub fn generate_file_arrivals(cfg: &TrafficConfig) -> Result<Vec<FileRequest>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inter = ExponentialLaw::new(cfg.mean_file_interarrival)?;
    let sizes = PositiveCauchy::new(cfg.file_size_scale)?;

    let mut files = Vec::new();
    let mut t = -cfg.warmup;
    loop {
        t += inter.sample(rng.next_unit())?;
        if t >= cfg.horizon {
            break;
        }
        let mut size = sizes.sample(rng.next_unit())?;
        if let Some(cap) = cfg.file_size_cap {
            size = size.min(cap);
        }
        let n_packets = ((size / cfg.packet_size).ceil() as u64).max(1);
        let packet_gap_mean = cfg.interpacket_law.sample(rng.next_unit())?;
        files.push(FileRequest {
            arrival: t,
            size,
            n_packets,
            packet_gap_mean,
        });
    }
    Ok(files)
}

/// How one inter-packet gap is produced, resolved from the config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapModel {
    /// Gaps share the file's `packet_gap_mean`.
    PerFile { spreading: Spreading },
    /// Every gap redraws its mean from the law.
    PerPacket {
        spreading: Spreading,
        law: InterPacketLaw,
    },
}

impl GapModel {
    fn draw(&self, file: &FileRequest, rng: &mut impl UnitUniform) -> Result<f64> {
        match *self {
            GapModel::PerFile { spreading } => match spreading {
                Spreading::Poisson => {
                    ExponentialLaw::new(file.packet_gap_mean)?.sample(rng.next_unit())
                }
                Spreading::Fixed => Ok(file.packet_gap_mean),
            },
            GapModel::PerPacket { spreading, law } => {
                let mean = law.sample(rng.next_unit())?;
                match spreading {
                    Spreading::Poisson => ExponentialLaw::new(mean)?.sample(rng.next_unit()),
                    Spreading::Fixed => Ok(mean),
                }
            }
        }
    }
}

impl TrafficConfig {
    pub fn gap_model(&self) -> GapModel {
        match self.gap_assignment {
            GapAssignment::PerFile => GapModel::PerFile {
                spreading: self.packet_spreading,
            },
            GapAssignment::PerPacket => GapModel::PerPacket {
                spreading: self.packet_spreading,
                law: self.interpacket_law,
            },
        }
    }
}

/// Packet timestamps of a single file: the first packet at the arrival,
/// then `n_packets − 1` gaps drawn per the gap model.
pub fn packetize(
    file: &FileRequest,
    gaps: &GapModel,
    rng: &mut impl UnitUniform,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(file.n_packets.min(1 << 20) as usize);
    let mut t = file.arrival;
    out.push(t);
    for _ in 1..file.n_packets {
        t += gaps.draw(file, rng)?;
        out.push(t);
    }
    Ok(out)
}

/// Bounded variant used by [`simulate`]: stops at the horizon and enforces
/// the packet budget.
fn packetize_bounded(
    file: &FileRequest,
    gaps: &GapModel,
    horizon: f64,
    budget_left: u64,
    rng: &mut impl UnitUniform,
    out: &mut Vec<f64>,
) -> Result<u64> {
    let mut emitted = 0u64;
    let mut t = file.arrival;
    for k in 0..file.n_packets {
        if k > 0 {
            t += gaps.draw(file, rng)?;
        }
        if t > horizon {
            break;
        }
        if t >= 0.0 {
            if emitted >= budget_left {
                return Err(Error::ResourceLimit(format!(
                    "packet budget exhausted while expanding a {}-packet file",
                    file.n_packets
                )));
            }
            out.push(t);
            emitted += 1;
        }
    }
    Ok(emitted)
}

/// Run the full traffic model: superpose all per-file packet streams,
/// discard packets outside `[0, horizon]`, sort, attach weights.
pub fn simulate(cfg: &TrafficConfig) -> Result<PacketTrace> {
    let files = generate_file_arrivals(cfg)?;
    let gaps = cfg.gap_model();
    let mut timestamps = Vec::new();
    let mut budget = cfg.max_packets;
    for (index, file) in files.iter().enumerate() {
        let mut rng = file_stream(cfg.seed, index as u64);
        let emitted =
            packetize_bounded(file, &gaps, cfg.horizon, budget, &mut rng, &mut timestamps)?;
        budget -= emitted;
    }
    timestamps.sort_by(f64::total_cmp);
    PacketTrace::new(timestamps, cfg.event_weight(), cfg.horizon)
}

/// Counts of consecutive inter-packet gaps per bin. `edges` are increasing
/// positive bin boundaries (`edges.len() − 1` bins); zero gaps land in the
/// first bin, other out-of-range gaps are dropped.
pub fn interpacket_histogram(trace: &PacketTrace, edges: &[f64]) -> Result<Vec<u64>> {
    if trace.len() < 2 {
        return Err(Error::TooFewEvents);
    }
    if edges.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two bin edges".into(),
        ));
    }
    if !edges.windows(2).all(|w| w[0] < w[1]) || edges[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "bin edges must be positive and increasing".into(),
        ));
    }
    let mut counts = vec![0u64; edges.len() - 1];
    for gap in trace.gaps() {
        if gap == 0.0 {
            counts[0] += 1;
            continue;
        }
        if gap < edges[0] || gap >= edges[edges.len() - 1] {
            continue;
        }
        let bin = edges.partition_point(|&e| e <= gap) - 1;
        counts[bin] += 1;
    }
    Ok(counts)
}

/// Closed-form amplitude prediction for the packet-rate spectrum with
/// log-uniform per-file gaps:
/// `S(f) = s · ln 10 / (f · τ_f · p · τ_p,max)`.
pub fn empirical_one_over_f_prediction(cfg: &TrafficConfig, f: f64) -> Result<f64> {
    cfg.validate()?;
    let tau_p_max = match cfg.interpacket_law {
        InterPacketLaw::LogUniform { .. } => cfg.interpacket_law.max_gap(),
        InterPacketLaw::Fixed { .. } => {
            return Err(Error::InvalidParameter(
                "prediction requires the log-uniform inter-packet law".into(),
            ))
        }
    };
    if !(f > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency must be positive, got {f}"
        )));
    }
    Ok(cfg.file_size_scale * std::f64::consts::LN_10
        / (f * cfg.mean_file_interarrival * cfg.packet_size * tau_p_max))
}

/// Binned signal where each file is replaced by one rectangular pulse of
/// duration `n_packets · τ_p` and height `1/τ_p` (packets per second); the
/// unpacketized reference for network-independence checks.
pub fn equivalent_pulse_signal(
    files: &[FileRequest],
    horizon: f64,
    bin_width: f64,
) -> Result<SampledSignal> {
    if !(horizon > 0.0) || !(bin_width > 0.0) {
        return Err(Error::InvalidParameter(
            "horizon and bin width must be positive".into(),
        ));
    }
    let n_bins = (horizon / bin_width).round().max(1.0) as usize;
    let mut values = vec![0.0f64; n_bins];
    for file in files {
        let duration = file.n_packets as f64 * file.packet_gap_mean;
        let height = 1.0 / file.packet_gap_mean;
        deposit_rect(
            &mut values,
            bin_width,
            file.arrival,
            file.arrival + duration,
            height,
        );
    }
    Ok(SampledSignal {
        bin_width,
        values,
        origin: 0.0,
    })
}
