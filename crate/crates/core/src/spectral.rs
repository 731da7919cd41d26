//! Periodogram PSD estimation, ensemble averaging, log-binning and
//! power-law slope fitting.
//!
//! Two estimation paths are kept deliberately independent. The *events*
//! path evaluates `S(f) = (2/T)|Σ_k w_k e^(−i2πf t_k)|²` by direct
//! summation over the event times — the exact transform of the δ-train at
//! arbitrary frequencies, with no binning or aliasing. The *binned* path
//! runs an FFT over uniformly binned amplitudes on the grid `f_n = n/T`.
//! The events path serves as the oracle for the binned one in tests.
//!
//! DC is excluded from every estimate: slope fits and 1/f comparisons need
//! the fluctuation spectrum, and the analytic formulas drop the δ(f) term
//! as well. No taper is applied (rectangular window); variance reduction
//! comes from Bartlett segmenting and realization averaging instead.
//! All reductions use pairwise summation so that results are stable under
//! regrouping to better than 1e-12 relative.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::pulse_model::SampledSignal;
use crate::traffic_sim::PacketTrace;

/// One-sided PSD samples on a strictly increasing positive frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    freqs: Vec<f64>,
    psd: Vec<f64>,
    segments: u32,
    record_length: f64,
}

impl SpectrumEstimate {
    pub fn new(freqs: Vec<f64>, psd: Vec<f64>, segments: u32, record_length: f64) -> Result<Self> {
        if freqs.len() != psd.len() {
            return Err(Error::InvalidParameter(
                "freqs and psd must have equal length".into(),
            ));
        }
        if freqs.is_empty() {
            return Err(Error::InvalidParameter("empty spectrum".into()));
        }
        if freqs[0] <= 0.0 || !freqs.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "frequencies must be positive and strictly increasing".into(),
            ));
        }
        if psd.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidParameter(
                "psd values must be finite and nonnegative".into(),
            ));
        }
        if !(record_length > 0.0) || segments == 0 {
            return Err(Error::InvalidParameter("bad segments/record length".into()));
        }
        Ok(Self {
            freqs,
            psd,
            segments,
            record_length,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn psd(&self) -> &[f64] {
        &self.psd
    }

    pub fn segments(&self) -> u32 {
        self.segments
    }

    pub fn record_length(&self) -> f64 {
        self.record_length
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Restrict to `[f_lo, f_hi]`, keeping metadata.
    pub fn band(&self, f_lo: f64, f_hi: f64) -> Result<SpectrumEstimate> {
        let pairs: Vec<(f64, f64)> = self
            .freqs
            .iter()
            .zip(&self.psd)
            .filter(|(f, _)| **f >= f_lo && **f <= f_hi)
            .map(|(f, p)| (*f, *p))
            .collect();
        if pairs.is_empty() {
            return Err(Error::InsufficientPoints(format!(
                "no points in [{f_lo}, {f_hi}]"
            )));
        }
        SpectrumEstimate::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
            self.segments,
            self.record_length,
        )
    }
}

/// Ordinary least squares fit of `log10 psd` against `log10 f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    /// Fitted spectral slope d log10 S / d log10 f.
    pub slope: f64,
    /// log10 PSD extrapolated to 1 Hz.
    pub intercept: f64,
    /// Band actually used.
    pub band: (f64, f64),
    /// RMS of log10 residuals.
    pub residual: f64,
    /// Points dropped because their PSD was zero.
    pub excluded_zeros: usize,
}

/// Pairwise (cascade) summation; reassociation-stable reductions.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise phasor sum `Σ w_k e^(−i 2π f t_k)` over the index range.
fn phasor_sum(trace: &PacketTrace, f: f64, lo: usize, hi: usize) -> Complex64 {
    if hi - lo <= 64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let times = &trace.timestamps()[lo..hi];
        for (off, t) in times.iter().enumerate() {
            let (s, c) = (-2.0 * std::f64::consts::PI * f * t).sin_cos();
            let w = trace.weight_at(lo + off);
            acc.re += w * c;
            acc.im += w * s;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    phasor_sum(trace, f, lo, mid) + phasor_sum(trace, f, mid, hi)
}

/// Periodogram power at one frequency; defined for any sign of `f` and
/// exactly even in it.
pub(crate) fn event_power(trace: &PacketTrace, f: f64) -> f64 {
    let sum = phasor_sum(trace, f, 0, trace.len());
    2.0 / trace.horizon() * sum.norm_sqr()
}

/// Exact δ-train periodogram on an explicit frequency grid.
pub fn periodogram_events(trace: &PacketTrace, freqs: &[f64]) -> Result<SpectrumEstimate> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if freqs.is_empty() {
        return Err(Error::InvalidParameter("empty frequency grid".into()));
    }
    let psd: Vec<f64> = freqs.iter().map(|&f| event_power(trace, f)).collect();
    SpectrumEstimate::new(freqs.to_vec(), psd, 1, trace.horizon())
}

/// Forward FFT plan, shared across calls (planning large sizes repeatedly
/// is far more expensive than the Mutex).
fn forward_plan(n: usize) -> std::sync::Arc<dyn rustfft::Fft<f64>> {
    use std::sync::{Mutex, OnceLock};
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("planner lock")
        .plan_fft_forward(n)
}

/// FFT periodogram of a binned signal on the grid `f_n = n/T`,
/// `n = 1 ⋯ N/2`, with `S(f_n) = (2/T)|Δ Σ_j I_j e^(−i2πf_n jΔ)|²`.
pub fn periodogram_binned(sig: &SampledSignal) -> Result<SpectrumEstimate> {
    let n = sig.values.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "signal too short for a spectrum".into(),
        ));
    }
    let record = sig.duration();
    let mut buf: Vec<Complex64> = sig.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_plan(n).process(&mut buf);

    let scale = 2.0 / record * sig.bin_width * sig.bin_width;
    let half = n / 2;
    let mut freqs = Vec::with_capacity(half);
    let mut psd = Vec::with_capacity(half);
    for (k, v) in buf.iter().enumerate().take(half + 1).skip(1) {
        freqs.push(k as f64 / record);
        psd.push(scale * v.norm_sqr());
    }
    SpectrumEstimate::new(freqs, psd, 1, record)
}

/// Deposit trace events into uniform bins as rate samples (weight/Δ).
///
/// Each event is split linearly between the two nearest bin positions
/// (cloud-in-cell), which keeps the binned transform phase-accurate to
/// second order in `f·Δ`; the straggler share past the last bin wraps,
/// matching the DFT's periodic phase convention.
pub fn bin_events(trace: &PacketTrace, bin_width: f64) -> Result<SampledSignal> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if !(bin_width > 0.0) || bin_width >= trace.horizon() {
        return Err(Error::InvalidParameter(format!(
            "bad bin width {bin_width}"
        )));
    }
    let n_bins = (trace.horizon() / bin_width).round().max(1.0) as usize;
    let mut values = vec![0.0f64; n_bins];
    for (k, &t) in trace.timestamps().iter().enumerate() {
        let x = t / bin_width;
        let j = (x as usize).min(n_bins - 1);
        let frac = (x - j as f64).clamp(0.0, 1.0);
        let w = trace.weight_at(k) / bin_width;
        values[j] += w * (1.0 - frac);
        values[(j + 1) % n_bins] += w * frac;
    }
    Ok(SampledSignal {
        bin_width,
        values,
        origin: 0.0,
    })
}

/// Pointwise mean over estimates on the identical grid; `segments` add up.
pub fn ensemble_average(estimates: &[SpectrumEstimate]) -> Result<SpectrumEstimate> {
    let first = estimates.first().ok_or(Error::GridMismatch)?;
    for e in &estimates[1..] {
        if e.freqs != first.freqs {
            return Err(Error::GridMismatch);
        }
    }
    let m = estimates.len() as f64;
    let mut psd = Vec::with_capacity(first.len());
    let mut column = vec![0.0f64; estimates.len()];
    for i in 0..first.len() {
        for (j, e) in estimates.iter().enumerate() {
            column[j] = e.psd[i];
        }
        psd.push(pairwise_sum(&column) / m);
    }
    let segments = estimates.iter().map(|e| e.segments).sum();
    SpectrumEstimate::new(first.freqs.clone(), psd, segments, first.record_length)
}

/// Average into decade-aligned logarithmic bins: geometric-mean frequency,
/// arithmetic-mean PSD, empty bins dropped.
pub fn log_bin(est: &SpectrumEstimate, bins_per_decade: u32) -> Result<SpectrumEstimate> {
    if bins_per_decade == 0 {
        return Err(Error::InvalidParameter(
            "bins_per_decade must be at least 1".into(),
        ));
    }
    let k = bins_per_decade as f64;
    let bin_of = |f: f64| (f.log10() * k).floor() as i64;

    let mut freqs = Vec::new();
    let mut psd = Vec::new();
    let mut i = 0;
    while i < est.len() {
        let bin = bin_of(est.freqs[i]);
        let mut j = i;
        while j < est.len() && bin_of(est.freqs[j]) == bin {
            j += 1;
        }
        let logf_mean = est.freqs[i..j].iter().map(|f| f.log10()).sum::<f64>() / (j - i) as f64;
        freqs.push(10f64.powf(logf_mean));
        psd.push(pairwise_sum(&est.psd[i..j]) / (j - i) as f64);
        i = j;
    }
    SpectrumEstimate::new(freqs, psd, est.segments, est.record_length)
}

/// OLS power-law fit over `[f_lo, f_hi]`; zero-PSD points are excluded and
/// counted. Requires at least five usable points.
pub fn fit_log_slope(est: &SpectrumEstimate, f_lo: f64, f_hi: f64) -> Result<SlopeFit> {
    if !(f_lo > 0.0) || !(f_hi > f_lo) {
        return Err(Error::InvalidParameter(format!(
            "bad band [{f_lo}, {f_hi}]"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = 0usize;
    for (f, p) in est.freqs.iter().zip(&est.psd) {
        if *f < f_lo || *f > f_hi {
            continue;
        }
        if *p <= 0.0 {
            excluded += 1;
            continue;
        }
        xs.push(f.log10());
        ys.push(p.log10());
    }
    let n = xs.len();
    if n < 5 {
        return Err(Error::InsufficientPoints(format!(
            "{n} usable points in [{f_lo}, {f_hi}] (need 5; {excluded} zero psd excluded)"
        )));
    }
    let nf = n as f64;
    let mx = pairwise_sum(&xs) / nf;
    let my = pairwise_sum(&ys) / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints(
            "degenerate frequency spread".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = (0..n)
        .map(|i| (ys[i] - (intercept + slope * xs[i])).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        band: (f_lo, f_hi),
        residual: (ss_res / nf).sqrt(),
        excluded_zeros: excluded,
    })
}

/// Mean event rate `(N+1)/T` with `N` the count of inter-event steps —
/// i.e. `len/horizon`.
pub fn estimate_rate(trace: &PacketTrace) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(trace.len() as f64 / trace.horizon())
}

/// Geometric frequency grid with the given density, inclusive of `f_lo`.
pub fn log_grid(f_lo: f64, f_hi: f64, points_per_decade: u32) -> Result<Vec<f64>> {
    if !(f_lo > 0.0) || !(f_hi > f_lo) || points_per_decade == 0 {
        return Err(Error::InvalidParameter(format!(
            "bad grid spec [{f_lo}, {f_hi}] x {points_per_decade}"
        )));
    }
    let step = 1.0 / points_per_decade as f64;
    let mut out = Vec::new();
    let mut lg = f_lo.log10();
    let end = f_hi.log10() + step * 1e-9;
    while lg <= end {
        out.push(10f64.powf(lg));
        lg += step;
    }
    Ok(out)
}

/// Split a trace into `m` equal-length segments, each rebased to its own
/// origin, for Bartlett averaging.
pub fn bartlett_segments(trace: &PacketTrace, m: u32) -> Result<Vec<PacketTrace>> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "segment count must be at least 1".into(),
        ));
    }
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let seg_len = trace.horizon() / m as f64;
    let mut parts: Vec<(Vec<f64>, Vec<f64>)> = vec![(Vec::new(), Vec::new()); m as usize];
    for (k, &t) in trace.timestamps().iter().enumerate() {
        let idx = ((t / seg_len) as usize).min(m as usize - 1);
        parts[idx]
            .0
            .push((t - idx as f64 * seg_len).clamp(0.0, seg_len));
        parts[idx].1.push(trace.weight_at(k));
    }
    parts
        .into_iter()
        .map(|(ts, ws)| {
            if trace.per_event_weights().is_some() {
                PacketTrace::with_weights(ts, ws, seg_len)
            } else {
                PacketTrace::new(ts, trace.uniform_weight(), seg_len)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::distributions::{ExponentialLaw, UnitUniform};

    fn poisson_trace(rate: f64, horizon: f64, seed: u64) -> PacketTrace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gap = ExponentialLaw::new(1.0 / rate).unwrap();
        let mut ts = Vec::new();
        let mut t = 0.0;
        loop {
            t += gap.sample(rng.next_unit()).unwrap();
            if t >= horizon {
                break;
            }
            ts.push(t);
        }
        PacketTrace::new(ts, 1.0, horizon).unwrap()
    }

    #[test]
    fn single_event_flat_spectrum() {
        let trace = PacketTrace::new(vec![0.7], 1.0, 2.0).unwrap();
        let est = periodogram_events(&trace, &[0.5, 1.0, 7.3]).unwrap();
        for &p in est.psd() {
            assert!((p - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_event_interference() {
        // |e^(−i2πft₁) + e^(−i2πft₂)|² = 2 + 2cos(2πfτ)
        let (t1, tau, horizon) = (0.31, 0.27, 3.0);
        let trace = PacketTrace::new(vec![t1, t1 + tau], 1.0, horizon).unwrap();
        for &f in &[0.1, 0.9, 4.0, 11.0] {
            let est = periodogram_events(&trace, &[f]).unwrap();
            let expected =
                2.0 / horizon * (2.0 + 2.0 * (2.0 * std::f64::consts::PI * f * tau).cos());
            assert!((est.psd()[0] - expected).abs() < 1e-12, "f={f}");
        }
    }

    #[test]
    fn events_errors() {
        let empty = PacketTrace::new(vec![], 1.0, 1.0).unwrap();
        assert!(matches!(
            periodogram_events(&empty, &[1.0]),
            Err(Error::EmptyTrace)
        ));
        let trace = PacketTrace::new(vec![0.5], 1.0, 1.0).unwrap();
        assert!(periodogram_events(&trace, &[]).is_err());
    }

    #[test]
    fn event_power_is_even_in_f() {
        let trace = poisson_trace(30.0, 10.0, 3);
        for &f in &[0.3, 1.7, 42.0] {
            assert_eq!(
                event_power(&trace, f).to_bits(),
                event_power(&trace, -f).to_bits()
            );
        }
    }

    #[test]
    fn event_power_time_shift_invariant() {
        let ts: Vec<f64> = vec![1.0, 1.5, 2.25, 4.0];
        let a = PacketTrace::new(ts.clone(), 1.0, 10.0).unwrap();
        let shifted: Vec<f64> = ts.iter().map(|t| t + 3.0).collect();
        let b = PacketTrace::new(shifted, 1.0, 10.0).unwrap();
        for &f in &[0.2, 1.0, 5.5] {
            let pa = event_power(&a, f);
            let pb = event_power(&b, f);
            assert!((pa - pb).abs() / pa < 1e-9, "f={f}: {pa} vs {pb}");
        }
    }

    #[test]
    fn binned_all_zero_and_constant() {
        let zero = SampledSignal {
            bin_width: 0.1,
            values: vec![0.0; 64],
            origin: 0.0,
        };
        let est = periodogram_binned(&zero).unwrap();
        assert!(est.psd().iter().all(|&p| p == 0.0));

        let constant = SampledSignal {
            bin_width: 0.1,
            values: vec![2.5; 64],
            origin: 0.0,
        };
        let est = periodogram_binned(&constant).unwrap();
        // DC-only content: every retained bin is zero up to FFT roundoff.
        assert!(
            est.psd().iter().all(|&p| p < 1e-22),
            "{:?}",
            &est.psd()[..4]
        );
    }

    #[test]
    fn binned_matches_events_at_low_frequency() {
        // Same traces through both paths, averaged over realizations so the
        // comparison is not dominated by single-periodogram χ² dips.
        let dt = 0.01;
        let f_cap = 0.02 / dt;
        let mut binned_all = Vec::new();
        let mut events_all = Vec::new();
        let mut grid: Vec<f64> = Vec::new();
        for seed in 17..25 {
            let trace = poisson_trace(200.0, 50.0, seed);
            let binned = periodogram_binned(&bin_events(&trace, dt).unwrap()).unwrap();
            if grid.is_empty() {
                grid = binned
                    .freqs()
                    .iter()
                    .copied()
                    .filter(|&f| f <= f_cap && f >= 0.2)
                    .collect();
            }
            binned_all.push(binned.band(0.2, f_cap).unwrap());
            events_all.push(periodogram_events(&trace, &grid).unwrap());
        }
        let binned = ensemble_average(&binned_all).unwrap();
        let events = ensemble_average(&events_all).unwrap();
        for ((f, pb), pe) in binned.freqs().iter().zip(binned.psd()).zip(events.psd()) {
            let rel = (pb - pe).abs() / pe.max(1e-300);
            assert!(rel < 0.02, "f={f}: binned={pb}, events={pe}, rel={rel}");
        }
    }

    #[test]
    fn ensemble_average_identity_and_copies() {
        let trace = poisson_trace(50.0, 5.0, 1);
        let est = periodogram_events(&trace, &[1.0, 2.0, 3.0]).unwrap();
        let one = ensemble_average(std::slice::from_ref(&est)).unwrap();
        assert_eq!(one.psd(), est.psd());

        let five = ensemble_average(&vec![est.clone(); 5]).unwrap();
        for (a, b) in five.psd().iter().zip(est.psd()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(five.segments(), 5);
    }

    #[test]
    fn ensemble_average_grid_mismatch() {
        let trace = poisson_trace(50.0, 5.0, 1);
        let a = periodogram_events(&trace, &[1.0, 2.0]).unwrap();
        let b = periodogram_events(&trace, &[1.0, 2.5]).unwrap();
        assert!(matches!(
            ensemble_average(&[a, b]),
            Err(Error::GridMismatch)
        ));
        assert!(matches!(ensemble_average(&[]), Err(Error::GridMismatch)));
    }

    #[test]
    fn ensemble_average_stable_under_reordering() {
        let grid = log_grid(0.5, 20.0, 10).unwrap();
        let mut ests: Vec<SpectrumEstimate> = (0..37)
            .map(|s| periodogram_events(&poisson_trace(40.0, 8.0, s), &grid).unwrap())
            .collect();
        let fwd = ensemble_average(&ests).unwrap();
        ests.reverse();
        let rev = ensemble_average(&ests).unwrap();
        for (a, b) in fwd.psd().iter().zip(rev.psd()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(*b), "{a} vs {b}");
        }
    }

    #[test]
    fn ensemble_error_shrinks_like_sqrt_m() {
        // Periodogram points are ~χ²₂: relative sd 1 per point. Averaging M
        // realizations must shrink the spread by ~√M (±30%).
        let grid = log_grid(1.0, 30.0, 8).unwrap();
        let make = |seeds: std::ops::Range<u64>| {
            let ests: Vec<_> = seeds
                .map(|s| periodogram_events(&poisson_trace(60.0, 10.0, 1000 + s), &grid).unwrap())
                .collect();
            ensemble_average(&ests).unwrap()
        };
        // Spread of M-averages around the flat shot-noise level 2ν̄ = 120.
        let spread = |m: u64, groups: u64| -> f64 {
            let mut devs = Vec::new();
            for g in 0..groups {
                let avg = make(g * m..(g + 1) * m);
                for &p in avg.psd() {
                    devs.push((p / 120.0 - 1.0).powi(2));
                }
            }
            (devs.iter().sum::<f64>() / devs.len() as f64).sqrt()
        };
        let s1 = spread(1, 8);
        let s16 = spread(16, 8);
        let ratio = s1 / s16;
        assert!(
            ratio > 4.0 * 0.7 && ratio < 4.0 * 1.3,
            "expected ~4x shrink, got {ratio} (s1={s1}, s16={s16})"
        );
    }

    #[test]
    fn log_bin_preserves_sparse_points() {
        let est =
            SpectrumEstimate::new(vec![1.0, 10.0, 100.0], vec![3.0, 2.0, 1.0], 1, 10.0).unwrap();
        let binned = log_bin(&est, 1).unwrap();
        assert_eq!(binned.psd(), est.psd());
    }

    #[test]
    fn log_bin_keeps_one_over_f_curve() {
        // Densely sampled c/f stays on the curve after binning (≥10/bin).
        let grid = log_grid(1.0, 1000.0, 100).unwrap();
        let c = 7.0;
        let psd: Vec<f64> = grid.iter().map(|f| c / f).collect();
        let est = SpectrumEstimate::new(grid, psd, 1, 1.0).unwrap();
        let binned = log_bin(&est, 8).unwrap();
        for (f, p) in binned.freqs().iter().zip(binned.psd()) {
            let rel = (p - c / f).abs() / (c / f);
            assert!(rel < 0.01, "f={f}: rel={rel}");
        }
    }

    #[test]
    fn log_bin_rejects_zero_density() {
        let est = SpectrumEstimate::new(vec![1.0, 2.0], vec![1.0, 1.0], 1, 1.0).unwrap();
        assert!(log_bin(&est, 0).is_err());
    }

    #[test]
    fn slope_fit_exact_power_laws() {
        let grid = log_grid(0.1, 100.0, 20).unwrap();
        let one_over_f: Vec<f64> = grid.iter().map(|f| 4.0 / f).collect();
        let est = SpectrumEstimate::new(grid.clone(), one_over_f, 1, 1.0).unwrap();
        let fit = fit_log_slope(&est, 0.1, 100.0).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert!((fit.intercept - 4f64.log10()).abs() < 1e-10);

        let steeper: Vec<f64> = grid.iter().map(|f| 2.0 / f.powf(1.5)).collect();
        let est = SpectrumEstimate::new(grid, steeper, 1, 1.0).unwrap();
        let fit = fit_log_slope(&est, 0.1, 100.0).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
    }

    #[test]
    fn slope_fit_excludes_zeros_and_requires_points() {
        let est = SpectrumEstimate::new(
            vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            vec![1.0, 0.0, 1.0, 1.0, 1.0, 1.0],
            1,
            1.0,
        )
        .unwrap();
        let fit = fit_log_slope(&est, 1.0, 32.0).unwrap();
        assert_eq!(fit.excluded_zeros, 1);
        assert!((fit.slope).abs() < 1e-12);

        assert!(matches!(
            fit_log_slope(&est, 1.0, 2.0),
            Err(Error::InsufficientPoints(_))
        ));
    }

    #[test]
    fn rate_estimator() {
        let one = PacketTrace::new(vec![0.2], 1.0, 1.0).unwrap();
        assert!((estimate_rate(&one).unwrap() - 1.0).abs() < 1e-15);

        let trace = poisson_trace(100.0, 100.0, 5);
        let rate = estimate_rate(&trace).unwrap();
        assert!((rate - 100.0).abs() < 3.0, "{rate}");

        let empty = PacketTrace::new(vec![], 1.0, 1.0).unwrap();
        assert!(matches!(estimate_rate(&empty), Err(Error::EmptyTrace)));
    }

    #[test]
    fn bartlett_segments_partition_events() {
        let trace = poisson_trace(80.0, 12.0, 9);
        let segs = bartlett_segments(&trace, 4).unwrap();
        assert_eq!(segs.len(), 4);
        let total: usize = segs.iter().map(|s| s.len()).sum();
        assert_eq!(total, trace.len());
        for s in &segs {
            assert!((s.horizon() - 3.0).abs() < 1e-12);
            assert!(s.timestamps().iter().all(|&t| (0.0..=3.0).contains(&t)));
        }
    }

    #[test]
    fn shot_noise_baseline_smoke() {
        // Ensemble PSD of a Poisson δ-train is flat at 2ν̄.
        let rate = 50.0;
        let grid = log_grid(1.0, 40.0, 6).unwrap();
        let ests: Vec<_> = (0..60)
            .map(|s| periodogram_events(&poisson_trace(rate, 20.0, 300 + s), &grid).unwrap())
            .collect();
        let avg = log_bin(&ensemble_average(&ests).unwrap(), 3).unwrap();
        for (f, p) in avg.freqs().iter().zip(avg.psd()) {
            let rel = (p / (2.0 * rate) - 1.0).abs();
            assert!(rel < 0.15, "f={f}: psd={p}, rel={rel}");
        }
    }
}
