//! Subcommand implementations.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde_json::json;

use flicker::distributions::TruncatedPowerLaw;
use flicker::io as fio;
use flicker::pulse_model::{
    asymptotic_one_over_f, carson_spectrum_numeric, rect_spectrum_closed_form, PulseEnsemble,
    PulseShape,
};
use flicker::spectral::{
    bartlett_segments, bin_events, ensemble_average, fit_log_slope, log_bin, log_grid,
    periodogram_binned, periodogram_events, SpectrumEstimate,
};
use flicker::traffic_sim::{empirical_one_over_f_prediction, simulate as run_sim, TrafficConfig};

use crate::manifest::RunManifest;

/// Worker count for ensemble work: `FLICKER_THREADS` env var, else the
/// available parallelism.
fn thread_count(jobs: usize) -> usize {
    let default = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let configured = std::env::var("FLICKER_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(default);
    configured.min(jobs).max(1)
}

/// Map `f` over `items` on scoped threads, preserving order.
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send + Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    let threads = thread_count(items.len());
    if threads <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Result<Vec<R>>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Result<Vec<R>>>()))
            .collect();
        for h in handles {
            out.push(h.join().expect("worker thread panicked"));
        }
    });
    let mut flat = Vec::with_capacity(items.len());
    for part in out {
        flat.extend(part?);
    }
    Ok(flat)
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Traffic config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output trace path.
    #[arg(long)]
    pub out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the binary trace format instead of text.
    #[arg(long)]
    pub binary: bool,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut cfg: TrafficConfig = serde_json::from_str(&text).context("parsing traffic config")?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let trace = run_sim(&cfg)?;
    if args.binary {
        fio::write_trace_binary(&args.out, &trace)?;
    } else {
        fio::write_trace(&args.out, &trace)?;
    }
    RunManifest::new("simulate", Some(cfg.seed), serde_json::to_value(&cfg)?)
        .output(&args.out)
        .write(&args.out)?;
    println!(
        "wrote {} events over {} s to {}",
        trace.len(),
        trace.horizon(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Input trace path.
    #[arg(long)]
    pub trace: PathBuf,
    /// Output spectrum path.
    #[arg(long)]
    pub out: PathBuf,
    /// Bartlett segments to average.
    #[arg(long, default_value_t = 1)]
    pub segments: u32,
    /// Use the FFT path over binned amplitudes (default: exact events path).
    #[arg(long)]
    pub binned: bool,
    /// Bin width for --binned, seconds.
    #[arg(long, required_if_eq("binned", "true"))]
    pub dt: Option<f64>,
    /// Log-bin the result with this many bins per decade.
    #[arg(long)]
    pub logbin: Option<u32>,
    /// Events path: lowest frequency (default 10/segment length).
    #[arg(long)]
    pub flo: Option<f64>,
    /// Events path: highest frequency (default 1000/segment length).
    #[arg(long)]
    pub fhi: Option<f64>,
    /// Events path: grid points per decade.
    #[arg(long, default_value_t = 30)]
    pub ppd: u32,
    /// Input trace is in the binary format.
    #[arg(long)]
    pub binary: bool,
}

pub fn spectrum(args: SpectrumArgs) -> Result<()> {
    let trace = if args.binary {
        fio::read_trace_binary(&args.trace)?
    } else {
        fio::read_trace(&args.trace)?
    };
    let segments = bartlett_segments(&trace, args.segments)?;
    let seg_len = trace.horizon() / args.segments as f64;

    let estimates: Vec<SpectrumEstimate> = if args.binned {
        let dt = args.dt.ok_or_else(|| anyhow!("--binned requires --dt"))?;
        parallel_map(segments, |seg| {
            let sig = bin_events(seg, dt)?;
            Ok(periodogram_binned(&sig)?)
        })?
    } else {
        let flo = args.flo.unwrap_or(10.0 / seg_len);
        let fhi = args.fhi.unwrap_or(1000.0 / seg_len);
        let grid = log_grid(flo, fhi, args.ppd)?;
        parallel_map(segments, |seg| Ok(periodogram_events(seg, &grid)?))?
    };
    let mut est = ensemble_average(&estimates)?;
    if let Some(k) = args.logbin {
        est = log_bin(&est, k)?;
    }
    fio::write_spectrum(&args.out, &est)?;
    RunManifest::new(
        "spectrum",
        None,
        json!({
            "trace": args.trace.display().to_string(),
            "segments": args.segments,
            "binned": args.binned,
            "dt": args.dt,
            "logbin": args.logbin,
            "flo": args.flo,
            "fhi": args.fhi,
            "ppd": args.ppd,
        }),
    )
    .output(&args.out)
    .write(&args.out)?;
    println!(
        "wrote {} spectrum points to {}",
        est.len(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct AnalyticArgs {
    /// closed | carson | asymptotic | empir1f
    #[arg(long)]
    pub mode: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Duration-law exponent (pulse modes).
    #[arg(long, default_value_t = -2.0)]
    pub alpha: f64,
    /// Height scaling exponent.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tmin: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    /// Mean pulse rate, pulses/s.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Pulse height.
    #[arg(long, default_value_t = 1.0)]
    pub height: f64,
    /// empir1f: file-size scale, bytes.
    #[arg(long, default_value_t = 4100.0)]
    pub scale: f64,
    /// empir1f: mean file inter-arrival, seconds.
    #[arg(long, default_value_t = 0.101)]
    pub tau_f: f64,
    /// empir1f: packet size, bytes.
    #[arg(long, default_value_t = 1500.0)]
    pub packet_size: f64,
    /// empir1f: smallest mean inter-packet gap, seconds.
    #[arg(long, default_value_t = 11.6e-6)]
    pub tp_base: f64,
    /// empir1f: decades of the gap law.
    #[arg(long, default_value_t = 3.0)]
    pub tp_decades: f64,
    #[arg(long)]
    pub flo: f64,
    #[arg(long)]
    pub fhi: f64,
    #[arg(long, default_value_t = 40)]
    pub ppd: u32,
}

pub fn analytic(args: AnalyticArgs) -> Result<()> {
    let grid = log_grid(args.flo, args.fhi, args.ppd)?;
    let psd: Vec<f64> = match args.mode.as_str() {
        "closed" | "carson" | "asymptotic" => {
            let ens = PulseEnsemble::new(
                PulseShape::rectangular(args.height)?,
                args.beta,
                TruncatedPowerLaw::new(args.alpha, args.tmin, args.tmax)?,
                args.rate,
            )?;
            let eval = |f: &f64| -> Result<f64> {
                Ok(match args.mode.as_str() {
                    "closed" => rect_spectrum_closed_form(&ens, *f)?,
                    "carson" => carson_spectrum_numeric(&ens, *f)?,
                    _ => asymptotic_one_over_f(&ens, *f)?,
                })
            };
            grid.iter().map(eval).collect::<Result<_>>()?
        }
        "empir1f" => {
            let cfg = TrafficConfig {
                file_size_scale: args.scale,
                mean_file_interarrival: args.tau_f,
                packet_size: args.packet_size,
                interpacket_law: flicker::traffic_sim::InterPacketLaw::LogUniform {
                    base: args.tp_base,
                    decades: args.tp_decades,
                },
                ..TrafficConfig::with_horizon(1.0)
            };
            grid.iter()
                .map(|f| Ok(empirical_one_over_f_prediction(&cfg, *f)?))
                .collect::<Result<Vec<f64>>>()?
        }
        other => bail!("unknown analytic mode {other:?} (closed|carson|asymptotic|empir1f)"),
    };
    let est = SpectrumEstimate::new(grid, psd, 1, 1.0 / args.flo)?;
    fio::write_spectrum(&args.out, &est)?;
    RunManifest::new(
        "analytic",
        None,
        json!({
            "mode": args.mode,
            "alpha": args.alpha, "beta": args.beta,
            "tmin": args.tmin, "tmax": args.tmax,
            "rate": args.rate, "height": args.height,
            "scale": args.scale, "tau_f": args.tau_f,
            "packet_size": args.packet_size,
            "tp_base": args.tp_base, "tp_decades": args.tp_decades,
            "flo": args.flo, "fhi": args.fhi, "ppd": args.ppd,
        }),
    )
    .output(&args.out)
    .write(&args.out)?;
    println!(
        "wrote {} analytic points to {}",
        est.len(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
pub struct HistogramArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub bins_per_decade: u32,
    /// Input trace is in the binary format.
    #[arg(long)]
    pub binary: bool,
}

pub fn histogram(args: HistogramArgs) -> Result<()> {
    let trace = if args.binary {
        fio::read_trace_binary(&args.trace)?
    } else {
        fio::read_trace(&args.trace)?
    };
    if args.bins_per_decade == 0 {
        bail!("--bins-per-decade must be at least 1");
    }
    let mut gmin = f64::INFINITY;
    let mut gmax: f64 = 0.0;
    for g in trace.gaps() {
        if g > 0.0 {
            gmin = gmin.min(g);
            gmax = gmax.max(g);
        }
    }
    if !gmin.is_finite() || gmax <= 0.0 {
        bail!("trace has no positive inter-event gaps");
    }
    // Decade-aligned log-spaced edges covering [gmin, gmax].
    let k = args.bins_per_decade as f64;
    let first = (gmin.log10() * k).floor() / k;
    let mut edges = vec![10f64.powf(first)];
    while *edges.last().unwrap() < gmax {
        let next = 10f64.powf(((edges.len() as f64) / k) + first);
        edges.push(next);
    }
    let counts = flicker::traffic_sim::interpacket_histogram(&trace, &edges)?;
    fio::write_histogram(&args.out, &edges, &counts)?;
    RunManifest::new(
        "histogram",
        None,
        json!({
            "trace": args.trace.display().to_string(),
            "bins_per_decade": args.bins_per_decade,
        }),
    )
    .output(&args.out)
    .write(&args.out)?;
    println!("wrote {} bins to {}", counts.len(), args.out.display());
    Ok(())
}

#[derive(Args)]
pub struct CompareArgs {
    /// Reference spectrum file.
    #[arg(long)]
    pub a: PathBuf,
    /// Spectrum file interpolated onto A's grid.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub flo: f64,
    #[arg(long)]
    pub fhi: f64,
    /// Pass threshold: median ratio may not exceed this factor.
    #[arg(long, default_value_t = 2.0)]
    pub max_ratio: f64,
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let a = fio::read_spectrum(&args.a)?;
    let b = fio::read_spectrum(&args.b)?;

    let lo = args.flo.max(b.freqs()[0]);
    let hi = args.fhi.min(*b.freqs().last().unwrap());
    let mut ratios = Vec::new();
    for (f, pa) in a.freqs().iter().zip(a.psd()) {
        if *f < lo || *f > hi || *pa <= 0.0 {
            continue;
        }
        if let Some(pb) = log_interp(&b, *f) {
            if pb > 0.0 {
                ratios.push((pa / pb).log10());
            }
        }
    }
    if ratios.is_empty() {
        bail!(
            "bands are disjoint: no overlap of {} and {} within [{}, {}]",
            args.a.display(),
            args.b.display(),
            args.flo,
            args.fhi
        );
    }
    let mut abs: Vec<f64> = ratios.iter().map(|r| r.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let median = abs[abs.len() / 2];
    let max = *abs.last().unwrap();

    println!("points compared: {}", abs.len());
    println!(
        "median |log10 ratio|: {median:.4} (factor {:.3})",
        10f64.powf(median)
    );
    println!(
        "max    |log10 ratio|: {max:.4} (factor {:.3})",
        10f64.powf(max)
    );
    for (label, est) in [("A", &a), ("B", &b)] {
        match fit_log_slope(est, args.flo, args.fhi) {
            Ok(fit) => println!(
                "slope {label}: {:.4} (intercept {:.3}, residual {:.3})",
                fit.slope, fit.intercept, fit.residual
            ),
            Err(e) => println!("slope {label}: unavailable ({e})"),
        }
    }
    let threshold = args.max_ratio.log10();
    if median > threshold {
        bail!(
            "median ratio factor {:.3} exceeds --max-ratio {}",
            10f64.powf(median),
            args.max_ratio
        );
    }
    println!("PASS: median within factor {}", args.max_ratio);
    Ok(())
}

/// Log-log linear interpolation of a spectrum at frequency `f`.
fn log_interp(est: &SpectrumEstimate, f: f64) -> Option<f64> {
    let freqs = est.freqs();
    if f < freqs[0] || f > *freqs.last().unwrap() {
        return None;
    }
    let j = freqs.partition_point(|&g| g <= f).min(freqs.len() - 1);
    if j == 0 {
        return Some(est.psd()[0]);
    }
    let (f0, f1) = (freqs[j - 1], freqs[j]);
    let (p0, p1) = (est.psd()[j - 1], est.psd()[j]);
    if p0 <= 0.0 || p1 <= 0.0 {
        return None;
    }
    let t = (f.ln() - f0.ln()) / (f1.ln() - f0.ln());
    Some((p0.ln() + t * (p1.ln() - p0.ln())).exp())
}
