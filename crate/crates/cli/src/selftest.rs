//! Built-in verification subset: fast cross-checks of the numerical core,
//! printed as a pass/fail table. Exits nonzero on any failure.

use anyhow::{bail, Result};
use num_complex::Complex64;

use flicker::distributions::{
    ks_distance, ExponentialLaw, LogUniformScale, PositiveCauchy, TruncatedPowerLaw, UnitUniform,
};
use flicker::pulse_model::{
    carson_spectrum_numeric, rect_spectrum_closed_form, rect_unit_energy, PulseEnsemble, PulseShape,
};
use flicker::specfun::upper_incomplete_gamma;
use flicker::spectral::{fit_log_slope, log_grid, SpectrumEstimate};
use flicker::traffic_sim::{empirical_one_over_f_prediction, TrafficConfig};

struct Table {
    failures: usize,
}

impl Table {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        println!("{status}  {name:<42} {detail}");
        if !pass {
            self.failures += 1;
        }
    }
}

pub fn run() -> Result<()> {
    let started = std::time::Instant::now();
    let mut table = Table { failures: 0 };

    gamma_recurrence(&mut table);
    gamma_one_is_exponential(&mut table);
    closed_form_vs_quadrature(&mut table);
    shape_energy(&mut table);
    sampler_ks(&mut table);
    analytic_slope(&mut table);
    prediction_value(&mut table);

    println!("selftest finished in {:.2?}", started.elapsed());
    if table.failures > 0 {
        bail!("{} selftest check(s) failed", table.failures);
    }
    Ok(())
}

fn gamma_recurrence(table: &mut Table) {
    let mut worst = 0.0f64;
    for &a in &[-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
        for &r in &[1e-3, 0.1, 1.0, 3.0, 10.0, 100.0, 1e4] {
            for &phase in &[
                0.0,
                0.4,
                std::f64::consts::FRAC_PI_2,
                -std::f64::consts::FRAC_PI_2,
            ] {
                let z = Complex64::from_polar(r, phase);
                let g_a = upper_incomplete_gamma(a, z).unwrap();
                let g_a1 = upper_incomplete_gamma(a + 1.0, z).unwrap();
                let rhs = a * g_a + z.powf(a) * (-z).exp();
                let scale = g_a1.norm().max(rhs.norm()).max(1e-300);
                worst = worst.max((g_a1 - rhs).norm() / scale);
            }
        }
    }
    table.check(
        "gamma recurrence residual",
        worst <= 1e-9,
        format!("max {worst:.2e} (limit 1e-9)"),
    );
}

fn gamma_one_is_exponential(table: &mut Table) {
    let mut worst = 0.0f64;
    for &z in &[
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 300.0),
        Complex64::new(2.0, -5.0),
    ] {
        let g = upper_incomplete_gamma(1.0, z).unwrap();
        worst = worst.max((g - (-z).exp()).norm() / (-z).exp().norm());
    }
    table.check(
        "gamma(1, z) = exp(-z)",
        worst <= 1e-12,
        format!("max {worst:.2e} (limit 1e-12)"),
    );
}

fn closed_form_vs_quadrature(table: &mut Table) {
    let mut worst = 0.0f64;
    for &alpha in &[-2.0, -0.5] {
        let ens = PulseEnsemble::new(
            PulseShape::rectangular(1.0).unwrap(),
            0.0,
            TruncatedPowerLaw::new(alpha, 1e-3, 10.0).unwrap(),
            1.0,
        )
        .unwrap();
        for f in log_grid(1e-3, 1e5, 5).unwrap() {
            let closed = rect_spectrum_closed_form(&ens, f).unwrap();
            let numeric = carson_spectrum_numeric(&ens, f).unwrap();
            worst = worst.max((closed - numeric).abs() / numeric);
        }
    }
    table.check(
        "closed form vs quadrature",
        worst <= 1e-6,
        format!("max rel {worst:.2e} (limit 1e-6)"),
    );
}

fn shape_energy(table: &mut Table) {
    let rel = (rect_unit_energy() - std::f64::consts::PI).abs() / std::f64::consts::PI;
    table.check(
        "rectangle shape energy = pi",
        rel <= 1e-6,
        format!("rel {rel:.2e} (limit 1e-6)"),
    );
}

fn sampler_ks(table: &mut Table) {
    use rand::SeedableRng;
    let n = 100_000usize;
    let mut worst = 0.0f64;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut run = |name: &str, sample: &mut dyn FnMut(f64) -> f64, cdf: &dyn Fn(f64) -> f64| {
        let mut xs: Vec<f64> = (0..n).map(|_| sample(rng.next_unit())).collect();
        xs.sort_by(f64::total_cmp);
        let d = ks_distance(&xs, cdf);
        worst = worst.max(d);
        d < 0.01 || panic!("{name} KS {d}")
    };
    let pl = TruncatedPowerLaw::new(-2.0, 1e-4, 1.0).unwrap();
    run("power law", &mut |u| pl.sample(u).unwrap(), &|x| pl.cdf(x));
    let pc = PositiveCauchy::new(4100.0).unwrap();
    run("cauchy", &mut |u| pc.sample(u).unwrap(), &|x| pc.cdf(x));
    let lu = LogUniformScale::new(11.6e-6, 3.0).unwrap();
    run("log uniform", &mut |u| lu.sample(u).unwrap(), &|x| {
        lu.cdf(x)
    });
    let ex = ExponentialLaw::new(0.101).unwrap();
    run("exponential", &mut |u| ex.sample(u).unwrap(), &|x| {
        ex.cdf(x)
    });
    table.check(
        "sampler KS distance (n=1e5)",
        worst < 0.01,
        format!("max {worst:.4} (limit 0.01)"),
    );
}

fn analytic_slope(table: &mut Table) {
    let ens = PulseEnsemble::new(
        PulseShape::rectangular(1.0).unwrap(),
        0.0,
        TruncatedPowerLaw::new(-2.0, 1e-4, 1.0).unwrap(),
        1.0,
    )
    .unwrap();
    let band_lo = 10.0 / (2.0 * std::f64::consts::PI * 1.0);
    let band_hi = 0.1 / (2.0 * std::f64::consts::PI * 1e-4);
    let grid = log_grid(band_lo, band_hi, 20).unwrap();
    let psd: Vec<f64> = grid
        .iter()
        .map(|&f| rect_spectrum_closed_form(&ens, f).unwrap())
        .collect();
    let est = SpectrumEstimate::new(grid, psd, 1, 1.0).unwrap();
    let fit = fit_log_slope(&est, band_lo, band_hi).unwrap();
    table.check(
        "analytic alpha=-2 slope",
        (fit.slope + 1.0).abs() <= 0.05,
        format!("slope {:.4} (want -1 +/- 0.05)", fit.slope),
    );
}

fn prediction_value(table: &mut Table) {
    let cfg = TrafficConfig::with_horizon(1.0);
    let s = empirical_one_over_f_prediction(&cfg, 1.0).unwrap();
    let expected = 4100.0 * std::f64::consts::LN_10 / (0.101 * 1500.0 * 0.0116);
    let rel = (s - expected).abs() / expected;
    table.check(
        "prediction at 1 Hz",
        rel <= 1e-12,
        format!("{s:.1} (rel {rel:.1e})"),
    );
}
