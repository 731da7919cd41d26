//! Random laws used by the pulse and traffic models.
//!
//! Every law is an immutable value object with an exact CDF/PDF and an
//! inverse-CDF sampler driven by an explicit uniform variate `u ∈ [0, 1)`.
//! Keeping the uniform stream outside the law makes every sampler a pure
//! function and lets tests pin exact inputs instead of fighting statistics.

use rand::RngCore;

use crate::error::{Error, Result};

/// Source of uniform variates on `[0, 1)`.
///
/// Implemented for the crate's seeded generator; test code can implement it
/// over a fixed slice of variates.
pub trait UnitUniform {
    fn next_unit(&mut self) -> f64;
}

impl UnitUniform for rand_chacha::ChaCha8Rng {
    fn next_unit(&mut self) -> f64 {
        // 53 random bits into [0, 1), the usual f64 construction.
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn check_unit(u: f64) -> Result<()> {
    if (0.0..1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain(format!("uniform variate {u} outside [0, 1)")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Truncated power law `P(T) ∝ T^alpha` on `[t_min, t_max]`.
///
/// The density is
/// `P(T) = (alpha+1) · T^alpha / (t_max^(alpha+1) − t_min^(alpha+1))`
/// inside the support and zero outside; `alpha = −1` uses the logarithmic
/// normalization `1 / (T · ln(t_max/t_min))`, where the generic formula is
/// singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPowerLaw {
    alpha: f64,
    t_min: f64,
    t_max: f64,
}

impl TruncatedPowerLaw {
    pub fn new(alpha: f64, t_min: f64, t_max: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite, got {alpha}"
            )));
        }
        check_positive("t_min", t_min)?;
        if !t_max.is_finite() || t_max <= t_min {
            return Err(Error::InvalidParameter(format!(
                "t_max must exceed t_min, got t_min={t_min}, t_max={t_max}"
            )));
        }
        Ok(Self {
            alpha,
            t_min,
            t_max,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn is_log_branch(&self) -> bool {
        self.alpha == -1.0
    }

    /// Normalization constant of the density: `P(T) = normalization() · T^alpha`.
    pub fn normalization(&self) -> f64 {
        if self.is_log_branch() {
            1.0 / (self.t_max / self.t_min).ln()
        } else {
            let a1 = self.alpha + 1.0;
            a1 / (self.t_max.powf(a1) - self.t_min.powf(a1))
        }
    }

    /// Inverse-CDF sample: the unique `T` with `cdf(T) = u`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        let t = if self.is_log_branch() {
            self.t_min * (self.t_max / self.t_min).powf(u)
        } else {
            let a1 = self.alpha + 1.0;
            let lo = self.t_min.powf(a1);
            let hi = self.t_max.powf(a1);
            (lo + u * (hi - lo)).powf(1.0 / a1)
        };
        Ok(t.clamp(self.t_min, self.t_max))
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= self.t_min {
            return 0.0;
        }
        if t >= self.t_max {
            return 1.0;
        }
        if self.is_log_branch() {
            (t / self.t_min).ln() / (self.t_max / self.t_min).ln()
        } else {
            let a1 = self.alpha + 1.0;
            let lo = self.t_min.powf(a1);
            (t.powf(a1) - lo) / (self.t_max.powf(a1) - lo)
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t < self.t_min || t > self.t_max {
            0.0
        } else {
            self.normalization() * t.powf(self.alpha)
        }
    }
}

/// Positive Cauchy (half-Cauchy) law `P(x) = (2/π) · s / (s² + x²)` on `x ≥ 0`.
///
/// The CDF is `(2/π)·atan(x/s)`; the median is exactly `s`. The mean is
/// infinite, so consumers that materialize per-sample work should cap draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveCauchy {
    scale: f64,
}

impl PositiveCauchy {
    pub fn new(scale: f64) -> Result<Self> {
        check_positive("scale", scale)?;
        Ok(Self { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Inverse-CDF sample `x = s·tan(π·u/2)`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.scale * (std::f64::consts::FRAC_PI_2 * u).tan())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            std::f64::consts::FRAC_2_PI * (x / self.scale).atan()
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            std::f64::consts::FRAC_2_PI * self.scale / (self.scale * self.scale + x * x)
        }
    }
}

/// Scale drawn log-uniformly over a decade span: `base · 10^(u · decades)`.
///
/// `log10(sample / base)` is uniform on `[0, decades]`; `decades = 0`
/// degenerates to the point mass at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogUniformScale {
    base: f64,
    decades: f64,
}

impl LogUniformScale {
    pub fn new(base: f64, decades: f64) -> Result<Self> {
        check_positive("base", base)?;
        if !decades.is_finite() || decades < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "decades must be nonnegative and finite, got {decades}"
            )));
        }
        Ok(Self { base, decades })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn decades(&self) -> f64 {
        self.decades
    }

    /// Largest attainable value, `base · 10^decades`.
    pub fn max_value(&self) -> f64 {
        self.base * 10f64.powf(self.decades)
    }

    pub fn sample(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(self.base * 10f64.powf(u * self.decades))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.base {
            return 0.0;
        }
        if self.decades == 0.0 {
            return 1.0;
        }
        ((x / self.base).log10() / self.decades).min(1.0)
    }
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `sorted`
/// samples and an analytic CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let c = cdf(x);
        let lo = i as f64 / n;
        let hi = (i as f64 + 1.0) / n;
        worst = worst.max((c - lo).abs()).max((hi - c).abs());
    }
    worst
}

/// Exponential inter-arrival law with the given mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialLaw {
    mean: f64,
}

impl ExponentialLaw {
    pub fn new(mean: f64) -> Result<Self> {
        check_positive("mean", mean)?;
        Ok(Self { mean })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Inverse-CDF sample `−mean · ln(1 − u)`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        check_unit(u)?;
        Ok(-self.mean * (-u).ln_1p())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x / self.mean).exp_m1()
        }
    }
}
