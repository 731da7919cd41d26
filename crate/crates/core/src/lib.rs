//! Synthesis and spectral verification of Poisson pulse trains and
//! packetized network traffic with heavy-tailed statistics.
//!
//! The crate has three layers:
//!
//! * sampling primitives ([`distributions`]) and special functions
//!   ([`specfun`], [`quad`]);
//! * signal models: analytic and Monte Carlo pulse-train spectra
//!   ([`pulse_model`]) and the web-traffic packet simulator
//!   ([`traffic_sim`]);
//! * estimation: periodogram spectra, log-binning and slope fits
//!   ([`spectral`]), plus plain-text interchange formats ([`io`]).

// `!(x > 0.0)` guards reject NaN along with the out-of-range values;
// published quadrature/Lanczos constants keep their full printed digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod distributions;
pub mod error;
pub mod io;
pub mod pulse_model;
pub mod quad;
pub mod specfun;
pub mod spectral;
pub mod traffic_sim;

pub use error::{Error, Result};
