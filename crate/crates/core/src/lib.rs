//! Fixed-point Morlet wavelet tone detector.
//!
//! The pipeline mirrors a small FPGA design: an analog stimulus is sampled
//! by an inverting pre-amp and a dual 14-bit ADC, shipped over a 34-bit SPI
//! frame, and pushed through a complex FIR whose taps are a quantized Morlet
//! wavelet. The magnitude-squared output drives an eight-step LED bar.
//!
//! - [`signals`]: DC, tone and chirp stimuli in volts.
//! - [`wavelets`]: Morlet and Haar coefficient synthesis.
//! - [`quantize`]: Q14 conversion (scale by 8191, truncate toward zero).
//! - [`frontend`]: pre-amp/ADC transfer function, SPI frame codec, rate arithmetic.
//! - [`detector`]: streaming complex FIR, thresholds, LED level, float reference path.
//! - [`harness`]: experiment configuration, sweeps, chirps, coefficient export.

// Negated float comparisons below double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detector;
pub mod error;
pub mod frontend;
pub mod harness;
pub mod quantize;
pub mod signals;
pub mod wavelets;

pub use error::{Error, Result};
