//! Wavelet coefficient synthesis.
//!
//! The Morlet bank is a complex exponential at the detector's center frequency
//! under a Gaussian envelope whose standard deviation is `width / center_freq`
//! seconds. Taps are sampled at their centers on a symmetric odd-length grid,
//! so the real part is even and the imaginary part odd about the middle tap.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest positive Q14 coefficient code; one LSB is `1 / Q14_SCALE`.
pub const Q14_SCALE: f64 = 8191.0;

pub const DEFAULT_CENTER_FREQ: f64 = 6_000.0;
pub const DEFAULT_SAMPLE_RATE: f64 = 20_000.0;
pub const DEFAULT_TAP_COUNT: usize = 133;
/// Envelope width of the default bank. Keeps both edge taps below one Q14 LSB
/// (see [`max_lsb_safe_width`]).
pub const DEFAULT_WIDTH: f64 = 4.5;

/// Morlet parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub center_freq: f64,
    pub width: f64,
    pub sample_rate: f64,
    pub tap_count: usize,
}

impl WaveletSpec {
    pub fn new(center_freq: f64, width: f64, sample_rate: f64, tap_count: usize) -> Result<Self> {
        let spec = Self {
            center_freq,
            width,
            sample_rate,
            tap_count,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 6 kHz at 20 ksps over 133 taps.
    ///
    /// Panics if the default width no longer keeps the edge taps below one LSB.
    pub fn paper_default() -> Self {
        let spec = Self {
            center_freq: DEFAULT_CENTER_FREQ,
            width: DEFAULT_WIDTH,
            sample_rate: DEFAULT_SAMPLE_RATE,
            tap_count: DEFAULT_TAP_COUNT,
        };
        assert!(
            spec.width <= max_lsb_safe_width(spec.center_freq, spec.sample_rate, spec.tap_count),
            "default Morlet width leaves edge taps above one Q14 LSB"
        );
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) {
            return Err(invalid(format!("sample rate must be positive, got {}", self.sample_rate)));
        }
        if !(self.center_freq > 0.0) {
            return Err(invalid(format!("center frequency must be positive, got {}", self.center_freq)));
        }
        if self.center_freq >= self.sample_rate / 2.0 {
            return Err(Error::NyquistViolation {
                freq: self.center_freq,
                sample_rate: self.sample_rate,
            });
        }
        if !(self.width > 0.0) {
            return Err(invalid(format!("width must be positive, got {}", self.width)));
        }
        if self.tap_count == 0 || self.tap_count.is_multiple_of(2) {
            return Err(invalid(format!("tap count must be odd, got {}", self.tap_count)));
        }
        Ok(())
    }

    /// Gaussian standard deviation in seconds.
    pub fn sigma(&self) -> f64 {
        self.width / self.center_freq
    }

    /// Offset of the outermost tap from the center, in seconds.
    pub fn half_span(&self) -> f64 {
        ((self.tap_count - 1) / 2) as f64 / self.sample_rate
    }

    /// Envelope value at the outermost taps.
    pub fn edge_envelope(&self) -> f64 {
        gaussian(self.half_span(), self.sigma())
    }
}

impl Default for WaveletSpec {
    fn default() -> Self {
        Self::paper_default()
    }
}

/// Largest width for which the envelope at the outermost tap stays below one
/// Q14 LSB: `t_edge / sigma > sqrt(2 ln 8191)`.
pub fn max_lsb_safe_width(center_freq: f64, sample_rate: f64, tap_count: usize) -> f64 {
    let t_edge = (tap_count.saturating_sub(1) / 2) as f64 / sample_rate;
    t_edge * center_freq / (2.0 * Q14_SCALE.ln()).sqrt()
}

fn gaussian(t: f64, sigma: f64) -> f64 {
    (-(t * t) / (2.0 * sigma * sigma)).exp()
}

/// Paired real/imaginary float coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatCoefficientBank {
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
    /// `None` for banks that are not Morlet-derived (Haar).
    pub spec: Option<WaveletSpec>,
}

impl FloatCoefficientBank {
    pub fn len(&self) -> usize {
        self.real.len()
    }

    pub fn is_empty(&self) -> bool {
        self.real.is_empty()
    }

    /// Both edge taps are below one Q14 LSB in magnitude.
    pub fn edges_below_lsb(&self) -> bool {
        let lsb = 1.0 / Q14_SCALE;
        match (self.real.first(), self.imag.first(), self.real.last(), self.imag.last()) {
            (Some(r0), Some(i0), Some(rn), Some(i_n)) => {
                r0.abs() < lsb && i0.abs() < lsb && rn.abs() < lsb && i_n.abs() < lsb
            }
            _ => false,
        }
    }
}

/// Sample the complex Morlet wavelet on `spec.tap_count` tap centers.
pub fn morlet(spec: &WaveletSpec) -> Result<FloatCoefficientBank> {
    spec.validate()?;
    let n = spec.tap_count;
    let mid = (n - 1) / 2;
    let sigma = spec.sigma();
    let mut real = vec![0.0; n];
    let mut imag = vec![0.0; n];
    // Evaluate the right half and mirror it so the symmetry is exact.
    for k in 0..=mid {
        let t = k as f64 / spec.sample_rate;
        let env = gaussian(t, sigma);
        let arg = TAU * spec.center_freq * t;
        let (s, c) = arg.sin_cos();
        real[mid + k] = c * env;
        imag[mid + k] = s * env;
        real[mid - k] = c * env;
        imag[mid - k] = -s * env;
    }
    imag[mid] = 0.0;
    Ok(FloatCoefficientBank {
        real,
        imag,
        spec: Some(*spec),
    })
}

/// Result of rescaling a reference tap count to another center frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TapScaling {
    /// `round(N_ref * (f_ref / f) * (fs / fs_ref))`: the raw per-channel count.
    pub scaled: usize,
    /// `scaled`, bumped to the next odd value if needed.
    pub taps: usize,
}

impl TapScaling {
    /// Real plus imaginary coefficient count at the raw scaled length.
    pub fn scaled_total(&self) -> usize {
        2 * self.scaled
    }
}

/// Scale a reference wavelet's length inversely with center frequency.
pub fn scale_tap_count(center_freq: f64, sample_rate: f64, reference: &WaveletSpec) -> Result<TapScaling> {
    if !(center_freq > 0.0) {
        return Err(invalid(format!("center frequency must be positive, got {center_freq}")));
    }
    if !(sample_rate > 0.0) {
        return Err(invalid(format!("sample rate must be positive, got {sample_rate}")));
    }
    let ratio = (reference.center_freq / center_freq) * (sample_rate / reference.sample_rate);
    let scaled = (reference.tap_count as f64 * ratio).round() as usize;
    let scaled = scaled.max(1);
    let taps = if scaled.is_multiple_of(2) { scaled + 1 } else { scaled };
    Ok(TapScaling { scaled, taps })
}

/// Odd tap count for a wavelet at `center_freq`, scaled from `reference`.
pub fn tap_count_for(center_freq: f64, sample_rate: f64, reference: &WaveletSpec) -> Result<usize> {
    scale_tap_count(center_freq, sample_rate, reference).map(|s| s.taps)
}

/// Haar wavelet: `+1` on the first half of the support, `-1` on the second.
pub fn haar(n_samples: usize) -> Result<FloatCoefficientBank> {
    if n_samples < 2 || !n_samples.is_multiple_of(2) {
        return Err(invalid(format!("Haar length must be even and >= 2, got {n_samples}")));
    }
    let half = n_samples / 2;
    let real = (0..n_samples).map(|i| if i < half { 1.0 } else { -1.0 }).collect();
    Ok(FloatCoefficientBank {
        real,
        imag: vec![0.0; n_samples],
        spec: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_bank() -> FloatCoefficientBank {
        morlet(&WaveletSpec::paper_default()).unwrap()
    }

    #[test]
    fn center_tap_is_unity() {
        let bank = default_bank();
        assert_eq!(bank.real[66], 1.0);
        assert_eq!(bank.imag[66], 0.0);
        let peak = bank
            .real
            .iter()
            .chain(&bank.imag)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(peak, 1.0);
    }

    #[test]
    fn default_bank_has_133_taps_per_channel() {
        let bank = default_bank();
        assert_eq!(bank.real.len(), 133);
        assert_eq!(bank.imag.len(), 133);
        assert_eq!(bank.real.len() + bank.imag.len(), 266);
    }

    #[test]
    fn symmetry_is_tap_exact() {
        let bank = default_bank();
        let n = bank.len();
        for k in 0..n {
            assert_eq!(bank.real[k], bank.real[n - 1 - k]);
            assert_eq!(bank.imag[k], -bank.imag[n - 1 - k]);
        }
    }

    #[test]
    fn default_width_is_lsb_safe() {
        let limit = max_lsb_safe_width(6e3, 20e3, 133);
        assert!((limit - 4.6637).abs() < 1e-3, "{limit}");
        assert!(DEFAULT_WIDTH <= limit);
        let bank = default_bank();
        assert!(bank.edges_below_lsb());
        // a wider envelope fails the edge check
        let wide = morlet(&WaveletSpec::new(6e3, 4.8, 20e3, 133).unwrap()).unwrap();
        assert!(!wide.edges_below_lsb());
    }

    #[test]
    fn zero_mean() {
        let bank = default_bank();
        let n = bank.len() as f64;
        assert!(bank.real.iter().sum::<f64>().abs() < 1e-6 * n);
        assert!(bank.imag.iter().sum::<f64>().abs() < 1e-6 * n);
    }

    #[test]
    fn morlet_rejects_bad_specs() {
        assert!(matches!(
            WaveletSpec::new(10e3, 4.5, 20e3, 133),
            Err(Error::NyquistViolation { .. })
        ));
        assert!(matches!(
            WaveletSpec::new(6e3, 4.5, 20e3, 132),
            Err(Error::InvalidArgument(_))
        ));
        assert!(WaveletSpec::new(6e3, 0.0, 20e3, 133).is_err());
        let bad = WaveletSpec {
            tap_count: 4,
            ..WaveletSpec::paper_default()
        };
        assert!(morlet(&bad).is_err());
    }

    #[test]
    fn tap_scaling() {
        let reference = WaveletSpec::paper_default();
        let one_k = scale_tap_count(1e3, 20e3, &reference).unwrap();
        assert_eq!(one_k.scaled, 798);
        assert_eq!(one_k.scaled_total(), 1596);
        assert_eq!(one_k.taps, 799);
        assert_eq!(tap_count_for(6e3, 20e3, &reference).unwrap(), 133);
        assert_eq!(tap_count_for(3e3, 20e3, &reference).unwrap(), 267);
        assert!(tap_count_for(0.0, 20e3, &reference).is_err());
        assert!(tap_count_for(-1.0, 20e3, &reference).is_err());
    }

    #[test]
    fn haar_shapes() {
        assert_eq!(haar(2).unwrap().real, vec![1.0, -1.0]);
        let four = haar(4).unwrap();
        assert_eq!(four.real, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(four.imag, vec![0.0; 4]);
        for n in (2..40).step_by(2) {
            assert_eq!(haar(n).unwrap().real.iter().sum::<f64>(), 0.0);
        }
        assert!(haar(0).is_err());
        assert!(haar(3).is_err());
    }
}
