//! Analog-domain stimuli: DC levels, biased tones and linear chirps.
//!
//! Sample `n` of every sequence sits at `t = n / fs`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Absolute input limit of the ADC pins; stimuli must stay inside `[0, V_ABS_MAX]`.
pub const V_ABS_MAX: f64 = 3.3;

/// Sampled voltages with their sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageSequence {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
}

impl VoltageSequence {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) {
            return Err(invalid(format!("sample rate must be positive, got {sample_rate}")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `n` in seconds.
    pub fn time_of(&self, n: usize) -> f64 {
        n as f64 / self.sample_rate
    }
}

/// A sinusoid riding on a DC bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneSpec {
    pub frequency: f64,
    pub amplitude: f64,
    pub dc_bias: f64,
    #[serde(default)]
    pub phase: f64,
}

impl ToneSpec {
    pub fn new(frequency: f64, amplitude: f64, dc_bias: f64, phase: f64) -> Result<Self> {
        let spec = Self {
            frequency,
            amplitude,
            dc_bias,
            phase,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency >= 0.0) {
            return Err(invalid(format!("tone frequency must be >= 0, got {}", self.frequency)));
        }
        if !self.phase.is_finite() {
            return Err(invalid("tone phase must be finite"));
        }
        check_swing(self.amplitude, self.dc_bias)
    }
}

/// Linear frequency sweep from `f_start` to `f_end` over `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpSpec {
    pub f_start: f64,
    pub f_end: f64,
    pub duration: f64,
    pub amplitude: f64,
    pub dc_bias: f64,
}

impl ChirpSpec {
    pub fn new(f_start: f64, f_end: f64, duration: f64, amplitude: f64, dc_bias: f64) -> Result<Self> {
        let spec = Self {
            f_start,
            f_end,
            duration,
            amplitude,
            dc_bias,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(invalid(format!("chirp duration must be positive, got {}", self.duration)));
        }
        if !(self.f_start >= 0.0 && self.f_end >= 0.0) {
            return Err(invalid("chirp frequencies must be >= 0"));
        }
        check_swing(self.amplitude, self.dc_bias)
    }

    /// Instantaneous frequency at time `t`.
    pub fn frequency_at(&self, t: f64) -> f64 {
        self.f_start + (self.f_end - self.f_start) * t / self.duration
    }

    /// Time at which the sweep passes `freq`, if it does within `[0, duration]`.
    pub fn crossing_time(&self, freq: f64) -> Option<f64> {
        let span = self.f_end - self.f_start;
        if span == 0.0 {
            return None;
        }
        let t = (freq - self.f_start) / span * self.duration;
        (0.0..=self.duration).contains(&t).then_some(t)
    }

    fn phase_at(&self, t: f64) -> f64 {
        TAU * (self.f_start * t + (self.f_end - self.f_start) * t * t / (2.0 * self.duration))
    }
}

fn check_swing(amplitude: f64, dc_bias: f64) -> Result<()> {
    if !(amplitude >= 0.0) {
        return Err(invalid(format!("amplitude must be >= 0, got {amplitude}")));
    }
    if !(dc_bias - amplitude >= 0.0 && dc_bias + amplitude <= V_ABS_MAX) {
        return Err(invalid(format!(
            "swing {dc_bias} +/- {amplitude} V leaves the [0, {V_ABS_MAX}] V input range"
        )));
    }
    Ok(())
}

fn check_nyquist(freq: f64, fs: f64) -> Result<()> {
    if !(fs > 0.0) {
        return Err(invalid(format!("sample rate must be positive, got {fs}")));
    }
    if fs <= 2.0 * freq {
        return Err(Error::NyquistViolation {
            freq,
            sample_rate: fs,
        });
    }
    Ok(())
}

fn sample_count(duration: f64, fs: f64) -> Result<usize> {
    if !(duration > 0.0) {
        return Err(invalid(format!("duration must be positive, got {duration}")));
    }
    Ok(((duration * fs).round() as usize).max(1))
}

/// `n` samples of a constant level.
pub fn gen_dc(level: f64, n: usize, fs: f64) -> Result<VoltageSequence> {
    if n == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    VoltageSequence::new(vec![level; n], fs)
}

/// Tone lasting `duration` seconds (rounded to whole samples).
pub fn gen_tone(spec: &ToneSpec, fs: f64, duration: f64) -> Result<VoltageSequence> {
    check_nyquist(spec.frequency, fs)?;
    gen_tone_len(spec, fs, sample_count(duration, fs)?)
}

/// Tone of exactly `n` samples.
pub fn gen_tone_len(spec: &ToneSpec, fs: f64, n: usize) -> Result<VoltageSequence> {
    spec.validate()?;
    check_nyquist(spec.frequency, fs)?;
    if n == 0 {
        return Err(invalid("sample count must be >= 1"));
    }
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            spec.dc_bias + spec.amplitude * (TAU * spec.frequency * t + spec.phase).sin()
        })
        .collect();
    VoltageSequence::new(samples, fs)
}

/// Continuous-phase linear chirp.
pub fn gen_chirp(spec: &ChirpSpec, fs: f64) -> Result<VoltageSequence> {
    spec.validate()?;
    check_nyquist(spec.f_start.max(spec.f_end), fs)?;
    let n = sample_count(spec.duration, fs)?;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            spec.dc_bias + spec.amplitude * spec.phase_at(t).sin()
        })
        .collect();
    VoltageSequence::new(samples, fs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dc_levels() {
        assert_eq!(gen_dc(2.9, 4, 20e3).unwrap().samples, vec![2.9; 4]);
        assert_eq!(gen_dc(0.0, 1, 1.0).unwrap().samples, vec![0.0]);
        assert_eq!(gen_dc(1.65, 3, 20e3).unwrap().samples, vec![1.65; 3]);
    }

    #[test]
    fn dc_rejects_bad_arguments() {
        assert!(matches!(gen_dc(1.0, 0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(gen_dc(1.0, 3, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(gen_dc(1.0, 3, -5.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn tone_starts_at_bias() {
        let spec = ToneSpec::new(6e3, 1.25, 1.65, 0.0).unwrap();
        let seq = gen_tone(&spec, 20e3, 0.01).unwrap();
        assert_eq!(seq.samples[0], 1.65);
        assert_eq!(seq.len(), 200);
    }

    #[test]
    fn tone_quarter_period_steps() {
        let spec = ToneSpec::new(5e3, 1.0, 1.65, 0.0).unwrap();
        let seq = gen_tone_len(&spec, 20e3, 8).unwrap();
        let expected = [1.65, 2.65, 1.65, 0.65, 1.65, 2.65, 1.65, 0.65];
        for (got, want) in seq.samples.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn tone_nyquist() {
        let spec = ToneSpec::new(6e3, 1.25, 1.65, 0.0).unwrap();
        assert!(matches!(
            gen_tone(&spec, 11e3, 1.0),
            Err(Error::NyquistViolation { .. })
        ));
        // exactly 2f is also rejected
        assert!(gen_tone(&spec, 12e3, 1.0).is_err());
    }

    #[test]
    fn tone_swing_limits() {
        assert!(ToneSpec::new(1e3, 2.0, 1.65, 0.0).is_err());
        assert!(ToneSpec::new(1e3, -0.1, 1.65, 0.0).is_err());
        assert!(ToneSpec::new(1e3, 1.65, 1.65, 0.0).is_ok());
    }

    #[test]
    fn zero_frequency_chirp_is_flat() {
        let spec = ChirpSpec::new(0.0, 0.0, 0.01, 1.0, 1.65).unwrap();
        let seq = gen_chirp(&spec, 20e3).unwrap();
        assert!(seq.samples.iter().all(|&v| v == 1.65));
    }

    #[test]
    fn chirp_crosses_6k_at_expected_time() {
        let spec = ChirpSpec::new(1e3, 9e3, 1.0, 1.0, 1.65).unwrap();
        assert_eq!(spec.crossing_time(6e3), Some(0.625));
        assert_eq!(spec.frequency_at(0.625), 6e3);
        assert_eq!(spec.crossing_time(9.5e3), None);
    }

    #[test]
    fn degenerate_chirp_matches_tone() {
        let chirp = ChirpSpec::new(6e3, 6e3, 0.05, 1.25, 1.65).unwrap();
        let tone = ToneSpec::new(6e3, 1.25, 1.65, 0.0).unwrap();
        let a = gen_chirp(&chirp, 20e3).unwrap();
        let b = gen_tone(&tone, 20e3, 0.05).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn chirp_nyquist_uses_highest_frequency() {
        let spec = ChirpSpec::new(500.0, 10e3, 0.1, 1.0, 1.65).unwrap();
        assert!(matches!(gen_chirp(&spec, 20e3), Err(Error::NyquistViolation { .. })));
    }
}
