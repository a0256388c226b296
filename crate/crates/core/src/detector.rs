//! Streaming complex FIR detector.
//!
//! Each new ADC code enters slot 0 of the tap line and every older tap moves
//! up one slot, so `taps[i]` holds `x[n - i]` and the dot product with the
//! coefficient arrays is the convolution `y[n] = sum_i x[n - i] w[i]`. The real
//! and imaginary sums are squared and added; no square root is taken.
//!
//! The LED bar compares the response against eight thresholds placed in the
//! middle of eight equal segments of the calibrated maximum `M`:
//! `full[k] = (2k - 1) M / 16`. The comparison itself runs on truncated words:
//! the top 18 bits of the response against the top 16 bits of each threshold,
//! aligned on the same bit position.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::frontend::{normalized_input, sample_stream, AdcConfig};
use crate::quantize::{Q14CoefficientBank, Q14};
use crate::signals::{gen_tone_len, ToneSpec};
use crate::wavelets::{FloatCoefficientBank, WaveletSpec};

pub const LED_COUNT: usize = 8;
/// Phases tried when searching for the calibration maximum.
pub const CALIBRATION_PHASES: usize = 8;
/// Calibration tone length in multiples of the tap count.
pub const CALIBRATION_LENGTHS: usize = 3;

const CLIPPED_RESPONSE_BITS: u32 = 18;
const CLIPPED_THRESHOLD_BITS: u32 = 16;
const ADC_FULL_SCALE: i64 = 8192;

/// Bit width of the magnitude-squared register and the clipping windows
/// derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResponseFormat {
    pub width_bits: u32,
}

impl ResponseFormat {
    /// The 50-bit register: responses compare on bits 49..32, thresholds
    /// keep bits 49..34.
    pub const PAPER: ResponseFormat = ResponseFormat { width_bits: 50 };

    pub fn new(width_bits: u32) -> Result<Self> {
        if !(CLIPPED_RESPONSE_BITS..=127).contains(&width_bits) {
            return Err(Error::InvalidArgument(format!(
                "response width must be in 18..=127 bits, got {width_bits}"
            )));
        }
        Ok(Self { width_bits })
    }

    /// The 50-bit format, widened if `bank` can produce larger responses.
    pub fn for_bank(bank: &Q14CoefficientBank) -> Self {
        Self {
            width_bits: required_response_bits(bank).max(Self::PAPER.width_bits),
        }
    }

    pub fn response_shift(&self) -> u32 {
        self.width_bits - CLIPPED_RESPONSE_BITS
    }

    pub fn threshold_shift(&self) -> u32 {
        self.width_bits - CLIPPED_THRESHOLD_BITS
    }

    pub fn holds(&self, mag_sq: u128) -> bool {
        mag_sq >> self.width_bits == 0
    }

    /// Top 18 bits of the response register.
    pub fn clip(&self, r: Response) -> u32 {
        ((r.mag_sq >> self.response_shift()) & ((1 << CLIPPED_RESPONSE_BITS) - 1)) as u32
    }
}

impl Default for ResponseFormat {
    fn default() -> Self {
        Self::PAPER
    }
}

/// Real and imaginary dot products for one output sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComplexAccumulator {
    pub real_part: i64,
    pub imag_part: i64,
}

impl ComplexAccumulator {
    pub fn magnitude_squared(&self) -> Response {
        let re = self.real_part as i128;
        let im = self.imag_part as i128;
        Response {
            mag_sq: (re * re + im * im) as u128,
        }
    }
}

/// Magnitude-squared detector output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Response {
    pub mag_sq: u128,
}

impl Response {
    pub fn new(mag_sq: u128) -> Self {
        Self { mag_sq }
    }
}

/// Number of LEDs lit, `0..=8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LedLevel(u8);

impl LedLevel {
    pub fn value(self) -> u8 {
        self.0
    }

    /// Per-LED on/off flags, LED 1 first.
    pub fn flags(self) -> [bool; LED_COUNT] {
        std::array::from_fn(|k| k < self.0 as usize)
    }
}

/// Tap line plus quantized coefficients. One instance per input stream.
#[derive(Debug, Clone)]
pub struct DetectorState {
    taps: Vec<Q14>,
    bank: Q14CoefficientBank,
    last: ComplexAccumulator,
}

impl DetectorState {
    pub fn new(bank: Q14CoefficientBank) -> Self {
        Self {
            taps: vec![Q14::ZERO; bank.tap_count()],
            bank,
            last: ComplexAccumulator::default(),
        }
    }

    pub fn bank(&self) -> &Q14CoefficientBank {
        &self.bank
    }

    /// Current tap line, newest sample first.
    pub fn taps(&self) -> &[Q14] {
        &self.taps
    }

    /// Accumulators from the most recent push.
    pub fn accumulator(&self) -> ComplexAccumulator {
        self.last
    }

    pub fn reset(&mut self) {
        self.taps.fill(Q14::ZERO);
        self.last = ComplexAccumulator::default();
    }

    pub fn push_sample(&mut self, sample: Q14) -> Response {
        let n = self.taps.len();
        if n == 0 {
            return Response::default();
        }
        self.taps.copy_within(0..n - 1, 1);
        self.taps[0] = sample;

        let dot = |coeffs: &[Q14]| -> i64 {
            self.taps
                .iter()
                .zip(coeffs)
                .map(|(&x, &c)| i64::from(x) * i64::from(c))
                .sum()
        };
        self.last = ComplexAccumulator {
            real_part: dot(self.bank.real()),
            imag_part: dot(self.bank.imag()),
        };
        self.last.magnitude_squared()
    }

    pub fn process(&mut self, samples: &[Q14]) -> Vec<Response> {
        samples.iter().map(|&s| self.push_sample(s)).collect()
    }
}

/// Response clipped to bits 49..32 of the 50-bit register.
pub fn clip_response(r: Response) -> u32 {
    ResponseFormat::PAPER.clip(r)
}

/// The eight LED thresholds, full width and clipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdBank {
    pub full: [u128; LED_COUNT],
    pub clipped: [u32; LED_COUNT],
    pub max_response: u128,
    pub format: ResponseFormat,
}

impl ThresholdBank {
    pub fn from_max(max_response: u128, format: ResponseFormat) -> Result<Self> {
        if max_response == 0 {
            return Err(Error::Calibration("maximum response is zero".into()));
        }
        if !format.holds(max_response) {
            return Err(Error::Calibration(format!(
                "maximum response {max_response} does not fit in {} bits",
                format.width_bits
            )));
        }
        let full: [u128; LED_COUNT] =
            std::array::from_fn(|i| (2 * (i as u128 + 1) - 1) * max_response / 16);
        let clipped = full.map(|t| (t >> format.threshold_shift()) as u32);
        Ok(Self {
            full,
            clipped,
            max_response,
            format,
        })
    }

    /// LED level using the clipped comparison.
    pub fn level(&self, r: Response) -> LedLevel {
        led_level(r, self)
    }
}

/// Count of clipped thresholds strictly exceeded by the clipped response.
pub fn led_level(r: Response, t: &ThresholdBank) -> LedLevel {
    let shown = t.format.clip(r);
    let align = CLIPPED_RESPONSE_BITS - CLIPPED_THRESHOLD_BITS;
    LedLevel(t.clipped.iter().filter(|&&c| shown > c << align).count() as u8)
}

/// Reference LED level from the full-width comparison.
pub fn led_level_full(r: Response, t: &ThresholdBank) -> LedLevel {
    LedLevel(t.full.iter().filter(|&&f| r.mag_sq > f).count() as u8)
}

/// Full-scale tone for an ADC configuration: swings exactly across the window.
pub fn full_scale_tone(adc: &AdcConfig, freq: f64, phase: f64) -> Result<ToneSpec> {
    ToneSpec::new(freq, adc.half_window(), adc.v_ref, phase)
}

fn calibration_spec(spec: Option<&WaveletSpec>) -> Result<WaveletSpec> {
    spec.copied()
        .ok_or_else(|| Error::Calibration("bank has no center frequency to calibrate at".into()))
}

fn calibration_phases() -> impl Iterator<Item = f64> {
    (0..CALIBRATION_PHASES).map(|p| TAU * p as f64 / CALIBRATION_PHASES as f64)
}

/// Run full-scale tones at the bank's center frequency through the ADC model
/// and detector, take the largest response, and derive the thresholds.
pub fn calibrate_max_response(bank: &Q14CoefficientBank, adc: &AdcConfig) -> Result<ThresholdBank> {
    let spec = calibration_spec(bank.source())?;
    let (sum_re, sum_im) = bank.abs_sums();
    if sum_re == 0 && sum_im == 0 {
        return Err(Error::Calibration("coefficient bank is all zero".into()));
    }
    adc.validate()?;
    let len = CALIBRATION_LENGTHS * bank.tap_count();
    let mut max = 0u128;
    for phase in calibration_phases() {
        let tone = full_scale_tone(adc, spec.center_freq, phase)?;
        let codes = sample_stream(&gen_tone_len(&tone, spec.sample_rate, len)?, adc)?;
        let mut det = DetectorState::new(bank.clone());
        for &c in &codes {
            max = max.max(det.push_sample(c).mag_sq);
        }
    }
    ThresholdBank::from_max(max, ResponseFormat::for_bank(bank))
}

/// Float counterpart of [`calibrate_max_response`]: the largest
/// [`float_response`] to the same unquantized stimuli.
pub fn float_calibration_max(bank: &FloatCoefficientBank, adc: &AdcConfig) -> Result<f64> {
    let spec = calibration_spec(bank.spec.as_ref())?;
    let len = CALIBRATION_LENGTHS * bank.len();
    let mut max = 0.0f64;
    for phase in calibration_phases() {
        let tone = full_scale_tone(adc, spec.center_freq, phase)?;
        let seq = gen_tone_len(&tone, spec.sample_rate, len)?;
        let signal: Vec<f64> = seq.samples.iter().map(|&v| normalized_input(v, adc)).collect();
        max = float_response(bank, &signal).into_iter().fold(max, f64::max);
    }
    if max == 0.0 {
        return Err(Error::Calibration("float response is zero".into()));
    }
    Ok(max)
}

/// Sliding complex dot product in floating point, `|y[n]|^2` per sample.
///
/// Samples before the start of `signal` count as zero, matching a tap line
/// that starts cleared.
pub fn float_response(bank: &FloatCoefficientBank, signal: &[f64]) -> Vec<f64> {
    (0..signal.len())
        .map(|n| {
            let depth = bank.len().min(n + 1);
            let (mut re, mut im) = (0.0, 0.0);
            for i in 0..depth {
                let x = signal[n - i];
                re += x * bank.real[i];
                im += x * bank.imag[i];
            }
            re * re + im * im
        })
        .collect()
}

fn ceil_log2(m: u128) -> u32 {
    if m <= 1 {
        0
    } else {
        128 - (m - 1).leading_zeros()
    }
}

/// Signed accumulator width that cannot overflow for any 14-bit input:
/// `ceil(log2(8192 * max(sum|re|, sum|im|))) + 1`.
pub fn required_accumulator_bits(bank: &Q14CoefficientBank) -> u32 {
    let (re, im) = bank.abs_sums();
    let worst = ADC_FULL_SCALE as u128 * re.max(im) as u128;
    if worst == 0 {
        return 1;
    }
    ceil_log2(worst) + 1
}

/// Unsigned width that holds the largest possible magnitude-squared value.
pub fn required_response_bits(bank: &Q14CoefficientBank) -> u32 {
    let (re, im) = bank.abs_sums();
    let re = ADC_FULL_SCALE as u128 * re as u128;
    let im = ADC_FULL_SCALE as u128 * im as u128;
    let bound = re * re + im * im;
    128 - bound.leading_zeros()
}
