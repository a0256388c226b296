//! Pre-amp, dual 14-bit ADC and SPI transport.
//!
//! The pre-amp is fixed at gain code `0x01` (gain -1) before the first sample,
//! so inputs below the 1.65 V reference read as positive codes: 0.4 V gives
//! `0x1FFF` and 2.9 V gives `0x2000`.
//!
//! A conversion is shipped as a 34-bit serial frame:
//!
//! ```txt
//!  idx: 0 1 | 2 ........ 15 | 16 17 | 18 ....... 31 | 32 33
//!       pad |  channel A    |  pad  |   channel B   |  pad
//!           |  MSB first    |       |   MSB first   |
//! ```
//!
//! Pad bits go out as zero and are ignored on receive.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quantize::Q14;
use crate::signals::VoltageSequence;

pub const FRAME_BITS: usize = 34;
const CHANNEL_A_SHIFT: u32 = 18;
const CHANNEL_B_SHIFT: u32 = 2;

/// Pre-amp gain code accepted by [`AdcConfig`].
pub const GAIN_CODE_INVERTING_UNITY: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdcConfig {
    pub v_ref: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub v_abs_max: f64,
    pub bits: u32,
    pub gain_code: u8,
}

impl Default for AdcConfig {
    fn default() -> Self {
        Self {
            v_ref: 1.65,
            v_min: 0.4,
            v_max: 2.9,
            v_abs_max: 3.3,
            bits: 14,
            gain_code: GAIN_CODE_INVERTING_UNITY,
        }
    }
}

impl AdcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_min < self.v_ref && self.v_ref < self.v_max) {
            return Err(invalid("ADC window must satisfy v_min < v_ref < v_max"));
        }
        let below = self.v_ref - self.v_min;
        let above = self.v_max - self.v_ref;
        if (below - above).abs() > 1e-9 {
            return Err(invalid(format!(
                "ADC window must be symmetric about v_ref ({below} V below, {above} V above)"
            )));
        }
        if !(self.v_max <= self.v_abs_max) {
            return Err(invalid("v_max must not exceed v_abs_max"));
        }
        if self.bits != Q14::BITS {
            return Err(invalid(format!("only 14-bit conversion is modeled, got {}", self.bits)));
        }
        if self.gain_code != GAIN_CODE_INVERTING_UNITY {
            return Err(invalid(format!(
                "unsupported pre-amp gain code {:#04x}",
                self.gain_code
            )));
        }
        Ok(())
    }

    /// Signed pre-amp gain for the configured code.
    pub fn gain(&self) -> f64 {
        match self.gain_code {
            GAIN_CODE_INVERTING_UNITY => -1.0,
            _ => f64::NAN,
        }
    }

    /// Distance from the reference to either window edge (1.25 V by default).
    pub fn half_window(&self) -> f64 {
        self.v_max - self.v_ref
    }

    /// `[-2^(bits-1), 2^(bits-1) - 1]`.
    pub fn code_range(&self) -> (i32, i32) {
        let half = 1i32 << (self.bits - 1);
        (-half, half - 1)
    }
}

/// Ideal (unquantized, unclipped) ADC reading in full-scale units.
pub fn normalized_input(v: f64, cfg: &AdcConfig) -> f64 {
    cfg.gain() * (v - cfg.v_ref) / cfg.half_window()
}

/// Convert one voltage to a code: round half away from zero, then clamp.
pub fn sample_voltage(v: f64, cfg: &AdcConfig) -> Result<Q14> {
    if v > cfg.v_abs_max {
        return Err(Error::OverVoltage {
            volts: v,
            limit: cfg.v_abs_max,
        });
    }
    if !(v >= 0.0) {
        return Err(invalid(format!("ADC input must be >= 0 V, got {v}")));
    }
    let scaled = normalized_input(v, cfg) * (1i64 << (cfg.bits - 1)) as f64;
    Ok(Q14::saturating(scaled.round() as i64))
}

pub fn sample_stream(seq: &VoltageSequence, cfg: &AdcConfig) -> Result<Vec<Q14>> {
    seq.samples.iter().map(|&v| sample_voltage(v, cfg)).collect()
}

/// Simultaneous conversion of both channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AdcSamplePair {
    pub channel_a: Q14,
    pub channel_b: Q14,
}

impl AdcSamplePair {
    pub fn new(channel_a: Q14, channel_b: Q14) -> Self {
        Self {
            channel_a,
            channel_b,
        }
    }

    /// Both channels carrying the same code.
    pub fn mirrored(code: Q14) -> Self {
        Self::new(code, code)
    }
}

/// One 34-bit SPI transfer, index 0 transmitted first.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpiFrame {
    bits: [bool; FRAME_BITS],
}

impl SpiFrame {
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let bits: [bool; FRAME_BITS] = bits.try_into().map_err(|_| Error::Framing(bits.len()))?;
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[bool; FRAME_BITS] {
        &self.bits
    }
}

impl fmt::Debug for SpiFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpiFrame({self})")
    }
}

impl fmt::Display for SpiFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for SpiFrame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in SPI frame"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

pub fn encode_frame(pair: AdcSamplePair) -> SpiFrame {
    let word = ((pair.channel_a.to_bits() as u64) << CHANNEL_A_SHIFT)
        | ((pair.channel_b.to_bits() as u64) << CHANNEL_B_SHIFT);
    let mut bits = [false; FRAME_BITS];
    for (i, bit) in bits.iter_mut().enumerate() {
        *bit = (word >> (FRAME_BITS - 1 - i)) & 1 == 1;
    }
    SpiFrame { bits }
}

/// Clock the frame through a shift register, one new LSB per bit in
/// transmission order, then slice out the two channels.
pub fn decode_frame(frame: &SpiFrame) -> AdcSamplePair {
    let mut shift_reg: u64 = 0;
    for &bit in &frame.bits {
        shift_reg = (shift_reg << 1) | bit as u64;
    }
    AdcSamplePair {
        channel_a: Q14::from_bits((shift_reg >> CHANNEL_A_SHIFT) as u16),
        channel_b: Q14::from_bits((shift_reg >> CHANNEL_B_SHIFT) as u16),
    }
}

/// Decode a raw bit sequence, rejecting anything that is not 34 bits long.
pub fn decode_bits(bits: &[bool]) -> Result<AdcSamplePair> {
    SpiFrame::from_bits(bits).map(|f| decode_frame(&f))
}

/// Highest conversion rate when every sample costs 34 SPI clocks.
pub fn max_sample_rate(spi_clock: f64) -> f64 {
    spi_clock / FRAME_BITS as f64
}

pub fn nyquist_limit(fs: f64) -> f64 {
    fs / 2.0
}

/// Counter-based pulse generator that divides a clock down to the sample rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseDivider {
    pub clock: f64,
    pub target: f64,
    pub divider: u64,
}

impl PulseDivider {
    pub fn achieved_rate(&self) -> f64 {
        self.clock / self.divider as f64
    }

    /// Signed relative error of the achieved rate against the target.
    pub fn rate_error(&self) -> f64 {
        (self.achieved_rate() - self.target) / self.target
    }

    pub fn period(&self) -> f64 {
        1.0 / self.achieved_rate()
    }
}

pub fn pulse_divider(clock: f64, target_fs: f64) -> Result<PulseDivider> {
    if !(target_fs > 0.0) {
        return Err(invalid(format!("target rate must be positive, got {target_fs}")));
    }
    if !(clock >= target_fs) {
        return Err(invalid(format!(
            "target rate {target_fs} Hz is above the {clock} Hz clock"
        )));
    }
    Ok(PulseDivider {
        clock,
        target: target_fs,
        divider: (clock / target_fs).round() as u64,
    })
}

/// Pulse-driven sampling chain: divider, ADC and SPI transport.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingChain {
    adc: AdcConfig,
    pulse: PulseDivider,
    spi_clock: f64,
}

impl SamplingChain {
    /// Fails if the achieved rate needs more than one 34-bit transfer per
    /// sample period at `spi_clock`.
    pub fn new(adc: AdcConfig, system_clock: f64, spi_clock: f64, target_fs: f64) -> Result<Self> {
        adc.validate()?;
        if !(spi_clock > 0.0) {
            return Err(invalid(format!("SPI clock must be positive, got {spi_clock}")));
        }
        let pulse = pulse_divider(system_clock, target_fs)?;
        let limit = max_sample_rate(spi_clock);
        if pulse.achieved_rate() > limit {
            return Err(invalid(format!(
                "sample rate {} Hz exceeds the SPI transfer limit of {limit} Hz",
                pulse.achieved_rate()
            )));
        }
        Ok(Self {
            adc,
            pulse,
            spi_clock,
        })
    }

    pub fn adc(&self) -> &AdcConfig {
        &self.adc
    }

    pub fn pulse(&self) -> &PulseDivider {
        &self.pulse
    }

    pub fn spi_clock(&self) -> f64 {
        self.spi_clock
    }

    pub fn sample_rate(&self) -> f64 {
        self.pulse.achieved_rate()
    }

    /// Convert a stimulus and return the SPI frames, channel B mirroring A.
    pub fn frames(&self, seq: &VoltageSequence) -> Result<Vec<SpiFrame>> {
        self.check_rate(seq)?;
        seq.samples
            .iter()
            .map(|&v| sample_voltage(v, &self.adc).map(|q| encode_frame(AdcSamplePair::mirrored(q))))
            .collect()
    }

    /// Channel-A codes as received on the far side of the SPI link.
    pub fn capture(&self, seq: &VoltageSequence) -> Result<Vec<Q14>> {
        Ok(self
            .frames(seq)?
            .iter()
            .map(|f| decode_frame(f).channel_a)
            .collect())
    }

    fn check_rate(&self, seq: &VoltageSequence) -> Result<()> {
        let fs = self.sample_rate();
        if ((seq.sample_rate - fs) / fs).abs() > 1e-9 {
            return Err(invalid(format!(
                "stimulus sampled at {} Hz, chain runs at {fs} Hz",
                seq.sample_rate
            )));
        }
        Ok(())
    }
}
